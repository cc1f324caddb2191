from .polar_core import *
from .meas_model import *
from .experiment_sim import *
from .models import (
    Analysis,
    CountRecord,
    ExperimentConfig,
    MeasurementSetting,
    RunManifest,
    SweepSpec,
    SweepVariable,
    TradeoffPoint,
)
from .errors import *
from . import config
from .config import parse_config, load_config
from .output import emit_csv
