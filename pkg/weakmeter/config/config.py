#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Run configuration for weakmeter

A run is described by a flat ``key = value`` document with ``#`` comments.
Values are resolved in two steps:

1. ``resolve_parameters`` reads the document and fills every key, defaults
   included, with its canonical string form (the form written to the CSV
   manifest);
2. ``build_config`` turns the resolved parameters into a validated
   ExperimentConfig or SweepSpec.

Angles are in degrees here and converted to radians when building models.
"""

import configparser
import logging
import math

from pydantic import ValidationError

from ..constants import DEFAULT_N_PHOTONS, DEFAULT_SEED, TRADEOFF_PHI_DEG, BENCH_THETA_DEG
from ..errors import ConfigParseError, ConfigValidationError
from ..models import Analysis, ExperimentConfig, MeasurementSetting, SweepSpec, SweepVariable, validate_post_select
from ..utils import format_number

# Set up logger for this module
logger = logging.getLogger(__name__)

COMMANDS = ("weak-sweep", "tradeoff", "calibrate", "eval")

_SECTION = "weakmeter"

# key -> value kind, in manifest order
_KEYS = {
    "theta_deg": "float",
    "v_hv": "float",
    "v_pm": "float",
    "phi_deg": "optional_float",
    "phi_start_deg": "optional_float",
    "phi_stop_deg": "optional_float",
    "phi_step_deg": "optional_float",
    "theta_start_deg": "float",
    "theta_stop_deg": "float",
    "theta_step_deg": "float",
    "n_photons": "int",
    "seed": "int",
    "post_select": "state",
    "analysis": "analysis",
    "monitor_fraction": "float",
    "exact": "bool",
    "eta": "optional_float",
    "workers": "int",
}

PHI_RANGE_KEYS = ("phi_start_deg", "phi_stop_deg", "phi_step_deg")
THETA_RANGE_KEYS = ("theta_start_deg", "theta_stop_deg", "theta_step_deg")

_DEFAULT_PHI_DEG = {"tradeoff": TRADEOFF_PHI_DEG, "calibrate": 45.0, "eval": 2.0, "weak-sweep": 2.0}

# model field path -> config key
_FIELD_KEYS = {
    "theta": "theta_deg",
    "v_hv": "v_hv",
    "v_pm": "v_pm",
    "input_phi": "phi_deg",
    "n_photons": "n_photons",
    "seed": "seed",
    "post_select": "post_select",
    "analysis": "analysis",
    "monitor_fraction": "monitor_fraction",
    "exact": "exact",
    "eta": "eta",
    "workers": "workers",
}

NONE = "none"


def default_parameters(command="eval"):
    """Every key with its default for ``command``, in canonical string form."""
    return {
        "theta_deg": format_number(BENCH_THETA_DEG),
        "v_hv": "1.0",
        "v_pm": "1.0",
        "phi_deg": format_number(_DEFAULT_PHI_DEG[command]),
        "phi_start_deg": NONE,
        "phi_stop_deg": NONE,
        "phi_step_deg": NONE,
        "theta_start_deg": "0.0",
        "theta_stop_deg": "22.5",
        "theta_step_deg": "2.5",
        "n_photons": str(DEFAULT_N_PHOTONS),
        "seed": str(DEFAULT_SEED),
        "post_select": "H" if command in ("weak-sweep", "eval") else NONE,
        "analysis": Analysis.PM_BRANCH.value,
        "monitor_fraction": "0.0",
        "exact": "false",
        "eta": NONE,
        "workers": "1",
    }

#%% reading

def _read_document(text):
    """Raw ``{key: value}`` pairs of a configuration document."""
    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        strict=True,
    )
    try:
        # indented lines would otherwise continue the previous value
        body = "\n".join(line.lstrip() for line in text.splitlines())
        # the implicit section header shifts every line by one
        parser.read_string(f"[{_SECTION}]\n{body}")
    except configparser.DuplicateOptionError as e:
        raise ConfigParseError(f"duplicate key '{e.option}'", line=e.lineno - 1)
    except configparser.DuplicateSectionError as e:
        raise ConfigParseError("section headers are not supported", line=e.lineno - 1 if e.lineno else None)
    except configparser.ParsingError as e:
        lineno, line = e.errors[0]
        raise ConfigParseError(f"expected 'key = value', got {line.strip()}", line=lineno - 1)
    except configparser.Error as e:
        raise ConfigParseError(str(e))

    if parser.sections() != [_SECTION]:
        raise ConfigParseError("section headers are not supported")
    return dict(parser.items(_SECTION))


def _canonical(key, raw):
    """Canonical string form of one raw value; ConfigValidationError if malformed."""
    kind = _KEYS[key]
    text = raw.strip()
    if text == "":
        raise ConfigValidationError(key, "empty value")
    if text.lower() == NONE and kind in ("optional_float", "state"):
        return NONE
    try:
        if kind in ("float", "optional_float"):
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return format_number(value)
        if kind == "int":
            try:
                return str(int(text))
            except ValueError:
                value = float(text)
                if not value.is_integer():
                    raise
                return str(int(value))
        if kind == "bool":
            return "true" if configparser.ConfigParser.BOOLEAN_STATES[text.lower()] else "false"
        if kind == "analysis":
            return Analysis(text.lower()).value
        if kind == "state":
            return validate_post_select(text)
    except KeyError:
        raise ConfigValidationError(key, f"expected a boolean, got '{text}'")
    except ValueError as e:
        expected = {
            "float": "a finite number",
            "optional_float": "a finite number or none",
            "int": "an integer",
            "analysis": f"one of {', '.join(a.value for a in Analysis)}",
        }.get(kind)
        raise ConfigValidationError(key, f"expected {expected}, got '{text}'" if expected else str(e))
    raise AssertionError(kind)


def resolve_parameters(text, command=None, overrides=None):
    """Read a configuration document and fill in every default.

    Args:
        text (str): document of ``key = value`` lines
        command (str, optional): one of COMMANDS; inferred when None (a phi
            range means weak-sweep, anything else eval)
        overrides (dict, optional): raw values applied on top of the document,
            e.g. from command-line flags

    Returns:
        dict: ``{key: canonical string}`` for every known key, in manifest order

    Raises:
        ConfigParseError: if the document is malformed
        ConfigValidationError: for unknown keys and malformed or conflicting values
    """
    raw = _read_document(text)
    raw.update({k: str(v) for k, v in (overrides or {}).items()})

    unknown = [key for key in raw if key not in _KEYS]
    if unknown:
        raise ConfigValidationError(unknown[0], f"unknown key; expected one of {', '.join(_KEYS)}")
    given = {key: _canonical(key, value) for key, value in raw.items()}

    phi_range = [key for key in PHI_RANGE_KEYS if given.get(key, NONE) != NONE]
    if phi_range and len(phi_range) != len(PHI_RANGE_KEYS):
        missing = next(key for key in PHI_RANGE_KEYS if key not in phi_range)
        raise ConfigValidationError(missing, "a phi range needs phi_start_deg, phi_stop_deg and phi_step_deg")
    if phi_range and given.get("phi_deg", NONE) != NONE:
        raise ConfigValidationError("phi_deg", "cannot be combined with a phi range")

    if command is None:
        command = "weak-sweep" if phi_range else "eval"
    elif command not in COMMANDS:
        raise ValueError(f"unknown command '{command}'")
    if phi_range and command != "weak-sweep":
        raise ConfigValidationError("phi_start_deg", f"a phi range is only used by weak-sweep, not {command}")

    params = default_parameters(command)
    params.update(given)
    if phi_range:
        params["phi_deg"] = NONE
    elif params["phi_deg"] == NONE:
        params["phi_deg"] = default_parameters(command)["phi_deg"]

    logger.debug(f"resolved {len(params)} parameters for {command}, {len(given)} given")
    return params

#%% building

def _validated(model, **kwargs):
    """Instantiate a pydantic model, naming the offending config key on failure."""
    try:
        return model(**kwargs)
    except ValidationError as e:
        error = e.errors()[0]
        location = [str(part) for part in error["loc"] if not isinstance(part, int)]
        key = next((_FIELD_KEYS[part] for part in reversed(location) if part in _FIELD_KEYS), None)
        if key is None:
            key = "post_select" if not location else location[-1]
        raise ConfigValidationError(key, error["msg"])


def angle_grid(start, stop, step, keys):
    """Degrees from start to stop (inclusive within 1e-9 step) as radians."""
    start_key, stop_key, step_key = keys
    if step <= 0:
        raise ConfigValidationError(step_key, f"must be positive, got {format_number(step)}")
    if stop < start:
        raise ConfigValidationError(stop_key, f"must not be below {start_key} ({format_number(start)})")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return [math.radians(start + i * step) for i in range(count)]


def _optional(value):
    return None if value == NONE else value


def build_config(params, command="eval"):
    """Validated model for resolved parameters.

    Returns:
        ExperimentConfig for eval and calibrate, SweepSpec for weak-sweep and tradeoff
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command '{command}'")

    post_select = _optional(params["post_select"])
    analysis = Analysis(params["analysis"])
    if command in ("tradeoff", "calibrate") and post_select is not None:
        raise ConfigValidationError("post_select", f"{command} runs without polarizers")
    if command in ("tradeoff", "calibrate") and analysis is not Analysis.PM_BRANCH:
        raise ConfigValidationError("analysis", f"{command} chooses its own analysis")

    setting = _validated(
        MeasurementSetting,
        theta=math.radians(float(params["theta_deg"])),
        v_hv=float(params["v_hv"]),
        v_pm=float(params["v_pm"]),
    )

    grid = None
    if command == "weak-sweep":
        if params["phi_start_deg"] != NONE:
            grid = angle_grid(*(float(params[key]) for key in PHI_RANGE_KEYS), PHI_RANGE_KEYS)
        else:
            grid = [math.radians(float(params["phi_deg"]))]
    elif command == "tradeoff":
        grid = angle_grid(*(float(params[key]) for key in THETA_RANGE_KEYS), THETA_RANGE_KEYS)

    input_phi = grid[0] if command == "weak-sweep" else math.radians(float(params["phi_deg"]))
    eta = _optional(params["eta"])
    cfg = _validated(
        ExperimentConfig,
        n_photons=int(params["n_photons"]),
        seed=int(params["seed"]),
        setting=setting,
        input_phi=input_phi,
        post_select=post_select,
        analysis=analysis,
        monitor_fraction=float(params["monitor_fraction"]),
        exact=params["exact"] == "true",
        eta=None if eta is None else float(eta),
    )
    if command == "weak-sweep" and cfg.post_select is None:
        raise ConfigValidationError("post_select", "weak-sweep needs a post-selection state")

    if grid is None:
        return cfg
    variable = SweepVariable.PHI if command == "weak-sweep" else SweepVariable.THETA
    return _validated(SweepSpec, variable=variable, grid=grid, base=cfg, workers=int(params["workers"]))


def parse_config(text, command=None, overrides=None):
    """Parse a configuration document into a validated model.

    An empty document gives the all-defaults eval configuration; a phi range
    without a command gives a weak-value sweep.
    """
    params = resolve_parameters(text, command, overrides)
    if command is None:
        command = "weak-sweep" if params["phi_start_deg"] != NONE else "eval"
    return build_config(params, command)


def render_parameters(params):
    """Configuration document for resolved parameters (inverse of resolve_parameters)."""
    return "".join(f"{key} = {value}\n" for key, value in params.items())


def load_config(path, command, overrides=None):
    """
    Read, resolve and validate a configuration file.

    Args:
        path (str or Path): configuration file (UTF-8)
        command (str): one of COMMANDS
        overrides (dict, optional): raw values taking precedence over the file

    Returns:
        tuple: (resolved parameters, ExperimentConfig or SweepSpec)

    Raises:
        FileNotFoundError: if the file does not exist
        ConfigError: if the file is malformed or invalid
    """
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    params = resolve_parameters(text, command, overrides)
    logger.info(f"loaded {command} configuration from {path}")
    return params, build_config(params, command)


MANIFEST_ONLY_KEYS = ("schema", "command", "config_path", "config_sha256", "output_path")


def read_manifest(csv_text):
    """Resolved parameters embedded in the header of an emitted CSV.

    ``parse_config(render_parameters(read_manifest(csv)), command)`` rebuilds
    the configuration the CSV was produced from.
    """
    params = {}
    for line in csv_text.splitlines():
        if not line.startswith("# "):
            break
        key, _, value = line[2:].partition(" = ")
        if key not in MANIFEST_ONLY_KEYS:
            params[key] = value
    return params
