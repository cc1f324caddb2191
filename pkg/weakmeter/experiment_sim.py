"""
Photon-counting simulation of the weak-measurement bench.

A run sends ``n_photons`` through the interferometer and sorts each photon
into one outcome cell (branch, optionally crossed with a polarizer or HV
readout, or the intensity monitor). Sampled runs draw one multinomial over
the cells from a Philox stream keyed by (seed, point index); exact runs use
the expected counts instead.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .constants import (
    ATOL,
    BARE_LABELS,
    HV_LABELS,
    MONITOR_LABEL,
    POLARIZATION_THRESHOLD,
    POSTSELECTED_LABELS,
    RESOLUTION_THRESHOLD,
)
from .errors import (
    DegeneratePostSelection,
    DomainError,
    NoDetectedCounts,
    NoPostSelectedCounts,
    UnpolarizedInput,
    ZeroResolution,
)
from .meas_model import (
    backaction_from_stats,
    branch_states,
    ellipse_residual_values,
    epsilon_ideal,
    eta_ideal,
    max_enhancement,
    max_enhancement_numeric,
    postselected_weights,
    predicted_exp_value,
    predicted_exp_value_phi,
    resolution_from_stats,
)
from .models import (
    Analysis,
    CalibrationRow,
    CountRecord,
    ExperimentConfig,
    QuantityRow,
    SweepVariable,
    TradeoffRow,
    WeakSweepRow,
)
from .polar_core import (
    H,
    S_PM,
    V,
    input_state,
    named_state,
    stokes_hv,
    stokes_pm,
    weak_value,
)
from .utils import point_generator

logger = logging.getLogger(__name__)

CALIBRATION_PHI = math.pi / 4

#%% outcome probabilities and counts

def outcome_distribution(cfg: ExperimentConfig):
    """Exact probability of every outcome cell of one run.

    Cells are b1/b2 for bare runs, b1_pass/b1_block/b2_pass/b2_block with a
    polarizer in both outputs, or b1_H/b1_V/b2_H/b2_V for HV readout, plus
    the monitor cell. Detector cells are scaled by (1 - monitor_fraction).
    """
    rho = input_state(cfg.input_phi).density()
    branches = branch_states(rho, cfg.setting)
    b1, b2 = branches.b1, branches.b2

    if cfg.post_select is not None:
        m_f = named_state(cfg.post_select)
        pass1, pass2 = b1.matrix_element(m_f), b2.matrix_element(m_f)
        values = [pass1, b1.trace - pass1, pass2, b2.trace - pass2]
        labels = POSTSELECTED_LABELS
    elif cfg.analysis is Analysis.HV_OUTPUT:
        values = [b1.matrix_element(H), b1.matrix_element(V), b2.matrix_element(H), b2.matrix_element(V)]
        labels = HV_LABELS
    else:
        values = [b1.trace, b2.trace]
        labels = BARE_LABELS

    kept = 1.0 - cfg.monitor_fraction
    distribution = {}
    for label, value in zip(labels, values):
        if value < -ATOL:
            raise ValueError(f"negative probability {value!r} for cell {label}")
        distribution[label] = kept * max(value, 0.0)
    distribution[MONITOR_LABEL] = cfg.monitor_fraction
    return distribution


def simulate_counts(cfg: ExperimentConfig, stream=()):
    """One multinomial draw of ``cfg.n_photons`` over the outcome cells.

    Args:
        cfg (ExperimentConfig): run to simulate
        stream (tuple): spawn key of the random stream, e.g. the sweep point index

    Returns:
        CountRecord: integer counts, identical for identical (cfg, stream)
    """
    distribution = outcome_distribution(cfg)
    labels = list(distribution)
    pvals = np.array([distribution[label] for label in labels], dtype=float)
    pvals = pvals / pvals.sum()

    rng = point_generator(cfg.seed, *stream)
    drawn = rng.multinomial(cfg.n_photons, pvals)
    counts = {label: int(n) for label, n in zip(labels, drawn)}
    n_monitor = counts.pop(MONITOR_LABEL)
    return CountRecord(cells=counts, n_monitor=n_monitor, n_photons=cfg.n_photons)


def exact_counts(cfg: ExperimentConfig):
    """Expected counts n * p per cell, flagged as exact."""
    distribution = outcome_distribution(cfg)
    n = cfg.n_photons
    cells = {label: n * p for label, p in distribution.items() if label != MONITOR_LABEL}
    return CountRecord(
        cells=cells,
        n_monitor=n * distribution[MONITOR_LABEL],
        n_photons=n,
        exact=True,
    )


def collect_counts(cfg: ExperimentConfig, stream=()):
    """Exact or sampled counts, as the config asks."""
    if cfg.exact:
        return exact_counts(cfg)
    return simulate_counts(cfg, stream)

#%% estimators

def _binomial_split(n1, n2):
    total = n1 + n2
    if total <= 0:
        raise NoDetectedCounts("no photons reached the output detectors")
    p1, p2 = n1 / total, n2 / total
    return p1, p2, total


def estimate_conditional_value(counts: CountRecord, epsilon):
    """Conditional value (n1 - n2)/((n1 + n2) eps) from the passing cells.

    Returns:
        tuple: (value, std_error) with std_error = (2/|eps|) sqrt(n1 n2 / (n1 + n2)^3)

    Raises:
        NoPostSelectedCounts: if no photon passed either polarizer.
        ZeroResolution: if |eps| <= 1e-12.
    """
    if abs(epsilon) <= RESOLUTION_THRESHOLD:
        raise ZeroResolution(f"resolution {epsilon!r} is zero; the conditional value is undefined")
    n1, n2 = counts.cells["b1_pass"], counts.cells["b2_pass"]
    total = n1 + n2
    if total <= 0:
        raise NoPostSelectedCounts("no photon passed the post-selecting polarizers")
    value = (n1 - n2) / (total * epsilon)
    std_error = (2.0 / abs(epsilon)) * math.sqrt(n1 * n2 / total ** 3)
    return value, std_error


def estimate_resolution(counts: CountRecord, input_stokes_pm):
    """(value, std_error) of the resolution from a bare-branch run."""
    p1, p2, total = _binomial_split(counts.cells["b1"], counts.cells["b2"])
    value = resolution_from_stats(p1, p2, input_stokes_pm)
    return value, 2.0 * math.sqrt(p1 * p2 / total) / abs(input_stokes_pm)


def estimate_backaction(counts: CountRecord, input_stokes_hv):
    """(value, std_error) of 2 eta_HV from an HV-readout run, both branches summed."""
    p_h, p_v, total = _binomial_split(counts.total("b1_H", "b2_H"), counts.total("b1_V", "b2_V"))
    value = backaction_from_stats(p_h, p_v, input_stokes_hv)
    return value, 2.0 * math.sqrt(p_h * p_v / total) / abs(input_stokes_hv)

#%% calibration

def calibration_config(n_photons, setting, seed, exact=False, monitor_fraction=0.0):
    return ExperimentConfig(
        n_photons=n_photons,
        seed=seed,
        setting=setting,
        input_phi=CALIBRATION_PHI,
        exact=exact,
        monitor_fraction=monitor_fraction,
    )


def calibrate_epsilon(n_photons, setting, seed, exact=False):
    """Resolution measured with a P-polarized input and no polarizers.

    Returns (n_b1 - n_b2)/(n_b1 + n_b2), an estimate of v_hv sin(4 theta).
    """
    counts = collect_counts(calibration_config(n_photons, setting, seed, exact))
    n1, n2 = counts.cells["b1"], counts.cells["b2"]
    return (n1 - n2) / (n1 + n2)


def calibrate(cfg: ExperimentConfig):
    """Calibration row for a configured run (input angle taken from cfg).

    The estimate is normalized by the input PM polarization, which is 1 for
    the default P input.
    """
    cfg = cfg.model_copy(update={"post_select": None, "analysis": Analysis.PM_BRANCH})
    counts = collect_counts(cfg)
    estimate, error = estimate_resolution(counts, stokes_pm(input_state(cfg.input_phi).density()))
    model = cfg.setting.v_hv * epsilon_ideal(cfg.setting.theta)
    logger.info(f"calibrated epsilon {estimate:.6g} +/- {error:.2g} (model {model:.6g})")
    return CalibrationRow(epsilon_est=estimate, epsilon_err=error, epsilon_model=model)

#%% single-point query

def _quantity(name, func):
    try:
        return QuantityRow(quantity=name, value=func())
    except (DegeneratePostSelection, DomainError, ZeroResolution, NoPostSelectedCounts) as e:
        logger.debug(f"{name} undefined: {e}")
        return QuantityRow(quantity=name, value=None)


def evaluate(cfg: ExperimentConfig):
    """Model and simulated values at one working point.

    Quantities that are undefined at this point (no post-selection, zero
    resolution, eta outside the small-eta domain) are left empty.
    """
    theta = cfg.setting.theta
    epsilon = cfg.setting.v_hv * epsilon_ideal(theta)
    eta = cfg.eta if cfg.eta is not None else eta_ideal(theta)
    psi_i = input_state(cfg.input_phi)
    m_f = named_state(cfg.post_select) if cfg.post_select is not None else None

    def post_selected(func):
        def wrapped():
            if m_f is None:
                raise DegeneratePostSelection("no post-selection configured")
            return func()
        return wrapped

    value_est = std_err = None
    if m_f is not None:
        try:
            value_est, std_err = estimate_conditional_value(collect_counts(cfg), epsilon)
        except (ZeroResolution, NoPostSelectedCounts) as e:
            logger.warning(f"no conditional value estimate: {e}")

    return [
        _quantity("eps_ideal", lambda: epsilon_ideal(theta)),
        _quantity("epsilon", lambda: epsilon),
        _quantity("eta_ideal", lambda: eta_ideal(theta)),
        _quantity("eta", lambda: eta),
        _quantity("weak_value", post_selected(lambda: weak_value(psi_i, m_f, S_PM))),
        _quantity("value_eq7", post_selected(lambda: predicted_exp_value(psi_i, m_f, theta, eta))),
        _quantity("value_eq9", lambda: predicted_exp_value_phi(cfg.input_phi, eta)),
        _quantity(
            "post_selection_probability",
            post_selected(lambda: sum(postselected_weights(psi_i.density(), cfg.setting, m_f))),
        ),
        QuantityRow(quantity="value_est", value=value_est),
        QuantityRow(quantity="std_err", value=std_err),
        _quantity("max_enhancement", lambda: max_enhancement(eta)[0]),
        _quantity("max_enhancement_numeric", lambda: max_enhancement_numeric(eta)[0]),
    ]

#%% sweeps

def _map_points(func, grid, workers):
    points = list(enumerate(grid))
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(lambda item: func(*item), points))
    return [func(index, angle) for index, angle in points]


def _prediction(cfg, m_f, eta):
    """Finite back-action prediction for one input angle, None where undefined."""
    try:
        if cfg.post_select == "H":
            return predicted_exp_value_phi(cfg.input_phi, eta)
        return predicted_exp_value(input_state(cfg.input_phi), m_f, cfg.setting.theta, eta)
    except DegeneratePostSelection:
        return None


def sweep_weak_values(spec):
    """Post-selected conditional values over a grid of input angles.

    One row per grid angle, in grid order. Points with no post-selected
    counts keep their row with an empty estimate and a note.

    Raises:
        ValueError: if the sweep is not over phi or has no post-selection.
        ZeroResolution: if the calibrated resolution v_hv sin(4 theta) is zero.
    """
    base = spec.base
    if spec.variable is not SweepVariable.PHI:
        raise ValueError("a weak-value sweep runs over phi")
    if base.post_select is None:
        raise ValueError("a weak-value sweep needs a post-selection state")

    epsilon = base.setting.v_hv * epsilon_ideal(base.setting.theta)
    if abs(epsilon) <= RESOLUTION_THRESHOLD:
        raise ZeroResolution(f"resolution {epsilon!r} is zero at theta = {base.setting.theta_deg} deg")
    eta = base.eta if base.eta is not None else eta_ideal(base.setting.theta)
    m_f = named_state(base.post_select)

    def run_point(index, phi):
        cfg = base.model_copy(update={"input_phi": phi})
        counts = collect_counts(cfg, (index,))
        n_pass = counts.total("b1_pass", "b2_pass")
        row = dict(
            phi_deg=round(math.degrees(phi), 12),
            value_eq9=_prediction(cfg, m_f, eta),
            n_pass=n_pass,
            n_block=counts.total("b1_block", "b2_block"),
        )
        try:
            row["weak_value"] = weak_value(input_state(phi), m_f, S_PM)
        except DegeneratePostSelection:
            row["weak_value"] = None
        try:
            row["value_est"], row["std_err"] = estimate_conditional_value(counts, epsilon)
        except NoPostSelectedCounts as e:
            logger.warning(f"phi = {math.degrees(phi):g} deg: {e}")
            row["note"] = str(e)
        logger.debug(f"phi = {math.degrees(phi):g} deg: {n_pass} post-selected photons")
        return WeakSweepRow(**row)

    rows = _map_points(run_point, spec.grid, spec.workers)
    flagged = sum(1 for row in rows if row.note)
    logger.info(f"weak-value sweep: {len(rows)} points, {flagged} without post-selected counts")
    return rows


def sweep_tradeoff(spec):
    """Resolution and back-action estimates over a grid of HWP angles.

    Each point runs a bare-branch run (stream (i, 0)) for the resolution and
    an HV-readout run (stream (i, 1)) for the back-action, both from the base
    input angle.

    Raises:
        ValueError: if the sweep is not over theta.
        UnpolarizedInput: if the input has no PM or no HV polarization.
    """
    base = spec.base
    if spec.variable is not SweepVariable.THETA:
        raise ValueError("a trade-off sweep runs over theta")

    rho = input_state(base.input_phi).density()
    s_pm, s_hv = stokes_pm(rho), stokes_hv(rho)
    for name, value in (("PM", s_pm), ("HV", s_hv)):
        if abs(value) <= POLARIZATION_THRESHOLD:
            raise UnpolarizedInput(
                f"input at phi = {base.input_phi_deg:g} deg has no {name} polarization; "
                "the trade-off estimators need both"
            )
    v_hv, v_pm = base.setting.v_hv, base.setting.v_pm

    def run_point(index, theta):
        setting = base.setting.model_copy(update={"theta": theta})
        bare = base.model_copy(update={"setting": setting, "post_select": None, "analysis": Analysis.PM_BRANCH})
        readout = bare.model_copy(update={"analysis": Analysis.HV_OUTPUT})
        epsilon, epsilon_err = estimate_resolution(collect_counts(bare, (index, 0)), s_pm)
        back_action, back_action_err = estimate_backaction(collect_counts(readout, (index, 1)), s_hv)
        residual = None
        if v_hv > 0 and v_pm > 0:
            residual = ellipse_residual_values(epsilon, back_action, v_hv, v_pm)
        logger.debug(f"theta = {math.degrees(theta):g} deg: eps {epsilon:.6g}, 2eta {back_action:.6g}")
        return TradeoffRow(
            theta_deg=round(math.degrees(theta), 12),
            epsilon_est=epsilon,
            epsilon_err=epsilon_err,
            backaction_est=back_action,
            backaction_err=back_action_err,
            ellipse_residual=residual,
        )

    rows = _map_points(run_point, spec.grid, spec.workers)
    logger.info(f"trade-off sweep: {len(rows)} points")
    return rows


__all__ = [
    "calibrate",
    "calibrate_epsilon",
    "calibration_config",
    "collect_counts",
    "estimate_backaction",
    "estimate_conditional_value",
    "estimate_resolution",
    "evaluate",
    "exact_counts",
    "outcome_distribution",
    "simulate_counts",
    "sweep_tradeoff",
    "sweep_weak_values",
]
