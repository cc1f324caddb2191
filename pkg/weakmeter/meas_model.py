"""
Closed-form model of the variable-strength PM polarization measurement.

The PBS splits the photon into an H path (a2) and a V path (a1). Half-wave
plates rotate the two paths by +theta and -theta, the paths interfere at a
50:50 beam splitter, and a compensating plate in b2 undoes the phase flip
between H and V. Imperfect interference enters through two visibilities:

* ``v_hv`` damps the a1/a2 cross terms at the beam splitter and only lowers
  the resolution;
* ``v_pm`` is a PM-basis phase-flip channel applied before the
  interferometer and only adds back-action.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import (
    ATOL,
    ENHANCEMENT_SEARCH_BOUNDS,
    ENHANCEMENT_SEARCH_XATOL,
    POLARIZATION_THRESHOLD,
    PROBABILITY_THRESHOLD,
    RESOLUTION_THRESHOLD,
    TRADEOFF_PHI_DEG,
)
from .errors import DegeneratePostSelection, DomainError, UnpolarizedInput, ZeroResolution
from .models import MeasurementSetting, TradeoffPoint
from .polar_core import (
    H,
    V,
    DensityMatrix,
    Operator2,
    S_PM,
    as_density,
    hwp_jones,
    input_state,
    stokes_hv,
    stokes_pm,
    weak_value,
)

logger = logging.getLogger(__name__)

_SQRT_HALF = 1.0 / math.sqrt(2.0)

#%% measurement operators

def arm_operators(theta):
    """Return the path operators (A, B).

    A takes the H component through path a2 (plate at +theta), B takes the V
    component through path a1 (plate at -theta, the sign being the fixed
    path phase). Their columns are (cos 2t, sin 2t) and (sin 2t, cos 2t).
    """
    projector_h = Operator2(np.outer(H.vector, H.vector.conj()))
    projector_v = Operator2(np.outer(V.vector, V.vector.conj()))
    a = hwp_jones(theta) @ projector_h
    b = -(hwp_jones(-theta) @ projector_v)
    return a, b


def compensator():
    """The plate in b2 (HWP at 0) that removes the H/V phase flip."""
    return hwp_jones(0.0)


def uncompensated_b2(theta):
    """b2 output operator before the compensating plate, (A - B)/sqrt(2)."""
    a, b = arm_operators(theta)
    return (a - b) * _SQRT_HALF


def kraus_operators(theta):
    """Return (M_b1, M_b2) for the ideal interferometer.

    M_b1 = (A + B)/sqrt(2); M_b2 is (A - B)/sqrt(2) followed by the
    compensating plate, which gives the symmetric matrix
    [[cos 2t, -sin 2t], [-sin 2t, cos 2t]]/sqrt(2).
    """
    a, b = arm_operators(theta)
    m_b1 = (a + b) * _SQRT_HALF
    m_b2 = compensator() @ uncompensated_b2(theta)
    return m_b1, m_b2


def epsilon_ideal(theta):
    """Measurement resolution sin(4 theta)."""
    return float(np.sin(4 * theta))


def eta_ideal(theta):
    """H <-> V transition probability sin^2(2 theta)."""
    return float(np.sin(2 * theta) ** 2)


def povm_elements(theta):
    """Return (E_b1, E_b2) = (1 +/- eps S_PM)/2 with eps = sin(4 theta)."""
    epsilon = epsilon_ideal(theta)
    identity = np.eye(2)
    return (
        Operator2(0.5 * (identity + epsilon * S_PM.entries)),
        Operator2(0.5 * (identity - epsilon * S_PM.entries)),
    )

#%% imperfect channel

@dataclass(frozen=True)
class BranchPair:
    """Unnormalized output states of b1 and b2; each trace is a probability."""

    b1: DensityMatrix
    b2: DensityMatrix

    @property
    def probabilities(self):
        return self.b1.trace, self.b2.trace

    @property
    def total(self):
        return self.b1 + self.b2


def pm_dephasing(rho, v_pm):
    """PM-basis phase flip with probability (1 - v_pm)/2."""
    p = 0.5 * (1.0 - v_pm)
    flipped = S_PM.sandwich(rho)
    return DensityMatrix((1.0 - p) * rho.entries + p * flipped)


def branch_states(rho, s: MeasurementSetting):
    """Propagate rho through the interferometer with visibilities v_hv, v_pm.

    b1 = (A r A+ + B r B+ + v_hv (A r B+ + B r A+))/2 and b2 the same with the
    cross terms subtracted and the compensating plate applied, where r is
    rho after PM dephasing. With v_hv = v_pm = 1 this is M rho M+.

    Raises:
        InvalidState: if rho is not Hermitian and positive with trace <= 1.
    """
    rho = as_density(rho).validate(unit_trace=False)
    dephased = pm_dephasing(rho, s.v_pm) if s.v_pm != 1.0 else rho
    a, b = arm_operators(s.theta)

    direct = a.sandwich(dephased) + b.sandwich(dephased)
    cross = s.v_hv * (a.sandwich(dephased, b) + b.sandwich(dephased, a))

    c = compensator().entries
    b1 = 0.5 * (direct + cross)
    b2 = c @ (0.5 * (direct - cross)) @ c.conj().T
    return BranchPair(DensityMatrix(b1), DensityMatrix(b2))


def output_probabilities(rho, s):
    """(P(b1), P(b2)) without post-selection.

    P(b1) - P(b2) = v_hv sin(4 theta) <S_PM>.
    """
    rho = as_density(rho).validate(unit_trace=True)
    return branch_states(rho, s).probabilities


def hv_output_probabilities(rho, s):
    """(P(H), P(V)) summed over both output branches."""
    rho = as_density(rho).validate(unit_trace=True)
    total = branch_states(rho, s).total
    return total.matrix_element(H), total.matrix_element(V)


def postselected_weights(rho, s, m_f):
    """(<m_f|b1|m_f>, <m_f|b2|m_f>), the joint probabilities of branch and pass."""
    branches = branch_states(rho, s)
    return branches.b1.matrix_element(m_f), branches.b2.matrix_element(m_f)


def conditional_probabilities(rho, s, m_f, threshold=PROBABILITY_THRESHOLD):
    """(P(b1|m_f), P(b2|m_f)).

    Raises:
        DegeneratePostSelection: if the post-selected probability is below threshold.
    """
    w1, w2 = postselected_weights(rho, s, m_f)
    total = w1 + w2
    if total <= threshold:
        raise DegeneratePostSelection(f"post-selected probability {total:.3e} is below {threshold:g}")
    return w1 / total, w2 / total

#%% conditional values

def experimental_value_from_probs(p_b1, p_b2, epsilon):
    """(p_b1 - p_b2)/epsilon.

    Raises:
        ZeroResolution: if |epsilon| <= 1e-12.
    """
    if abs(epsilon) <= RESOLUTION_THRESHOLD:
        raise ZeroResolution(f"resolution {epsilon!r} is zero; the conditional value is undefined")
    if abs(p_b1 + p_b2 - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p_b1 + p_b2}, expected 1")
    return (p_b1 - p_b2) / epsilon


def delta_flip(psi_i, m_f):
    """Change of the post-selection probability under an S_PM flip."""
    flipped = abs(S_PM.matrix_element(m_f, psi_i)) ** 2
    return flipped - abs(m_f.inner(psi_i)) ** 2


def predicted_exp_value(psi_i, m_f, theta, eta=None):
    """Conditional value expected at finite back-action.

    Evaluates |<m_f|psi_i>|^2 w / (|<m_f|psi_i>|^2 + eta Delta_flip) with w the
    weak value. The numerator is computed as Re[<m_f|S_PM|psi_i> <m_f|psi_i>*],
    which stays finite when the overlap vanishes.

    Args:
        eta: measured transition probability; defaults to sin^2(2 theta).

    Raises:
        DegeneratePostSelection: if the denominator is below 1e-15.
    """
    if eta is None:
        eta = eta_ideal(theta)
    overlap = m_f.inner(psi_i)
    denominator = abs(overlap) ** 2 + eta * delta_flip(psi_i, m_f)
    if denominator <= PROBABILITY_THRESHOLD:
        raise DegeneratePostSelection(f"post-selection denominator {denominator:.3e} vanishes")
    numerator = np.real(S_PM.matrix_element(m_f, psi_i) * np.conj(overlap))
    return float(numerator / denominator)


def predicted_exp_value_phi(phi, eta):
    """sin(phi)cos(phi) / (sin^2(phi) + eta cos(2 phi)) for H post-selection."""
    denominator = np.sin(phi) ** 2 + eta * np.cos(2 * phi)
    if denominator <= PROBABILITY_THRESHOLD:
        raise DegeneratePostSelection(f"post-selection denominator {denominator:.3e} vanishes")
    return float(np.sin(phi) * np.cos(phi) / denominator)


def operator_route_value(psi_i, m_f, theta):
    """Ideal conditional value through the Kraus operators and the branch-probability estimator."""
    setting = MeasurementSetting(theta=theta)
    p_b1, p_b2 = conditional_probabilities(psi_i.density(), setting, m_f)
    return experimental_value_from_probs(p_b1, p_b2, epsilon_ideal(theta))


def conditional_value(rho, setting, m_f):
    """Post-selected value with both visibilities, read out with eps = v_hv sin(4 theta).

    Dividing by the calibrated resolution removes v_hv for H or V
    post-selection; v_pm < 1 still pulls the value toward zero.
    """
    p_b1, p_b2 = conditional_probabilities(rho, setting, m_f)
    return experimental_value_from_probs(p_b1, p_b2, setting.v_hv * epsilon_ideal(setting.theta))

#%% enhancement limits

def max_enhancement(eta):
    """Small-eta maximum of the H post-selected prediction: (1/sqrt(4 eta), phi* = sqrt(eta)).

    Raises:
        DomainError: unless 0 < eta <= 1/4.
    """
    if not 0.0 < eta <= 0.25:
        raise DomainError(f"eta must lie in (0, 0.25], got {eta!r}")
    return 1.0 / math.sqrt(4.0 * eta), math.sqrt(eta)


def max_enhancement_numeric(eta):
    """Bounded search for the peak of the H post-selected prediction over phi in (0, 45 deg].

    The exact peak is 1/(2 sqrt(eta (1 - eta))) at tan(phi) = sqrt(eta/(1 - eta)).

    Raises:
        DomainError: unless 0 < eta < 1.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta!r}")
    result = minimize_scalar(
        lambda phi: -predicted_exp_value_phi(phi, eta),
        bounds=ENHANCEMENT_SEARCH_BOUNDS,
        method="bounded",
        options={"xatol": ENHANCEMENT_SEARCH_XATOL, "maxiter": 1000},
    )
    logger.debug(f"peak search for eta={eta:g}: {result.nfev} evaluations")
    return -float(result.fun), float(result.x)


def required_transition_probability(target):
    """Largest eta whose H post-selected peak still reaches ``target``.

    Raises:
        DomainError: if target < 1 (every eta reaches it).
    """
    if target < 1.0:
        raise DomainError(f"target enhancement must be >= 1, got {target!r}")
    return 0.5 * (1.0 - math.sqrt(1.0 - 1.0 / target ** 2))


def required_pm_visibility(target):
    """Visibility 1 - 2 eta a PM-separating interferometer would need for ``target``."""
    return 1.0 - 2.0 * required_transition_probability(target)

#%% resolution and back-action

def resolution_from_stats(p_b1, p_b2, input_stokes_pm):
    """(P(b1) - P(b2)) / <S_PM>_in.

    Raises:
        UnpolarizedInput: if |<S_PM>_in| <= 1e-9.
    """
    if abs(input_stokes_pm) <= POLARIZATION_THRESHOLD:
        raise UnpolarizedInput(f"input PM polarization {input_stokes_pm!r} is too small to estimate the resolution")
    return (p_b1 - p_b2) / input_stokes_pm


def backaction_from_stats(p_h, p_v, input_stokes_hv):
    """2 eta_HV = 1 - (P(H) - P(V)) / <S_HV>_in.

    Raises:
        UnpolarizedInput: if |<S_HV>_in| <= 1e-9.
    """
    if abs(input_stokes_hv) <= POLARIZATION_THRESHOLD:
        raise UnpolarizedInput(f"input HV polarization {input_stokes_hv!r} is too small to estimate the back-action")
    return 1.0 - (p_h - p_v) / input_stokes_hv


def uncertainty_lhs(epsilon, back_action):
    """eps^2 + (1 - 2 eta)^2, at most 1 for any physical measurement."""
    return epsilon ** 2 + (1.0 - back_action) ** 2


def ellipse_residual_values(epsilon, back_action, v_hv, v_pm):
    """Residual for raw estimates, which may fall slightly outside the physical range."""
    if v_hv <= 0 or v_pm <= 0:
        raise DomainError(f"visibilities must be positive, got v_hv={v_hv!r}, v_pm={v_pm!r}")
    return (epsilon / v_hv) ** 2 + ((1.0 - back_action) / v_pm) ** 2 - 1.0


def ellipse_residual(point, v_hv, v_pm):
    """eps^2/V_HV^2 + (1 - 2 eta)^2/V_PM^2 - 1; zero on the visibility ellipse."""
    return ellipse_residual_values(point.epsilon_pm, point.back_action, v_hv, v_pm)


def tradeoff_point(setting, phi=None):
    """Exact (eps, 2 eta) of the channel, estimated as on the bench from an input at phi."""
    phi = math.radians(TRADEOFF_PHI_DEG) if phi is None else phi
    rho = input_state(phi).density()
    p_b1, p_b2 = output_probabilities(rho, setting)
    p_h, p_v = hv_output_probabilities(rho, setting)
    return TradeoffPoint(
        epsilon_pm=resolution_from_stats(p_b1, p_b2, stokes_pm(rho)),
        back_action=backaction_from_stats(p_h, p_v, stokes_hv(rho)),
        theta=setting.theta,
    )


def ellipse_points(v_hv, v_pm, thetas):
    """Analytic (V_HV sin 4t, 1 - V_PM cos 4t) for each theta."""
    return [
        TradeoffPoint(epsilon_pm=v_hv * np.sin(4 * t), back_action=1.0 - v_pm * np.cos(4 * t), theta=t)
        for t in thetas
    ]


def within_uncertainty_limit(point, atol=ATOL):
    return uncertainty_lhs(point.epsilon_pm, point.back_action) <= 1.0 + atol


__all__ = [
    "BranchPair",
    "arm_operators",
    "backaction_from_stats",
    "branch_states",
    "compensator",
    "conditional_probabilities",
    "conditional_value",
    "delta_flip",
    "ellipse_points",
    "ellipse_residual",
    "ellipse_residual_values",
    "epsilon_ideal",
    "eta_ideal",
    "experimental_value_from_probs",
    "hv_output_probabilities",
    "kraus_operators",
    "max_enhancement",
    "max_enhancement_numeric",
    "operator_route_value",
    "output_probabilities",
    "pm_dephasing",
    "postselected_weights",
    "povm_elements",
    "predicted_exp_value",
    "predicted_exp_value_phi",
    "required_pm_visibility",
    "required_transition_probability",
    "resolution_from_stats",
    "tradeoff_point",
    "uncertainty_lhs",
    "uncompensated_b2",
    "weak_value",
    "within_uncertainty_limit",
]
