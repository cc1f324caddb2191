"""
Single-photon polarization qubit in the HV basis.

States, density matrices and 2x2 operators are immutable wrappers around
numpy arrays. Angles are radians; configuration and CLI code convert from
degrees at the boundary.
"""

import logging

import numpy as np

from .constants import ATOL, CANONICAL_STATES, POSTSELECT_THRESHOLD
from .errors import DegeneratePostSelection, InvalidState

logger = logging.getLogger(__name__)

#%%

def _frozen(array):
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


class PureState:
    """Normalized amplitude pair (c_h, c_v)."""

    __slots__ = ("_vector",)

    def __init__(self, c_h, c_v, normalize=True):
        vector = np.array([c_h, c_v], dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0 or not np.isfinite(norm):
            raise InvalidState(f"cannot build a state from amplitudes ({c_h}, {c_v})")
        if normalize:
            vector = vector / norm
        elif abs(norm - 1.0) > ATOL:
            raise InvalidState(f"amplitudes have norm {norm}, expected 1")
        self._vector = _frozen(vector)

    @property
    def vector(self):
        return self._vector

    @property
    def c_h(self):
        return self._vector[0]

    @property
    def c_v(self):
        return self._vector[1]

    def inner(self, other):
        """<self|other>."""
        return complex(np.vdot(self._vector, other.vector))

    def density(self):
        return DensityMatrix(np.outer(self._vector, self._vector.conj()))

    def canonical(self):
        """Same ray with the first nonzero amplitude real and non-negative."""
        vector = self._vector
        lead = vector[0] if abs(vector[0]) > ATOL else vector[1]
        phase = np.conj(lead) / abs(lead)
        return PureState(*(vector * phase), normalize=False)

    def __repr__(self):
        c_h, c_v = self.canonical().vector
        return f"PureState(c_h={c_h:.6g}, c_v={c_v:.6g})"


class Operator2:
    """2x2 operator in the HV basis."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=complex)
        if entries.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {entries.shape}")
        self._entries = _frozen(entries)

    @property
    def entries(self):
        return self._entries

    @property
    def dagger(self):
        return Operator2(self._entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator2):
            return Operator2(self._entries @ other.entries)
        if isinstance(other, PureState):
            return self._entries @ other.vector
        return NotImplemented

    def __add__(self, other):
        return Operator2(self._entries + other.entries)

    def __sub__(self, other):
        return Operator2(self._entries - other.entries)

    def __mul__(self, scalar):
        return Operator2(self._entries * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Operator2(-self._entries)

    def sandwich(self, rho, right=None):
        """Return ``self @ rho @ right^dagger`` as a raw array (right defaults to self)."""
        right = self if right is None else right
        return self._entries @ rho.entries @ right.entries.conj().T

    def matrix_element(self, bra, ket):
        """<bra|self|ket>."""
        return complex(np.vdot(bra.vector, self._entries @ ket.vector))

    def is_hermitian(self, atol=ATOL):
        return np.allclose(self._entries, self._entries.conj().T, rtol=0, atol=atol)

    def is_unitary(self, atol=ATOL):
        return np.allclose(self._entries @ self._entries.conj().T, np.eye(2), rtol=0, atol=atol)

    def is_projector(self, atol=ATOL):
        return self.is_hermitian(atol) and np.allclose(self._entries @ self._entries, self._entries, rtol=0, atol=atol)

    def __repr__(self):
        return f"Operator2({np.array2string(self._entries, precision=6)})"


class DensityMatrix:
    """
    2x2 Hermitian positive matrix in the HV basis.

    Unit trace for states; branch (conditional) outputs carry their
    probability as the trace, so sub-unit traces are accepted.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=complex)
        if entries.shape != (2, 2):
            raise InvalidState(f"expected a 2x2 matrix, got shape {entries.shape}")
        self._entries = _frozen(entries)

    @property
    def entries(self):
        return self._entries

    @property
    def trace(self):
        return float(np.real(np.trace(self._entries)))

    def eigenvalues(self):
        return np.linalg.eigvalsh(self._entries)

    def expectation(self, op):
        """Tr[rho op] (real part)."""
        return float(np.real(np.trace(self._entries @ op.entries)))

    def matrix_element(self, state):
        """<state|rho|state>."""
        return float(np.real(np.vdot(state.vector, self._entries @ state.vector)))

    def validate(self, unit_trace=True, atol=ATOL):
        """Raise InvalidState unless rho is Hermitian, PSD and properly traced."""
        entries = self._entries
        if not np.all(np.isfinite(entries)):
            raise InvalidState("density matrix has non-finite entries")
        if not np.allclose(entries, entries.conj().T, rtol=0, atol=atol):
            raise InvalidState("density matrix is not Hermitian")
        smallest = self.eigenvalues().min()
        if smallest < -atol:
            raise InvalidState(f"density matrix has negative eigenvalue {smallest:.3e}")
        trace = self.trace
        if unit_trace and abs(trace - 1.0) > atol:
            raise InvalidState(f"density matrix has trace {trace}, expected 1")
        if not unit_trace and trace > 1.0 + atol:
            raise InvalidState(f"density matrix has trace {trace} > 1")
        return self

    def __add__(self, other):
        return DensityMatrix(self._entries + other.entries)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self._entries, precision=6)})"

#%% canonical states and operators

IDENTITY = Operator2(np.eye(2))
# |P><P| - |M><M| swaps the H and V amplitudes
S_PM = Operator2([[0, 1], [1, 0]])
S_HV = Operator2([[1, 0], [0, -1]])

H = PureState(1, 0)
V = PureState(0, 1)
P = PureState(1, 1)
M = PureState(1, -1)

_NAMED = {"H": H, "V": V, "P": P, "M": M}


def input_state(phi):
    """Linear input polarization with c_h = sin(phi), c_v = cos(phi)."""
    return PureState(np.sin(phi), np.cos(phi), normalize=False)


def named_state(label):
    """State for a post-selection label: H, V, P, M or ``phi:<deg>``.

    ``phi:<deg>`` follows the input_state convention, so ``phi:90`` is H.
    """
    text = str(label).strip()
    if text.upper() in _NAMED:
        return _NAMED[text.upper()]
    if text.lower().startswith("phi:"):
        return input_state(np.deg2rad(float(text[4:])))
    raise ValueError(f"unknown state '{label}'; expected one of {', '.join(CANONICAL_STATES)} or phi:<deg>")


def as_density(state):
    """Accept a PureState or DensityMatrix and return a DensityMatrix."""
    if isinstance(state, PureState):
        return state.density()
    if isinstance(state, DensityMatrix):
        return state
    return DensityMatrix(state)


def stokes_pm(rho):
    """Tr[rho S_PM] = 2 Re[rho_VH]. Not divided by Tr[rho]."""
    rho = as_density(rho)
    return float(2.0 * np.real(rho.entries[1, 0]))


def stokes_hv(rho):
    """Tr[rho S_HV] = rho_HH - rho_VV. Not divided by Tr[rho]."""
    rho = as_density(rho)
    return float(np.real(rho.entries[0, 0] - rho.entries[1, 1]))


def hwp_jones(theta):
    """Half-wave plate with its axis at theta from H.

    Returns [[cos 2t, sin 2t], [sin 2t, -cos 2t]], a Hermitian involution.
    """
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return Operator2([[c, s], [s, -c]])


def weak_value(psi_i, m_f, obs, threshold=POSTSELECT_THRESHOLD):
    """Re[<m_f|obs|psi_i> / <m_f|psi_i>].

    Raises:
        DegeneratePostSelection: if |<m_f|psi_i>| <= threshold.
    """
    overlap = m_f.inner(psi_i)
    if abs(overlap) <= threshold:
        raise DegeneratePostSelection(
            f"post-selection overlap |<m_f|psi_i>| = {abs(overlap):.3e} is below {threshold:g}"
        )
    return float(np.real(obs.matrix_element(m_f, psi_i) / overlap))


__all__ = [
    "DensityMatrix",
    "H",
    "IDENTITY",
    "M",
    "Operator2",
    "P",
    "PureState",
    "S_HV",
    "S_PM",
    "V",
    "as_density",
    "hwp_jones",
    "input_state",
    "named_state",
    "stokes_hv",
    "stokes_pm",
    "weak_value",
]
