"""Numerical tolerances, outcome labels and bench constants."""

import math

# exact-algebra tolerance for 2x2 problems
ATOL = 1e-12

# |<m_f|psi_i>| below this makes the weak value undefined
POSTSELECT_THRESHOLD = 1e-12

# floor for post-selected probabilities and prediction denominators
PROBABILITY_THRESHOLD = 1e-15

# |epsilon| below this leaves the conditional value undefined
RESOLUTION_THRESHOLD = 1e-12

# |<S>| below this makes the resolution / back-action estimators undefined
POLARIZATION_THRESHOLD = 1e-9

SCHEMA_VERSION = 1

CANONICAL_STATES = ['H', 'V', 'P', 'M']

MONITOR_LABEL = 'monitor'

BARE_LABELS = ['b1', 'b2']
POSTSELECTED_LABELS = ['b1_pass', 'b1_block', 'b2_pass', 'b2_block']
HV_LABELS = ['b1_H', 'b1_V', 'b2_H', 'b2_V']

# weak-measurement working point of the bench
BENCH_THETA_DEG = 0.5
BENCH_ETA = 0.0003
BENCH_V_HV = 0.71

# input used for the resolution / back-action characterization
TRADEOFF_PHI_DEG = 25.0

# monitor counts over output detector counts
BENCH_MONITOR_RATIO = 0.020

DEFAULT_N_PHOTONS = 1_000_000
DEFAULT_SEED = 42

# bounded search over phi in (0, 45 deg]
ENHANCEMENT_SEARCH_BOUNDS = (0.0, math.pi / 4)
ENHANCEMENT_SEARCH_XATOL = 1e-10
