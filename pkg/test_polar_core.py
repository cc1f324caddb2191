import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from weakmeter.errors import DegeneratePostSelection, InvalidState
from weakmeter.polar_core import (
    H, V, P, M, S_PM, S_HV, IDENTITY,
    DensityMatrix, Operator2, PureState,
    hwp_jones, input_state, named_state, stokes_hv, stokes_pm, weak_value,
)

ATOL = 1e-12
rng = np.random.default_rng(20240501)


def random_state():
    c_h, c_v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return PureState(c_h, c_v)


class TestStates(unittest.TestCase):

    def test_input_state(self):
        assert_allclose(input_state(0.0).vector, [0, 1], atol=ATOL)
        assert_allclose(input_state(math.pi / 2).vector, [1, 0], atol=ATOL)
        assert_allclose(input_state(math.pi / 4).vector, P.vector, atol=ATOL)

        # amplitudes stay real
        for phi in np.linspace(-math.pi, math.pi, 37):
            self.assertTrue(np.all(input_state(phi).vector.imag == 0))

    def test_normalization(self):
        state = PureState(3, 4j)
        self.assertAlmostEqual(np.linalg.norm(state.vector), 1.0, delta=ATOL)

        with self.assertRaises(InvalidState):
            PureState(0, 0)
        with self.assertRaises(InvalidState):
            PureState(1, 1, normalize=False)

    def test_canonical_phase(self):
        state = PureState(1j, 1j).canonical()
        assert_allclose(state.vector, P.vector, atol=ATOL)
        self.assertEqual(PureState(0, -1).canonical().c_v, 1)

    def test_named_state(self):
        self.assertIs(named_state("h"), H)
        self.assertIs(named_state("M"), M)
        assert_allclose(named_state("phi:90").vector, H.vector, atol=ATOL)
        assert_allclose(named_state("phi:0").vector, V.vector, atol=ATOL)

        with self.assertRaises(ValueError):
            named_state("D")


class TestDensityMatrix(unittest.TestCase):

    def test_validate(self):
        P.density().validate()
        DensityMatrix(np.eye(2) / 4).validate(unit_trace=False)

        with self.assertRaises(InvalidState):
            DensityMatrix([[0.5, 0.5], [0.0, 0.5]]).validate()
        with self.assertRaises(InvalidState):
            DensityMatrix([[1.5, 0.0], [0.0, -0.5]]).validate()
        with self.assertRaises(InvalidState):
            DensityMatrix(np.eye(2) / 4).validate(unit_trace=True)
        with self.assertRaises(InvalidState):
            DensityMatrix(np.eye(3) / 3)

    def test_entries_are_read_only(self):
        rho = H.density()
        with self.assertRaises(ValueError):
            rho.entries[0, 0] = 0


class TestStokes(unittest.TestCase):

    def test_stokes_pm(self):
        self.assertAlmostEqual(stokes_pm(P.density()), 1.0, delta=ATOL)
        self.assertAlmostEqual(stokes_pm(M), -1.0, delta=ATOL)
        self.assertAlmostEqual(stokes_pm(H), 0.0, delta=ATOL)
        self.assertAlmostEqual(stokes_pm(input_state(math.radians(25))), 0.766044443118978, delta=ATOL)

    def test_stokes_hv(self):
        self.assertAlmostEqual(stokes_hv(H), 1.0, delta=ATOL)
        self.assertAlmostEqual(stokes_hv(P), 0.0, delta=ATOL)
        self.assertAlmostEqual(stokes_hv(input_state(math.radians(25))), -0.6427876096865393, delta=ATOL)

    def test_trace_oracle(self):
        for _ in range(50):
            rho = random_state().density()
            self.assertAlmostEqual(stokes_pm(rho), rho.expectation(S_PM), delta=ATOL)
            self.assertAlmostEqual(stokes_hv(rho), rho.expectation(S_HV), delta=ATOL)

    def test_input_state_identities(self):
        for phi in np.linspace(-math.pi / 2, math.pi / 2, 41):
            state = input_state(phi)
            self.assertAlmostEqual(stokes_pm(state), math.sin(2 * phi), delta=ATOL)
            self.assertAlmostEqual(stokes_hv(state), -math.cos(2 * phi), delta=ATOL)

    def test_bloch_bound(self):
        for _ in range(200):
            rho = random_state().density()
            self.assertLessEqual(stokes_pm(rho) ** 2 + stokes_hv(rho) ** 2, 1 + ATOL)


class TestOperators(unittest.TestCase):

    def test_hwp_special_angles(self):
        assert_allclose(hwp_jones(0.0).entries, np.diag([1, -1]), atol=ATOL)
        assert_allclose(hwp_jones(math.radians(22.5)).entries, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=ATOL)

    def test_hwp_involution(self):
        for theta in np.linspace(-math.pi, math.pi, 101):
            plate = hwp_jones(theta)
            self.assertTrue(plate.is_unitary())
            self.assertTrue(plate.is_hermitian())
            assert_allclose((plate @ plate).entries, IDENTITY.entries, atol=ATOL)

    def test_operator_algebra(self):
        self.assertTrue(S_PM.is_unitary())
        projector = Operator2(np.outer(P.vector, P.vector.conj()))
        self.assertTrue(projector.is_projector())
        assert_allclose((S_PM - S_PM.dagger).entries, np.zeros((2, 2)), atol=ATOL)
        assert_allclose((2 * projector - IDENTITY).entries, S_PM.entries, atol=ATOL)

        with self.assertRaises(ValueError):
            Operator2(np.eye(3))


class TestWeakValue(unittest.TestCase):

    def test_eigenstate(self):
        self.assertAlmostEqual(weak_value(P, P, S_PM), 1.0, delta=ATOL)

    def test_h_postselection(self):
        phi = math.radians(4)
        value = weak_value(input_state(phi), H, S_PM)
        self.assertAlmostEqual(value, 1 / math.tan(phi), delta=1e-9)
        self.assertAlmostEqual(value, 14.30, delta=0.01)

    def test_orthogonal(self):
        with self.assertRaises(DegeneratePostSelection):
            weak_value(V, H, S_PM)

    def test_reduces_to_expectation(self):
        for obs in (S_PM, S_HV):
            for _ in range(50):
                psi = random_state()
                self.assertAlmostEqual(weak_value(psi, psi, obs), psi.density().expectation(obs), delta=1e-10)


if __name__ == '__main__':
    unittest.main()
