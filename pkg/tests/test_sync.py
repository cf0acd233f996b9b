"""Synchronization-criterion tests."""
import math

import numpy as np
import pytest

import pinlock as pl
from pinlock.errors import InputError

from helpers import np_lambda_max, random_connected_topology

CHEN_RATE = (-7.0 + math.sqrt(2989.0)) / 2.0  # top eigenvalue of the Chen Jacobian


def fig2():
    return pl.coupling_matrix(pl.fixtures.builtin_topology("paper-fig2"))


class TestControlMatrix:
    def test_zero_scheme_returns_a(self):
        a = fig2()
        b = pl.control_matrix_B(a, pl.PinningScheme(np.zeros(9)))
        assert np.array_equal(b.entries, a.entries)

    def test_two_node_chain(self):
        a = pl.coupling_matrix(pl.Topology(2, [(1, 2)]))
        b = pl.control_matrix_B(a, pl.PinningScheme(np.array([1.0, 0.0])))
        assert np.array_equal(b.entries, [[-2.0, 1.0], [1.0, -1.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            pl.control_matrix_B(fig2(), pl.PinningScheme(np.zeros(4)))


class TestThreshold:
    def test_stable_identity(self):
        dyn = pl.NodeDynamics(jf=-np.eye(2), a_g=1.0, c=1.0)
        assert abs(pl.sync_threshold(dyn) - 1.0) <= 1e-12

    def test_unstable_scalar_case(self):
        dyn = pl.NodeDynamics(jf=2.0 * np.eye(2), a_g=1.0, c=10.0)
        assert abs(pl.sync_threshold(dyn) - (-0.2)) <= 1e-12

    def test_chen_max_real(self):
        dyn = pl.fixtures.builtin_dynamics("chen")
        assert abs(pl.sync_threshold(dyn) - (-CHEN_RATE / 10.0)) <= 1e-9

    def test_chen_symmetric_part(self):
        dyn = pl.fixtures.builtin_dynamics("chen", lambda_convention="symmetric-part")
        want = -(-7.0 + math.sqrt(4753.0)) / 2.0 / 10.0
        assert abs(pl.sync_threshold(dyn) - want) <= 1e-9

    def test_chen_max_real_over_c(self):
        dyn = pl.fixtures.builtin_dynamics("chen", lambda_convention="max-real-over-c")
        assert abs(pl.sync_threshold(dyn) - (-CHEN_RATE / 100.0)) <= 1e-9

    def test_unknown_convention_rejected(self):
        with pytest.raises(InputError):
            pl.NodeDynamics(jf=-np.eye(2), lambda_convention="spectral-radius")


class TestCheckSyncLinear:
    def test_unpinned_network_fails_negative_threshold(self):
        dyn = pl.fixtures.builtin_dynamics("chen")
        rep = pl.check_sync_linear(fig2(), pl.PinningScheme(np.zeros(9)), dyn)
        assert not rep.synced
        assert abs(rep.mu_max) <= 1e-9  # top coupling eigenvalue is 0

    def test_reference_scheme_sits_on_the_boundary(self):
        # the bundled example gains land within rounding of the threshold
        # under the max-real-over-c convention: tiny margin, not a robust pass
        dyn = pl.fixtures.builtin_dynamics("chen", lambda_convention="max-real-over-c")
        beta = np.zeros(9)
        beta[3], beta[5] = 1.2411, 1.9855
        rep = pl.check_sync_linear(fig2(), pl.PinningScheme(beta), dyn)
        assert abs(rep.margin) <= 1e-5

    def test_padded_reference_schemes_synchronize(self):
        dyn = pl.fixtures.builtin_dynamics("chen", lambda_convention="max-real-over-c")
        beta1 = np.zeros(9)
        beta1[3], beta1[5] = 1.2411 * 1.01, 1.9855 * 1.01
        assert pl.check_sync_linear(fig2(), pl.PinningScheme(beta1), dyn).synced
        beta2 = np.zeros(9)
        beta2[5] = 11.4341 * 1.01
        assert pl.check_sync_linear(fig2(), pl.PinningScheme(beta2), dyn).synced

    def test_boundary_is_flagged(self):
        a = pl.coupling_matrix(pl.Topology(2, [(1, 2)]))
        # mu_max of the unpinned chain is exactly 0; threshold 0 => boundary
        dyn = pl.NodeDynamics(jf=np.zeros((1, 1)), a_g=1.0, c=1.0)
        rep = pl.check_sync_linear(a, pl.PinningScheme(np.zeros(2)), dyn)
        assert rep.boundary and not rep.synced

    def test_disconnected_rejected(self):
        a = pl.coupling_matrix(pl.Topology(4, [(1, 2), (3, 4)]))
        dyn = pl.NodeDynamics(jf=-np.eye(1))
        with pytest.raises(InputError):
            pl.check_sync_linear(a, pl.PinningScheme(np.zeros(4)), dyn)


class TestCheckSyncGeneral:
    def test_stable_local_dynamics(self, rng):
        dyn = pl.NodeDynamics(jf=-np.eye(2), jg=np.eye(2), a_g=1.0, c=1.0)
        t = random_connected_topology(rng, 6)
        rep = pl.check_sync_general(pl.coupling_matrix(t),
                                    pl.PinningScheme(np.zeros(6)), dyn)
        assert rep.synced
        assert rep.worst_real_part <= -1.0 + 1e-9

    def test_repelling_coupling_never_synchronizes(self, rng):
        # jf = 2I, jg = -I: modes 2 - c*mu with mu <= 0 are always unstable
        dyn = pl.NodeDynamics(jf=2.0 * np.eye(2), jg=-np.eye(2), a_g=1.0, c=1.0)
        t = random_connected_topology(rng, 5)
        a = pl.coupling_matrix(t)
        for _ in range(5):
            beta = rng.uniform(0.0, 5.0, size=5)
            rep = pl.check_sync_general(a, pl.PinningScheme(beta), dyn)
            assert not rep.synced

    def test_agrees_with_linear_criterion(self, rng):
        # under linear coupling both criteria must agree off the boundary
        for _ in range(25):
            n = int(rng.integers(3, 8))
            t = random_connected_topology(rng, n)
            a = pl.coupling_matrix(t)
            m = rng.normal(0.0, 1.5, size=(2, 2))
            dyn = pl.NodeDynamics(jf=0.5 * (m + m.T), a_g=float(rng.uniform(0.5, 2.0)),
                                  c=float(rng.uniform(0.5, 3.0)))
            beta = rng.uniform(0.0, 2.0, size=n) * rng.integers(0, 2, size=n)
            scheme = pl.PinningScheme(beta)
            lin = pl.check_sync_linear(a, scheme, dyn)
            if abs(lin.margin) <= 1e-6:
                continue
            gen = pl.check_sync_general(a, scheme, dyn)
            assert gen.synced == lin.synced

    def test_reference_network_cross_check(self):
        dyn = pl.NodeDynamics(
            jf=np.array(pl.fixtures.CHEN_JACOBIAN), jg=np.eye(3), a_g=1.0, c=10.0
        )
        beta = np.zeros(9)
        beta[3], beta[5] = 1.2411, 1.9855
        gen = pl.check_sync_general(fig2(), pl.PinningScheme(beta), dyn)
        lin = pl.check_sync_linear(fig2(), pl.PinningScheme(beta),
                                   pl.fixtures.builtin_dynamics("chen"))
        # both verdicts: these gains do not meet the true mode criterion at c=10
        assert not gen.synced and not lin.synced
        assert gen.worst_real_part > 1.0


class TestSpectralInvariants:
    def test_pinned_lambda_max_nonpositive(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 11))
            t = random_connected_topology(rng, n)
            a = pl.coupling_matrix(t)
            beta = rng.uniform(0.0, 3.0, size=n) * rng.integers(0, 2, size=n)
            b = pl.control_matrix_B(a, pl.PinningScheme(beta))
            lam, _ = pl.lambda_max(b)
            assert lam <= 1e-9
            if np.all(beta > 0):
                assert lam < -1e-9

    def test_all_pinned_strictly_negative(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 11))
            t = random_connected_topology(rng, n)
            a = pl.coupling_matrix(t)
            beta = rng.uniform(0.1, 3.0, size=n)
            lam, _ = pl.lambda_max(pl.control_matrix_B(a, pl.PinningScheme(beta)))
            assert lam < -1e-9

    def test_monotone_in_beta(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 10))
            t = random_connected_topology(rng, n)
            a = pl.coupling_matrix(t)
            beta = rng.uniform(0.0, 2.0, size=n)
            lam0, _ = pl.lambda_max(pl.control_matrix_B(a, pl.PinningScheme(beta)))
            bumped = beta.copy()
            bumped[rng.integers(0, n)] += float(rng.uniform(0.1, 2.0))
            lam1, _ = pl.lambda_max(pl.control_matrix_B(a, pl.PinningScheme(bumped)))
            assert lam1 <= lam0 + 1e-9

    def test_modes_match_spectrum(self, rng):
        # regression guard: the mu_i driving the decoupled modes are exactly
        # the sorted spectrum of B
        for _ in range(10):
            n = int(rng.integers(2, 9))
            t = random_connected_topology(rng, n)
            a = pl.coupling_matrix(t)
            beta = rng.uniform(0.0, 2.0, size=n)
            b = pl.control_matrix_B(a, pl.PinningScheme(beta))
            mu = pl.symmetric_eigen(b).eigenvalues
            assert np.all(np.diff(mu) >= -1e-12)
            assert np.allclose(mu, np.linalg.eigvalsh(b.entries), atol=1e-9)


def test_negative_beta_rejected():
    with pytest.raises(InputError):
        pl.PinningScheme(np.array([-0.1, 0.0]))
