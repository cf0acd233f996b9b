"""Eigensolver tests: frozen examples plus randomized invariants, with
numpy.linalg as the independent oracle."""
import math

import numpy as np
import pytest

import pinlock as pl
from pinlock.errors import InputError

from helpers import np_lambda_max

CHEN_JF = np.array([[-35.0, 35.0, 0.0], [-7.0, 28.0, 0.0], [0.0, 0.0, -3.0]])


def sym(rng, n, scale=5.0):
    m = rng.normal(0.0, scale, size=(n, n))
    return pl.SymMatrix(0.5 * (m + m.T))


class TestSymMatrix:
    def test_symmetrizes_exactly(self):
        m = pl.SymMatrix([[1.0, 2.0], [2.0 + 1e-12, 3.0]])
        assert np.array_equal(m.entries, m.entries.T)

    def test_rejects_non_square(self):
        with pytest.raises(InputError):
            pl.SymMatrix(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            pl.SymMatrix([[np.nan, 0.0], [0.0, 1.0]])


class TestSymmetricEigen:
    def test_identity(self):
        spec = pl.symmetric_eigen(pl.SymMatrix(np.eye(3)))
        assert np.allclose(spec.eigenvalues, [1.0, 1.0, 1.0])

    def test_two_node_chain(self):
        spec = pl.symmetric_eigen(pl.SymMatrix([[-1.0, 1.0], [1.0, -1.0]]))
        assert np.allclose(spec.eigenvalues, [-2.0, 0.0], atol=1e-12)

    def test_reference_network_spectrum(self):
        a = pl.coupling_matrix(pl.fixtures.builtin_topology("paper-fig2"))
        spec = pl.symmetric_eigen(a.matrix)
        evs = spec.eigenvalues
        # largest eigenvalue 0 with multiplicity 1, the rest strictly negative
        assert abs(evs[-1]) <= 1e-10
        assert evs[-2] < -1e-8
        # independent power-iteration check on the shifted matrix A + 8I
        shifted = a.entries + 8.0 * np.eye(9)
        x = np.ones(9) / 3.0
        for _ in range(2000):
            x = shifted @ x
            x /= np.sqrt(x @ x)
        assert abs(float(x @ shifted @ x) - 8.0) <= 1e-8  # top of A is 0
        assert np.allclose(evs, np.linalg.eigvalsh(a.entries), atol=1e-9)

    def test_reconstruction_and_orthonormality_200(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 13))
            m = sym(rng, n, scale=float(rng.uniform(0.1, 10.0)))
            spec = pl.symmetric_eigen(m)
            assert np.all(np.diff(spec.eigenvalues) >= -1e-12)
            phi, lam = spec.eigenvectors, spec.eigenvalues
            recon = phi @ np.diag(lam) @ phi.T
            bound = 1e-8 * max(1.0, float(np.abs(m.entries).max()))
            assert np.abs(m.entries - recon).max() <= bound
            assert np.abs(phi.T @ phi - np.eye(n)).max() <= 1e-9

    def test_weyl_inequalities(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 9))
            m = sym(rng, n)
            nn = sym(rng, n)
            lm = pl.symmetric_eigen(m).eigenvalues
            ln = pl.symmetric_eigen(nn).eigenvalues
            ls = pl.symmetric_eigen(pl.SymMatrix(m.entries + nn.entries)).eigenvalues
            for i in range(1, n + 1):
                for j in range(0, n - i + 1):
                    assert ls[i - 1] <= lm[i + j - 1] + ln[n - j - 1] + 1e-8

    def test_shift_identity(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 10))
            m = sym(rng, n)
            c = float(rng.normal(0.0, 4.0))
            lam_m, _ = pl.lambda_max(m)
            lam_s, _ = pl.lambda_max(pl.SymMatrix(m.entries + c * np.eye(n)))
            assert abs(lam_s - (lam_m + c)) <= 1e-9


class TestLambdaMax:
    def test_zero_matrix(self):
        lam, u = pl.lambda_max(pl.SymMatrix(np.zeros((3, 3))))
        assert lam == 0.0
        assert abs(np.sqrt(u @ u) - 1.0) <= 1e-12

    def test_diagonal(self):
        lam, u = pl.lambda_max(pl.SymMatrix(np.diag([-3.0, -1.0, -2.0])))
        assert lam == -1.0
        assert np.allclose(np.abs(u), [0.0, 1.0, 0.0], atol=1e-12)

    def test_eigenvector_residual(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 12))
            m = sym(rng, n)
            lam, u = pl.lambda_max(m)
            res = m.entries @ u - lam * u
            assert np.sqrt(res @ res) <= 1e-8

    def test_reference_pinned_matrix(self):
        # the bundled example scheme, checked against the oracle and the
        # boundary it was designed to sit on
        a = pl.coupling_matrix(pl.fixtures.builtin_topology("paper-fig2"))
        beta = np.zeros(9)
        beta[3], beta[5] = 1.2411, 1.9855
        b = a.entries - np.diag(beta)
        lam, _ = pl.lambda_max(pl.SymMatrix(b))
        assert abs(lam - np_lambda_max(b)) <= 1e-9
        dyn = pl.fixtures.builtin_dynamics("chen", lambda_convention="max-real-over-c")
        assert lam <= pl.sync_threshold(dyn) + 1e-6


class TestGeneralEigenvalues:
    def test_rotation_matrix(self):
        evs = pl.general_eigenvalues(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert np.allclose(sorted(evs, key=lambda z: z.imag), [-1j, 1j], atol=1e-10)

    def test_chen_jacobian(self):
        # 2x2 block has trace -7 and determinant -735
        evs = pl.general_eigenvalues(CHEN_JF)
        root = math.sqrt(2989.0)
        expected = sorted([(-7.0 - root) / 2.0, -3.0, (-7.0 + root) / 2.0])
        assert np.allclose(np.sort(evs.real), expected, atol=1e-9)
        assert np.abs(evs.imag).max() <= 1e-9
        for lam in evs:
            assert abs(np.linalg.det(CHEN_JF - lam * np.eye(3))) <= 1e-6

    def test_upper_triangular(self, rng):
        m = np.triu(rng.normal(0.0, 3.0, size=(5, 5)))
        evs = pl.general_eigenvalues(m)
        assert np.allclose(np.sort(evs.real), np.sort(np.diag(m)), atol=1e-9)

    def test_agrees_with_symmetric_solver(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 10))
            m = sym(rng, n)
            sym_evs = pl.symmetric_eigen(m).eigenvalues
            gen_evs = pl.general_eigenvalues(m.entries)
            assert np.abs(gen_evs.imag).max() <= 1e-7
            assert np.allclose(np.sort(gen_evs.real), sym_evs, atol=1e-7)

    def test_random_against_oracle(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 13))
            m = rng.normal(0.0, 3.0, size=(n, n))
            got = pl.general_eigenvalues(m)
            want = np.sort_complex(np.linalg.eigvals(m))
            got_s = sorted(got, key=lambda z: (round(z.real, 7), round(z.imag, 7)))
            want_s = sorted(want, key=lambda z: (round(z.real, 7), round(z.imag, 7)))
            assert np.allclose(got_s, want_s, atol=1e-6)

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            pl.general_eigenvalues(np.array([[np.inf, 0.0], [0.0, 1.0]]))
