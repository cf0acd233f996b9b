"""Dense eigensolvers, self-contained.

Two routines cover everything the rest of the package needs:

* ``symmetric_eigen`` — cyclic Jacobi rotations. Simple and robustly
  accurate at the sizes that occur here (n up to a few hundred).
  Convergence is declared when the off-diagonal Frobenius norm drops
  below ``jacobi_offdiag * ||M||_F``.
* ``general_eigenvalues`` — Householder reduction to Hessenberg form
  followed by shifted QR iteration in complex arithmetic (Wilkinson
  shift from the trailing 2x2 block). Intended for small matrices
  (stability tests on n <= 16); fails loudly on non-convergence
  instead of returning a silently wrong spectrum.

numpy is used for array storage and vectorised row/column updates only;
no LAPACK-backed factorisations are called.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, NumericalError
from ..tolerances import DEFAULT, Tolerances

__all__ = ["SymMatrix", "Spectrum", "symmetric_eigen", "lambda_max", "general_eigenvalues"]


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix. Construction symmetrises exactly.

    ``entries[i, j] == entries[j, i]`` holds bit-for-bit after
    construction because the stored array is ``(M + M') / 2``.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("matrix entries must be finite")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_rows(self) -> list[list[float]]:
        """Row-major nested lists, for JSON fixtures."""
        return self.entries.tolist()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in non-decreasing order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]


def _offdiag_norm(a: np.ndarray) -> float:
    strict = a - np.diag(np.diag(a))
    return math.sqrt(float((strict * strict).sum()))


def symmetric_eigen(m: SymMatrix, tol: Tolerances = DEFAULT) -> Spectrum:
    """Full spectrum of a symmetric matrix by cyclic Jacobi sweeps."""
    a = m.entries.copy()
    n = m.n
    v = np.eye(n)
    if n <= 1:
        return Spectrum(np.diag(a).copy(), v)

    fro = math.sqrt(float((a * a).sum()))
    target = tol.jacobi_offdiag * fro
    for _ in range(tol.jacobi_max_sweeps):
        if _offdiag_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # symmetric Schur 2x2: choose the rotation zeroing a[p,q]
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * cs

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = cs * row_p - sn * row_q
                a[q, :] = sn * row_p + cs * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = cs * col_p - sn * col_q
                a[:, q] = sn * col_p + cs * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = cs * vp - sn * vq
                v[:, q] = sn * vp + cs * vq
    else:
        raise NumericalError(
            f"Jacobi sweeps did not converge in {tol.jacobi_max_sweeps} passes "
            f"(off-diagonal norm {_offdiag_norm(a):.3e}, target {target:.3e})"
        )

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], v[:, order])


def lambda_max(m: SymMatrix, tol: Tolerances = DEFAULT) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a symmetric matrix and its unit eigenvector."""
    spec = symmetric_eigen(m, tol)
    return float(spec.eigenvalues[-1]), spec.eigenvectors[:, -1].copy()


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Householder similarity reduction to upper Hessenberg form."""
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm_x = math.sqrt(float((x * x).sum()))
        if norm_x == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(norm_x, x[0]) if x[0] != 0.0 else norm_x
        v_norm = math.sqrt(float((v * v).sum()))
        if v_norm == 0.0:
            continue
        v /= v_norm
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    """Eigenvalue of the trailing 2x2 block closest to the corner entry."""
    a = h[hi - 1, hi - 1]
    b = h[hi - 1, hi]
    c = h[hi, hi - 1]
    d = h[hi, hi]
    tr = a + d
    disc = np.sqrt(complex(tr * tr - 4.0 * (a * d - b * c)))
    r1 = 0.5 * (tr + disc)
    r2 = 0.5 * (tr - disc)
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def general_eigenvalues(m, tol: Tolerances = DEFAULT) -> np.ndarray:
    """All eigenvalues of a small square real matrix, as complex numbers.

    Returned sorted by (real part, imaginary part). Raises
    ``NumericalError`` if the shifted QR iteration exceeds its cap of
    ``qr_iters_per_dim * n`` steps.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix entries must be finite")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return a[0, 0:1].astype(complex)

    h = _hessenberg(a).astype(complex)
    scale = max(float(np.abs(h).max()), 1e-300)
    eigs: list[complex] = []
    hi = n - 1
    iters = 0
    cap = tol.qr_iters_per_dim * n
    stall = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(complex(h[0, 0]))
            hi -= 1
            continue
        # deflate a converged corner eigenvalue
        small = 2.2e-16 * (abs(h[hi - 1, hi - 1]) + abs(h[hi, hi])) + 1e-300 * scale
        if abs(h[hi, hi - 1]) <= small:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            stall = 0
            continue
        # active block [lo, hi]: walk up to the first negligible subdiagonal
        lo = hi
        while lo > 0:
            s = 2.2e-16 * (abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])) + 1e-300 * scale
            if abs(h[lo, lo - 1]) <= s:
                break
            lo -= 1
        if hi - lo == 1:
            # 2x2 block: close it in one quadratic solve
            tr = h[lo, lo] + h[hi, hi]
            det = h[lo, lo] * h[hi, hi] - h[lo, hi] * h[hi, lo]
            disc = np.sqrt(complex(tr * tr - 4.0 * det))
            eigs.append(0.5 * (tr + disc))
            eigs.append(0.5 * (tr - disc))
            hi = lo - 1
            stall = 0
            continue

        iters += 1
        stall += 1
        if iters > cap:
            raise NumericalError(
                f"shifted QR did not converge within {cap} iterations "
                f"({len(eigs)} of {n} eigenvalues found)"
            )
        if stall % 12 == 0:
            # exceptional shift to break rare stagnation, deterministic
            sigma = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            sigma = _wilkinson_shift(h, hi)

        # one single-shift QR sweep on the active window via Givens rotations
        for i in range(lo, hi + 1):
            h[i, i] -= sigma
        rots: list[tuple[complex, complex]] = []
        for k in range(lo, hi):
            f, g = h[k, k], h[k + 1, k]
            r = math.hypot(abs(f), abs(g))
            if r == 0.0:
                cr, sr = 1.0 + 0.0j, 0.0 + 0.0j
            else:
                cr, sr = np.conj(f) / r, np.conj(g) / r
            rots.append((cr, sr))
            rk = h[k, :].copy()
            rk1 = h[k + 1, :].copy()
            h[k, :] = cr * rk + sr * rk1
            h[k + 1, :] = -np.conj(sr) * rk + np.conj(cr) * rk1
        for k in range(lo, hi):
            cr, sr = rots[k - lo]
            ck = h[:, k].copy()
            ck1 = h[:, k + 1].copy()
            h[:, k] = np.conj(cr) * ck + np.conj(sr) * ck1
            h[:, k + 1] = -sr * ck + cr * ck1
        for i in range(lo, hi + 1):
            h[i, i] += sigma

    out = np.array(eigs, dtype=complex)
    order = np.lexsort((out.imag, out.real))
    return out[order]
