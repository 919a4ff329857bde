"""Dense matrix-equation and matrix-function kernel.

This module collects the handful of dense linear-algebra primitives the
reduction algorithms are assembled from: a Sylvester solver, a Lyapunov
solver, the principal matrix logarithm, and the band-limited resolvent
integral

.. math::

    F(A) = \\frac{1}{2\\pi} \\int_{-\\omega_2}^{-\\omega_1} (j\\nu I - A)^{-1}
           \\, d\\nu
         + \\frac{1}{2\\pi} \\int_{\\omega_1}^{\\omega_2} (j\\nu I - A)^{-1}
           \\, d\\nu

evaluated in closed form through the logarithm.  All routines are pure
functions of their arguments; nothing here keeps state, so concurrent use is
safe.

The equation solvers delegate the factorization to SciPy's Bartels--Stewart
implementations (Schur decomposition plus back-substitution) and wrap them
with the preflight checks and residual verification the rest of the package
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import (
    BranchCutEigenvalue,
    DimensionMismatch,
    NotAntistable,
    NotStable,
    NotSymmetric,
    NumericalFailure,
    SpectraOverlap,
)

#: Relative residual tolerance enforced by the equation solvers.
RESIDUAL_TOL = 1e-10

#: Relative eigenvalue-separation threshold below which Sylvester/Lyapunov
#: problems are rejected as (numerically) singular.
SPECTRA_GAP_TOL = 1e-12

#: Distance from the closed ray (-inf, 0] below which the principal matrix
#: logarithm is refused.
BRANCH_CUT_TOL = 1e-12

#: A matrix counts as Hurwitz when max Re lambda < -STABILITY_TOL.
STABILITY_TOL = 1e-10


@dataclass(frozen=True)
class FrequencyBand:
    """Symmetric frequency region ``[-hi, -lo] U [lo, hi]`` in rad/s.

    The band is described by its nonnegative edges only; all band-limited
    quantities in the package integrate over both half-axes.
    """

    omega_lo: float
    omega_hi: float

    def __post_init__(self):
        lo, hi = float(self.omega_lo), float(self.omega_hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("band edges must be finite")
        if not (0.0 <= lo < hi):
            raise ValueError(
                f"band requires 0 <= omega_lo < omega_hi, got [{lo}, {hi}]"
            )
        object.__setattr__(self, "omega_lo", lo)
        object.__setattr__(self, "omega_hi", hi)


def _square(M, name, allow_complex=False):
    M = np.asarray(M, dtype=complex if allow_complex else float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def solve_sylvester(A, B, C, tol_rel=RESIDUAL_TOL, gap_tol=SPECTRA_GAP_TOL):
    """Solve the Sylvester equation ``A X + X B + C = 0``.

    Parameters
    ----------
    A : (n, n) array
    B : (r, r) array
    C : (n, r) array
    tol_rel : float
        Relative residual bound enforced on the returned solution.
    gap_tol : float
        The problem is rejected as singular when
        ``min_ij |lambda_i(A) + mu_j(B)| < gap_tol * (||A||_F + ||B||_F)``.

    Returns
    -------
    X : (n, r) ndarray

    Raises
    ------
    SpectraOverlap
        If the spectra of A and -B (numerically) intersect.
    NumericalFailure
        If the residual check fails, which indicates an ill-conditioned
        problem rather than a bug in the backend.
    """
    A = _square(np.atleast_2d(A), "A")
    B = _square(np.atleast_2d(B), "B")
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape != (A.shape[0], B.shape[0]):
        raise DimensionMismatch(
            f"C must be {A.shape[0]}x{B.shape[0]}, got {C.shape}"
        )

    la = np.linalg.eigvals(A)
    lb = np.linalg.eigvals(B)
    gap = np.abs(la[:, None] + lb[None, :]).min()
    scale = np.linalg.norm(A, "fro") + np.linalg.norm(B, "fro")
    if gap < gap_tol * max(scale, 1e-300):
        raise SpectraOverlap(
            f"min |lambda_i(A) + mu_j(B)| = {gap:.3e} below "
            f"{gap_tol:.1e} * (||A||+||B||) = {gap_tol * scale:.3e}"
        )

    X = spla.solve_sylvester(A, B, -C)

    res = np.linalg.norm(A @ X + X @ B + C, "fro")
    den = (
        np.linalg.norm(A, "fro") * np.linalg.norm(X, "fro")
        + np.linalg.norm(X, "fro") * np.linalg.norm(B, "fro")
        + np.linalg.norm(C, "fro")
    )
    if res > tol_rel * max(den, 1e-300):
        raise NumericalFailure(
            f"Sylvester residual {res:.3e} exceeds {tol_rel:.1e} * {den:.3e}"
        )
    return X


def solve_lyapunov(A, W, tol_rel=RESIDUAL_TOL, gap_tol=SPECTRA_GAP_TOL,
                   sym_tol=1e-12):
    """Solve the Lyapunov equation ``A P + P A^T + W = 0`` for symmetric W.

    The solution is symmetrized before it is returned.  A need not be
    Hurwitz; it only needs ``lambda_i(A) + lambda_j(A) != 0`` for all pairs.

    Raises
    ------
    NotSymmetric
        If ``||W - W^T|| > sym_tol * ||W||``.
    SpectraOverlap
        If some ``lambda_i(A) + lambda_j(A)`` is numerically zero.
    """
    A = _square(np.atleast_2d(A), "A")
    W = _square(np.atleast_2d(W), "W")
    if W.shape != A.shape:
        raise DimensionMismatch(f"W must match A, got {W.shape} vs {A.shape}")
    wnorm = np.linalg.norm(W, "fro")
    if np.linalg.norm(W - W.T, "fro") > sym_tol * max(wnorm, 1e-300):
        raise NotSymmetric("W is not symmetric")

    la = np.linalg.eigvals(A)
    gap = np.abs(la[:, None] + la[None, :]).min()
    scale = 2.0 * np.linalg.norm(A, "fro")
    if gap < gap_tol * max(scale, 1e-300):
        raise SpectraOverlap(
            f"min |lambda_i(A) + lambda_j(A)| = {gap:.3e} below "
            f"{gap_tol:.1e} * 2||A|| = {gap_tol * scale:.3e}"
        )

    P = spla.solve_continuous_lyapunov(A, -W)
    P = 0.5 * (P + P.T)

    res = np.linalg.norm(A @ P + P @ A.T + W, "fro")
    den = 2.0 * np.linalg.norm(A, "fro") * np.linalg.norm(P, "fro") + wnorm
    if res > tol_rel * max(den, 1e-300):
        raise NumericalFailure(
            f"Lyapunov residual {res:.3e} exceeds {tol_rel:.1e} * {den:.3e}"
        )
    return P


def matrix_log(M, branch_tol=BRANCH_CUT_TOL, exp_tol=1e-9):
    """Principal matrix logarithm of a complex square matrix.

    The principal branch places every eigenvalue of the result in the strip
    ``Im in (-pi, pi)``; it exists when no eigenvalue of M lies on the closed
    negative real axis.  Eigenvalues within ``branch_tol`` (relative to their
    magnitude, absolute near zero) of that ray are refused.

    The result is verified by exponentiation: ``||exp(L) - M|| <= exp_tol *
    ||M||``, with the tolerance widened by the eigenvector conditioning of M
    (the attainable logm accuracy degrades with non-normality), or
    :class:`NumericalFailure` is raised.
    """
    M = _square(np.atleast_2d(M), "M", allow_complex=True)
    w, V = np.linalg.eig(M)
    # Distance to the closed ray (-inf, 0]: |Im| left of the origin, |z| right.
    dist = np.where(w.real <= 0.0, np.abs(w.imag), np.abs(w))
    bad = dist < branch_tol * np.maximum(1.0, np.abs(w))
    if np.any(bad):
        raise BranchCutEigenvalue(
            f"eigenvalue {w[np.argmax(bad)]:.6e} lies within {branch_tol:.1e} "
            "of the negative real axis"
        )

    L, _err = spla.logm(M, disp=False)
    L = np.asarray(L, dtype=complex)

    mnorm = np.linalg.norm(M, "fro")
    kappa_v = float(np.linalg.cond(V))
    tol = exp_tol * max(mnorm, 1e-300) * max(1.0, kappa_v)
    res = np.linalg.norm(spla.expm(L) - M, "fro")
    if res > tol:
        raise NumericalFailure(
            f"matrix_log verification failed: ||exp(L) - M|| = {res:.3e} "
            f"exceeds {tol:.3e} (eigenvector conditioning {kappa_v:.1e})"
        )
    return L


def _assert_hurwitz(A, what="A", tol=STABILITY_TOL):
    ev = np.linalg.eigvals(A)
    worst = ev.real.max()
    if worst >= -tol:
        raise NotStable(
            f"{what} is not Hurwitz: max Re lambda = {worst:.6e} >= {-tol:.1e}"
        )


def compute_F(A, band, branch_tol=BRANCH_CUT_TOL):
    """Band-limited resolvent integral F(A) of a Hurwitz real matrix.

    For a band ``[0, w]`` the integral over the symmetric interval reduces to

    .. math:: F(A) = \\mathrm{Re}\\left(\\frac{j}{\\pi} \\ln(-j w I - A)\\right)

    and for ``[w1, w2]`` with ``w1 > 0`` to

    .. math:: F(A) = \\mathrm{Re}\\left(\\frac{j}{\\pi}
              \\ln\\big((j w_1 I + A)^{-1} (j w_2 I + A)\\big)\\right).

    Both principal logarithms are well defined for Hurwitz A, and the real
    part is taken exactly (it is part of the formula, not a numerical
    cleanup).  F(A) commutes with A; the commutator is checked before the
    result is returned.
    """
    A = _square(np.atleast_2d(np.asarray(A, dtype=float)), "A")
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    _assert_hurwitz(A)

    n = A.shape[0]
    eye = np.eye(n)
    if band.omega_lo == 0.0:
        M = -1j * band.omega_hi * eye - A
    else:
        M = np.linalg.solve(1j * band.omega_lo * eye + A,
                            1j * band.omega_hi * eye + A)
    L = matrix_log(M, branch_tol=branch_tol)
    F = -L.imag / np.pi  # Re((j/pi) L) taken exactly

    comm = np.linalg.norm(F @ A - A @ F, "fro")
    scale = np.linalg.norm(A, "fro") * np.linalg.norm(F, "fro")
    if comm > 1e-8 * max(scale, 1e-300):
        raise NumericalFailure(
            f"F(A) does not commute with A: ||FA - AF|| = {comm:.3e}"
        )
    return F


def compute_F_antistable(S, band, branch_tol=BRANCH_CUT_TOL):
    """F(-S) for a strictly antistable S (all eigenvalues in Re > 0).

    This is the quantity the band-limited reduction formulas need: with S
    carrying the interpolation points in the open right half-plane, -S is
    Hurwitz and ``compute_F_antistable(S, band) == compute_F(-S, band)``.
    """
    S = _square(np.atleast_2d(np.asarray(S, dtype=float)), "S")
    ev = np.linalg.eigvals(S)
    worst = ev.real.min()
    if worst <= STABILITY_TOL:
        raise NotAntistable(
            f"S is not antistable: min Re lambda = {worst:.6e}"
        )
    return compute_F(-S, band, branch_tol=branch_tol)
