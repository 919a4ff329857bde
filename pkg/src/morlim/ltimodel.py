"""State-space models, Gramians, and system norms.

Models are strictly proper continuous-time LTI systems ``(A, B, C)`` with
``G(s) = C (sI - A)^{-1} B``; there is deliberately no feedthrough term.
Band-limited quantities take a :class:`~morlim.matfun.FrequencyBand` and are
built on the F(A) kernel from :mod:`morlim.matfun`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from . import matfun
from .errors import (
    DimensionMismatch,
    NotStable,
    NumericalFailure,
    SingularShift,
)
from .matfun import STABILITY_TOL, FrequencyBand

#: Gramian eigenvalues may undershoot zero by this fraction of the trace.
PSD_TOL = 1e-10

#: Relative agreement required between the two trace formulas for the
#: band-limited H2 norm.
DUAL_NORM_TOL = 1e-8


@dataclass
class StateSpace:
    """Strictly proper LTI model ``x' = A x + B u``, ``y = C x``.

    Arrays are converted to float ndarrays on construction and the shapes
    are validated; treat instances as immutable.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.C = np.atleast_2d(np.asarray(self.C, dtype=float))
        n, n2 = self.A.shape
        if n != n2:
            raise DimensionMismatch(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n:
            raise DimensionMismatch(
                f"B must have {n} rows, got {self.B.shape}"
            )
        if self.C.shape[1] != n:
            raise DimensionMismatch(
                f"C must have {n} columns, got {self.C.shape}"
            )
        if min(n, self.B.shape[1], self.C.shape[0]) < 1:
            raise DimensionMismatch("state, input and output counts must be >= 1")
        for name, M in (("A", self.A), ("B", self.B), ("C", self.C)):
            if not np.all(np.isfinite(M)):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    @property
    def n_outputs(self):
        return self.C.shape[0]


@dataclass
class AugmentedSystem:
    """A model with its input or output matrix augmented by the band weight.

    Input side:  ``B_aug = [B, F(A) B]`` and ``G_w(s) = C (sI-A)^{-1} B_aug``.
    Output side: ``C_aug = [C; C F(A)]`` and ``G_w(s) = C_aug (sI-A)^{-1} B``.
    """

    base: StateSpace
    band: FrequencyBand
    side: str
    aug: np.ndarray  # B_aug (n x 2m) or C_aug (2p x n)

    def to_statespace(self):
        if self.side == "input":
            return StateSpace(self.base.A, self.aug, self.base.C)
        return StateSpace(self.base.A, self.base.B, self.aug)


@dataclass
class GramianPair:
    """Controllability/observability Gramians of one model over one band
    (``band is None`` means the unlimited pair)."""

    P: np.ndarray
    Q: np.ndarray
    band: FrequencyBand | None

    def __post_init__(self):
        for name, M in (("P", self.P), ("Q", self.Q)):
            floor = PSD_TOL * max(abs(np.trace(M)), 1.0)
            wmin = np.linalg.eigvalsh(0.5 * (M + M.T)).min()
            if wmin < -floor:
                raise NumericalFailure(
                    f"Gramian {name} is not PSD: min eig {wmin:.3e} "
                    f"below -{floor:.3e}"
                )


@dataclass
class CrossGramians:
    """Cross Gramians coupling a full model (order n) and a ROM (order r):
    P_hat is n x r, Q_hat is r x n."""

    P_hat: np.ndarray
    Q_hat: np.ndarray
    band: FrequencyBand


def is_stable(sys, tol=STABILITY_TOL):
    """True when ``max Re lambda(A) < -tol``."""
    return bool(np.linalg.eigvals(sys.A).real.max() < -tol)


def _assert_stable(sys, what="system"):
    worst = np.linalg.eigvals(sys.A).real.max()
    if worst >= -STABILITY_TOL:
        raise NotStable(f"{what} is not stable: max Re lambda = {worst:.6e}")


def augment_input(sys, band, F=None):
    """Input-side augmented system with ``B_aug = [B, F(A) B]``."""
    if F is None:
        F = matfun.compute_F(sys.A, band)
    return AugmentedSystem(sys, band, "input", np.hstack([sys.B, F @ sys.B]))


def augment_output(sys, band, F=None):
    """Output-side augmented system with ``C_aug = [C; C F(A)]``."""
    if F is None:
        F = matfun.compute_F(sys.A, band)
    return AugmentedSystem(sys, band, "output", np.vstack([sys.C, sys.C @ F]))


def transfer_eval(sys, s, pole_tol=1e-12):
    """Evaluate ``G(s) = C (sI - A)^{-1} B`` at one complex point.

    Raises :class:`SingularShift` when s coincides with a pole (within
    ``pole_tol`` relative to the problem scale).
    """
    s = complex(s)
    ev = np.linalg.eigvals(sys.A)
    scale = max(1.0, abs(s), float(np.abs(ev).max()))
    if np.abs(ev - s).min() < pole_tol * scale:
        raise SingularShift(f"evaluation point {s} is a pole of the model")
    return _transfer_nochk(sys, s)


def _transfer_nochk(sys, s):
    n = sys.order
    X = np.linalg.solve(s * np.eye(n) - sys.A, sys.B)
    return sys.C @ X


def poles(sys):
    """Eigenvalues of A sorted by descending real part, then imaginary part."""
    w = np.linalg.eigvals(sys.A)
    return np.array(sorted(w, key=lambda z: (-z.real, z.imag)))


def gramians_unlimited(sys):
    """Infinite-band Gramians: ``AP + PA^T + BB^T = 0`` and the dual."""
    _assert_stable(sys)
    P = matfun.solve_lyapunov(sys.A, sys.B @ sys.B.T)
    Q = matfun.solve_lyapunov(sys.A.T, sys.C.T @ sys.C)
    return GramianPair(P, Q, None)


def gramians_limited(sys, band, F=None):
    """Frequency-limited Gramians over the symmetric band.

    P solves ``A P + P A^T + F B B^T + B B^T F^T = 0`` and Q solves
    ``A^T Q + Q A + F^T C^T C + C^T C F = 0`` with ``F = F(A)``.
    """
    _assert_stable(sys)
    if F is None:
        F = matfun.compute_F(sys.A, band)
    # assemble each right-hand side as H + H^T so it is symmetric to the
    # last bit (the two matmul orderings differ in rounding)
    Hc = F @ (sys.B @ sys.B.T)
    Ho = F.T @ (sys.C.T @ sys.C)
    P = matfun.solve_lyapunov(sys.A, Hc + Hc.T)
    Q = matfun.solve_lyapunov(sys.A.T, Ho + Ho.T)
    return GramianPair(P, Q, band)


def h2_norm_squared(sys):
    """``trace(C P C^T)`` with the unlimited controllability Gramian."""
    _assert_stable(sys)
    P = matfun.solve_lyapunov(sys.A, sys.B @ sys.B.T)
    return max(float(np.trace(sys.C @ P @ sys.C.T)), 0.0)


def h2_norm(sys):
    """H2 norm of a stable model."""
    return float(np.sqrt(h2_norm_squared(sys)))


def h2w_norm_squared(sys, band, F=None):
    """Squared band-limited H2 norm, cross-checked against its dual form.

    Computes ``trace(C P_w C^T)`` and ``trace(B^T Q_w B)`` and requires them
    to agree to :data:`DUAL_NORM_TOL` relative; the controllability-side
    value is returned.
    """
    gp = gramians_limited(sys, band, F=F)
    v1 = float(np.trace(sys.C @ gp.P @ sys.C.T))
    v2 = float(np.trace(sys.B.T @ gp.Q @ sys.B))
    # the traces can be tiny relative to the Gramians they are built from
    # (error systems cancel almost fully), so the agreement test carries an
    # absolute floor at the roundoff scale of that assembly
    assembly = (
        np.linalg.norm(sys.C, "fro") ** 2 * np.linalg.norm(gp.P, "fro")
        + np.linalg.norm(sys.B, "fro") ** 2 * np.linalg.norm(gp.Q, "fro")
    )
    tol = DUAL_NORM_TOL * max(abs(v1), abs(v2)) + 1e-10 * assembly
    if abs(v1 - v2) > tol:
        raise NumericalFailure(
            f"dual band-limited H2 formulas disagree: {v1:.12e} vs {v2:.12e}"
        )
    return max(v1, 0.0)


def h2w_norm(sys, band, F=None):
    """Band-limited H2 norm of a stable model."""
    return float(np.sqrt(h2w_norm_squared(sys, band, F=F)))


def cross_gramians(full, rom, band):
    """Band-limited cross Gramians between a full model and a ROM.

    ``P_hat`` (n x r) solves
    ``A P_hat + P_hat At^T + F(A) B Bt^T + B Bt^T F(At)^T = 0``
    and ``Q_hat`` (r x n) solves
    ``At^T Q_hat + Q_hat A + F(At)^T Ct^T C + Ct^T C F(A) = 0``.
    """
    if full.n_inputs != rom.n_inputs or full.n_outputs != rom.n_outputs:
        raise DimensionMismatch(
            "full and reduced models must share input/output dimensions"
        )
    _assert_stable(full, "full model")
    _assert_stable(rom, "reduced model")
    Ff = matfun.compute_F(full.A, band)
    Fr = matfun.compute_F(rom.A, band)
    P_hat = matfun.solve_sylvester(
        full.A, rom.A.T,
        Ff @ full.B @ rom.B.T + full.B @ rom.B.T @ Fr.T,
    )
    Q_hat = matfun.solve_sylvester(
        rom.A.T, full.A,
        Fr.T @ rom.C.T @ full.C + rom.C.T @ full.C @ Ff,
    )
    return CrossGramians(P_hat, Q_hat, band)


def error_system(full, rom):
    """Parallel connection realizing ``G(s) - G_r(s)``."""
    if full.n_inputs != rom.n_inputs or full.n_outputs != rom.n_outputs:
        raise DimensionMismatch(
            "error system needs matching input/output dimensions"
        )
    A = spla.block_diag(full.A, rom.A)
    B = np.vstack([full.B, rom.B])
    C = np.hstack([full.C, -rom.C])
    return StateSpace(A, B, C)


def freq_response_samples(sys, grid, pole_tol=1e-12):
    """Largest singular value of ``G(j nu)`` over a frequency grid.

    Returns an array of rows ``(nu, sigma_max)`` in grid order.
    """
    grid = np.asarray(grid, dtype=float)
    ev = np.linalg.eigvals(sys.A)
    out = np.empty((grid.size, 2))
    for k, nu in enumerate(grid):
        s = 1j * nu
        scale = max(1.0, abs(s), float(np.abs(ev).max()))
        if np.abs(ev - s).min() < pole_tol * scale:
            raise SingularShift(f"grid point {nu} rad/s is a pole")
        G = _transfer_nochk(sys, s)
        out[k, 0] = nu
        out[k, 1] = np.linalg.svd(G, compute_uv=False)[0]
    return out
