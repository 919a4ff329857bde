"""Reduction algorithms: PORK, FLPORK, O-FLPORK, FLBT, and modal truncation.

The pseudo-optimal family works in real arithmetic throughout.  Tangential
interpolation data ``(S, T)`` is recovered from a realified rational Krylov
basis; the band-limited variants augment the input (or output) matrix with
the band weight ``F(A)`` and assemble the reduced model from a small
Lyapunov solution so that its poles land exactly on the mirror images of the
interpolation points.  The balanced-truncation and modal routes are included
as the classical baselines the pseudo-optimal methods are compared against.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla
import scipy.optimize

from . import ltimodel, matfun
from .errors import (
    BadInterpolationSet,
    DefectiveEigenvalue,
    DimensionMismatch,
    IndefiniteGramian,
    MorlimError,
    NotAnEigenvalue,
    NumericalFailure,
    RankDeficientBasis,
    RankDeficientGramians,
    ShiftIsPole,
    UncontrollablePair,
    UnobservablePair,
    UnstableMode,
)
from .ltimodel import StateSpace
from .matfun import FrequencyBand

logger = logging.getLogger(__name__)

#: Basis columns below this singular-value ratio are treated as dependent.
RANK_TOL = 1e-10

#: Observability/controllability staircase rank threshold.
PAIR_RANK_TOL = 1e-10

#: Pseudo-Gramians need |lambda|_min > INVERT_TOL * |lambda|_max to be
#: considered invertible.
INVERT_TOL = 1e-12


@dataclass
class InterpolationSet:
    """Tangential interpolation data.

    ``points`` is a length-r complex vector.  ``directions`` holds the
    tangential vectors: input side an (m, r) array whose columns are the
    t_i, output side an (r, p) array whose rows are the t_i.  The set must
    be closed under conjugation with conjugate directions attached to
    conjugate points.
    """

    points: np.ndarray
    directions: np.ndarray
    side: str = "input"

    def __post_init__(self):
        self.points = np.atleast_1d(np.asarray(self.points, dtype=complex))
        self.directions = np.atleast_2d(np.asarray(self.directions, dtype=complex))
        if self.side not in ("input", "output"):
            raise BadInterpolationSet(f"side must be input/output, got {self.side!r}")
        r = self.points.size
        cols = self.directions.shape[1] if self.side == "input" else self.directions.shape[0]
        if cols != r:
            raise BadInterpolationSet(
                f"{r} points but {cols} directions on the {self.side} side"
            )

    @property
    def r(self):
        return self.points.size

    def direction(self, i):
        """Tangential vector attached to point i, as a flat array."""
        if self.side == "input":
            return self.directions[:, i]
        return self.directions[i, :]


@dataclass
class SylvesterData:
    """Realified interpolation data: ``A V - V S - B T = 0`` (input side)
    or ``W^T A - S W^T - T C = 0`` (output side), with lambda(S) equal to
    the interpolation points.

    ``T_aug`` and the band-dependent basis are attached by
    :func:`augment_input_data` / :func:`augment_output_data`.
    """

    side: str
    S: np.ndarray       # r x r
    T: np.ndarray       # input: m x r;  output: r x p
    basis: np.ndarray   # n x r
    T_aug: np.ndarray | None = None


@dataclass
class ReductionReport:
    """Everything a reduction run wants to tell the caller."""

    rom: StateSpace
    method: str
    preserved_poles: np.ndarray = field(default_factory=lambda: np.array([], dtype=complex))
    interpolation_residuals: np.ndarray = field(default_factory=lambda: np.array([]))
    energy_identity_gap: float | None = None
    pseudo_gramian: np.ndarray | None = None
    hankel_values: np.ndarray | None = None
    band: FrequencyBand | None = None
    rom_stable: bool | None = None
    gramian_positive_definite: bool | None = None
    wall_time_s: float = 0.0


# ---------------------------------------------------------------------------
# interpolation-set handling


def _conj_tol(points):
    return 1e-12 * max(1.0, float(np.abs(points).max()))


def _canonical_entries(interp):
    """Group a conjugate-closed point list into real entries and Im>0 pair
    representatives, preserving first-occurrence order.

    Returns a list of ("real", sigma, t) / ("pair", sigma, t) tuples, where
    t is the tangential vector as a flat complex array.
    """
    pts = interp.points
    tol = _conj_tol(pts)
    # distinctness
    for i in range(pts.size):
        for j in range(i + 1, pts.size):
            if abs(pts[i] - pts[j]) <= tol:
                raise BadInterpolationSet(
                    f"repeated interpolation point {pts[i]:.6e}"
                )
    used = np.zeros(pts.size, dtype=bool)
    entries = []
    for i in range(pts.size):
        if used[i]:
            continue
        s, t = pts[i], interp.direction(i)
        if abs(s.imag) <= tol:
            if np.abs(t.imag).max(initial=0.0) > 1e-12 * max(1.0, np.abs(t).max()):
                raise BadInterpolationSet(
                    f"real point {s.real:.6e} carries a complex direction"
                )
            entries.append(("real", s.real, t.real))
            used[i] = True
            continue
        # find the conjugate partner
        partner = None
        for j in range(pts.size):
            if j != i and not used[j] and abs(pts[j] - np.conj(s)) <= tol:
                partner = j
                break
        if partner is None:
            raise BadInterpolationSet(
                f"point {s:.6e} has no conjugate partner"
            )
        tp = interp.direction(partner)
        if np.abs(tp - np.conj(t)).max() > 1e-10 * max(1.0, np.abs(t).max()):
            raise BadInterpolationSet(
                f"directions at {s:.6e} are not conjugate-consistent"
            )
        used[i] = used[partner] = True
        if s.imag < 0:
            s, t = np.conj(s), np.conj(t)
        entries.append(("pair", s, t))
    return entries


def _require_rhp(interp):
    if np.any(interp.points.real <= 0.0):
        raise BadInterpolationSet(
            "band-limited pseudo-optimal reduction requires interpolation "
            "points in the open right half-plane"
        )


def _check_shift_distance(points, A):
    ev = np.linalg.eigvals(A)
    for s in points:
        scale = max(1.0, abs(s), float(np.abs(ev).max()))
        d = np.abs(ev - s).min()
        if d < 1e-10 * scale:
            raise ShiftIsPole(
                f"interpolation point {s:.6e} coincides with an eigenvalue of A"
            )


# ---------------------------------------------------------------------------
# realified Krylov data


def _staircase_rank_ok(S, T, side):
    """Observability (input side) / controllability (output side) of (S, T)."""
    r = S.shape[0]
    if side == "input":
        blocks = [T]
        for _ in range(r - 1):
            blocks.append(blocks[-1] @ S)
        M = np.vstack(blocks)
    else:
        blocks = [T]
        for _ in range(r - 1):
            blocks.append(S @ blocks[-1])
        M = np.hstack(blocks)
    sv = np.linalg.svd(M, compute_uv=False)
    return sv[-1] > PAIR_RANK_TOL * max(sv[0], 1e-300), sv


def real_input_data(sys, interp, rank_tol=RANK_TOL):
    """Realified input-side Krylov data for a tangential point set.

    Builds the primitive basis ``span{(sigma_i I - A)^{-1} B t_i}``, realifies
    conjugate pairs into ``[Re v, Im v]`` columns, and recovers the real pair
    ``(S, C_t)`` with ``A V - V S - B C_t = 0`` and ``lambda(S) = {sigma_i}``.

    The recovery follows the projection formulas (W = V, then the
    least-squares split through ``B_perp = B - V E^{-1} V^T B``); when
    ``B_perp`` loses column rank — which always happens once B lies in the
    basis span, e.g. at r = n — those formulas are indeterminate and the
    construction falls back to the directly realified ``(S, -T)`` pair,
    which satisfies the same relation exactly.
    """
    if interp.side != "input":
        raise BadInterpolationSet("real_input_data needs an input-side set")
    if interp.directions.shape[0] != sys.n_inputs:
        raise DimensionMismatch(
            f"directions must have {sys.n_inputs} rows, got "
            f"{interp.directions.shape[0]}"
        )
    r, n = interp.r, sys.order
    if r > n:
        raise RankDeficientBasis(f"cannot span {r} directions in order {n}")
    _check_shift_distance(interp.points, sys.A)

    entries = _canonical_entries(interp)
    V = np.zeros((n, r))
    S0 = np.zeros((r, r))
    T0 = np.zeros((sys.n_inputs, r))
    eye = np.eye(n)
    k = 0
    for kind, sigma, t in entries:
        if kind == "real":
            v = np.linalg.solve(sigma * eye - sys.A, sys.B @ t)
            V[:, k] = v
            S0[k, k] = sigma
            T0[:, k] = t
            k += 1
        else:
            v = np.linalg.solve(sigma * eye - sys.A, sys.B @ t)
            a, b = sigma.real, sigma.imag
            V[:, k], V[:, k + 1] = v.real, v.imag
            S0[k:k + 2, k:k + 2] = [[a, b], [-b, a]]
            T0[:, k], T0[:, k + 1] = t.real, t.imag
            k += 2

    sv = np.linalg.svd(V, compute_uv=False)
    if sv[-1] < rank_tol * max(sv[0], 1e-300):
        raise RankDeficientBasis(
            f"Krylov basis rank-deficient: sigma_min/sigma_max = "
            f"{sv[-1] / max(sv[0], 1e-300):.3e}"
        )

    S, Ct = _recover_input_pair(sys, V, S0, T0)

    ok, _ = _staircase_rank_ok(S, Ct, "input")
    if not ok:
        raise UnobservablePair("(S, C_t) is not observable")

    res = np.linalg.norm(sys.A @ V - V @ S - sys.B @ Ct, "fro")
    scale = (
        np.linalg.norm(sys.A, "fro") * np.linalg.norm(V, "fro")
        + np.linalg.norm(V, "fro") * np.linalg.norm(S, "fro")
        + np.linalg.norm(sys.B, "fro") * np.linalg.norm(Ct, "fro")
    )
    if res > 1e-8 * max(scale, 1e-300):
        raise NumericalFailure(
            f"input Sylvester data residual {res:.3e} exceeds 1e-8 relative"
        )
    return SylvesterData("input", S, Ct, V)


def _recover_input_pair(sys, V, S0, T0):
    # the E^{-1} projections are evaluated as QR least-squares solves: the
    # normal-equation form squares the basis conditioning and can cost the
    # recovered S several digits of its spectrum
    VB = np.linalg.lstsq(V, sys.B, rcond=None)[0]
    Bperp = sys.B - V @ VB
    sv = np.linalg.svd(Bperp, compute_uv=False)
    bscale = max(np.linalg.norm(sys.B, "fro"), 1.0)
    if sv[-1] <= 1e-12 * bscale:
        return S0, -T0
    AV = sys.A @ V
    R = AV - V @ np.linalg.lstsq(V, AV, rcond=None)[0]
    Ct = np.linalg.lstsq(Bperp, R, rcond=None)[0]
    S = np.linalg.lstsq(V, AV - sys.B @ Ct, rcond=None)[0]
    return S, Ct


def real_output_data(sys, interp, rank_tol=RANK_TOL):
    """Output-side dual of :func:`real_input_data`.

    Builds ``span{(sigma_i I - A^T)^{-1} C^T t_i^T}``, realifies, and
    recovers ``(S, B_t)`` with ``W^T A - S W^T - B_t C = 0`` and
    ``lambda(S) = {sigma_i}``, falling back to the direct realified pair
    whenever the ``C_perp`` least-squares split is indeterminate.
    """
    if interp.side != "output":
        raise BadInterpolationSet("real_output_data needs an output-side set")
    if interp.directions.shape[1] != sys.n_outputs:
        raise DimensionMismatch(
            f"directions must have {sys.n_outputs} columns, got "
            f"{interp.directions.shape[1]}"
        )
    r, n = interp.r, sys.order
    if r > n:
        raise RankDeficientBasis(f"cannot span {r} directions in order {n}")
    _check_shift_distance(interp.points, sys.A)

    entries = _canonical_entries(interp)
    W = np.zeros((n, r))
    S0 = np.zeros((r, r))
    T0 = np.zeros((r, sys.n_outputs))
    eye = np.eye(n)
    k = 0
    for kind, sigma, t in entries:
        if kind == "real":
            w = np.linalg.solve(sigma * eye - sys.A.T, sys.C.T @ t)
            W[:, k] = w
            S0[k, k] = sigma
            T0[k, :] = t
            k += 1
        else:
            w = np.linalg.solve(sigma * eye - sys.A.T, sys.C.T @ t)
            a, b = sigma.real, sigma.imag
            W[:, k], W[:, k + 1] = w.real, w.imag
            S0[k:k + 2, k:k + 2] = [[a, -b], [b, a]]
            T0[k, :], T0[k + 1, :] = t.real, t.imag
            k += 2

    sv = np.linalg.svd(W, compute_uv=False)
    if sv[-1] < rank_tol * max(sv[0], 1e-300):
        raise RankDeficientBasis(
            f"Krylov basis rank-deficient: sigma_min/sigma_max = "
            f"{sv[-1] / max(sv[0], 1e-300):.3e}"
        )

    S, Bt = _recover_output_pair(sys, W, S0, T0)

    ok, _ = _staircase_rank_ok(S, Bt, "output")
    if not ok:
        raise UncontrollablePair("(S, B_t) is not controllable")

    res = np.linalg.norm(W.T @ sys.A - S @ W.T - Bt @ sys.C, "fro")
    scale = (
        np.linalg.norm(sys.A, "fro") * np.linalg.norm(W, "fro")
        + np.linalg.norm(W, "fro") * np.linalg.norm(S, "fro")
        + np.linalg.norm(sys.C, "fro") * np.linalg.norm(Bt, "fro")
    )
    if res > 1e-8 * max(scale, 1e-300):
        raise NumericalFailure(
            f"output Sylvester data residual {res:.3e} exceeds 1e-8 relative"
        )
    return SylvesterData("output", S, Bt, W)


def _recover_output_pair(sys, W, S0, T0):
    # dual of _recover_input_pair, same least-squares evaluation rationale
    CW = np.linalg.lstsq(W, sys.C.T, rcond=None)[0]
    Cperp = sys.C - CW.T @ W.T
    sv = np.linalg.svd(Cperp, compute_uv=False)
    cscale = max(np.linalg.norm(sys.C, "fro"), 1.0)
    if sv[-1] <= 1e-12 * cscale:
        return S0, -T0
    AtW = sys.A.T @ W
    R = AtW - W @ np.linalg.lstsq(W, AtW, rcond=None)[0]
    Bt = np.linalg.lstsq(Cperp.T, R, rcond=None)[0].T
    S = np.linalg.lstsq(W, AtW - sys.C.T @ Bt.T, rcond=None)[0].T
    return S, Bt


def augment_input_data(sys, data, band, F_A=None, F_mS=None):
    """Attach the band weight to input-side data.

    Returns new :class:`SylvesterData` whose ``T_aug`` is the stacked
    tangential matrix ``[C_t F(-S); C_t]`` and whose basis solves
    ``A V - V S - B_w T_aug = 0`` with ``B_w = [B, F(A) B]``.
    """
    if data.side != "input":
        raise BadInterpolationSet("augment_input_data needs input-side data")
    if F_A is None:
        F_A = matfun.compute_F(sys.A, band)
    if F_mS is None:
        F_mS = matfun.compute_F_antistable(data.S, band)
    T_aug = np.vstack([data.T @ F_mS, data.T])
    B_w = np.hstack([sys.B, F_A @ sys.B])
    V = matfun.solve_sylvester(sys.A, -data.S, -(B_w @ T_aug))
    return SylvesterData("input", data.S, data.T, V, T_aug=T_aug)


def augment_output_data(sys, data, band, F_A=None, F_mS=None):
    """Output-side dual of :func:`augment_input_data`: ``T_aug`` is
    ``[F(-S) B_t, B_t]`` and the basis solves
    ``W^T A - S W^T - T_aug C_w = 0`` with ``C_w = [C; C F(A)]``."""
    if data.side != "output":
        raise BadInterpolationSet("augment_output_data needs output-side data")
    if F_A is None:
        F_A = matfun.compute_F(sys.A, band)
    if F_mS is None:
        F_mS = matfun.compute_F_antistable(data.S, band)
    T_aug = np.hstack([F_mS @ data.T, data.T])
    C_w = np.vstack([sys.C, sys.C @ F_A])
    W = matfun.solve_sylvester(sys.A.T, -data.S.T, -(C_w.T @ T_aug.T))
    return SylvesterData("output", data.S, data.T, W, T_aug=T_aug)


# ---------------------------------------------------------------------------
# pseudo-Gramian checks


def _check_invertible_sym(Q, what):
    """Invertibility gate for the small pseudo-Gramians.

    Raises when Q is numerically singular or negative semidefinite; returns
    (positive_definite, condition_number)."""
    w = np.linalg.eigvalsh(0.5 * (Q + Q.T))
    amax = np.abs(w).max()
    amin = np.abs(w).min()
    if amax <= 0.0 or amin <= INVERT_TOL * amax:
        raise IndefiniteGramian(
            f"{what} is numerically singular "
            f"(|lambda|_min/|lambda|_max = {amin / max(amax, 1e-300):.3e})"
        )
    if w.max() <= 0.0:
        raise IndefiniteGramian(f"{what} is negative semidefinite")
    return bool(w.min() > 0.0), float(amax / amin)


# ---------------------------------------------------------------------------
# PORK / FLPORK / O-FLPORK


def _eig_frame(S):
    lam, X = np.linalg.eig(S)
    return lam, X


def _input_interp_residuals(full_aug, rom_aug, S, T_aug):
    """Relative tangential interpolation residuals in the eigenframe of S."""
    lam, X = _eig_frame(S)
    res = np.empty(lam.size)
    for i in range(lam.size):
        c = T_aug @ X[:, i]
        gf = ltimodel.transfer_eval(full_aug, lam[i]) @ c
        gr = ltimodel.transfer_eval(rom_aug, lam[i]) @ c
        res[i] = np.linalg.norm(gf - gr) / max(np.linalg.norm(gf), 1e-300)
    return res


def _output_interp_residuals(full_aug, rom_aug, S, T_aug):
    lam, X = _eig_frame(S)
    Xi = np.linalg.inv(X)
    res = np.empty(lam.size)
    for i in range(lam.size):
        b = Xi[i, :] @ T_aug
        gf = b @ ltimodel.transfer_eval(full_aug, lam[i])
        gr = b @ ltimodel.transfer_eval(rom_aug, lam[i])
        res[i] = np.linalg.norm(gf - gr) / max(np.linalg.norm(gf), 1e-300)
    return res


def _energy_gap(full, rom, band=None, F=None):
    """Energy-identity defect ``| ||G-Gr||^2 - (||G||^2 - ||Gr||^2) |``.

    Uses the band-limited norm when a band is given, the plain H2 norm
    otherwise.  The gap is a diagnostic, so a numerical failure inside it
    (ill-conditioned realizations can defeat the Gramian computations) is
    reported as ``inf`` rather than aborting the reduction; the certificate
    layer re-checks and flags it.
    """
    try:
        if band is None:
            e_full = ltimodel.h2_norm_squared(full)
            e_rom = ltimodel.h2_norm_squared(rom)
            e_err = ltimodel.h2_norm_squared(ltimodel.error_system(full, rom))
        else:
            e_full = ltimodel.h2w_norm_squared(full, band, F=F)
            e_rom = ltimodel.h2w_norm_squared(rom, band)
            e_err = ltimodel.h2w_norm_squared(
                ltimodel.error_system(full, rom), band
            )
        return abs(e_err - (e_full - e_rom))
    except MorlimError as exc:
        logger.warning("energy-identity diagnostic failed numerically: %s", exc)
        return float("inf")


def pork(sys, interp):
    """Pseudo-optimal rational Krylov reduction (unlimited band).

    The reduced model ``At = -Qt^{-1} S^T Qt``, ``Bt = -Qt^{-1} C_t^T``,
    ``Ct = C V`` places its poles on the mirror images of the interpolation
    points and satisfies the H2 energy identity
    ``||G - Gr||_{H2}^2 = ||G||_{H2}^2 - ||Gr||_{H2}^2``.
    """
    t0 = time.perf_counter()
    _require_rhp(interp)
    data = real_input_data(sys, interp)
    Qt = matfun.solve_lyapunov(-data.S.T, data.T.T @ data.T)
    w = np.linalg.eigvalsh(Qt)
    if w.min() <= INVERT_TOL * max(abs(w).max(), 1e-300):
        raise IndefiniteGramian("PORK observability Gramian is not positive definite")
    At = -np.linalg.solve(Qt, data.S.T @ Qt)
    Bt = -np.linalg.solve(Qt, data.T.T)
    Ct = sys.C @ data.basis
    rom = StateSpace(At, Bt, Ct)

    interp_res = _input_interp_residuals(sys, rom, data.S, data.T)

    gap = None
    if ltimodel.is_stable(sys):
        gap = _energy_gap(sys, rom)

    return ReductionReport(
        rom=rom,
        method="pork",
        preserved_poles=ltimodel.poles(rom),
        interpolation_residuals=interp_res,
        energy_identity_gap=gap,
        pseudo_gramian=Qt,
        rom_stable=ltimodel.is_stable(rom),
        gramian_positive_definite=True,
        wall_time_s=time.perf_counter() - t0,
    )


def flpork(sys, interp, band):
    """Frequency-limited pseudo-optimal rational Krylov reduction.

    Input-side construction: with realified data ``(S, C_t)`` and the band
    weight ``F``, the stacked data ``C_hat = [C_t F(-S); C_t]`` and
    ``B_w = [B, F(A) B]`` define the projection basis through
    ``A V - V S - B_w C_hat = 0``; the small Lyapunov solution

    ``(-S^T) Q + Q (-S) + F(-S)^T C_t^T C_t + C_t^T C_t F(-S) = 0``

    yields the reduced model ``At = -Q^{-1} S^T Q``, ``Bt = -Q^{-1} C_t^T``,
    ``Ct = C V``.  Its poles are the mirrored interpolation points, its
    band-limited controllability Gramian is ``Q^{-1}``, and the band-limited
    H2 energy identity holds.
    """
    t0 = time.perf_counter()
    ltimodel._assert_stable(sys)
    _require_rhp(interp)
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)

    data = real_input_data(sys, interp)
    F_A = matfun.compute_F(sys.A, band)
    F_mS = matfun.compute_F_antistable(data.S, band)
    data = augment_input_data(sys, data, band, F_A=F_A, F_mS=F_mS)

    # H + H^T keeps the right-hand side symmetric to the last bit
    H = F_mS.T @ (data.T.T @ data.T)
    Qs = matfun.solve_lyapunov(-data.S.T, H + H.T)
    definite, _kappa = _check_invertible_sym(Qs, "FLPORK pseudo-Gramian")

    At = -np.linalg.solve(Qs, data.S.T @ Qs)
    Bt = -np.linalg.solve(Qs, data.T.T)
    Ct = sys.C @ data.basis
    rom = StateSpace(At, Bt, Ct)

    full_aug = ltimodel.augment_input(sys, band, F=F_A).to_statespace()
    B_w_rom = np.hstack([Bt, -np.linalg.solve(Qs, F_mS.T @ data.T.T)])
    rom_aug = StateSpace(At, B_w_rom, Ct)
    interp_res = _input_interp_residuals(full_aug, rom_aug, data.S, data.T_aug)

    gap = _energy_gap(sys, rom, band=band, F=F_A)

    return ReductionReport(
        rom=rom,
        method="flpork",
        preserved_poles=ltimodel.poles(rom),
        interpolation_residuals=interp_res,
        energy_identity_gap=gap,
        pseudo_gramian=Qs,
        band=band,
        rom_stable=ltimodel.is_stable(rom),
        gramian_positive_definite=definite,
        wall_time_s=time.perf_counter() - t0,
    )


def oflpork(sys, interp, band):
    """Output-side frequency-limited pseudo-optimal reduction.

    Dual of :func:`flpork`: with realified output data ``(S, B_t)`` and
    ``B_hat = [F(-S) B_t, B_t]``, ``C_w = [C; C F(A)]``, the basis solves
    ``W^T A - S W^T - B_hat C_w = 0`` and the small Lyapunov solution

    ``(-S) P + P (-S^T) + F(-S) B_t B_t^T + B_t B_t^T F(-S)^T = 0``

    yields ``At = -P S^T P^{-1}``, ``Bt = W^T B``, ``Ct = -B_t^T P^{-1}``;
    ``P^{-1}`` is the band-limited observability Gramian of the result.
    """
    t0 = time.perf_counter()
    ltimodel._assert_stable(sys)
    _require_rhp(interp)
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)

    data = real_output_data(sys, interp)
    F_A = matfun.compute_F(sys.A, band)
    F_mS = matfun.compute_F_antistable(data.S, band)
    data = augment_output_data(sys, data, band, F_A=F_A, F_mS=F_mS)

    H = F_mS @ (data.T @ data.T.T)
    Ps = matfun.solve_lyapunov(-data.S, H + H.T)
    definite, _kappa = _check_invertible_sym(Ps, "O-FLPORK pseudo-Gramian")

    At = (-np.linalg.solve(Ps, data.S @ Ps)).T
    Bt = data.basis.T @ sys.B
    Ct = -np.linalg.solve(Ps, data.T).T
    rom = StateSpace(At, Bt, Ct)

    full_aug = ltimodel.augment_output(sys, band, F=F_A).to_statespace()
    C_w_rom = np.vstack([Ct, -np.linalg.solve(Ps, F_mS @ data.T).T])
    rom_aug = StateSpace(At, Bt, C_w_rom)
    interp_res = _output_interp_residuals(full_aug, rom_aug, data.S, data.T_aug)

    gap = _energy_gap(sys, rom, band=band, F=F_A)

    return ReductionReport(
        rom=rom,
        method="oflpork",
        preserved_poles=ltimodel.poles(rom),
        interpolation_residuals=interp_res,
        energy_identity_gap=gap,
        pseudo_gramian=Ps,
        band=band,
        rom_stable=ltimodel.is_stable(rom),
        gramian_positive_definite=definite,
        wall_time_s=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# balanced truncation and modal truncation


def _psd_factor(M):
    """Factor a (numerically) PSD matrix as L L^T via its eigendecomposition,
    clipping roundoff-negative eigenvalues at zero."""
    w, U = np.linalg.eigh(0.5 * (M + M.T))
    w = np.clip(w, 0.0, None)
    return U * np.sqrt(w)


def flbt(sys, r, band, rank_tol=1e-12):
    """Frequency-limited balanced truncation.

    Balances the frequency-limited Gramian pair with the square-root method
    (factor both, SVD of ``Lq^T Lp``) and truncates to order r.  The
    characteristic values ``hankel_values`` equal ``sqrt(eig(P_w Q_w))``.
    Unlike its unlimited cousin this truncation does not guarantee a stable
    reduced model; stability is reported, not enforced.
    """
    t0 = time.perf_counter()
    r = int(r)
    if not 1 <= r <= sys.order:
        raise DimensionMismatch(
            f"reduced order must be in [1, {sys.order}], got {r}"
        )
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    gp = ltimodel.gramians_limited(sys, band)
    Lp = _psd_factor(gp.P)
    Lq = _psd_factor(gp.Q)
    U, s, Vh = np.linalg.svd(Lq.T @ Lp)
    if s[r - 1] <= rank_tol * max(s[0], 1e-300):
        raise RankDeficientGramians(
            f"band-limited Gramians have numerical rank < {r}"
        )
    scale = 1.0 / np.sqrt(s[:r])
    V = (Lp @ Vh[:r].T) * scale
    W = (Lq @ U[:, :r]) * scale
    rom = StateSpace(W.T @ sys.A @ V, W.T @ sys.B, sys.C @ V)
    return ReductionReport(
        rom=rom,
        method="flbt",
        hankel_values=s,
        band=band,
        rom_stable=ltimodel.is_stable(rom),
        wall_time_s=time.perf_counter() - t0,
    )


def _match_multiset(targets, values, tol_abs):
    """Assign each target to a distinct value; returns (indices, distances).

    Uses the rectangular linear sum assignment on |target - value|."""
    cost = np.abs(np.asarray(targets)[:, None] - np.asarray(values)[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    order = np.argsort(rows)
    return cols[order], cost[rows, cols][order]


def modal_truncation(sys, selected_poles):
    """Oblique spectral projection onto a set of simple eigenvalues of A.

    The selected poles must be eigenvalues of A (to 1e-8 relative), simple,
    and closed under conjugation; they are preserved exactly in the reduced
    model.
    """
    t0 = time.perf_counter()
    selected = np.atleast_1d(np.asarray(selected_poles, dtype=complex))
    if selected.size < 1:
        raise NotAnEigenvalue("no poles selected")
    # conjugate closure of the selection
    tol = _conj_tol(selected)
    for s in selected:
        if abs(s.imag) > tol and np.abs(selected - np.conj(s)).min() > tol:
            raise BadInterpolationSet(
                f"selected pole {s:.6e} has no conjugate partner"
            )

    lam, X = np.linalg.eig(sys.A)
    Xi = np.linalg.inv(X)
    scale = max(1.0, float(np.abs(lam).max()))

    idx, dist = _match_multiset(selected, lam, 1e-8 * scale)
    for s, i, d in zip(selected, idx, dist):
        if d > 1e-8 * max(1.0, abs(s)):
            raise NotAnEigenvalue(
                f"{s:.6e} is not an eigenvalue of A (closest gap {d:.3e})"
            )
        others = np.abs(np.delete(lam, i) - lam[i])
        if others.size and others.min() <= 1e-8 * scale:
            raise DefectiveEigenvalue(
                f"eigenvalue {lam[i]:.6e} is multiple/defective"
            )

    r = selected.size
    V = np.zeros((sys.order, r))
    Wt = np.zeros((r, sys.order))
    seen = set()
    k = 0
    for i in idx:
        if i in seen:
            continue
        li = lam[i]
        if abs(li.imag) <= tol:
            V[:, k] = X[:, i].real
            Wt[k, :] = Xi[i, :].real
            seen.add(i)
            k += 1
        else:
            # locate the matched conjugate index
            j = None
            for cand in idx:
                if cand not in seen and cand != i and \
                        abs(lam[cand] - np.conj(li)) <= 1e-8 * scale:
                    j = cand
                    break
            if j is None:
                raise BadInterpolationSet(
                    f"matched eigenvalue {li:.6e} lost its conjugate partner"
                )
            if li.imag < 0:
                i, j = j, i
                li = lam[i]
            v, w = X[:, i], Xi[i, :]
            V[:, k], V[:, k + 1] = v.real, v.imag
            Wt[k, :], Wt[k + 1, :] = 2.0 * w.real, -2.0 * w.imag
            seen.add(i)
            seen.add(j)
            k += 2

    gram = Wt @ V
    if np.linalg.norm(gram - np.eye(r), "fro") > 1e-8 * r:
        raise NumericalFailure("modal projection lost bi-orthogonality")

    rom = StateSpace(Wt @ sys.A @ V, Wt @ sys.B, sys.C @ V)
    return ReductionReport(
        rom=rom,
        method="modal",
        preserved_poles=np.array(sorted(selected, key=lambda z: (-z.real, z.imag))),
        rom_stable=ltimodel.is_stable(rom),
        wall_time_s=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# mode selection and mirroring


def select_modes(sys, f_lo, f_hi, damping_max):
    """Oscillatory poles with frequency in [f_lo, f_hi] Hz and damping ratio
    ``zeta = -Re / |lambda| <= damping_max``, sorted by ascending damping,
    conjugate pairs kept adjacent."""
    if not (0.0 <= f_lo < f_hi):
        raise ValueError("need 0 <= f_lo < f_hi")
    lam = np.linalg.eigvals(sys.A)
    reps = []
    for z in lam:
        if z.imag <= 0.0:
            continue
        f = z.imag / (2.0 * np.pi)
        zeta = -z.real / abs(z)
        if f_lo <= f <= f_hi and zeta <= damping_max:
            reps.append((zeta, z))
    reps.sort(key=lambda t: t[0])
    out = []
    for _, z in reps:
        out.extend([z, np.conj(z)])
    return np.array(out, dtype=complex)


def default_directions(sys, points, side="input"):
    """Default tangential directions for a point set.

    Single-channel models take the direction 1 everywhere; otherwise each
    point gets the dominant right (input side) or left (output side)
    singular vector of ``G(sigma_i)``, with conjugate points receiving
    conjugate directions so the set stays conjugate-consistent.
    """
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    r = points.size
    nchan = sys.n_inputs if side == "input" else sys.n_outputs
    if nchan == 1:
        return np.ones((1, r)) if side == "input" else np.ones((r, 1))

    tol = _conj_tol(points)
    if side == "input":
        dirs = np.zeros((nchan, r), dtype=complex)
    else:
        dirs = np.zeros((r, nchan), dtype=complex)
    done = np.zeros(r, dtype=bool)
    for i in range(r):
        if done[i]:
            continue
        s = points[i]
        G = ltimodel.transfer_eval(sys, s)
        U, _sv, Vh = np.linalg.svd(G)
        t = Vh[0].conj() if side == "input" else U[:, 0].conj()
        if side == "input":
            dirs[:, i] = t
        else:
            dirs[i, :] = t
        done[i] = True
        if abs(s.imag) > tol:
            j = int(np.argmin(np.abs(points - np.conj(s))))
            if not done[j]:
                if side == "input":
                    dirs[:, j] = np.conj(t)
                else:
                    dirs[j, :] = np.conj(t)
                done[j] = True
    return dirs


def mirror_interpolation(selected_poles, directions=None, sys=None, side="input"):
    """Interpolation set at the mirror images of a set of stable poles.

    Each pole ``lambda`` maps to ``sigma = -conj(lambda)`` (mirrored through
    the imaginary axis, imaginary part kept).  When no tangential directions
    are given they default to ones for single-channel models and to the
    dominant singular vectors of ``G(sigma_i)`` otherwise (which needs
    ``sys``).
    """
    lam = np.atleast_1d(np.asarray(selected_poles, dtype=complex))
    if np.any(lam.real >= 0.0):
        raise UnstableMode("mirroring requires strictly stable poles")
    points = -np.conj(lam)

    if directions is not None:
        return InterpolationSet(points, directions, side=side)
    if sys is None:
        r = points.size
        dirs = np.ones((1, r)) if side == "input" else np.ones((r, 1))
        return InterpolationSet(points, dirs, side=side)
    return InterpolationSet(points, default_directions(sys, points, side), side=side)
