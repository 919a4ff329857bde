"""Independent verification: quadrature oracles, residue forms, certificates.

Every identity the reduction code claims (mirrored poles, pseudo-Gramian
inverses, cross-Gramian matches, energy identities, tangential
interpolation, residue directions) is re-checked here through routes that
do not share code with the construction: band-limited quantities are
recomputed by composite Gauss-Legendre quadrature on the frequency axis,
Gramians by Lyapunov solves on the reduced model itself, interpolation by
direct transfer-function evaluation.  Each check is reported as a
:class:`Certificate` with a measured value and its bound, so a run's
evidence can be serialized and audited.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ltimodel, matfun, reduction
from .errors import DefectiveEigenvalue, DimensionMismatch, MorlimError, NumericalFailure
from .ltimodel import StateSpace
from .matfun import FrequencyBand

TOL_MIRROR = 1e-8
TOL_GRAMIAN_INVERSE = 1e-7
TOL_CROSS_GRAMIAN = 1e-7
TOL_ENERGY = 1e-6
TOL_PATH_AGREEMENT = 1e-4
TOL_INTERPOLATION = 1e-6
DEFAULT_KAPPA_THRESHOLD = 1e8

#: Minimum Gauss-Legendre nodes per quadrature panel.
MIN_PANEL_NODES = 8

_TINY = 1e-300


# ---------------------------------------------------------------------------
# quadrature oracles


_GL_CACHE = {}


def _leggauss(k):
    if k not in _GL_CACHE:
        _GL_CACHE[k] = np.polynomial.legendre.leggauss(k)
    return _GL_CACHE[k]


def _panels(band, poles, nodes):
    """Split [lo, hi] into panels adapted to the supplied poles.

    Each pole contributes a panel edge at |Im lambda| plus a geometric
    grading at multiples of its half-width |Re lambda| on both sides, so a
    lightly damped resonance is bracketed by panels matched to the peak at
    every scale.  The node budget is shared out proportionally to panel
    length with a per-panel floor.
    """
    lo, hi = band.omega_lo, band.omega_hi
    edges = [lo, hi]
    for z in np.atleast_1d(np.asarray(poles, dtype=complex)):
        w0 = abs(float(z.imag))
        delta = max(abs(float(z.real)), 1e-6 * max(hi, 1.0))
        if lo < w0 < hi:
            edges.append(w0)
        for k in (1.0, 4.0, 16.0, 64.0):
            for e in (w0 - k * delta, w0 + k * delta):
                if lo < e < hi:
                    edges.append(e)
    edges = sorted(edges)
    merged = [edges[0]]
    min_gap = 1e-12 * max(hi, 1.0)
    for e in edges[1:]:
        if e - merged[-1] > min_gap:
            merged.append(e)
    merged[-1] = hi
    total = hi - lo
    panels = []
    for a, b in zip(merged[:-1], merged[1:]):
        k = max(MIN_PANEL_NODES, int(round(nodes * (b - a) / total)))
        panels.append((a, b, k))
    return panels


def _band_nodes(band, poles, nodes):
    """Quadrature nodes/weights covering both signed copies of the band.

    Returns (nu, w) with nu the signed frequencies.  Panel boundaries
    follow the pole layout (see _panels) so each panel's integrand is
    smooth at the quadrature's length scale.
    """
    poles = np.atleast_1d(np.asarray(poles, dtype=complex))
    xs, ws = [], []
    for a, b, k in _panels(band, poles, nodes):
        x, w = _leggauss(k)
        xs.append(0.5 * (b - a) * x + 0.5 * (b + a))
        ws.append(0.5 * (b - a) * w)
    x_pos = np.concatenate(xs)
    w_pos = np.concatenate(ws)
    nu = np.concatenate([-x_pos[::-1], x_pos])
    w = np.concatenate([w_pos[::-1], w_pos])
    return nu, w


def _check_axis_clearance(eigs, band):
    for z in np.atleast_1d(eigs):
        if abs(z.real) <= 1e-12 and band.omega_lo - 1e-12 <= abs(z.imag) <= band.omega_hi + 1e-12:
            raise NumericalFailure(
                f"pole {z:.6e} sits on the integration contour"
            )


def _resolvent_apply(A, nu, B):
    """(j nu_k I - A)^{-1} B for every node, batched."""
    n = A.shape[0]
    M = 1j * nu[:, None, None] * np.eye(n) - A
    rhs = np.broadcast_to(B.astype(complex), (nu.size,) + B.shape)
    return np.linalg.solve(M, np.ascontiguousarray(rhs))


def oracle_F(A, band, nodes=256):
    """Band weight by direct quadrature of the resolvent.

    Computes ``(1/2pi) * integral of (j nu I - A)^{-1} d nu`` over both
    signed copies of the band.  The result of the exact integral is real;
    a residual imaginary part beyond 1e-9 relative trips
    :class:`NumericalFailure`, which is the point of running the oracle.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    lam = np.linalg.eigvals(A)
    _check_axis_clearance(lam, band)
    nu, w = _band_nodes(band, lam, nodes)
    R = _resolvent_apply(A, nu, np.eye(A.shape[0]))
    F = np.tensordot(w, R, axes=1) / (2.0 * np.pi)
    scale = max(1.0, np.linalg.norm(F.real, "fro"))
    if np.linalg.norm(F.imag, "fro") > 1e-9 * scale:
        raise NumericalFailure(
            "quadrature band weight has a non-vanishing imaginary part: "
            f"{np.linalg.norm(F.imag, 'fro'):.3e}"
        )
    return F.real


def oracle_gramian(sys, band, nodes=256, side="controllability"):
    """Band-limited Gramian by direct quadrature.

    ``side='controllability'`` integrates ``R B B^H R^H``,
    ``side='observability'`` the dual with the transposed model.
    """
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    lam = np.linalg.eigvals(sys.A)
    _check_axis_clearance(lam, band)
    nu, w = _band_nodes(band, lam, nodes)
    if side == "controllability":
        X = _resolvent_apply(sys.A, nu, sys.B)
    elif side == "observability":
        X = _resolvent_apply(sys.A.T, nu, sys.C.T)
    else:
        raise ValueError(f"unknown side {side!r}")
    P = np.einsum("k,kij,klj->il", w, X, X.conj()) / (2.0 * np.pi)
    scale = max(1.0, np.linalg.norm(P.real, "fro"))
    if np.linalg.norm(P.imag, "fro") > 1e-9 * scale:
        raise NumericalFailure(
            "quadrature Gramian has a non-vanishing imaginary part"
        )
    return P.real


def oracle_h2w(sys, band, nodes=256):
    """Squared band-limited H2 norm by quadrature of trace(G G^H)."""
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    lam = np.linalg.eigvals(sys.A)
    _check_axis_clearance(lam, band)
    nu, w = _band_nodes(band, lam, nodes)
    X = _resolvent_apply(sys.A, nu, sys.B)
    G = np.matmul(sys.C, X)
    vals = np.sum(np.abs(G) ** 2, axis=(1, 2))
    return float(np.dot(w, vals) / (2.0 * np.pi))


def band_weight_scalar(lam, band):
    """Scalar spectral mapping of the band weight: the value the band
    weight of a matrix takes on an eigenvalue ``lam``.

    Analytic away from the integration contour; for a 1x1 stable real
    matrix it reduces to arctan-type expressions.
    """
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    lam = complex(lam)
    w1, w2 = band.omega_lo, band.omega_hi
    val = np.log(1j * w2 - lam) - np.log(1j * w1 - lam) \
        + np.log(-1j * w1 - lam) - np.log(-1j * w2 - lam)
    return (-1j / (2.0 * np.pi)) * val


# ---------------------------------------------------------------------------
# residue (pole/residue) form


@dataclass
class ResidueForm:
    """Partial-fraction data of a simple-pole transfer function:
    ``G(s) = sum_i left[:, i] right[i, :] / (s - poles[i])``."""

    poles: np.ndarray   # (r,)
    left: np.ndarray    # (p, r)
    right: np.ndarray   # (r, m)

    def residue(self, i):
        """Rank-one residue matrix at pole i."""
        return np.outer(self.left[:, i], self.right[i, :])

    def eval(self, s):
        G = np.zeros((self.left.shape[0], self.right.shape[1]), dtype=complex)
        for i in range(self.poles.size):
            G += self.residue(i) / (s - self.poles[i])
        return G


def to_residue_form(sys, gap_tol=1e-8):
    """Diagonalize a model with simple poles into :class:`ResidueForm`.

    Raises :class:`DefectiveEigenvalue` when two eigenvalues of A are
    closer than ``gap_tol`` relative to the spectral scale, since the
    eigenvector frame is then unreliable.
    """
    lam, X = np.linalg.eig(sys.A)
    scale = max(1.0, float(np.abs(lam).max()))
    for i in range(lam.size):
        others = np.abs(np.delete(lam, i) - lam[i])
        if others.size and others.min() <= gap_tol * scale:
            raise DefectiveEigenvalue(
                f"eigenvalues cluster at {lam[i]:.6e}; residue form undefined"
            )
    Xi = np.linalg.inv(X)
    return ResidueForm(poles=lam, left=sys.C @ X, right=Xi @ sys.B)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    """One verified claim: a measured quantity against its bound."""

    name: str
    measured: float
    bound: float
    passed: bool
    context: str = ""
    inconclusive: bool = False

    def to_dict(self):
        return {
            "name": self.name,
            "measured": self.measured,
            "bound": self.bound,
            "pass": bool(self.passed),
            "context": self.context,
            "inconclusive": bool(self.inconclusive),
        }


def all_passed(certs):
    return all(c.passed for c in certs)


def any_failed(certs):
    """True when some certificate failed outright (inconclusive ones,
    which cannot be judged at working precision, do not count)."""
    return any(not c.passed and not c.inconclusive for c in certs)


def any_inconclusive(certs):
    return any(c.inconclusive for c in certs)


def _failed_cert(name, bound, exc):
    return Certificate(
        name=name,
        measured=float("inf"),
        bound=bound,
        passed=False,
        context=f"could not be evaluated: {exc}",
    )


def _mirror_pole_certificate(rom, points):
    targets = -np.asarray(points, dtype=complex)
    got = np.linalg.eigvals(rom.A)
    if targets.size != got.size:
        return Certificate(
            "mirror_poles", float("inf"), TOL_MIRROR, False,
            context="pole count differs from interpolation point count",
        )
    _, dist = reduction._match_multiset(targets, got, TOL_MIRROR)
    bound = TOL_MIRROR * max(1.0, float(np.abs(targets).max()))
    measured = float(dist.max())
    return Certificate("mirror_poles", measured, bound, measured <= bound)


def _energy_certificates(full, rom, band, F_A, nodes):
    """Gramian-route and quadrature-route band-limited energy identities,
    plus the agreement of the two routes."""
    certs = []
    err = ltimodel.error_system(full, rom)
    gram = {}
    try:
        gram["full"] = ltimodel.h2w_norm_squared(full, band, F=F_A)
        gram["rom"] = ltimodel.h2w_norm_squared(rom, band)
        gram["err"] = ltimodel.h2w_norm_squared(err, band)
        ref = max(gram["full"], _TINY)
        measured = abs(gram["err"] - (gram["full"] - gram["rom"])) / ref
        certs.append(Certificate(
            "energy_identity_gramian", float(measured), TOL_ENERGY,
            measured <= TOL_ENERGY,
        ))
    except MorlimError as exc:
        gram = None
        certs.append(_failed_cert("energy_identity_gramian", TOL_ENERGY, exc))
    quad = {}
    try:
        quad["full"] = oracle_h2w(full, band, nodes)
        quad["rom"] = oracle_h2w(rom, band, nodes)
        quad["err"] = oracle_h2w(err, band, nodes)
        ref = max(quad["full"], _TINY)
        measured = abs(quad["err"] - (quad["full"] - quad["rom"])) / ref
        certs.append(Certificate(
            "energy_identity_quadrature", float(measured), TOL_ENERGY,
            measured <= TOL_ENERGY,
        ))
    except MorlimError as exc:
        quad = None
        certs.append(_failed_cert("energy_identity_quadrature", TOL_ENERGY, exc))
    if gram is not None and quad is not None:
        # floor each denominator at a fraction of the full-model energy:
        # an exact (r = n) reduction leaves the error energy at rounding
        # level, and noise-over-noise ratios say nothing about the routes
        scale = max(abs(gram["full"]), abs(quad["full"]), _TINY)
        rel = max(
            abs(gram[k] - quad[k])
            / max(abs(gram[k]), abs(quad[k]), 1e-9 * scale, _TINY)
            for k in ("full", "rom", "err")
        )
        certs.append(Certificate(
            "path_agreement", float(rel), TOL_PATH_AGREEMENT,
            rel <= TOL_PATH_AGREEMENT,
            context="Gramian route vs quadrature route on the three squared norms",
        ))
    else:
        certs.append(Certificate(
            "path_agreement", float("inf"), TOL_PATH_AGREEMENT, False,
            context="one of the routes failed",
        ))
    return certs


def _pair_rank_certificate(name, S, T, side, context):
    ok, sv = reduction._staircase_rank_ok(S, T, side)
    ratio = float(sv[-1] / max(sv[0], _TINY))
    return Certificate(
        name, ratio, reduction.PAIR_RANK_TOL, bool(ok),
        context=context + "; measured is the smallest/largest staircase "
                          "singular-value ratio, passing requires it to "
                          "EXCEED the bound",
    )


def certify_flpork(sys, interp, band, nodes=256,
                   kappa_threshold=DEFAULT_KAPPA_THRESHOLD, rom=None):
    """Run the input-side band-limited pseudo-optimal reduction and verify
    every property it promises.

    Returns ``(report, certificates)``.  When ``rom`` is given it replaces
    the constructed reduced model in every check — the hook the negative
    controls use to prove the certificates can fail.
    """
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    report = reduction.flpork(sys, interp, band)
    Qs = report.pseudo_gramian
    target = rom if rom is not None else report.rom
    r = target.order

    data = reduction.real_input_data(sys, interp)
    F_A = matfun.compute_F(sys.A, band)
    F_mS = matfun.compute_F_antistable(data.S, band)
    adata = reduction.augment_input_data(sys, data, band, F_A=F_A, F_mS=F_mS)

    certs = [_mirror_pole_certificate(target, interp.points)]

    # the reduced model's own band-limited controllability Gramian must be
    # the inverse of the small Lyapunov solution
    w = np.linalg.eigvalsh(0.5 * (Qs + Qs.T))
    kappa = float(np.abs(w).max() / max(np.abs(w).min(), _TINY))
    try:
        Pw = ltimodel.gramians_limited(target, band).P
        measured = float(np.linalg.norm(Pw @ Qs - np.eye(r), "fro"))
        cert = Certificate(
            "pseudo_gramian_inverse", measured, TOL_GRAMIAN_INVERSE,
            measured <= TOL_GRAMIAN_INVERSE,
            context=f"cond(pseudo-Gramian) = {kappa:.3e}",
        )
    except MorlimError as exc:
        cert = _failed_cert("pseudo_gramian_inverse", TOL_GRAMIAN_INVERSE, exc)
        cert.context += f"; cond(pseudo-Gramian) = {kappa:.3e}"
        Pw = None
    if kappa > kappa_threshold:
        cert.inconclusive = True
        cert.context += (
            f"; exceeds conditioning threshold {kappa_threshold:.1e}, "
            "identity check is not trustworthy at this precision"
        )
    certs.append(cert)

    # cross-Gramian output match: C Phat = Ct Pw(rom)
    try:
        if Pw is None:
            raise NumericalFailure("reduced Gramian unavailable")
        cg = ltimodel.cross_gramians(sys, target, band)
        lhs = sys.C @ cg.P_hat
        rhs = target.C @ Pw
        measured = float(
            np.linalg.norm(lhs - rhs, "fro") / max(np.linalg.norm(lhs, "fro"), _TINY)
        )
        certs.append(Certificate(
            "cross_gramian_match", measured, TOL_CROSS_GRAMIAN,
            measured <= TOL_CROSS_GRAMIAN,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("cross_gramian_match", TOL_CROSS_GRAMIAN, exc))

    certs.extend(_energy_certificates(sys, target, band, F_A, nodes))

    # tangential interpolation of the augmented transfer functions
    try:
        full_aug = ltimodel.augment_input(sys, band, F=F_A).to_statespace()
        B_w2 = -np.linalg.solve(Qs, F_mS.T @ data.T.T)
        rom_aug = StateSpace(target.A, np.hstack([target.B, B_w2]), target.C)
        res = reduction._input_interp_residuals(full_aug, rom_aug, data.S, adata.T_aug)
        measured = float(res.max())
        certs.append(Certificate(
            "interpolation_augmented", measured, TOL_INTERPOLATION,
            measured <= TOL_INTERPOLATION,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("interpolation_augmented", TOL_INTERPOLATION, exc))

    # residue rows of the reduced model must align with the effective
    # tangential directions
    try:
        rf = to_residue_form(target)
        lamS, X = np.linalg.eig(data.S)
        worst = 0.0
        for i in range(lamS.size):
            u = data.T.astype(complex) @ X[:, i]
            k = int(np.argmin(np.abs(rf.poles - (-lamS[i]))))
            R = rf.residue(k)
            nrm = np.linalg.norm(R, "fro")
            proj = R @ (np.eye(u.size) - np.outer(u.conj(), u) / (np.abs(u) ** 2).sum())
            worst = max(worst, float(np.linalg.norm(proj, "fro") / max(nrm, _TINY)))
        certs.append(Certificate(
            "input_residual_direction", worst, TOL_INTERPOLATION,
            worst <= TOL_INTERPOLATION,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("input_residual_direction", TOL_INTERPOLATION, exc))

    # fixed-point interpolation in residue form, checked in the mirrored
    # (sign-consistent) sense: the literal reading would evaluate the
    # reduced model at its own pole.
    try:
        rf = to_residue_form(target)
        full_aug = ltimodel.augment_input(sys, band, F=F_A).to_statespace()
        B_w2 = -np.linalg.solve(Qs, F_mS.T @ data.T.T)
        rom_aug = StateSpace(target.A, np.hstack([target.B, B_w2]), target.C)
        worst = 0.0
        for k in range(rf.poles.size):
            lam = rf.poles[k]
            fval = band_weight_scalar(lam, band)
            rhat = np.concatenate([fval * rf.right[k, :], rf.right[k, :]])
            gf = ltimodel.transfer_eval(full_aug, -lam) @ rhat
            gr = ltimodel.transfer_eval(rom_aug, -lam) @ rhat
            worst = max(worst, float(
                np.linalg.norm(gf - gr) / max(np.linalg.norm(gf), _TINY)
            ))
        certs.append(Certificate(
            "fixed_point_interpolation", worst, TOL_INTERPOLATION,
            worst <= TOL_INTERPOLATION,
            context="mirrored evaluation points; directions from reduced residues",
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("fixed_point_interpolation", TOL_INTERPOLATION, exc))

    certs.append(_pair_rank_certificate(
        "pair_observability", data.S, data.T, "input",
        "informational: observability of the realified data",
    ))
    certs.append(_pair_rank_certificate(
        "pair_observability_augmented", adata.S, adata.T_aug, "input",
        "informational: observability of the band-augmented data",
    ))
    return report, certs


def certify_oflpork(sys, interp, band, nodes=256,
                    kappa_threshold=DEFAULT_KAPPA_THRESHOLD, rom=None):
    """Output-side dual of :func:`certify_flpork`."""
    if not isinstance(band, FrequencyBand):
        band = FrequencyBand(*band)
    report = reduction.oflpork(sys, interp, band)
    Ps = report.pseudo_gramian
    target = rom if rom is not None else report.rom
    r = target.order

    data = reduction.real_output_data(sys, interp)
    F_A = matfun.compute_F(sys.A, band)
    F_mS = matfun.compute_F_antistable(data.S, band)
    adata = reduction.augment_output_data(sys, data, band, F_A=F_A, F_mS=F_mS)

    certs = [_mirror_pole_certificate(target, interp.points)]

    w = np.linalg.eigvalsh(0.5 * (Ps + Ps.T))
    kappa = float(np.abs(w).max() / max(np.abs(w).min(), _TINY))
    try:
        Qw = ltimodel.gramians_limited(target, band).Q
        measured = float(np.linalg.norm(Qw @ Ps - np.eye(r), "fro"))
        cert = Certificate(
            "pseudo_gramian_inverse", measured, TOL_GRAMIAN_INVERSE,
            measured <= TOL_GRAMIAN_INVERSE,
            context=f"cond(pseudo-Gramian) = {kappa:.3e}",
        )
    except MorlimError as exc:
        cert = _failed_cert("pseudo_gramian_inverse", TOL_GRAMIAN_INVERSE, exc)
        cert.context += f"; cond(pseudo-Gramian) = {kappa:.3e}"
        Qw = None
    if kappa > kappa_threshold:
        cert.inconclusive = True
        cert.context += (
            f"; exceeds conditioning threshold {kappa_threshold:.1e}, "
            "identity check is not trustworthy at this precision"
        )
    certs.append(cert)

    try:
        if Qw is None:
            raise NumericalFailure("reduced Gramian unavailable")
        cg = ltimodel.cross_gramians(sys, target, band)
        lhs = cg.Q_hat @ sys.B
        rhs = Qw @ target.B
        measured = float(
            np.linalg.norm(lhs - rhs, "fro") / max(np.linalg.norm(lhs, "fro"), _TINY)
        )
        certs.append(Certificate(
            "cross_gramian_match", measured, TOL_CROSS_GRAMIAN,
            measured <= TOL_CROSS_GRAMIAN,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("cross_gramian_match", TOL_CROSS_GRAMIAN, exc))

    certs.extend(_energy_certificates(sys, target, band, F_A, nodes))

    try:
        full_aug = ltimodel.augment_output(sys, band, F=F_A).to_statespace()
        C_w2 = -np.linalg.solve(Ps, F_mS @ data.T).T
        rom_aug = StateSpace(target.A, target.B, np.vstack([target.C, C_w2]))
        res = reduction._output_interp_residuals(full_aug, rom_aug, data.S, adata.T_aug)
        measured = float(res.max())
        certs.append(Certificate(
            "interpolation_augmented", measured, TOL_INTERPOLATION,
            measured <= TOL_INTERPOLATION,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("interpolation_augmented", TOL_INTERPOLATION, exc))

    try:
        rf = to_residue_form(target)
        lamS, X = np.linalg.eig(data.S)
        Xi = np.linalg.inv(X)
        worst = 0.0
        for i in range(lamS.size):
            u = Xi[i, :] @ data.T.astype(complex)
            k = int(np.argmin(np.abs(rf.poles - (-lamS[i]))))
            R = rf.residue(k)
            nrm = np.linalg.norm(R, "fro")
            proj = (np.eye(u.size) - np.outer(u, u.conj()) / (np.abs(u) ** 2).sum()) @ R
            worst = max(worst, float(np.linalg.norm(proj, "fro") / max(nrm, _TINY)))
        certs.append(Certificate(
            "output_residual_direction", worst, TOL_INTERPOLATION,
            worst <= TOL_INTERPOLATION,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("output_residual_direction", TOL_INTERPOLATION, exc))

    try:
        rf = to_residue_form(target)
        full_aug = ltimodel.augment_output(sys, band, F=F_A).to_statespace()
        C_w2 = -np.linalg.solve(Ps, F_mS @ data.T).T
        rom_aug = StateSpace(target.A, target.B, np.vstack([target.C, C_w2]))
        worst = 0.0
        for k in range(rf.poles.size):
            lam = rf.poles[k]
            fval = band_weight_scalar(lam, band)
            lhat = np.concatenate([fval * rf.left[:, k], rf.left[:, k]])
            gf = lhat @ ltimodel.transfer_eval(full_aug, -lam)
            gr = lhat @ ltimodel.transfer_eval(rom_aug, -lam)
            worst = max(worst, float(
                np.linalg.norm(gf - gr) / max(np.linalg.norm(gf), _TINY)
            ))
        certs.append(Certificate(
            "fixed_point_interpolation", worst, TOL_INTERPOLATION,
            worst <= TOL_INTERPOLATION,
            context="mirrored evaluation points; directions from reduced residues",
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("fixed_point_interpolation", TOL_INTERPOLATION, exc))

    certs.append(_pair_rank_certificate(
        "pair_controllability", data.S, data.T, "output",
        "informational: controllability of the realified data",
    ))
    certs.append(_pair_rank_certificate(
        "pair_controllability_augmented", adata.S, adata.T_aug, "output",
        "informational: controllability of the band-augmented data",
    ))
    return report, certs


def certify_pork(sys, interp, rom=None):
    """Certificates for the unlimited pseudo-optimal reduction: mirrored
    poles, the H2 energy identity, and standard tangential interpolation."""
    report = reduction.pork(sys, interp)
    target = rom if rom is not None else report.rom
    data = reduction.real_input_data(sys, interp)

    certs = [_mirror_pole_certificate(target, interp.points)]

    try:
        e_full = ltimodel.h2_norm_squared(sys)
        e_rom = ltimodel.h2_norm_squared(target)
        e_err = ltimodel.h2_norm_squared(ltimodel.error_system(sys, target))
        measured = abs(e_err - (e_full - e_rom)) / max(e_full, _TINY)
        certs.append(Certificate(
            "energy_identity", float(measured), TOL_ENERGY,
            measured <= TOL_ENERGY,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("energy_identity", TOL_ENERGY, exc))

    try:
        res = reduction._input_interp_residuals(sys, target, data.S, data.T)
        measured = float(res.max())
        certs.append(Certificate(
            "interpolation", measured, TOL_INTERPOLATION,
            measured <= TOL_INTERPOLATION,
        ))
    except MorlimError as exc:
        certs.append(_failed_cert("interpolation", TOL_INTERPOLATION, exc))
    return report, certs


def certify(sys, interp, band=None, method="flpork", nodes=256,
            kappa_threshold=DEFAULT_KAPPA_THRESHOLD, rom=None):
    """Dispatch to the method-specific certifier."""
    if method == "flpork":
        return certify_flpork(sys, interp, band, nodes, kappa_threshold, rom=rom)
    if method == "oflpork":
        return certify_oflpork(sys, interp, band, nodes, kappa_threshold, rom=rom)
    if method == "pork":
        return certify_pork(sys, interp, rom=rom)
    raise ValueError(f"no certifier for method {method!r}")


# ---------------------------------------------------------------------------
# negative controls


@dataclass
class NegativeControlTrial:
    index: int
    perturbed: str
    flipped: list = field(default_factory=list)
    detected: bool = False


def perturb_matrix(M, rng, rel=0.01):
    """Additive random perturbation of fixed relative Frobenius size."""
    G = rng.standard_normal(M.shape)
    return M + rel * np.linalg.norm(M, "fro") * G / np.linalg.norm(G, "fro")


def negative_controls(sys, interp, band, n_trials=20, seed=0, nodes=256,
                      method="flpork", rel=0.01):
    """Tamper with the reduced model and confirm the certificates notice.

    Each trial perturbs one of the reduced matrices (cycling A, B, C) by
    ``rel`` relative Frobenius norm and re-runs the full certificate suite
    against the tampered model.  A trial counts as detected when at least
    one certificate that passed on the clean model fails on the tampered
    one.
    """
    report, clean = certify(sys, interp, band, method=method, nodes=nodes)
    clean_pass = {c.name: c.passed for c in clean}
    rng = np.random.default_rng(seed)
    names = ("A", "B", "C")
    trials = []
    for t in range(n_trials):
        which = names[t % 3]
        A, B, C = report.rom.A.copy(), report.rom.B.copy(), report.rom.C.copy()
        if which == "A":
            A = perturb_matrix(A, rng, rel)
        elif which == "B":
            B = perturb_matrix(B, rng, rel)
        else:
            C = perturb_matrix(C, rng, rel)
        tampered = StateSpace(A, B, C)
        _, certs = certify(sys, interp, band, method=method, nodes=nodes,
                           rom=tampered)
        flipped = [
            c.name for c in certs
            if clean_pass.get(c.name, True) and not c.passed
        ]
        trials.append(NegativeControlTrial(
            index=t, perturbed=which, flipped=flipped, detected=bool(flipped),
        ))
    return trials
