"""Certification harness: quadrature oracles, residue forms, certificates,
negative controls.

The quadrature oracle is the measuring stick for everything band-limited, so
its own convergence is tested first (node doubling, analytic scalar values)
before it is trusted to judge the Lyapunov-path quantities.
"""

import numpy as np
import pytest

from morlim import (
    Certificate,
    FrequencyBand,
    InterpolationSet,
    StateSpace,
    all_passed,
    any_failed,
    any_inconclusive,
    certify,
    certify_flpork,
    certify_oflpork,
    certify_pork,
    default_directions,
    gramians_limited,
    h2_norm_squared,
    h2w_norm_squared,
    negative_controls,
    oracle_F,
    oracle_gramian,
    oracle_h2w,
    perturb_matrix,
    to_residue_form,
    transfer_eval,
)
from morlim.powergrid import synth_benchmark
from conftest import mode_mirror_interp, rand_stable

SCALAR = StateSpace(np.array([[-1.0]]), np.array([[1.0]]), np.array([[1.0]]))
BAND01 = FrequencyBand(0.0, 1.0)


# ---------------------------------------------------------------------------
# quadrature oracles


def test_oracle_F_scalar():
    F = oracle_F(np.array([[-1.0]]), BAND01, nodes=64)
    assert abs(F[0, 0] - np.arctan(1.0) / np.pi) <= 1e-8


def test_oracle_F_diagonal():
    F = oracle_F(np.diag([-1.0, -3.0]), FrequencyBand(0.0, 2.0), nodes=96)
    want = np.diag([np.arctan(2.0), np.arctan(2.0 / 3.0)]) / np.pi
    assert np.abs(F - want).max() <= 1e-8


def test_oracle_F_node_doubling_converged():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((5, 5))
    A -= np.diag(np.abs(A).sum(axis=1) + 0.5)
    band = FrequencyBand(0.0, 3.0)
    F1 = oracle_F(A, band, nodes=128)
    F2 = oracle_F(A, band, nodes=256)
    assert np.abs(F1 - F2).max() <= 1e-9


def test_oracle_gramian_matches_lyapunov_path():
    for seed in range(4):
        sysm = rand_stable(8, m=2, p=2, seed=70 + seed)
        band = FrequencyBand(0.1, 5.0)
        Pq = oracle_gramian(sysm, band, nodes=192)
        P = gramians_limited(sysm, band).P
        rel = np.linalg.norm(Pq - P) / np.linalg.norm(P)
        assert rel <= 1e-4, f"seed {seed}: {rel:.2e}"


def test_oracle_gramian_observability_side():
    sysm = rand_stable(6, seed=74)
    band = FrequencyBand(0.0, 2.0)
    Qq = oracle_gramian(sysm, band, nodes=192, side="observability")
    Q = gramians_limited(sysm, band).Q
    assert np.linalg.norm(Qq - Q) <= 1e-4 * np.linalg.norm(Q)


def test_oracle_h2w_scalar():
    v = oracle_h2w(SCALAR, BAND01, nodes=96)
    assert abs(np.sqrt(v) - 0.5) <= 1e-8


def test_oracle_h2w_wide_band_approaches_h2():
    sysm = rand_stable(5, seed=75)
    v = oracle_h2w(sysm, FrequencyBand(0.0, 1e4), nodes=512)
    assert abs(v - h2_norm_squared(sysm)) <= 1e-3 * h2_norm_squared(sysm)


def test_oracle_h2w_zero_output():
    sysm = StateSpace(np.array([[-1.0]]), np.eye(1), np.zeros((1, 1)))
    assert oracle_h2w(sysm, BAND01, nodes=64) <= 1e-14


def test_oracle_resolves_sharp_resonance():
    """A zeta = 0.005 mode inside the band: the graded panels must still
    deliver the Lyapunov-path energy to 1e-6 relative."""
    w0 = 3.0
    z = 0.005
    A = np.array([[-z * w0, w0 * np.sqrt(1 - z * z)],
                  [-w0 * np.sqrt(1 - z * z), -z * w0]])
    sysm = StateSpace(A, np.array([[1.0], [0.3]]), np.array([[1.0, -0.2]]))
    band = FrequencyBand(0.0, 8.0)
    v_quad = oracle_h2w(sysm, band, nodes=256)
    v_gram = h2w_norm_squared(sysm, band)
    assert abs(v_quad - v_gram) <= 1e-6 * v_gram


# ---------------------------------------------------------------------------
# residue form


def test_residue_scalar():
    rf = to_residue_form(SCALAR)
    assert np.allclose(rf.poles, [-1.0])
    # residue = (left row) x (right column) product at the pole
    res = np.einsum("ip,pj->pij", rf.left.T, rf.right)[0] \
        if rf.left.ndim > 1 else rf.left * rf.right
    assert np.allclose(np.ravel(rf.left)[0] * np.ravel(rf.right)[0], 1.0)


def test_residue_diagonal_products():
    sysm = StateSpace(np.diag([-1.0, -2.0]),
                      np.array([[2.0], [3.0]]),
                      np.array([[5.0, 7.0]]))
    rf = to_residue_form(sysm)
    order = np.argsort(rf.poles.real)[::-1]  # -1 first
    got = [np.ravel(rf.left)[k] * np.ravel(rf.right)[k] for k in order]
    assert np.allclose(got, [10.0, 21.0])


def test_residue_reconstruction():
    sysm = rand_stable(5, m=2, p=2, seed=76)
    rf = to_residue_form(sysm)
    for s in (0.3j, 1.5j, 2.0 + 1.0j):
        G = transfer_eval(sysm, s)
        R = np.zeros_like(G, dtype=complex)
        for k in range(rf.poles.size):
            lk = rf.left[:, k][:, None] if rf.left.ndim > 1 else rf.left[k]
            rk = rf.right[k][None, :] if rf.right.ndim > 1 else rf.right[k]
            R += np.outer(rf.left[:, k], rf.right[k]) / (s - rf.poles[k])
        assert np.abs(G - R).max() <= 1e-7 * max(np.abs(G).max(), 1.0)


# ---------------------------------------------------------------------------
# certificates: self-reduction, random instances, negative controls


def test_certify_flpork_self_reduction():
    rep, certs = certify_flpork(SCALAR, InterpolationSet(
        np.array([1.0 + 0j]), np.array([[1.0 + 0j]]), "input"), BAND01)
    assert all_passed(certs)
    for c in certs:
        if c.name.startswith("pair_"):
            continue  # rank ratios: pass by exceeding their bound
        assert c.measured <= 1e-10, f"{c.name}: {c.measured:.2e}"


def test_certify_flpork_random_instance(bench12):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12, band, 4)
    rep, certs = certify_flpork(bench12, interp, band, nodes=192)
    assert all_passed(certs)
    names = [c.name for c in certs]
    # both energy-identity routes are present and they agree
    assert "energy_identity_gramian" in names
    assert "energy_identity_quadrature" in names
    assert "path_agreement" in names


def test_certify_flpork_detects_perturbed_rom(bench12):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12, band, 4)
    rep, _ = certify_flpork(bench12, interp, band, nodes=160)
    rng = np.random.default_rng(5)
    bad = StateSpace(rep.rom.A, perturb_matrix(rep.rom.B, rng, rel=1e-2),
                     rep.rom.C)
    _, certs = certify_flpork(bench12, interp, band, nodes=160, rom=bad)
    flipped = [c.name for c in certs if not c.passed]
    assert flipped, "1e-2 perturbation of B must flip a certificate"
    assert any_failed(certs)


def test_certify_oflpork_suite(bench12_mimo):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12_mimo, band, 4, side="output")
    rep, certs = certify_oflpork(bench12_mimo, interp, band, nodes=192)
    assert all_passed(certs)
    names = [c.name for c in certs]
    assert "output_residual_direction" in names
    assert "pair_controllability" in names


def test_certify_oflpork_detects_perturbed_rom(bench12):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12, band, 4, side="output")
    rep, _ = certify_oflpork(bench12, interp, band, nodes=160)
    rng = np.random.default_rng(6)
    bad = StateSpace(rep.rom.A, rep.rom.B,
                     perturb_matrix(rep.rom.C, rng, rel=1e-2))
    _, certs = certify_oflpork(bench12, interp, band, nodes=160, rom=bad)
    assert any_failed(certs)


def test_certify_pork_self_reduction():
    _, certs = certify_pork(SCALAR, InterpolationSet(
        np.array([1.0 + 0j]), np.array([[1.0 + 0j]]), "input"))
    assert all_passed(certs)


def test_certify_pork_random_and_negative(bench12):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12, band, 4)
    rep, certs = certify_pork(bench12, interp)
    assert all_passed(certs)
    by_name = {c.name: c for c in certs}
    assert by_name["energy_identity"].passed
    rng = np.random.default_rng(7)
    bad = StateSpace(rep.rom.A, rep.rom.B,
                     perturb_matrix(rep.rom.C, rng, rel=1e-2))
    _, certs_bad = certify_pork(bench12, interp, rom=bad)
    assert any_failed(certs_bad)


def test_certify_dispatcher_routes(bench12):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12, band, 4)
    _, c1 = certify(bench12, interp, band=band, method="flpork", nodes=128)
    _, c2 = certify(bench12, interp, method="pork")
    assert {c.name for c in c2} == {"mirror_poles", "energy_identity",
                                    "interpolation"}
    assert len(c1) > len(c2)


def test_negative_controls_all_detected(bench12):
    band = FrequencyBand(0.0, 8.93)
    interp = mode_mirror_interp(bench12, band, 4)
    trials = negative_controls(bench12, interp, band, n_trials=6, seed=3,
                               nodes=128)
    assert len(trials) == 6
    assert all(t.detected for t in trials)
    assert {t.perturbed for t in trials} <= {"A", "B", "C"}
    for t in trials:
        assert t.flipped, f"trial {t.index} detected without flipped certs"


def test_helper_predicates():
    ok = Certificate("a", 0.0, 1.0, True)
    bad = Certificate("b", 2.0, 1.0, False)
    unk = Certificate("c", 2.0, 1.0, False, inconclusive=True)
    assert all_passed([ok]) and not all_passed([ok, bad])
    assert any_failed([ok, bad]) and not any_failed([ok, unk])
    assert any_inconclusive([unk]) and not any_inconclusive([ok, bad])
