"""Swing-equation fixtures: equilibrium, linearization, synthetic networks.

The single-machine/infinite-bus closed form used below:
    A = [[0, 1], [-k w_s cos(d0) / (2H), -D w_s / (2H)]],   k = E Vbar Bbar
so the characteristic polynomial is s^2 + (D w_s / 2H) s + k w_s cos(d0)/2H.
"""

import numpy as np
import pytest

from morlim import (
    NoConvergence,
    is_stable,
    select_modes,
)
from morlim.powergrid import (
    Equilibrium,
    MachineParams,
    NetworkModel,
    electrical_power,
    linearize_classical,
    solve_equilibrium,
    swing_rhs,
    synth_benchmark,
    synth_network,
)


def smib(H=4.0, D=0.01, E=1.05, Bbar=0.9, Vbar=1.0, T=0.0):
    return NetworkModel([MachineParams(H=H, D=D, E=E, T=T)],
                        Y_gen=[[0.0]], Y_boundary=[[1j * Bbar]],
                        boundary_V=[Vbar], boundary_theta=[0.0])


def random_net(n, seed, n_boundary=1):
    """Small random lossless-coupled network with a consistent torque set."""
    rng = np.random.default_rng(seed)
    Bsus = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            b = rng.uniform(0.5, 1.2)
            Bsus[i, j] = Bsus[j, i] = b
    Yb = np.zeros((n, n_boundary), dtype=complex)
    Yb[0, :] = 1j * rng.uniform(0.4, 0.8, n_boundary)
    machines = [MachineParams(H=rng.uniform(3, 6), D=rng.uniform(0.001, 0.01),
                              E=rng.uniform(0.95, 1.1), T=0.0)
                for _ in range(n)]
    net = NetworkModel(machines, 1j * Bsus, Yb,
                       np.ones(n_boundary), np.zeros(n_boundary))
    target = rng.uniform(-0.2, 0.2, n)
    for m, p in zip(net.machines, electrical_power(net, target)):
        m.T = float(p)
    return net, target


# ---------------------------------------------------------------------------
# equilibrium


def test_equilibrium_lossless_balance_at_zero():
    # lossless tie transfers nothing at delta = 0, so T = 0 balances there
    eq = solve_equilibrium(smib())
    assert eq.delta[0] == 0.0
    assert eq.residual <= 1e-8
    assert eq.iterations == 0


def test_equilibrium_symmetric_pair_has_equal_angles():
    rng = np.random.default_rng(1)
    m = MachineParams(H=4.0, D=0.005, E=1.0, T=0.0)
    net = NetworkModel([m, MachineParams(**vars(m))],
                       Y_gen=[[0.0, 1j * 0.8], [1j * 0.8, 0.0]],
                       Y_boundary=[[0.4 + 0.9j], [0.4 + 0.9j]],
                       boundary_V=[1.0], boundary_theta=[0.0])
    target = np.array([0.3, 0.3])
    for mm, p in zip(net.machines, electrical_power(net, target)):
        mm.T = float(p)
    eq = solve_equilibrium(net, guess=np.array([0.3, 0.42]))
    assert abs(eq.delta[0] - eq.delta[1]) <= 1e-10
    assert eq.residual <= 1e-8


def test_equilibrium_random_three_machine_residual():
    for seed in range(5):
        net, target = random_net(3, seed=90 + seed)
        guess = target.copy()
        guess[1:] += 0.05
        eq = solve_equilibrium(net, guess=guess)
        # direct evaluation, not the solver's own residual field
        res = np.abs(net.T - electrical_power(net, eq.delta)).max()
        assert res <= 1e-8, f"seed {seed}: {res:.2e}"


def test_equilibrium_pins_first_angle():
    net, target = random_net(3, seed=97)
    guess = target.copy()
    guess[1:] += 0.03
    eq = solve_equilibrium(net, guess=guess)
    assert eq.delta[0] == guess[0]


def test_equilibrium_reports_nonconvergence():
    net, _ = random_net(3, seed=98)
    for m in net.machines:
        m.T = m.T + 10.0  # infeasible torque
    with pytest.raises(NoConvergence):
        solve_equilibrium(net)


# ---------------------------------------------------------------------------
# linearization


def test_linearize_smib_closed_form():
    H, D, E, Bbar, Vbar = 4.0, 0.01, 1.05, 0.9, 1.0
    net = smib(H=H, D=D, E=E, Bbar=Bbar, Vbar=Vbar)
    eq = solve_equilibrium(net)
    sysm = linearize_classical(net, eq)
    ws = net.omega_s
    k = E * Vbar * Bbar
    A_hand = np.array([[0.0, 1.0],
                       [-k * ws * np.cos(eq.delta[0]) / (2 * H),
                        -D * ws / (2 * H)]])
    assert np.abs(sysm.A - A_hand).max() <= 1e-12
    lam = np.sort_complex(np.linalg.eigvals(sysm.A))
    lam_hand = np.sort_complex(np.roots([1.0, D * ws / (2 * H),
                                         k * ws / (2 * H)]))
    assert np.abs(lam - lam_hand).max() <= 1e-10


def test_linearize_undamped_spectrum_is_imaginary():
    net = smib(D=0.0)
    sysm = linearize_classical(net, solve_equilibrium(net))
    lam = np.linalg.eigvals(sysm.A)
    k = 1.05 * 1.0 * 0.9
    w = np.sqrt(k * net.omega_s / (2 * 4.0))
    assert np.abs(lam.real).max() <= 1e-12
    assert np.abs(np.sort(lam.imag) - np.array([-w, w])).max() <= 1e-10


def fd_jacobian(f, x0, h=1e-6):
    n = x0.size
    f0 = f(x0)
    J = np.zeros((f0.size, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        J[:, k] = (f(x0 + e) - f(x0 - e)) / (2 * h)
    return J


def test_linearize_matches_finite_differences():
    for seed in range(3):
        net, target = random_net(3, seed=110 + seed)
        eq = solve_equilibrium(net, guess=target)
        sysm = linearize_classical(net, eq)
        x0 = np.concatenate([eq.delta, np.zeros(3)])
        u0 = np.zeros(2 * net.n_boundary)

        J_A = fd_jacobian(lambda x: swing_rhs(net, x, u0), x0)
        rel_A = np.abs(J_A - sysm.A).max() / max(np.abs(sysm.A).max(), 1.0)
        assert rel_A <= 1e-6, f"seed {seed}: A mismatch {rel_A:.2e}"

        J_B = fd_jacobian(lambda u: swing_rhs(net, x0, u), u0)
        rel_B = np.abs(J_B - sysm.B).max() / max(np.abs(sysm.B).max(), 1.0)
        assert rel_B <= 1e-6, f"seed {seed}: B mismatch {rel_B:.2e}"


def test_rhs_vanishes_at_equilibrium():
    net, target = random_net(3, seed=115)
    eq = solve_equilibrium(net, guess=target)
    rhs = swing_rhs(net, np.concatenate([eq.delta, np.zeros(3)]))
    assert np.abs(rhs).max() <= 1e-7


# ---------------------------------------------------------------------------
# synthetic generators


def test_synth_network_deterministic():
    n1, d1 = synth_network(8, seed=5)
    n2, d2 = synth_network(8, seed=5)
    assert np.array_equal(n1.Y_gen, n2.Y_gen)
    assert np.array_equal(n1.Y_boundary, n2.Y_boundary)
    assert np.array_equal(d1, d2)
    assert np.array_equal(n1.T, n2.T)


def test_synth_network_order_32():
    net, delta = synth_network(16, seed=0)
    eq = solve_equilibrium(net, guess=delta)
    sysm = linearize_classical(net, eq)
    assert sysm.order == 32
    assert is_stable(sysm)


def test_synth_network_has_window_modes():
    net, delta = synth_network(16, seed=0)
    sysm = linearize_classical(net, solve_equilibrium(net, guess=delta))
    sel = select_modes(sysm, 0.1, 2.0, 0.05)
    assert sel.size >= 2


def test_synth_network_rejects_odd_or_tiny():
    with pytest.raises(ValueError):
        synth_network(1)
    with pytest.raises(ValueError):
        synth_network(7)


def test_synth_benchmark_deterministic_and_stable():
    s1 = synth_benchmark(12, seed=2)
    s2 = synth_benchmark(12, seed=2)
    assert np.array_equal(s1.A, s2.A)
    assert np.array_equal(s1.B, s2.B)
    assert np.array_equal(s1.C, s2.C)
    assert is_stable(s1)


def test_synth_benchmark_rejects_tiny():
    with pytest.raises(ValueError):
        synth_benchmark(3)
