"""Classical swing-equation fixtures.

A network of synchronous machines behind constant-voltage internal nodes,
coupled through a reduced admittance matrix and to a handful of boundary
buses whose voltage magnitude and angle act as exogenous inputs.  The
module provides the nonlinear swing dynamics, an equilibrium solver, the
analytic linearization used by the reduction methods, and two synthetic
generators: a two-cluster machine network with a weak inter-tie (so it
exhibits a genuine interarea mode) and a directly constructed modal
benchmark with prescribed damping ratios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotSymmetric
from .ltimodel import StateSpace

NEWTON_TOL = 1e-8
NEWTON_MAXITER = 50


@dataclass
class MachineParams:
    """One classical machine: inertia H [s], damping D [pu torque / (rad/s)],
    internal EMF magnitude E [pu], mechanical power T [pu]."""

    H: float
    D: float
    E: float
    T: float


@dataclass
class Equilibrium:
    delta: np.ndarray
    residual: float
    iterations: int


class NetworkModel:
    """Machines + reduced admittance + boundary buses.

    ``Y_gen`` is the (complex, symmetric) admittance among machine internal
    nodes; ``Y_boundary`` couples machines to the boundary buses, whose
    operating voltage/angle are ``boundary_V`` / ``boundary_theta``.
    """

    def __init__(self, machines, Y_gen, Y_boundary, boundary_V,
                 boundary_theta, omega_s=2.0 * np.pi * 60.0):
        self.machines = list(machines)
        self.Y_gen = np.asarray(Y_gen, dtype=complex)
        self.Y_boundary = np.atleast_2d(np.asarray(Y_boundary, dtype=complex))
        self.boundary_V = np.atleast_1d(np.asarray(boundary_V, dtype=float))
        self.boundary_theta = np.atleast_1d(np.asarray(boundary_theta, dtype=float))
        self.omega_s = float(omega_s)

        n = len(self.machines)
        if self.Y_gen.shape != (n, n):
            raise DimensionMismatch(
                f"Y_gen must be {n}x{n}, got {self.Y_gen.shape}"
            )
        if np.abs(self.Y_gen - self.Y_gen.T).max() > 1e-10 * max(
                1.0, np.abs(self.Y_gen).max()):
            raise NotSymmetric("Y_gen must be symmetric")
        nb = self.boundary_V.size
        if self.Y_boundary.shape != (n, nb):
            raise DimensionMismatch(
                f"Y_boundary must be {n}x{nb}, got {self.Y_boundary.shape}"
            )
        if self.boundary_theta.size != nb:
            raise DimensionMismatch("boundary_V and boundary_theta disagree")
        for arr in (self.Y_gen, self.Y_boundary):
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError("network matrices must be finite")

    # -- convenience views ------------------------------------------------

    @property
    def n_machines(self):
        return len(self.machines)

    @property
    def n_boundary(self):
        return self.boundary_V.size

    @property
    def H(self):
        return np.array([m.H for m in self.machines])

    @property
    def D(self):
        return np.array([m.D for m in self.machines])

    @property
    def E(self):
        return np.array([m.E for m in self.machines])

    @property
    def T(self):
        return np.array([m.T for m in self.machines])

    def boundary_machines(self):
        """Indices of machines with a direct tie to any boundary bus."""
        return np.flatnonzero(np.abs(self.Y_boundary).sum(axis=1) > 0.0)

    # -- serialization -----------------------------------------------------

    def to_dict(self):
        def c2j(M):
            return [[[float(z.real), float(z.imag)] for z in row] for row in M]

        return {
            "omega_s": self.omega_s,
            "machines": [
                {"H": m.H, "D": m.D, "E": m.E, "T": m.T} for m in self.machines
            ],
            "Y_gen": c2j(self.Y_gen),
            "Y_boundary": c2j(self.Y_boundary),
            "boundary_V": [float(v) for v in self.boundary_V],
            "boundary_theta": [float(t) for t in self.boundary_theta],
        }

    @classmethod
    def from_dict(cls, d):
        def j2c(rows):
            return np.array(
                [[complex(re, im) for re, im in row] for row in rows]
            )

        machines = [
            MachineParams(H=m["H"], D=m["D"], E=m["E"], T=m["T"])
            for m in d["machines"]
        ]
        return cls(
            machines=machines,
            Y_gen=j2c(d["Y_gen"]),
            Y_boundary=j2c(d["Y_boundary"]),
            boundary_V=d["boundary_V"],
            boundary_theta=d["boundary_theta"],
            omega_s=d["omega_s"],
        )


# ---------------------------------------------------------------------------
# nonlinear model


def electrical_power(net, delta, theta=None, V=None):
    """Active power injected at each machine's internal node.

    ``theta``/``V`` override the boundary operating point (used to apply
    input deviations)."""
    delta = np.asarray(delta, dtype=float)
    if theta is None:
        theta = net.boundary_theta
    if V is None:
        V = net.boundary_V
    E = net.E
    G, B = net.Y_gen.real, net.Y_gen.imag
    dij = delta[:, None] - delta[None, :]
    P = E * ((G * np.cos(dij) + B * np.sin(dij)) @ E)
    Gb, Bb = net.Y_boundary.real, net.Y_boundary.imag
    dib = delta[:, None] - np.asarray(theta)[None, :]
    P += E * ((Gb * np.cos(dib) + Bb * np.sin(dib)) @ np.asarray(V))
    return P


def power_jacobians(net, delta, theta=None, V=None):
    """Partial derivatives of :func:`electrical_power`: (K, P_theta, P_V)
    with K = dP/d delta, P_theta = dP/d theta, P_V = dP/d Vbar."""
    delta = np.asarray(delta, dtype=float)
    if theta is None:
        theta = net.boundary_theta
    if V is None:
        V = net.boundary_V
    theta = np.asarray(theta, dtype=float)
    V = np.asarray(V, dtype=float)
    E = net.E
    G, B = net.Y_gen.real, net.Y_gen.imag
    dij = delta[:, None] - delta[None, :]
    # off-diagonal entries, then the diagonal as minus their row sums plus
    # the boundary stiffness
    K = (E[:, None] * E[None, :]) * (G * np.sin(dij) - B * np.cos(dij))
    np.fill_diagonal(K, 0.0)
    Gb, Bb = net.Y_boundary.real, net.Y_boundary.imag
    dib = delta[:, None] - theta[None, :]
    bnd = E * ((-Gb * np.sin(dib) + Bb * np.cos(dib)) @ V)
    np.fill_diagonal(K, -K.sum(axis=1) + bnd)
    P_theta = (E[:, None] * V[None, :]) * (Gb * np.sin(dib) - Bb * np.cos(dib))
    P_V = E[:, None] * (Gb * np.cos(dib) + Bb * np.sin(dib))
    return K, P_theta, P_V


def swing_rhs(net, x, u=None):
    """Right-hand side of the classical swing model.

    State ``x = [delta; omega]`` with omega the speed deviation in rad/s;
    input ``u = [d theta; d Vbar]`` perturbs the boundary operating point.
    """
    n = net.n_machines
    x = np.asarray(x, dtype=float)
    if x.size != 2 * n:
        raise DimensionMismatch(f"state must have length {2 * n}, got {x.size}")
    delta, omega = x[:n], x[n:]
    nb = net.n_boundary
    theta, V = net.boundary_theta, net.boundary_V
    if u is not None:
        u = np.asarray(u, dtype=float)
        if u.size != 2 * nb:
            raise DimensionMismatch(f"input must have length {2 * nb}")
        theta = theta + u[:nb]
        V = V + u[nb:]
    Pe = electrical_power(net, delta, theta=theta, V=V)
    M = net.omega_s / (2.0 * net.H)
    return np.concatenate([omega, M * (net.T - Pe - net.D * omega)])


def solve_equilibrium(net, guess=None):
    """Newton solve of the power balance ``T = Pe(delta)``.

    The first machine's angle is pinned at its guess value (the model is
    otherwise invariant only up to the boundary coupling, and pinning keeps
    the iteration well-posed); the remaining angles are Newton-updated.
    Convergence is judged on the **full** residual, so an inconsistent
    torque vector is reported as :class:`NoConvergence` rather than
    silently projected away.
    """
    n = net.n_machines
    delta = np.zeros(n) if guess is None else np.asarray(guess, dtype=float).copy()
    if delta.size != n:
        raise DimensionMismatch(f"guess must have length {n}")
    for it in range(NEWTON_MAXITER + 1):
        f = net.T - electrical_power(net, delta)
        res = float(np.abs(f).max())
        if res <= NEWTON_TOL:
            return Equilibrium(delta=delta, residual=res, iterations=it)
        if it == NEWTON_MAXITER:
            break
        K, _, _ = power_jacobians(net, delta)
        # f = T - Pe, so df/d delta = -K; step solves f + J step = 0
        step = np.linalg.solve(K[1:, 1:], f[1:])
        delta[1:] += step
    raise NoConvergence(
        f"power-balance Newton stalled at residual {res:.3e} "
        f"after {NEWTON_MAXITER} iterations"
    )


def linearize_classical(net, eq):
    """State-space linearization at an equilibrium.

    States ``[d delta; d omega]``, inputs ``[d theta; d Vbar]`` at the
    boundary buses, outputs the angle deviations of the machines that are
    directly tied to a boundary bus.
    """
    delta = eq.delta if isinstance(eq, Equilibrium) else np.asarray(eq, dtype=float)
    n = net.n_machines
    nb = net.n_boundary
    K, P_theta, P_V = power_jacobians(net, delta)
    M = net.omega_s / (2.0 * net.H)
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = np.eye(n)
    A[n:, :n] = -M[:, None] * K
    A[n:, n:] = -np.diag(M * net.D)
    B = np.zeros((2 * n, 2 * nb))
    B[n:, :nb] = -M[:, None] * P_theta
    B[n:, nb:] = -M[:, None] * P_V
    sel = net.boundary_machines()
    C = np.zeros((sel.size, 2 * n))
    for k, i in enumerate(sel):
        C[k, i] = 1.0
    return StateSpace(A, B, C)


# ---------------------------------------------------------------------------
# synthetic fixtures


def _cluster_edges(members):
    """Ring plus two chords inside one cluster."""
    k = len(members)
    edges = [(members[i], members[(i + 1) % k]) for i in range(k)]
    if k >= 5:
        edges.append((members[0], members[k // 2 - 1]))
        edges.append((members[2], members[k - 2]))
    return edges


def synth_network(n_machines=16, seed=0, n_boundary=1):
    """Two-cluster machine network with a weak inter-tie.

    Half the machines form each cluster; intra-cluster susceptances are
    strong, the single tie between the clusters is an order of magnitude
    weaker, which produces a lightly damped interarea mode well below the
    local machine oscillations.  Machine 0 and 1 are tied to the first
    boundary bus.  Mechanical power is chosen so the drawn angles are an
    exact equilibrium.
    """
    if n_machines < 4 or n_machines % 2:
        raise ValueError("need an even machine count >= 4")
    rng = np.random.default_rng(seed)
    n = n_machines
    half = n // 2

    Bsus = np.zeros((n, n))
    for cluster in (range(half), range(half, n)):
        for i, j in _cluster_edges(list(cluster)):
            b = rng.uniform(0.8, 1.5)
            Bsus[i, j] += b
            Bsus[j, i] += b
    # weak tie between the cluster midpoints
    i, j = half // 2, half + half // 2
    b = 0.15 * rng.uniform(0.9, 1.1)
    Bsus[i, j] += b
    Bsus[j, i] += b

    Yb = np.zeros((n, n_boundary), dtype=complex)
    tied = [0, 1]
    for k in range(n_boundary):
        for i in tied:
            Yb[i, k] = 1j * rng.uniform(0.4, 0.8)

    # electrically plausible diagonal; it does not enter the dynamics
    diag = -(Bsus.sum(axis=1) + np.abs(Yb.imag).sum(axis=1))
    Ygen = 1j * (Bsus + np.diag(diag))

    machines = []
    for i in range(n):
        machines.append(MachineParams(
            H=rng.uniform(2.5, 6.0),
            D=rng.uniform(0.0008, 0.002),
            E=rng.uniform(0.95, 1.1),
            T=0.0,
        ))
    net = NetworkModel(
        machines=machines,
        Y_gen=Ygen,
        Y_boundary=Yb,
        boundary_V=np.ones(n_boundary),
        boundary_theta=np.zeros(n_boundary),
    )
    delta_star = rng.uniform(-0.15, 0.15, size=n)
    delta_star[0] = 0.0
    Pe = electrical_power(net, delta_star)
    for m, p in zip(net.machines, Pe):
        m.T = float(p)
    return net, delta_star


def synth_benchmark(n, seed=0, damping_profile=(0.02, 0.3),
                    n_inputs=1, n_outputs=1):
    """Directly constructed modal test model.

    Eigenvalues are laid out as damped oscillatory pairs with frequencies
    log-spaced between 0.1 and 5 Hz and damping ratios drawn from
    ``damping_profile``; two pairs (at roughly 0.45 and 0.95 Hz) are forced
    to be lightly damped so a low-frequency, low-damping mode window always
    has something to select.  The block-diagonal real form is hidden behind
    a random orthogonal change of basis.
    """
    if n < 4:
        raise ValueError("need order >= 4")
    rng = np.random.default_rng(seed)
    z_lo, z_hi = damping_profile
    z_lo = min(max(z_lo, 1e-4), 0.9)
    z_hi = min(max(z_hi, z_lo), 0.9)
    n_pairs = n // 2
    freqs = np.geomspace(0.1, 5.0, n_pairs) * rng.uniform(0.9, 1.1, n_pairs)
    zetas = rng.uniform(z_lo, z_hi, n_pairs)
    forced = min(z_lo, 0.04)
    freqs[np.argmin(np.abs(freqs - 0.45))] = 0.45
    freqs[np.argmin(np.abs(freqs - 0.95))] = 0.95
    zetas[np.argmin(np.abs(freqs - 0.45))] = forced
    zetas[np.argmin(np.abs(freqs - 0.95))] = forced

    blocks = []
    for f, z in zip(freqs, zetas):
        w0 = 2.0 * np.pi * f
        a, b = -z * w0, w0 * np.sqrt(1.0 - z * z)
        blocks.append(np.array([[a, b], [-b, a]]))
    if n % 2:
        blocks.append(np.array([[-2.0 * np.pi * 2.5]]))
    import scipy.linalg as spla
    Ablk = spla.block_diag(*blocks)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = Q @ Ablk @ Q.T
    B = rng.standard_normal((n, n_inputs))
    C = rng.standard_normal((n_outputs, n))
    return StateSpace(A, B, C)
