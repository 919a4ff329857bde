"""Shared fixtures: seeded system factories and interpolation-set builders.

The reduction methods are designed around interpolation points that mirror
lightly damped system poles inside the band of interest, so most tests draw
their points that way instead of from thin air (arbitrary far-out points are
exercised separately where conditioning behaviour is the subject).
"""

import numpy as np
import pytest

from morlim import InterpolationSet, default_directions
from morlim.powergrid import synth_benchmark


def rand_stable(n, m=1, p=1, seed=0, shift=0.5):
    """Dense random stable system: A = G - (abs-row-sum + shift) * I."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    A -= np.diag(np.abs(A).sum(axis=1) + shift)
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    from morlim import StateSpace

    return StateSpace(A, B, C)


def mode_mirror_interp(sysm, band, r, side="input", min_gap=0.05):
    """r interpolation points mirroring r/2 well-separated in-band pole pairs.

    Points come in conjugate pairs sigma = -conj(lambda) for poles lambda with
    omega_lo < Im(lambda) < omega_hi, picked greedily by spacing so the
    pseudo-Gramian stays well conditioned.
    """
    lam = np.linalg.eigvals(sysm.A)
    cand = lam[lam.imag > 1e-8]
    inband = cand[
        (cand.imag > band.omega_lo + 1e-6) & (cand.imag < band.omega_hi - 1e-6)
    ]
    inband = inband[np.argsort(inband.imag)]
    if 2 * len(inband) < r:
        raise RuntimeError(f"only {len(inband)} in-band pairs, need {r // 2}")
    picked = [inband[0]]
    for z in inband[1:]:
        if len(picked) == r // 2:
            break
        if abs(z - picked[-1]) > min_gap:
            picked.append(z)
    if len(picked) < r // 2:
        picked = list(inband[: r // 2])
    pts = []
    for z in picked:
        s = -np.conj(z)
        pts.extend([s, np.conj(s)])
    pts = np.array(pts)
    dirs = default_directions(sysm, pts, side)
    return InterpolationSet(pts, dirs, side)


def certification_ensemble():
    """The 20-system ensemble the acceptance certificate suites run on.

    n walks 8..36 in steps of 4; every third system is 2x2 MIMO; reduced
    order alternates between 4 and 6.
    """
    out = []
    for t in range(20):
        n = 8 + 4 * (t % 8)
        mimo = t % 3 == 2
        m = pq = 2 if mimo else 1
        sysm = synth_benchmark(n, seed=100 + t, n_inputs=m, n_outputs=pq)
        r = 4 if t % 2 == 0 else 6
        out.append((t, sysm, r))
    return out


@pytest.fixture
def bench12():
    return synth_benchmark(12, seed=7)


@pytest.fixture
def bench12_mimo():
    return synth_benchmark(12, seed=11, n_inputs=2, n_outputs=2)
