"""Report figures (headless matplotlib).

Four figure types back the CLI reports: a magnitude-response overlay, the
error response against the band, a pole map, and a multi-method comparison.
All functions take precomputed data and a target path; nothing here touches
the reduction code.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

_RC = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.framealpha": 0.8,
}


def _shade_band(ax, band, omega):
    lo = band.omega_lo if band.omega_lo > 0 else float(np.min(omega))
    ax.axvspan(lo, band.omega_hi, color="tab:olive", alpha=0.15,
               label="frequency band")


def plot_spectrum(path, omega, curves, band=None):
    """Largest singular value of one or more transfer functions over a
    frequency grid.  ``curves`` maps label -> values."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for label, vals in curves.items():
            ax.loglog(omega, vals, label=label)
        if band is not None:
            _shade_band(ax, band, omega)
        ax.set_xlabel(r"$\omega$ [rad/s]")
        ax.set_ylabel(r"$\sigma_{\max}(G(j\omega))$")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_error_response(path, omega, err_curves, band=None):
    """Error-system magnitude for one or more reduced models."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for label, vals in err_curves.items():
            ax.loglog(omega, np.maximum(vals, 1e-300), label=label)
        if band is not None:
            _shade_band(ax, band, omega)
        ax.set_xlabel(r"$\omega$ [rad/s]")
        ax.set_ylabel(r"$\sigma_{\max}(G - G_r)(j\omega)$")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_poles(path, pole_sets, band=None):
    """Pole map; ``pole_sets`` maps label -> complex array."""
    markers = ["x", "o", "s", "D", "^"]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for k, (label, poles) in enumerate(pole_sets.items()):
            poles = np.asarray(poles, dtype=complex)
            filled = markers[k % len(markers)] not in ("x", "+")
            ax.scatter(poles.real, poles.imag,
                       marker=markers[k % len(markers)],
                       s=36, label=label,
                       facecolors="none" if filled else None,
                       edgecolors=None if not filled else f"C{k}",
                       color=None if filled else f"C{k}")
        if band is not None:
            for w in (band.omega_lo, band.omega_hi):
                if w > 0:
                    ax.axhline(w, color="tab:olive", lw=0.8, ls="--", alpha=0.7)
                    ax.axhline(-w, color="tab:olive", lw=0.8, ls="--", alpha=0.7)
        ax.axvline(0.0, color="k", lw=0.6)
        ax.set_xlabel(r"Re $\lambda$")
        ax.set_ylabel(r"Im $\lambda$")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_compare(path, omega, full_curve, err_curves, band=None):
    """Full response plus the per-method error curves, one panel each."""
    with plt.rc_context(_RC):
        fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True,
                                       figsize=(7.0, 6.0))
        ax0.loglog(omega, full_curve, color="k", label="full model")
        if band is not None:
            _shade_band(ax0, band, omega)
        ax0.set_ylabel(r"$\sigma_{\max}(G)$")
        ax0.legend(loc="best")
        for label, vals in err_curves.items():
            ax1.loglog(omega, np.maximum(vals, 1e-300), label=label)
        if band is not None:
            _shade_band(ax1, band, omega)
        ax1.set_xlabel(r"$\omega$ [rad/s]")
        ax1.set_ylabel(r"$\sigma_{\max}(G - G_r)$")
        ax1.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
