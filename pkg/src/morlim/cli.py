"""Command-line interface.

Subcommands::

    morlim synth    --kind network|benchmark --n 16 --seed 0 --out DIR
    morlim reduce   MODELDIR --config cfg.json --out DIR
    morlim verify   MODELDIR --config cfg.json [--out DIR] [--negative-controls N]
    morlim compare  MODELDIR --config cfg.json --out DIR

Models are directories holding A.mtx / B.mtx / C.mtx.  Configuration is a
JSON file; every field has a default.  Exit codes: 0 success, 1 certificate
or control failure, 2 usage/configuration/IO error, 3 numerical failure,
4 certificates inconclusive without any outright failure.

The MORLIM_LOG environment variable ({error, info, debug}) controls
diagnostic verbosity on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys as _sys
from dataclasses import dataclass, field

import numpy as np

from . import fileio, ltimodel, plots, powergrid, reduction, verify
from .errors import BadInterpolationSet, MorlimError
from .matfun import FrequencyBand

log = logging.getLogger("morlim")

DEFAULT_BAND = (0.0, 8.93)
_CONFIG_KEYS = {
    "method", "band", "order", "interpolation", "nodes", "seed",
    "kappa_threshold",
}
_METHODS = ("flpork", "oflpork", "pork", "flbt", "modal")


@dataclass
class RunConfig:
    method: str = "flpork"
    band: tuple = DEFAULT_BAND
    order: int | None = None
    interpolation: dict = field(default_factory=lambda: {
        "mode": "mode_window", "f_lo": 0.1, "f_hi": 2.0, "zeta_max": 0.05,
    })
    nodes: int = 256
    seed: int = 0
    kappa_threshold: float = 1e8
    #: True when the band came from the config file rather than the default;
    #: mode_window runs derive their band from the selection otherwise.
    band_explicit: bool = False

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls()
        if "method" in d:
            if d["method"] not in _METHODS:
                raise ValueError(
                    f"method must be one of {_METHODS}, got {d['method']!r}"
                )
            cfg.method = d["method"]
        if "band" in d:
            b = d["band"]
            if not (isinstance(b, (list, tuple)) and len(b) == 2):
                raise ValueError("band must be a [lo, hi] pair")
            cfg.band = (float(b[0]), float(b[1]))
            cfg.band_explicit = True
        if "order" in d and d["order"] is not None:
            cfg.order = int(d["order"])
            if cfg.order < 1:
                raise ValueError("order must be positive")
        if "interpolation" in d:
            ic = d["interpolation"]
            if not isinstance(ic, dict) or "mode" not in ic:
                raise ValueError("interpolation must be an object with a mode")
            if ic["mode"] not in ("explicit", "mode_window"):
                raise ValueError(
                    f"interpolation mode must be explicit or mode_window, "
                    f"got {ic['mode']!r}"
                )
            cfg.interpolation = dict(ic)
        if "nodes" in d:
            cfg.nodes = int(d["nodes"])
            if cfg.nodes < 8:
                raise ValueError("nodes must be at least 8")
        if "seed" in d:
            cfg.seed = int(d["seed"])
        if "kappa_threshold" in d:
            cfg.kappa_threshold = float(d["kappa_threshold"])
            if cfg.kappa_threshold <= 1.0:
                raise ValueError("kappa_threshold must exceed 1")
        return cfg


def _setup_logging():
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(
        os.environ.get("MORLIM_LOG", "error").lower(), logging.ERROR)
    logging.basicConfig(
        level=level, stream=_sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


# ---------------------------------------------------------------------------
# config -> interpolation data


def _cplx(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"expected a number or [re, im] pair, got {v!r}")


def _parse_points(raw):
    return np.array([_cplx(p) for p in raw], dtype=complex)


def _parse_directions(raw):
    return np.array([[_cplx(c) for c in row] for row in raw], dtype=complex)


def _selected_poles(sys, cfg):
    """Pole selection for mode_window configs (used by modal reduction and
    as the mirror source for the pseudo-optimal methods)."""
    ic = cfg.interpolation
    sel = reduction.select_modes(
        sys,
        float(ic.get("f_lo", 0.1)),
        float(ic.get("f_hi", 2.0)),
        float(ic.get("zeta_max", 0.05)),
    )
    if sel.size == 0:
        raise BadInterpolationSet(
            "no oscillatory modes qualify for the configured window"
        )
    if cfg.order is not None:
        if cfg.order % 2:
            raise ValueError(
                "mode_window selection works in conjugate pairs; "
                "order must be even"
            )
        if sel.size > cfg.order:
            sel = sel[:cfg.order]
        elif sel.size < cfg.order:
            log.warning(
                "only %d modes qualify; reducing order from %d to %d",
                sel.size, cfg.order, sel.size,
            )
    return sel


def _effective_band(sys, cfg, sel=None):
    """Band for this run.

    An explicit config band always wins.  Otherwise mode_window runs set
    the upper edge to the highest selected mode frequency (the band tracks
    the dynamics under study); anything else keeps the default.
    """
    if cfg.band_explicit or cfg.interpolation.get("mode") != "mode_window":
        return FrequencyBand(*cfg.band)
    if sel is None:
        sel = _selected_poles(sys, cfg)
    hi = float(np.abs(np.asarray(sel).imag).max())
    if hi <= 0.0:
        return FrequencyBand(*cfg.band)
    log.info("band derived from the mode selection: [0, %.6g] rad/s", hi)
    return FrequencyBand(0.0, hi)


def _build_interpolation(sys, cfg, side, sel=None):
    ic = cfg.interpolation
    if ic["mode"] == "mode_window":
        if sel is None:
            sel = _selected_poles(sys, cfg)
        return reduction.mirror_interpolation(sel, sys=sys, side=side)
    pts = _parse_points(ic["points"])
    if "directions" in ic and ic["directions"] is not None:
        dirs = _parse_directions(ic["directions"])
    else:
        dirs = reduction.default_directions(sys, pts, side=side)
    return reduction.InterpolationSet(pts, dirs, side=side)


def _run_method(sys, cfg):
    """Run the configured reduction; returns (report, interp, band)."""
    sel = None
    if cfg.interpolation.get("mode") == "mode_window":
        sel = _selected_poles(sys, cfg)
    band = _effective_band(sys, cfg, sel)
    if cfg.method == "flpork":
        interp = _build_interpolation(sys, cfg, "input", sel)
        return reduction.flpork(sys, interp, band), interp, band
    if cfg.method == "oflpork":
        interp = _build_interpolation(sys, cfg, "output", sel)
        return reduction.oflpork(sys, interp, band), interp, band
    if cfg.method == "pork":
        interp = _build_interpolation(sys, cfg, "input", sel)
        return reduction.pork(sys, interp), interp, band
    if cfg.method == "flbt":
        if cfg.order is None:
            raise ValueError("flbt needs an order in the config")
        return reduction.flbt(sys, cfg.order, band), None, band
    if cfg.method == "modal":
        if sel is None:
            sel = _parse_points(cfg.interpolation["points"])
        return reduction.modal_truncation(sys, sel), None, band
    raise ValueError(f"unknown method {cfg.method!r}")


# ---------------------------------------------------------------------------
# shared output helpers


def _frequency_grid(band):
    g = np.geomspace(1e-2, 1e2, 400)
    extra = np.asarray([band.omega_lo, band.omega_hi])
    return np.unique(np.concatenate([g, extra]))


def _config_dict(cfg, band):
    """Reingestible snapshot of the run configuration (band made explicit)."""
    return {
        "method": cfg.method,
        "band": [band.omega_lo, band.omega_hi],
        "order": cfg.order,
        "interpolation": cfg.interpolation,
        "nodes": cfg.nodes,
        "seed": cfg.seed,
        "kappa_threshold": cfg.kappa_threshold,
    }


def _report_dict(rep, cfg, full_order, band):
    d = {
        "method": rep.method,
        "full_order": full_order,
        "order": rep.rom.order,
        "band": [rep.band.omega_lo, rep.band.omega_hi]
        if rep.band is not None else None,
        "preserved_poles": rep.preserved_poles,
        "rom_stable": rep.rom_stable,
        "gramian_positive_definite": rep.gramian_positive_definite,
        "energy_identity_gap": rep.energy_identity_gap,
        "hankel_values": rep.hankel_values,
        "wall_time_s": rep.wall_time_s,
        "config": _config_dict(cfg, band),
    }
    if rep.interpolation_residuals.size:
        d["interpolation_residual_max"] = float(rep.interpolation_residuals.max())
    return d


def _load_config(path):
    if path is None:
        return RunConfig()
    return RunConfig.from_dict(fileio.read_json(path))


# ---------------------------------------------------------------------------
# subcommands


def _write_rom(out, rom):
    for name, M in (("rom_A", rom.A), ("rom_B", rom.B), ("rom_C", rom.C)):
        fileio.write_matrix(os.path.join(out, f"{name}.mtx"), M)


def _read_rom(romdir):
    mats = [
        fileio.read_matrix(os.path.join(romdir, f"rom_{n}.mtx"))
        for n in ("A", "B", "C")
    ]
    return ltimodel.StateSpace(*mats)


def cmd_reduce(args):
    cfg = _load_config(args.config)
    if args.nodes is not None:
        cfg.nodes = args.nodes
    if args.seed is not None:
        cfg.seed = args.seed
    sys = fileio.read_statespace(args.model)

    if cfg.method in ("flpork", "oflpork", "pork"):
        sel = None
        if cfg.interpolation.get("mode") == "mode_window":
            sel = _selected_poles(sys, cfg)
        band = _effective_band(sys, cfg, sel)
        side = "output" if cfg.method == "oflpork" else "input"
        interp = _build_interpolation(sys, cfg, side, sel)
        rep, certs = verify.certify(
            sys, interp, band, method=cfg.method, nodes=cfg.nodes,
            kappa_threshold=cfg.kappa_threshold,
        )
        if not verify.all_passed(certs):
            log.warning("certificates failed on the fresh reduction; "
                        "see report.json")
    else:
        rep, _interp, band = _run_method(sys, cfg)
        certs = []
    log.info("reduced order %d -> %d with %s", sys.order, rep.rom.order,
             rep.method)

    out = args.out
    os.makedirs(out, exist_ok=True)
    _write_rom(out, rep.rom)
    rd = _report_dict(rep, cfg, sys.order, band)
    rd["certificates"] = [c.to_dict() for c in certs]
    if certs:
        rd["all_passed"] = verify.all_passed(certs)
        rd["inconclusive"] = verify.any_inconclusive(certs)
    fileio.write_json(os.path.join(out, "report.json"), rd)

    grid = _frequency_grid(band)
    err = ltimodel.error_system(sys, rep.rom)
    sf = ltimodel.freq_response_samples(sys, grid)[:, 1]
    sr = ltimodel.freq_response_samples(rep.rom, grid)[:, 1]
    se = ltimodel.freq_response_samples(err, grid)[:, 1]
    fileio.write_csv(
        os.path.join(out, "error_response.csv"),
        ["omega", "sigma_err"],
        zip(grid, se),
    )
    fileio.write_csv(
        os.path.join(out, "response.csv"),
        ["omega", "sigma_full", "sigma_rom", "sigma_err"],
        zip(grid, sf, sr, se),
    )
    plots.plot_spectrum(
        os.path.join(out, "spectrum.png"), grid,
        {"full model": sf, f"{rep.method} (r={rep.rom.order})": sr}, band,
    )
    plots.plot_error_response(
        os.path.join(out, "error_response.png"), grid,
        {rep.method: se}, band,
    )
    plots.plot_poles(
        os.path.join(out, "poles.png"),
        {"full model": ltimodel.poles(sys), rep.method: ltimodel.poles(rep.rom)},
        band,
    )
    print(f"{rep.method}: order {sys.order} -> {rep.rom.order}, "
          f"outputs in {out}")
    return 0


def cmd_verify(args):
    if args.config is not None:
        cfg = _load_config(args.config)
    elif args.rom and os.path.exists(os.path.join(args.rom, "report.json")):
        # re-check an existing reduce output against its recorded run config
        stored = fileio.read_json(os.path.join(args.rom, "report.json"))
        cfg = RunConfig.from_dict(stored.get("config", {}))
    else:
        cfg = RunConfig()
    if args.nodes is not None:
        cfg.nodes = args.nodes
    sys = fileio.read_statespace(args.model)
    if cfg.method not in ("flpork", "oflpork", "pork"):
        raise ValueError(
            "verify covers the pseudo-optimal methods "
            "(flpork, oflpork, pork)"
        )
    rom = _read_rom(args.rom) if args.rom else None
    side = "output" if cfg.method == "oflpork" else "input"
    sel = None
    if cfg.interpolation.get("mode") == "mode_window":
        sel = _selected_poles(sys, cfg)
    band = _effective_band(sys, cfg, sel)
    interp = _build_interpolation(sys, cfg, side, sel)
    rep, certs = verify.certify(
        sys, interp, band, method=cfg.method, nodes=cfg.nodes,
        kappa_threshold=cfg.kappa_threshold, rom=rom,
    )

    for c in certs:
        status = "PASS" if c.passed else "FAIL"
        if c.inconclusive:
            status = "INCONCLUSIVE"
        line = f"{status:12s} {c.name:32s} measured={c.measured:.3e} bound={c.bound:.3e}"
        print(line)
        if c.context:
            log.info("%s: %s", c.name, c.context)

    controls = None
    if args.negative_controls:
        controls = verify.negative_controls(
            sys, interp, band, n_trials=args.negative_controls,
            seed=cfg.seed, nodes=cfg.nodes, method=cfg.method,
        )
        detected = sum(t.detected for t in controls)
        print(f"negative controls: {detected}/{len(controls)} detected")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        fileio.write_json(
            os.path.join(args.out, "certificates.json"),
            [c.to_dict() for c in certs],
        )
        rd = _report_dict(rep, cfg, sys.order, band)
        rd["certificates"] = [c.to_dict() for c in certs]
        rd["all_passed"] = verify.all_passed(certs)
        rd["inconclusive"] = verify.any_inconclusive(certs)
        if controls is not None:
            rd["negative_controls"] = [
                {"index": t.index, "perturbed": t.perturbed,
                 "flipped": t.flipped, "detected": t.detected}
                for t in controls
            ]
        fileio.write_json(os.path.join(args.out, "report.json"), rd)

    if verify.any_failed(certs):
        return 1
    if controls is not None and not all(t.detected for t in controls):
        return 1
    if verify.any_inconclusive(certs):
        return 4
    return 0


def cmd_synth(args):
    if args.kind == "network" and args.n < 2:
        raise ValueError("a machine network needs at least 2 machines")
    if args.kind == "benchmark" and args.n < 2:
        raise ValueError("benchmark order must be at least 2")
    os.makedirs(args.out, exist_ok=True)
    if args.kind == "network":
        net, delta_star = powergrid.synth_network(args.n, seed=args.seed)
        eq = powergrid.solve_equilibrium(net, delta_star)
        sys = powergrid.linearize_classical(net, eq)
        fileio.write_json(os.path.join(args.out, "network.json"), net.to_dict())
        fileio.write_json(os.path.join(args.out, "equilibrium.json"), {
            "delta": eq.delta, "residual": eq.residual,
            "iterations": eq.iterations,
        })
    else:
        sys = powergrid.synth_benchmark(args.n, seed=args.seed)
    fileio.write_statespace(args.out, sys)
    lam = np.sort_complex(ltimodel.poles(sys))
    fileio.write_csv(
        os.path.join(args.out, "spectrum.csv"),
        ["re", "im", "freq_hz", "damping_ratio"],
        (
            (z.real, z.imag, abs(z.imag) / (2.0 * np.pi),
             -z.real / max(abs(z), 1e-300))
            for z in lam
        ),
    )
    print(f"wrote order-{sys.order} {args.kind} model to {args.out}")
    return 0


def _preserves_selection(rom, sel, scale):
    """True when every selected pole appears among the ROM poles."""
    lam = ltimodel.poles(rom)
    worst = max(
        float(np.abs(np.asarray(lam) - z).min()) for z in np.asarray(sel)
    )
    return worst <= 1e-6 * scale


def cmd_compare(args):
    cfg = _load_config(args.config)
    if cfg.order is None:
        raise ValueError("compare needs an order in the config")
    if cfg.interpolation.get("mode") != "mode_window":
        raise ValueError("compare selects its points from a mode window; "
                         "set interpolation.mode = mode_window")
    sys = fileio.read_statespace(args.model)
    if cfg.order >= sys.order:
        raise ValueError(
            f"compare needs order < full order {sys.order}, got {cfg.order}"
        )
    sel = _selected_poles(sys, cfg)
    band = _effective_band(sys, cfg, sel)
    interp = reduction.mirror_interpolation(sel, sys=sys, side="input")
    scale = float(np.abs(sel).max())

    reps = {
        "flpork": reduction.flpork(sys, interp, band),
        "pork": reduction.pork(sys, interp),
        "flbt": reduction.flbt(sys, sel.size, band),
        "modal": reduction.modal_truncation(sys, sel),
    }

    grid = _frequency_grid(band)
    sf = ltimodel.freq_response_samples(sys, grid)[:, 1]
    header = ["omega", "full"]
    cols = [grid, sf]
    err_curves = {}
    rows = {}
    for name, rep in reps.items():
        err = ltimodel.error_system(sys, rep.rom)
        sr = ltimodel.freq_response_samples(rep.rom, grid)[:, 1]
        se = ltimodel.freq_response_samples(err, grid)[:, 1]
        header += [name, f"err_{name}"]
        cols += [sr, se]
        err_curves[name] = se
        rows[name] = {
            "order": rep.rom.order,
            "h2w_error": ltimodel.h2w_norm(err, band)
            if rep.rom_stable else float("nan"),
            "h2_error": ltimodel.h2_norm(err)
            if rep.rom_stable else float("nan"),
            "preserves_selected_modes": _preserves_selection(
                rep.rom, sel, scale),
            "rom_stable": rep.rom_stable,
            "wall_time_s": rep.wall_time_s,
        }

    os.makedirs(args.out, exist_ok=True)
    fileio.write_csv(
        os.path.join(args.out, "compare.csv"),
        ["method", "order", "h2w_error", "h2_error",
         "preserves_selected_modes", "rom_stable", "wall_time_s"],
        (
            (name, r["order"], r["h2w_error"], r["h2_error"],
             r["preserves_selected_modes"], r["rom_stable"], r["wall_time_s"])
            for name, r in rows.items()
        ),
    )
    fileio.write_csv(
        os.path.join(args.out, "compare_response.csv"), header, zip(*cols))
    plots.plot_compare(os.path.join(args.out, "compare.png"), grid, sf,
                       err_curves, band)
    fileio.write_json(os.path.join(args.out, "report.json"), {
        "band": [band.omega_lo, band.omega_hi],
        "selected_modes": sel,
        "methods": rows,
        "config": _config_dict(cfg, band),
    })
    for name, r in rows.items():
        print(f"{name:8s} r={r['order']:3d} "
              f"band-limited error = {r['h2w_error']:.6e}  "
              f"h2 error = {r['h2_error']:.6e}  "
              f"modes preserved = {r['preserves_selected_modes']}")
    return 0


# ---------------------------------------------------------------------------


def _build_parser():
    p = argparse.ArgumentParser(
        prog="morlim",
        description="Frequency-limited model order reduction toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("reduce", help="reduce a model and write reports")
    pr.add_argument("model", help="directory with A.mtx, B.mtx, C.mtx")
    pr.add_argument("--config", help="JSON run configuration")
    pr.add_argument("--out", required=True, help="output directory")
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--nodes", type=int, default=None)
    pr.set_defaults(func=cmd_reduce)

    pv = sub.add_parser("verify", help="run the certificate suite")
    pv.add_argument("model", help="directory with A.mtx, B.mtx, C.mtx")
    pv.add_argument("--config", help="JSON run configuration")
    pv.add_argument("--rom", metavar="DIR",
                    help="re-check the rom_{A,B,C}.mtx written by reduce "
                         "(config defaults to the recorded one)")
    pv.add_argument("--out", help="output directory for reports")
    pv.add_argument("--nodes", type=int, default=None)
    pv.add_argument("--negative-controls", type=int, default=0,
                    metavar="N", help="also run N tampering trials")
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("synth", help="generate a synthetic model")
    ps.add_argument("--kind", choices=("network", "benchmark"),
                    default="network")
    ps.add_argument("--n", type=int, default=16,
                    help="machine count (network) or order (benchmark)")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_synth)

    pc = sub.add_parser("compare", help="compare reduction methods")
    pc.add_argument("model", help="directory with A.mtx, B.mtx, C.mtx")
    pc.add_argument("--config", help="JSON run configuration")
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=cmd_compare)
    return p


def main(argv=None):
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MorlimError as exc:
        print(f"{type(exc).__name__}: {exc}", file=_sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
