"""Command-line entry point.

Every subcommand writes its tables (CSV/JSON) and figures into ``--out`` and
prints a single JSON line summarizing the result.  Exit codes: 0 success,
2 input error, 3 range error, 4 stiffness error, 5 degenerate root.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import effres, fixed_points, mist, plotting, response, scd, spectrum
from .errors import InputError, MistScdError
from .params import TWO_PI

log = logging.getLogger("mistscd")

SUBCOMMANDS = ("spectrum", "fan", "crossings", "effres", "trajectory", "landscape",
               "roots", "map", "critical", "summary")


class Run:
    """Shared state for one invocation: resolved config, output dir, cached spectrum."""

    def __init__(self, cfg: cfgmod.RunConfig, out: Path, levels=None):
        self.cfg = cfg
        self.params = cfg.system_params()
        self.out = out
        self.levels = levels
        self.files = []
        self._spec = None

    @property
    def spec(self):
        if self._spec is None:
            self._spec = spectrum.diagonalize_strip(self.params)
        return self._spec

    def curve(self, level):
        return effres.effective_resonance(self.spec, level)

    def level(self):
        return self.levels[0] if self.levels else self.cfg.level_index()

    def write(self, name, text):
        path = self.out / name
        path.write_text(text)
        self.files.append(name)
        return path

    def figure(self, fn, name, *args, **kwargs):
        fn(*args, path=self.out / name, **kwargs)
        self.files.append(name)


def cmd_spectrum(run: Run):
    run.write("spectrum.csv", run.spec.to_csv())
    return {"levels": run.spec.levels, "n_max": run.spec.n_max, "label_warnings": len(run.spec.warnings)}


def cmd_fan(run: Run):
    levels = list(range(min(run.spec.levels, 15)))
    extra = [k for k in (0, 1, 2) if k < run.spec.levels]
    run.write("fan.csv", mist.fan_table_csv(run.spec, levels, extra))
    crossings = _crossings(run)
    run.figure(plotting.plot_fan, "fan.svg", run.spec, levels=levels, extra_levels=extra,
               target=run.cfg.crossing_j, crossings=[c[0] for c in crossings.values() if c])
    return {"levels": len(levels)}


def _crossings(run: Run):
    ks = run.levels if run.levels else run.cfg.crossing_k
    return {k: mist.find_crossings(run.spec, k, run.cfg.crossing_j) for k in ks}


def cmd_crossings(run: Run):
    found = _crossings(run)
    flat = [c for cs in found.values() for c in cs]
    run.write("crossings.csv", mist.crossings_csv(flat))
    report = {
        "j": run.cfg.crossing_j,
        "eta_convention": run.params.eta_convention.value,
        "crossings": [
            {"k": k, "first": cs[0].as_dict() if cs else None, "all": [c.as_dict() for c in cs]}
            for k, cs in found.items()
        ],
    }
    run.write("crossings.json", response.to_json(report))
    return {"n_star": {str(k): (cs[0].n_star if cs else None) for k, cs in found.items()}}


def cmd_effres(run: Run):
    levels = run.levels or [k for k in (0, 1, 2) if k < run.spec.levels]
    curves = [run.curve(i) for i in levels]
    run.write("effres.csv", effres.effres_csv(curves))
    run.figure(plotting.plot_effres, "effres.svg", curves)
    return {
        "chi_MHz": {str(c.level): c.chi / TWO_PI / 1e6 for c in curves},
        "argmin_n": {str(c.level): c.local_minimum(n_hi=400) for c in curves},
    }


def _points(run: Run):
    return [(E, d) for E in run.cfg.drive_amplitudes() for d in run.cfg.detunings()]


def cmd_trajectory(run: Run):
    curve = run.curve(run.level())
    results = []
    for idx, (E, d) in enumerate(_points(run)):
        drive = scd.DriveConfig(float(E), run.params.omega_r + float(d), t0=run.cfg.t0())
        traj = scd.integrate(curve, drive, run.params)
        run.write(f"trajectory_{idx}.csv", traj.to_csv())
        T, phi = scd.readout(traj, drive, run.params)
        results.append({"index": idx, "E_rad_per_s": E, "delta_Mr_rad_per_s": d, "T": T, "phi": phi,
                        "final_re_alpha": traj.final.real, "final_im_alpha": traj.final.imag,
                        "accepted_steps": traj.accepted, "rejected_steps": traj.rejected})
    run.write("trajectory.json", response.to_json(results))
    return {"T": [r["T"] for r in results], "phi": [r["phi"] for r in results]}


def cmd_landscape(run: Run):
    curve = run.curve(run.level())
    out = []
    for idx, (E, d) in enumerate(_points(run)):
        drive = scd.DriveConfig(float(E), run.params.omega_r + float(d), t0=run.cfg.t0())
        ext = run.cfg.landscape_extent * E / run.params.kappa
        axis = np.linspace(-ext, ext, run.cfg.landscape_points)
        X, Y, mag, ang = scd.landscape(curve, drive, run.params, axis, axis)
        run.write(f"landscape_{idx}.csv", scd.landscape_csv(X, Y, mag, ang))
        traj = scd.integrate(curve, drive, run.params)
        run.write(f"trajectory_{idx}.csv", traj.to_csv())
        roots = fixed_points.find_roots(curve, float(E), drive.omega_M, run.params)
        label = fixed_points.region(curve, float(E), drive.omega_M, run.params)
        run.figure(plotting.plot_landscape, f"landscape_{idx}.svg", X, Y, mag, trajectory=traj, roots=roots)
        out.append(label.value)
    return {"regions": out}


def cmd_roots(run: Run):
    curve = run.curve(run.level())
    rows = []
    for E, d in _points(run):
        wM = run.params.omega_r + float(d)
        roots = fixed_points.find_roots(curve, float(E), wM, run.params)
        rows.append((float(E), wM, roots, fixed_points.region(curve, float(E), wM, run.params)))
    run.write("roots.csv", fixed_points.roots_csv(rows))
    return {"root_count": [len(r[2]) for r in rows], "region": [r[3].value for r in rows]}


def _map(run: Run, level, mode):
    curve = run.curve(level)
    drives = response.photon_to_amp(run.cfg.photon_axis(), run.params)
    return response.run_map(curve, drives, run.cfg.freq_axis(), run.params, mode=mode,
                            t0=run.cfg.t0(), threads=run.cfg.threads)


def cmd_map(run: Run):
    level = run.level()
    mode = run.cfg.mode
    rmap = _map(run, level, mode)
    name = response.LEVEL_NAMES.get(level, str(level))
    run.write(f"map_{name}.csv", rmap.to_csv())
    crit = None
    if mode in ("ode", "both"):
        crit = response.critical_point_scd(rmap, run.cfg.peak_prominence, run.cfg.separation_hz())
        run.figure(plotting.plot_map, f"map_{name}.svg", rmap, prominence=run.cfg.peak_prominence, critical=crit)
    if mode in ("fixed_point", "both"):
        run.figure(plotting.plot_regions, f"regions_{name}.svg", rmap)
    return {"level": name, "invalid_cells": int(rmap.invalid.sum()), "n_c_scd": crit}


def _critical_reports(run: Run, levels):
    reports = []
    for level in levels:
        rmap = _map(run, level, "ode")
        name = response.LEVEL_NAMES.get(level, str(level))
        run.write(f"map_{name}.csv", rmap.to_csv())
        n_scd = response.critical_point_scd(rmap, run.cfg.peak_prominence, run.cfg.separation_hz())
        n_div = response.critical_point_divergence(rmap, run.cfg.separation_hz())
        run.figure(plotting.plot_map, f"map_{name}.svg", rmap, prominence=run.cfg.peak_prominence, critical=n_scd)
        cs = mist.find_crossings(run.spec, level, run.cfg.crossing_j)
        reports.append(response.CriticalPointReport(
            level=level,
            n_c_scd=n_scd,
            n_mist=cs[0].n_star if cs else None,
            n_c_experiment_reference=response.EXPERIMENT_REFERENCE.get(level),
            method={
                "peak_prominence": run.cfg.peak_prominence,
                "peak_separation_hz": run.cfg.separation_hz(),
                "n_c_divergence": n_div,
                "invalid_cells": int(rmap.invalid.sum()),
            },
        ))
    return reports


def cmd_critical(run: Run):
    reports = _critical_reports(run, run.levels or [0, 1, 2])
    run.write("critical.json", response.to_json([r.as_dict() for r in reports]))
    return {"n_c_scd": {response.LEVEL_NAMES.get(r.level, str(r.level)): r.n_c_scd for r in reports}}


def cmd_summary(run: Run):
    reports = _critical_reports(run, [0, 1, 2])
    rows = response.fig5_summary(reports)
    run.write("summary.json", response.to_json(rows))
    run.write("summary.csv", response.summary_csv(rows))
    run.figure(plotting.plot_summary, "summary.svg", rows)
    return {"mechanism": {r["level"]: r["mechanism"] for r in rows}}


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def dispatch(subcommand: str, cfg: cfgmod.RunConfig, out: Path, levels=None) -> dict:
    if subcommand not in COMMANDS:
        raise InputError(f"unknown subcommand {subcommand!r}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    run = Run(cfg, out, levels)
    run.write("config.txt", cfg.emit())
    run.write("provenance.json", response.to_json({"command": subcommand, "resolved": cfg.resolved()}))
    result = COMMANDS[subcommand](run)
    return {"command": subcommand, "status": "ok", **result, "files": run.files}


def build_parser():
    ap = argparse.ArgumentParser(prog="mistscd", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="flat key = value configuration file")
    src.add_argument("--preset", choices=sorted(cfgmod.PRESETS), help="built-in device preset")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--threads", type=int, help="worker threads for maps")
    ap.add_argument("--mode", choices=("ode", "fixedpoint", "both"), help="map evaluation mode")
    ap.add_argument("--level", action="append", help="transmon level g|e|f|<int> (repeatable)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one configuration line")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def load_config(args) -> cfgmod.RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
    else:
        text = cfgmod.PRESETS[args.preset or "paper"]
    if args.set:
        overridden = {s.partition("=")[0].strip() for s in args.set}
        kept = [ln for ln in text.splitlines() if ln.split("#", 1)[0].partition("=")[0].strip() not in overridden]
        text = "\n".join(kept + list(args.set)) + "\n"
    cfg = cfgmod.parse_config(text)
    changes = {}
    if args.threads is not None:
        if args.threads < 1:
            raise InputError("--threads must be >= 1")
        changes["threads"] = args.threads
    if args.mode is not None:
        changes["mode"] = "fixed_point" if args.mode == "fixedpoint" else args.mode
    return cfg.with_(**changes) if changes else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = load_config(args)
        levels = [cfgmod.parse_level(x) for x in args.level] if args.level else None
        result = dispatch(args.subcommand, cfg, args.out, levels)
    except MistScdError as exc:
        print(json.dumps({"command": args.subcommand, "status": "error",
                          "category": type(exc).__name__, "message": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    result["elapsed_s"] = round(time.perf_counter() - start, 3)
    print(json.dumps(result, default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
