"""Figures written next to the CSV/JSON outputs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fixed_points import RegionLabel, Stability  # noqa: E402
from .mist import fan_curve  # noqa: E402
from .params import TWO_PI  # noqa: E402
from .response import LEVEL_NAMES, phase_gradient_peaks  # noqa: E402

LEVEL_COLORS = {0: "tab:blue", 1: "tab:orange", 2: "tab:green"}
REGION_CODES = {RegionLabel.S0: 0, RegionLabel.S1: 1, RegionLabel.SB_LOW: 2, RegionLabel.SB_HIGH: 3}

plt.rcParams.update({"svg.hashsalt": "mistscd", "font.size": 9})


def _save(fig, path):
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None, bbox_inches="tight")
    plt.close(fig)
    return path


def _mhz(x):
    return np.asarray(x) / TWO_PI / 1e6


def plot_fan(spec, path, levels=range(15), extra_levels=(0, 1, 2), target=7, crossings=()):
    fig, ax = plt.subplots(figsize=(5, 4))
    for k in levels:
        c = fan_curve(spec, k)
        if k in LEVEL_COLORS:
            style = dict(color=LEVEL_COLORS[k], lw=1.5, label=LEVEL_NAMES[k])
        elif k == target:
            style = dict(color="gray", lw=1.5, label=f"k={k}")
        else:
            style = dict(color="0.6", lw=0.6, ls="-" if k < 10 else ":")
        ax.plot(c.photons, c.scaled, **style)
    for k in extra_levels:
        c = fan_curve(spec, k, extra_photon=True)
        ax.plot(c.photons, c.scaled, color=LEVEL_COLORS.get(k, "k"), ls="-.", lw=1)
    for cr in crossings:
        y = float(np.interp(cr.n_star, *_xy(fan_curve(spec, cr.target_level))))
        ax.plot(cr.n_star, y, "s", color="purple", ms=5)
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\bar\omega_k(N)/\omega_r$")
    ax.legend(fontsize=7)
    return _save(fig, path)


def _xy(curve):
    return curve.photons, curve.scaled


def plot_effres(curves, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for c in curves:
        n = np.arange(len(c.samples))
        ax.plot(n, _mhz(c.samples - c.omega_r), color=LEVEL_COLORS.get(c.level), label=LEVEL_NAMES.get(c.level, c.level))
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xscale("symlog", linthresh=1)
    ax.set_xlabel("n")
    ax.set_ylabel(r"$(\omega_i(n)-\omega_r)/2\pi$ (MHz)")
    ax.legend()
    return _save(fig, path)


def plot_map(rmap, path, prominence=0.01, critical=None):
    """Transmission heatmap with transmission maxima and phase-gradient peaks."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    N = rmap.photons
    pcm = ax.pcolormesh(N, _mhz(rmap.freq_axis), rmap.T.T, shading="nearest", cmap="viridis")
    fig.colorbar(pcm, ax=ax, label="T")
    t_max = [rmap.freq_axis[np.nanargmax(row)] if np.any(np.isfinite(row)) else np.nan for row in rmap.T]
    ax.plot(N, _mhz(t_max), "o", mfc="white", mec="white", ms=3, label="T max")
    for r, row in enumerate(rmap.phi):
        peaks = phase_gradient_peaks(row, rmap.freq_axis, prominence)
        for j, (f, _) in enumerate(peaks[:2]):
            ax.plot(N[r], _mhz(f), "o", mfc="none", mec="purple" if j == 0 else "tab:blue", ms=4)
    if critical is not None:
        ax.axvline(critical, color="red", ls="--", lw=1)
    ax.set_xscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\Delta_{Mr}/2\pi$ (MHz)")
    ax.set_title(f"level {LEVEL_NAMES.get(rmap.level, rmap.level)}")
    return _save(fig, path)


def plot_regions(rmap, path):
    codes = np.vectorize(lambda r: np.nan if r is None else REGION_CODES[r], otypes=[float])(rmap.region)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    cmap = matplotlib.colors.ListedColormap(["darkcyan", "teal", "gold", "yellow"])
    pcm = ax.pcolormesh(rmap.photons, _mhz(rmap.freq_axis), codes.T, shading="nearest", cmap=cmap, vmin=-0.5, vmax=3.5)
    cb = fig.colorbar(pcm, ax=ax, ticks=[0, 1, 2, 3])
    cb.ax.set_yticklabels([r.value for r in REGION_CODES])
    ax.set_xscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\Delta_{Mr}/2\pi$ (MHz)")
    return _save(fig, path)


def plot_landscape(X, Y, mag, path, trajectory=None, roots=()):
    fig, ax = plt.subplots(figsize=(4.5, 4))
    pcm = ax.pcolormesh(X, Y, mag, shading="nearest", cmap="magma")
    fig.colorbar(pcm, ax=ax, label=r"$\log|\dot\alpha|$")
    if trajectory is not None:
        ax.plot(trajectory.alphas.real, trajectory.alphas.imag, "k-", lw=1)
    ax.plot(0, 0, "r.", ms=4)
    for p in roots:
        a = p.alpha
        ax.plot(a.real, a.imag, "o", mfc="none", ms=7, mew=1.5,
                mec="red" if p.stability is Stability.STABLE else "blue")
    ax.set_xlabel(r"Re $\alpha$")
    ax.set_ylabel(r"Im $\alpha$")
    ax.set_aspect("equal")
    return _save(fig, path)


def plot_summary(rows, path):
    fig, ax = plt.subplots(figsize=(4, 3.5))
    x = np.arange(len(rows))
    for key, marker, color, label in (
        ("n_c_experiment_reference", "D", "red", "reference"),
        ("n_mist", "s", "purple", "MIST"),
        ("n_c_scd", "^", "gold", "SCD"),
    ):
        y = [np.nan if r[key] is None else r[key] for r in rows]
        ax.plot(x, y, marker, color=color, label=label, ms=7, mec="k")
    ax.set_xticks(x, [r["level"] for r in rows])
    ax.set_ylabel("critical photon number")
    ax.legend()
    return _save(fig, path)
