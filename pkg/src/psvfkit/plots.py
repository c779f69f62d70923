"""File-only matplotlib renderings of the main outputs."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .model import zk_stations


def plot_trajectory(traj, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(traj.points[:, 0], traj.points[:, 1], lw=0.8, color="tab:blue")
    if traj.psvf.family == "zk":
        sts = zk_stations(traj.psvf.k)
        ax.axhline(0.0, color="0.6", lw=0.8)
        ax.plot(sts, np.zeros_like(sts), "k.", ms=6)
    else:
        k = traj.psvf.k
        for m in range(2 * k):
            phi = m * math.pi / k
            ax.plot([0, 2.2 * math.cos(phi)], [0, 2.2 * math.sin(phi)],
                    color="0.8", lw=0.6)
        ax.plot([0], [0], "k.", ms=6)
        ax.set_aspect("equal")
    ev = [e for e in traj.events if e.kind in ("fold", "origin")]
    if ev:
        ax.plot([e.where[0] for e in ev], [e.where[1] for e in ev],
                "rx", ms=5, label=f"{len(ev)} anchor passages")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"{traj.psvf.family} k={traj.psvf.k}, "
                 f"T={traj.times[-1]:.3g}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_pressure(curve, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.betas, curve.pressures, "o-", ms=3, lw=1)
    ax.axhline(0.0, color="0.7", lw=0.8)
    ax.set_xlabel("beta")
    ax.set_ylabel("pressure")
    ax.set_title(curve.kind or "pressure")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_laps(alpha, ns, counts, path) -> None:
    ns = np.asarray(ns, dtype=float)
    ys = np.log(np.asarray(counts, dtype=float))
    slope, icpt = np.polyfit(ns, ys, 1)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ns, counts, "o", ms=4, label="lap counts")
    ax.semilogy(ns, np.exp(icpt + slope * ns), "-", lw=1,
                label=f"slope {slope:.4f} (log a = {math.log(alpha):.4f})")
    ax.set_xlabel("iterate")
    ax.set_ylabel("laps")
    ax.set_title(f"tent slope {alpha}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_boxes(est, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = 1.0 / est.scales
    ax.loglog(xs, est.counts, "o", ms=4, label="box counts")
    fit = est.counts[0] * (xs / xs[0]) ** est.dimension
    ax.loglog(xs, fit, "-", lw=1,
              label=f"slope {est.dimension:.4f} (r2 {est.r_squared:.5f})")
    ax.set_xlabel("1 / box size")
    ax.set_ylabel("boxes")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
