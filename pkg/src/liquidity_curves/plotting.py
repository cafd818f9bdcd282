"""Render curve sweeps to image files."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweep import CurveSweepRequest, SweepMode  # noqa: E402


def _finish(fig, ax, path: str | Path, xlabel: str, ylabel: str, title: str) -> Path:
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_swap_curves(rows, path: str | Path, ylim: tuple[float, float] = (0.0, 4.0)) -> Path:
    curves = defaultdict(list)
    for k, g1, g2, status in rows:
        if status == "ok":
            curves[k].append((g1, g2))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for k in sorted(curves):
        xs, ys = zip(*curves[k])
        ax.plot(xs, ys, label=f"k = {k:g}")
    ax.set_ylim(*ylim)
    return _finish(fig, ax, path, "$g_1$", "$g_2$", "Liquidity curves for asset swaps")


def plot_stake_curves(rows, path: str | Path) -> Path:
    curves = defaultdict(list)
    for k, n, g1, g0 in rows:
        curves[(k, n)].append((g1, g0))
    ks = {k for k, _ in curves}
    ns = {n for _, n in curves}
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for k, n in sorted(curves):
        xs, ys = zip(*curves[(k, n)])
        if len(ns) == 1:
            label = f"k = {k:g}"
        elif len(ks) == 1:
            label = f"n = {n}"
        else:
            label = f"k = {k:g}, n = {n}"
        ax.plot(xs, ys, label=label)
    return _finish(fig, ax, path, "$g_1$", "$g_0$", "Liquidity curves for single-asset staking")


def plot_sweep(req: CurveSweepRequest, rows, path: str | Path) -> Path:
    if req.mode is SweepMode.SWAP_CURVE:
        return plot_swap_curves(rows, path)
    return plot_stake_curves(rows, path)
