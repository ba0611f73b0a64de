"""Figure and CSV rendering for the CLI report paths."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .lognormal import Decomposition, reconstruct, stroke_velocity
from .trajectory import Trajectory, velocity_profile

__all__ = [
    "save_decomposition_figure",
    "save_metrics_csv",
    "save_metrics_figure",
    "save_learning_curve_csv",
    "save_learning_curve_figure",
]


def save_decomposition_figure(traj: Trajectory, dec: Decomposition, path) -> None:
    """Two panels: the xy path, and the speed profile with each extracted
    stroke plus their sum overlaid."""
    vp = velocity_profile(traj)
    fig, (ax_path, ax_vel) = plt.subplots(1, 2, figsize=(10, 4))
    ax_path.plot(traj.x, traj.y, "k.-", lw=1, ms=3)
    ax_path.plot(traj.x[0], traj.y[0], "go", label="start")
    ax_path.plot(traj.x[-1], traj.y[-1], "rx", label="end")
    ax_path.set_xlabel("x (px)")
    ax_path.set_ylabel("y (px)")
    ax_path.invert_yaxis()  # screen coordinates
    ax_path.legend(fontsize=8)
    ax_path.set_title("trajectory")

    ax_vel.plot(vp.t, vp.v, "k-", lw=1.5, label="speed")
    dense = np.linspace(vp.t[0], vp.t[-1], 400)
    for i, s in enumerate(dec.strokes):
        ax_vel.plot(dense, stroke_velocity(s, dense), "g--", lw=1,
                    label="strokes" if i == 0 else None)
    if dec.strokes:
        ax_vel.plot(dense, reconstruct(dec.strokes, dense).v, "r:", lw=1.5,
                    label="reconstruction")
    ax_vel.set_xlabel("t (s)")
    ax_vel.set_ylabel("speed (px/s)")
    ax_vel.set_title(f"n={dec.n}, snr={dec.snr_db:.1f} dB")
    ax_vel.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_metrics_csv(path, rows: list[dict]) -> None:
    """Delimited metrics table; one row per group/model."""
    if not rows:
        raise ValueError("no metric rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def save_metrics_figure(path, rows: list[dict], group_key: str = "group") -> None:
    """Grouped bar chart of accuracy and AUC."""
    groups = [str(r[group_key]) for r in rows]
    acc = [float(r["acc"]) for r in rows]
    auc = [float(r["auc"]) for r in rows]
    x = np.arange(len(groups))
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(groups) + 2), 4))
    ax.bar(x - 0.2, acc, width=0.4, label="accuracy")
    ax.bar(x + 0.2, auc, width=0.4, label="AUC")
    ax.set_xticks(x)
    ax.set_xticklabels(groups, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_learning_curve_csv(path, acc: dict) -> None:
    """acc: {model: {L: accuracy}} -> long-format CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "L", "acc"])
        for model in sorted(acc):
            for l in sorted(acc[model]):
                writer.writerow([model, l, f"{acc[model][l]:.6f}"])


def save_learning_curve_figure(path, acc: dict) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for model in sorted(acc):
        ls = sorted(acc[model])
        ax.plot(ls, [acc[model][l] for l in ls], "o-", label=model)
    ax.set_xlabel("training samples L")
    ax.set_ylabel("accuracy")
    ax.set_xscale("log")
    ax.set_ylim(0.4, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
