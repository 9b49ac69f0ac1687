"""Figure rendering for sweep and curve outputs.

Each helper takes the same row dicts that go into the CSV and writes a
PNG next to it, so every delimited report has a ready-to-look-at figure.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _finish(fig, ax, path: str, xlabel: str, ylabel: str, title: str) -> None:
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_schedulability(rows: list[dict], path: str) -> None:
    """Schedulability ratio vs utilization bound, one line per TL fraction."""
    fig, ax = plt.subplots(figsize=(6, 4))
    fractions = sorted({r["tl_fraction"] for r in rows})
    for frac in fractions:
        pts = sorted(
            (r["bound"], r["schedulable_ratio"]) for r in rows if r["tl_fraction"] == frac
        )
        ax.plot(
            [p[0] for p in pts],
            [p[1] for p in pts],
            marker="o",
            markersize=3,
            label=f"TL fraction {frac}",
        )
    ax.set_ylim(-0.02, 1.02)
    _finish(fig, ax, path, "utilization bound", "schedulability ratio",
            "Schedulability vs utilization bound")


def plot_pfj(rows: list[dict], path: str) -> None:
    """Mean finished-LC-job ratio vs switch probability, per mechanism/bound."""
    fig, ax = plt.subplots(figsize=(6, 4))
    keys = sorted({(r["bound"], r["mechanism"]) for r in rows})
    for bound, mech in keys:
        pts = sorted(
            (r["probability"], r["mean_pfj"])
            for r in rows
            if r["bound"] == bound and r["mechanism"] == mech
        )
        style = "-" if mech == "proposed" else "--"
        ax.plot(
            [p[0] for p in pts],
            [p[1] for p in pts],
            style,
            marker="o",
            markersize=3,
            label=f"{mech} @ {bound}",
        )
    ax.set_xscale("log")
    ax.set_ylim(-0.02, 1.02)
    _finish(fig, ax, path, "per-job switch probability", "mean PFJ",
            "LC service vs switch probability")


def plot_demand_curves(rows: list[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    comps = sorted({r["component"] for r in rows})
    for comp in comps:
        pts = sorted((r["t"], r["dbf"]) for r in rows if r["component"] == comp)
        ax.step([p[0] for p in pts], [p[1] for p in pts], where="post", label=comp)
    bounds = sorted({r["t"] for r in rows})
    ax.plot(bounds, bounds, ":", color="gray", label="interval length")
    _finish(fig, ax, path, "interval length t", "demand bound", "Demand bound curves")


def plot_supply_curves(rows: list[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, style in (("sbf_A", "--"), ("sbf_B", "-."), ("sbf", "-")):
        pts = sorted((r["t_E"], r[key]) for r in rows)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], style, label=key)
    _finish(fig, ax, path, "external switch instant t_E", "guaranteed supply",
            "Supply bound vs switch instant")
