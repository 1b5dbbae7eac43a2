"""Figures written next to the CLI's tabular and JSON reports."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .protocol import ProtocolEvent  # noqa: E402
from .transform import ParamSet  # noqa: E402

_KIND_COLORS = {
    "auth_ok": "tab:green",
    "auth_fail": "tab:red",
    "db_grant": "tab:green",
    "db_deny": "tab:red",
    "msg_send": "tab:blue",
    "msg_deliver": "tab:cyan",
    "observe": "tab:purple",
    "refresh": "tab:orange",
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_tables(params: ParamSet, rows, classes, path):
    """Cipher map as a scatter, with each multi-root class drawn in its own colour."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    ms = [m for m, _ in rows]
    cs = [c for _, c in rows]
    ax1.scatter(ms, cs, s=12, color="0.5")
    for c, roots in classes:
        if len(roots) > 1:
            ax1.scatter(roots, [c] * len(roots), s=18)
    ax1.set_xlabel("message m")
    ax1.set_ylabel(f"cipher m^{params.x} mod {params.n}")
    ax1.set_title(f"cipher map, n={params.n}, x={params.x}")

    sizes = [len(r) for _, r in classes]
    ax2.bar(range(len(classes)), sizes, color="tab:blue")
    ax2.axhline(params.x, color="tab:red", ls="--", lw=1, label=f"x = {params.x}")
    ax2.set_xticks(range(len(classes)))
    ax2.set_xticklabels([str(c) for c, _ in classes], rotation=90, fontsize=6)
    ax2.set_xlabel("cipher c")
    ax2.set_ylabel("number of roots")
    ax2.set_title("root class sizes")
    ax2.legend(frameon=False)
    _save(fig, path)


def plot_sweep(report: dict, path):
    entries = report["entries"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))

    for regime, marker, label in ((False, "o", "other"), (True, "*", "x prime, x | q-1, x = 1 mod p-1")):
        pts = [e for e in entries if e["paper_regime"] == regime]
        ax1.scatter(
            [e["x"] for e in pts],
            [e["root_count"]["expected"] for e in pts],
            c=["tab:green" if e["property1"]["holds"] else "tab:red" for e in pts],
            marker=marker,
            s=40 if regime else 14,
            alpha=0.7,
        )
        ax1.scatter([], [], color="0.4", marker=marker, label=label)
    ax1.set_xlabel("x")
    ax1.set_ylabel("roots per unit class")
    ax1.set_title("class size (green: differences share a prime)")
    ax1.legend(frameon=False)

    frac = defaultdict(lambda: [0, 0])
    for e in entries:
        p3 = e["property3"]
        frac[e["x"]][0] += p3["full_equal"]
        frac[e["x"]][1] += p3["full_unit_classes"]
    xs = sorted(x for x, (_, tot) in frac.items() if tot)
    ax2.bar(
        xs,
        [frac[x][0] / frac[x][1] for x in xs],
        color=["tab:blue" if x % 2 else "tab:orange" for x in xs],
    )
    ax2.set_ylim(0, 1.05)
    ax2.set_xlabel("x (orange: even)")
    ax2.set_ylabel("fraction with product of roots = c")
    ax2.set_title("x-root classes")
    _save(fig, path)


def plot_transcript(events: list[ProtocolEvent], path):
    """Swimlane view: one row per actor, one marker per event."""
    actors = sorted({e.actor for e in events})
    lane = {a: i for i, a in enumerate(actors)}
    fig, ax = plt.subplots(figsize=(max(6, len(events) * 0.5), 1 + 0.5 * max(len(actors), 1)))
    for e in events:
        color = "tab:red" if e.is_error else _KIND_COLORS.get(e.kind, "0.4")
        ax.scatter(e.step, lane[e.actor], color=color, s=30, zorder=3)
        if e.is_error or e.kind in ("db_grant", "refresh"):
            label = e.payload.get("error", e.kind)
            ax.annotate(label, (e.step, lane[e.actor]), xytext=(0, 6),
                        textcoords="offset points", fontsize=6, ha="center")
    ax.set_yticks(range(len(actors)))
    ax.set_yticklabels(actors)
    ax.set_xlabel("step")
    ax.grid(axis="y", color="0.9")
    _save(fig, path)
