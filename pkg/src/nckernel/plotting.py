"""Figures for the command line (rendered off-screen)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_COLOURS = {"PASS": "#4c9a2a", "FAIL": "#c0392b", "EXPECTED-FAIL": "#e0a030"}


def axiom_report_figure(report, path) -> None:
    """Horizontal bars of evaluation time per axiom, coloured by status."""
    rows = list(report.rows)
    fig, ax = plt.subplots(figsize=(7, 0.28 * len(rows) + 1.2))
    ys = range(len(rows))
    floor = max([r.ms for r in rows] + [1]) * 0.01  # keep zero-time rows visible
    ax.barh(ys, [max(r.ms, floor) for r in rows], color=[_COLOURS[r.status] for r in rows])
    ax.set_yticks(list(ys), [r.id for r in rows], fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("evaluation time (ms)")
    ax.set_title(f"{report.theory}: {report.structure}", fontsize=9)
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in _COLOURS.values()]
    ax.legend(handles, list(_COLOURS), fontsize=7, loc="lower right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def saturation_figure(states: dict, path) -> None:
    """Formula count per depth for one or more saturation runs."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, state in states.items():
        ax.plot(range(len(state.counts)), state.counts, marker="o", label=name)
    ax.set_xlabel("depth")
    ax.set_ylabel("formulas")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
