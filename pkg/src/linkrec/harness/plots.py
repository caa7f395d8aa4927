"""SVG line charts for the figure sweeps. The CSV is the contract; plots are a
convenience and are written with fixed metadata so reruns are identical."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweeps import Row  # noqa: E402

TITLES = {
    1: ("exogenous utility ratio", "utility ratio bounds"),
    2: ("exogenous utility ratio", "utility ratio bounds"),
    3: ("recommendations per person k", "welfare gain per capita"),
    4: ("cross-group fraction rho", "welfare gain per capita"),
}


def _x(row: Row, figure: int) -> float:
    if figure in (1, 2):
        return row.ur_exo
    if figure == 3:
        return row.k
    return row.rho


def plot_rows(rows: list, figure: int, path) -> None:
    matplotlib.rcParams["svg.hashsalt"] = "linkrec"
    matplotlib.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(7, 5))
    g0s = sorted({r.g0 for r in rows})
    n = max(len(g0s) - 1, 1)
    for idx, g0 in enumerate(g0s):
        line = sorted((r for r in rows if r.g0 == g0), key=lambda r: _x(r, figure))
        xs = [_x(r, figure) for r in line]
        lo = [r.lower if r.status == "ok" else float("nan") for r in line]
        hi = [r.upper if r.status == "ok" else float("nan") for r in line]
        shade = 0.35 + 0.65 * idx / n
        ax.plot(xs, hi, color=(shade, 0.1, 0.1), label=f"upper, g0={g0:g}")
        ax.plot(xs, lo, color=(0.1, 0.1, shade), label=f"lower, g0={g0:g}")
    if figure in (1, 2):
        xs = sorted({r.ur_exo for r in rows if r.ur_exo is not None})
        if xs:
            ax.plot([xs[0], xs[-1]], [xs[0], xs[-1]], "k--", linewidth=1, label="break-even")
    ax.set_xlabel(TITLES[figure][0])
    ax.set_ylabel(TITLES[figure][1])
    ax.legend(fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
