"""Figure data emission: delimited rows plus optional rendered plots.

Two report surfaces:

  * fig2 — the reputation-only equilibrium map over (beta, pi0) at fixed
    income growth g (rows: beta, pi0, g, label);
  * fig3 — the combined-regime date-1 profile over p1 at a fixed promise R1
    (rows: p1, region, pi1, delta1, alpha), covering both the posterior and
    default-probability panels.

CSV output is bit-stable: '.' decimal separator, 12 significant digits, and
a header row always present.  Rendering (PNG via the Agg backend) sits next
to the delimited output and never replaces it.
"""

from __future__ import annotations

import csv
from collections.abc import Sequence

import numpy as np

from . import combined, reputation
from .core import DomainError, ModelParams

__all__ = [
    "format_value",
    "write_csv",
    "fig2_rows",
    "fig3_rows",
    "render_fig2",
    "render_fig3",
]

FIG2_HEADER = ("beta", "pi0", "g", "label")
FIG3_HEADER = ("p1", "region", "pi1", "delta1", "alpha")


def format_value(v) -> str:
    """CSV cell format: 12 significant digits for floats, plain text otherwise."""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def fig2_rows(g: float, n_beta: int = 99, n_pi0: int = 101) -> list[tuple]:
    """Equilibrium-region grid for the reputation-only benchmark at growth g."""
    if n_beta < 2 or n_pi0 < 2:
        raise DomainError("grid needs at least 2 points per axis")
    rows = []
    y1 = 1.0
    y2 = (1.0 + g) * y1
    if y2 < 0.0:
        raise DomainError("income growth below -1 makes y2 negative")
    for beta in np.linspace(0.01, 0.99, n_beta):
        for pi0 in np.linspace(0.0, 1.0, n_pi0):
            sol = reputation.classify_region(float(pi0), float(beta), y1, y2)
            rows.append((float(beta), float(pi0), g, sol.region.label.value))
    return rows


def fig3_rows(params: ModelParams, R1: float, n: int = 400, p_max: float | None = None) -> list[tuple]:
    """Date-1 profile (posterior, default probability, acceptance) over p1."""
    if n < 2:
        raise DomainError("need at least 2 profile points")
    if p_max is None:
        p_max = max(2.0 * params.p0, 1.5 * R1)
    p1 = np.linspace(0.0, p_max, n)
    code, pi1, delta1, alpha, _ = combined.date1_system(p1, R1, params)
    return [
        (
            float(p1[i]),
            combined._REGION_BY_CODE[int(code[i])].value,
            float(pi1[i]),
            float(delta1[i]),
            float(alpha[i]),
        )
        for i in range(n)
    ]


def _agg_pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_fig2(rows, path) -> None:
    """Region map over (beta, pi0); one color per equilibrium label."""
    plt = _agg_pyplot()
    colors = {"Autarky": "#d9d9d9", "Pooling": "#7fb3d5", "Separating": "#2e4a7a"}
    fig, ax = plt.subplots(figsize=(6, 5))
    data = {}
    for beta, pi0, _g, label in rows:
        data.setdefault(label, ([], []))
        data[label][0].append(beta)
        data[label][1].append(pi0)
    for label, (xs, ys) in sorted(data.items()):
        ax.scatter(xs, ys, s=4, color=colors.get(label, "k"), label=label, marker="s")
    ax.set_xlabel("discount factor")
    ax.set_ylabel("prior that the borrower is honest")
    ax.set_title("Reputation-only equilibrium regions")
    ax.legend(loc="lower right", framealpha=0.9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_fig3(rows, path) -> None:
    """Two panels over p1: lenders' posterior and strategic default probability."""
    plt = _agg_pyplot()
    p1 = [r[0] for r in rows]
    pi1 = [r[2] for r in rows]
    delta1 = [r[3] for r in rows]
    alpha = [r[4] for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 7), sharex=True)
    ax1.plot(p1, pi1, lw=1.8, color="#2e4a7a")
    ax1.set_ylabel("posterior after repayment")
    ax1.set_ylim(-0.05, 1.05)
    ax2.plot(p1, delta1, lw=1.8, color="#a93226", label="strategic default prob.")
    ax2.plot(p1, alpha, lw=1.2, ls="--", color="#7fb3d5", label="lender acceptance prob.")
    ax2.set_xlabel("date-1 asset price")
    ax2.set_ylabel("probability")
    ax2.set_ylim(-0.05, 1.05)
    ax2.legend(loc="best", framealpha=0.9)
    fig.suptitle("Date-1 default incentives and reputation")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
