"""Independent numerical verification of every closed form in the package.

Nothing here reuses the algebra it checks.  The date-1 system is audited
pointwise on a price grid (Bayes consistency, strategic indifference, and a
consumption-stream recomputation of the honest value); the date-0 keep value
is rebuilt two ways:

  * `u_keep_piecewise_signed` re-integrates the four analytic pieces over
    their own knots (a check on the quadratic's expansion), and
  * `u_keep_numeric` reconstructs the integrand from `date1_system` outputs
    and integrates it exactly with two-point Gauss rules between knots
    clipped to the price support — correct even where the closed form's
    derivation window (y <= R1 <= 2 p0) is left.

The same machinery powers the grid argmax over R1 and the bisection that
locates the prior at which keeping starts to beat selling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import combined
from .core import DomainError, ModelParams

__all__ = [
    "GridSpec",
    "ResidualReport",
    "grid_verify_date1",
    "u_keep_numeric",
    "u_keep_piecewise_signed",
    "numeric_optimal_R1",
    "max_u_keep_numeric",
    "pi0_threshold",
    "collateral_date1_objective",
    "collateral_date1_grid_max",
    "DEFAULT_VERIFY_CASES",
]

_GAUSS_NODES = np.array([-1.0, 1.0]) / np.sqrt(3.0)  # two-point Gauss-Legendre


@dataclass(frozen=True)
class GridSpec:
    """Resolution settings for grid-based verification."""

    price_points: int = 10_000
    contract_points: int = 2_001
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.price_points < 100 or self.contract_points < 100:
            raise DomainError("grid counts must be at least 100")
        if not self.tolerance > 0.0:
            raise DomainError("tolerance must be positive")


@dataclass(frozen=True)
class ResidualReport:
    """Worst-case residuals of the date-1 equilibrium system over a price grid."""

    max_bayes: float
    max_indifference: float
    max_u1_mismatch: float
    n_points: int
    region_counts: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def max_residual(self) -> float:
        return max(self.max_bayes, self.max_indifference, self.max_u1_mismatch)

    def ok(self, tolerance: float) -> bool:
        return self.max_residual < tolerance

    def to_dict(self) -> dict:
        return {
            "max_bayes": self.max_bayes,
            "max_indifference": self.max_indifference,
            "max_u1_mismatch": self.max_u1_mismatch,
            "max_residual": self.max_residual,
            "n_points": self.n_points,
            "region_counts": dict(self.region_counts),
            "notes": list(self.notes),
        }


def grid_verify_date1(
    params: ModelParams,
    R1: float,
    grid: GridSpec = GridSpec(),
    behavior=None,
) -> ResidualReport:
    """Audit the date-1 system on a uniform p1 grid over [0, 2 p0].

    `behavior` defaults to the production system; tests inject perturbed
    versions to confirm the residuals detect them.  Three checks per point:

      bayes         |pi0 / (pi0 + (1-pi0)(1-delta1)) - pi1| wherever the
                    update is defined
      indifference  in the mixing regions, the strategic type's net gain from
                    repaying (priced with the posterior implied by delta1 and
                    the reported acceptance probability) must be zero
      u1 mismatch   reported honest value vs. a consumption-stream
                    recomputation from the reported (pi1, alpha)
    """
    y = combined.check_combined_params(params)
    beta, pi0 = params.beta, params.pi0
    if behavior is None:
        behavior = combined.date1_system
    p1 = np.linspace(0.0, 2.0 * params.p0, grid.price_points)
    code, pi1, delta1, alpha, u1 = behavior(p1, R1, params)

    # Bayes: posterior must equal the mixing-implied update.
    denom = pi0 + (1.0 - pi0) * (1.0 - delta1)
    defined = denom > 0.0
    bayes = np.abs(np.where(defined, pi0 / np.where(defined, denom, 1.0) - pi1, 0.0))

    # Strategic indifference in the mixing regions (partial separation and
    # rationing): repaying R1, selling at p1, and re-borrowing at the implied
    # posterior must net exactly zero against defaulting into autarky.
    mixing = (code == 1) | (code == 2)
    pi_implied = np.where(defined, pi0 / np.where(defined, denom, 1.0), 0.0)
    # tolerance: in the rationing piece the implied posterior is beta only up
    # to rounding, and the borrow-vs-autarky branch must not flip on that
    b1_implied = np.where(pi_implied >= beta - 1e-9, pi_implied * y, 0.0)
    net_repay = -R1 + p1 + alpha * b1_implied
    indiff = np.abs(np.where(mixing, net_repay, 0.0))

    # Honest value recomputed from consumption streams: repay, sell, offer
    # the reputation contract (pi1 y, y) when pi1 >= beta, face acceptance
    # probability alpha, and consume the remainder at dates 1 and 2.
    b1 = np.where(pi1 >= beta, pi1 * y, 0.0)
    R2 = np.where(pi1 >= beta, y, 0.0)
    u_accept = (y - R1 + p1 + b1) + beta * (y - R2)
    u_reject = (y - R1 + p1) + beta * y
    direct = alpha * u_accept + (1.0 - alpha) * u_reject
    mismatch = np.abs(u1 - direct)

    counts = {region.value: int(np.sum(code == i)) for i, region in enumerate(combined._REGION_BY_CODE)}
    notes = [
        f"zero-measure region within the price support: {name}"
        for name, n in counts.items()
        if n == 0
    ]
    return ResidualReport(
        max_bayes=float(bayes.max()),
        max_indifference=float(indiff.max()),
        max_u1_mismatch=float(mismatch.max()),
        n_points=grid.price_points,
        region_counts=counts,
        notes=tuple(notes),
    )


def _keep_integrand(p1: np.ndarray, R1, params: ModelParams) -> np.ndarray:
    """Date-0 integrand rebuilt from the date-1 system: expected lender
    receipts plus the discounted honest continuation value."""
    _, _, delta1, _, u1 = combined.date1_system(p1, R1, params)
    pi0, beta = params.pi0, params.beta
    repay_mass = pi0 + (1.0 - pi0) * (1.0 - delta1)
    receipts = repay_mass * np.asarray(R1 if np.ndim(R1) else np.full_like(p1, R1)) + (
        1.0 - repay_mass
    ) * p1
    return receipts + beta * u1


def u_keep_numeric(params: ModelParams, R1):
    """Keep value by exact quadrature of the reconstructed integrand.

    Works for scalar R1 or an array of candidate promises.  Knots are the
    region boundaries clipped to [0, 2 p0]; the integrand is linear between
    knots, so two Gauss points per segment integrate it exactly while keeping
    every evaluation strictly inside its region.
    """
    y = combined.check_combined_params(params)
    beta, p0 = params.beta, params.p0
    R = np.atleast_1d(np.asarray(R1, dtype=float))
    top = 2.0 * p0
    knots = np.stack(
        [
            np.zeros_like(R),
            np.clip(R - y, 0.0, top),
            np.clip(R - beta * y, 0.0, top),
            np.clip(R, 0.0, top),
            np.full_like(R, top),
        ],
        axis=1,
    )  # (m, 5), non-decreasing by construction
    lo = knots[:, :-1]
    hi = knots[:, 1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    # (m, 4, 2) evaluation points
    pts = mid[..., None] + half[..., None] * _GAUSS_NODES
    vals = _keep_integrand(
        pts.reshape(-1),
        np.repeat(R, 4 * _GAUSS_NODES.size),
        params,
    ).reshape(pts.shape)
    integral = (vals.sum(axis=2) * half).sum(axis=1)
    out = integral / top
    return out if np.ndim(R1) else float(out[0])


def u_keep_piecewise_signed(params: ModelParams, R1) -> float:
    """Keep value by re-integrating the four analytic pieces over their knots.

    The bounds are used as written — [0, R1-y], [R1-y, R1-beta y],
    [R1-beta y, R1], [R1, 2 p0] — without clipping at the support edges, so
    this reproduces the closed form as a polynomial identity and serves as an
    independent check of its expansion.
    """
    y = combined.check_combined_params(params)
    beta, pi0, p0 = params.beta, params.pi0, params.p0
    R = np.asarray(R1, dtype=float)
    bounds = (
        (np.zeros_like(R), R - y),
        (R - y, R - beta * y),
        (R - beta * y, R),
        (R, np.full_like(R, 2.0 * p0)),
    )
    coeffs = (
        (2.0 * beta * y - (beta - pi0) * R, 1.0 + beta - pi0),
        (np.full_like(R, (beta + pi0) * y), 1.0),
        (beta * (1.0 + beta) * y + (pi0 / beta - beta) * R, 1.0 + beta - pi0 / beta),
        (beta * (1.0 + beta) * y + (1.0 - beta) * R, beta),
    )
    total = np.zeros_like(R)
    for (lo, hi), (a, b) in zip(bounds, coeffs):
        total += a * (hi - lo) + b * (hi * hi - lo * lo) / 2.0
    out = total / (2.0 * p0)
    return out if np.ndim(R1) else float(out)


def numeric_optimal_R1(params: ModelParams, grid: GridSpec = GridSpec()) -> tuple[float, float]:
    """Grid argmax of the quadrature keep value over R1 in [0, 2y]."""
    y = combined.check_combined_params(params)
    r1s = np.linspace(0.0, 2.0 * y, grid.contract_points)
    values = u_keep_numeric(params, r1s)
    i = int(np.argmax(values))
    return float(r1s[i]), float(values[i])


def max_u_keep_numeric(params: ModelParams, contract_points: int = 4001) -> float:
    """Best quadrature keep value over the feasible promise range."""
    return numeric_optimal_R1(params, GridSpec(contract_points=contract_points))[1]


def pi0_threshold(
    beta: float,
    y: float,
    p0: float,
    contract_points: int = 4001,
    iterations: int = 60,
) -> tuple[float, bool]:
    """Prior at which the maximized keep value first reaches the sell value.

    Bisection over pi0 in [0, beta]; the keep value is strictly increasing in
    pi0, so the crossing is unique when it exists.  Returns (pi0*, True) for
    an interior crossing, or (beta, False) when keeping loses for every
    pi0 < beta.
    """
    eps = 1e-12
    base = ModelParams(beta=beta, pi0=0.0, y1=y, y2=y, p0=p0)

    def gap(pi0: float) -> float:
        p = replace(base, pi0=pi0)
        return max_u_keep_numeric(p, contract_points) - combined.sell_utility_date0(p)

    hi = beta - eps
    if gap(hi) < 0.0:
        return beta, False
    lo = 0.0
    if gap(lo) >= 0.0:
        return 0.0, True
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), True


# --- Collateral-only benchmark oracle ---------------------------------------


def collateral_date1_objective(
    R2: np.ndarray, p1: float, x: float, beta: float, n_p2: int = 200_001
) -> np.ndarray:
    """Brute-force date-1 objective (net of the maturing repayment) at promises R2.

    The competitive loan size and the continuation value are both computed as
    sample means over a dense p2 ~ U[0, 2 p1] grid: defaulters surrender the
    asset, repayers collect the dividend and keep the resale option.
    """
    R2 = np.atleast_1d(np.asarray(R2, dtype=float))
    p2 = np.linspace(0.0, 2.0 * p1, n_p2)
    csum = np.concatenate(([0.0], np.cumsum(p2)))
    # index of the first p2 at which repayment happens
    idx = np.searchsorted(p2, R2 - x, side="left")
    n_default = idx
    # E[received] = E[p2; default] + R2 * P(repay)
    b1 = (csum[idx] + (n_p2 - n_default) * R2) / n_p2
    # E[(x + p2 - R2)^+] over the repayment branch
    keep_gain = (x - R2) * (n_p2 - n_default) + (csum[-1] - csum[idx])
    cont = beta * keep_gain / n_p2
    return x + b1 + cont


def collateral_date1_grid_max(
    p1: float, x: float, beta: float, n_r2: int = 4001, n_p2: int = 200_001
) -> tuple[float, float, float]:
    """Grid maximization of the date-1 borrowing problem: (b1, R2, value)."""
    r2s = np.linspace(0.0, 2.0 * p1 + x, n_r2)
    values = collateral_date1_objective(r2s, p1, x, beta, n_p2)
    i = int(np.argmax(values))
    r2 = float(r2s[i])
    p2 = np.linspace(0.0, 2.0 * p1, n_p2)
    b1 = float(np.where(p2 >= r2 - x, r2, p2).mean())
    return b1, r2, float(values[i])


#: Canonical parameter points exercised by the command-line `verify` command.
DEFAULT_VERIFY_CASES = (
    (ModelParams(beta=0.5, pi0=0.2, y1=1.0, y2=1.0, p0=1.2), 1.5),
    (ModelParams(beta=0.5, pi0=0.3, y1=1.0, y2=1.0, p0=1.2), 2.0),
    (ModelParams(beta=0.5, pi0=0.4, y1=1.0, y2=1.0, p0=1.2), 1.0),
    (ModelParams(beta=0.7, pi0=0.35, y1=2.0, y2=2.0, p0=0.9), 2.5),
    (ModelParams(beta=0.3, pi0=0.05, y1=0.8, y2=0.8, p0=2.0), 1.2),
)
