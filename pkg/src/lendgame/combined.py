"""Collateral and reputation together: the model's central regime.

Setting: flat income y1 = y2 = y, no dividend (x = 0), and a prior strictly
below the discount factor (pi0 < beta), so that neither channel works alone —
reputation-only would mean autarky, collateral-only would mean selling the
asset immediately.  Pledging the asset nevertheless creates a signalling
device: a low date-1 price makes default tempting for the strategic type, so
repayment after a price drop certifies honesty and unlocks cheap later credit.

Date-1 continuation game (after keeping the asset and borrowing R1), as a
function of the realized price p1:

    p1 <  R1 - y          complete separation   strategic defaults surely
    R1 - y <= p1 < R1-b*y partial separation    strategic mixes, posterior
                                                pi1 = (R1 - p1)/y
    R1-b*y <= p1 <= R1    credit rationing      posterior pinned at beta,
                                                lenders accept w.p.
                                                alpha = (R1 - p1)/(beta y)
    p1 > R1               pooling and autarky   everyone repays, no update

(b* denotes beta.)  Whatever happens, the asset is sold at date 1: borrowing
against it again is dominated for the honest type.

The date-0 problem integrates the honest continuation value over
p1 ~ U[0, 2 p0] under the lenders' zero-profit pricing.  The keep value has
the closed form

    U(R1) = -(1 - pi0)/(4 p0) R1^2 + (1-beta)(1 + beta y/(2 p0)) R1
            + (1-beta)(pi0 - beta(1+beta)) y^2 / (4 p0)
            + beta (1+beta) y + beta p0,

maximized at R1* = min{ (1-beta)(2 p0 + beta y)/(1 - pi0), 2 y }, where the
cap 2y is the worst-case feasibility bound on the promise.  Selling at date 0
yields beta (1+beta) y + p0.  The closed form is exact when every region
boundary falls inside the price support (y <= R1 <= 2 p0); outside that
window the quadrature oracle is the ground truth.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Contract, DomainError, ModelParams, validate_params

__all__ = [
    "Date1Region",
    "Date1Outcome",
    "KeepVsSell",
    "Decision",
    "Date0Solution",
    "OptimalRepayment",
    "Pi0StarResult",
    "check_combined_params",
    "default_thresholds",
    "region_boundaries",
    "date1_system",
    "date1_behavior",
    "date1_keep_contract",
    "honest_sell_value",
    "honest_keep_value",
    "closed_form_u_keep",
    "expected_repayment",
    "date0_objective",
    "unconstrained_R1",
    "binding_income_cap",
    "optimal_R1",
    "sell_utility_date0",
    "date0_decision",
    "pi0_bound_binding",
    "pi0_bound_value_literal",
    "pi0_bound_value",
    "keep_interval_literal",
    "pi0_star",
]


class Date1Region(enum.Enum):
    COMPLETE_SEPARATION = "CompleteSeparation"
    PARTIAL_SEPARATION = "PartialSeparation"
    CREDIT_RATIONING = "CreditRationing"
    POOLING_AUTARKY = "PoolingAutarky"


_REGION_BY_CODE = (
    Date1Region.COMPLETE_SEPARATION,
    Date1Region.PARTIAL_SEPARATION,
    Date1Region.CREDIT_RATIONING,
    Date1Region.POOLING_AUTARKY,
)


class KeepVsSell(enum.Enum):
    KEEP = "Keep"
    SELL = "Sell"


class Decision(enum.Enum):
    KEEP = "Keep"
    SELL = "Sell"


@dataclass(frozen=True)
class Date1Outcome:
    """The date-1 equilibrium bundle at one price realization."""

    region: Date1Region
    pi1: float
    delta1: float
    alpha: float
    u1_honest: float

    def to_dict(self) -> dict:
        return {
            "region": self.region.value,
            "pi1": self.pi1,
            "delta1": self.delta1,
            "alpha": self.alpha,
            "u1_honest": self.u1_honest,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Date1Outcome":
        return cls(
            region=Date1Region(data["region"]),
            pi1=float(data["pi1"]),
            delta1=float(data["delta1"]),
            alpha=float(data["alpha"]),
            u1_honest=float(data["u1_honest"]),
        )


@dataclass(frozen=True)
class OptimalRepayment:
    R1_star: float
    binding: bool
    u_keep: float


@dataclass(frozen=True)
class Date0Solution:
    """Full date-0 resolution of the combined regime."""

    R1_star: float
    b0: float
    binding: bool
    u_keep: float
    u_sell: float
    decision: Decision

    def to_dict(self) -> dict:
        return {
            "R1_star": self.R1_star,
            "b0": self.b0,
            "binding": self.binding,
            "u_keep": self.u_keep,
            "u_sell": self.u_sell,
            "decision": self.decision.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Date0Solution":
        return cls(
            R1_star=float(data["R1_star"]),
            b0=float(data["b0"]),
            binding=bool(data["binding"]),
            u_keep=float(data["u_keep"]),
            u_sell=float(data["u_sell"]),
            decision=Decision(data["decision"]),
        )


def check_combined_params(params: ModelParams) -> float:
    """Validate the regime's standing assumptions; return the common income y."""
    validate_params(params)
    if params.x != 0.0:
        raise DomainError("combined regime assumes a zero-dividend asset (x = 0)")
    y = params.y  # raises if y1 != y2
    if y <= 0.0:
        raise DomainError("combined regime requires positive income")
    if not params.pi0 < params.beta:
        raise DomainError(
            f"combined regime requires pi0 < beta, got pi0={params.pi0}, beta={params.beta}"
        )
    return y


def default_thresholds(R1: float, y: float) -> tuple[float, float]:
    """(lower, upper) default thresholds: sure default below R1 - y, sure repayment above R1."""
    return R1 - y, R1


def region_boundaries(R1: float, params: ModelParams) -> tuple[float, float, float]:
    """The three region cutoffs (R1 - y, R1 - beta*y, R1) on the p1 axis."""
    y = params.y
    return R1 - y, R1 - params.beta * y, R1


def date1_system(p1, R1, params: ModelParams):
    """Vectorized date-1 equilibrium objects at prices p1 (array or scalar).

    Returns (region_code, pi1, delta1, alpha, u1_honest) as float arrays,
    region codes 0..3 in threshold order.  Boundary ties are closed on the
    left: p1 = R1 belongs to the rationing piece (posterior beta), and the
    posterior only drops to pi0 strictly above R1.  alpha is reported as 1
    outside the rationing piece (in pooling the contract is autarkic, so
    acceptance is moot).
    """
    y = check_combined_params(params)
    beta, pi0 = params.beta, params.pi0
    p = np.asarray(p1, dtype=float)
    if np.any(p < 0.0):
        raise DomainError("prices must be non-negative")
    R = np.broadcast_to(np.asarray(R1, dtype=float), p.shape) if np.ndim(R1) else R1

    comp = p < R - y
    part = (p >= R - y) & (p < R - beta * y)
    ration = (p >= R - beta * y) & (p <= R)
    pool = p > R
    code = np.select([comp, part, ration, pool], [0, 1, 2, 3]).astype(np.int8)

    gap = R - p  # repayment net of resale price
    safe_gap = np.where(part, gap, 1.0)
    pi1 = np.select([comp, part, ration, pool], [1.0, gap / y, beta, pi0])
    if pi0 >= 1.0:
        delta_part = np.zeros_like(p)
        delta_ration = 0.0
    else:
        delta_part = 1.0 - (pi0 / (1.0 - pi0)) * (y / safe_gap - 1.0)
        delta_ration = (beta - pi0) / (beta * (1.0 - pi0))
    delta1 = np.select([comp, part, ration, pool], [1.0, delta_part, delta_ration, 0.0])
    alpha = np.where(ration, gap / (beta * y), 1.0)
    u1 = np.select(
        [comp, part, ration | pool],
        [2.0 * y - R + p, y * np.ones_like(p), (1.0 + beta) * y - R + p],
    )
    return code, pi1, delta1, alpha, u1


def date1_behavior(p1: float, R1: float, params: ModelParams) -> Date1Outcome:
    """Scalar wrapper around date1_system."""
    code, pi1, delta1, alpha, u1 = date1_system(np.asarray([p1]), R1, params)
    return Date1Outcome(
        region=_REGION_BY_CODE[int(code[0])],
        pi1=float(pi1[0]),
        delta1=float(delta1[0]),
        alpha=float(alpha[0]),
        u1_honest=float(u1[0]),
    )


def date1_keep_contract(
    p1: float, pi1: float, params: ModelParams
) -> tuple[Contract, KeepVsSell]:
    """Best keep-and-reborrow contract at date 1, and the keep/sell verdict.

    The contract the honest type would propose if he kept the asset:
        pi1 <  beta: ((1-beta^2)/(1-pi1) p1, 2(1-beta)/(1-pi1) p1)
        pi1 >= beta: (pi1 y + (1-pi1) p1, y)
    Selling weakly dominates for every (p1, pi1), so the verdict is SELL
    (ties included).
    """
    y = check_combined_params(params)
    beta = params.beta
    if p1 <= 0.0:
        raise DomainError(f"p1 must be positive, got {p1}")
    if not (0.0 <= pi1 < 1.0):
        raise DomainError(f"pi1 must lie in [0, 1), got {pi1}")
    if pi1 < beta:
        contract = Contract(
            (1.0 - beta * beta) / (1.0 - pi1) * p1,
            2.0 * (1.0 - beta) / (1.0 - pi1) * p1,
            kappa=True,
        )
    else:
        contract = Contract(pi1 * y + (1.0 - pi1) * p1, y, kappa=True)
    keep = honest_keep_value(p1, 0.0, pi1, params)
    sell = honest_sell_value(p1, 0.0, pi1, params)
    verdict = KeepVsSell.SELL if sell >= keep else KeepVsSell.KEEP
    return contract, verdict


def honest_sell_value(p1, R1, pi1, params: ModelParams):
    """Honest date-1 value of repaying, selling the asset, and re-borrowing on reputation."""
    y = params.y
    beta = params.beta
    p1 = np.asarray(p1, dtype=float)
    pi1 = np.asarray(pi1, dtype=float)
    bonus = np.where(pi1 >= beta, (pi1 - beta) * y, 0.0)
    out = (1.0 + beta) * y - R1 + p1 + bonus
    return out if out.ndim else float(out)


def honest_keep_value(p1, R1, pi1, params: ModelParams):
    """Honest date-1 value of repaying and borrowing against the kept asset."""
    y = params.y
    beta = params.beta
    p1 = np.asarray(p1, dtype=float)
    pi1 = np.asarray(pi1, dtype=float)
    low_branch = pi1 < beta
    safe = np.where(low_branch, 1.0 - pi1, 1.0)  # avoid 0/0 at pi1 = 1
    low = (1.0 - beta) ** 2 / safe * p1
    high = (pi1 - beta) * y + (1.0 - pi1) * p1
    bonus = np.where(low_branch, low, high)
    out = (1.0 + beta) * y - R1 + beta * p1 + bonus
    return out if out.ndim else float(out)


def closed_form_u_keep(R1: float, params: ModelParams) -> float:
    """The quadratic keep value U(R1); exact for y <= R1 <= 2 p0."""
    y = params.y
    beta, pi0, p0 = params.beta, params.pi0, params.p0
    return (
        -(1.0 - pi0) / (4.0 * p0) * R1 * R1
        + (1.0 - beta) * (1.0 + beta * y / (2.0 * p0)) * R1
        + (1.0 - beta) * (pi0 - beta * (1.0 + beta)) * y * y / (4.0 * p0)
        + beta * (1.0 + beta) * y
        + beta * p0
    )


def expected_repayment(R1: float, params: ModelParams) -> float:
    """Competitive date-0 loan size b0 = E[repayment or collateral recovery].

    Integrates the lenders' receipts over p1 ~ U[0, 2 p0]: repaying borrowers
    (mass pi0 + (1-pi0)(1-delta1)) pay R1, defaulters surrender the asset
    worth p1.  The integrand is piecewise linear, so each region's integral
    is taken in closed form after clipping to the support.
    """
    y = check_combined_params(params)
    beta, pi0, p0 = params.beta, params.pi0, params.p0
    if R1 < 0.0:
        raise DomainError(f"R1 must be non-negative, got {R1}")
    top = 2.0 * p0
    lo1, lo2, lo3 = R1 - y, R1 - beta * y, R1
    # (a, b, lo, hi) per region with integrand a + b * p1
    pieces = (
        (pi0 * R1, 1.0 - pi0, 0.0, lo1),                          # complete separation
        (pi0 * y, 1.0, max(lo1, 0.0), lo2),                       # partial separation
        ((pi0 / beta) * R1, 1.0 - pi0 / beta, max(lo2, 0.0), lo3),  # credit rationing
        (R1, 0.0, max(lo3, 0.0), top),                              # pooling
    )
    total = 0.0
    for a, b, lo, hi in pieces:
        lo = min(max(lo, 0.0), top)
        hi = min(max(hi, 0.0), top)
        if hi > lo:
            total += a * (hi - lo) + b * (hi * hi - lo * lo) / 2.0
    return total / top


def date0_objective(R1: float, params: ModelParams) -> tuple[float, float]:
    """(u_keep, b0) at promise R1: closed-form keep value plus the priced loan.

    R1 may not exceed the worst-case feasibility cap 2y.  The closed form is
    the one derived for y <= R1 <= 2 p0; it is evaluated as written outside
    that window (the quadrature oracle covers the general case).
    """
    y = check_combined_params(params)
    if R1 < 0.0:
        raise DomainError(f"R1 must be non-negative, got {R1}")
    if R1 > 2.0 * y:
        raise DomainError(f"promise R1={R1} exceeds the feasibility cap 2y={2.0 * y}")
    return closed_form_u_keep(R1, params), expected_repayment(R1, params)


def unconstrained_R1(params: ModelParams) -> float:
    """Vertex of the keep-value quadratic: (1-beta)(2 p0 + beta y)/(1 - pi0)."""
    y = params.y
    return (1.0 - params.beta) * (2.0 * params.p0 + params.beta * y) / (1.0 - params.pi0)


def binding_income_cap(params: ModelParams) -> float:
    """Income level below which the feasibility cap binds:
    y_bar = p0 / ((1 - pi0)/(1 - beta) - beta/2)."""
    return params.p0 / ((1.0 - params.pi0) / (1.0 - params.beta) - params.beta / 2.0)


def optimal_R1(params: ModelParams) -> OptimalRepayment:
    """Maximizer of the keep value subject to R1 <= 2y."""
    y = check_combined_params(params)
    vertex = unconstrained_R1(params)
    binding = vertex >= 2.0 * y
    r1 = 2.0 * y if binding else vertex
    u_keep, _ = date0_objective(r1, params)
    return OptimalRepayment(R1_star=r1, binding=binding, u_keep=u_keep)


def sell_utility_date0(params: ModelParams) -> float:
    """Utility of selling the asset at date 0 and living in autarky: beta(1+beta) y + p0."""
    return params.beta * (1.0 + params.beta) * params.y + params.p0


def date0_decision(params: ModelParams) -> Date0Solution:
    """Keep-versus-sell at date 0; ties go to Keep."""
    opt = optimal_R1(params)
    _, b0 = date0_objective(opt.R1_star, params)
    u_sell = sell_utility_date0(params)
    decision = Decision.KEEP if opt.u_keep >= u_sell else Decision.SELL
    return Date0Solution(
        R1_star=opt.R1_star,
        b0=b0,
        binding=opt.binding,
        u_keep=opt.u_keep,
        u_sell=u_sell,
        decision=decision,
    )


# --- Lower bound on the prior that makes keeping worthwhile -----------------


def pi0_bound_binding(beta: float, rho: float) -> float:
    """Prior above which the feasibility cap binds: 1 - (1-beta)(rho + beta/2),
    rho = p0/y."""
    return 1.0 - (1.0 - beta) * (rho + beta / 2.0)


def pi0_bound_value_literal(beta: float, rho: float) -> float:
    """Second branch of the keep bound as printed in the source derivation:

        4(1-beta)/(5-beta) * (rho - 2) rho + (beta(3+beta^2) - 4(1+beta^2))/(5-beta)

    The constant term is inconsistent with a direct evaluation of the keep/sell
    comparison (see pi0_bound_value); both values are reported, never merged.
    """
    return (
        4.0 * (1.0 - beta) / (5.0 - beta) * (rho - 2.0) * rho
        + (beta * (3.0 + beta * beta) - 4.0 * (1.0 + beta * beta)) / (5.0 - beta)
    )


def pi0_bound_value(beta: float, rho: float) -> float:
    """Prior at which the capped keep value U(2y) equals the sell value.

    Derived by direct comparison of the closed form at R1 = 2y with
    beta(1+beta) y + p0 (valid for rho >= 1, cap binding):

        4(1-beta)/(5-beta) * rho (rho - 2) + (4(1+beta^2) - beta(3+beta^2))/(5-beta)
    """
    return (
        4.0 * (1.0 - beta) / (5.0 - beta) * rho * (rho - 2.0)
        + (4.0 * (1.0 + beta * beta) - beta * (3.0 + beta * beta)) / (5.0 - beta)
    )


def keep_interval_literal(beta: float) -> tuple[float, float]:
    """p0/y interval inside which the printed bound stays below beta:
    (1 - beta/2, 1 + sqrt(2/(1-beta) - (beta/2)(1 - beta/2)))."""
    lo = 1.0 - beta / 2.0
    hi = 1.0 + math.sqrt(2.0 / (1.0 - beta) - (beta / 2.0) * (1.0 - beta / 2.0))
    return lo, hi


@dataclass(frozen=True)
class Pi0StarResult:
    """Both published and re-derived lower bounds for the keep-supporting prior.

    literal_bound  -- max of the two printed branches, exactly as written
    oracle_bound   -- bisection on pi0 of (max over feasible R1 of the
                      quadrature keep value) against the sell value
    disagreement   -- True when the two differ by more than 1e-3
    """

    branch_binding: float
    branch_value_literal: float
    branch_value_consistent: float
    literal_bound: float
    oracle_bound: float
    oracle_below_beta: bool
    keep_interval: tuple
    disagreement: bool

    def to_dict(self) -> dict:
        return {
            "branch_binding": self.branch_binding,
            "branch_value_literal": self.branch_value_literal,
            "branch_value_consistent": self.branch_value_consistent,
            "literal_bound": self.literal_bound,
            "oracle_bound": self.oracle_bound,
            "oracle_below_beta": self.oracle_below_beta,
            "keep_interval": list(self.keep_interval),
            "disagreement": self.disagreement,
        }


def pi0_star(beta: float, y: float, p0: float, contract_points: int = 4001) -> Pi0StarResult:
    """Lower bound on pi0 above which keeping the asset beats selling it.

    Returns the printed closed-form bound and an independent oracle value
    side by side.  The oracle bisects pi0 over [0, beta], at each trial
    maximizing the quadrature-evaluated keep value over R1 in [0, 2y]; a
    disagreement beyond 1e-3 is flagged rather than resolved.
    """
    from .oracle import pi0_threshold  # local import: oracle depends on this module

    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie strictly in (0, 1), got {beta}")
    if y <= 0.0 or p0 <= 0.0:
        raise DomainError("y and p0 must be positive")
    rho = p0 / y
    b1 = pi0_bound_binding(beta, rho)
    b2_lit = pi0_bound_value_literal(beta, rho)
    b2_fix = pi0_bound_value(beta, rho)
    literal = max(b1, b2_lit)
    oracle, below = pi0_threshold(beta, y, p0, contract_points=contract_points)
    return Pi0StarResult(
        branch_binding=b1,
        branch_value_literal=b2_lit,
        branch_value_consistent=b2_fix,
        literal_bound=literal,
        oracle_bound=oracle,
        oracle_below_beta=below,
        keep_interval=keep_interval_literal(beta),
        disagreement=abs(literal - oracle) > 1e-3,
    )
