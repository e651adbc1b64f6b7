"""Collateral-only benchmark: a borrower everyone knows to be strategic.

With pi0 = 0 reputation is worthless and only collateralized contracts are
accepted.  When the asset pays no dividend (x = 0) the best the borrower can
do is replicate an outright sale: borrow the expected resale value against a
promise so large that next-date default is certain.  A positive non-pledgeable
dividend x breaks that equivalence — losing x on default is a real cost — and
produces a keep region at date 0 plus a safe/risky contract switch at date 1.

All payoffs in this module are net of the (type-independent) income stream,
matching the way the benchmark's objective separates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import Contract, DomainError

__all__ = [
    "Action",
    "ContractMode",
    "CollateralDecision",
    "date2_default_threshold",
    "date1_contract_switch_threshold",
    "date1_optimal_contract",
    "date1_repayment_threshold",
    "date1_keep_borrow_utility",
    "date1_sell_utility",
    "date0_sell_threshold",
    "date0_keep_value",
    "date0_sell_value",
    "date0_decision",
]


class Action(enum.Enum):
    SELL = "Sell"
    KEEP_AND_BORROW = "KeepAndBorrow"


class ContractMode(enum.Enum):
    SAFE = "Safe"      # repaid with certainty next date
    RISKY = "Risky"    # defaulted on with positive probability


@dataclass(frozen=True)
class CollateralDecision:
    """Date-0 resolution of the collateral-only problem.

    When the action is SELL the contract reported is the payoff-equivalent
    risky loan (it defaults with probability one next date).
    """

    action: Action
    contract: Contract
    threshold: float

    def to_dict(self) -> dict:
        return {
            "action": self.action.value,
            "contract": self.contract.to_dict(),
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CollateralDecision":
        return cls(
            action=Action(data["action"]),
            contract=Contract.from_dict(data["contract"]),
            threshold=float(data["threshold"]),
        )


def date2_default_threshold(R2: float, x: float) -> float:
    """Date-2 default price cutoff: default occurs iff p2 < R2 - x (floored at 0).

    Repaying keeps the asset worth p2 plus its dividend x; defaulting keeps R2.
    """
    if R2 < 0.0 or x < 0.0:
        raise DomainError("R2 and x must be non-negative")
    return max(R2 - x, 0.0)


def date1_contract_switch_threshold(x: float, beta: float) -> float:
    """Price at which the date-1 contract switches from safe to risky: x / (2 (1 - beta))."""
    _check_beta(beta)
    if x < 0.0:
        raise DomainError("x must be non-negative")
    return x / (2.0 * (1.0 - beta))


def date1_optimal_contract(p1: float, x: float, beta: float) -> tuple[Contract, ContractMode]:
    """Best date-1 contract for an asset holder who repaid his date-0 loan.

    Below the switch threshold the borrower rolls a safe (x, x) loan and keeps
    the asset to maturity.  Above it he levers up:

        b1 = p1 + (1 - 2 beta) / p1 * (x / (2 (1 - beta)))^2
        R2 = 2 p1 - beta x / (1 - beta)

    which for x = 0 collapses to (p1, 2 p1) — default at date 2 is then certain
    and the loan replicates a sale.  The (1 - 2 beta) correction is taken as
    written even when beta > 1/2 makes it negative; the grid oracle in the
    test-suite cross-checks it.
    """
    _check_beta(beta)
    if p1 <= 0.0:
        raise DomainError(f"p1 must be positive, got {p1}")
    if x < 0.0:
        raise DomainError("x must be non-negative")
    switch = date1_contract_switch_threshold(x, beta)
    if p1 < switch:
        return Contract(x, x, kappa=True), ContractMode.SAFE
    m = x / (2.0 * (1.0 - beta))
    b1 = p1 + (1.0 - 2.0 * beta) * m * m / p1
    R2 = 2.0 * p1 - beta * x / (1.0 - beta)
    return Contract(b1, R2, kappa=True), ContractMode.RISKY


def date1_keep_borrow_utility(p1: float, R1: float, x: float, beta: float) -> float:
    """Date-1 continuation value (net of income) of repaying R1 and re-borrowing.

    Two branches, matching the safe/risky contract split:
        p1 <  x/(2(1-beta)):  2x - R1 + beta p1
        p1 >= x/(2(1-beta)):  x - R1 + p1 + x^2 / (4 p1 (1 - beta))
    """
    _check_beta(beta)
    if p1 <= 0.0:
        raise DomainError(f"p1 must be positive, got {p1}")
    switch = date1_contract_switch_threshold(x, beta)
    if p1 < switch:
        return 2.0 * x - R1 + beta * p1
    return x - R1 + p1 + x * x / (4.0 * p1 * (1.0 - beta))


def date1_sell_utility(p1: float, R1: float, x: float) -> float:
    """Repay R1, collect the dividend, and sell the asset outright: x - R1 + p1."""
    return x - R1 + p1


def date1_repayment_threshold(R1: float, x: float, beta: float) -> float:
    """Date-1 default cutoff p_hat(R1): the loan is repaid iff p1 >= p_hat.

    Found by zeroing the keep-and-borrow value in whichever branch applies:

        R1 <= 2x                          -> 0              (never default)
        2x < R1 <= 2x + beta x/(2(1-beta)) -> (R1 - 2x)/beta (safe branch root)
        otherwise                          -> upper root of the risky branch
                                             ((R1-x) + sqrt((R1-x)^2 - x^2/(1-beta)))/2
    """
    _check_beta(beta)
    if R1 < 0.0 or x < 0.0:
        raise DomainError("R1 and x must be non-negative")
    cut = 2.0 * x + beta * x / (2.0 * (1.0 - beta))
    if R1 <= 2.0 * x:
        return 0.0
    if R1 <= cut:
        # At R1 == cut the two branches agree by continuity; the middle
        # branch is evaluated.
        return (R1 - 2.0 * x) / beta
    disc = (R1 - x) ** 2 - x * x / (1.0 - beta)
    return 0.5 * ((R1 - x) + math.sqrt(disc))


def date0_sell_threshold(x: float, beta: float) -> float:
    """Date-0 cutoff 2x / (1 - beta^2): the asset is sold iff p0 >= this."""
    _check_beta(beta)
    if x < 0.0:
        raise DomainError("x must be non-negative")
    return 2.0 * x / (1.0 - beta * beta)


def date0_keep_value(p0: float, x: float, beta: float) -> float:
    """Value (net of income) of the keep plan: borrow (2x, 2x), never default: 2x + beta^2 p0."""
    return 2.0 * x + beta * beta * p0


def date0_sell_value(p0: float) -> float:
    """Value (net of income) of selling at date 0: p0."""
    return p0


def date0_decision(p0: float, x: float, beta: float) -> CollateralDecision:
    """Sell-versus-keep at date 0 for the collateral-only borrower.

    Sells whenever p0 >= 2x / (1 - beta^2) (weak inequality: ties sell).
    Selling is reported through its payoff-equivalent risky contract
    (p0, 2 p0 + x + x^2 / (8 p0 (1 - beta))); keeping means the safe (2x, 2x)
    roll-over.  With x = 0 the threshold is 0, so the asset is always sold.
    """
    _check_beta(beta)
    if p0 <= 0.0:
        raise DomainError(f"p0 must be positive, got {p0}")
    if x < 0.0:
        raise DomainError("x must be non-negative")
    threshold = date0_sell_threshold(x, beta)
    if p0 >= threshold:
        R1 = 2.0 * p0 + x + x * x / (8.0 * p0 * (1.0 - beta))
        return CollateralDecision(Action.SELL, Contract(p0, R1, kappa=True), threshold)
    return CollateralDecision(Action.KEEP_AND_BORROW, Contract(2.0 * x, 2.0 * x, kappa=True), threshold)


def _check_beta(beta: float) -> None:
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie strictly in (0, 1), got {beta}")
