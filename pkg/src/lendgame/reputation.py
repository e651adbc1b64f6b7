"""Reputation-only benchmark: borrowing with no asset to pledge.

Without collateral, a known-strategic borrower can never commit, so credit
rests entirely on the lenders' prior pi0 that the borrower is honest.  The
signalling game admits several classes of equilibria (membership is checked
by `lemma1_classify`); the undefeated selection — the equilibrium best for
the honest type — reduces to a three-way region split in (pi0, beta):

    autarky     pi0 < beta
    pooling     beta <= pi0 < 1 - (1 - beta) / (1 + g)
    separating  otherwise

where g = (y2 - y1)/y1 is income growth.  The pooling band is non-empty only
when income is growing (g > 0): a bigger y2 raises the maximal riskless loan
and makes delayed separation worthwhile.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import AUTARKIC_CONTRACT, Contract, DomainError, OutOfRange

__all__ = [
    "RegionLabel",
    "ReputationRegion",
    "ContractPlan",
    "ReputationSolution",
    "Lemma1Result",
    "max_riskless_loan",
    "pooling_utility",
    "separating_utility",
    "pooling_separating_boundary",
    "classify_region",
    "mixed_default_prob",
    "lemma1_classify",
]

_EQ_TOL = 1e-9  # tolerance for the zero-profit equalities


class RegionLabel(enum.Enum):
    AUTARKY = "Autarky"
    POOLING = "Pooling"
    SEPARATING = "Separating"


@dataclass(frozen=True)
class ReputationRegion:
    label: RegionLabel
    #: (pi0 = beta, pi0 = 1 - (1 - beta)/(1 + g)) — the two region boundaries
    boundaries: tuple

    def to_dict(self) -> dict:
        return {"label": self.label.value, "boundaries": list(self.boundaries)}


@dataclass(frozen=True)
class ContractPlan:
    """The (date-0, date-1) contract pair with the strategic type's date-1 mixing."""

    date0: Contract
    date1: Contract
    strategic_default_date1: float

    def __post_init__(self):
        if not (0.0 <= self.strategic_default_date1 <= 1.0):
            raise DomainError("strategic default probability must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "date0": self.date0.to_dict(),
            "date1": self.date1.to_dict(),
            "strategic_default_date1": self.strategic_default_date1,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ContractPlan":
        return cls(
            date0=Contract.from_dict(data["date0"]),
            date1=Contract.from_dict(data["date1"]),
            strategic_default_date1=float(data["strategic_default_date1"]),
        )


@dataclass(frozen=True)
class ReputationSolution:
    region: ReputationRegion
    plan: ContractPlan

    def to_dict(self) -> dict:
        d = self.region.to_dict()
        d["plan"] = [
            [self.plan.date0.b, self.plan.date0.R],
            [self.plan.date1.b, self.plan.date1.R],
        ]
        d["strategic_default_date1"] = self.plan.strategic_default_date1
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ReputationSolution":
        (b0, R1), (b1, R2) = data["plan"]
        return cls(
            region=ReputationRegion(
                label=RegionLabel(data["label"]), boundaries=tuple(data["boundaries"])
            ),
            plan=ContractPlan(
                date0=Contract(b0, R1),
                date1=Contract(b1, R2),
                strategic_default_date1=float(data["strategic_default_date1"]),
            ),
        )


def max_riskless_loan(pi0: float, beta: float, y2: float) -> float:
    """Largest date-1 repayment the honest type can roll over risk-free.

    R_bar = max{ (pi0 - beta) y2 / (1 - beta), 0 }: at this repayment he is
    exactly indifferent between the risk-free roll-over and the pooling
    contract (pi0 y2, y2).  Zero whenever pi0 <= beta.
    """
    _check(pi0, beta)
    if y2 < 0.0:
        raise DomainError("y2 must be non-negative")
    return max((pi0 - beta) * y2 / (1.0 - beta), 0.0)


def pooling_separating_boundary(beta: float, g: float) -> float:
    """pi0 level where early separation starts to beat date-1 pooling."""
    if g <= -1.0:
        raise DomainError("income growth must exceed -1")
    return 1.0 - (1.0 - beta) / (1.0 + g)


def pooling_utility(pi0: float, beta: float, y2: float) -> float:
    """Honest type's utility from pooling at date 1: (1 - beta^2) R_bar."""
    return (1.0 - beta * beta) * max_riskless_loan(pi0, beta, y2)


def separating_utility(pi0: float, beta: float, y1: float, y2: float) -> float:
    """Honest type's utility from separating at date 1.

    (pi0 - beta) y1 + (pi0 - beta^2) R_bar: the early-separation plan borrows
    pi0 (R_bar + y1) at date 0 against certain strategic default.
    """
    rbar = max_riskless_loan(pi0, beta, y2)
    return (pi0 - beta) * y1 + (pi0 - beta * beta) * rbar


def classify_region(pi0: float, beta: float, y1: float, y2: float) -> ReputationSolution:
    """Undefeated-equilibrium region and its contract plan.

    Region boundaries follow the weak-inequality convention: autarky is
    strictly pi0 < beta, pooling includes its lower boundary pi0 = beta,
    separating includes its lower boundary 1 - (1 - beta)/(1 + g).
    """
    _check(pi0, beta)
    if y1 <= 0.0:
        raise DomainError("y1 must be positive (income growth undefined at y1 = 0)")
    if y2 < 0.0:
        raise DomainError("y2 must be non-negative")
    g = (y2 - y1) / y1
    boundary = pooling_separating_boundary(beta, g)
    boundaries = (beta, boundary)
    rbar = max_riskless_loan(pi0, beta, y2)

    if pi0 < beta:
        region = ReputationRegion(RegionLabel.AUTARKY, boundaries)
        plan = ContractPlan(AUTARKIC_CONTRACT, AUTARKIC_CONTRACT, 0.0)
    elif pi0 < boundary:
        region = ReputationRegion(RegionLabel.POOLING, boundaries)
        # Riskless roll-over at date 0, pooling loan at date 1; the strategic
        # type repays at date 1 and defaults for sure at date 2.
        plan = ContractPlan(
            Contract(rbar, rbar), Contract(pi0 * y2, y2), strategic_default_date1=0.0
        )
    else:
        region = ReputationRegion(RegionLabel.SEPARATING, boundaries)
        # Risky date-0 loan priced for certain strategic default, then a
        # riskless roll-over for the (now fully revealed) honest type.
        plan = ContractPlan(
            Contract(pi0 * (rbar + y1), rbar + y1),
            Contract(rbar, rbar),
            strategic_default_date1=1.0,
        )
    return ReputationSolution(region, plan)


def mixed_default_prob(b1: float, R2: float, pi0: float) -> float:
    """Strategic date-1 default probability in a roll-over equilibrium.

    delta = 1 - pi0/(1 - pi0) * (R2/b1 - 1).  Raises OutOfRange when the
    formula leaves [0, 1], i.e. when R2/b1 falls outside [1, 1/pi0].
    """
    if b1 <= 0.0:
        raise DomainError(f"b1 must be positive, got {b1}")
    if not (0.0 < pi0 < 1.0):
        raise DomainError(f"pi0 must lie strictly in (0, 1), got {pi0}")
    delta = 1.0 - (pi0 / (1.0 - pi0)) * (R2 / b1 - 1.0)
    if not (-_EQ_TOL <= delta <= 1.0 + _EQ_TOL):
        raise OutOfRange(
            f"default probability {delta} outside [0, 1]: requires R2/b1 in [1, 1/pi0]"
        )
    return min(max(delta, 0.0), 1.0)


@dataclass(frozen=True)
class Lemma1Result:
    """Equilibrium-class membership of a contract plan.

    `classes` lists every satisfied class in the order checked
    ("I", "II(i)", "II(ii)", "III"); classes can overlap.  `first` is the
    first satisfied class or None; `violations` records, for each failed
    class, the first condition that broke.
    """

    classes: tuple
    violations: dict = field(default_factory=dict)
    mixed_delta1: float | None = None

    @property
    def first(self) -> str | None:
        return self.classes[0] if self.classes else None

    @property
    def is_equilibrium(self) -> bool:
        return bool(self.classes)


def lemma1_classify(
    plan: ContractPlan, pi0: float, beta: float, y1: float, y2: float
) -> Lemma1Result:
    """Check a contract plan against each signalling-equilibrium class.

    Zero-profit equalities hold to 1e-9; all other inequalities are weak.
    A plan may satisfy several classes; all are reported.
    """
    _check(pi0, beta)
    b0, R1 = plan.date0.b, plan.date0.R
    b1, R2 = plan.date1.b, plan.date1.R
    classes: list[str] = []
    violations: dict[str, str] = {}
    mixed: float | None = None

    # Class I — autarky, an equilibrium for every prior.
    if plan.date0.is_autarkic and plan.date1.is_autarkic:
        classes.append("I")
    else:
        violations["I"] = "plan is not autarkic"

    # Class II(i) — certain strategic default at date 1; date-1 loan riskless.
    ok, why = _check_class_ii_i(b0, R1, b1, R2, pi0, beta, y1)
    if ok:
        classes.append("II(i)")
    else:
        violations["II(i)"] = why

    # Class II(ii) — roll-over at date 1 with mixed strategic default.
    ok, why, mixed = _check_class_ii_ii(b0, R1, b1, R2, pi0, beta, y1, y2)
    if ok:
        classes.append("II(ii)")
    else:
        violations["II(ii)"] = why

    # Class III — no strategic default at date 1 (pooling on repayment).
    ok, why = _check_class_iii(b0, R1, b1, R2, pi0, beta, y1, y2)
    if ok:
        classes.append("III")
    else:
        violations["III"] = why

    return Lemma1Result(tuple(classes), violations, mixed)


def _check_class_ii_i(b0, R1, b1, R2, pi0, beta, y1):
    if pi0 < beta * beta:
        return False, f"requires pi0 >= beta^2 = {beta * beta}"
    if abs(b0 - pi0 * R1) > _EQ_TOL:
        return False, f"zero profit b0 = pi0*R1 fails: {b0} vs {pi0 * R1}"
    if abs(b1 - R2) > _EQ_TOL:
        return False, f"date-1 loan must be riskless (b1 = R2): {b1} vs {R2}"
    if R1 < b1 - _EQ_TOL:
        return False, f"certain default needs R1 >= b1: {R1} < {b1}"
    if R1 > y1 + b1 + _EQ_TOL:
        return False, f"feasibility R1 <= y1 + b1 fails: {R1} > {y1 + b1}"
    if pi0 < beta:
        cap = beta * (1.0 - beta) / (beta - pi0) * b1
        if R1 > cap + _EQ_TOL:
            return False, f"participation cap R1 <= beta(1-beta)/(beta-pi0)*b1 fails: {R1} > {cap}"
    return True, ""


def _check_class_ii_ii(b0, R1, b1, R2, pi0, beta, y1, y2):
    if pi0 < beta * beta:
        return False, f"requires pi0 >= beta^2 = {beta * beta}", None
    if b1 <= 0.0:
        return False, "roll-over requires a positive date-1 loan", None
    if abs(b1 - R1) > _EQ_TOL:
        return False, f"roll-over b1 = R1 fails: {b1} vs {R1}", None
    if abs(b0 - pi0 * R2) > _EQ_TOL:
        return False, f"zero profit b0 = pi0*R2 fails: {b0} vs {pi0 * R2}", None
    if R2 > y1 + y2 + _EQ_TOL:
        return False, f"feasibility R2 <= y1 + y2 fails: {R2} > {y1 + y2}", None
    if not (0.0 < pi0 < 1.0):
        return False, "mixing requires pi0 strictly inside (0, 1)", None
    try:
        delta = mixed_default_prob(b1, R2, pi0)
    except OutOfRange as err:
        return False, str(err), None
    return True, "", delta


def _check_class_iii(b0, R1, b1, R2, pi0, beta, y1, y2):
    if pi0 < beta:
        return False, f"requires pi0 >= beta = {beta}"
    if abs(b0 - R1) > _EQ_TOL:
        return False, f"riskless date-0 loan (b0 = R1) fails: {b0} vs {R1}"
    if abs(b1 - pi0 * R2) > _EQ_TOL:
        return False, f"zero profit b1 = pi0*R2 fails: {b1} vs {pi0 * R2}"
    if R1 > y1 + b1 + _EQ_TOL:
        return False, f"feasibility R1 <= y1 + b1 fails: {R1} > {y1 + b1}"
    if R2 > y2 + _EQ_TOL:
        return False, f"feasibility R2 <= y2 fails: {R2} > {y2}"
    return True, ""


def _check(pi0: float, beta: float) -> None:
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie strictly in (0, 1), got {beta}")
    if not (0.0 <= pi0 <= 1.0):
        raise DomainError(f"pi0 must lie in [0, 1], got {pi0}")
