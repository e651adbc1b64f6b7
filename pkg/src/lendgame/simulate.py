"""Monte Carlo and population simulations of the combined lending regime.

Three drivers sit on top of the closed forms:

  * `monte_carlo` plays the date-1 continuation game path by path — type
    draw, price draw, the strategic type's mixed default, the lenders' mixed
    acceptance — and aggregates default/selling/posterior statistics.  Paths
    are keyed by a counter-based generator, so results are bitwise identical
    for a fixed seed no matter how many worker threads run the blocks.
  * `olg_simulate` runs overlapping cohorts (young / middle-aged / old) of
    unit mass against one shared price path; each cohort solves the date-0
    problem at its own birth price and then follows the equilibrium play for
    its life-cycle stage.  Masses are deterministic (continuum of borrowers).
  * `constant_price_solve` replaces the uniform price law with a point mass,
    turning the date-0 integral into a single evaluation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import combined
from .core import DomainError, ModelParams, PricePath, path_uniforms, sample_price_path

__all__ = [
    "SimStats",
    "monte_carlo",
    "OLGCohort",
    "OLGState",
    "OLGDateStats",
    "olg_simulate",
    "EquilibriumSummary",
    "constant_price_solve",
]

_CHUNK = 65_536  # fixed work-item size; independent of thread count

# Draw-matrix columns for each simulated path.
_U_P1, _U_TYPE, _U_DEFAULT, _U_ACCEPT = range(4)


@dataclass(frozen=True)
class SimStats:
    """Aggregates of a Monte Carlo run of the date-1 continuation game."""

    n_paths: int
    seed: int
    R1: float
    decision_date0: str
    keep_rate_date0: float
    sell_rate_date0: float
    n_honest: int
    n_strategic: int
    date1_default_rate: float
    strategic_date1_default_rate: float
    strategic_date1_default_se: float
    date2_default_rate: float
    mean_posterior_after_repay: float
    region_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_paths": self.n_paths,
            "seed": self.seed,
            "R1": self.R1,
            "decision_date0": self.decision_date0,
            "keep_rate_date0": self.keep_rate_date0,
            "sell_rate_date0": self.sell_rate_date0,
            "n_honest": self.n_honest,
            "n_strategic": self.n_strategic,
            "date1_default_rate": self.date1_default_rate,
            "strategic_date1_default_rate": self.strategic_date1_default_rate,
            "strategic_date1_default_se": self.strategic_date1_default_se,
            "date2_default_rate": self.date2_default_rate,
            "mean_posterior_after_repay": self.mean_posterior_after_repay,
            "region_counts": dict(self.region_counts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimStats":
        d = dict(data)
        d["region_counts"] = dict(d.get("region_counts", {}))
        return cls(**d)


def _chunk_sums(params: ModelParams, R1: float, seed: int, start: int, count: int) -> np.ndarray:
    """Per-chunk tallies; a pure function of (params, R1, seed, chunk bounds)."""
    u = path_uniforms(seed, start, count, 4)
    p1 = 2.0 * params.p0 * u[:, _U_P1]
    honest = u[:, _U_TYPE] < params.pi0
    code, pi1, delta1, alpha, _ = combined.date1_system(p1, R1, params)

    defaults = (~honest) & (u[:, _U_DEFAULT] < delta1)
    repaid = ~defaults
    wants_loan = repaid & (pi1 >= params.beta)
    loan = wants_loan & (u[:, _U_ACCEPT] < alpha)
    date2_default = loan & ~honest

    out = np.zeros(10, dtype=float)
    out[0] = honest.sum()
    out[1] = defaults.sum()
    out[2] = repaid.sum()
    out[3] = pi1[repaid].sum()
    out[4] = loan.sum()
    out[5] = date2_default.sum()
    out[6:10] = np.bincount(code, minlength=4)
    return out


def monte_carlo(
    params: ModelParams, R1: float, n: int, seed: int, n_jobs: int = 1
) -> SimStats:
    """Simulate n paths of the date-1 game following a date-0 loan with promise R1.

    Borrower types are drawn honest with probability pi0, the price from
    U[0, 2 p0], and the mixed strategies (strategic default, lender
    acceptance) from their equilibrium probabilities at the realized price.
    The run is split into fixed-size chunks whose tallies are reduced in
    index order, so any thread count reproduces the single-threaded result
    bit for bit.
    """
    combined.check_combined_params(params)
    if n <= 0:
        raise DomainError(f"need at least one path, got n={n}")
    if R1 < 0.0:
        raise DomainError(f"R1 must be non-negative, got {R1}")
    starts = list(range(0, n, _CHUNK))
    slots = np.zeros((len(starts), 10))

    def work(i: int) -> None:
        start = starts[i]
        slots[i] = _chunk_sums(params, R1, seed, start, min(_CHUNK, n - start))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(work, range(len(starts))))
    else:
        for i in range(len(starts)):
            work(i)
    tot = slots.sum(axis=0)

    n_honest = int(tot[0])
    n_strategic = n - n_honest
    n_defaults = tot[1]
    n_repaid = tot[2]
    strat_rate = n_defaults / n_strategic if n_strategic else 0.0
    strat_se = (
        float(np.sqrt(strat_rate * (1.0 - strat_rate) / n_strategic)) if n_strategic else 0.0
    )
    decision = combined.date0_decision(params).decision
    region_counts = {
        region.value: int(tot[6 + i]) for i, region in enumerate(combined._REGION_BY_CODE)
    }
    return SimStats(
        n_paths=n,
        seed=seed,
        R1=R1,
        decision_date0=decision.value,
        keep_rate_date0=1.0 if decision is combined.Decision.KEEP else 0.0,
        sell_rate_date0=0.0 if decision is combined.Decision.KEEP else 1.0,
        n_honest=n_honest,
        n_strategic=n_strategic,
        date1_default_rate=float(n_defaults / n),
        strategic_date1_default_rate=float(strat_rate),
        strategic_date1_default_se=strat_se,
        date2_default_rate=float(tot[5] / n),
        mean_posterior_after_repay=float(tot[3] / n_repaid) if n_repaid else 0.0,
        region_counts=region_counts,
    )


# --- Overlapping generations -------------------------------------------------


@dataclass(frozen=True)
class OLGCohort:
    """A cohort's standing after its youth decision."""

    birth_date: int
    kept: bool
    R1: float
    # filled after middle age: masses carrying a date-2 loan
    loan_honest: float = 0.0
    loan_strategic: float = 0.0


@dataclass(frozen=True)
class OLGState:
    """Cross-section of the economy at one date."""

    date: int
    price: float
    cohorts: tuple  # OLGCohort for (young, middle, old); None when not yet born

    def to_dict(self) -> dict:
        return {
            "date": self.date,
            "price": self.price,
            "cohorts": [
                None
                if c is None
                else {
                    "birth_date": c.birth_date,
                    "kept": c.kept,
                    "R1": c.R1,
                    "loan_honest": c.loan_honest,
                    "loan_strategic": c.loan_strategic,
                }
                for c in self.cohorts
            ],
        }


@dataclass(frozen=True)
class OLGDateStats:
    """Per-date cohort masses (each generation has unit mass)."""

    date: int
    price: float
    young_keep_mass: float
    young_sell_mass: float
    young_R1: float
    middle_active: bool
    middle_region: str
    middle_default_mass: float
    middle_repay_mass: float
    middle_autarky_mass: float
    middle_loan_accepted_mass: float
    middle_loan_rejected_mass: float
    middle_no_application_mass: float
    old_active: bool
    old_default_mass: float
    old_repay_mass: float
    old_inactive_mass: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, data: dict) -> "OLGDateStats":
        return cls(**data)


def olg_simulate(
    params: ModelParams,
    periods: int,
    seed: int,
    price_path=None,
    collect_states: bool = False,
):
    """Run `periods` dates of the overlapping-generations economy.

    Every date a young cohort of unit mass is born (honest share pi0) and
    solves the date-0 problem at the current price; the middle-aged cohort
    that borrowed plays the date-1 game at the shared price; the old cohort
    settles its date-2 loans (strategic holders default, honest repay).  The
    price is exogenous and common to all generations; pass `price_path` to
    pin it, otherwise it is sampled from the conditional-uniform law.

    Returns the per-date stats; with collect_states=True, returns
    (stats, states) where states carry the cohort cross-sections.
    """
    combined.check_combined_params(params)
    if periods < 3:
        raise DomainError(f"need at least 3 periods, got {periods}")
    if price_path is None:
        prices = sample_price_path(params.p0, periods - 1, seed).p
    else:
        prices = tuple(price_path.p if isinstance(price_path, PricePath) else price_path)
        if len(prices) < periods:
            raise DomainError(f"price path has {len(prices)} entries, need {periods}")
        if any(p < 0.0 for p in prices):
            raise DomainError("prices must be non-negative")

    pi0 = params.pi0
    stats: list[OLGDateStats] = []
    states: list[OLGState] = []
    young: OLGCohort | None = None
    middle: OLGCohort | None = None
    for t in range(periods):
        p_t = prices[t]
        old = middle
        middle = young

        # Young: solve the keep/sell problem at the current price.
        if p_t > 0.0:
            sol = combined.date0_decision(params.with_(p0=p_t))
            kept = sol.decision is combined.Decision.KEEP
            young_R1 = sol.R1_star if kept else 0.0
        else:
            kept, young_R1 = False, 0.0  # worthless asset: sell trivially
        young = OLGCohort(birth_date=t, kept=kept, R1=young_R1)

        # Middle-aged: date-1 play for the cohort that borrowed last date.
        m_region = ""
        m_default = m_repay = m_autarky = 0.0
        m_acc = m_rej = m_noapp = 0.0
        if middle is not None:
            if middle.kept:
                d1 = combined.date1_behavior(p_t, middle.R1, params)
                m_region = d1.region.value
                m_default = (1.0 - pi0) * d1.delta1
                m_repay = 1.0 - m_default
                strat_repay = (1.0 - pi0) * (1.0 - d1.delta1)
                if d1.pi1 >= params.beta:
                    m_acc = d1.alpha * (pi0 + strat_repay)
                    m_rej = (1.0 - d1.alpha) * (pi0 + strat_repay)
                    middle = OLGCohort(
                        middle.birth_date,
                        middle.kept,
                        middle.R1,
                        loan_honest=d1.alpha * pi0,
                        loan_strategic=d1.alpha * strat_repay,
                    )
                else:
                    m_noapp = pi0 + strat_repay
            else:
                m_autarky = 1.0

        # Old: settle date-2 loans taken at middle age.
        o_default = o_repay = o_inactive = 0.0
        if old is not None:
            o_default = old.loan_strategic
            o_repay = old.loan_honest
            o_inactive = 1.0 - o_default - o_repay

        stats.append(
            OLGDateStats(
                date=t,
                price=p_t,
                young_keep_mass=1.0 if kept else 0.0,
                young_sell_mass=0.0 if kept else 1.0,
                young_R1=young_R1,
                middle_active=middle is not None,
                middle_region=m_region,
                middle_default_mass=m_default,
                middle_repay_mass=m_repay,
                middle_autarky_mass=m_autarky,
                middle_loan_accepted_mass=m_acc,
                middle_loan_rejected_mass=m_rej,
                middle_no_application_mass=m_noapp,
                old_active=old is not None,
                old_default_mass=o_default,
                old_repay_mass=o_repay,
                old_inactive_mass=o_inactive,
            )
        )
        if collect_states:
            states.append(OLGState(date=t, price=p_t, cohorts=(young, middle, old)))
    if collect_states:
        return stats, states
    return stats


# --- Constant asset price ----------------------------------------------------


@dataclass(frozen=True)
class EquilibriumSummary:
    """Regime-level solution when the price is a point mass at p."""

    regime: str
    price: float
    R1_star: float
    b0: float
    u_keep: float
    u_sell: float
    decision: str
    date1: combined.Date1Outcome
    thresholds: tuple  # (R1 - y, R1 - beta y, R1)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "price": self.price,
            "R1_star": self.R1_star,
            "b0": self.b0,
            "u_keep": self.u_keep,
            "u_sell": self.u_sell,
            "decision": self.decision,
            "date1": self.date1.to_dict(),
            "thresholds": list(self.thresholds),
        }


def constant_price_solve(
    params: ModelParams, p: float, R1: float | None = None, n_r1: int = 20_001
) -> EquilibriumSummary:
    """Solve the regime when p_t = p forever (price integrals become point values).

    With a fixed R1 the date-1 game is classified directly; otherwise the
    keep value v(p; R1) — lender receipts plus the discounted honest
    continuation — is maximized over R1 in [0, 2y] on a grid.
    """
    y = combined.check_combined_params(params)
    if p < 0.0:
        raise DomainError(f"price must be non-negative, got {p}")
    pi0, beta = params.pi0, params.beta

    def keep_value(r1s: np.ndarray) -> np.ndarray:
        _, _, delta1, _, u1 = combined.date1_system(
            np.full_like(r1s, p, dtype=float), r1s, params
        )
        repay_mass = pi0 + (1.0 - pi0) * (1.0 - delta1)
        receipts = repay_mass * r1s + (1.0 - repay_mass) * p
        return receipts + beta * u1

    if R1 is None:
        grid = np.linspace(0.0, 2.0 * y, n_r1)
        vals = keep_value(grid)
        i = int(np.argmax(vals))
        R1_star, u_keep = float(grid[i]), float(vals[i])
    else:
        R1_star = float(R1)
        u_keep = float(keep_value(np.asarray([R1_star]))[0])
    d1 = combined.date1_behavior(p, R1_star, params)
    repay_mass = pi0 + (1.0 - pi0) * (1.0 - d1.delta1)
    b0 = repay_mass * R1_star + (1.0 - repay_mass) * p
    u_sell = beta * (1.0 + beta) * y + p
    decision = combined.Decision.KEEP if u_keep >= u_sell else combined.Decision.SELL
    return EquilibriumSummary(
        regime="constant_price",
        price=p,
        R1_star=R1_star,
        b0=b0,
        u_keep=u_keep,
        u_sell=u_sell,
        decision=decision.value,
        date1=d1,
        thresholds=combined.region_boundaries(R1_star, params),
    )
