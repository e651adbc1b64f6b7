"""Model primitives shared by every lending regime.

A borrower lives for three dates (0, 1, 2), consumes with linear utility
discounted at rate beta, earns non-financial income y_t, and starts out
holding one indivisible asset whose price follows the conditional-uniform
martingale p_{t+1} | p_t ~ U[0, 2 p_t].  Lenders are competitive, live two
dates, and hold a prior pi0 that the borrower is the "honest" type (one who
never defaults).  Everything downstream — the collateral-only benchmark,
the reputation-only benchmark, and the combined regime — is built from the
pieces in this module:

  * ModelParams / Contract / BorrowerState / PricePath value types,
  * the within-period budget identity (consumption),
  * discounted lifetime utility,
  * Bayesian updating of the honesty posterior after repayment,
  * counter-based uniform price-path sampling (deterministic per
    (seed, path index, date index), independent of how work is chunked).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "DomainError",
    "NegativeConsumption",
    "IndeterminatePosterior",
    "OutOfRange",
    "RangeError",
    "ModelParams",
    "Contract",
    "AUTARKIC_CONTRACT",
    "BorrowerState",
    "PricePath",
    "validate_params",
    "consumption",
    "lifetime_utility",
    "bayes_update",
    "sample_price_path",
    "path_uniforms",
    "price_path_matrix",
]

#: Absolute tolerance for closed-form comparisons throughout the package.
#: Every formula in the model is a low-degree rational expression, so 1e-9
#: is loose relative to double precision but tight relative to the economics.
TOL = 1e-9


class DomainError(ValueError):
    """A parameter or argument violates a model invariant."""


class RangeError(DomainError):
    """A sweep or grid range is empty or incorrectly ordered."""


class NegativeConsumption(ValueError):
    """The budget identity produced c < 0: the plan is infeasible.

    Raised, never clamped — non-negative consumption is the implicit
    borrowing restriction that disciplines the honest type's contracts.
    """


class IndeterminatePosterior(ValueError):
    """Bayes update hit 0/0 (zero prior combined with certain default)."""


class OutOfRange(ValueError):
    """A probability formula evaluated outside [0, 1]."""


@dataclass(frozen=True)
class ModelParams:
    """Primitives of the lending game.

    beta  -- discount factor, 0 < beta < 1
    pi0   -- lenders' prior that the borrower is honest, in [0, 1]
    y1,y2 -- non-financial income at dates 1 and 2 (date-0 income is zero)
    p0    -- initial asset price, > 0
    x     -- per-period non-pledgeable dividend (0 outside the
             dividend-asset benchmark)
    """

    beta: float
    pi0: float
    y1: float
    y2: float
    p0: float
    x: float = 0.0

    @property
    def y(self) -> float:
        """Common income level; only defined when y1 == y2."""
        if self.y1 != self.y2:
            raise DomainError("y is only defined for flat income (y1 == y2)")
        return self.y1

    @property
    def income_growth(self) -> float:
        """g = (y2 - y1) / y1."""
        if self.y1 <= 0:
            raise DomainError("income growth requires y1 > 0")
        return (self.y2 - self.y1) / self.y1

    def with_(self, **overrides) -> "ModelParams":
        return replace(self, **overrides)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "pi0": self.pi0,
            "y1": self.y1,
            "y2": self.y2,
            "p0": self.p0,
            "x": self.x,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        """Build params from a JSON-style mapping.

        Accepts ``y`` as shorthand for setting both y1 and y2.
        """
        d = dict(data)
        if "y" in d:
            y = d.pop("y")
            d.setdefault("y1", y)
            d.setdefault("y2", y)
        known = {"beta", "pi0", "y1", "y2", "p0", "x"}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown parameter keys: {sorted(unknown)}")
        missing = {"beta", "pi0", "y1", "y2", "p0"} - set(d)
        if missing:
            raise DomainError(f"missing parameter keys: {sorted(missing)}")
        return cls(
            beta=float(d["beta"]),
            pi0=float(d["pi0"]),
            y1=float(d["y1"]),
            y2=float(d["y2"]),
            p0=float(d["p0"]),
            x=float(d.get("x", 0.0)),
        )


def validate_params(params: ModelParams) -> ModelParams:
    """Check every primitive invariant; return the params unchanged if OK."""
    if not (0.0 < params.beta < 1.0):
        raise DomainError(f"beta must lie strictly in (0, 1), got {params.beta}")
    if not (0.0 <= params.pi0 <= 1.0):
        raise DomainError(f"pi0 must lie in [0, 1], got {params.pi0}")
    if params.y1 < 0.0 or params.y2 < 0.0:
        raise DomainError(f"incomes must be non-negative, got y1={params.y1}, y2={params.y2}")
    if not params.p0 > 0.0:
        raise DomainError(f"p0 must be strictly positive, got {params.p0}")
    if params.x < 0.0:
        raise DomainError(f"x must be non-negative, got {params.x}")
    for name in ("beta", "pi0", "y1", "y2", "p0", "x"):
        v = getattr(params, name)
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v}")
    return params


@dataclass(frozen=True)
class Contract:
    """A one-period debt contract: borrow b now, promise R next date.

    kappa flags whether the asset is pledged as collateral.  The autarkic
    contract is (0, 0, False).
    """

    b: float
    R: float
    kappa: bool = False

    def __post_init__(self):
        if self.b < 0.0:
            raise DomainError(f"loan size must be non-negative, got b={self.b}")
        if self.R < 0.0:
            raise DomainError(f"repayment must be non-negative, got R={self.R}")

    @property
    def is_autarkic(self) -> bool:
        return self.b == 0.0 and self.R == 0.0

    def to_dict(self) -> dict:
        return {"b": self.b, "R": self.R, "kappa": self.kappa}

    @classmethod
    def from_dict(cls, data: dict) -> "Contract":
        return cls(b=float(data["b"]), R=float(data["R"]), kappa=bool(data.get("kappa", False)))


AUTARKIC_CONTRACT = Contract(0.0, 0.0, False)


@dataclass(frozen=True)
class BorrowerState:
    """Within-period action profile entering the budget identity.

    d     -- default indicator (1 = defaulted on the maturing loan)
    a     -- beginning-of-period asset holding
    s     -- selling indicator (requires s <= a)
    alpha -- probability the lender accepts the newly offered contract
    """

    d: int
    a: int
    s: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.d not in (0, 1) or self.a not in (0, 1) or self.s not in (0, 1):
            raise DomainError("d, a, s must all be binary")
        if self.s > self.a:
            raise DomainError("cannot sell an asset that is not held (s <= a)")
        if not (0.0 <= self.alpha <= 1.0):
            raise DomainError(f"acceptance probability must lie in [0, 1], got {self.alpha}")


def consumption(y: float, R: float, state: BorrowerState, p: float, x: float, b: float) -> float:
    """Within-period consumption c = y + (1 - d) [ (x + p s) a - R + alpha b ].

    Default severs the entire financial branch: the defaulter walks away
    with his income only.  Raises NegativeConsumption for c < 0 instead of
    clamping, because a negative value signals an infeasible plan.
    """
    c = y + (1 - state.d) * ((x + p * state.s) * state.a - R + state.alpha * b)
    if c < 0.0:
        raise NegativeConsumption(
            f"consumption {c} < 0 (y={y}, R={R}, p={p}, x={x}, b={b}, state={state})"
        )
    return c


def lifetime_utility(c, beta: float) -> float:
    """Discounted linear utility  sum_t beta^t c_t."""
    cs = np.asarray(c, dtype=float)
    if np.any(cs < 0.0):
        raise NegativeConsumption(f"consumption sequence has negative entries: {cs}")
    weights = beta ** np.arange(cs.shape[-1])
    return float(cs @ weights)


def bayes_update(pi_prev: float, delta: float) -> float:
    """Posterior that the borrower is honest after observing repayment.

    The strategic type defaults with probability delta, so conditional on
    repayment:  pi' = pi / (pi + (1 - pi)(1 - delta)).
    """
    if not (0.0 <= pi_prev <= 1.0):
        raise DomainError(f"prior must lie in [0, 1], got {pi_prev}")
    if not (0.0 <= delta <= 1.0):
        raise DomainError(f"default probability must lie in [0, 1], got {delta}")
    denom = pi_prev + (1.0 - pi_prev) * (1.0 - delta)
    if denom == 0.0:
        raise IndeterminatePosterior(
            "repayment has probability zero (pi_prev=0 and delta=1); posterior is 0/0"
        )
    return pi_prev / denom


@dataclass(frozen=True)
class PricePath:
    """A realized price sequence p_0, p_1, ..., p_T."""

    p: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.p:
            raise DomainError("price path must be non-empty")
        if self.p[0] <= 0.0:
            raise DomainError(f"initial price must be positive, got {self.p[0]}")

    def __len__(self) -> int:
        return len(self.p)

    def __getitem__(self, t: int) -> float:
        return self.p[t]


# Fixed block width for counter-based path sampling.  Path i always maps to
# (block i // _BLOCK, row i % _BLOCK), so a path's draws never depend on how
# many paths are requested or on the degree of parallelism.
_BLOCK = 65536


def _block_uniforms(seed: int, block_index: int, n_rows: int, n_draws: int) -> np.ndarray:
    key = np.array([seed, block_index], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    # Row-major fill: row i consumes stream words [i*n_draws, (i+1)*n_draws),
    # so a partial block is a prefix of the full block.
    return gen.random((n_rows, n_draws))


def path_uniforms(seed: int, start_path: int, n_paths: int, n_draws: int) -> np.ndarray:
    """Uniform draws u[i, t] for paths start_path .. start_path + n_paths - 1.

    Counter-based: entry (i, t) is a pure function of (seed, start_path + i, t).
    """
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    if n_paths < 0 or n_draws <= 0:
        raise DomainError("need n_paths >= 0 and n_draws >= 1")
    out = np.empty((n_paths, n_draws))
    i = 0
    while i < n_paths:
        gpath = start_path + i
        blk, row = divmod(gpath, _BLOCK)
        take = min(n_paths - i, _BLOCK - row)
        full = _block_uniforms(seed, blk, row + take, n_draws)
        out[i : i + take] = full[row : row + take]
        i += take
    return out


def sample_price_path(p0: float, dates: int, seed: int) -> PricePath:
    """Draw p_1 .. p_dates with p_{t+1} | p_t ~ U[0, 2 p_t], given p_0.

    Deterministic in the seed; identical to row 0 of price_path_matrix.
    """
    if p0 <= 0.0:
        raise DomainError(f"p0 must be positive, got {p0}")
    if dates < 0:
        raise DomainError(f"dates must be non-negative, got {dates}")
    if dates == 0:
        return PricePath((p0,))
    u = path_uniforms(seed, 0, 1, dates)[0]
    prices = [p0]
    for t in range(dates):
        prices.append(2.0 * prices[-1] * u[t])
    return PricePath(tuple(prices))


def price_path_matrix(
    p0: float, dates: int, n_paths: int, seed: int, start_path: int = 0
) -> np.ndarray:
    """(n_paths, dates + 1) matrix of price paths, column 0 fixed at p0."""
    if p0 <= 0.0:
        raise DomainError(f"p0 must be positive, got {p0}")
    u = path_uniforms(seed, start_path, n_paths, max(dates, 1))
    out = np.empty((n_paths, dates + 1))
    out[:, 0] = p0
    for t in range(dates):
        out[:, t + 1] = 2.0 * out[:, t] * u[:, t]
    return out
