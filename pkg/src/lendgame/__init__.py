"""lendgame: a three-date lending game with strategic default, collateral,
and reputation.

Closed-form equilibrium objects for three regimes — collateral only,
reputation only, and both channels combined — each paired with an
independent numerical oracle, plus Monte Carlo and overlapping-generations
simulation of default dynamics.
"""

from .core import (
    AUTARKIC_CONTRACT,
    BorrowerState,
    Contract,
    DomainError,
    IndeterminatePosterior,
    ModelParams,
    NegativeConsumption,
    OutOfRange,
    PricePath,
    RangeError,
    bayes_update,
    consumption,
    lifetime_utility,
    sample_price_path,
    validate_params,
)

__version__ = "0.1.0"

__all__ = [
    "AUTARKIC_CONTRACT",
    "BorrowerState",
    "Contract",
    "DomainError",
    "IndeterminatePosterior",
    "ModelParams",
    "NegativeConsumption",
    "OutOfRange",
    "PricePath",
    "RangeError",
    "bayes_update",
    "consumption",
    "lifetime_utility",
    "sample_price_path",
    "validate_params",
    "__version__",
]
