"""Primitives: parameter validation, budget identity, utility, Bayes, prices."""

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lendgame.core import (
    BorrowerState,
    Contract,
    DomainError,
    IndeterminatePosterior,
    ModelParams,
    NegativeConsumption,
    bayes_update,
    consumption,
    lifetime_utility,
    path_uniforms,
    price_path_matrix,
    sample_price_path,
    validate_params,
)

BASE = ModelParams(beta=0.5, pi0=0.3, y1=1.0, y2=1.0, p0=1.2)


class TestValidateParams:
    def test_accepts_valid(self):
        assert validate_params(BASE) is BASE

    def test_beta_boundary_excluded(self):
        with pytest.raises(DomainError, match="beta"):
            validate_params(BASE.with_(beta=1.0))
        with pytest.raises(DomainError, match="beta"):
            validate_params(BASE.with_(beta=0.0))

    def test_p0_positive(self):
        with pytest.raises(DomainError, match="p0"):
            validate_params(BASE.with_(p0=0.0))

    def test_pi0_range(self):
        with pytest.raises(DomainError, match="pi0"):
            validate_params(BASE.with_(pi0=-0.1))
        with pytest.raises(DomainError, match="pi0"):
            validate_params(BASE.with_(pi0=1.5))

    def test_negative_income_and_dividend(self):
        with pytest.raises(DomainError):
            validate_params(BASE.with_(y1=-1.0))
        with pytest.raises(DomainError):
            validate_params(BASE.with_(x=-0.5))

    def test_non_finite(self):
        with pytest.raises(DomainError):
            validate_params(BASE.with_(p0=float("nan")))


class TestParamsSerialization:
    def test_round_trip(self):
        d = json.loads(json.dumps(BASE.to_dict()))
        assert ModelParams.from_dict(d) == BASE

    def test_y_shorthand(self):
        p = ModelParams.from_dict({"beta": 0.5, "pi0": 0.3, "y": 2.0, "p0": 1.2})
        assert p.y1 == p.y2 == 2.0 and p.x == 0.0

    def test_unknown_key_rejected(self):
        with pytest.raises(DomainError, match="unknown"):
            ModelParams.from_dict({"beta": 0.5, "pi0": 0.3, "y": 1.0, "p0": 1.2, "zeta": 1})

    def test_y_property_requires_flat_income(self):
        with pytest.raises(DomainError):
            _ = ModelParams(beta=0.5, pi0=0.3, y1=1.0, y2=2.0, p0=1.2).y


class TestConsumption:
    def test_direct_substitution(self):
        state = BorrowerState(d=0, a=1, s=1, alpha=1.0)
        c = consumption(y=1.0, R=0.5, state=state, p=2.0, x=0.0, b=0.7)
        assert c == pytest.approx(3.2, abs=1e-12)

    def test_default_zeroes_the_bracket(self):
        for p, b, R in [(2.0, 0.7, 0.5), (100.0, 3.0, 50.0)]:
            state = BorrowerState(d=1, a=1, s=1, alpha=0.3)
            assert consumption(1.0, R, state, p, 0.0, b) == 1.0

    def test_negative_consumption_raises(self):
        state = BorrowerState(d=0, a=0, s=0, alpha=1.0)
        with pytest.raises(NegativeConsumption):
            consumption(y=0.0, R=1.0, state=state, p=1.0, x=0.0, b=0.0)

    def test_state_invariants(self):
        with pytest.raises(DomainError):
            BorrowerState(d=0, a=0, s=1)
        with pytest.raises(DomainError):
            BorrowerState(d=2, a=1, s=0)
        with pytest.raises(DomainError):
            BorrowerState(d=0, a=1, s=0, alpha=1.5)


class TestLifetimeUtility:
    def test_three_ones(self):
        assert lifetime_utility([1.0, 1.0, 1.0], 0.5) == pytest.approx(1.75, abs=1e-12)

    def test_only_date0(self):
        assert lifetime_utility([3.7, 0.0, 0.0], 0.5) == pytest.approx(3.7)

    def test_only_date2(self):
        assert lifetime_utility([0.0, 0.0, 4.0], 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(NegativeConsumption):
            lifetime_utility([1.0, -0.1, 0.0], 0.5)


class TestBayesUpdate:
    def test_no_information(self):
        assert bayes_update(0.2, 0.0) == pytest.approx(0.2, abs=1e-15)

    def test_full_separation(self):
        assert bayes_update(0.2, 1.0) == 1.0

    def test_matches_partial_separation_posterior(self):
        # With promise R1=1.5, price p1=0.8, income y=1 the mixing posterior
        # is (R1 - p1)/y = 0.7 and the implied default probability is
        # 1 - (pi0/(1-pi0)) (y/(R1-p1) - 1).
        pi0, R1, p1, y = 0.2, 1.5, 0.8, 1.0
        delta = 1.0 - (pi0 / (1.0 - pi0)) * (y / (R1 - p1) - 1.0)
        assert delta == pytest.approx(0.892857142857, abs=1e-9)
        assert abs(bayes_update(pi0, delta) - (R1 - p1) / y) < 1e-9

    def test_indeterminate(self):
        with pytest.raises(IndeterminatePosterior):
            bayes_update(0.0, 1.0)

    def test_fixed_points(self):
        for pi in np.linspace(0.01, 1.0, 25):
            assert bayes_update(pi, 0.0) == pytest.approx(pi, abs=1e-15)
            assert bayes_update(pi, 1.0) == 1.0

    def test_monotone_grid(self):
        pis = np.linspace(0.01, 0.99, 100)
        deltas = np.linspace(0.0, 0.99, 100)
        table = np.array([[bayes_update(pi, d) for d in deltas] for pi in pis])
        assert (np.diff(table, axis=1) >= -1e-15).all()  # increasing in delta
        assert (np.diff(table, axis=0) >= -1e-15).all()  # increasing in prior

    @given(
        pi=st.floats(min_value=0.0, max_value=1.0, exclude_min=True),
        delta=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_posterior_bounds(self, pi, delta):
        post = bayes_update(pi, delta)
        assert pi - 1e-12 <= post <= 1.0


class TestPricePaths:
    def test_deterministic(self):
        a = sample_price_path(1.2, 2, seed=7)
        b = sample_price_path(1.2, 2, seed=7)
        assert a.p == b.p
        c = sample_price_path(1.2, 2, seed=8)
        assert a.p != c.p

    def test_support_bounds(self):
        paths = price_path_matrix(1.0, 2, 50_000, seed=3)
        assert (paths[:, 1] <= 2.0).all() and (paths[:, 2] <= 4.0).all()
        assert (paths >= 0.0).all()

    def test_mean_of_p1(self):
        n = 1_000_000
        paths = price_path_matrix(1.2, 1, n, seed=11)
        se = 2 * 1.2 / np.sqrt(12 * n)
        assert abs(paths[:, 1].mean() - 1.2) < 3 * se

    def test_martingale_conditional_mean(self):
        # p_{t+1}/(2 p_t) ~ U[0,1): the conditional mean property holds iff
        # these ratios average 1/2.
        n = 400_000
        paths = price_path_matrix(0.7, 2, n, seed=5)
        for t in (0, 1):
            ratio = paths[:, t + 1] / (2.0 * paths[:, t])
            assert abs(ratio.mean() - 0.5) < 3.0 / np.sqrt(12 * n)

    def test_counter_based_contract(self):
        # A path's draws depend only on (seed, path index, draw index).
        full = path_uniforms(9, 0, 300, 4)
        for i in (0, 1, 99, 255, 299):
            single = path_uniforms(9, i, 1, 4)[0]
            assert np.array_equal(full[i], single)
        # chunk boundaries do not matter
        split = np.vstack([path_uniforms(9, 0, 113, 4), path_uniforms(9, 113, 187, 4)])
        assert np.array_equal(full, split)

    def test_matrix_matches_single_path(self):
        m = price_path_matrix(1.2, 2, 3, seed=21)
        single = sample_price_path(1.2, 2, seed=21)
        assert np.allclose(m[0], single.p)

    def test_bad_args(self):
        with pytest.raises(DomainError):
            sample_price_path(0.0, 2, 1)
        with pytest.raises(DomainError):
            path_uniforms(-1, 0, 10, 2)


class TestContract:
    def test_autarkic(self):
        assert Contract(0.0, 0.0).is_autarkic
        assert not Contract(1.0, 2.0).is_autarkic

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            Contract(-1.0, 0.0)
        with pytest.raises(DomainError):
            Contract(0.0, -2.0)

    def test_round_trip(self):
        c = Contract(1.5, 2.5, kappa=True)
        assert Contract.from_dict(json.loads(json.dumps(c.to_dict()))) == c
