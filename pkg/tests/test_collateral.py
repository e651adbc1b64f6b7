"""Collateral-only benchmark: thresholds, contracts, and the grid oracle."""

import numpy as np
import pytest

from lendgame.collateral import (
    Action,
    ContractMode,
    date0_decision,
    date0_keep_value,
    date0_sell_threshold,
    date0_sell_value,
    date1_contract_switch_threshold,
    date1_keep_borrow_utility,
    date1_optimal_contract,
    date1_repayment_threshold,
    date1_sell_utility,
    date2_default_threshold,
)
from lendgame.oracle import collateral_date1_grid_max


class TestDate2Threshold:
    def test_no_dividend(self):
        assert date2_default_threshold(3.0, 0.0) == 3.0

    def test_with_dividend(self):
        assert date2_default_threshold(3.0, 1.0) == 2.0

    def test_floor_at_zero(self):
        assert date2_default_threshold(0.5, 1.0) == 0.0


class TestDate1Contract:
    def test_zero_dividend_replicates_sale(self):
        contract, mode = date1_optimal_contract(3.0, 0.0, 0.5)
        assert mode is ContractMode.RISKY
        assert contract.b == pytest.approx(3.0) and contract.R == pytest.approx(6.0)

    def test_safe_branch(self):
        # switch threshold x/(2(1-beta)) = 1, so p1 = 0.8 rolls the safe (x, x)
        assert date1_contract_switch_threshold(1.0, 0.5) == pytest.approx(1.0)
        contract, mode = date1_optimal_contract(0.8, 1.0, 0.5)
        assert mode is ContractMode.SAFE
        assert (contract.b, contract.R) == (1.0, 1.0)

    def test_risky_branch_at_half_beta(self):
        # 1 - 2 beta = 0 kills the correction term
        contract, mode = date1_optimal_contract(2.0, 1.0, 0.5)
        assert mode is ContractMode.RISKY
        assert contract.b == pytest.approx(2.0, abs=1e-12)
        assert contract.R == pytest.approx(3.0, abs=1e-12)

    def test_risky_branch_against_grid_oracle(self):
        b1, r2, _ = collateral_date1_grid_max(2.0, 1.0, 0.5)
        assert b1 == pytest.approx(2.0, abs=1e-3)
        assert r2 == pytest.approx(3.0, abs=2e-3)

    @pytest.mark.parametrize("seed", range(4))
    def test_oracle_value_equivalence(self, seed):
        # closed-form contract value vs brute-force grid maximization
        rng = np.random.default_rng(seed)
        for _ in range(5):
            beta = rng.uniform(0.2, 0.9)
            x = rng.uniform(0.0, 2.0)
            p1 = rng.uniform(0.3, 4.0)
            closed = date1_keep_borrow_utility(p1, 0.0, x, beta)
            _, _, grid_val = collateral_date1_grid_max(p1, x, beta)
            assert grid_val == pytest.approx(closed, abs=1e-3)


class TestDate1RepaymentThreshold:
    def test_never_defaults_branch(self):
        assert date1_repayment_threshold(1.5, 1.0, 0.5) == 0.0

    def test_middle_branch_at_cut(self):
        # R1 = 2.5 is exactly the branch cut 2x + beta x / (2(1-beta));
        # the middle branch is evaluated and both branches agree there.
        assert date1_repayment_threshold(2.5, 1.0, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_upper_branch_root(self):
        p_hat = date1_repayment_threshold(4.0, 1.0, 0.5)
        assert p_hat == pytest.approx(2.822876, abs=1e-6)
        assert abs(date1_keep_borrow_utility(p_hat, 4.0, 1.0, 0.5)) < 1e-9

    def test_zero_dividend_reduces_to_promise(self):
        for r1 in (0.5, 1.0, 3.0):
            assert date1_repayment_threshold(r1, 0.0, 0.5) == pytest.approx(r1, abs=1e-12)

    def test_continuous_and_nondecreasing(self):
        x, beta = 1.0, 0.6
        r1s = np.linspace(0.0, 10.0 * x, 5000)
        vals = np.array([date1_repayment_threshold(r, x, beta) for r in r1s])
        assert (np.diff(vals) >= -1e-12).all()
        # continuity: no jump exceeds the grid scale
        assert np.max(np.abs(np.diff(vals))) < 0.05


class TestDominance:
    def test_borrowing_dominates_selling(self):
        # keep-and-borrow beats sell-right-away everywhere on a dense grid
        x, beta, R1 = 1.0, 0.5, 0.7
        p1 = np.linspace(1e-3, 8.0, 10_000)
        borrow = np.array([date1_keep_borrow_utility(p, R1, x, beta) for p in p1])
        sell = np.array([date1_sell_utility(p, R1, x) for p in p1])
        assert (borrow >= sell - 1e-12).all()

    def test_sale_equivalence_without_dividend(self):
        # risky contract value -R1 + b1 equals -R1 + p1 exactly when x = 0
        for p1 in (0.5, 1.0, 2.7):
            contract, _ = date1_optimal_contract(p1, 0.0, 0.5)
            assert contract.b == p1


class TestDate0:
    def test_keep_below_threshold(self):
        dec = date0_decision(2.0, 1.0, 0.5)
        assert dec.action is Action.KEEP_AND_BORROW
        assert (dec.contract.b, dec.contract.R) == (2.0, 2.0)
        assert dec.threshold == pytest.approx(8.0 / 3.0, abs=1e-12)

    def test_sell_above_threshold(self):
        dec = date0_decision(3.0, 1.0, 0.5)
        assert dec.action is Action.SELL
        assert dec.contract.b == pytest.approx(3.0)
        assert dec.contract.R == pytest.approx(7.083333, abs=1e-6)
        # value comparison behind the rule: p0 vs 2x + beta^2 p0
        assert date0_sell_value(3.0) > date0_keep_value(3.0, 1.0, 0.5) == pytest.approx(2.75)

    def test_tie_sells(self):
        p_hat = date0_sell_threshold(1.0, 0.5)
        assert date0_decision(p_hat, 1.0, 0.5).action is Action.SELL
        assert date0_decision(p_hat * (1 - 1e-12), 1.0, 0.5).action is Action.KEEP_AND_BORROW

    def test_zero_dividend_always_sells(self):
        for p0 in (0.01, 1.0, 117.0):
            dec = date0_decision(p0, 0.0, 0.5)
            assert dec.action is Action.SELL
            assert (dec.contract.b, dec.contract.R) == (p0, 2.0 * p0)

    def test_threshold_monotone_in_x_and_beta(self):
        xs = np.linspace(0.0, 3.0, 50)
        betas = np.linspace(0.05, 0.95, 50)
        in_x = [date0_sell_threshold(x, 0.5) for x in xs]
        in_b = [date0_sell_threshold(1.0, b) for b in betas]
        assert (np.diff(in_x) >= 0).all()
        assert (np.diff(in_b) >= 0).all()
