"""Command-line front end.

Subcommands: solve, classify, thresholds, verify, sweep, simulate, olg,
figures.  Model primitives are given as flags (or a --config JSON file whose
entries override the flags); results are written as JSON or bit-stable CSV.
Exit codes: 0 success, 2 invalid parameters or ranges, 3 verification
residuals above tolerance.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import collateral, combined, oracle, reputation, simulate as sim
from .core import DomainError, ModelParams, RangeError, validate_params
from .figures import (
    FIG2_HEADER,
    FIG3_HEADER,
    fig2_rows,
    fig3_rows,
    format_value,
    render_fig2,
    render_fig3,
    write_csv,
)

_PARAM_KEYS = ("beta", "pi0", "y", "y1", "y2", "p0", "x")


def _param_options(fn):
    for key in reversed(_PARAM_KEYS):
        fn = click.option(f"--{key}", type=float, default=None)(fn)
    fn = click.option(
        "--config",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="JSON file whose entries override the flags.",
    )(fn)
    return fn


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainError(f"config {path} must hold a JSON object")
    return data


def _merge(config: dict, **flags) -> dict:
    merged = {k: v for k, v in flags.items() if v is not None}
    merged.update(config)  # config wins over individual flags
    return merged


def _build_params(merged: dict, need_p0: bool = True) -> ModelParams:
    raw = {k: merged[k] for k in _PARAM_KEYS if k in merged}
    if not need_p0:
        raw.setdefault("p0", 1.0)  # regime has no asset; the price is unused
    missing = [k for k in ("beta", "pi0", "p0") if k not in raw]
    if missing:
        raise DomainError(f"missing required parameters: {missing}")
    if "y" not in raw and ("y1" not in raw or "y2" not in raw):
        raise DomainError("provide --y or both --y1 and --y2")
    return validate_params(ModelParams.from_dict(raw))


def _default_seed() -> int:
    return int(os.environ.get("DCE_SEED", "0"))


def _pick_seed(merged: dict, seed) -> int:
    if "seed" in merged:
        return int(merged["seed"])
    if seed is not None:
        return int(seed)
    return _default_seed()


def _emit_json(payload, out) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out in (None, "-"):
        click.echo(text)
    else:
        Path(out).write_text(text + "\n")


def _emit_rows(header, rows, out) -> None:
    if out in (None, "-"):
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join(format_value(v) for v in row))
    else:
        write_csv(out, header, rows)


@click.group()
def cli():
    """Strategic-default lending model: solvers, sweeps, simulation, figures."""


@cli.command()
@_param_options
@click.option("--regime", type=click.Choice(["combined", "collateral", "reputation"]), required=True)
@click.option("--out", default="-")
def solve(config, regime, out, **flags):
    """Solve the date-0 problem for one regime."""
    merged = _merge(_load_config(config), **flags)
    if regime == "collateral":
        beta = _require(merged, "beta")
        p0 = _require(merged, "p0")
        x = float(merged.get("x", 0.0))
        _emit_json(collateral.date0_decision(p0, x, beta).to_dict(), out)
        return
    if regime == "combined":
        params = _build_params(merged)
        _emit_json(combined.date0_decision(params).to_dict(), out)
    else:
        params = _build_params(merged, need_p0=False)
        sol = reputation.classify_region(params.pi0, params.beta, params.y1, params.y2)
        _emit_json(sol.to_dict(), out)


def _require(merged: dict, key: str) -> float:
    if key not in merged:
        raise DomainError(f"missing required parameter: {key}")
    return float(merged[key])


@cli.command()
@_param_options
@click.option("--regime", type=click.Choice(["reputation", "combined"]), default="reputation")
@click.option("--p1", type=float, default=None, help="date-1 price (combined regime)")
@click.option("--r1", "--R1", "r1", type=float, default=None, help="date-0 promise (combined regime)")
@click.option("--out", default="-")
def classify(config, regime, p1, r1, out, **flags):
    """Classify the equilibrium region (reputation) or date-1 outcome (combined)."""
    merged = _merge(_load_config(config), **flags)
    if regime == "reputation":
        params = _build_params(merged, need_p0=False)
        sol = reputation.classify_region(params.pi0, params.beta, params.y1, params.y2)
        _emit_json(sol.to_dict(), out)
        return
    params = _build_params(merged)
    p1 = merged.get("p1", p1)
    r1 = merged.get("R1", merged.get("r1", r1))
    if p1 is None or r1 is None:
        raise DomainError("combined classification needs --p1 and --r1")
    _emit_json(combined.date1_behavior(float(p1), float(r1), params).to_dict(), out)


@cli.command()
@_param_options
@click.option("--r1", "--R1", "r1", type=float, default=None)
@click.option("--r2", "--R2", "r2", type=float, default=None)
@click.option("--out", default="-")
def thresholds(config, r1, r2, out, **flags):
    """Report every price threshold implied by the parameters."""
    merged = _merge(_load_config(config), **flags)
    beta = _require(merged, "beta")
    x = float(merged.get("x", 0.0))
    r1 = merged.get("R1", merged.get("r1", r1))
    r2 = merged.get("R2", merged.get("r2", r2))
    payload = {
        "collateral": {
            "date0_sell_threshold": collateral.date0_sell_threshold(x, beta),
            "date1_contract_switch": collateral.date1_contract_switch_threshold(x, beta),
        }
    }
    if r1 is not None:
        payload["collateral"]["date1_repayment_threshold"] = collateral.date1_repayment_threshold(
            float(r1), x, beta
        )
    if r2 is not None:
        payload["collateral"]["date2_default_threshold"] = collateral.date2_default_threshold(
            float(r2), x
        )
    if r1 is not None and "pi0" in merged and "p0" in merged and ("y" in merged or "y1" in merged):
        params = _build_params(merged)
        lo, mid, hi = combined.region_boundaries(float(r1), params)
        payload["combined"] = {
            "sure_default_below": lo,
            "rationing_from": mid,
            "sure_repayment_above": hi,
        }
    _emit_json(payload, out)


@cli.command()
@_param_options
@click.option("--r1", "--R1", "r1", type=float, default=None, help="override the solved promise")
@click.option("--price-points", type=int, default=10_000)
@click.option("--tolerance", type=float, default=1e-9)
@click.option("--out", default="-")
def verify(config, r1, price_points, tolerance, out, **flags):
    """Check equilibrium residuals on a price grid; exit 3 if any exceed tolerance."""
    merged = _merge(_load_config(config), **flags)
    grid = oracle.GridSpec(price_points=price_points, tolerance=tolerance)
    cases = []
    if any(k in merged for k in _PARAM_KEYS):
        params = _build_params(merged)
        use_r1 = float(merged.get("R1", merged.get("r1", r1)) or combined.optimal_R1(params).R1_star)
        cases.append((params, use_r1))
    else:
        cases.extend(oracle.DEFAULT_VERIFY_CASES)
    reports = []
    worst = 0.0
    for params, use_r1 in cases:
        report = oracle.grid_verify_date1(params, use_r1, grid)
        worst = max(worst, report.max_residual)
        entry = report.to_dict()
        entry["params"] = params.to_dict()
        entry["R1"] = use_r1
        reports.append(entry)
    _emit_json({"tolerance": tolerance, "worst_residual": worst, "cases": reports}, out)
    if worst >= tolerance:
        sys.exit(3)


_SWEEP_AXES = ("beta", "pi0", "y", "p0", "x", "R1")


@cli.command()
@_param_options
@click.option("--axis", type=click.Choice(_SWEEP_AXES), required=True)
@click.option("--lo", type=float, required=True)
@click.option("--hi", type=float, required=True)
@click.option("--step", type=float, required=True)
@click.option("--regime", type=click.Choice(["combined", "collateral", "reputation"]), default="combined")
@click.option("--out", default="-")
def sweep(config, axis, lo, hi, step, regime, out, **flags):
    """Re-solve along one parameter axis and emit a CSV table."""
    merged = _merge(_load_config(config), **flags)
    if lo >= hi:
        raise RangeError(f"empty sweep range: lo={lo} >= hi={hi}")
    if step <= 0.0:
        raise RangeError(f"step must be positive, got {step}")
    values = []
    v = lo
    while v <= hi + 1e-12:
        values.append(round(v, 12))
        v += step

    rows = []
    if axis == "R1":
        params = _build_params(merged)
        header = ("R1", "u_keep", "b0")
        for v in values:
            u_keep, b0 = combined.date0_objective(v, params)
            rows.append((v, u_keep, b0))
    elif regime == "collateral":
        header = ("p0" if axis == "p0" else axis, "action", "b", "R", "threshold")
        for v in values:
            m = dict(merged)
            m[axis] = v
            beta = _require(m, "beta")
            dec = collateral.date0_decision(_require(m, "p0"), float(m.get("x", 0.0)), beta)
            rows.append((v, dec.action.value, dec.contract.b, dec.contract.R, dec.threshold))
    elif regime == "reputation":
        header = (axis, "label", "b0", "R1", "b1", "R2", "strategic_default_date1")
        for v in values:
            m = dict(merged)
            m[axis] = v
            params = _build_params(m, need_p0=False)
            sol = reputation.classify_region(params.pi0, params.beta, params.y1, params.y2)
            rows.append(
                (
                    v,
                    sol.region.label.value,
                    sol.plan.date0.b,
                    sol.plan.date0.R,
                    sol.plan.date1.b,
                    sol.plan.date1.R,
                    sol.plan.strategic_default_date1,
                )
            )
    else:
        header = (axis, "R1_star", "b0", "binding", "u_keep", "u_sell", "decision")
        for v in values:
            m = dict(merged)
            m[axis] = v
            params = _build_params(m)
            sol = combined.date0_decision(params)
            rows.append(
                (v, sol.R1_star, sol.b0, sol.binding, sol.u_keep, sol.u_sell, sol.decision.value)
            )
    _emit_rows(header, rows, out)


@cli.command()
@_param_options
@click.option("--r1", "--R1", "r1", type=float, default=None, help="date-0 promise; defaults to the solved optimum")
@click.option("-n", "--n", "n", type=int, default=100_000)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=1)
@click.option("--out", default="-")
def simulate(config, r1, n, seed, jobs, out, **flags):
    """Monte Carlo over price paths and borrower types."""
    merged = _merge(_load_config(config), **flags)
    params = _build_params(merged)
    use_seed = _pick_seed(merged, seed)
    use_r1 = merged.get("R1", merged.get("r1", r1))
    if use_r1 is None:
        use_r1 = combined.optimal_R1(params).R1_star
    n = int(merged.get("n", n))
    stats = sim.monte_carlo(params, float(use_r1), n, use_seed, n_jobs=int(merged.get("jobs", jobs)))
    _emit_json(stats.to_dict(), out)


@cli.command()
@_param_options
@click.option("--periods", type=int, default=100)
@click.option("--seed", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv")
@click.option("--out", default="-")
def olg(config, periods, seed, fmt, out, **flags):
    """Overlapping-generations simulation on one shared price path."""
    merged = _merge(_load_config(config), **flags)
    params = _build_params(merged)
    use_seed = _pick_seed(merged, seed)
    stats = sim.olg_simulate(params, int(merged.get("periods", periods)), use_seed)
    if fmt == "json":
        _emit_json([s.to_dict() for s in stats], out)
    else:
        header = tuple(stats[0].to_dict().keys())
        rows = [tuple(s.to_dict()[k] for k in header) for s in stats]
        _emit_rows(header, rows, out)


@cli.command()
@_param_options
@click.option("--which", type=click.Choice(["fig2", "fig3", "fig3a", "fig3b"]), required=True)
@click.option("--g", type=float, default=1.0, help="income growth for the region map")
@click.option("--r1", "--R1", "r1", type=float, default=None, help="promise for the date-1 profile")
@click.option("--points", type=int, default=400)
@click.option("--out", required=True, help="CSV destination")
@click.option("--png/--no-png", default=True, help="also render a PNG next to the CSV")
def figures(config, which, g, r1, points, out, png, **flags):
    """Emit figure data as CSV and render the companion plot."""
    merged = _merge(_load_config(config), **flags)
    if which == "fig2":
        g = float(merged.get("g", g))
        rows = fig2_rows(g)
        write_csv(out, FIG2_HEADER, rows)
        if png:
            render_fig2(rows, str(Path(out).with_suffix(".png")))
    else:
        params = _build_params(merged)
        use_r1 = merged.get("R1", merged.get("r1", r1))
        if use_r1 is None:
            use_r1 = combined.optimal_R1(params).R1_star
        rows = fig3_rows(params, float(use_r1), n=int(merged.get("points", points)))
        write_csv(out, FIG3_HEADER, rows)
        if png:
            render_fig3(rows, str(Path(out).with_suffix(".png")))
    click.echo(f"wrote {out}")


def main(argv=None) -> int:
    """Entry point with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except SystemExit as exc:  # verify uses exit(3)
        return int(exc.code or 0)
    except (DomainError, RangeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
