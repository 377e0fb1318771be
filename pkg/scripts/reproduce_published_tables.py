#!/usr/bin/env python3
"""Reproduce the published validation grids and print side-by-side tables.

Compares this implementation against every grid bundled in
``mrtpower.benchmarks``:

- analytic power at N=10 for the twelve reference configurations,
- simulated power under nine error laws (working assumptions true),
- simulated power under three off-basis effect shapes (analytic + MC),
- simulated power under arm- and time-heteroscedastic errors.

Cells outside the comparison tolerance are flagged with ``*``. Two blocks
are expected to deviate and are documented rather than fitted:

- the step-trend ("jump") column of the heteroscedasticity grid: the
  published column is internally inconsistent with its own stated mean-one
  scaling, so no generative profile reproduces it (see the acceptance
  test's docstring for the full argument);
- the block-exchangeable ("cs_block") columns of the error-law grid at
  small block sizes: the published cells show power gains over their own
  iid baseline, but with randomization independent across decision points
  every cross-covariance term in the effect estimator's variance vanishes,
  so exchangeable correlation cannot move power under the stated law (our
  cells sit on the baseline, and the published large-block cells do too).

This script reports, it does not fail: the build gate lives in
tests/test_acceptance.py, which gates the iid-normal column and the
rising/falling-trend variance cells.

Run time is dominated by the Monte Carlo grids; at the default 1000
replications expect a few minutes on one core. Use --reps 200 for a quick
look or --tables to restrict to a subset.
"""
from __future__ import annotations

import argparse
import sys
import time

from mrtpower.benchmarks import (
    ANALYTIC_POWER,
    D_BAR,
    ERROR_LAW_COLUMNS,
    ERROR_LAW_POWER,
    REFERENCE_CONFIGS,
    SHAPE_GRID,
    VARIANCE_GRID,
    reference_design,
)
from mrtpower.design import project_effect
from mrtpower.power import power_at
from mrtpower.simulate import GenerativeModel, effect_shape_curve, run_scenario

import dataclasses

ANALYTIC_TOL = 0.01
MC_TOL = 0.035
SHAPE_TOL = 0.05

TABLES = ("analytic", "error-laws", "shapes", "variance")


def _cell(ours: float, printed: float, tol: float) -> str:
    flag = "*" if abs(ours - printed) > tol else " "
    return f"{ours:.3f}/{printed:.3f}{flag}"


def _config_label(key: tuple[int, int, int]) -> str:
    days, per_day, degree = key
    return f"D={days:<3} K={per_day:<2} degree={degree}"


def show_analytic(args) -> int:
    print(f"\nAnalytic power at N=10 (ours/published, tol {ANALYTIC_TOL}):")
    bad = 0
    for key in REFERENCE_CONFIGS:
        printed = ANALYTIC_POWER[key]
        ours = power_at(reference_design(*key), args.alpha0, 10)
        bad += abs(ours - printed) > ANALYTIC_TOL
        print(f"  {_config_label(key)}  {_cell(ours, printed, ANALYTIC_TOL)}")
    return bad


def show_error_laws(args) -> int:
    names = [law if rc is None else f"{law}({rc})"
             for law, rc in ERROR_LAW_COLUMNS]
    print(f"\nSimulated power by error law at N=10 "
          f"(ours/published, tol {MC_TOL}, {args.reps} reps, "
          f"correction={args.correction}):")
    print("  " + " " * 22 + "  ".join(f"{n:>14}" for n in names))
    bad = 0
    for key in REFERENCE_CONFIGS:
        row = []
        for (law, rc), printed in zip(ERROR_LAW_COLUMNS,
                                      ERROR_LAW_POWER[key]):
            run = run_scenario(
                reference_design(*key),
                GenerativeModel(error_law=law, rho_corr=rc),
                10, alpha0=args.alpha0, replications=args.reps,
                seed=args.seed, correction=args.correction,
                workers=args.workers)
            bad += abs(run.empirical_power - printed) > MC_TOL
            row.append(_cell(run.empirical_power, printed, MC_TOL))
        print(f"  {_config_label(key)}  " + "  ".join(f"{c:>14}" for c in row))
    return bad


def show_shapes(args) -> int:
    print(f"\nPower under off-basis effect shapes at N=10 "
          f"(estimated ours/published then simulated ours/published, "
          f"tol {SHAPE_TOL}, {args.reps} reps):")
    bad = 0
    for key, cells in SHAPE_GRID.items():
        days, per_day, degree = key
        design = reference_design(*key)
        for shape, (printed_est, printed_sim) in cells.items():
            curve = effect_shape_curve(shape, days, per_day, D_BAR[degree])
            d_proj = project_effect(curve, design)
            est = power_at(dataclasses.replace(design, d=d_proj),
                           args.alpha0, 10)
            run = run_scenario(
                design, GenerativeModel(effect_shape=shape), 10,
                alpha0=args.alpha0, replications=args.reps, seed=args.seed,
                correction=args.correction, workers=args.workers)
            bad += (abs(est - printed_est) > SHAPE_TOL
                    or abs(run.empirical_power - printed_sim) > SHAPE_TOL)
            print(f"  {_config_label(key)}  {shape:<18}"
                  f"  est {_cell(est, printed_est, SHAPE_TOL)}"
                  f"  sim {_cell(run.empirical_power, printed_sim, SHAPE_TOL)}")
    return bad


def show_variance(args) -> int:
    print(f"\nSimulated power under heteroscedastic errors at N=10 "
          f"(ours/published, tol {MC_TOL}, {args.reps} reps):")
    print("  note: the step-trend (jump) column is expected to deviate; "
          "the published column is internally inconsistent as printed.")
    bad = 0
    for key, cells in VARIANCE_GRID.items():
        for (ratio, trend), printed in cells.items():
            run = run_scenario(
                reference_design(*key),
                GenerativeModel(variance_trend=trend, ratio=ratio),
                10, alpha0=args.alpha0, replications=args.reps,
                seed=args.seed, correction=args.correction,
                workers=args.workers)
            bad += abs(run.empirical_power - printed) > MC_TOL
            print(f"  {_config_label(key)}  ratio={ratio:<3} trend={trend:<4}"
                  f"  {_cell(run.empirical_power, printed, MC_TOL)}")
    return bad


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Compare this implementation against the published "
                    "validation grids.")
    parser.add_argument("--reps", type=int, default=1000,
                        help="Monte Carlo replications per cell")
    parser.add_argument("--seed", type=int, default=12345,
                        help="base seed for the per-replication RNG streams")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes per scenario")
    parser.add_argument("--correction", default="md",
                        choices=["none", "md", "kc"],
                        help="small-sample sandwich correction")
    parser.add_argument("--alpha0", type=float, default=0.05)
    parser.add_argument("--tables", nargs="+", default=list(TABLES),
                        choices=TABLES, help="which grids to reproduce")
    args = parser.parse_args(argv)

    shows = {"analytic": show_analytic, "error-laws": show_error_laws,
             "shapes": show_shapes, "variance": show_variance}
    t0 = time.perf_counter()
    flagged = {name: shows[name](args) for name in TABLES
               if name in args.tables}
    elapsed = time.perf_counter() - t0
    print(f"\nDone in {elapsed:.0f}s. Cells outside tolerance: "
          + ", ".join(f"{k}={v}" for k, v in flagged.items()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
