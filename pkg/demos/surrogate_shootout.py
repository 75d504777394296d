"""Desk-scale surrogate comparison on a freshly simulated design.

Builds a small quasi-random design over the ten policy parameters, runs
the simulator once per design point, then trains all nine regression
methods on identical train/validation/test splits and prints the
scoreboard. The full artifact set (comparison.csv, spider.csv,
pred-vs-actual files, PCA, report.json) lands in demo_output/.

At the default 48 runs the whole script takes a couple of minutes on a
laptop core; pass a larger count for a sterner test.

Usage: python3 demos/surrogate_shootout.py [n_runs]
"""

import os
import sys

from abmemu.design import ParamRanges, generate_design, scale_design
from abmemu.pipeline import (
    AnalysisReport, ScenarioConfig, compare_methods, emit_report, run_batch,
)


def main():
    n_runs = int(sys.argv[1]) if len(sys.argv) > 1 else 48
    out_dir = os.path.join(os.path.dirname(__file__), "demo_output")

    ranges = ParamRanges.defaults()
    design = generate_design("lptau", n_runs, ranges)
    matrix = scale_design(design, ranges)
    print("simulating %d runs (one line per run)..." % n_runs, flush=True)
    records = run_batch(matrix, base_seed=0, progress=True)

    config = ScenarioConfig(sizes=(n_runs,))
    report = compare_methods(records, config, progress=True)

    print("\n%-22s %12s %12s %8s %8s"
          % ("method", "test MSE", "fit time s", "accuracy", "speed"))
    ranked = sorted((r for r in report.results if not r.failed),
                    key=lambda r: r.testMse)
    for r in ranked:
        print("%-22s %12.4g %12.3f %8.2f %8.2f"
              % (r.displayName, r.testMse, r.trainTime,
                 report.accuracyScores[r.key], report.speedScores[r.key]))
    for r in report.results:
        if r.failed:
            print("%-22s failed: %s" % (r.displayName, r.error))

    emit_report(AnalysisReport((report,)), out_dir)
    print("\nreport files written to %s" % out_dir)


if __name__ == "__main__":
    main()
