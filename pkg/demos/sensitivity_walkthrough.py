"""From raw runs to a sensitivity story: PCA, then main effects.

Simulates a small design, asks the PCA which directions in
(parameters + output) space carry the variance, then trains a gradient
boosted surrogate and traces each parameter's main-effect curve. The
curves answer "holding everything else at random draws, what does
sweeping this one dial do to the predicted cost per head?".

Usage: python3 demos/sensitivity_walkthrough.py [n_runs]
"""

import sys

import numpy as np

from abmemu.analysis import (
    main_effects, pca_decompose, retained_components, significant_loadings,
)
from abmemu.design import ParamRanges, generate_design, scale_design
from abmemu.pipeline import records_to_dataset, run_batch
from abmemu.surrogates import fit_gbt


def spark(values, width=40):
    """A crude one-line plot: map values onto '.:-=+*#' levels."""
    levels = " .:-=+*#"
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        return levels[1] * min(width, len(values))
    scaled = (np.asarray(values) - lo) / (hi - lo)
    return "".join(levels[1 + int(round(s * (len(levels) - 2)))]
                   for s in scaled)


def main():
    n_runs = int(sys.argv[1]) if len(sys.argv) > 1 else 40

    ranges = ParamRanges.defaults()
    design = generate_design("lptau", n_runs, ranges)
    print("simulating %d runs..." % n_runs, flush=True)
    records = run_batch(scale_design(design, ranges), base_seed=1,
                        progress=True)
    data = records_to_dataset(records)

    # which directions carry the variance?
    table = np.column_stack([data.X, data.y])
    names = list(ranges.names) + ["cost per head"]
    pca = pca_decompose(table)
    kept = retained_components(pca)
    print("\nPCA on parameters + output (%d rows):" % data.n)
    print("  eigenvalues: %s"
          % ", ".join("%.2f" % v for v in pca.eigenvalues))
    print("  retained components: %d" % kept)
    for comp in range(kept):
        hot = significant_loadings(pca, comp)
        print("  component %d loads on: %s"
              % (comp + 1, ", ".join(names[i] for i in hot) or "(nothing)"))

    # a surrogate's view of each dial
    model = fit_gbt(data)
    curves, overall_mean, overall_var = main_effects(
        model, ranges, grid_size=11, n_mc=400, seed=0)
    print("\nmain effects under the boosted-tree surrogate")
    print("  overall mean %.2f, overall variance %.2f"
          % (overall_mean, overall_var))
    by_swing = sorted(curves, key=lambda c: -np.ptp(c.effectValues))
    print("  %-28s %10s  curve (low grid -> high grid)" % ("parameter", "swing"))
    for curve in by_swing:
        print("  %-28s %10.2f  %s"
              % (curve.parameterName, np.ptp(curve.effectValues),
                 spark(curve.effectValues)))


if __name__ == "__main__":
    main()
