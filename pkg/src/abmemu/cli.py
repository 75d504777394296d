"""Command-line surface: design, simulate, train, compare, pca,
main-effects.

Exit codes: 0 success, 1 usage error, 2 data error (bad files,
ranges, options), 3 numerical failure.
"""

import argparse
import sys

import numpy as np

from .analysis import main_effects, mse, pca_decompose, split_dataset
from .design import ParamRanges, generate_design, scale_design
from .errors import DataError, NumericalError
from .pipeline import (AnalysisReport, ScenarioConfig, compare_methods,
                       emit_report, read_design_csv, read_runs_csv,
                       records_to_dataset, run_batch, write_design_csv,
                       write_main_effects_csv, write_pca_csv, write_runs_csv)
from .surrogates import (METHOD_NAMES, METHOD_ORDER, fit_method, load_model,
                         save_model)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(1)


def _load_ranges(path):
    return ParamRanges.defaults() if path is None \
        else ParamRanges.from_file(path)


def _cmd_design(args):
    ranges = _load_ranges(args.ranges)
    design = generate_design(args.method, args.n, ranges, seed=args.seed,
                             lhs_iterations=args.lhs_iterations)
    write_design_csv(args.out, scale_design(design, ranges), ranges.names)
    print("wrote %s: %d x %d %s design" % (args.out, args.n,
                                           len(ranges.names), args.method))
    return 0


def _cmd_simulate(args):
    names, matrix = read_design_csv(args.design)
    records = run_batch(matrix, base_seed=args.seed, parallelism=args.jobs,
                        progress=not args.quiet)
    write_runs_csv(args.out, records, names)
    extinct = sum(r.extinct for r in records)
    print("wrote %s: %d runs (%d extinct)" % (args.out, len(records),
                                              extinct))
    return 0


def _cmd_train(args):
    names, records = read_runs_csv(args.runs)
    data = records_to_dataset(records, names)
    split = split_dataset(data.n, seed=args.seed)
    train = data.subset(split.trainIdx)
    val = data.subset(split.valIdx)
    test = data.subset(split.testIdx)
    model = fit_method(args.method, train, val, seed=args.seed)
    save_model(model, args.out)
    test_mse = mse(test.y, model.predict(test.X))
    print("wrote %s: %s test_mse=%r" % (args.out,
                                        METHOD_NAMES[args.method], test_mse))
    return 0


def _cmd_compare(args):
    config = ScenarioConfig() if args.config is None \
        else ScenarioConfig.from_file(args.config)
    scenarios = []
    for path in args.runs:
        names, records = read_runs_csv(path)
        scenarios.append(compare_methods(records, config,
                                         progress=not args.quiet))
    report = AnalysisReport(tuple(scenarios))
    emit_report(report, args.out, config=config, ranges=config.ranges(),
                progress=not args.quiet)
    print("wrote report for %d scenario(s) to %s" % (len(scenarios),
                                                     args.out))
    return 0


def _cmd_pca(args):
    names, records = read_runs_csv(args.runs)
    data = records_to_dataset(records, names)
    result = pca_decompose(np.column_stack([data.X, data.y]))
    write_pca_csv(args.out, result, tuple(names) + ("output",))
    print("wrote %s: %d of %d components retained"
          % (args.out, result.retainedCount, result.eigenvalues.size))
    return 0


def _cmd_main_effects(args):
    model = load_model(args.model)
    ranges = _load_ranges(args.ranges)
    curves, mean, variance = main_effects(model, ranges,
                                          grid_size=args.grid,
                                          n_mc=args.samples, seed=args.seed)
    write_main_effects_csv(args.out, curves)
    print("wrote %s: output mean %r variance %r" % (args.out, mean,
                                                    variance))
    return 0


def build_parser():
    parser = _Parser(prog="abmemu",
                     description="Social-care ABM surrogate toolkit.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("design", help="generate an experimental design")
    p.add_argument("--method", choices=("lptau", "lhs", "maximinLHS"),
                   default="lptau",
                   help="lptau (Sobol) or lhs (maximin Latin hypercube)")
    p.add_argument("--n", type=int, required=True, help="number of rows")
    p.add_argument("--ranges", default=None,
                   help="parameter ranges file (default: built-in ranges)")
    p.add_argument("--out", required=True, help="output design CSV")
    p.add_argument("--seed", type=int, default=0,
                   help="seed (LHS only; default 0)")
    p.add_argument("--lhs-iterations", type=int, default=10000,
                   help="maximin swap proposals (default 10000)")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("simulate", help="run the ABM over a design")
    p.add_argument("--design", required=True, help="design CSV to simulate")
    p.add_argument("--seed", type=int, default=0,
                   help="base seed (default 0)")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel worker processes (default 1)")
    p.add_argument("--out", required=True, help="output runs CSV")
    p.add_argument("--quiet", action="store_true",
                   help="suppress stderr progress lines")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("train", help="fit one surrogate on a runs file")
    p.add_argument("--runs", required=True, help="runs CSV")
    p.add_argument("--method", choices=METHOD_ORDER, required=True,
                   help="surrogate method key")
    p.add_argument("--out", required=True, help="output model file (npz)")
    p.add_argument("--seed", type=int, default=0,
                   help="split/fit seed (default 0)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("compare", help="compare surrogates on runs files")
    p.add_argument("--runs", required=True, nargs="+",
                   help="one runs CSV per scenario")
    p.add_argument("--config", default=None,
                   help="key = value scenario config (default: built-ins)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quiet", action="store_true",
                   help="suppress stderr progress lines")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("pca", help="principal components of a runs file")
    p.add_argument("--runs", required=True, help="runs CSV")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("main-effects",
                       help="main-effect curves of a saved model")
    p.add_argument("--model", required=True, help="model file from train")
    p.add_argument("--ranges", default=None,
                   help="parameter ranges file (default: built-in ranges)")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--grid", type=int, default=21,
                   help="grid points per parameter (default 21)")
    p.add_argument("--samples", type=int, default=1000,
                   help="Monte Carlo samples per grid point (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="seed (default 0)")
    p.set_defaults(func=_cmd_main_effects)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    except NumericalError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
