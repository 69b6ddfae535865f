"""Command line entry point: ``awediv run | measures | generate | plot``.

Exit codes: 0 ok, 2 configuration error, 3 I/O or input format error,
4 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, load_config, parse_drift
from .streams import ConceptParams, CsvFormatError, generate, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_RUNTIME = 0, 2, 3, 4

# flags that override config-file keys of the same name
RUN_FLAGS = {
    "--stream": str, "--generator": str, "--n-instances": int, "--seed": int,
    "--noise": float, "--drift": str, "--chunk-size": int, "--capacity": int,
    "--weighting": str, "--learner": str, "--mode": str, "--window": int,
    "--alpha": float, "--out": str, "--cost": float, "--amount-column": str,
    "--classes": str, "--positive-label": str, "--amount-scale": float,
}


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="awediv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    run = sub.add_parser("run", help="run a chunk-prequential AWE experiment")
    run.add_argument("--config", help="flat key=value config file")
    for flag, kind in RUN_FLAGS.items():
        run.add_argument(flag, type=kind)
    run.add_argument("--header", action="store_true", default=None,
                     help="CSV stream has a header row")
    run.add_argument("--plot", action="store_true", default=None,
                     help="render PNG figures next to the metrics file")

    measures = sub.add_parser("measures", help="print diversity measures of a 0/1 oracle CSV")
    measures.add_argument("oracle")

    gen = sub.add_parser("generate", help="write a synthetic drifting stream as CSV")
    gen.add_argument("--kind", choices=("sea", "hyperplane"), default="sea")
    gen.add_argument("--n", type=int, default=10_000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--threshold", type=float, default=8.0)
    gen.add_argument("--n-features", type=int, default=10)
    gen.add_argument("--drift", default="", help="e.g. '3000:sudden:flip;6000:gradual:500:theta=9'")
    gen.add_argument("--amount-scale", type=float)
    gen.add_argument("--header", action="store_true")
    gen.add_argument("--out", help="output path (default: stdout)")

    plot = sub.add_parser("plot", help="render figures for an existing metrics CSV")
    plot.add_argument("metrics")
    plot.add_argument("--out-dir")
    return parser


def _cmd_run(args) -> int:
    from .experiment import run_experiment

    overrides = {flag.lstrip("-").replace("-", "_"): getattr(args, flag.lstrip("-").replace("-", "_"))
                 for flag in RUN_FLAGS}
    overrides["header"] = args.header
    overrides["plot"] = args.plot
    try:
        config = load_config(args.config, overrides)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        path = run_experiment(config)
    except (OSError, CsvFormatError) as exc:
        print(f"stream error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # completed rows are already flushed
        logging.getLogger(__name__).exception("run failed")
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(path)
    return EXIT_OK


def _cmd_measures(args) -> int:
    from .experiment import OracleFormatError, print_measures

    try:
        print_measures(args.oracle)
    except OSError as exc:
        print(f"cannot read {args.oracle}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OracleFormatError as exc:
        print(f"{args.oracle}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_generate(args) -> int:
    try:
        if args.kind == "sea":
            base = ConceptParams("sea", args.threshold, noise=args.noise)
        else:
            base = ConceptParams("hyperplane", normal=(1.0,) * args.n_features, noise=args.noise)
        schedule = parse_drift(args.drift, base)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    instances = generate(base, schedule, args.n, args.seed, args.amount_scale)
    try:
        if args.out:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                write_csv(instances, fh, args.header)
        else:
            write_csv(instances, sys.stdout, args.header)
    except OSError as exc:
        print(f"cannot write stream: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .plots import plot_metrics

    try:
        for path in plot_metrics(args.metrics, args.out_dir):
            print(path)
    except (OSError, StopIteration, ValueError) as exc:
        print(f"cannot plot {args.metrics}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "measures": _cmd_measures,
               "generate": _cmd_generate, "plot": _cmd_plot}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
