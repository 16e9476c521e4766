"""Command line entry point: ``tickmoments run | synth | selftest``.

Exit codes: 0 success, 1 usage error, 2 data error (or a failed selftest).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import DataError, ParameterError, TickMomentsError
from .io import ingest, write_trades
from .pipeline import RunConfig, parse_duration, run, write_report
from .synth import GenConfig, generate

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("tickmoments")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _duration(text: str) -> int:
    try:
        return parse_duration(text)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tickmoments",
                     description="Market-based (volume/value weighted) moments of price and return from trade ticks.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="analyse a trade CSV (header time,price,volume)")
    p.add_argument("--input", required=True, help="trade CSV path")
    p.add_argument("--delta", required=True, type=_duration,
                   help="averaging interval, e.g. 1s, 500ms, 5m (bare number = ns)")
    p.add_argument("--tau", type=_duration, help="return lag; omit to skip return statistics")
    p.add_argument("--origin", type=int, help="grid centre t0 in ns (default: first trade time)")
    p.add_argument("--levels", type=_int_list, default=(), help="secondary averaging factors, e.g. 2,5")
    p.add_argument("--nmax", type=int, default=2, help="highest power sum kept per interval (2..8)")
    p.add_argument("--alpha", type=_float_list, default=(0.01, 0.05),
                   help="VaR quantile levels; VaR is reported as the alpha-quantile of the level")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--partial", choices=("drop", "flag"), default="drop",
                   help="what to do with secondary windows missing intervals")
    p.add_argument("--out", default="report", help="output directory")

    s = sub.add_parser("synth", help="write a seeded synthetic trade CSV")
    s.add_argument("--out", required=True, help="output CSV path")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=10_000)
    s.add_argument("--spacing", type=_duration, default=parse_duration("1s"), help="tick spacing")
    s.add_argument("--start", type=int, default=0, help="first tick time in ns")
    s.add_argument("--p0", type=float, default=100.0, help="initial price")
    s.add_argument("--s", type=float, default=0.001, help="per-tick log-price step std (0 = constant)")
    s.add_argument("--u0", type=float, default=1.0, help="median volume")
    s.add_argument("--g", type=float, default=0.5, help="log-volume std (0 = constant)")
    s.add_argument("--rho", type=float, default=0.0, help="volume/price shock coupling in [-1, 1]")

    t = sub.add_parser("selftest", help="run the built-in oracle equivalence checks")
    t.add_argument("--seed", type=int, default=20240415)
    return parser


def _cmd_run(args) -> int:
    cfg = RunConfig(
        delta=args.delta, tau=args.tau, origin=args.origin, levels=args.levels,
        n_max=args.nmax, alphas=args.alpha, fmt=args.format, partial=args.partial,
        input_path=args.input, out_dir=args.out,
    )
    data = ingest(args.input)
    report = run(data.trades, cfg)
    report.diagnostics["rows_read"] = data.rows_read
    report.diagnostics["rows_rejected"] = data.rejected
    report.diagnostics["reordered"] = data.reordered
    for path in write_report(report, args.out):
        log.info("wrote %s", path)
    return EXIT_OK


def _cmd_synth(args) -> int:
    cfg = GenConfig(seed=args.seed, count=args.count, tick_spacing=args.spacing, start=args.start,
                    p0=args.p0, s=args.s, u0=args.u0, g=args.g, rho=args.rho)
    write_trades(generate(cfg), args.out)
    log.info("wrote %d trades to %s", cfg.count, args.out)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_checks

    ok = True
    for name, passed, err, tol in run_checks(args.seed):
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}  (worst {err:.3g}, tol {tol:.0e})")
    return EXIT_OK if ok else EXIT_DATA


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "synth": _cmd_synth, "selftest": _cmd_selftest}[args.command]
    try:
        return handler(args)
    except ParameterError as e:
        print(f"tickmoments: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, TickMomentsError, OSError) as e:
        print(f"tickmoments: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
