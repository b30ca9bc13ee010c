"""Command-line interface.

    qcomp generate {ghz,werner,haar,haar-ranked} [...]
    qcomp ensemble --ranks 1,2,3,4 --samples N --measures ... --seed S --out DIR
    qcomp check STATE.json --split AB:C --measures qmi,logneg
    qcomp keyrate {error,werner,threshold} [...]

Exit codes: 0 ok, 1 input error, 2 complementarity bound violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import keyrate, states
from .complementarity import EnsembleReport, ensemble_report, evaluate
from .errors import InputError
from .measures import TAGS, BipartitionSpec, parse_kinds

log = logging.getLogger("qcomplementarity")

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    """Shortest round-trip float text."""
    return repr(float(x))


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


# -- generate ----------------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.kind == "ghz":
        state = states.ghz_state()
    elif args.kind == "werner":
        if args.p is None:
            raise InputError("werner needs --p")
        state = states.werner_state(args.p)
    else:
        if args.seed is None:
            raise InputError(f"{args.kind} needs --seed")
        rank = 1 if args.kind == "haar" else args.rank
        if rank is None:
            raise InputError("haar-ranked needs --rank")
        cfg = states.SamplerConfig(tuple(args.dims), rank, args.seed, 1)
        state = states.haar_ranked_one(cfg, args.index)
    text = states.dumps_state(state) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK


# -- ensemble ----------------------------------------------------------------------

def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_report_csv(reports: list[EnsembleReport], out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for rep in reports:
        tags = [k.tag for k in rep.kinds]
        header = ["sample_id", "purity", *tags, *(f"sum_{t}" for t in tags), *(f"dist_{t}" for t in tags)]
        rows = (
            [r.sample_id, fmt(r.purity)]
            + [fmt(r.values[k]) for k in rep.kinds]
            + [fmt(r.sums[k]) for k in rep.kinds]
            + [fmt(r.distances[k]) for k in rep.kinds]
            for r in rep.records
        )
        path = out / f"samples_rank{rep.rank}.csv"
        _write_csv(path, header, rows)
        written.append(path)
        for k, hist in rep.histograms.items():
            path = out / f"hist_rank{rep.rank}_{k.tag}.csv"
            _write_csv(path, ["bin_low", "bin_high", "rel_freq"],
                       ([fmt(a), fmt(b), fmt(f)] for a, b, f in hist.rows()))
            written.append(path)
        if rep.min_variant_histograms:
            mtags = [k.tag for k in rep.min_variant_histograms]
            path = out / f"minvariant_rank{rep.rank}.csv"
            _write_csv(path, ["sample_id", *(f"min_{t}" for t in mtags)],
                       ([r.sample_id] + [fmt(r.min_variant[k]) for k in rep.min_variant_histograms]
                        for r in rep.records))
            written.append(path)
            for k, hist in rep.min_variant_histograms.items():
                path = out / f"hist_rank{rep.rank}_min_{k.tag}.csv"
                _write_csv(path, ["bin_low", "bin_high", "rel_freq"],
                           ([fmt(a), fmt(b), fmt(f)] for a, b, f in hist.rows()))
                written.append(path)
    path = out / "aggregate.csv"
    _write_csv(
        path,
        ["rank", "measure", "mean_distance", "violations", "samples"],
        ([rep.rank, k.tag, fmt(rep.mean_distance[k]), rep.violation_count[k], rep.samples]
         for rep in reports for k in rep.kinds),
    )
    written.append(path)
    return written


def report_to_dict(rep: EnsembleReport) -> dict:
    def hist(h):
        return {"edges": h.edges.tolist(), "rel_freq": h.frequencies.tolist()}

    doc = {
        "rank": rep.rank,
        "samples": rep.samples,
        "bound": rep.bound,
        "mean_distance": {k.tag: v for k, v in rep.mean_distance.items()},
        "violations": {k.tag: v for k, v in rep.violation_count.items()},
        "histograms": {k.tag: hist(h) for k, h in rep.histograms.items()},
        "records": [
            {
                "sample_id": r.sample_id,
                "purity": r.purity,
                "values": {k.tag: v for k, v in r.values.items()},
                "sums": {k.tag: v for k, v in r.sums.items()},
                "distances": {k.tag: v for k, v in r.distances.items()},
            }
            for r in rep.records
        ],
    }
    if rep.min_variant_histograms:
        doc["min_variant"] = {
            "violations": {k.tag: v for k, v in rep.min_variant_violations.items()},
            "histograms": {k.tag: hist(h) for k, h in rep.min_variant_histograms.items()},
        }
        for r, d in zip(rep.records, doc["records"]):
            d["min_variant"] = {k.tag: v for k, v in r.min_variant.items()}
    return doc


def cmd_ensemble(args) -> int:
    kinds = parse_kinds(args.measures)
    split = BipartitionSpec.parse(args.split, args.dims)
    with_min = args.min_variant and len(args.dims) == 3
    reports = []
    for rank in args.ranks:
        cfg = states.SamplerConfig(tuple(args.dims), rank, args.seed, args.samples)
        log.info("rank %d: %d samples", rank, args.samples)
        reports.append(ensemble_report(cfg, split, kinds, args.bins,
                                       workers=args.workers, with_min_variant=with_min))
    out = Path(args.out)
    if args.format == "json":
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps([report_to_dict(r) for r in reports], indent=1) + "\n"
        )
    else:
        write_report_csv(reports, out)
    for rep in reports:
        for k in rep.kinds:
            print(f"rank {rep.rank} {k.tag:8s} mean_distance {rep.mean_distance[k]:.4f} "
                  f"violations {rep.violation_count[k]}")
    return EXIT_OK


# -- check -------------------------------------------------------------------------

def cmd_check(args) -> int:
    try:
        text = Path(args.state).read_text()
    except OSError as exc:
        raise InputError(f"cannot read state file: {exc}") from exc
    state = states.loads_state(text)
    kinds = parse_kinds(args.measures)
    rec = evaluate(state, BipartitionSpec.parse(args.split, state.dims), kinds)
    out = {
        "split": rec.split,
        "purity": rec.purity,
        "bound": rec.bound,
        "measures": {k.tag: rec.measure_values[k] for k in kinds},
        "sums": {k.tag: rec.sums[k] for k in kinds},
        "distances": {k.tag: rec.distances[k] for k in kinds},
        "violations": [k.tag for k in rec.violations()],
        "side_condition_breached": sorted(k.tag for k in rec.side_condition_breached),
    }
    print(json.dumps(out))
    return EXIT_VIOLATION if rec.violations() else EXIT_OK


# -- keyrate -----------------------------------------------------------------------

def cmd_keyrate(args) -> int:
    mode = args.mode or ("werner" if args.p is not None else "error")
    if mode == "threshold":
        e = keyrate.werner_threshold()
        s = keyrate.werner_entropy_from_error(e)
        out = {"threshold": e, "error_rate": e, "entropy_ab": s, "rate_lower_bound": keyrate.werner_rate(e)}
    elif mode == "werner":
        if args.p is None:
            raise InputError("werner mode needs --p")
        sc = keyrate.KeyRateScenario.werner(args.p)
        out = {"p": args.p, "error_rate": sc.error_rate, "entropy_ab": sc.entropy_ab,
               "rate_lower_bound": sc.rate_lower_bound}
    else:
        if args.error is None:
            raise InputError("error mode needs --error")
        sc = keyrate.KeyRateScenario.from_error(args.error, args.entropy, args.d_ab, args.d_e, args.bound)
        out = {"error_rate": sc.error_rate, "entropy_ab": sc.entropy_ab, "bound_b": sc.bound_b,
               "rate_lower_bound": sc.rate_lower_bound}
    print(json.dumps(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcomp", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a state as JSON")
    g.add_argument("kind", choices=["ghz", "werner", "haar", "haar-ranked"])
    g.add_argument("--p", type=float)
    g.add_argument("--dims", type=_int_list, default=[2, 2, 2])
    g.add_argument("--rank", type=int)
    g.add_argument("--seed", type=_seed)
    g.add_argument("--index", type=int, default=0, help="sample index within the seeded stream")
    g.add_argument("--out", "-o")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("ensemble", help="sample states and tabulate complementarity statistics")
    e.add_argument("--ranks", type=_int_list, required=True)
    e.add_argument("--samples", type=int, required=True)
    e.add_argument("--measures", default=",".join(TAGS), help=f"comma list of {', '.join(TAGS)}")
    e.add_argument("--seed", type=_seed, required=True)
    e.add_argument("--bins", type=int, default=50)
    e.add_argument("--dims", type=_int_list, default=[2, 2, 2])
    e.add_argument("--split", default="AB:C")
    e.add_argument("--out", "-o", default="ensemble_out")
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--no-min-variant", dest="min_variant", action="store_false",
                   help="skip P + min(Q_A:C, Q_B:C) tables")
    e.set_defaults(func=cmd_ensemble)

    c = sub.add_parser("check", help="evaluate the complementarity for one state file")
    c.add_argument("state")
    c.add_argument("--split", default="AB:C")
    c.add_argument("--measures", default="neg,logneg,qmi")
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("keyrate", help="key-rate lower bound queries")
    k.add_argument("mode", nargs="?", choices=["error", "werner", "threshold"])
    k.add_argument("--error", type=float)
    k.add_argument("--entropy", type=float, default=0.0, help="S(rho_AB) in bits")
    k.add_argument("--d-ab", type=int, default=4)
    k.add_argument("--d-e", type=int, default=4)
    k.add_argument("--bound", type=float)
    k.add_argument("--p", type=float)
    k.set_defaults(func=cmd_keyrate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
