"""Command-line front end.

Exit statuses: 0 success (including runs that found candidate
counterexamples), 1 I/O, schema or usage error, 2 degenerate configuration,
3 violation of a property that must hold (gauge or isometry invariance,
Riemann-sphere independence).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import maps, verify
from .geom import SPACES, Configuration, ConfigurationError, DegenerateConfigurationError

OUTPUT_DIR_ENV = "CONFPOLY_OUTPUT_DIR"

EXIT_OK, EXIT_ERROR, EXIT_DEGENERATE, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common(p, generator=True, space="euclidean"):
    if generator:
        p.add_argument("--n", type=int, required=True, help="number of points")
    p.add_argument("--d", type=int, required=generator, default=1,
                   help="number of observers in observer mode (stars in star mode)")
    p.add_argument("--mode", choices=maps.MODES, default="observer",
                   help="observer-based or star-based construction")
    if generator:
        p.add_argument("--space", choices=SPACES, default=space)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv exports the per-trial |D| table (sample and scan only)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker processes for campaigns")
    p.add_argument("--outdir", help=f"directory for counterexample files "
                                    f"(default: ${OUTPUT_DIR_ENV} or the current directory)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confpoly",
        description="Normalized determinants of observer/star polynomial families "
                    "for configurations of points.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("det", help="normalized determinant D of one configuration file "
                                   "(the matrix of the family in the subset monomial basis)")
    p.add_argument("config", help="JSON file with 'space' and 'points'")
    _common(p, generator=False)
    p.add_argument("--gauge-draws", type=int, default=0,
                   help="also report the spread of D over this many random lift gauges")

    p = sub.add_parser("sample", help="invariance campaign: D under random gauges, "
                                      "relabellings and isometries")
    _common(p)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("gauge-test", help="gauge-independence campaign only "
                                          "(D must not depend on the choice of Hopf lifts)")
    _common(p)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("scan", help="sample |D| and flag values below 1 "
                                    "(probes the |D| >= 1 and linear-independence conjectures)")
    _common(p)
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("minimize", help="Nelder-Mead search for small |D| with random restarts")
    _common(p)
    p.add_argument("--budget", type=int, default=10, help="number of restarts")
    p.add_argument("--maxfev", type=int, default=None, help="evaluations per restart")

    p = sub.add_parser("cp1-verify", help="Riemann-sphere constructions: dual-point pairing "
                                          "pattern and full rank")
    _common(p, space="cp1")
    p.add_argument("--trials", type=int, default=100)
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv(report: verify.CampaignReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "abs_D"])
    for t, a in enumerate(report.abs_values):
        w.writerow([t, repr(a)])
    return buf.getvalue()


def _outdir(args) -> Path:
    if args.outdir:
        return Path(args.outdir)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _write_candidates(report: verify.CampaignReport, args) -> None:
    if not report.candidates:
        return
    out = _outdir(args)
    out.mkdir(parents=True, exist_ok=True)
    for cand in report.candidates:
        doc = {"schema_version": verify.SCHEMA_VERSION, "spec": report.spec, **cand}
        path = out / f"counterexample-{verify.candidate_digest(cand)}.json"
        path.write_text(_dump(doc))
        print(f"candidate counterexample: |D| = {cand['abs_D']!r} -> {path}", file=sys.stderr)


def _spec(args, **extra) -> verify.CampaignSpec:
    try:
        return verify.CampaignSpec(n=args.n, d=args.d, mode=args.mode, space=args.space,
                                   seed=args.seed, workers=max(1, args.threads), **extra)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_nd(args) -> None:
    if args.n < 2 or not 1 <= args.d <= args.n - 1:
        raise UsageError(f"need n >= 2 and 1 <= d <= n-1, got n={args.n}, d={args.d}")


def cmd_det(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = Configuration.from_document(doc)
    except DegenerateConfigurationError as exc:
        print(f"error: degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConfigurationError as exc:
        print(f"error: schema: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not 1 <= args.d <= cfg.n - 1:
        print(f"error: need 1 <= d <= n-1 = {cfg.n - 1}", file=sys.stderr)
        return EXIT_ERROR
    try:
        rep = maps.normalized_determinant(cfg, args.d, args.mode, args.seed, args.gauge_draws)
    except DegenerateConfigurationError as exc:
        print(f"error: degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    out = {
        "schema_version": verify.SCHEMA_VERSION,
        "re": rep.value.real, "im": rep.value.imag, "abs": rep.abs, "log_abs": rep.log_abs,
        "n": rep.n, "d": rep.d, "mode": rep.mode, "space": rep.space,
        "wall_ms": rep.wall_time * 1e3,
    }
    if rep.gauge_spread is not None:
        out["gauge_spread"] = rep.gauge_spread
    _emit(_dump(out), args.output)
    return EXIT_OK


def _campaign(args, report, fatal: tuple[str, ...]) -> int:
    if args.format == "csv":
        _emit(_csv(report), args.output)
    else:
        _emit(report.to_json(indent=2) + "\n", args.output)
    _write_candidates(report, args)
    bad = [v for v in report.violations if v["invariant"] in fatal]
    for v in report.violations:
        print(f"violation: trial {v['trial']} {v['invariant']} "
              f"measured {v['measured']!r} > {v['tolerance']!r}", file=sys.stderr)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_sample(args) -> int:
    _check_nd(args)
    report = verify.run_invariance_campaign(_spec(args, trials=args.trials))
    return _campaign(args, report, ("gauge", "isometry", "permutation", "nonsingular"))


def cmd_gauge_test(args) -> int:
    _check_nd(args)
    report = verify.run_invariance_campaign(_spec(args, trials=args.trials,
                                                  perm_draws=0, iso_draws=0))
    return _campaign(args, report, ("gauge", "nonsingular"))


def cmd_scan(args) -> int:
    _check_nd(args)
    if args.space == "cp1":
        raise UsageError("scan runs on euclidean or hyperbolic configurations; use cp1-verify")
    report = verify.run_conjecture_scan(_spec(args, trials=args.trials))
    return _campaign(args, report, ())


def cmd_minimize(args) -> int:
    _check_nd(args)
    if args.space == "cp1":
        raise UsageError("minimize runs on euclidean or hyperbolic configurations")
    if args.format == "csv":
        raise UsageError("minimize only writes json")
    res = verify.minimize_absD(args.n, args.d, args.mode, args.space, args.seed,
                               args.budget, args.maxfev)
    doc = res.to_dict()
    doc["spec"] = {"n": args.n, "d": args.d, "mode": args.mode, "space": args.space,
                   "seed": args.seed, "budget": args.budget}
    _emit(_dump(doc), args.output)
    if res.best_abs < 1 - verify.COUNTEREXAMPLE_MARGIN:
        cand = {"trial": None, "abs_D": res.best_abs, "configuration": doc["best_config"],
                "claim": "|D| >= 1"}
        rep = verify.CampaignReport(kind="minimize", spec=doc["spec"], candidates=[cand])
        _write_candidates(rep, args)
    return EXIT_OK


def cmd_cp1_verify(args) -> int:
    _check_nd(args)
    if args.space != "cp1":
        raise UsageError("cp1-verify needs --space cp1")
    report = verify.cp1_delta_check(args.n, args.d, args.mode, args.trials, args.seed,
                                    workers=max(1, args.threads))
    return _campaign(args, report, ("delta_offdiag", "delta_diag", "nonsingular"))


COMMANDS = {
    "det": cmd_det,
    "sample": cmd_sample,
    "gauge-test": cmd_gauge_test,
    "scan": cmd_scan,
    "minimize": cmd_minimize,
    "cp1-verify": cmd_cp1_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
