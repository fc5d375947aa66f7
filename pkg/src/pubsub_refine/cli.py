"""Command line interface.

Exit codes: 0 when every obligation passes, 1 when a counterexample was
found, 2 for usage or input errors. PUBSUB_REFINE_SEED supplies the
default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .checking import emit_report
from .exhaustive import run_exhaustive
from .faults import FAULTS, run_fault
from .generate import GeneratorConfig, default_weights
from .runner import fuzz_run, scenario_run
from .scenario import ScenarioError
from .trace import TraceError

USAGE_ERROR = 2


def _default_seed() -> int:
    raw = os.environ.get("PUBSUB_REFINE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"PUBSUB_REFINE_SEED must be an integer, got {raw!r}")


def _parse_weights(raw: str) -> dict[str, float]:
    weights = default_weights()
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"weight {item!r} is not of the form kind=value")
        kind, value = item.split("=", 1)
        weights[kind.strip()] = float(value)
    return weights


def _write_report(report, path: str | None):
    text = emit_report(report)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _summarize(report) -> str:
    t = report.totals
    verdict = "PASS" if report.ok else "FAIL"
    return (
        f"{verdict}: {t['steps']} steps, {t['checks']} checks, "
        f"{t['failed']} failed, {t['errors']} errors"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pubsub-refine",
        description="Check that flooding pubsub traces refine their atomic-broadcast specification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fuzz = sub.add_parser("fuzz", help="generate random traces and check every step")
    fuzz.add_argument("--steps", type=int, default=10)
    fuzz.add_argument("--traces", type=int, default=10)
    fuzz.add_argument("--max-peers", type=int, default=8)
    fuzz.add_argument("--max-topics", type=int, default=4)
    fuzz.add_argument("--max-messages", type=int, default=6)
    fuzz.add_argument("--seed", type=int, default=None)
    fuzz.add_argument("--static", action="store_true",
                      help="disable churn and subscription transitions")
    fuzz.add_argument("--weights", type=str, default="",
                      help="comma-separated kind=weight overrides")
    fuzz.add_argument("--report", type=str, default=None, help="write the JSON report here")

    run = sub.add_parser("run", help="replay a scenario file and check it")
    run.add_argument("scenario")
    run.add_argument("--report", type=str, default=None)

    enum = sub.add_parser("enumerate", help="exhaustive small-scope cross-check")
    enum.add_argument("--peers", type=int, required=True)
    enum.add_argument("--topics", type=int, required=True)
    enum.add_argument("--messages", type=int, required=True)
    enum.add_argument("--cap", type=int, default=2000,
                      help="refuse if the flood state space exceeds this many states")

    mutate = sub.add_parser("mutate", help="inject a built-in fault; expects detection")
    mutate.add_argument("--fault", required=True, choices=FAULTS)
    mutate.add_argument("--report", type=str, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "fuzz":
        seed = args.seed if args.seed is not None else _default_seed()
        try:
            weights = _parse_weights(args.weights)
            cfg = GeneratorConfig(
                max_peers=args.max_peers,
                max_topics=args.max_topics,
                max_messages=args.max_messages,
                steps=args.steps,
                seed=seed,
                weights=weights,
                static=args.static,
            )
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return USAGE_ERROR
        report = fuzz_run(cfg, traces=args.traces)
        _write_report(report, args.report)
        print(_summarize(report), file=sys.stderr)
        return 0 if report.ok else 1

    if args.command == "run":
        try:
            report = scenario_run(args.scenario)
        except (ScenarioError, TraceError, OSError) as e:
            print(f"error: {e}", file=sys.stderr)
            return USAGE_ERROR
        _write_report(report, args.report)
        print(_summarize(report), file=sys.stderr)
        if report.counterexample is not None:
            return 1
        return USAGE_ERROR if report.errors else 0

    if args.command == "enumerate":
        try:
            report = run_exhaustive(args.peers, args.topics, args.messages, cap=args.cap)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return USAGE_ERROR
        print(json.dumps(report.to_obj(), indent=2, sort_keys=True))
        return 0 if report.ok else 1

    if args.command == "mutate":
        report = run_fault(args.fault)
        _write_report(report, args.report)
        print(_summarize(report), file=sys.stderr)
        return 0 if report.ok else 1

    return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
