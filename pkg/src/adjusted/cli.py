"""Command-line front end.

Subcommands::

    analyze        build the indistinguishability graph of a bag
    adjusts-check  decide whether one spec adjusts another
    lincheck       certify recorded or freshly recorded histories
    bench-micro    read/update microbenchmark over one object
    bench-retwis   social-network workload benchmark

Exit codes: 0 success, 1 a check came back negative, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys

from .seqspec import (
    CATALOG_NAMES,
    SpecError,
    catalog,
    check_adjusts,
    make_bag,
    state_from_text,
)
from .igraph import FACTORIAL_BOUND, build_graph, classes, export_graph
from .linearizer import (
    NotLinearizable,
    Recorder,
    Witness,
    check,
    history_from_jsonl,
    interface_spec,
    params_for_history,
    random_workload,
    record,
    stress_profile,
)
from .objects import make_object, object_ids
from .bench import (
    DEFAULT_MIX,
    MicroConfig,
    RetwisConfig,
    VARIANTS,
    micro_run,
    retwis_run,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


_BAG_ITEM = re.compile(
    r"^\s*(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"(?:\((?P<paren>[^()]*)\)|:(?P<colon>[^,]*))?\s*$"
)


def _atom(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def parse_bag(text: str) -> tuple:
    """Parse ``inc,offer(2),set:1`` into operation prototypes."""
    protos = []
    depth = 0
    item = ""
    pieces = []
    for ch in text:
        if ch == "," and depth == 0:
            pieces.append(item)
            item = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        item += ch
    pieces.append(item)
    for piece in pieces:
        if not piece.strip():
            raise SpecError("empty operation in bag %r" % (text,))
        m = _BAG_ITEM.match(piece)
        if not m:
            raise SpecError("cannot parse bag item %r" % (piece.strip(),))
        raw = m.group("paren") if m.group("paren") is not None \
            else m.group("colon")
        args = ()
        if raw:
            args = tuple(_atom(a) for a in raw.split(","))
        protos.append((m.group("name"), args))
    return make_bag(protos)


def _spec_params(text):
    if not text:
        return None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("--params must be a JSON object: %s" % exc)
    if not isinstance(doc, dict):
        raise SpecError("--params must be a JSON object")
    return {k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()}


def _mix_arg(text: str) -> dict:
    mix = {}
    for part in text.split(","):
        if "=" not in part:
            raise SpecError("mix entries look like name=percent, got %r" % part)
        name, _, pct = part.partition("=")
        try:
            mix[name.strip()] = int(pct)
        except ValueError:
            raise SpecError("mix percentage %r is not an integer" % pct)
    return mix


def make_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    top = _Parser(prog="adjusted", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True, metavar="COMMAND")

    an = sub.add_parser("analyze", formatter_class=fmt,
                        help="indistinguishability graph of one bag")
    an.add_argument("--spec", required=True, choices=sorted(CATALOG_NAMES),
                    help="catalog spec name")
    an.add_argument("--bag", required=True,
                    help="comma-separated ops, e.g. 'inc,inc' or 'offer(2),poll'")
    an.add_argument("--state", default=None,
                    help="start state literal (JSON; 'bot' for references); "
                         "default: the spec's initial state")
    an.add_argument("--params", default=None,
                    help="JSON object bounding argument domains")
    an.add_argument("--format", choices=("json", "dot"), default="json",
                    help="output format")
    an.add_argument("--one-shot", action="store_true",
                    help="compare responses only (drop reachability)")
    an.add_argument("--factorial-bound", type=int, default=FACTORIAL_BOUND,
                    help="largest permitted bag size")

    ad = sub.add_parser("adjusts-check", formatter_class=fmt,
                        help="does one spec adjust another?")
    ad.add_argument("--adjusted", required=True, choices=sorted(CATALOG_NAMES))
    ad.add_argument("--base", required=True, choices=sorted(CATALOG_NAMES))
    ad.add_argument("--params", default=None,
                    help="JSON object bounding argument domains")
    ad.add_argument("--format", choices=("json", "text"), default="text")

    lc = sub.add_parser("lincheck", formatter_class=fmt,
                        help="linearizability of recorded or live histories")
    lc.add_argument("--object", default="counter.adjusted",
                    choices=object_ids(), help="object id")
    lc.add_argument("--history", default=None,
                    help="JSONL history file to check (skips live recording)")
    lc.add_argument("--threads", type=int, default=3,
                    help="live mode: recording threads")
    lc.add_argument("--ops", type=int, default=4,
                    help="live mode: max ops per thread")
    lc.add_argument("--trials", type=int, default=25,
                    help="live mode: schedules to record and certify")
    lc.add_argument("--seed", type=int, default=None, help="workload seed")
    lc.add_argument("--bound", type=int, default=20,
                    help="search bound on completed operations")

    def bench_common(b):
        b.add_argument("--threads", "-t", type=int, default=1,
                       help="worker threads")
        b.add_argument("--runs", "-r", type=int, default=5,
                       help="independent timed runs")
        b.add_argument("--duration", "-d", type=float, default=5.0,
                       help="seconds measured per run")
        b.add_argument("--warmup", "-W", type=float, default=2.0,
                       help="unmeasured seconds before each run")
        b.add_argument("--ops", "-n", type=int, default=None,
                       help="count mode: exact ops per thread (ignores "
                            "duration/warmup)")
        b.add_argument("--seed", type=int, default=None,
                       help="rng seed; omit for a fresh one")
        b.add_argument("--pin", action="store_true",
                       help="pin worker threads to cpus")
        b.add_argument("--out", choices=("json", "csv"), default="json",
                       help="report format on stdout")

    bm = sub.add_parser("bench-micro", formatter_class=fmt,
                        help="read/update microbenchmark")
    bm.add_argument("--object", default="counter.adjusted",
                    choices=object_ids(), help="object id")
    bm.add_argument("--update-ratio", "-u", type=int, default=50,
                    help="percent of ops that mutate (the reference workload "
                         "measures reads only and ignores this)")
    bm.add_argument("--key-range", "-k", type=int, default=1024,
                    help="distinct keys touched")
    bm.add_argument("--initial-size", "-i", type=int, default=0,
                    help="entries pre-filled before timing")
    bm.add_argument("--batch", type=int, default=1000,
                    help="ops between clock checks")
    bench_common(bm)

    br = sub.add_parser("bench-retwis", formatter_class=fmt,
                        help="social-network workload")
    br.add_argument("--users", type=int, default=1000,
                    help="initial community size")
    br.add_argument("--alpha", type=float, default=0.6,
                    help="skew in (0,1]; exponent is 1.2*alpha")
    br.add_argument("--variant", choices=VARIANTS, default="adjusted",
                    help="storage under test")
    br.add_argument("--mix", type=str,
                    default=",".join("%s=%d" % (k, DEFAULT_MIX[k])
                                     for k in sorted(DEFAULT_MIX)),
                    help="comma list name=percent summing to 100")
    br.add_argument("--timeline-cap", type=int, default=50,
                    help="posts kept per timeline read")
    br.add_argument("--eager-fanout", type=int, default=32,
                    help="followers notified synchronously per post")
    bench_common(br)
    return top


def _cmd_analyze(ns) -> int:
    spec = catalog(ns.spec, _spec_params(ns.params))
    bag = parse_bag(ns.bag)
    state = (spec.init_state if ns.state is None
             else state_from_text(spec, ns.state))
    graph = build_graph(spec, state, bag,
                        factorial_bound=ns.factorial_bound,
                        one_shot=ns.one_shot)
    sys.stdout.write(export_graph(graph, ns.format))
    return 0


def _cmd_adjusts_check(ns) -> int:
    params = _spec_params(ns.params)
    report = check_adjusts(catalog(ns.adjusted, params),
                           catalog(ns.base, params))
    if ns.format == "json":
        sys.stdout.write(json.dumps(report.to_doc(), indent=2,
                                    sort_keys=True) + "\n")
    else:
        verdict = "PASS" if report.passed else "FAIL"
        sys.stdout.write("%s: %s adjusts %s\n"
                         % (verdict, report.adjusted, report.base))
        for name, v in sorted(report.ops.items()):
            sys.stdout.write(
                "  %-10s pre:%s post:%s\n"
                % (name,
                   "ok" if v.pre_implication else "FAIL",
                   "ok" if v.post_implication else "FAIL")
            )
        if report.missing_templates:
            sys.stdout.write("  base-only operations: %s\n"
                             % ", ".join(report.missing_templates))
        for cx in report.counterexamples[:5]:
            sys.stdout.write("  counterexample: %s\n" % (cx,))
    return 0 if report.passed else 1


def _cmd_lincheck(ns) -> int:
    if ns.history is not None:
        with open(ns.history, "r", encoding="utf-8") as fh:
            history = history_from_jsonl(fh.read(), ns.object)
        spec = interface_spec(ns.object, params_for_history(ns.object, history))
        verdict = check(history, spec, bound=ns.bound)
        if isinstance(verdict, Witness):
            sys.stdout.write("linearizable: %d operation(s) certified\n"
                             % history.completed_count())
            return 0
        sys.stdout.write("NOT linearizable: %s\n" % verdict)
        sys.stdout.write(verdict.prefix.to_jsonl())
        return 1
    rng = random.Random(ns.seed)
    spec, threads, allow = stress_profile(ns.object, ns.threads)
    for trial in range(ns.trials):
        recorder = Recorder(make_object(ns.object), ns.object)
        plan = random_workload(
            spec, threads, lambda r: r.randrange(1, ns.ops + 1), rng,
            allow=allow,
        )
        history = record(recorder, plan)
        verdict = check(history, spec, bound=ns.bound)
        if isinstance(verdict, NotLinearizable):
            sys.stdout.write("trial %d NOT linearizable: %s\n"
                             % (trial, verdict))
            sys.stdout.write(verdict.prefix.to_jsonl())
            return 1
    sys.stdout.write("certified %d recorded schedule(s) on %s\n"
                     % (ns.trials, ns.object))
    return 0


def _cmd_bench_micro(ns) -> int:
    cfg = MicroConfig(
        object_id=ns.object,
        threads=ns.threads,
        update_ratio=ns.update_ratio,
        key_range=ns.key_range,
        initial_size=ns.initial_size,
        duration=ns.duration,
        warmup=ns.warmup,
        runs=ns.runs,
        batch=ns.batch,
        seed=ns.seed,
        ops_per_thread=ns.ops,
        pin_threads=ns.pin,
    )
    report = micro_run(cfg)
    sys.stdout.write(report.to_csv() if ns.out == "csv" else report.to_json())
    return 0


def _cmd_bench_retwis(ns) -> int:
    cfg = RetwisConfig(
        users=ns.users,
        alpha=ns.alpha,
        variant=ns.variant,
        threads=ns.threads,
        duration=ns.duration,
        warmup=ns.warmup,
        runs=ns.runs,
        mix=_mix_arg(ns.mix),
        timeline_cap=ns.timeline_cap,
        eager_fanout=ns.eager_fanout,
        seed=ns.seed,
        ops_per_thread=ns.ops,
        pin_threads=ns.pin,
    )
    report = retwis_run(cfg)
    sys.stdout.write(report.to_csv() if ns.out == "csv" else report.to_json())
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "adjusts-check": _cmd_adjusts_check,
    "lincheck": _cmd_lincheck,
    "bench-micro": _cmd_bench_micro,
    "bench-retwis": _cmd_bench_retwis,
}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
        return _COMMANDS[ns.command](ns)
    except _UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except (SpecError, ValueError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


def run() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
