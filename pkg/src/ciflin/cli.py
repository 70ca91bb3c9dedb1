"""``cif-lin``: command-line front end.

Every option can also be given through an environment variable
``CIFLIN_<OPTION>`` (for example ``CIFLIN_FORMAT=json``); explicit flags win.
Exit codes: 0 success, 1 failed check, 2 usage or parse error, 3 budget
exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .dsl import ParseError, parse_model, print_model
from .explicit import explicit_lts, initial_valuations
from .export import (
    dumps,
    explicit_to_dot,
    explicit_to_json,
    explicit_to_text,
    linear_to_dot,
    linear_to_dsl,
    linear_to_json,
    lits_to_dot,
    lits_to_json,
    lits_to_text,
    sts_to_dot,
    sts_to_json,
    sts_to_text,
)
from .generate import random_model
from .linear import SizeHypothesisError, build_lits, lits_static, predict_size
from .linearizer import linearize
from .lts import BudgetExceeded
from .symbolic import build_sts
from .verify import (
    check_correctness_of_linearization,
    check_lits_soundness_completeness,
    check_symbolic_soundness_completeness,
    drop_lits_transition,
    drop_pointer_update,
    replay,
)

FORMATS = {
    "parse": ("text",),
    "explicit": ("text", "json", "dot"),
    "sts": ("text", "json", "dot"),
    "lits": ("text", "json", "dot"),
    "linearize": ("text", "json", "dot"),
    "verify": ("text", "json"),
    "size": ("text", "json"),
}

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bool_env(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cif-lin", description="Linearization toolkit for CIF-like automata models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, model_required=True):
        p.add_argument("model", nargs=None if model_required else "?", help="model source file")
        p.add_argument("--format", "-f", default="text")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--max-states", type=int, default=None, help="state budget")

    p = sub.add_parser("parse", help="echo the normalized model")
    common(p)

    p = sub.add_parser("explicit", help="explicit transition system from the initial valuations")
    common(p)

    p = sub.add_parser("sts", help="symbolic transition system")
    common(p)
    p.add_argument("--prune", action=argparse.BooleanOptionalAction, default=True)

    p = sub.add_parser("lits", help="linear transition system")
    common(p)

    p = sub.add_parser("linearize", help="linear automaton of the model's composition")
    common(p)
    p.add_argument("--simplify", action=argparse.BooleanOptionalAction, default=False)

    p = sub.add_parser("verify", help="run all bounded-domain checks")
    common(p, model_required=False)
    p.add_argument("--seed", type=int, default=0, help="first seed for --random")
    p.add_argument("--random", type=int, default=0, metavar="N", help="also check N seeded random models")
    p.add_argument("--replay", metavar="FILE", help="replay a counterexample written by a failing run")
    p.add_argument("--inject-fault", choices=("lits", "linearization"),
                   help="mutate one side of a check to demonstrate a counterexample")
    p.add_argument("--timing", action=argparse.BooleanOptionalAction, default=False,
                   help="include wall-clock times (breaks byte-identical output)")

    p = sub.add_parser("size", help="predicted vs actual number of linear transitions")
    common(p)
    p.add_argument("--action", help="the single synchronizing action")
    return parser


def _apply_env(parser: argparse.ArgumentParser, argv):
    """Turn ``CIFLIN_*`` variables into defaults of the chosen subcommand."""
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    command = next((a for a in argv if a in sub_action.choices), None)
    if command is None:
        return
    sp = sub_action.choices[command]
    for action in sp._actions:
        if not action.option_strings:
            continue
        key = "CIFLIN_" + action.dest.upper()
        if key not in os.environ:
            continue
        raw = os.environ[key]
        if isinstance(action, argparse.BooleanOptionalAction):
            value = _bool_env(raw)
        elif action.type is int:
            try:
                value = int(raw)
            except ValueError:
                raise UsageError(f"{key}: not an integer: {raw!r}") from None
        else:
            value = raw
        sp.set_defaults(**{action.dest: value})


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_model(text)


def _emit(args, text: str, out):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def _render(fmt, text=None, js=None, dot=None):
    if fmt == "json":
        return dumps(js())
    if fmt == "dot":
        return dot()
    return text()


def _cmd_parse(args, out):
    _emit(args, print_model(_load(args.model)), out)
    return EXIT_OK


def _cmd_explicit(args, out):
    m = _load(args.model)
    p, d = m.main, m.domains
    ts = explicit_lts(p, initial_valuations(p, d), d, bound=args.max_states or 100_000)
    _emit(args, _render(args.format, lambda: explicit_to_text(ts), lambda: explicit_to_json(ts),
                        lambda: explicit_to_dot(ts)), out)
    return EXIT_OK


def _cmd_sts(args, out):
    sts = build_sts(_load(args.model).main, prune=args.prune)
    if args.max_states is not None and sts.state_count > args.max_states:
        raise BudgetExceeded(f"more than {args.max_states} states")
    _emit(args, _render(args.format, lambda: sts_to_text(sts), lambda: sts_to_json(sts),
                        lambda: sts_to_dot(sts)), out)
    return EXIT_OK


def _cmd_lits(args, out):
    lits = build_lits(_load(args.model).main)
    _emit(args, _render(args.format, lambda: lits_to_text(lits), lambda: lits_to_json(lits),
                        lambda: lits_to_dot(lits)), out)
    return EXIT_OK


def _cmd_linearize(args, out):
    m = _load(args.model)
    res = linearize(m.main, declared=m.domains.names, simplify=args.simplify)
    _emit(args, _render(args.format, lambda: linear_to_dsl(m, res), lambda: linear_to_json(m, res),
                        lambda: linear_to_dot(res)), out)
    return EXIT_OK


def _hooks(fault):
    return {
        "lits": {"lits": drop_lits_transition(0)},
        "linearization": {"linearization": drop_pointer_update()},
    }.get(fault, {})


def _run_checks(p, d, budget, hooks):
    kw = {} if budget is None else {"budget": budget}
    return [
        check_symbolic_soundness_completeness(p, d, hook=hooks.get("symbolic"), **kw),
        check_lits_soundness_completeness(p, hook=hooks.get("lits"), **kw),
        check_correctness_of_linearization(p, d, hook=hooks.get("linearization"), **kw),
    ]


def _first_counterexample(obj):
    """Accept a bare counterexample, one report, or a whole ``verify`` JSON output."""
    if "models" in obj:
        for entry in obj["models"]:
            for report in entry["reports"]:
                if report.get("counterexample"):
                    return report["counterexample"]
        return None
    if "passed" in obj:
        return obj.get("counterexample")
    return obj if "check" in obj else None


def _cmd_verify(args, out):
    if args.format not in FORMATS["verify"]:
        raise UsageError(f"format {args.format!r} not available for verify")
    hooks = _hooks(args.inject_fault)
    if args.replay:
        if not args.model:
            raise UsageError("--replay needs the model the counterexample was produced from")
        m = _load(args.model)
        try:
            with open(args.replay, encoding="utf-8") as fh:
                cex = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read counterexample {args.replay}: {exc}") from None
        cex = _first_counterexample(cex)
        if cex is None:
            raise UsageError(f"{args.replay} holds no counterexample")
        name = cex.get("check")
        reproduced = replay(cex, m.main, m.domains, hooks.get({"linear-symbolic": "lits"}.get(name, name)))
        result = {"check": name, "reproduced": reproduced, "summary": cex.get("summary", "")}
        text = f"{'REPRODUCED' if reproduced else 'NOT REPRODUCED'}: {name}: {result['summary']}\n"
        _emit(args, dumps(result) if args.format == "json" else text, out)
        return EXIT_FAIL if reproduced else EXIT_OK

    models = []
    if args.model:
        m = _load(args.model)
        models.append((os.path.basename(args.model), m))
    for i in range(args.random):
        models.append((f"random-seed-{args.seed + i}", random_model(args.seed + i)))
    if not models:
        raise UsageError("nothing to verify: give a model file or --random N")

    results = []
    for name, m in models:
        results.append((name, _run_checks(m.main, m.domains, args.max_states, hooks)))
    passed = all(r.passed for _, reports in results for r in reports)
    if args.format == "json":
        text = dumps({
            "passed": passed,
            "models": [{"name": n, "reports": [r.to_dict(args.timing) for r in reports]} for n, reports in results],
        })
    else:
        lines = []
        for n, reports in results:
            lines.append(f"{n}:")
            lines.extend("  " + r.to_text(args.timing).replace("\n", "\n  ") for r in reports)
        lines.append("all checks passed" if passed else "some checks FAILED")
        text = "\n".join(lines) + "\n"
    _emit(args, text, out)
    return EXIT_OK if passed else EXIT_FAIL


def _cmd_size(args, out):
    m = _load(args.model)
    p = m.main
    action = args.action
    if action is None:
        sync = sorted(lits_static(p).sync)
        if len(sync) != 1:
            raise UsageError(f"give --action; the model synchronizes on {sync}")
        action = sync[0]
    try:
        predicted = predict_size(p, action)
    except SizeHypothesisError as exc:
        raise UsageError(str(exc)) from None
    actual = len(build_lits(p).transitions)
    result = {"action": action, "predicted": predicted, "actual": actual, "match": predicted == actual}
    if args.format == "json":
        text = dumps(result)
    else:
        text = f"action {action}: predicted {predicted}, actual {actual}, {'match' if result['match'] else 'MISMATCH'}\n"
    _emit(args, text, out)
    return EXIT_OK if result["match"] else EXIT_FAIL


COMMANDS = {
    "parse": _cmd_parse,
    "explicit": _cmd_explicit,
    "sts": _cmd_sts,
    "lits": _cmd_lits,
    "linearize": _cmd_linearize,
    "verify": _cmd_verify,
    "size": _cmd_size,
}


def run(argv=None, out=None, err=None) -> int:
    """Run the CLI; returns the exit code instead of exiting."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        _apply_env(parser, argv)
        args = parser.parse_args(argv)
        if args.format not in FORMATS[args.command]:
            raise UsageError(f"format {args.format!r} not available for {args.command}; "
                             f"choose from {', '.join(FORMATS[args.command])}")
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"cif-lin: error: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        err.write(f"cif-lin: parse error at {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        err.write(f"cif-lin: error: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        err.write(f"cif-lin: budget exceeded: {exc}\n")
        return EXIT_BUDGET


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
