"""Command-line surface: run drafts, audit axioms, reproduce the desk-scale results.

Exit codes: 0 = expected verdict / all axioms hold, 1 = violation or unexpected
verdict, 2 = input error, 3 = undecided (cap or budget). Reports are
deterministic for fixed inputs; timestamps are dropped with --no-timestamp.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

from .axioms import (
    AXIOM_CHECKERS,
    PRIORITY_AXIOM_CHECKERS,
    VARIABLE_AXIOM_CHECKERS,
    ProblemDomain,
    fixed_domain,
    quota_domain,
    unacceptable_domain,
    variable_domain,
)
from .core import INFINITE, Priority, objects_of
from .problemfile import (
    ProblemDocument,
    ProblemFileError,
    ingest_csv,
    load_problem,
    render_report,
)
from .rules import (
    Rule,
    dictatorship_rule,
    draft_rule,
    null_rule,
    quota_draft_rule,
    serial_dictatorship_rule,
    snake_draft_rule,
    unacceptable_draft_rule,
    variable_draft_rule,
)
from . import verifier

DEFAULT_SEED = 20240801
ENUMERATION_CAP = 6  # objects, fixed-model sweeps
SEARCH_CAP = 5  # objects, rule-space search and relabeling sweeps

RULE_FACTORIES = {
    "draft": (draft_rule, ("fixed",)),
    "draft-quota": (quota_draft_rule, ("quota",)),
    "u-draft": (unacceptable_draft_rule, ("unacceptable",)),
    "draft-variable": (variable_draft_rule, ("variable",)),
    "serial-dictatorship": (serial_dictatorship_rule, ("fixed", "unacceptable", "variable")),
    "pi-dictatorship": (dictatorship_rule, ("fixed", "quota", "unacceptable", "variable")),
    "null": (lambda priority: null_rule(), ("fixed", "quota", "unacceptable", "variable")),
    "snake": (snake_draft_rule, ("fixed", "variable")),
}

THEOREM_IDS = (
    "T1",
    "T2",
    "T3",
    "T4",
    "T4-replay",
    "T5",
    "T6",
    "T7",
    "T8",
    "P1",
    "P3",
    "P4",
    "L1",
    "L2",
    "L8",
    "L9",
)


class InputError(Exception):
    pass


def _emit(report: dict, args) -> None:
    stamp = None if args.no_timestamp else datetime.now(timezone.utc).isoformat()
    text = render_report(report, stamp)
    if args.out:
        Path(args.out).write_text(text)
    elif args.json:
        sys.stdout.write(text)


def _build_rule(name: str, variant: str, priority: Priority) -> Rule:
    if name not in RULE_FACTORIES:
        raise InputError(f"unknown rule {name!r} (choose from {sorted(RULE_FACTORIES)})")
    factory, variants = RULE_FACTORIES[name]
    if variant not in variants:
        raise InputError(f"rule {name!r} does not run on {variant!r} problems")
    return factory(priority)


def _doc_priority(doc: ProblemDocument, args) -> Priority:
    if getattr(args, "priority", None):
        names = list(doc.agent_names)
        if sorted(args.priority) != sorted(names):
            raise InputError("--priority must list every agent name exactly once")
        return tuple(doc.problem.agents[names.index(n)] for n in args.priority)
    if doc.priority is not None:
        return doc.priority
    return doc.problem.agents


def cmd_run(args) -> int:
    doc = ingest_csv(args.problem) if args.problem.endswith(".csv") else load_problem(args.problem)
    prob = doc.problem
    priority = _doc_priority(doc, args)
    rule = _build_rule(args.rule, prob.variant, priority)
    alloc, trace = rule.run(prob)

    pick_order: dict[int, list[int]] = {a: [] for a in prob.agents}
    if trace:
        for _, agent, obj in trace:
            if obj is not None:
                pick_order[agent].append(obj)
    else:
        for agent, bundle in zip(prob.agents, alloc):
            pick_order[agent] = list(objects_of(bundle))

    assigned = 0
    for b in alloc:
        assigned |= b
    unassigned = [doc.object_name(o) for o in objects_of(prob.available & ~assigned)]

    print(f"rule: {rule.name}")
    for agent in prob.agents:
        names = ", ".join(doc.object_name(o) for o in pick_order[agent]) or "-"
        print(f"  {doc.agent_name(agent):>12}  {names}")
    if trace:
        steps = " ".join(
            f"{k}:{doc.agent_name(agent)}->"
            + (doc.object_name(obj) if obj is not None else "pass")
            for k, agent, obj in trace
        )
        print(f"trace: {steps}")
    if unassigned:
        print("unassigned: " + ", ".join(unassigned))

    report = {
        "command": "run",
        "rule": args.rule,
        "priority": [doc.agent_name(a) for a in priority],
        "allocation": {
            doc.agent_name(a): [doc.object_name(o) for o in pick_order[a]]
            for a in prob.agents
        },
        "trace": [
            [k, doc.agent_name(agent), doc.object_name(obj) if obj is not None else None]
            for k, agent, obj in (trace or ())
        ],
        "unassigned": unassigned,
        "exit": 0,
    }
    _emit(report, args)
    return 0


def _parse_quotas(text: str | None, n: int):
    if text is None:
        return (INFINITE,) * n
    parts = text.split(",")
    if len(parts) != n:
        raise InputError(f"expected {n} quota values")
    return tuple(INFINITE if p.strip() == "inf" else int(p) for p in parts)


def _make_domain(args) -> ProblemDomain:
    if args.variant == "fixed":
        return fixed_domain(args.agents, args.objects)
    if args.variant == "quota":
        return quota_domain(args.agents, args.objects, _parse_quotas(args.quotas, args.agents))
    if args.variant == "unacceptable":
        return unacceptable_domain(args.agents, args.objects)
    if args.variant == "variable":
        return variable_domain(args.agents, args.objects)
    raise InputError(f"unknown variant {args.variant!r}")


def _axiom_runner(domain, rule, priority):
    def run_one(name: str):
        if domain.variant == "variable":
            if name not in VARIABLE_AXIOM_CHECKERS:
                raise InputError(f"axiom {name!r} is not defined for variable domains")
            return VARIABLE_AXIOM_CHECKERS[name](rule, domain)
        if name in PRIORITY_AXIOM_CHECKERS:
            return PRIORITY_AXIOM_CHECKERS[name](rule, domain, priority)
        if name in AXIOM_CHECKERS:
            return AXIOM_CHECKERS[name](rule, domain)
        raise InputError(f"unknown axiom {name!r}")

    return run_one


_JOB_RUNNER = None  # set before forking; children inherit it


def _run_axiom_job(name: str):
    return _JOB_RUNNER(name)


def cmd_check(args) -> int:
    if args.objects > ENUMERATION_CAP and not args.i_know_this_is_huge:
        print(
            f"undecided: {args.objects} objects exceeds the enumeration cap "
            f"({ENUMERATION_CAP}); pass --i-know-this-is-huge to force",
            file=sys.stderr,
        )
        _emit({"command": "check", "verdicts": {}, "exit": 3, "note": "cap exceeded"}, args)
        return 3
    domain = _make_domain(args)
    priority = tuple(range(1, args.agents + 1))
    if args.priority:
        priority = tuple(int(p) for p in args.priority)
    rule = _build_rule(args.rule, args.variant, priority)
    axioms = [a.strip() for a in args.axioms.split(",") if a.strip()]
    run_one = _axiom_runner(domain, rule, priority)

    if args.jobs > 1:
        import multiprocessing as mp

        global _JOB_RUNNER
        _JOB_RUNNER = run_one
        with mp.get_context("fork").Pool(args.jobs) as pool:
            reports = pool.map(_run_axiom_job, axioms)
    else:
        reports = [run_one(a) for a in axioms]

    verdicts = {}
    all_hold = True
    for name, rep in zip(axioms, reports):
        verdicts[name] = {"verdict": rep.verdict, "checked": rep.checked}
        if rep.witness:
            verdicts[name]["witness"] = rep.witness
        if rep.note:
            verdicts[name]["note"] = rep.note
        all_hold = all_hold and rep.holds
        print(f"  {name:>6}: {rep.verdict} ({rep.checked} checks)")
    code = 0 if all_hold else 1
    _emit({"command": "check", "rule": args.rule, "verdicts": verdicts, "exit": code}, args)
    return code


def _verify_driver(args):
    tid = args.theorem
    budget = args.budget
    seed = args.seed
    if tid == "T1":
        rep = verifier.verify_t1(args.agents or 2, args.objects or 3, budget)
        return rep.status != "undecided", rep.unique_target, {
            "status": rep.status,
            "survivors": len(rep.survivors),
            "equals_draft": rep.matches_target,
            "note": rep.note,
        }
    if tid == "T2":
        rep = verifier.verify_t2(args.objects or 3, budget)
        return rep.status != "undecided", rep.status == "unsat" and rep.replays_ok, {
            "status": rep.status,
            "certificate_replays": rep.replays_ok,
        }
    if tid == "T3":
        rep = verifier.verify_t3(args.objects or 4, budget)
        return rep.status != "undecided", rep.status == "unsat" and rep.replays_ok, {
            "status": rep.status,
            "certificate_replays": rep.replays_ok,
        }
    if tid == "T4":
        rep = verifier.verify_theorem4_unsat(budget)
        return rep.status != "undecided", rep.status == "unsat" and rep.replays_ok, {
            "status": rep.status,
            "certificate_replays": rep.replays_ok,
        }
    if tid == "T4-replay":
        try:
            log = verifier.replay_theorem4_cases()
            return True, True, {"steps": len(log["steps"]), "cases": log["cases"]}
        except verifier.Theorem4ReplayError as exc:
            return True, False, {"mismatch": str(exc)}
    if tid == "T5":
        counts = tuple(range(2, (args.agents or 3) + 1))
        reports = verifier.verify_t5(counts, args.objects or 4, seed=seed)
        ok = all(r.ok for r in reports)
        return True, ok, {
            "certificate": [r.certificate.verdict for r in reports],
            "falsifier": [r.falsifier.verdict for r in reports],
            "best_case": [r.best_case.verdict for r in reports],
        }
    if tid == "T6":
        quotas = _parse_quotas(args.quotas, 2) if args.quotas else (1, 2)
        rep = verifier.verify_t6(args.objects or 3, quotas, budget)
        return rep.status != "undecided", rep.unique_target, {
            "status": rep.status,
            "survivors": len(rep.survivors),
            "note": rep.note,
        }
    if tid == "T7":
        rep = verifier.verify_t7(args.objects or 3, budget)
        return rep.status != "undecided", rep.unique_target, {
            "status": rep.status,
            "survivors": len(rep.survivors),
            "note": rep.note,
        }
    if tid == "T8":
        rep = verifier.verify_t8(args.agents or 3, args.objects or 4)
        ok = rep.sweep_ok and rep.priorities_recovered and rep.extension_ok and rep.snake_diverges
        return True, ok, {
            "sweep_ok": rep.sweep_ok,
            "priorities_recovered": rep.priorities_recovered,
            "extension_ok": rep.extension_ok,
            "snake_diverges": rep.snake_diverges,
            "note": rep.note,
        }
    if tid == "P1":
        rep = verifier.verify_efficiency_decomposition(
            fixed_domain(2, args.objects or 4), n_random_rules=1000, seed=seed
        )
        return True, rep.ok, {"checked_pairs": rep.checked_pairs, "disagreements": len(rep.disagreements)}
    if tid == "P3":
        rep = verifier.verify_efficiency_decomposition(
            unacceptable_domain(2, args.objects or 3), n_random_rules=1000, seed=seed
        )
        return True, rep.ok, {"checked_pairs": rep.checked_pairs, "disagreements": len(rep.disagreements)}
    if tid == "P4":
        rep = verifier.verify_truncation_invariance_implication(
            args.objects or 2, n_random_rules=200, seed=seed
        )
        return True, rep.ok, {
            "rules_checked": rep.rules_checked,
            "premise_holds": rep.premise_holds,
            "violations": len(rep.violations),
        }
    if tid == "L1":
        rep = verifier.verify_critical_agent(args.agents or 3, args.objects or 3)
        return True, rep["ok"], rep
    if tid == "L2":
        rep = verifier.verify_rm_lemma()
        return True, rep["ok"], rep
    if tid == "L8":
        rep = verifier.verify_priority_recovery(args.agents or 4)
        return True, rep["ok"], rep
    if tid == "L9":
        rep = verifier.verify_t8(args.agents or 2, args.objects or 3)
        return True, rep.extension_ok and rep.snake_diverges, {
            "extension_ok": rep.extension_ok,
            "snake_diverges": rep.snake_diverges,
        }
    raise InputError(f"unknown theorem id {tid!r}")


def cmd_verify(args) -> int:
    if (args.objects or 0) > SEARCH_CAP and not args.i_know_this_is_huge:
        print(
            f"undecided: {args.objects} objects exceeds the search cap ({SEARCH_CAP}); "
            "pass --i-know-this-is-huge to force",
            file=sys.stderr,
        )
        _emit({"command": "verify", "theorem": args.theorem, "exit": 3}, args)
        return 3
    decided, ok, detail = _verify_driver(args)
    code = 0 if (decided and ok) else (3 if not decided else 1)
    verdict = "reproduced" if code == 0 else ("undecided" if code == 3 else "NOT reproduced")
    print(f"{args.theorem}: {verdict}")
    for key, value in detail.items():
        print(f"  {key}: {value}")
    _emit({"command": "verify", "theorem": args.theorem, "detail": detail, "exit": code}, args)
    return code


def cmd_manipulate(args) -> int:
    doc = load_problem(args.problem)
    prob = doc.problem
    priority = _doc_priority(doc, args)
    rule = _build_rule(args.rule, prob.variant, priority)
    if args.agent not in doc.agent_names:
        raise InputError(f"unknown agent {args.agent!r}")
    agent = prob.agents[doc.agent_names.index(args.agent)]
    found = verifier.find_manipulation(rule, prob, agent)
    if found is None:
        print("no profitable misreport at this problem")
        _emit({"command": "manipulate", "found": False, "exit": 0}, args)
        return 0
    report_pref, gained, lost = found
    from .problemfile import format_ranking

    misreport = format_ranking(doc, report_pref)
    print(f"agent {args.agent} gains by reporting: {misreport}")
    print(
        "  bundle "
        + "{" + ", ".join(doc.object_name(o) for o in objects_of(gained)) + "}"
        + " instead of "
        + "{" + ", ".join(doc.object_name(o) for o in objects_of(lost)) + "}"
    )
    _emit(
        {
            "command": "manipulate",
            "found": True,
            "agent": args.agent,
            "misreport": misreport,
            "gained": [doc.object_name(o) for o in objects_of(gained)],
            "lost": [doc.object_name(o) for o in objects_of(lost)],
            "exit": 0,
        },
        args,
    )
    return 0


def cmd_infer_priority(args) -> int:
    priority = tuple(int(p) for p in args.priority)
    rule = _build_rule(args.rule, "variable", priority)
    try:
        inferred = verifier.infer_priority(rule, sorted(priority))
    except verifier.PriorityInferenceError as exc:
        print(f"inference failed: {exc}")
        _emit({"command": "infer-priority", "error": str(exc), "exit": 1}, args)
        return 1
    print("inferred priority: " + " ".join(map(str, inferred)))
    _emit({"command": "infer-priority", "priority": list(inferred), "exit": 0}, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="draftkit",
        description="Draft allocation rules, axiom audits, and desk-scale verification.",
    )
    parser.add_argument("--out", help="write the machine-readable report to this file")
    parser.add_argument("--json", action="store_true", help="print the report to stdout")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for checks")
    parser.add_argument("--budget", type=int, default=10_000_000, help="propagation budget")
    parser.add_argument("--no-timestamp", action="store_true", help="omit timestamps")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an allocation rule on a problem file")
    run.add_argument("problem", help="problem document (.txt) or preference table (.csv)")
    run.add_argument("--rule", default="draft", choices=sorted(RULE_FACTORIES))
    run.add_argument("--priority", nargs="+", help="agent names, highest first")
    run.set_defaults(fn=cmd_run)

    check = sub.add_parser("check", help="audit axioms over an enumerated domain")
    check.add_argument("--rule", required=True, choices=sorted(RULE_FACTORIES))
    check.add_argument("--axioms", required=True, help="comma-separated axiom names")
    check.add_argument("--agents", type=int, default=2)
    check.add_argument("--objects", type=int, default=3)
    check.add_argument(
        "--variant", default="fixed", choices=("fixed", "quota", "unacceptable", "variable")
    )
    check.add_argument("--quotas", help="comma-separated, e.g. 1,2 or 1,inf")
    check.add_argument("--priority", nargs="+", help="agent ids, highest first")
    check.add_argument("--i-know-this-is-huge", action="store_true")
    check.set_defaults(fn=cmd_check)

    verify = sub.add_parser("verify", help="reproduce a desk-scale result")
    verify.add_argument("theorem", choices=THEOREM_IDS)
    verify.add_argument("--agents", type=int)
    verify.add_argument("--objects", type=int)
    verify.add_argument("--quotas")
    verify.add_argument("--i-know-this-is-huge", action="store_true")
    verify.set_defaults(fn=cmd_verify)

    manip = sub.add_parser("manipulate", help="search misreports at one problem")
    manip.add_argument("problem")
    manip.add_argument("--agent", required=True, help="agent name from the file")
    manip.add_argument("--rule", default="draft", choices=sorted(RULE_FACTORIES))
    manip.add_argument("--priority", nargs="+")
    manip.set_defaults(fn=cmd_manipulate)

    infer = sub.add_parser("infer-priority", help="recover a rule's priority from probes")
    infer.add_argument("--rule", default="draft-variable", choices=sorted(RULE_FACTORIES))
    infer.add_argument("--priority", nargs="+", required=True, help="agent ids, highest first")
    infer.set_defaults(fn=cmd_infer_priority)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, ProblemFileError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
