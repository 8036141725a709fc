"""Rule-space constraint search: one variable per problem key, candidates are allocations.

Intra-problem axioms filter candidate sets; inter-problem axioms become binary
constraints with precomputed allowed-masks. Propagation is queue-based arc
consistency; search is depth-first with a deterministic variable and value
order, so verdicts and witnesses never depend on scheduling. Unsatisfiable
searches emit a replayable certificate: a tree of decisions whose leaves carry
the propagation steps that empty a variable, and the replayer independently
re-justifies every removal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .core import (
    Allocation,
    Preference,
    Priority,
    Problem,
    bundle_size,
    objects_of,
    subsets_of,
)
from .axioms import ProblemDomain, _dominates, _ef1_ok, _rankings, _trade_cycle, _union, describe_problem
from .rules import Rule, problem_key, tabulated_rule

SCOPE_NOTE = "finite-domain result: quantifies over the checked domain only"


class BudgetExceeded(Exception):
    pass


@dataclass
class BinaryConstraint:
    """Allowed-pairs relation between two variables, stored as per-value masks."""

    name: str
    u: int
    v: int
    forward: list[int]  # forward[a] = bitmask over v-candidates compatible with u-candidate a
    backward: list[int]

    def allowed(self, var: int, val: int) -> int:
        return self.forward[val] if var == self.u else self.backward[val]

    def other(self, var: int) -> int:
        return self.v if var == self.u else self.u


@dataclass
class RuleCSP:
    domain: ProblemDomain
    axioms: tuple[str, ...]
    keys: list
    problems: list[Problem]  # canonical representative per key
    candidates: list[list[Allocation]]
    domains: list[int]  # current candidate bitmask per variable
    constraints: list[BinaryConstraint]
    watchers: list[list[int]]  # var -> constraint indexes

    def var_name(self, var: int) -> dict:
        return describe_problem(self.problems[var])


@dataclass
class PropagationStep:
    constraint: str
    var: int
    removed: int  # bitmask of removed candidate indexes


@dataclass
class InfeasibilityCertificate:
    """Branch tree: either a leaf (trace emptying a variable) or decisions on one variable."""

    emptied_var: int | None = None
    trace: list[PropagationStep] = field(default_factory=list)
    branch_var: int | None = None
    branches: list[tuple[int, "InfeasibilityCertificate"]] = field(default_factory=list)


@dataclass
class SolveStats:
    revisions: int = 0
    nodes: int = 0


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "undecided"
    solutions: list[dict]
    certificate: InfeasibilityCertificate | None
    stats: SolveStats
    note: str = SCOPE_NOTE


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------


def _all_allocations(problem: Problem) -> list[Allocation]:
    objs = objects_of(problem.available)
    n = len(problem.agents)
    out = []
    for assign in product(range(n + 1), repeat=len(objs)):
        bundles = [0] * n
        for o, who in zip(objs, assign):
            if who < n:
                bundles[who] |= 1 << o
        alloc = tuple(bundles)
        if problem.quotas is not None and any(
            bundle_size(b) > q for b, q in zip(alloc, problem.quotas)
        ):
            continue
        out.append(alloc)
    return out


def _unary_ok(axiom: str, problem: Problem, alloc: Allocation, priority) -> bool:
    profile, quotas = problem.profile, problem.quotas or (None,) * len(problem.agents)
    n = len(problem.agents)
    if axiom == "NW":
        return _union(alloc) == problem.available
    if axiom == "NWq":
        total = sum(problem.quotas)
        return bundle_size(_union(alloc)) == min(bundle_size(problem.available), total)
    if axiom == "NW*":
        wanted = 0
        for p in profile:
            wanted |= p.acceptable
        return wanted & problem.available & ~_union(alloc) == 0
    if axiom == "IR":
        return all(not b & ~p.acceptable for p, b in zip(profile, alloc))
    if axiom == "EF1":
        return all(
            _ef1_ok(profile[j], quotas[j], alloc[j], alloc[i])
            for j in range(n)
            for i in range(n)
            if i != j
        )
    if axiom == "EFF":
        return _union(alloc) == problem.available and _trade_cycle(profile, alloc) is None
    if axiom in ("RP", "WRP", "WRP*", "WRPq"):
        pos = {a: priority.index(a) for a in problem.agents}
        for i in range(n):
            for j in range(n):
                if pos[problem.agents[i]] >= pos[problem.agents[j]]:
                    continue
                if axiom == "RP":
                    if not _dominates(profile[i], quotas[i], alloc[i], alloc[j]):
                        return False
                elif axiom == "WRP":
                    if bundle_size(alloc[i]) < bundle_size(alloc[j]):
                        return False
                elif axiom == "WRP*":
                    acc = profile[i].acceptable
                    if bundle_size(alloc[i] & acc) < bundle_size(alloc[j] & acc):
                        return False
                else:  # WRPq
                    if bundle_size(alloc[i]) != problem.quotas[i] and bundle_size(
                        alloc[i]
                    ) < bundle_size(alloc[j]):
                        return False
        return True
    raise ValueError(f"axiom {axiom!r} has no constraint encoder")


UNARY_AXIOMS = {"NW", "NWq", "NW*", "IR", "EF1", "EFF", "RP", "WRP", "WRP*", "WRPq"}
BINARY_AXIOMS = {"RM", "SP", "WSP", "TI"}


def build_csp(domain: ProblemDomain, axioms: Sequence[str], priority: Priority | None = None) -> RuleCSP:
    """Encode the axioms over the domain; unary ones filter candidates up front.

    Problem keys restrict profiles to the available set, so the variables range
    over tabulated rules in the sense of the search's target class.
    """
    for ax in axioms:
        if ax not in UNARY_AXIOMS | BINARY_AXIOMS:
            raise ValueError(f"axiom {ax!r} has no constraint encoder")
    if domain.variant == "variable":
        raise ValueError("rule-space search covers fixed-population variants only")

    keys: list = []
    key_index: dict = {}
    problems: list[Problem] = []
    for prob in domain.problems():
        k = problem_key(prob)
        if k not in key_index:
            key_index[k] = len(keys)
            keys.append(k)
            problems.append(prob)

    unary = [ax for ax in axioms if ax in UNARY_AXIOMS]
    candidates = []
    domains = []
    for prob in problems:
        cands = [
            a
            for a in _all_allocations(prob)
            if all(_unary_ok(ax, prob, a, priority) for ax in unary)
        ]
        candidates.append(cands)
        domains.append((1 << len(cands)) - 1)

    constraints: list[BinaryConstraint] = []

    def add_pair(name, u, v, ok):
        cu, cv = candidates[u], candidates[v]
        forward = [0] * len(cu)
        backward = [0] * len(cv)
        for i, a in enumerate(cu):
            for j, b in enumerate(cv):
                if ok(a, b):
                    forward[i] |= 1 << j
                    backward[j] |= 1 << i
        constraints.append(BinaryConstraint(name, u, v, forward, backward))

    if "RM" in axioms:
        quotas = domain.quotas
        for u, prob in enumerate(problems):
            for small in subsets_of(prob.available):
                if small == prob.available:
                    continue
                reduced = Problem(
                    prob.variant, prob.agents, small, prob.profile, prob.quotas
                )
                v = key_index[problem_key(reduced)]
                qs = quotas or (None,) * len(prob.agents)
                profile = prob.profile

                def rm_ok(a, b, profile=profile, qs=qs):
                    return all(
                        _dominates(p, q, big, sm)
                        for p, q, big, sm in zip(profile, qs, a, b)
                    )

                add_pair("RM", u, v, rm_ok)

    if "SP" in axioms or "WSP" in axioms:
        weak = "WSP" in axioms
        name = "WSP" if weak else "SP"
        qs_all = domain.quotas
        seen_pairs = set()
        for u, prob in enumerate(problems):
            for slot in range(len(prob.agents)):
                for alt in _slot_alternatives(domain, prob, slot):
                    new_profile = list(prob.profile)
                    new_profile[slot] = alt
                    other = Problem(
                        prob.variant,
                        prob.agents,
                        prob.available,
                        tuple(new_profile),
                        prob.quotas,
                    )
                    v = key_index[problem_key(other)]
                    if v == u or (min(u, v), max(u, v), slot) in seen_pairs:
                        continue
                    seen_pairs.add((min(u, v), max(u, v), slot))
                    pu = prob.profile[slot]
                    pv = problems[v].profile[slot]
                    q = (qs_all or (None,) * len(prob.agents))[slot]

                    if weak:

                        def ok(a, b, pu=pu, pv=pv, q=q, slot=slot):
                            if _dominates(pu, q, b[slot], a[slot]) and not _dominates(
                                pu, q, a[slot], b[slot]
                            ):
                                return False
                            if _dominates(pv, q, a[slot], b[slot]) and not _dominates(
                                pv, q, b[slot], a[slot]
                            ):
                                return False
                            return True

                    else:

                        def ok(a, b, pu=pu, pv=pv, q=q, slot=slot):
                            return _dominates(pu, q, a[slot], b[slot]) and _dominates(
                                pv, q, b[slot], a[slot]
                            )

                    add_pair(name, u, v, ok)

    if "TI" in axioms:
        if domain.variant != "unacceptable":
            raise ValueError("TI constraints need an unacceptable-variant domain")
        from .core import restrict

        for u, prob in enumerate(problems):
            for slot in range(len(prob.agents)):
                rpref = restrict(prob.profile[slot], prob.available)
                for alt in _slot_alternatives(domain, prob, slot):
                    if alt.ranking != rpref.ranking or alt.cutoff >= rpref.cutoff:
                        continue  # truncations of the key preference only
                    new_profile = list(prob.profile)
                    new_profile[slot] = alt
                    other = Problem(
                        prob.variant, prob.agents, prob.available, tuple(new_profile)
                    )
                    v = key_index[problem_key(other)]
                    acc = alt.acceptable

                    def ok(a, b, acc=acc, slot=slot):
                        if a[slot] & ~acc:
                            return True
                        return b[slot] == a[slot]

                    add_pair("TI", u, v, ok)

    watchers: list[list[int]] = [[] for _ in keys]
    for ci, c in enumerate(constraints):
        watchers[c.u].append(ci)
        watchers[c.v].append(ci)

    return RuleCSP(
        domain, tuple(axioms), keys, problems, candidates, domains, constraints, watchers
    )


def _slot_alternatives(domain: ProblemDomain, prob: Problem, slot: int):
    """All key-level preferences one agent could report at this problem (including her own)."""
    objs = objects_of(prob.available)
    if domain.variant == "unacceptable":
        return [
            Preference(r, c) for r in _rankings(objs) for c in range(len(objs) + 1)
        ]
    return [Preference(r) for r in _rankings(objs)]


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


def _propagate(
    csp: RuleCSP,
    doms: list[int],
    queue: list[int],
    stats: SolveStats,
    budget: int,
    trace: list[PropagationStep] | None,
) -> int | None:
    """AC over the constraint queue; returns an emptied variable index or None."""
    pending = list(queue)
    in_queue = set(pending)
    while pending:
        ci = pending.pop(0)
        in_queue.discard(ci)
        c = csp.constraints[ci]
        for var in (c.u, c.v):
            other = c.other(var)
            dom_other = doms[other]
            dom_var = doms[var]
            stats.revisions += 1
            if stats.revisions > budget:
                raise BudgetExceeded
            keep = 0
            m = dom_var
            while m:
                low = m & -m
                val = low.bit_length() - 1
                if c.allowed(var, val) & dom_other:
                    keep |= low
                m ^= low
            if keep != dom_var:
                removed = dom_var & ~keep
                doms[var] = keep
                if trace is not None:
                    trace.append(PropagationStep(c.name, var, removed))
                if keep == 0:
                    return var
                for cj in csp.watchers[var]:
                    if cj != ci and cj not in in_queue:
                        pending.append(cj)
                        in_queue.add(cj)
    return None


def solve_csp(
    csp: RuleCSP,
    mode: str = "find-all",
    budget: int = 10_000_000,
    record_trace: bool = True,
) -> SolveResult:
    """Exhaustive, deterministic search. find-all returns every surviving tabulated rule."""
    stats = SolveStats()
    doms = list(csp.domains)
    solutions: list[dict] = []

    for var, d in enumerate(doms):
        if d == 0:
            cert = InfeasibilityCertificate(emptied_var=var, trace=[])
            return SolveResult("unsat", [], cert, stats)

    try:
        root_trace: list[PropagationStep] = [] if record_trace else None
        emptied = _propagate(
            csp, doms, list(range(len(csp.constraints))), stats, budget, root_trace
        )
        if emptied is not None:
            cert = InfeasibilityCertificate(emptied_var=emptied, trace=root_trace or [])
            return SolveResult("unsat", [], cert, stats)

        cert = _search(csp, doms, stats, budget, mode, solutions, record_trace)
    except BudgetExceeded:
        return SolveResult("undecided", solutions, None, stats)

    if solutions:
        return SolveResult("sat", solutions, None, stats)
    cert.trace = (root_trace or []) + cert.trace
    return SolveResult("unsat", [], cert, stats)


def _pick_var(csp: RuleCSP, doms: list[int]) -> int | None:
    best, best_size = None, None
    for i, d in enumerate(doms):
        size = d.bit_count()
        if size > 1 and (best_size is None or size < best_size):
            best, best_size = i, size
            if size == 2:
                break
    return best


def _search(csp, doms, stats, budget, mode, solutions, record_trace) -> InfeasibilityCertificate:
    stats.nodes += 1
    var = _pick_var(csp, doms)
    if var is None:
        solutions.append(
            {k: csp.candidates[i][doms[i].bit_length() - 1] for i, k in enumerate(csp.keys)}
        )
        return InfeasibilityCertificate()  # not used on sat paths
    branches = []
    m = doms[var]
    while m:
        low = m & -m
        m ^= low
        val = low.bit_length() - 1
        child = list(doms)
        child[var] = low
        trace = [PropagationStep("decision", var, doms[var] & ~low)] if record_trace else None
        emptied = _propagate(csp, child, list(csp.watchers[var]), stats, budget, trace)
        if emptied is not None:
            branches.append(
                (val, InfeasibilityCertificate(emptied_var=emptied, trace=trace or []))
            )
            continue
        sub = _search(csp, child, stats, budget, mode, solutions, record_trace)
        if solutions and mode in ("find-one", "prove-unsat"):
            return sub
        branches.append((val, sub))
    return InfeasibilityCertificate(branch_var=var, branches=branches)


def replay_certificate(csp: RuleCSP, cert: InfeasibilityCertificate) -> bool:
    """Independently verify an unsatisfiability certificate against the initial CSP.

    Every recorded removal must be justified by its constraint at the moment it
    is applied; every leaf must end with the stated variable emptied; every
    branch node must cover the whole remaining candidate set of its variable.
    """

    def verify(node: InfeasibilityCertificate, doms: list[int]) -> bool:
        for step in node.trace:
            if step.constraint == "decision":
                doms[step.var] &= ~step.removed
                continue
            justified = False
            for ci in csp.watchers[step.var]:
                c = csp.constraints[ci]
                if c.name != step.constraint:
                    continue
                other = c.other(step.var)
                if all(
                    not (c.allowed(step.var, val) & doms[other])
                    for val in _bits(step.removed)
                ):
                    justified = True
                    break
            if not justified:
                return False
            doms[step.var] &= ~step.removed
        if node.emptied_var is not None:
            return doms[node.emptied_var] == 0
        if node.branch_var is None:
            return False
        covered = 0
        for val, child in node.branches:
            covered |= 1 << val
            child_doms = list(doms)
            child_doms[node.branch_var] = 1 << val
            if not verify(child, child_doms):
                return False
        return covered & doms[node.branch_var] == doms[node.branch_var]

    return verify(cert, list(csp.domains))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def solutions_as_rules(csp: RuleCSP, result: SolveResult, name: str = "survivor") -> list[Rule]:
    return [
        tabulated_rule(f"{name}-{i}", table) for i, table in enumerate(result.solutions)
    ]
