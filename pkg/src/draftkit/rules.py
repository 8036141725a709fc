"""Allocation engines: drafts in all four variants, reference rules, and rule combinators.

Every engine returns ``(allocation, trace)``. A trace is a tuple of
``(step, agent, object-or-None)`` entries, 1-based steps; ``None`` records that
the agent passed (was handed the null selection). Passed steps never reach the
returned bundles. Replaying a trace greedily reproduces the allocation; the
theorem verifier consumes selection orders, so traces are first class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    Agent,
    Allocation,
    PickingSequence,
    Preference,
    Priority,
    Problem,
    bundle_size,
    restrict,
    top,
)

Trace = tuple[tuple[int, Agent, int | None], ...]


def _assemble(problem: Problem, trace: list[tuple[int, Agent, int | None]]) -> Allocation:
    bundles = {a: 0 for a in problem.agents}
    for _, agent, obj in trace:
        if obj is not None:
            bundles[agent] |= 1 << obj
    return tuple(bundles[a] for a in problem.agents)


def draft(problem: Problem, sequence: PickingSequence) -> tuple[Allocation, Trace]:
    """Sequential allocation: at step k the sequence's agent takes her best remaining object."""
    if problem.variant != "fixed":
        raise ValueError("draft runs on fixed-variant problems")
    remaining = problem.available
    trace = []
    for k in range(bundle_size(problem.available)):
        agent = sequence.at(k)
        picked = top(problem.pref_of(agent), remaining)
        remaining &= ~(1 << picked)
        trace.append((k + 1, agent, picked))
    return _assemble(problem, trace), tuple(trace)


def priority_draft(problem: Problem, priority: Priority) -> tuple[Allocation, Trace]:
    """Draft under the round-robin picking sequence of a priority."""
    return draft(problem, PickingSequence.round_robin(priority))


def _omega_terminated(problem: Problem, priority: Priority, may_pick) -> tuple[Allocation, Trace]:
    # run round-robin until every agent in a full window of n steps passed
    n = problem.n_agents
    remaining = problem.available
    picks = {a: 0 for a in problem.agents}
    trace: list[tuple[int, Agent, int | None]] = []
    omega_run = 0
    k = 0
    limit = n * (bundle_size(problem.available) + 1) + n
    while omega_run < n:
        if k >= limit:  # cannot happen: each n-window without a pass assigns an object
            raise RuntimeError("draft failed to terminate")
        agent = priority[k % n]
        picked = may_pick(agent, remaining, picks[agent])
        if picked is None:
            omega_run += 1
        else:
            omega_run = 0
            picks[agent] += 1
            remaining &= ~(1 << picked)
        trace.append((k + 1, agent, picked))
        k += 1
    return _assemble(problem, trace), tuple(trace)


def quota_draft(
    problem: Problem, priority: Priority, quotas: Sequence[int | float] | None = None
) -> tuple[Allocation, Trace]:
    """Draft where an agent whose quota is filled passes; stops after n consecutive passes."""
    if quotas is None:
        if problem.quotas is None:
            raise ValueError("quota draft needs quotas")
        quotas = problem.quotas
    quota_of = dict(zip(problem.agents, quotas))

    def may_pick(agent, remaining, count):
        if count >= quota_of[agent]:
            return None
        return top(problem.pref_of(agent), remaining)

    return _omega_terminated(problem, priority, may_pick)


def unacceptable_draft(problem: Problem, priority: Priority) -> tuple[Allocation, Trace]:
    """Draft that never assigns an unacceptable object; an agent with none left passes."""

    def may_pick(agent, remaining, count):
        return top(problem.pref_of(agent), remaining)

    return _omega_terminated(problem, priority, may_pick)


def _population_order(problem: Problem, priority: Priority) -> list[Agent]:
    order = [a for a in priority if a in problem.agents]
    missing = [a for a in problem.agents if a not in order]
    if missing:
        raise ValueError(f"priority does not cover agents {missing}")
    return order


def variable_draft(problem: Problem, priority: Priority) -> tuple[Allocation, Trace]:
    """Draft for variable populations: the priority restricted to the present agents."""
    order = _population_order(problem, priority)
    return _sequential(problem, lambda k: order[k % len(order)])


def _sequential(problem: Problem, agent_at) -> tuple[Allocation, Trace]:
    remaining = problem.available
    trace = []
    for k in range(bundle_size(problem.available)):
        agent = agent_at(k)
        picked = top(problem.pref_of(agent), remaining)
        if picked is None:
            raise RuntimeError("sequential pick found no object")
        remaining &= ~(1 << picked)
        trace.append((k + 1, agent, picked))
    return _assemble(problem, trace), tuple(trace)


def snake_draft(problem: Problem, priority: Priority) -> tuple[Allocation, Trace]:
    """Priority order in odd rounds, reversed order in even rounds."""
    order = _population_order(problem, priority)
    n = len(order)

    def agent_at(k):
        rnd, pos = divmod(k, n)
        return order[pos] if rnd % 2 == 0 else order[n - 1 - pos]

    return _sequential(problem, agent_at)


def serial_dictatorship(problem: Problem, priority: Priority) -> tuple[Allocation, None]:
    """Each agent, in priority order, takes every remaining object she finds acceptable."""
    remaining = problem.available
    bundles = {a: 0 for a in problem.agents}
    for agent in _population_order(problem, priority):
        take = remaining & problem.pref_of(agent).acceptable
        bundles[agent] = take
        remaining &= ~take
    return tuple(bundles[a] for a in problem.agents), None


def dictatorship(problem: Problem, priority: Priority) -> tuple[Allocation, None]:
    """The highest-priority agent present takes the whole available set."""
    order = _population_order(problem, priority)
    return tuple(problem.available if a == order[0] else 0 for a in problem.agents), None


def null_allocation(problem: Problem) -> tuple[Allocation, None]:
    return tuple(0 for _ in problem.agents), None


@dataclass(frozen=True)
class Rule:
    """The unit the axiom checkers and the rule-space search quantify over.

    Either algorithmic (wraps an engine) or tabulated (explicit lookup over an
    enumerated problem domain). ``restriction_invariant`` declares that the
    outcome depends on preferences only through their restriction to the
    available set; checkers may exploit it, so combinators must not claim it.
    """

    name: str
    runner: Callable[[Problem], tuple[Allocation, Trace | None]]
    restriction_invariant: bool = True

    def run(self, problem: Problem) -> tuple[Allocation, Trace | None]:
        return self.runner(problem)

    def allocate(self, problem: Problem) -> Allocation:
        return self.runner(problem)[0]


def _engine_rule(name, engine, *args, restriction_invariant=True) -> Rule:
    return Rule(name, lambda p: engine(p, *args), restriction_invariant)


def draft_rule(priority: Priority) -> Rule:
    return _engine_rule(f"draft{list(priority)}", priority_draft, priority)


def sequence_draft_rule(sequence: PickingSequence, name: str = "draft-seq") -> Rule:
    return _engine_rule(name, draft, sequence)


def quota_draft_rule(priority: Priority) -> Rule:
    return _engine_rule(f"draft-quota{list(priority)}", quota_draft, priority)


def unacceptable_draft_rule(priority: Priority) -> Rule:
    return _engine_rule(f"u-draft{list(priority)}", unacceptable_draft, priority)


def variable_draft_rule(priority: Priority) -> Rule:
    return _engine_rule(f"draft-variable{list(priority)}", variable_draft, priority)


def serial_dictatorship_rule(priority: Priority) -> Rule:
    return _engine_rule(f"serial-dictatorship{list(priority)}", serial_dictatorship, priority)


def dictatorship_rule(priority: Priority) -> Rule:
    return _engine_rule(f"pi-dictatorship{list(priority)}", dictatorship, priority)


def null_rule() -> Rule:
    return Rule("null", null_allocation)


def snake_draft_rule(priority: Priority) -> Rule:
    return _engine_rule(f"snake{list(priority)}", snake_draft, priority)


def problem_key(problem: Problem):
    """Canonical key: population, available set, profile restricted to the available set.

    Restriction in the key keeps tabulated-rule tables finite; rules whose
    outcome depends on rankings outside the available set cannot be tabulated.
    """
    sig = []
    for pref in problem.profile:
        if problem.available == 0:
            sig.append(((), pref.cutoff if pref.cutoff is None else 0))
        else:
            r = restrict(pref, problem.available)
            sig.append((r.ranking, r.cutoff))
    return (problem.variant, problem.agents, problem.available, tuple(sig), problem.quotas)


def tabulated_rule(name: str, table: dict, fallback: Rule | None = None) -> Rule:
    def runner(problem: Problem):
        key = problem_key(problem)
        if key in table:
            return table[key], None
        if fallback is not None:
            return fallback.allocate(problem), None
        raise KeyError(f"rule {name!r} is not defined at this problem")

    return Rule(name, runner)


def piecewise_rule(default: Rule, overrides, name: str = "piecewise") -> Rule:
    """First matching (predicate, rule) override wins, else the default rule."""

    def runner(problem: Problem):
        for predicate, rule in overrides:
            if predicate(problem):
                return rule.run(problem)
        return default.run(problem)

    return Rule(name, runner, restriction_invariant=False)


# ---------------------------------------------------------------------------
# Reference rules used in the independence arguments.
# ---------------------------------------------------------------------------


def _ascending_ranking(head: Sequence[int], n_objects: int) -> tuple[int, ...]:
    rest = tuple(o for o in range(n_objects) if o not in head)
    return tuple(head) + rest


def wrp_counterexample(n_agents: int, n_objects: int) -> Rule:
    """Draft under one priority at a single unanimous profile, another priority elsewhere.

    Keeps efficiency, EF1, and resource monotonicity but no single priority is
    respected at every problem.
    """
    agents = tuple(range(1, n_agents + 1))
    unanimous = tuple(Preference(tuple(range(n_objects))) for _ in agents)
    pi1, pi2 = agents, agents[::-1]
    return piecewise_rule(
        draft_rule(pi2),
        [(lambda p: p.profile == unanimous, draft_rule(pi1))],
        name="wrp-counterexample",
    )


def rm_counterexample(n_agents: int, n_objects: int | None = None) -> Rule:
    """Identity-priority draft, except one pinned problem where agent 1 picks twice first.

    The pinned outcome comes from the picking sequence (1, 1, 2, ..., n) on the
    first n+1 objects; enlarging the set past the pinned problem then hurts
    agent 2, breaking resource monotonicity and nothing else.
    """
    if n_objects is None:
        n_objects = n_agents + 1
    if n_objects < n_agents + 1:
        raise ValueError("needs at least n+1 objects")
    agents = tuple(range(1, n_agents + 1))
    special_x = (1 << (n_agents + 1)) - 1  # objects 0..n
    prof = [Preference(_ascending_ranking(range(n_agents + 1), n_objects))]
    for _ in agents[1:]:
        prof.append(Preference(_ascending_ranking(list(range(1, n_agents + 1)) + [0], n_objects)))
    special_profile = tuple(prof)
    seq = PickingSequence(prefix=(1,), cycle=agents)  # picks run 1, 1, 2, ..., n

    def is_special(p: Problem) -> bool:
        return p.profile == special_profile and p.available == special_x

    return piecewise_rule(
        draft_rule(agents),
        [(is_special, sequence_draft_rule(seq))],
        name="rm-counterexample",
    )


def ir_counterexample(priority: Priority) -> Rule:
    """Runs the draft on the complete extensions, so unacceptable objects get assigned."""

    def runner(problem: Problem):
        extended = Problem(
            problem.variant,
            problem.agents,
            problem.available,
            tuple(Preference(q.ranking, len(q.ranking)) for q in problem.profile),
        )
        return unacceptable_draft(extended, priority)

    return Rule("ir-counterexample", runner)


def wrp_star_counterexample(n_agents: int, special_object: int = 0) -> Rule:
    """Priority flips with whether agent 1 top-ranks one distinguished object."""
    agents = tuple(range(1, n_agents + 1))
    pi1, pi2 = agents, agents[::-1]

    def agent1_tops_special(p: Problem) -> bool:
        return p.profile[0].ranking[0] == special_object

    return piecewise_rule(
        unacceptable_draft_rule(pi2),
        [(agent1_tops_special, unacceptable_draft_rule(pi1))],
        name="wrp*-counterexample",
    )


def rm_star_counterexample(n_agents: int, n_objects: int | None = None) -> Rule:
    """Pins object 0 onto agent 1 ahead of the draft on one family of profiles.

    Active when the available set is exactly the first n+1 objects, every
    agent's preference truncates or extends the reference profile, and agent 1
    finds object 0 acceptable; breaks resource monotonicity only.
    """
    if n_objects is None:
        n_objects = n_agents + 1
    if n_objects < n_agents + 1:
        raise ValueError("needs at least n+1 objects")
    agents = tuple(range(1, n_agents + 1))
    special_x = (1 << (n_agents + 1)) - 1
    # reference profile: exactly the objects of the pinned set are acceptable
    base = [Preference(_ascending_ranking(range(n_agents + 1), n_objects), n_agents + 1)]
    for _ in agents[1:]:
        base.append(
            Preference(
                _ascending_ranking(list(range(1, n_agents + 1)) + [0], n_objects), n_agents + 1
            )
        )

    def is_special(p: Problem) -> bool:
        # truncations/extensions of the reference profile, read tail-order-preserving:
        # same ranking, any cutoff (the wider prefix-only class breaks truncation invariance)
        if p.available != special_x:
            return False
        if not (p.profile[0].acceptable & 1):  # object 0 acceptable to agent 1
            return False
        return all(q.ranking == b.ranking for q, b in zip(p.profile, base))

    def special_runner(problem: Problem):
        reduced = Problem(
            problem.variant, problem.agents, problem.available & ~1, problem.profile
        )
        alloc, _ = unacceptable_draft(reduced, agents)
        return (alloc[0] | 1,) + alloc[1:], None

    return piecewise_rule(
        unacceptable_draft_rule(agents),
        [(is_special, Rule("rm*-special", special_runner))],
        name="rm*-counterexample",
    )


def ti_counterexample(n_agents: int, n_objects: int) -> Rule:
    """Hands everything to agent 1 at one pinned profile on problems inside {0,1}.

    Agent 2 can reach that pinned profile by truncating, changing her bundle,
    which breaks truncation invariance; everything else stays intact.
    """
    if n_objects < 2:
        raise ValueError("needs objects 0 and 1")
    agents = tuple(range(1, n_agents + 1))
    # agent 1: object 1 best, object 0 worst, everything acceptable;
    # agent 2: only object 0 acceptable; further agents accept nothing
    prof = [Preference(tuple([1] + list(range(2, n_objects)) + [0]), n_objects)]
    prof.append(Preference(tuple(range(n_objects)), 1))
    for _ in agents[2:]:
        prof.append(Preference(tuple(range(n_objects)), 0))
    special_profile = tuple(prof)

    def is_special(p: Problem) -> bool:
        return p.profile == special_profile and p.available | 0b11 == 0b11

    def special_runner(problem: Problem):
        return (problem.available,) + (0,) * (len(agents) - 1), None

    return piecewise_rule(
        unacceptable_draft_rule(agents),
        [(is_special, Rule("ti-special", special_runner))],
        name="ti-counterexample",
    )


def population_rm_counterexample(priority: Priority) -> Rule:
    """Starts partial rounds with the tail of the priority order instead of its head.

    On problems where the objects do not fill whole rounds, the first picks go
    to the lowest-priority agents; growing the object set can then demote an
    agent's haul, breaking resource monotonicity across object sets only.
    """

    def runner(problem: Problem):
        order = _population_order(problem, priority)
        n, m = len(order), bundle_size(problem.available)
        c = m % n
        if c == 0:
            return variable_draft(problem, priority)
        tail = order[n - c :]

        def agent_at(k):
            return tail[k] if k < c else order[(k - c) % n]

        return _sequential(problem, agent_at)

    return Rule("population-rm-counterexample", runner)


def pairwise_consistency_counterexample(priority: Priority) -> Rule:
    """Uses the priority for two-agent problems and its reversal otherwise."""

    def runner(problem: Problem):
        order = priority if problem.n_agents == 2 else priority[::-1]
        return variable_draft(problem, order)

    return Rule("2con-counterexample", runner, restriction_invariant=True)


def neutrality_counterexample(
    priority: Priority, special_object: int, special_priority: Priority | None = None
) -> Rule:
    """Draft whose contests over one distinguished object resolve under a different priority.

    Turns run in base-priority order; the turn owner's top object goes to the
    best contender under that object's own priority. With every per-object
    priority equal this is exactly the draft; flipping the order below the top
    agent for a single object breaks neutrality and nothing else. The
    distinguished priority must keep the same top agent, or resource
    monotonicity fails when that object diverts the top agent's claim.
    """
    if special_priority is None:
        special_priority = (priority[0],) + tuple(reversed(priority[1:]))
    if special_priority[0] != priority[0]:
        raise ValueError("the distinguished priority must keep the same top agent")

    def winner_priority(x: int) -> Priority:
        return special_priority if x == special_object else priority

    def runner(problem: Problem):
        order = _population_order(problem, priority)
        remaining = problem.available
        bundles = {a: 0 for a in problem.agents}
        while remaining:
            active = list(order)
            while active and remaining:
                x = top(problem.pref_of(active[0]), remaining)
                contenders = [a for a in active if top(problem.pref_of(a), remaining) == x]
                w = next(a for a in winner_priority(x) if a in contenders)
                bundles[w] |= 1 << x
                remaining &= ~(1 << x)
                active.remove(w)
        return tuple(bundles[a] for a in problem.agents), None

    return Rule("2neu-counterexample", runner)
