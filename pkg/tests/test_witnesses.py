"""Violated verdicts carry witnesses that replay to confirmed violations."""

from itertools import permutations

from draftkit.axioms import (
    check_ef1,
    check_rm,
    check_tcon,
    check_wsp,
    fixed_domain,
    variable_domain,
)
from draftkit.core import Preference, Problem, bundle_of, top
from draftkit.dominance import strictly_dominates, weakly_dominates
from draftkit.rules import (
    dictatorship_rule,
    draft_rule,
    rm_counterexample,
    snake_draft_rule,
)
from draftkit.verifier import find_manipulation

from helpers import bundle


def rebuild(witness_problem: dict) -> Problem:
    """Reconstruct a Problem from a witness's formatted fields."""
    names = {}
    prefs = []
    for agent in witness_problem["agents"]:
        spec = witness_problem["profile"][agent]
        cutoff = None
        if "|" in spec:
            head, _, tail = spec.partition("|")
            ranked = [t for t in (head + ">" + tail).split(">") if t]
            cutoff = len([t for t in head.split(">") if t])
        else:
            ranked = spec.split(">")
        prefs.append((ranked, cutoff))
    for ranked, _ in prefs:
        for token in ranked:
            names.setdefault(token, ord(token) - ord("a"))
    available = bundle_of(
        names[t] for t in witness_problem["available"].strip("{}").split(",") if t
    )
    profile = tuple(
        Preference(tuple(names[t] for t in ranked), cutoff) for ranked, cutoff in prefs
    )
    return Problem(
        witness_problem["variant"], tuple(witness_problem["agents"]), available, profile
    )


def parse_bundle(text: str) -> int:
    return bundle_of(ord(t) - ord("a") for t in text.strip("{}").split(",") if t)


def test_wsp_witness_replays():
    rep = check_wsp(draft_rule((1, 2)), fixed_domain(2, 3))
    w = rep.witness
    prob = rebuild(w["problem"])
    slot = prob.agents.index(w["agent"])
    truth = draft_rule((1, 2)).allocate(prob)[slot]
    assert truth == parse_bundle(w["truthful_bundle"])
    misranking = tuple(ord(t) - ord("a") for t in w["misreport"].split(">"))
    new_profile = list(prob.profile)
    new_profile[slot] = Preference(misranking)
    deviated = Problem(prob.variant, prob.agents, prob.available, tuple(new_profile))
    gained = draft_rule((1, 2)).allocate(deviated)[slot]
    assert gained == parse_bundle(w["misreport_bundle"])
    assert strictly_dominates(prob.profile[slot], gained, truth)


def test_ef1_witness_replays():
    rep = check_ef1(dictatorship_rule((1, 2)), fixed_domain(2, 3))
    w = rep.witness
    prob = rebuild(w["problem"])
    alloc = dictatorship_rule((1, 2)).allocate(prob)
    envious = prob.agents.index(w["envious"])
    envied = prob.agents.index(w["envied"])
    pref = prob.profile[envious]
    own, other = alloc[envious], alloc[envied]
    assert not weakly_dominates(pref, own, other)
    for o in range(6):
        if other >> o & 1:
            assert not weakly_dominates(pref, own, other & ~(1 << o))


def test_rm_witness_replays():
    rule = rm_counterexample(2)
    rep = check_rm(rule, fixed_domain(2, 3))
    w = rep.witness
    big = rebuild(w["problem"])
    small = Problem(big.variant, big.agents, parse_bundle(w["smaller_set"]), big.profile)
    slot = big.agents.index(w["agent"])
    big_bundle = rule.allocate(big)[slot]
    small_bundle = rule.allocate(small)[slot]
    assert big_bundle == parse_bundle(w["bundle_large"])
    assert small_bundle == parse_bundle(w["bundle_small"])
    assert not weakly_dominates(big.profile[slot], big_bundle, small_bundle)


def test_tcon_witness_replays():
    rule = snake_draft_rule((1, 2))
    rep = check_tcon(rule, variable_domain(2, 3))
    w = rep.witness
    prob = rebuild(w["problem"])
    alloc = rule.allocate(prob)
    tops = 0
    for pref, b in zip(prob.profile, alloc):
        if b:
            tops |= 1 << top(pref, b)
    assert tops == parse_bundle(w["removed_tops"])
    reduced_available = prob.available & ~tops
    reduced = Problem(
        "variable",
        prob.agents,
        reduced_available,
        tuple(
            Preference(tuple(o for o in p.ranking if reduced_available >> o & 1))
            for p in prob.profile
        ),
    )
    assert rule.allocate(reduced) != tuple(b & ~tops for b in alloc)


def test_manipulation_search_agrees_with_wsp_checker():
    # no profitable misreport anywhere <=> the weak strategy-proofness sweep holds
    dom = fixed_domain(2, 3)
    for rule, expect_wsp in ((draft_rule((1, 2)), False), (dictatorship_rule((1, 2)), True)):
        found_any = False
        for p1 in permutations(range(3)):
            for p2 in permutations(range(3)):
                for x in (bundle("abc"), bundle("ab"), bundle("a")):
                    prob = Problem("fixed", (1, 2), x, (Preference(p1), Preference(p2)))
                    for agent in (1, 2):
                        if find_manipulation(rule, prob, agent) is not None:
                            found_any = True
        from draftkit.axioms import check_wsp

        assert check_wsp(rule, dom).holds == expect_wsp
        assert found_any == (not expect_wsp)
