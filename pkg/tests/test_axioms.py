from itertools import product

from draftkit.axioms import (
    FixedSweep,
    build_trade_relation,
    check_2con,
    check_2neu,
    check_con,
    check_ef,
    check_ef1,
    check_ef1_var,
    check_eff,
    check_eff_var,
    check_ep,
    check_ir,
    check_msp,
    check_msp_certificate,
    check_msp_falsify,
    check_neu,
    check_nw,
    check_nw_quota,
    check_nw_star,
    check_rm,
    check_rm_var,
    check_rp,
    check_rt,
    check_sp,
    check_tcon,
    check_ti,
    check_tp,
    check_truthful_best_case,
    check_wrp_any,
    check_wrp_quota,
    check_wrp_star,
    critical_agent,
    fixed_domain,
    pareto_oracle,
    quota_domain,
    unacceptable_domain,
    variable_domain,
)
from draftkit.core import Preference, Problem
from draftkit.dominance import geometric_scheme, linear_scheme, random_scheme
from draftkit.rules import (
    Rule,
    draft_rule,
    dictatorship_rule,
    ir_counterexample,
    neutrality_counterexample,
    null_rule,
    pairwise_consistency_counterexample,
    population_rm_counterexample,
    problem_key,
    quota_draft_rule,
    rm_counterexample,
    serial_dictatorship_rule,
    snake_draft_rule,
    tabulated_rule,
    ti_counterexample,
    unacceptable_draft_rule,
    variable_draft_rule,
    wrp_counterexample,
    wrp_star_counterexample,
)

from helpers import bundle, fixed_problem, pref

D23 = fixed_domain(2, 3)
PI2 = (1, 2)


def verdicts(rule, domain, priority):
    return {
        "RP": check_rp(rule, domain, priority).holds,
        "EF1": check_ef1(rule, domain).holds,
        "EFF": check_eff(rule, domain).holds,
        "NW": check_nw(rule, domain).holds,
        "SP": check_sp(rule, domain).holds,
        "WSP": check_wsp_holds(rule, domain),
    }


def check_wsp_holds(rule, domain):
    from draftkit.axioms import check_wsp

    return check_wsp(rule, domain).holds


def test_table1_matrix_small():
    expected = {
        "null": dict(RP=True, EF1=True, EFF=False, NW=False, SP=True, WSP=True),
        "dict": dict(RP=True, EF1=False, EFF=True, NW=True, SP=True, WSP=True),
        "draft": dict(RP=True, EF1=True, EFF=True, NW=True, SP=False, WSP=False),
    }
    rules = {
        "null": null_rule(),
        "dict": dictatorship_rule(PI2),
        "draft": draft_rule(PI2),
    }
    for name, rule in rules.items():
        assert verdicts(rule, D23, PI2) == expected[name], name


def test_draft_wsp_witness_is_manipulation_example():
    from draftkit.axioms import check_wsp

    rep = check_wsp(draft_rule(PI2), D23)
    assert not rep.holds
    w = rep.witness
    assert w["problem"]["profile"] == {1: "a>b>c", 2: "b>c>a"}
    assert w["agent"] == 1
    assert w["misreport"] == "b>a>c"
    assert w["misreport_bundle"] == "{a,b}" and w["truthful_bundle"] == "{a,c}"


def test_trade_relation_cycle_example():
    prob = fixed_problem("abcd", "dcba")
    alloc = (bundle("ac"), bundle("bd"))
    rel = build_trade_relation(prob, alloc)
    assert ((1, 2), (2, 1)) in rel.edges  # (1,c) -> (2,b)
    assert ((2, 1), (1, 2)) in rel.edges  # (2,b) -> (1,c)


def test_trade_relation_empty_cases():
    prob = fixed_problem("ab", "ba")
    assert build_trade_relation(prob, (bundle("a"), bundle("b"))).edges == ()
    single = fixed_problem("ab")
    assert build_trade_relation(single, (bundle("ab"),)).edges == ()


def test_rt_verdicts():
    assert check_rt(draft_rule(PI2), D23).holds
    assert check_rt(null_rule(), D23).holds
    # the dominated allocation served as a tabulated rule on a one-problem domain
    prob = fixed_problem("abcd", "dcba")
    dom = fixed_domain(2, 4)
    bad = tabulated_rule(
        "bad", {problem_key(prob): (bundle("ac"), bundle("bd"))}, fallback=draft_rule(PI2)
    )
    rep = check_rt(bad, dom)
    assert not rep.holds and len(rep.witness["cycle"]) == 2


def test_pareto_oracle_examples():
    prob = fixed_problem("abcd", "dcba")
    assert not pareto_oracle(prob, (bundle("ac"), bundle("bd")))
    assert pareto_oracle(prob, (bundle("ab"), bundle("cd")))
    single = fixed_problem("a", "a", available="a")
    assert pareto_oracle(single, (bundle("a"), 0))
    assert not pareto_oracle(single, (0, 0))


def test_efficiency_decomposition_matches_oracle_exhaustively():
    # every allocation at every problem: NW+RT iff no strict Pareto dominator (n=2, m=3)
    from draftkit.axioms import _trade_cycle, _union

    m = 3
    dom = fixed_domain(2, m)
    prefs = dom.preference_space()
    for x in dom.available_sets:
        objs = [o for o in range(m) if x >> o & 1]
        for p1, p2 in product(prefs, repeat=2):
            prob = Problem("fixed", (1, 2), x, (p1, p2))
            for assign in product(range(3), repeat=len(objs)):
                alloc = [0, 0]
                for o, who in zip(objs, assign):
                    if who < 2:
                        alloc[who] |= 1 << o
                alloc = tuple(alloc)
                fast = _union(alloc) == x and _trade_cycle((p1, p2), alloc) is None
                assert fast == pareto_oracle(prob, alloc)


def test_unacc_efficiency_decomposition_matches_oracle_exhaustively():
    from draftkit.axioms import _trade_cycle, _union

    m = 2
    dom = unacceptable_domain(2, m)
    prefs = dom.preference_space()
    for x in dom.available_sets:
        objs = [o for o in range(m) if x >> o & 1]
        for p1, p2 in product(prefs, repeat=2):
            prob = Problem("unacceptable", (1, 2), x, (p1, p2))
            wanted = (p1.acceptable | p2.acceptable) & x
            for assign in product(range(3), repeat=len(objs)):
                alloc = [0, 0]
                for o, who in zip(objs, assign):
                    if who < 2:
                        alloc[who] |= 1 << o
                alloc = tuple(alloc)
                ir = all(not (b & ~p.acceptable) for p, b in zip((p1, p2), alloc))
                nw_star = wanted & ~_union(alloc) == 0
                fast = ir and nw_star and _trade_cycle((p1, p2), alloc) is None
                assert fast == pareto_oracle(prob, alloc)


def test_rm_holds_for_draft_and_fails_for_counterexample():
    assert check_rm(draft_rule(PI2), D23).holds
    rule = rm_counterexample(2)
    rep = check_rm(rule, D23)
    assert not rep.holds
    # the displayed instance replays: dropping x3 from the pinned problem helps agent 2
    special = fixed_problem("abc", "bca")
    smaller = fixed_problem("abc", "bca", available="ab")
    from draftkit.dominance import weakly_dominates

    big_bundle = rule.allocate(special)[1]
    small_bundle = rule.allocate(smaller)[1]
    assert small_bundle == bundle("b") and big_bundle == bundle("c")
    assert not weakly_dominates(pref("bca"), big_bundle, small_bundle)


def test_rm_trivial_subset_reflexivity():
    # X' = X is not even enumerated; equality of sets means no pair, so a one-set domain holds
    from draftkit.axioms import ProblemDomain

    dom = ProblemDomain("fixed", 2, ((1, 2),), (0b11,))
    assert check_rm(draft_rule(PI2), dom).holds


def test_wrp_counterexample_fails_every_priority_but_keeps_rest():
    rule = wrp_counterexample(2, 3)
    assert not check_wrp_any(rule, D23).holds
    assert check_ef1(rule, D23).holds
    assert check_eff(rule, D23).holds
    assert check_rm(rule, D23).holds


def test_sp_holds_for_null_and_dictatorship():
    assert check_sp(null_rule(), D23).holds
    assert check_sp(dictatorship_rule(PI2), D23).holds


def test_msp_certificate_for_draft():
    rep = check_msp_certificate(draft_rule(PI2), D23)
    assert rep.verdict == "proved"


def test_msp_certificate_clause_b_failure_reported():
    # at one non-unanimous profile both agents get nothing: worst case drops below unanimity
    special = fixed_problem("abc", "acb")
    rule = tabulated_rule("clause-b", {problem_key(special): (0, 0)}, fallback=draft_rule(PI2))
    rep = check_msp_certificate(rule, D23)
    assert rep.verdict == "violated" and rep.witness["clause"] == "b"


def test_msp_falsifier_draft_clean_and_refutes_truth_punisher():
    schemes = [geometric_scheme(3), linear_scheme(3)] + [random_scheme(3, s) for s in range(5)]
    assert check_msp_falsify(draft_rule(PI2), D23, schemes).verdict == "holds"

    truth_abc = Preference((0, 1, 2))

    def punish(p: Problem):
        if p.profile[0] == truth_abc:
            return (0,) * len(p.agents), None
        from draftkit.rules import priority_draft

        return priority_draft(p, PI2)

    rep = check_msp_falsify(Rule("punish", punish, restriction_invariant=False), D23, schemes)
    assert rep.verdict == "refuted"
    assert check_msp(draft_rule(PI2), D23, schemes).verdict == "proved"


def test_truthful_best_case_top_k():
    schemes = [geometric_scheme(3), linear_scheme(3), random_scheme(3, 11)]
    assert check_truthful_best_case(draft_rule(PI2), D23, schemes).holds


def test_quota_checks_hold_for_quota_draft():
    for quotas in ((1, 1), (1, 2), (2, 1)):
        dom = quota_domain(2, 3, quotas)
        rule = quota_draft_rule(PI2)
        assert check_wrp_quota(rule, dom, PI2).holds
        assert check_nw_quota(rule, dom).holds
        assert check_ef1(rule, dom).holds
        assert check_rm(rule, dom).holds


def test_quota_wrp_violation_when_agent2_overfed():
    dom = quota_domain(2, 2, (1, 1))
    special = Problem("quota", (1, 2), bundle("ab"), (pref("ab"), pref("ab")), quotas=(1, 1))

    def greedy2(p: Problem):
        if p.available == bundle("ab"):
            return (0, bundle("ab")), None
        from draftkit.rules import quota_draft

        return quota_draft(p, PI2)

    rep = check_wrp_quota(Rule("greedy2", greedy2), dom, PI2)
    assert not rep.holds


def test_unacceptable_suite_for_udraft():
    dom = unacceptable_domain(2, 3)
    rule = unacceptable_draft_rule(PI2)
    for chk in (check_ir, check_nw_star, check_tp, check_ep, check_ti, check_ef1, check_rm):
        assert chk(rule, dom).holds, chk.__name__
    assert check_wrp_star(rule, dom, PI2).holds
    assert check_eff(rule, dom).holds


def test_ir_counterexample_fails_only_ir():
    dom = unacceptable_domain(2, 2)
    rule = ir_counterexample(PI2)
    assert not check_ir(rule, dom).holds
    assert check_nw_star(rule, dom).holds
    assert check_ef1(rule, dom).holds
    assert check_rm(rule, dom).holds
    assert check_ti(rule, dom).holds
    assert check_rp(rule, dom, PI2).holds


def test_ti_counterexample_replays_displayed_instance():
    rule = ti_counterexample(2, 3)
    dom = unacceptable_domain(2, 3)
    rep = check_ti(rule, dom)
    assert not rep.holds
    # displayed instance: truth a>b acceptable, truncating to a|b moves the bundle {a} to {}
    truth = Problem(
        "unacceptable",
        (1, 2),
        bundle("ab"),
        (Preference((1, 2, 0), 3), Preference((0, 1, 2), 2)),
    )
    truncated = Problem(
        "unacceptable",
        (1, 2),
        bundle("ab"),
        (Preference((1, 2, 0), 3), Preference((0, 1, 2), 1)),
    )
    assert rule.allocate(truth)[1] == bundle("a")
    assert rule.allocate(truncated)[1] == 0


def test_wrp_star_counterexample_flips_priorities():
    rule = wrp_star_counterexample(2, special_object=0)
    dom = unacceptable_domain(2, 2)
    assert not check_wrp_any(rule, dom, star=True).holds
    assert check_eff(rule, dom).holds
    assert check_ef1(rule, dom).holds
    assert check_rm(rule, dom).holds
    assert check_ti(rule, dom).holds


def test_serial_dictatorship_fails_ef1_keeps_rest():
    dom = unacceptable_domain(2, 2)
    rule = serial_dictatorship_rule(PI2)
    assert not check_ef1(rule, dom).holds
    assert check_ir(rule, dom).holds
    assert check_nw_star(rule, dom).holds
    assert check_rm(rule, dom).holds
    assert check_ti(rule, dom).holds
    assert check_rp(rule, dom, PI2).holds


def test_variable_suite_for_draft():
    dom = variable_domain(3, 3)
    rule = variable_draft_rule((1, 2, 3))
    for chk in (check_ef1_var, check_eff_var, check_rm_var, check_con, check_tcon, check_neu):
        assert chk(rule, dom).holds, chk.__name__


def test_variable_counterexamples():
    dom = variable_domain(3, 3)
    pi = (1, 2, 3)

    snake = snake_draft_rule(pi)
    assert not check_tcon(snake, dom).holds
    for chk in (check_ef1_var, check_eff_var, check_rm_var, check_2con, check_2neu):
        assert chk(snake, dom).holds, chk.__name__

    tail = population_rm_counterexample(pi)
    assert not check_rm_var(tail, dom).holds
    for chk in (check_ef1_var, check_eff_var, check_2con, check_tcon, check_2neu):
        assert chk(tail, dom).holds, chk.__name__

    switch = pairwise_consistency_counterexample(pi)
    assert not check_2con(switch, dom).holds
    for chk in (check_ef1_var, check_eff_var, check_rm_var, check_tcon, check_2neu):
        assert chk(switch, dom).holds, chk.__name__

    neu = neutrality_counterexample(pi, special_object=0)
    assert not check_2neu(neu, dom).holds
    for chk in (check_ef1_var, check_eff_var, check_rm_var, check_2con, check_tcon):
        assert chk(neu, dom).holds, chk.__name__

    vdict = dictatorship_rule(pi)
    assert not check_ef1_var(vdict, dom).holds
    for chk in (check_eff_var, check_rm_var, check_2con, check_tcon, check_2neu):
        assert chk(vdict, dom).holds, chk.__name__

    vnull = null_rule()
    assert not check_eff_var(vnull, dom).holds
    for chk in (check_ef1_var, check_rm_var, check_2con, check_tcon, check_2neu):
        assert chk(vnull, dom).holds, chk.__name__


def test_critical_agent_examples():
    assert critical_agent((1, 2, 3), (bundle("ab"), bundle("c"), bundle("d")), (1, 2, 3)) == 1
    assert critical_agent((1, 2, 3), (bundle("a"), bundle("b"), bundle("c")), (1, 2, 3)) == 3
    assert critical_agent((1, 2, 3), (bundle("ab"), 0, bundle("c")), (1, 2, 3)) is None


def test_critical_agent_exists_for_draft_everywhere():
    dom = fixed_domain(3, 3)
    sw = FixedSweep(draft_rule((1, 2, 3)), dom)
    for xi in range(len(sw.xs)):
        for alloc in sw.grid(xi):
            assert critical_agent((1, 2, 3), alloc, (1, 2, 3)) is not None


def test_ef_holds_vacuously_for_null():
    assert check_ef(null_rule(), D23).holds
    assert not check_nw(null_rule(), D23).holds


def test_truthful_maxmin_equals_unanimous_adversary_utility():
    # with the certificate holding, the worst case of truth-telling is the unanimous profile
    from itertools import product as _product

    from draftkit.dominance import additive_utility, geometric_scheme

    dom = fixed_domain(2, 3)
    sw = FixedSweep(draft_rule(PI2), dom)
    scheme = geometric_scheme(3)
    for xi in range(len(sw.xs)):
        grid = sw.grid(xi)
        for slot in range(2):
            other = 1 - slot
            for truth_idx in range(sw.P):
                pref = sw.prefs[truth_idx]
                unanimous = grid[sw.encode([truth_idx] * 2)][slot]
                worst = min(
                    additive_utility(
                        pref, scheme, grid[sw.replace(sw.encode([truth_idx] * 2), other, adv)][slot]
                    )
                    for adv in range(sw.P)
                )
                assert worst == additive_utility(pref, scheme, unanimous)
