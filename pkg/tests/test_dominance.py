from fractions import Fraction
from itertools import permutations

import pytest

from draftkit.core import INFINITE, Preference, bundle_size, objects_of, subsets_of, top_k
from draftkit.dominance import (
    WeightScheme,
    additive_utility,
    envies,
    geometric_scheme,
    linear_scheme,
    quota_weakly_dominates,
    random_scheme,
    strictly_dominates,
    weakly_dominates,
    weakly_dominates_oracle,
)

from helpers import bundle, pref


def test_pairwise_dominance_footnote_example():
    p = pref("abc")  # read as x>y>z
    assert weakly_dominates(p, bundle("ab"), bundle("ac"))
    assert not weakly_dominates(p, bundle("ac"), bundle("ab"))


def test_subset_always_dominated():
    p = pref("dcba")
    for s in subsets_of(bundle("abcd"), nonempty=False):
        for t in subsets_of(s, nonempty=False):
            assert weakly_dominates(p, s, t)


def test_reflexive():
    p = pref("bca")
    for s in subsets_of(bundle("abc"), nonempty=False):
        assert weakly_dominates(p, s, s)


def test_oracle_trivial_cases():
    p = pref("ab")
    assert not weakly_dominates_oracle(p, 0, bundle("a"))
    assert weakly_dominates_oracle(p, bundle("a"), 0)
    assert weakly_dominates_oracle(p, bundle("ab"), bundle("ac") & bundle("ab"))


def test_oracle_matches_footnote_example():
    p = pref("abc")
    assert weakly_dominates_oracle(p, bundle("ab"), bundle("ac"))
    assert not weakly_dominates_oracle(p, bundle("ac"), bundle("ab"))


def test_oracle_size_cap():
    p = Preference(tuple(range(13)))
    with pytest.raises(ValueError):
        weakly_dominates_oracle(p, (1 << 13) - 1, 0)


def test_fast_equals_oracle_exhaustive_all_prefs_small():
    # equivalence of sorted comparison with injection existence, all prefs, m <= 4
    for m in (1, 2, 3, 4):
        full = (1 << m) - 1
        for ranking in permutations(range(m)):
            p = Preference(ranking)
            for s in subsets_of(full, nonempty=False):
                for t in subsets_of(full, nonempty=False):
                    assert weakly_dominates(p, s, t) == weakly_dominates_oracle(p, s, t)


def test_quota_variants_match_oracle_after_truncation():
    for m in (2, 3, 4):
        full = (1 << m) - 1
        p = Preference(tuple(range(m)))
        for q in list(range(1, m + 1)) + [INFINITE]:
            for s in subsets_of(full, nonempty=False):
                for t in subsets_of(full, nonempty=False):
                    ss = s if q == INFINITE else top_k(p, s, min(int(q), bundle_size(s)))
                    tt = t if q == INFINITE else top_k(p, t, min(int(q), bundle_size(t)))
                    assert quota_weakly_dominates(p, q, s, t) == weakly_dominates_oracle(
                        p, ss, tt
                    )


def test_unacceptable_variant_matches_oracle_on_acceptable_parts():
    m = 4
    full = (1 << m) - 1
    for cutoff in range(m + 1):
        p = Preference(tuple(range(m)), cutoff)
        for s in subsets_of(full, nonempty=False):
            for t in subsets_of(full, nonempty=False):
                expected = weakly_dominates_oracle(
                    Preference(tuple(range(m))), s & p.acceptable, t & p.acceptable
                )
                assert weakly_dominates(p, s, t) == expected


def test_quota_one_compares_tops():
    p = pref("abc")
    assert quota_weakly_dominates(p, 1, bundle("ac"), bundle("b"))
    assert not quota_weakly_dominates(pref("ab"), 1, bundle("b"), bundle("a"))


def test_infinite_quota_reduces_to_base():
    p = pref("cadb")
    for s in subsets_of(bundle("abcd"), nonempty=False):
        for t in subsets_of(bundle("abcd"), nonempty=False):
            assert quota_weakly_dominates(p, INFINITE, s, t) == weakly_dominates(p, s, t)


def test_unacceptable_ignores_unacceptable_objects():
    p = pref("a|b")
    assert weakly_dominates(p, bundle("ab"), bundle("a"))
    assert weakly_dominates(p, bundle("a"), bundle("ab"))  # not antisymmetric here


def test_all_unacceptable_bundles_equivalent():
    p = pref("|ab")
    assert weakly_dominates(p, bundle("a"), bundle("b"))
    assert weakly_dominates(p, bundle("b"), bundle("a"))


def test_unacceptable_strict_failure():
    p = pref("ab|c")
    assert not weakly_dominates(p, bundle("bc"), bundle("a"))


def test_envies_examples():
    p = pref("abcd")
    assert envies(p, bundle("bd"), bundle("ac"))
    assert not weakly_dominates_oracle(p, bundle("bd"), bundle("ac"))  # oracle agrees
    assert not envies(p, bundle("abc"), bundle("ab"))  # superset never envied
    assert not envies(p, 0, 0)


def test_responsiveness_relations():
    # adding an object strictly improves; swapping in a weakly better object weakly improves
    m = 5
    full = (1 << m) - 1
    p = Preference(tuple(range(m)))
    for s in subsets_of(full, nonempty=False):
        for x in objects_of(full & ~s):
            assert strictly_dominates(p, s | 1 << x, s)
            for y in objects_of(full & ~s):
                if p.rank[x] <= p.rank[y]:
                    assert weakly_dominates(p, s | 1 << x, s | 1 << y)


def test_partial_order_laws_base_variant():
    m = 5
    full = (1 << m) - 1
    p = Preference(tuple(range(m)))
    subs = list(subsets_of(full, nonempty=False))
    geq = {(s, t) for s in subs for t in subs if weakly_dominates(p, s, t)}
    for s in subs:
        assert (s, s) in geq
    for s, t in geq:
        if (t, s) in geq:
            assert s == t
    for s, t in geq:
        for u in subs:
            if (t, u) in geq:
                assert (s, u) in geq


def test_geometric_utility_example():
    p = pref("abc")
    assert additive_utility(p, geometric_scheme(3), bundle("ac")) == Fraction(5, 8)


def test_empty_bundle_zero_utility():
    assert additive_utility(pref("abc"), linear_scheme(3), 0) == 0


def test_utility_strictly_monotone_in_objects():
    p = pref("cab")
    for scheme in (geometric_scheme(3), linear_scheme(3), random_scheme(3, seed=7)):
        for s in subsets_of(bundle("abc"), nonempty=False):
            for x in objects_of(bundle("abc") & ~s):
                assert additive_utility(p, scheme, s | 1 << x) > additive_utility(p, scheme, s)


def test_non_monotone_scheme_rejected():
    with pytest.raises(ValueError):
        WeightScheme("bad", (Fraction(1), Fraction(1)))
    with pytest.raises(ValueError):
        WeightScheme("bad", (Fraction(1), Fraction(0)))


def test_unacceptable_utility_counts_acceptable_only():
    p = pref("a|b")
    scheme = geometric_scheme(2)
    assert additive_utility(p, scheme, bundle("ab")) == additive_utility(p, scheme, bundle("a"))


def test_dominance_implies_all_consistent_utilities_agree():
    m = 5
    p = Preference((3, 0, 4, 1, 2))
    schemes = [geometric_scheme(m), linear_scheme(m)] + [random_scheme(m, s) for s in range(5)]
    full = (1 << m) - 1
    for s in subsets_of(full, nonempty=False):
        for t in subsets_of(full, nonempty=False):
            if weakly_dominates(p, s, t):
                for scheme in schemes:
                    assert additive_utility(p, scheme, s) >= additive_utility(p, scheme, t)


def test_no_dominance_is_witnessed_by_some_scheme():
    # sampled falsification direction: some provided scheme separates every non-dominated pair
    m = 5
    p = Preference(tuple(range(m)))
    schemes = [geometric_scheme(m), linear_scheme(m)] + [
        random_scheme(m, seed) for seed in range(100)
    ]
    full = (1 << m) - 1
    for s in subsets_of(full, nonempty=False):
        for t in subsets_of(full, nonempty=False):
            if not weakly_dominates(p, s, t):
                assert any(
                    additive_utility(p, sch, t) > additive_utility(p, sch, s)
                    for sch in schemes
                )
