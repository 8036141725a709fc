"""Pairwise-dominance comparison of bundles, its variants, and additive utility schemes.

A bundle S weakly dominates T under a ranking when some injection maps each
object of T to a weakly better object of S. The fast test works in rank space:
sort both bundles best-first and compare position by position. Its equivalence
with injection existence is a tested claim against `weakly_dominates_oracle`
(exhaustive bipartite matching), not an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random

from .core import INFINITE, Bundle, Preference, bundle_size, objects_of, top_k

ORACLE_SIZE_CAP = 12


def _rank_masks_dominate(s: int, t: int) -> bool:
    """Rank-space test: i-th best of s at least as good (lower bit) as i-th best of t."""
    if s.bit_count() < t.bit_count():
        return False
    while t:
        if (s & -s) > (t & -t):
            return False
        s &= s - 1
        t &= t - 1
    return True


def _build_table(size: int) -> list[int]:
    rows = []
    for s in range(1 << size):
        row = 0
        for t in range(1 << size):
            if _rank_masks_dominate(s, t):
                row |= 1 << t
        rows.append(row)
    return rows


# row s has bit t set iff rank-space bundle s weakly dominates t (universes up to 6 objects)
PD_ROWS = _build_table(6)

# KEEP_BEST[k][s]: the k lowest set bits of rank-space mask s (agent keeps her k best)
def _build_keep(size: int) -> list[list[int]]:
    tables = []
    for k in range(size + 1):
        table = []
        for s in range(1 << size):
            kept, m, left = 0, s, k
            while m and left:
                kept |= m & -m
                m &= m - 1
                left -= 1
            table.append(kept)
        tables.append(table)
    return tables


KEEP_BEST = _build_keep(6)


def dominates_rank_masks(s: int, t: int) -> bool:
    if s < 64 and t < 64:
        return PD_ROWS[s] >> t & 1 == 1
    return _rank_masks_dominate(s, t)


def weakly_dominates(pref: Preference, s: Bundle, t: Bundle) -> bool:
    """S at-least-as-good-as T under pref's pairwise comparison.

    When pref carries a cutoff, only the acceptable parts of the bundles are
    compared (the ranking of unacceptable objects is ignored), which is the
    comparison the unacceptable-objects model uses.
    """
    if pref.cutoff is not None:
        acc = pref.acceptable
        s &= acc
        t &= acc
    return dominates_rank_masks(pref.rank_mask(s), pref.rank_mask(t))


def strictly_dominates(pref: Preference, s: Bundle, t: Bundle) -> bool:
    return weakly_dominates(pref, s, t) and not weakly_dominates(pref, t, s)


def quota_weakly_dominates(pref: Preference, quota: int | float, s: Bundle, t: Bundle) -> bool:
    """Dominance where the agent only counts her best `quota` objects of each bundle."""
    if quota < 1:
        raise ValueError("quota must be at least 1")
    if quota != INFINITE:
        s = top_k(pref, s, min(int(quota), bundle_size(s)))
        t = top_k(pref, t, min(int(quota), bundle_size(t)))
    return weakly_dominates(pref, s, t)


def envies(pref: Preference, own: Bundle, other: Bundle, quota: int | float = INFINITE) -> bool:
    """True when `own` fails to weakly dominate `other` under the variant comparison."""
    if quota != INFINITE:
        return not quota_weakly_dominates(pref, quota, own, other)
    return not weakly_dominates(pref, own, other)


def weakly_dominates_oracle(pref: Preference, s: Bundle, t: Bundle) -> bool:
    """Injection-existence oracle: exhaustive bipartite matching on the weakly-better relation.

    Independent of the sorted-comparison shortcut; refuses bundles above the
    desk-scale cap.
    """
    if bundle_size(s) > ORACLE_SIZE_CAP or bundle_size(t) > ORACLE_SIZE_CAP:
        raise ValueError(f"oracle capped at bundles of {ORACLE_SIZE_CAP} objects")
    if pref.cutoff is not None:
        acc = pref.acceptable
        s &= acc
        t &= acc
    t_objs = objects_of(t)
    s_objs = objects_of(s)
    rank = pref.rank
    match: dict[int, int] = {}  # s-object -> t-object

    def augment(x: int, blocked: set[int]) -> bool:
        for y in s_objs:
            if y in blocked or rank[y] > rank[x]:
                continue
            blocked.add(y)
            if y not in match or augment(match[y], blocked):
                match[y] = x
                return True
        return False

    return all(augment(x, set()) for x in t_objs)


@dataclass(frozen=True)
class WeightScheme:
    """Per-rank additive weights: positive and strictly decreasing with rank."""

    name: str
    weights: tuple[Fraction, ...]  # index 0 = weight of the best-ranked object

    def __post_init__(self):
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"scheme {self.name!r} has a non-positive weight")
        if any(a <= b for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError(f"scheme {self.name!r} is not strictly decreasing")


def geometric_scheme(size: int) -> WeightScheme:
    return WeightScheme("geometric", tuple(Fraction(1, 2 ** (r + 1)) for r in range(size)))


def linear_scheme(size: int) -> WeightScheme:
    return WeightScheme("linear", tuple(Fraction(size - r) for r in range(size)))


def random_scheme(size: int, seed: int) -> WeightScheme:
    rng = Random(seed)
    raw = sorted(rng.sample(range(1, 1000 * size), size), reverse=True)
    return WeightScheme(f"random-{seed}", tuple(Fraction(w) for w in raw))


def additive_utility(pref: Preference, scheme: WeightScheme, bundle: Bundle) -> Fraction:
    """Sum of rank weights over the bundle (acceptable objects only when a cutoff is present)."""
    if len(scheme.weights) < len(pref.ranking):
        raise ValueError("scheme too short for this ranking")
    if pref.cutoff is not None:
        bundle &= pref.acceptable
    total = Fraction(0)
    for o in objects_of(bundle):
        total += scheme.weights[pref.rank[o]]
    return total
