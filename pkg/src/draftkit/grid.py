"""Vectorized rule-space search for two-agent domains with one fixed available set.

The impossibility searches all share this shape: variables form a preference
grid (one per ordered ranking pair), candidates are the full splits of the
object pool between the two agents, and the only binary constraints are
unilateral-deviation constraints along grid rows and columns. That structure
lets arc consistency run as whole-row / whole-column mask arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .core import Preference
from .csp import InfeasibilityCertificate, SolveResult, SolveStats
from .dominance import dominates_rank_masks


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    bytes_view = arr.astype(np.uint64).view(np.uint8).reshape(arr.shape + (8,))
    lut = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)
    return lut[bytes_view].sum(axis=-1)


@dataclass
class GridCSP:
    n_objects: int
    axioms: tuple[str, ...]
    rankings: list[tuple[int, ...]]
    candidates: list[int]  # agent-1 bundles; agent 2 holds the complement (NW built in)
    initial: np.ndarray  # (P, P) uint64 candidate masks after unary filters
    m_row: np.ndarray  # (P, P, C) allowed masks for same-row (agent-2 deviation) pairs
    m_col: np.ndarray  # same for columns (agent-1 deviations)

    def var_index(self, r1: int, r2: int) -> int:
        return r1 * len(self.rankings) + r2

    def var_profile(self, var: int) -> tuple[int, int]:
        return divmod(var, len(self.rankings))


def build_grid(n_objects: int, axioms, priority=(1, 2)) -> GridCSP:
    """Unary axioms filter the splits; exactly one of SP/WSP forms the deviation constraints."""
    axioms = tuple(axioms)
    deviation = [ax for ax in axioms if ax in ("SP", "WSP")]
    if len(deviation) != 1:
        raise ValueError("grid search needs exactly one of SP / WSP")
    unary = [ax for ax in axioms if ax not in ("SP", "WSP")]
    for ax in unary:
        if ax not in ("NW", "EF1", "RP", "EFF"):
            raise ValueError(f"axiom {ax!r} has no grid encoder")

    rankings = list(permutations(range(n_objects)))
    prefs = [Preference(r) for r in rankings]
    P = len(rankings)
    full = (1 << n_objects) - 1
    candidates = list(range(1 << n_objects))
    C = len(candidates)

    # rank-space views of both agents' bundles, per preference
    rk1 = [[p.rank_mask(a) for a in candidates] for p in prefs]
    rk2 = [[p.rank_mask(full & ~a) for a in candidates] for p in prefs]

    def cones(rk):
        down = np.zeros((P, C), dtype=np.uint64)
        up = np.zeros((P, C), dtype=np.uint64)
        sdown = np.zeros((P, C), dtype=np.uint64)
        sup = np.zeros((P, C), dtype=np.uint64)
        for r in range(P):
            row = rk[r]
            for a in range(C):
                d = u = 0
                for b in range(C):
                    geq = dominates_rank_masks(row[a], row[b])
                    leq = dominates_rank_masks(row[b], row[a])
                    if geq:
                        d |= 1 << b
                    if leq:
                        u |= 1 << b
                down[r, a] = d
                up[r, a] = u
                sdown[r, a] = d & ~u & ((1 << C) - 1)
                sup[r, a] = u & ~d & ((1 << C) - 1)
        return down, up, sdown, sup

    down1, up1, sdown1, sup1 = cones(rk1)
    down2, up2, sdown2, sup2 = cones(rk2)
    allmask = np.uint64((1 << C) - 1)

    if deviation[0] == "SP":
        m_col = down1[:, None, :] & up1[None, :, :]
        m_row = down2[:, None, :] & up2[None, :, :]
    else:
        m_col = (allmask ^ sup1)[:, None, :] & (allmask ^ sdown1)[None, :, :]
        m_row = (allmask ^ sup2)[:, None, :] & (allmask ^ sdown2)[None, :, :]

    # unary filters, decomposed by side where the condition only reads one preference
    def ef1_side(p: Preference, own: int, other: int) -> bool:
        if dominates_rank_masks(p.rank_mask(own), p.rank_mask(other)):
            return True
        o = other
        while o:
            low = o & -o
            o ^= low
            if dominates_rank_masks(p.rank_mask(own), p.rank_mask(other & ~low)):
                return True
        return False

    row_ok = np.full(P, allmask, dtype=np.uint64)
    col_ok = np.full(P, allmask, dtype=np.uint64)
    for r, p in enumerate(prefs):
        rmask = cmask = 0
        for a in candidates:
            ok1 = ok2 = True
            if "EF1" in unary:
                ok1 = ok1 and ef1_side(p, a, full & ~a)
                ok2 = ok2 and ef1_side(p, full & ~a, a)
            if "RP" in unary:
                if priority == (1, 2):
                    ok1 = ok1 and dominates_rank_masks(p.rank_mask(a), p.rank_mask(full & ~a))
                else:
                    ok2 = ok2 and dominates_rank_masks(p.rank_mask(full & ~a), p.rank_mask(a))
            if ok1:
                rmask |= 1 << a
            if ok2:
                cmask |= 1 << a
        row_ok[r] = rmask
        col_ok[r] = cmask

    initial = row_ok[:, None] & col_ok[None, :]

    if "EFF" in unary:
        from .axioms import _trade_cycle

        for r1 in range(P):
            for r2 in range(P):
                mask = int(initial[r1, r2])
                keep = 0
                m = mask
                while m:
                    low = m & -m
                    m ^= low
                    a = low.bit_length() - 1
                    if _trade_cycle((prefs[r1], prefs[r2]), (a, full & ~a)) is None:
                        keep |= low
                initial[r1, r2] = keep

    return GridCSP(n_objects, axioms, rankings, candidates, initial, m_row, m_col)


_POW2 = None


def _pack(alive: np.ndarray) -> np.ndarray:
    global _POW2
    C = alive.shape[-1]
    if _POW2 is None or _POW2.shape[0] != C:
        _POW2 = (np.uint64(1) << np.arange(C, dtype=np.uint64))
    return (alive.astype(np.uint64) * _POW2).sum(axis=-1, dtype=np.uint64)


class _Budget(Exception):
    pass


def _propagate(grid: GridCSP, D: np.ndarray, dirty_rows, dirty_cols, stats, budget):
    """Row/column arc consistency to fixpoint; returns an emptied (r1, r2) or None."""
    P = len(grid.rankings)
    while dirty_rows or dirty_cols:
        rows, dirty_rows = sorted(dirty_rows), set()
        for r in rows:
            stats.revisions += P
            if stats.revisions > budget:
                raise _Budget
            B = D[r]
            support = (B[None, :, None] & grid.m_row) != 0
            newB = B & _pack(support.all(axis=1))
            changed = np.nonzero(newB != B)[0]
            if changed.size:
                D[r] = newB
                if (newB[changed] == 0).any():
                    c = int(changed[np.nonzero(newB[changed] == 0)[0][0]])
                    return (r, c)
                dirty_cols.update(int(c) for c in changed)
                dirty_rows.add(r)
        cols, dirty_cols = sorted(dirty_cols), set()
        for c in cols:
            stats.revisions += P
            if stats.revisions > budget:
                raise _Budget
            B = D[:, c]
            support = (B[None, :, None] & grid.m_col) != 0
            newB = B & _pack(support.all(axis=1))
            changed = np.nonzero(newB != B)[0]
            if changed.size:
                D[:, c] = newB
                if (newB[changed] == 0).any():
                    r = int(changed[np.nonzero(newB[changed] == 0)[0][0]])
                    return (r, c)
                dirty_rows.update(int(r) for r in changed)
                dirty_cols.add(c)
    return None


def solve_grid(
    grid: GridCSP,
    mode: str = "prove-unsat",
    budget: int = 10_000_000,
    start_profile: tuple[int, int] | None = None,
) -> SolveResult:
    """Backtracking with bulk propagation; deterministic; replay by re-execution."""
    stats = SolveStats()
    P = len(grid.rankings)
    D = grid.initial.astype(np.uint64).copy()
    solutions: list[dict] = []

    def emptied_cert(rc):
        return InfeasibilityCertificate(emptied_var=grid.var_index(*rc))

    def pick_var(D):
        sizes = _popcount(D)
        open_vars = sizes > 1
        if not open_vars.any():
            return None
        if start_profile is not None and open_vars[start_profile]:
            return start_profile
        masked = np.where(open_vars, sizes, np.iinfo(sizes.dtype).max)
        flat = int(masked.argmin())
        return divmod(flat, P)

    def extract(D):
        out = {}
        for r1 in range(P):
            for r2 in range(P):
                a = int(D[r1, r2]).bit_length() - 1
                out[(grid.rankings[r1], grid.rankings[r2])] = a
        return out

    def search(D) -> InfeasibilityCertificate:
        stats.nodes += 1
        var = pick_var(D)
        if var is None:
            if (D == 0).any():
                flat = int((D == 0).argmax())
                return emptied_cert(divmod(flat, P))
            solutions.append(extract(D))
            return InfeasibilityCertificate()
        r1, r2 = var
        branches = []
        mask = int(D[r1, r2])
        m = mask
        while m:
            low = m & -m
            m ^= low
            val = low.bit_length() - 1
            child = D.copy()
            child[r1, r2] = np.uint64(low)
            wiped = _propagate(grid, child, {r1}, {r2}, stats, budget)
            if wiped is not None:
                branches.append((val, emptied_cert(wiped)))
                continue
            sub = search(child)
            if solutions and mode in ("find-one", "prove-unsat"):
                return sub
            branches.append((val, sub))
        return InfeasibilityCertificate(
            branch_var=grid.var_index(r1, r2), branches=branches
        )

    try:
        wiped = _propagate(grid, D, set(range(P)), set(range(P)), stats, budget)
        if wiped is not None:
            return SolveResult("unsat", [], emptied_cert(wiped), stats)
        cert = search(D)
    except _Budget:
        return SolveResult("undecided", solutions, None, stats)
    if solutions:
        return SolveResult("sat", solutions, None, stats)
    return SolveResult("unsat", [], cert, stats)


def replay_grid_certificate(grid: GridCSP, cert: InfeasibilityCertificate) -> bool:
    """Re-execute the recorded decisions; each leaf must reproduce its wipeout."""
    stats = SolveStats()
    P = len(grid.rankings)

    def verify(node, D) -> bool:
        wiped = _propagate(grid, D, set(range(P)), set(range(P)), stats, 10**9)
        if node.emptied_var is not None:
            return wiped is not None or bool((D == 0).any())
        if wiped is not None:
            return False  # recorded a branch where propagation already refutes
        if node.branch_var is None:
            return False
        r1, r2 = grid.var_profile(node.branch_var)
        covered = 0
        for val, child in node.branches:
            covered |= 1 << val
            child_D = D.copy()
            child_D[r1, r2] = np.uint64(1 << val)
            if not verify(child, child_D):
                return False
        return covered & int(D[r1, r2]) == int(D[r1, r2])

    return verify(cert, grid.initial.astype(np.uint64).copy())
