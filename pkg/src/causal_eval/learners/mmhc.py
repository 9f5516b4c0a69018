"""Max-min hill climbing: MMPC skeleton, then constrained BDeu hill climbing."""

from __future__ import annotations

import itertools

from ..bayesnet import Dataset
from ..errors import ParameterError
from ..graph import Dag
from .citest import g2_log_p_value, g2_test
from .config import LearnerConfig
from .score import BDeuScorer

_EPS = 1e-9


class _Association:
    """Cached G^2 tests; association is -log p, zero when independent."""

    def __init__(self, data: Dataset, alpha: float):
        self.data = data
        self.alpha = alpha
        self._cache: dict = {}

    def __call__(self, x, t, s):
        key = (frozenset((x, t)), frozenset(s))
        hit = self._cache.get(key)
        if hit is None:
            d = g2_test(self.data, x, t, s, self.alpha)
            hit = 0.0 if d.independent else -g2_log_p_value(d)
            self._cache[key] = hit
        return hit


def _min_assoc(assoc, x, t, cpc, cap):
    best = float("inf")
    for k in range(min(len(cpc), cap) + 1):
        for s in itertools.combinations(cpc, k):
            best = min(best, assoc(x, t, s))
            if best == 0.0:
                return 0.0
    return best


def mmpc(target: str, variables, assoc, cap: int) -> set:
    """Candidate parents and children of ``target`` (before symmetry correction)."""
    cpc: list = []
    open_ = sorted(v for v in variables if v != target)
    while open_:
        scored = [(_min_assoc(assoc, x, target, cpc, cap), x) for x in open_]
        open_ = [x for a, x in scored if a > 0.0]
        if not open_:
            break
        # max() keeps the first maximum, i.e. the lexicographically smallest
        _, chosen = max(((a, x) for a, x in scored if a > 0.0), key=lambda p: p[0])
        cpc.append(chosen)
        open_.remove(chosen)
    for x in list(cpc):
        rest = [v for v in cpc if v != x]
        if _min_assoc(assoc, x, target, rest, cap) == 0.0:
            cpc.remove(x)
    return set(cpc)


def mmpc_skeleton(data: Dataset, config: LearnerConfig) -> set:
    """Undirected skeleton as a set of frozenset pairs (AND symmetry rule)."""
    variables = list(data.columns)
    assoc = _Association(data, config.alpha)
    cap = config.cond_cap(len(variables))
    pcs = {t: mmpc(t, variables, assoc, cap) for t in sorted(variables)}
    return {frozenset((a, b)) for a in pcs for b in pcs[a] if a in pcs[b]}


def _reaches(children, src, dst) -> bool:
    stack, seen = [src], set()
    while stack:
        u = stack.pop()
        if u == dst:
            return True
        if u in seen:
            continue
        seen.add(u)
        stack.extend(children[u])
    return False


def hill_climb(data: Dataset, allowed: set, scorer: BDeuScorer):
    """Greedy add/delete/reverse search from the empty graph over ``allowed`` pairs.

    Returns the local optimum and the score after each accepted move.
    """
    variables = sorted(data.columns)
    parents = {v: set() for v in variables}
    children = {v: set() for v in variables}
    fam = {v: scorer.family(v, ()) for v in variables}
    trace = [sum(fam.values())]
    pairs = sorted(tuple(sorted(e)) for e in allowed)
    while True:
        best = None
        for a0, b0 in pairs:
            for a, b in ((a0, b0), (b0, a0)):
                if b in children[a]:
                    # delete a -> b
                    d = scorer.family(b, parents[b] - {a}) - fam[b]
                    if d > _EPS and (best is None or d > best[0]):
                        best = (d, 1, a, b)
                    # reverse a -> b into b -> a
                    children[a].discard(b)
                    cyclic = _reaches(children, a, b)
                    children[a].add(b)
                    if not cyclic:
                        d = (scorer.family(b, parents[b] - {a}) - fam[b]
                             + scorer.family(a, parents[a] | {b}) - fam[a])
                        if d > _EPS and (best is None or d > best[0]):
                            best = (d, 2, a, b)
                elif a not in children[b] and not _reaches(children, b, a):
                    d = scorer.family(b, parents[b] | {a}) - fam[b]
                    if d > _EPS and (best is None or d > best[0]):
                        best = (d, 0, a, b)
        if best is None:
            break
        _, op, a, b = best
        if op == 0:
            parents[b].add(a)
            children[a].add(b)
        else:
            parents[b].discard(a)
            children[a].discard(b)
            if op == 2:
                parents[a].add(b)
                children[b].add(a)
        for v in (a, b):
            fam[v] = scorer.family(v, parents[v])
        trace.append(sum(fam.values()))
    dag = Dag(data.columns, [(p, c) for c in variables for p in parents[c]])
    return dag, trace


def mmhc_trace(data: Dataset, config: LearnerConfig = LearnerConfig()):
    """Run MMHC; return (dag, skeleton, score trace)."""
    if len(data.columns) < 2:
        raise ParameterError("MMHC needs at least two variables")
    skeleton = mmpc_skeleton(data, config)
    dag, trace = hill_climb(data, skeleton, BDeuScorer(data, config.ess))
    return dag, skeleton, trace


def mmhc(data: Dataset, config: LearnerConfig = LearnerConfig()) -> Dag:
    """Learn a DAG with max-min hill climbing."""
    return mmhc_trace(data, config)[0]
