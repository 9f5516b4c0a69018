"""Greedy equivalence search over CPDAGs with the BDeu score."""

from __future__ import annotations

import itertools
from collections import deque

from ..bayesnet import Dataset
from ..errors import ParameterError
from ..graph import Pdag, consistent_extension, cpdag_of
from .config import LearnerConfig
from .score import BDeuScorer

_EPS = 1e-9


class _State:
    """Adjacency view of a CPDAG for operator validity checks."""

    def __init__(self, p: Pdag):
        self.pdag = p
        self.variables = sorted(p.variables)
        self.parents = {v: set() for v in self.variables}
        self.children = {v: set() for v in self.variables}
        self.nbrs = {v: set() for v in self.variables}
        for a, b in p.directed_edges:
            self.parents[b].add(a)
            self.children[a].add(b)
        for e in p.undirected_edges:
            a, b = tuple(e)
            self.nbrs[a].add(b)
            self.nbrs[b].add(a)

    def adj(self, v):
        return self.parents[v] | self.children[v] | self.nbrs[v]

    def is_clique(self, nodes):
        nodes = list(nodes)
        return all(b in self.adj(a) for a, b in itertools.combinations(nodes, 2))

    def semi_directed_path(self, src, dst, blocked):
        """Whether a path src ~> dst exists using only undirected and forward edges."""
        seen = {src}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for w in self.nbrs[u] | self.children[u]:
                if w == dst:
                    return True
                if w in seen or w in blocked:
                    continue
                seen.add(w)
                queue.append(w)
        return False


def _subsets(items):
    items = sorted(items)
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def _best_insert(state: _State, scorer: BDeuScorer):
    best = None
    for x in state.variables:
        adj_x = state.adj(x)
        for y in state.variables:
            if y == x or y in adj_x:
                continue
            na = state.nbrs[y] & adj_x
            pa = state.parents[y]
            t0 = state.nbrs[y] - adj_x
            for t in _subsets(t0):
                nat = na | set(t)
                if not state.is_clique(nat):
                    continue
                if state.semi_directed_path(y, x, nat):
                    continue
                delta = scorer.family(y, nat | pa | {x}) - scorer.family(y, nat | pa)
                if delta > _EPS and (best is None or delta > best[0]):
                    best = (delta, x, y, t)
    return best


def _apply_insert(p: Pdag, x, y, t) -> Pdag:
    directed = set(p.directed_edges) | {(x, y)} | {(a, y) for a in t}
    undirected = set(p.undirected_edges) - {frozenset((a, y)) for a in t}
    return Pdag(p.variables, directed, undirected)


def _best_delete(state: _State, scorer: BDeuScorer):
    best = None
    for x in state.variables:
        for y in state.variables:
            if y == x or not (x in state.nbrs[y] or x in state.parents[y]):
                continue
            na = state.nbrs[y] & state.adj(x)
            pa = state.parents[y]
            for h in _subsets(na):
                rest = na - set(h)
                if not state.is_clique(rest):
                    continue
                delta = scorer.family(y, rest | (pa - {x})) - scorer.family(y, rest | pa | {x})
                if delta > _EPS and (best is None or delta > best[0]):
                    best = (delta, x, y, h)
    return best


def _apply_delete(p: Pdag, x, y, h) -> Pdag:
    directed = set(p.directed_edges) - {(x, y)}
    undirected = set(p.undirected_edges) - {frozenset((x, y))}
    for a in h:
        undirected.discard(frozenset((y, a)))
        directed.add((y, a))
        if frozenset((x, a)) in undirected:
            undirected.discard(frozenset((x, a)))
            directed.add((x, a))
    return Pdag(p.variables, directed, undirected)


def ges_trace(data: Dataset, config: LearnerConfig = LearnerConfig()):
    """Run GES; return the final CPDAG and the score after each accepted move.

    The first trace entry is the empty model's score.
    """
    if len(data.columns) < 2:
        raise ParameterError("GES needs at least two variables")
    scorer = BDeuScorer(data, config.ess)
    current = Pdag(data.columns)
    trace = [scorer.score(consistent_extension(current))]
    for find, apply in ((_best_insert, _apply_insert), (_best_delete, _apply_delete)):
        while True:
            move = find(_State(current), scorer)
            if move is None:
                break
            _, a, b, s = move
            dag = consistent_extension(apply(current, a, b, s))
            current = cpdag_of(dag)
            trace.append(scorer.score(dag))
    return current, trace


def ges(data: Dataset, config: LearnerConfig = LearnerConfig()) -> Pdag:
    """Learn a CPDAG by forward insertions then backward deletions."""
    return ges_trace(data, config)[0]
