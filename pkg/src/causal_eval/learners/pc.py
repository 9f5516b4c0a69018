"""The PC algorithm (order-independent skeleton phase)."""

from __future__ import annotations

import itertools
from typing import Callable, Iterable

from ..bayesnet import Dataset
from ..errors import ParameterError
from ..graph import Dag, Pdag, d_separated, meek_orient
from .citest import g2_test
from .config import LearnerConfig

IndependenceTest = Callable[[str, str, tuple], bool]


def g2_tester(data: Dataset, alpha: float) -> IndependenceTest:
    def test(x, y, z):
        return g2_test(data, x, y, z, alpha).independent

    return test


def dsep_tester(true_dag: Dag) -> IndependenceTest:
    def test(x, y, z):
        return d_separated(true_dag, x, y, z)

    return test


def pc_skeleton(variables: Iterable[str], indep: IndependenceTest, max_cond: int):
    """Adjacency sets and separating sets.

    Adjacencies are frozen at the start of each conditioning-set size, so the
    result does not depend on the order in which pairs are visited.
    """
    variables = sorted(variables)
    adj = {v: set(variables) - {v} for v in variables}
    sepsets: dict = {}
    size = 0
    while size <= max_cond:
        frozen = {v: set(a) for v, a in adj.items()}
        tested = False
        for x in variables:
            for y in sorted(frozen[x]):
                if y not in adj[x]:
                    continue
                pool = sorted(frozen[x] - {y})
                if len(pool) < size:
                    continue
                tested = True
                for s in itertools.combinations(pool, size):
                    if indep(x, y, s):
                        adj[x].discard(y)
                        adj[y].discard(x)
                        sepsets[frozenset((x, y))] = frozenset(s)
                        break
        if not tested:
            break
        size += 1
    return adj, sepsets


def orient_v_structures(variables, adj, sepsets) -> Pdag:
    """Orient x -> z <- y for unshielded triples with z outside sepset(x, y).

    Triples are processed in lexicographic order; an orientation that would
    contradict an earlier one is skipped.
    """
    variables = sorted(variables)
    directed: set = set()
    for z in variables:
        for x, y in itertools.combinations(sorted(adj[z]), 2):
            if y in adj[x] or z in sepsets.get(frozenset((x, y)), frozenset()):
                continue
            for a in (x, y):
                if (z, a) not in directed:
                    directed.add((a, z))
    undirected = {
        frozenset((a, b))
        for a in variables
        for b in adj[a]
        if (a, b) not in directed and (b, a) not in directed
    }
    return Pdag(variables, directed, undirected)


def pc(data: Dataset | None, config: LearnerConfig = LearnerConfig(), oracle: Dag | None = None) -> Pdag:
    """Learn a CPDAG with PC.

    With ``oracle`` set, conditional independence is read off the oracle
    DAG by d-separation instead of testing ``data``.
    """
    if oracle is not None:
        variables = list(oracle.variables)
        indep = dsep_tester(oracle)
    else:
        variables = list(data.columns)
        indep = g2_tester(data, config.alpha)
    if len(variables) < 2:
        raise ParameterError("PC needs at least two variables")
    adj, sepsets = pc_skeleton(variables, indep, config.cond_cap(len(variables)))
    pattern = orient_v_structures(variables, adj, sepsets)
    out = meek_orient(pattern)
    # restore declaration order
    return Pdag(data.columns if oracle is None else oracle.variables, out.directed_edges, out.undirected_edges)
