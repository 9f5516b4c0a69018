"""Bayesian Dirichlet equivalent uniform (BDeu) score."""

from __future__ import annotations

from typing import Iterable

from .. import kernels
from ..bayesnet import Dataset
from ..graph import Dag


class BDeuScorer:
    """Family scores over one dataset, cached by (node, parent set)."""

    def __init__(self, data: Dataset, ess: float = 10.0):
        if not ess > 0:
            raise ValueError("ess must be positive")
        self.data = data
        self.ess = float(ess)
        self._cache: dict = {}

    def family(self, node: str, parents: Iterable[str]) -> float:
        parents = frozenset(parents)
        key = (node, parents)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        pa = sorted(parents)
        cols = [self.data.index(p) for p in pa] + [self.data.index(node)]
        cards = [self.data.cardinality(p) for p in pa] + [self.data.cardinality(node)]
        counts = kernels.contingency(self.data.codes, cols, cards).reshape(-1, cards[-1])
        value = kernels.bdeu_family(counts, self.ess)
        self._cache[key] = value
        return value

    def score(self, g: Dag) -> float:
        return sum(self.family(v, g.parents(v)) for v in sorted(g.variables))


def bdeu_score(data: Dataset, g: Dag, ess: float = 10.0) -> float:
    """Log marginal likelihood of ``data`` under ``g`` with BDeu priors."""
    return BDeuScorer(data, ess).score(g)
