"""Structural (SHD, SID) and interventional (TVD) evaluation measures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .bayesnet import CategoricalDistribution
from .errors import ParameterError
from .graph import Dag, Pdag, consistent_extension, cpdag_of, d_separated

__all__ = [
    "EffectEntry",
    "EffectTable",
    "shd",
    "sid",
    "sid_bounds",
    "adjustment_valid",
    "tvd",
    "aggregate_effects",
    "enumerate_extensions",
]

Graph = Union[Dag, Pdag]


def _as_cpdag(g: Graph) -> Pdag:
    return cpdag_of(g) if isinstance(g, Dag) else g


def _same_variables(a: Graph, b: Graph):
    if set(a.variables) != set(b.variables):
        raise ParameterError("graphs are over different variable sets")


def shd(a: Graph, b: Graph) -> int:
    """Structural Hamming distance between equivalence-class representations.

    Every unordered pair whose edge status differs (missing, extra, reversed,
    directed vs undirected) costs 1. DAG inputs are first mapped to their
    CPDAG.
    """
    _same_variables(a, b)
    pa, pb = _as_cpdag(a), _as_cpdag(b)
    return sum(
        pa.edge_status(x, y) != pb.edge_status(x, y)
        for x, y in itertools.combinations(sorted(pa.variables), 2)
    )


def adjustment_valid(g: Dag, i: str, j: str, z: Iterable[str]) -> bool:
    """Whether ``z`` is a valid adjustment set for the effect of ``i`` on ``j`` in ``g``.

    Generalized adjustment criterion: ``z`` avoids descendants of every node
    (other than ``i``) on a directed path from ``i`` to ``j``, and blocks every
    non-causal path, i.e. d-separates ``i`` and ``j`` once the first edge of
    each directed path from ``i`` to ``j`` is removed.
    """
    z = set(z)
    if i in z or j in z:
        return False
    de_i = g.descendants([i])
    if j in de_i:
        on_causal = (de_i & g.ancestors([j])) - {i}
    else:
        on_causal = set()
    if z & g.descendants(on_causal):
        return False
    cut = [(i, c) for c in g.children(i) if c in on_causal]
    return d_separated(g.with_edges(remove=cut), i, j, z)


def _sid_dag(true_g: Dag, learned: Dag) -> int:
    mistakes = 0
    for i in true_g.variables:
        pa = learned.parents(i)
        de_i = true_g.descendants([i])
        for j in true_g.variables:
            if j == i:
                continue
            if j in pa:
                # learned model claims no effect of i on j
                mistakes += j in de_i
            else:
                mistakes += not adjustment_valid(true_g, i, j, pa)
    return mistakes


def sid(true_g: Dag, learned: Graph) -> int:
    """Structural intervention distance.

    Counts ordered pairs (i, j) for which adjusting for the parents of ``i``
    in ``learned`` does not give ``p(j | do(i))`` in ``true_g``. A PDAG is
    evaluated through its lexicographic consistent extension.
    """
    _same_variables(true_g, learned)
    if isinstance(learned, Pdag):
        learned = consistent_extension(learned)
    return _sid_dag(true_g, learned)


def enumerate_extensions(p: Pdag, limit: int = 100_000) -> list[Dag]:
    """All DAGs that orient ``p``'s undirected edges without new v-structures or cycles.

    ``p`` is expected to be a CPDAG; members are those whose CPDAG equals ``p``.
    """
    undirected = sorted(tuple(sorted(e)) for e in p.undirected_edges)
    if 2 ** len(undirected) > limit:
        raise ParameterError(f"{len(undirected)} undirected edges is too many to enumerate")
    members = []
    for flips in itertools.product((False, True), repeat=len(undirected)):
        edges = set(p.directed_edges)
        edges.update((b, a) if f else (a, b) for (a, b), f in zip(undirected, flips))
        try:
            d = Dag(p.variables, edges)
        except Exception:
            continue
        if cpdag_of(d) == p:
            members.append(d)
    return members


def sid_bounds(true_g: Dag, learned: Pdag, max_vars: int = 8) -> tuple[int, int]:
    """Minimum and maximum SID over every DAG in ``learned``'s class."""
    _same_variables(true_g, learned)
    if len(learned.variables) > max_vars:
        raise ParameterError(f"exhaustive SID bounds are limited to {max_vars} variables")
    values = [_sid_dag(true_g, d) for d in enumerate_extensions(learned)]
    if not values:
        raise ParameterError("learned graph has no member DAGs")
    return min(values), max(values)


def tvd(p: CategoricalDistribution, q: CategoricalDistribution) -> float:
    """Total variation distance ½ Σ |p - q| over a shared ordered domain."""
    if p.domain != q.domain:
        raise ParameterError(f"domain mismatch: {p.domain} vs {q.domain}")
    value = 0.5 * float(np.abs(p.probabilities - q.probabilities).sum())
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class EffectEntry:
    treatment: str
    value: str
    outcome: str
    tvd: float

    def __post_init__(self):
        if not 0.0 <= self.tvd <= 1.0:
            raise ParameterError(f"tvd {self.tvd} outside [0, 1]")


@dataclass
class EffectTable:
    """One TVD per evaluated (treatment, value, outcome) triple."""

    entries: list = field(default_factory=list)

    def add(self, treatment: str, value: str, outcome: str, distance: float):
        key = (treatment, value, outcome)
        if any((e.treatment, e.value, e.outcome) == key for e in self.entries):
            raise ParameterError(f"duplicate effect {key}")
        self.entries.append(EffectEntry(treatment, value, outcome, distance))

    def where(self, value: str | None = None) -> "EffectTable":
        return EffectTable([e for e in self.entries if value is None or e.value == value])

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def aggregate_effects(table: EffectTable, mode: str = "mean") -> float:
    """Mean or sum of the per-effect TVDs."""
    if not len(table):
        raise ParameterError("cannot aggregate an empty effect table")
    values = [e.tvd for e in table]
    if mode == "mean":
        return float(np.mean(values))
    if mode == "sum":
        return float(np.sum(values))
    raise ParameterError(f"unknown aggregation mode {mode!r}")
