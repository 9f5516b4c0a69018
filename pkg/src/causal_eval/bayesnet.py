"""Discrete Bayesian networks, categorical datasets and exact inference."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    IdentifierError,
    ParameterError,
    UndefinedRowError,
    ZeroProbabilityEvidenceError,
)
from .graph import Dag, graph_from_dict, graph_to_dict

__all__ = [
    "CategoricalDistribution",
    "Dataset",
    "DiscreteBayesNet",
    "dirichlet_parameterize",
    "forward_sample",
    "intervene",
    "query",
    "interventional_distribution",
    "fit_parameters",
    "sort_labels",
]

_TOL = 1e-9


def sort_labels(values: Iterable[str]) -> tuple[str, ...]:
    """Distinct labels sorted numerically when all parse as numbers, else lexically."""
    distinct = set(values)
    try:
        return tuple(sorted(distinct, key=float))
    except ValueError:
        return tuple(sorted(distinct))


def _read_raw(path) -> str:
    # newline="" keeps quoted CR/LF inside fields intact for the csv module
    with open(path, newline="", encoding="utf-8") as fh:
        return fh.read()


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class CategoricalDistribution:
    """Probability vector over an ordered finite domain."""

    __slots__ = ("domain", "probabilities")

    def __init__(self, domain: Sequence[str], probabilities):
        domain = tuple(domain)
        p = np.asarray(probabilities, dtype=float)
        if p.shape != (len(domain),):
            raise ParameterError("probabilities must match the domain length")
        if len(set(domain)) != len(domain):
            raise ParameterError("duplicate labels in domain")
        if np.any(p < -_TOL) or abs(p.sum() - 1.0) > _TOL:
            raise ParameterError(f"not a probability vector: {p}")
        self.domain = domain
        self.probabilities = _readonly(np.clip(p, 0.0, None))

    def __getitem__(self, label: str) -> float:
        try:
            return float(self.probabilities[self.domain.index(label)])
        except ValueError:
            raise IdentifierError(f"unknown label {label!r}") from None

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.probabilities.tolist()))

    def __eq__(self, other):
        if not isinstance(other, CategoricalDistribution):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.probabilities, other.probabilities)

    def __repr__(self):
        body = ", ".join(f"{k}: {v:.4g}" for k, v in self.as_dict().items())
        return f"CategoricalDistribution({{{body}}})"


class Dataset:
    """Complete categorical records stored as integer codes.

    ``codes[i, j]`` indexes ``labels[columns[j]]``.
    """

    __slots__ = ("columns", "labels", "codes", "_index")

    def __init__(self, columns: Sequence[str], labels: Mapping[str, Sequence[str]], codes):
        columns = tuple(columns)
        if len(set(columns)) != len(columns):
            raise ParameterError("duplicate column names")
        labels = {c: tuple(labels[c]) for c in columns}
        codes = np.asarray(codes, dtype=np.int64)
        if codes.size == 0:
            codes = codes.reshape(0, len(columns))
        if codes.ndim != 2 or codes.shape[1] != len(columns):
            raise ParameterError("codes must be an (n_rows, n_columns) array")
        for j, c in enumerate(columns):
            if len(labels[c]) < 1:
                raise ParameterError(f"column {c!r} has an empty domain")
            if codes.shape[0] and (codes[:, j].min() < 0 or codes[:, j].max() >= len(labels[c])):
                raise ParameterError(f"column {c!r} has codes outside its domain")
        self.columns = columns
        self.labels = labels
        self.codes = _readonly(np.ascontiguousarray(codes))
        self._index = {c: j for j, c in enumerate(columns)}

    @classmethod
    def from_records(cls, columns, rows, labels: Mapping[str, Sequence[str]] | None = None) -> "Dataset":
        """Build from label-valued rows; domains are inferred unless given."""
        columns = tuple(columns)
        rows = [tuple(str(v) for v in r) for r in rows]
        labels = dict(labels or {})
        for j, c in enumerate(columns):
            if c not in labels:
                labels[c] = sort_labels(r[j] for r in rows)
            labels[c] = tuple(str(v) for v in labels[c])
        lookup = {c: {lab: k for k, lab in enumerate(labels[c])} for c in columns}
        codes = np.empty((len(rows), len(columns)), dtype=np.int64)
        for i, r in enumerate(rows):
            if len(r) != len(columns):
                raise ParameterError(f"row {i} has {len(r)} cells, expected {len(columns)}")
            for j, c in enumerate(columns):
                try:
                    codes[i, j] = lookup[c][r[j]]
                except KeyError:
                    raise IdentifierError(f"value {r[j]!r} not in domain of {c!r}") from None
        return cls(columns, labels, codes)

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    def index(self, column: str) -> int:
        try:
            return self._index[column]
        except KeyError:
            raise IdentifierError(f"unknown column {column!r}") from None

    def cardinality(self, column: str) -> int:
        return len(self.labels[self.columns[self.index(column)]])

    def column_codes(self, column: str) -> np.ndarray:
        return self.codes[:, self.index(column)]

    def select(self, columns: Sequence[str]) -> "Dataset":
        idx = [self.index(c) for c in columns]
        return Dataset(columns, {c: self.labels[c] for c in columns}, self.codes[:, idx])

    def rows(self):
        """Iterate label-valued rows."""
        labs = [self.labels[c] for c in self.columns]
        for r in self.codes:
            yield tuple(labs[j][k] for j, k in enumerate(r))

    def to_csv(self, path=None) -> str | None:
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows())
        text = buf.getvalue()
        if path is None:
            return text
        Path(path).write_text(text, newline="")
        return None

    @classmethod
    def from_csv(cls, path, labels: Mapping[str, Sequence[str]] | None = None) -> "Dataset":
        return cls.from_csv_text(_read_raw(path), labels)

    @classmethod
    def from_csv_text(cls, text: str, labels: Mapping[str, Sequence[str]] | None = None) -> "Dataset":
        reader = csv.reader(io.StringIO(text, newline=""))
        header = next(reader)
        return cls.from_records(header, [r for r in reader if r], labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.columns == other.columns
            and self.labels == other.labels
            and np.array_equal(self.codes, other.codes)
        )

    def __repr__(self):
        return f"Dataset({self.n_rows} rows x {len(self.columns)} columns)"


class DiscreteBayesNet:
    """A DAG with one conditional probability table per node.

    ``cpts[v]`` has shape ``(q, r)``: one row per configuration of ``v``'s
    parents (sorted lexicographically, first parent most significant) and one
    column per label of ``v``.
    """

    __slots__ = ("dag", "labels", "cpts", "_parents")

    def __init__(self, dag: Dag, labels: Mapping[str, Sequence[str]], cpts: Mapping[str, np.ndarray]):
        self.dag = dag
        self.labels = {v: tuple(str(x) for x in labels[v]) for v in dag.variables}
        self._parents = {v: tuple(sorted(dag.parents(v))) for v in dag.variables}
        tables = {}
        for v in dag.variables:
            r = len(self.labels[v])
            if r < 1:
                raise ParameterError(f"{v!r} has an empty domain")
            q = int(np.prod([len(self.labels[p]) for p in self._parents[v]], dtype=np.int64))
            t = np.asarray(cpts[v], dtype=float)
            if t.shape != (q, r):
                raise ParameterError(f"CPT of {v!r} has shape {t.shape}, expected {(q, r)}")
            if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > _TOL):
                raise ParameterError(f"CPT rows of {v!r} must be probability vectors")
            tables[v] = _readonly(t)
        self.cpts = tables

    @property
    def variables(self) -> tuple[str, ...]:
        return self.dag.variables

    def parents(self, v: str) -> tuple[str, ...]:
        """Parents of ``v`` in CPT row order."""
        try:
            return self._parents[v]
        except KeyError:
            raise IdentifierError(f"unknown variable {v!r}") from None

    def cardinality(self, v: str) -> int:
        try:
            return len(self.labels[v])
        except KeyError:
            raise IdentifierError(f"unknown variable {v!r}") from None

    def code(self, v: str, label: str) -> int:
        try:
            return self.labels[v].index(str(label))
        except KeyError:
            raise IdentifierError(f"unknown variable {v!r}") from None
        except ValueError:
            raise IdentifierError(f"label {label!r} not in domain of {v!r}") from None

    def factor(self, v: str) -> tuple[tuple[str, ...], np.ndarray]:
        """CPT of ``v`` as (variables, table) with one axis per variable."""
        pa = self._parents[v]
        shape = tuple(len(self.labels[p]) for p in pa) + (len(self.labels[v]),)
        return pa + (v,), self.cpts[v].reshape(shape)

    def to_dict(self) -> dict:
        doc = graph_to_dict(self.dag)
        doc["nodes"] = {
            v: {
                "cardinality": self.cardinality(v),
                "labels": list(self.labels[v]),
                "parents": list(self._parents[v]),
                "cpt": self.cpts[v].tolist(),
            }
            for v in self.dag.variables
        }
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DiscreteBayesNet":
        dag = graph_from_dict({k: doc[k] for k in ("variables", "directed_edges") if k in doc})
        nodes = doc["nodes"]
        for v in dag.variables:
            if len(nodes[v]["labels"]) != nodes[v]["cardinality"]:
                raise ParameterError(f"cardinality of {v!r} disagrees with its labels")
        return cls(dag, {v: nodes[v]["labels"] for v in dag.variables},
                   {v: np.array(nodes[v]["cpt"], dtype=float) for v in dag.variables})

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "DiscreteBayesNet":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, DiscreteBayesNet):
            return NotImplemented
        return (
            self.dag == other.dag
            and self.labels == other.labels
            and all(np.array_equal(self.cpts[v], other.cpts[v]) for v in self.dag.variables)
        )

    def __repr__(self):
        return f"DiscreteBayesNet({self.dag!r})"


def _cardinality_map(g: Dag, cardinalities) -> dict:
    if isinstance(cardinalities, Mapping):
        cards = {v: int(cardinalities[v]) for v in g.variables}
    else:
        cards = {v: int(cardinalities) for v in g.variables}
    if any(k < 2 for k in cards.values()):
        raise ParameterError("cardinalities must be at least 2")
    return cards


def dirichlet_parameterize(g: Dag, cardinalities=2, alpha: float = 1.0, seed: int = 0) -> DiscreteBayesNet:
    """Draw every CPT row independently from a symmetric Dirichlet(alpha)."""
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    cards = _cardinality_map(g, cardinalities)
    rng = np.random.default_rng(seed)
    cpts = {}
    for v in sorted(g.variables):
        q = int(np.prod([cards[p] for p in g.parents(v)], dtype=np.int64))
        rows = rng.dirichlet(np.full(cards[v], float(alpha)), size=q)
        cpts[v] = rows / rows.sum(axis=1, keepdims=True)
    labels = {v: [str(k) for k in range(cards[v])] for v in g.variables}
    return DiscreteBayesNet(g, labels, cpts)


def _parent_index(net: DiscreteBayesNet, v: str, columns: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    idx = np.zeros(n, dtype=np.int64)
    for p in net.parents(v):
        idx = idx * net.cardinality(p) + columns[p]
    return idx


def forward_sample(net: DiscreteBayesNet, n: int, seed: int = 0) -> Dataset:
    """``n`` i.i.d. records by ancestral sampling; deterministic given ``seed``."""
    if n < 0:
        raise ParameterError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    sampled: dict[str, np.ndarray] = {}
    for v in net.dag.topological_order():
        cum = np.cumsum(net.cpts[v], axis=1)
        rows = _parent_index(net, v, sampled, n)
        u = rng.random(n)
        draw = (u[:, None] >= cum[rows]).sum(axis=1)
        sampled[v] = np.minimum(draw, net.cardinality(v) - 1)
    columns = net.dag.variables
    codes = np.stack([sampled[v] for v in columns], axis=1) if n else np.empty((0, len(columns)))
    return Dataset(columns, net.labels, codes)


def intervene(net: DiscreteBayesNet, assignments: Mapping[str, str]) -> DiscreteBayesNet:
    """Graph surgery: cut edges into each assigned variable and fix its value."""
    codes = {v: net.code(v, t) for v, t in assignments.items()}
    removed = [(p, v) for v in codes for p in net.dag.parents(v)]
    dag = net.dag.with_edges(remove=removed)
    cpts = dict(net.cpts)
    for v, k in codes.items():
        row = np.zeros((1, net.cardinality(v)))
        row[0, k] = 1.0
        cpts[v] = row
    return DiscreteBayesNet(dag, net.labels, cpts)


class _Factor:
    __slots__ = ("vars", "table")

    def __init__(self, variables, table):
        self.vars = tuple(variables)
        self.table = table

    def aligned(self, order):
        """Table broadcast against the axis layout ``order``."""
        present = [v for v in order if v in self.vars]
        t = np.transpose(self.table, [self.vars.index(v) for v in present])
        sizes = dict(zip(present, t.shape))
        return t.reshape([sizes.get(v, 1) for v in order])

    def reduce(self, var, code):
        ax = self.vars.index(var)
        return _Factor(self.vars[:ax] + self.vars[ax + 1:], np.take(self.table, code, axis=ax))


def _multiply(factors):
    order = []
    for f in factors:
        order.extend(v for v in f.vars if v not in order)
    out = np.ones([1] * len(order))
    for f in factors:
        out = out * f.aligned(order)
    return _Factor(order, out)


def _elimination_order(factors, keep):
    """Greedy min-degree order on the interaction graph; ties lexicographic."""
    nbrs: dict[str, set] = {}
    for f in factors:
        for v in f.vars:
            nbrs.setdefault(v, set()).update(u for u in f.vars if u != v)
    remaining = set(nbrs) - {keep}
    order = []
    while remaining:
        v = min(remaining, key=lambda u: (len(nbrs[u]), u))
        order.append(v)
        for a in nbrs[v]:
            nbrs[a].discard(v)
            nbrs[a].update(b for b in nbrs[v] if b != a)
        del nbrs[v]
        remaining.discard(v)
    return order


def query(net: DiscreteBayesNet, target: str, evidence: Mapping[str, str] | None = None) -> CategoricalDistribution:
    """Exact ``P(target | evidence)`` by variable elimination."""
    evidence = dict(evidence or {})
    net.cardinality(target)
    if target in evidence:
        raise ParameterError("target must not be in the evidence")
    ev_codes = {v: net.code(v, t) for v, t in evidence.items()}
    relevant = net.dag.ancestors([target, *ev_codes])
    factors = []
    for v in sorted(relevant):
        f = _Factor(*net.factor(v))
        for e, k in ev_codes.items():
            if e in f.vars:
                f = f.reduce(e, k)
        factors.append(f)
    for v in _elimination_order(factors, target):
        touching = [f for f in factors if v in f.vars]
        factors = [f for f in factors if v not in f.vars]
        prod = _multiply(touching)
        ax = prod.vars.index(v)
        factors.append(_Factor(prod.vars[:ax] + prod.vars[ax + 1:], prod.table.sum(axis=ax)))
    final = _multiply(factors)
    table = final.aligned([target]).reshape(-1)
    z = table.sum()
    if not z > 0:
        raise ZeroProbabilityEvidenceError(f"evidence {evidence} has probability zero")
    return CategoricalDistribution(net.labels[target], table / z)


def interventional_distribution(net: DiscreteBayesNet, outcome: str, treatment: str, t: str) -> CategoricalDistribution:
    """``P(outcome | do(treatment = t))``."""
    if outcome == treatment:
        raise ParameterError("outcome and treatment must differ")
    return query(intervene(net, {treatment: t}), outcome, {treatment: t})


def fit_parameters(g: Dag, data: Dataset, smoothing: float = 1.0) -> DiscreteBayesNet:
    """Smoothed maximum-likelihood CPTs: (count + s) / (row_total + s * r)."""
    if smoothing < 0:
        raise ParameterError("smoothing must be nonnegative")
    cpts = {}
    for v in g.variables:
        pa = tuple(sorted(g.parents(v)))
        cols = [data.index(p) for p in pa] + [data.index(v)]
        cards = [data.cardinality(p) for p in pa] + [data.cardinality(v)]
        counts = kernels.contingency(data.codes, cols, cards).reshape(-1, cards[-1]).astype(float)
        totals = counts.sum(axis=1, keepdims=True)
        denom = totals + smoothing * cards[-1]
        if np.any(denom == 0):
            raise UndefinedRowError(f"{v!r} has an unobserved parent configuration and smoothing is 0")
        cpts[v] = (counts + smoothing) / denom
    labels = {v: data.labels[v] for v in g.variables}
    return DiscreteBayesNet(g, labels, cpts)
