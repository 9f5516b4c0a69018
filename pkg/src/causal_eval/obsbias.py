"""Factorial experiment data and its conversion to pseudo-observational data.

A factorial dataset measures every subject under every assignment of the
binary treatments, possibly over several trials. ``logistic_bias_sample``
keeps one assignment per subject, chosen with covariate-dependent
probabilities, which emulates treatment self-selection.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.special import expit

from .bayesnet import Dataset, _read_raw, sort_labels
from .errors import (
    CompletenessError,
    DuplicationError,
    IdentifierError,
    NormalizationError,
    ParameterError,
    SchemaError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "FactorialDataset",
    "load_factorial_csv",
    "covariate_codes",
    "treatment_sign",
    "logistic_bias_sample",
    "prepare_dataset",
    "equal_frequency_bins",
]

ROLES = ("covariate", "treatment", "outcome")
KINDS = ("categorical", "continuous")


class FactorialDataset:
    """Complete subjects x treatment-assignments x trials grid.

    Parameters
    ----------
    covariates, treatments, outcomes : sequence of str
        Column names by role. Treatment order defines the index ``j`` used by
        the biasing rule (first treatment is ``j = 1``).
    data : mapping of column name to sequence
        Must also hold ``subject_id`` and ``trial``.
    kinds : mapping, optional
        ``categorical`` or ``continuous`` per covariate/outcome column;
        inferred from the values when absent.
    domains : mapping, optional
        Ordered labels of categorical columns; inferred when absent.
    """

    def __init__(
        self,
        covariates: Sequence[str],
        treatments: Sequence[str],
        outcomes: Sequence[str],
        data: Mapping[str, Sequence],
        kinds: Mapping[str, str] | None = None,
        domains: Mapping[str, Sequence[str]] | None = None,
    ):
        self.covariates = tuple(covariates)
        self.treatments = tuple(treatments)
        self.outcomes = tuple(outcomes)
        names = self.covariates + self.treatments + self.outcomes
        if len(set(names)) != len(names) or {"subject_id", "trial"} & set(names):
            raise SchemaError("column names must be unique and distinct from subject_id/trial")
        if not self.treatments:
            raise SchemaError("at least one treatment column is required")
        for col in ("subject_id", "trial", *names):
            if col not in data:
                raise SchemaError(f"missing column {col!r}")
        kinds = dict(kinds or {})
        domains = dict(domains or {})

        self.subject_ids = np.array([str(s) for s in data["subject_id"]], dtype=object)
        n = len(self.subject_ids)
        self.trial = np.asarray(data["trial"], dtype=np.int64)
        self._values: dict = {}
        self.kinds: dict = {}
        self.domains: dict = {}
        for t in self.treatments:
            raw = [str(v) for v in data[t]]
            if not set(raw) <= {"0", "1"}:
                raise SchemaError(f"treatment {t!r} must take values 0 and 1")
            self._values[t] = np.array([int(v) for v in raw], dtype=np.int64)
            self.kinds[t] = "categorical"
            self.domains[t] = ("0", "1")
        for col in self.covariates + self.outcomes:
            values = list(data[col])
            kind = kinds.get(col) or _infer_kind(values)
            if kind not in KINDS:
                raise SchemaError(f"unknown kind {kind!r} for {col!r}")
            self.kinds[col] = kind
            if kind == "continuous":
                try:
                    self._values[col] = np.array([float(v) for v in values], dtype=float)
                except ValueError:
                    raise SchemaError(f"non-numeric value in continuous column {col!r}") from None
            else:
                strs = [str(v) for v in values]
                dom = tuple(str(v) for v in domains[col]) if col in domains else sort_labels(strs)
                lookup = {lab: k for k, lab in enumerate(dom)}
                try:
                    self._values[col] = np.array([lookup[s] for s in strs], dtype=np.int64)
                except KeyError as exc:
                    raise SchemaError(f"value {exc.args[0]!r} outside the domain of {col!r}") from None
                self.domains[col] = dom
        for col, arr in self._values.items():
            if len(arr) != n or len(self.trial) != n:
                raise SchemaError(f"column {col!r} has the wrong length")

        self.subjects = tuple(dict.fromkeys(self.subject_ids.tolist()))
        self.trials = tuple(sorted(set(self.trial.tolist())))
        assign = np.stack([self._values[t] for t in self.treatments], axis=1)
        self._assign = assign
        self._cells: dict = {}
        for i in range(n):
            key = (self.subject_ids[i], tuple(assign[i].tolist()), int(self.trial[i]))
            if key in self._cells:
                raise DuplicationError(f"duplicate cell (subject, assignment, trial) = {key}")
            self._cells[key] = i
        for s in self.subjects:
            for a in itertools.product((0, 1), repeat=len(self.treatments)):
                for tr in self.trials:
                    if (s, a, tr) not in self._cells:
                        raise CompletenessError(
                            f"missing cell subject={s!r} assignment={dict(zip(self.treatments, a))} trial={tr}"
                        )
        first = {s: self._cells[(s, (0,) * len(self.treatments), self.trials[0])] for s in self.subjects}
        for c in self.covariates:
            vals = self._values[c]
            for i in range(n):
                if vals[i] != vals[first[self.subject_ids[i]]]:
                    raise SchemaError(f"covariate {c!r} varies within subject {self.subject_ids[i]!r}")
        self._first = first

    # access -----------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self.subject_ids)

    @property
    def columns(self) -> tuple[str, ...]:
        return self.covariates + self.treatments + self.outcomes

    def role(self, column: str) -> str:
        if column in self.covariates:
            return "covariate"
        if column in self.treatments:
            return "treatment"
        if column in self.outcomes:
            return "outcome"
        raise IdentifierError(f"unknown column {column!r}")

    def values(self, column: str) -> np.ndarray:
        """Raw column: floats for continuous columns, domain codes otherwise."""
        self.role(column)
        return self._values[column]

    def labels_of(self, column: str) -> list[str]:
        if self.kinds[column] == "continuous":
            return [repr(float(v)) for v in self._values[column]]
        dom = self.domains[column]
        return [dom[k] for k in self._values[column]]

    def cell(self, subject: str, assignment: Sequence[int], trial: int) -> int:
        """Row index of a (subject, assignment, trial) cell."""
        key = (str(subject), tuple(int(a) for a in assignment), int(trial))
        try:
            return self._cells[key]
        except KeyError:
            raise CompletenessError(f"missing cell {key}") from None

    def subject_value(self, subject: str, covariate: str):
        if covariate not in self.covariates:
            raise IdentifierError(f"{covariate!r} is not a covariate")
        return self._values[covariate][self._first[subject]]

    def ordinal(self, column: str) -> np.ndarray:
        """Numeric scores for ranking: floats, or domain position for categories."""
        return np.asarray(self.values(column), dtype=float)

    def to_dataset(self, rows=None, columns: Sequence[str] | None = None) -> Dataset:
        """Categorical records for the given row indices."""
        columns = tuple(columns or self.columns)
        rows = np.arange(self.n_rows) if rows is None else np.asarray(rows, dtype=np.int64)
        labels, codes = {}, []
        for c in columns:
            self.role(c)
            if self.kinds[c] == "continuous":
                strs = np.array(self.labels_of(c), dtype=object)
                labels[c] = sort_labels(strs.tolist())
                lookup = {lab: k for k, lab in enumerate(labels[c])}
                codes.append(np.array([lookup[s] for s in strs[rows]], dtype=np.int64))
            else:
                labels[c] = self.domains[c]
                codes.append(self._values[c][rows])
        arr = np.stack(codes, axis=1) if columns else np.empty((len(rows), 0))
        return Dataset(columns, labels, arr)

    def replace(self, values: Mapping[str, Sequence], kinds=None, domains=None) -> "FactorialDataset":
        """Copy with some columns replaced."""
        data = {"subject_id": self.subject_ids, "trial": self.trial}
        new_kinds, new_domains = dict(self.kinds), dict(self.domains)
        for c in self.columns:
            data[c] = values[c] if c in values else self.labels_of(c) if self.kinds[c] == "categorical" else self._values[c]
        for c in values:
            new_domains.pop(c, None)
        new_kinds.update(kinds or {})
        new_domains.update(domains or {})
        return FactorialDataset(self.covariates, self.treatments, self.outcomes, data, new_kinds, new_domains)

    # I/O --------------------------------------------------------------------

    def sidecar(self) -> dict:
        cols = []
        for c in self.columns:
            entry = {"name": c, "role": self.role(c), "type": self.kinds[c]}
            if self.kinds[c] == "categorical":
                entry["domain"] = list(self.domains[c])
            cols.append(entry)
        return {"columns": cols}

    def to_csv_text(self) -> str:
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(("subject_id", "trial") + self.columns)
        rendered = [self.labels_of(c) for c in self.columns]
        for i in range(self.n_rows):
            writer.writerow([self.subject_ids[i], str(int(self.trial[i]))] + [col[i] for col in rendered])
        return buf.getvalue()

    def write(self, csv_path, sidecar_path) -> None:
        Path(csv_path).write_text(self.to_csv_text(), newline="")
        Path(sidecar_path).write_text(json.dumps(self.sidecar(), indent=2) + "\n")

    def __eq__(self, other):
        if not isinstance(other, FactorialDataset):
            return NotImplemented
        return (
            self.sidecar() == other.sidecar()
            and np.array_equal(self.subject_ids, other.subject_ids)
            and np.array_equal(self.trial, other.trial)
            and all(np.array_equal(self._values[c], other._values[c]) for c in self.columns)
        )

    def __repr__(self):
        return (f"FactorialDataset({len(self.subjects)} subjects, {len(self.treatments)} treatments, "
                f"{len(self.outcomes)} outcomes, {len(self.trials)} trials)")


def _infer_kind(values) -> str:
    try:
        [float(v) for v in values]
    except (TypeError, ValueError):
        return "categorical"
    return "continuous"


def load_factorial_csv(csv_path, sidecar_path) -> FactorialDataset:
    """Read and validate a factorial CSV plus its JSON role sidecar."""
    try:
        doc = json.loads(Path(sidecar_path).read_text())
        entries = doc["columns"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SchemaError(f"{sidecar_path}: malformed sidecar ({exc})") from None
    text = _read_raw(csv_path)
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{csv_path}: empty file") from None
    rows = [r for r in reader if r]
    for k, r in enumerate(rows):
        if len(r) != len(header):
            raise SchemaError(f"{csv_path}: row {k + 2} has {len(r)} cells, expected {len(header)}")
    if header[:2] != ["subject_id", "trial"]:
        raise SchemaError(f"{csv_path}: header must start with subject_id, trial")
    declared = {e.get("name") for e in entries}
    for col in header[2:]:
        if col not in declared:
            raise SchemaError(f"{sidecar_path}: no role declared for column {col!r}")
    roles = {r: [] for r in ROLES}
    kinds, domains = {}, {}
    for e in entries:
        name, role = e.get("name"), e.get("role")
        if role not in ROLES:
            raise SchemaError(f"{sidecar_path}: column {name!r} has invalid role {role!r}")
        if name not in header:
            raise SchemaError(f"{csv_path}: declared column {name!r} is absent")
        roles[role].append(name)
        if "type" in e:
            kinds[name] = e["type"]
        if "domain" in e:
            domains[name] = e["domain"]
    expected = ["subject_id", "trial"] + roles["covariate"] + roles["treatment"] + roles["outcome"]
    if header != expected:
        raise SchemaError(f"{csv_path}: column order must be {expected}")
    columns = list(zip(*rows)) if rows else [[] for _ in header]
    data = {name: list(col) for name, col in zip(header, columns)}
    try:
        data["trial"] = [int(v) for v in data["trial"]]
    except ValueError:
        raise SchemaError(f"{csv_path}: non-integer trial index") from None
    return FactorialDataset(roles["covariate"], roles["treatment"], roles["outcome"], data, kinds, domains)


def covariate_codes(data: FactorialDataset, covariate: str) -> dict:
    """Map each subject to its covariate code in ``1..l``.

    Distinct values are sorted numerically when possible, else lexically.
    """
    if covariate not in data.covariates:
        raise IdentifierError(f"{covariate!r} is not a covariate of the dataset")
    if data.kinds[covariate] == "continuous":
        values = {s: float(data.subject_value(s, covariate)) for s in data.subjects}
        order = sorted(set(values.values()))
    else:
        dom = data.domains[covariate]
        values = {s: dom[data.subject_value(s, covariate)] for s in data.subjects}
        order = list(sort_labels(values.values()))
    code = {v: k + 1 for k, v in enumerate(order)}
    return {s: code[v] for s, v in values.items()}


def treatment_sign(covariate_code: int, j: int) -> int:
    """+1 when ``covariate_code * j`` is even, -1 when odd."""
    return 1 if (covariate_code * j) % 2 == 0 else -1


def logistic_bias_sample(
    data: FactorialDataset,
    beta: float,
    covariate: str,
    seed: int = 0,
    mode: str = "single",
) -> Dataset:
    """Pseudo-observational sample with covariate-driven treatment selection.

    For each subject and treatment ``j`` (1-based), the treatment is set to 1
    with probability ``expit(s * beta)`` where ``s`` is the parity sign of
    ``covariate_code * j``. The record for the drawn assignment is emitted
    for one uniformly chosen trial (``mode="single"``) or for every trial
    (``mode="all_trials"``).
    """
    if beta < 0:
        raise ParameterError("beta must be nonnegative")
    if mode not in ("single", "all_trials"):
        raise ParameterError(f"unknown mode {mode!r}")
    codes = covariate_codes(data, covariate)
    m = len(data.treatments)
    rng = np.random.default_rng(seed)
    signs = np.array(
        [[treatment_sign(codes[s], j) for j in range(1, m + 1)] for s in data.subjects], dtype=float
    ).reshape(len(data.subjects), m)
    probs = expit(signs * beta)
    assignments = (rng.random(probs.shape) < probs).astype(np.int64)
    rows = []
    if mode == "single":
        picks = rng.integers(len(data.trials), size=len(data.subjects))
        for s, a, k in zip(data.subjects, assignments, picks):
            rows.append(data.cell(s, a, data.trials[k]))
    else:
        for s, a in zip(data.subjects, assignments):
            rows.extend(data.cell(s, a, tr) for tr in data.trials)
    return data.to_dataset(rows)


def equal_frequency_bins(values: np.ndarray, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Codes ``0..k-1`` from quantile boundaries; returns (codes, boundaries).

    Boundaries sit at the ``i / bins`` quantiles of ``values``; a value equal
    to a boundary goes to the upper bin. Empty bins are dropped, so ``k`` can
    be smaller than ``bins`` when values are heavily tied.
    """
    if bins < 2:
        raise ParameterError("bins must be at least 2")
    values = np.asarray(values, dtype=float)
    edges = np.unique(np.quantile(values, np.arange(1, bins) / bins))
    raw = np.searchsorted(edges, values, side="right")
    used = np.unique(raw)
    remap = np.full(len(edges) + 1, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return remap[raw], edges


def prepare_dataset(
    data: FactorialDataset,
    bins: int = 3,
    control_assignment: Mapping[str, int] | None = None,
) -> FactorialDataset:
    """Normalize continuous outcomes by their control median, then discretize.

    Boundaries are computed once over the full grid. Continuous covariates
    are discretized the same way without normalization. Categorical columns
    pass through.
    """
    if bins < 2:
        raise ParameterError("bins must be at least 2")
    control = dict(control_assignment or {t: 0 for t in data.treatments})
    if set(control) != set(data.treatments) or not set(control.values()) <= {0, 1}:
        raise ParameterError("control assignment must give 0/1 for every treatment")
    mask = np.ones(data.n_rows, dtype=bool)
    for t, v in control.items():
        mask &= data.values(t) == v
    if not mask.any():
        raise ParameterError("control assignment not present in the grid")

    replaced, kinds, domains = {}, {}, {}
    for col in data.outcomes + data.covariates:
        if data.kinds[col] != "continuous":
            continue
        x = data.values(col)
        if col in data.outcomes:
            median = float(np.median(x[mask]))
            if median == 0:
                raise NormalizationError(f"outcome {col!r} has a zero control median")
            x = x / median
        codes, _ = equal_frequency_bins(x, bins)
        k = int(codes.max()) + 1 if len(codes) else 1
        if k == 1:
            logger.warning("column %r is constant; discretized to a single category", col)
        dom = tuple(str(i) for i in range(k))
        replaced[col] = [dom[c] for c in codes]
        kinds[col] = "categorical"
        domains[col] = dom
    return data.replace(replaced, kinds, domains)
