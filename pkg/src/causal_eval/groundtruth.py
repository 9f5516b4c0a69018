"""Ground truth from factorial data: Friedman tests, consistent DAGs, do-distributions."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import chi2, rankdata

from .bayesnet import CategoricalDistribution
from .errors import ParameterError
from .graph import Dag
from .obsbias import FactorialDataset

__all__ = [
    "LedgerEntry",
    "EffectLedger",
    "friedman_statistic",
    "friedman_test",
    "consistent_dag",
    "empirical_do_distribution",
]


def friedman_statistic(blocks) -> tuple[float, float]:
    """Friedman chi-square for an (n_blocks, k_treatments) matrix.

    Ranks within each block use mid-ranks for ties; the statistic is divided
    by the usual tie correction. A matrix tied within every block gives 0.
    """
    x = np.asarray(blocks, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ParameterError("need at least two blocks")
    n, k = x.shape
    if k < 2:
        raise ParameterError("need at least two treatment arms")
    ranks = np.apply_along_axis(rankdata, 1, x)
    rbar = ranks.mean(axis=0)
    q = 12.0 * n / (k * (k + 1)) * np.sum((rbar - (k + 1) / 2.0) ** 2)
    ties = 0.0
    for row in x:
        _, counts = np.unique(row, return_counts=True)
        ties += np.sum(counts ** 3 - counts)
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 1e-12:
        return 0.0, 1.0
    q = q / correction
    return float(q), float(chi2.sf(q, k - 1))


def friedman_test(data: FactorialDataset, treatment: str, outcome: str) -> tuple[float, float]:
    """Blocked test of whether ``treatment`` shifts ``outcome``.

    Subjects are blocks and the two treatment arms are the repeated
    measures; each (subject, arm) cell is the mean outcome score over the
    other treatments and all trials.
    """
    if data.role(treatment) != "treatment":
        raise ParameterError(f"{treatment!r} is not a treatment")
    if data.role(outcome) == "treatment":
        raise ParameterError(f"{outcome!r} is a treatment")
    if len(data.subjects) < 2:
        raise ParameterError("friedman_test needs at least two subjects")
    subj_index = {s: i for i, s in enumerate(data.subjects)}
    block = np.array([subj_index[s] for s in data.subject_ids])
    arm = data.values(treatment)
    score = data.ordinal(outcome)
    n = len(data.subjects)
    sums = np.zeros((n, 2))
    counts = np.zeros((n, 2))
    np.add.at(sums, (block, arm), score)
    np.add.at(counts, (block, arm), 1)
    return friedman_statistic(sums / counts)


@dataclass(frozen=True)
class LedgerEntry:
    treatment: str
    outcome: str
    statistic: float
    p_value: float
    causally_related: bool


@dataclass
class EffectLedger:
    """Friedman decisions for every (treatment, outcome) pair."""

    alpha: float
    entries: list = field(default_factory=list)

    def related_pairs(self) -> list[tuple[str, str]]:
        return [(e.treatment, e.outcome) for e in self.entries if e.causally_related]

    def to_csv(self, path=None) -> str | None:
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(("treatment", "outcome", "statistic", "p_value", "causally_related"))
        for e in self.entries:
            w.writerow((e.treatment, e.outcome, repr(e.statistic), repr(e.p_value), str(e.causally_related).lower()))
        if path is None:
            return buf.getvalue()
        Path(path).write_text(buf.getvalue(), newline="")
        return None


def consistent_dag(data: FactorialDataset, biasing_covariate: str, alpha: float = 0.05) -> tuple[Dag, EffectLedger]:
    """Three-layer DAG: covariate -> every treatment -> related outcomes.

    A treatment-outcome edge is added when the Friedman test rejects at
    ``alpha``. No covariate -> outcome edges are added.
    """
    if biasing_covariate not in data.covariates:
        raise ParameterError(f"{biasing_covariate!r} is not a covariate")
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    ledger = EffectLedger(alpha)
    edges = [(biasing_covariate, t) for t in data.treatments]
    for t in data.treatments:
        for o in data.outcomes:
            q, p = friedman_test(data, t, o)
            related = p < alpha
            ledger.entries.append(LedgerEntry(t, o, q, p, related))
            if related:
                edges.append((t, o))
    variables = (biasing_covariate,) + data.treatments + data.outcomes
    return Dag(variables, edges), ledger


def empirical_do_distribution(data: FactorialDataset, outcome: str, treatment: str, t) -> CategoricalDistribution:
    """Relative frequency of each outcome category among grid records with ``treatment = t``.

    The grid assigns treatments exhaustively, so this is an unconfounded
    estimate of ``P(outcome | do(treatment = t))``.
    """
    if data.role(treatment) != "treatment":
        raise ParameterError(f"{treatment!r} is not a treatment")
    if data.kinds[outcome] != "categorical":
        raise ParameterError(f"{outcome!r} must be discretized first")
    t = int(t)
    sel = data.values(outcome)[data.values(treatment) == t]
    if len(sel) == 0:
        raise ParameterError(f"no records with {treatment} = {t}")
    counts = np.bincount(sel, minlength=len(data.domains[outcome]))
    return CategoricalDistribution(data.domains[outcome], counts / counts.sum())
