"""G^2 likelihood-ratio conditional-independence test for categorical data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.stats import chi2

from .. import kernels
from ..bayesnet import Dataset
from ..errors import ParameterError


@dataclass(frozen=True)
class CiDecision:
    statistic: float
    p_value: float
    independent: bool
    degrees_of_freedom: int
    low_power: bool = False


def g2_counts(data: Dataset, x: str, y: str, z: Iterable[str] = ()) -> np.ndarray:
    """Contingency table with axes (z-configuration, x, y)."""
    z = list(z)
    cols = [data.index(v) for v in (*z, x, y)]
    cards = [data.cardinality(v) for v in (*z, x, y)]
    counts = kernels.contingency(data.codes, cols, cards)
    return counts.reshape(-1, cards[-2], cards[-1])


def g2_test(data: Dataset, x: str, y: str, z: Iterable[str] = (), alpha: float = 0.05) -> CiDecision:
    """Test ``x`` independent of ``y`` given ``z``.

    Degrees of freedom count only strata of ``z`` that contain observations.
    The decision is still returned when there are fewer than ``10 * df``
    samples, with ``low_power`` set.
    """
    z = sorted(set(z))
    if x == y:
        raise ParameterError("x and y must differ")
    if x in z or y in z:
        raise ParameterError("x and y must not appear in the conditioning set")
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    counts = g2_counts(data, x, y, z)
    stat, strata = kernels.g2_statistic(counts)
    stat = max(stat, 0.0)
    df = strata * (counts.shape[1] - 1) * (counts.shape[2] - 1)
    p = float(chi2.sf(stat, df)) if df > 0 else 1.0
    return CiDecision(stat, p, p > alpha, df, data.n_rows < 10 * df)


def g2_log_p_value(decision: CiDecision) -> float:
    """Log p-value without underflow, for ranking strong dependencies."""
    if decision.degrees_of_freedom == 0:
        return 0.0
    return float(chi2.logsf(decision.statistic, decision.degrees_of_freedom))
