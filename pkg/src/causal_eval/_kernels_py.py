"""Pure-numpy implementations of the counting and scoring kernels."""

import numpy as np
from scipy.special import gammaln


def contingency(codes, cols, cards):
    size = int(np.prod(cards)) if len(cards) else 1
    if len(cols) == 0:
        return np.array([codes.shape[0]], dtype=np.int64)
    idx = np.ravel_multi_index(tuple(codes[:, c] for c in cols), tuple(cards))
    return np.bincount(idx, minlength=size).astype(np.int64)


def bdeu_family(counts, ess):
    q, r = counts.shape
    a_j = ess / q
    a_jk = ess / (q * r)
    n_j = counts.sum(axis=1)
    observed = counts[counts > 0]
    score = np.sum(gammaln(a_jk + observed) - gammaln(a_jk))
    seen = n_j[n_j > 0]
    score += np.sum(gammaln(a_j) - gammaln(a_j + seen))
    return float(score)


def g2_statistic(counts):
    n_s = counts.sum(axis=(1, 2))
    rows = counts.sum(axis=2)
    cols = counts.sum(axis=1)
    expected = rows[:, :, None] * cols[:, None, :] / np.where(n_s > 0, n_s, 1)[:, None, None]
    mask = counts > 0
    stat = 2.0 * np.sum(counts[mask] * np.log(counts[mask] / expected[mask]))
    return float(stat), int(np.count_nonzero(n_s))
