"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``CAUSAL_EVAL_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("CAUSAL_EVAL_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

__all__ = ["BACKEND", "contingency", "bdeu_family", "g2_statistic"]


def contingency(codes, cols, cards, impl=None):
    """Joint counts of ``codes[:, cols]`` as a flat row-major vector.

    ``codes`` is an (n, m) int64 array of category codes; ``cards`` gives the
    cardinality of each selected column.
    """
    impl = impl or _impl
    return impl.contingency(
        np.ascontiguousarray(codes, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(cards, dtype=np.int64),
    )


def bdeu_family(counts, ess, impl=None):
    """BDeu log marginal likelihood of one family from its (q, r) counts."""
    impl = impl or _impl
    return impl.bdeu_family(np.ascontiguousarray(counts, dtype=np.int64), float(ess))


def g2_statistic(counts, impl=None):
    """G^2 statistic and number of non-empty strata from (nz, nx, ny) counts."""
    impl = impl or _impl
    return impl.g2_statistic(np.ascontiguousarray(counts, dtype=np.int64))
