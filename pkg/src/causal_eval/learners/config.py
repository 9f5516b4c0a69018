from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import ParameterError


@dataclass(frozen=True)
class LearnerConfig:
    """Hyperparameters shared by the structure learners.

    ``max_cond_set=None`` means unbounded for up to 15 variables and 3
    beyond that.
    """

    alpha: float = 0.05
    ess: float = 10.0
    max_cond_set: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ParameterError("alpha must lie in (0, 1)")
        if not self.ess > 0:
            raise ParameterError("ess must be positive")
        if self.max_cond_set is not None and self.max_cond_set < 0:
            raise ParameterError("max_cond_set must be nonnegative")

    def cond_cap(self, n_vars: int) -> int:
        if self.max_cond_set is not None:
            return self.max_cond_set
        return n_vars if n_vars <= 15 else 3
