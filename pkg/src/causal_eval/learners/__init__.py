"""Structure learners evaluated by the harness: ``pc``, ``ges``, ``mmhc``."""

from .citest import CiDecision, g2_test
from .config import LearnerConfig
from .ges import ges, ges_trace
from .mmhc import mmhc, mmpc_skeleton, mmhc_trace
from .pc import pc
from .score import BDeuScorer, bdeu_score

LEARNERS = {"pc": pc, "ges": ges, "mmhc": mmhc}


def run_learner(name: str, data, config: LearnerConfig = LearnerConfig()):
    """Dispatch by CLI-facing learner name."""
    try:
        fn = LEARNERS[name]
    except KeyError:
        raise KeyError(f"unknown learner {name!r}; expected one of {sorted(LEARNERS)}") from None
    return fn(data, config)


__all__ = [
    "CiDecision",
    "LearnerConfig",
    "BDeuScorer",
    "LEARNERS",
    "bdeu_score",
    "g2_test",
    "ges",
    "ges_trace",
    "mmhc",
    "mmpc_skeleton",
    "mmhc_trace",
    "pc",
    "run_learner",
]
