"""Evaluation harness for causal structure learners on discrete data.

Submodules
----------
graph        DAG/CPDAG structures, d-separation, Meek orientation
bayesnet     discrete Bayesian networks, sampling, exact inference
learners     PC, GES and MMHC structure learners
metrics      SHD, SID and TVD
obsbias      factorial datasets and covariate-driven sub-sampling
groundtruth  Friedman tests and consistent reference DAGs
datagen      synthetic benchmarks and model alteration
bench        experiment runner, reports and the ``causal-eval`` CLI
"""

from .bayesnet import (
    CategoricalDistribution,
    Dataset,
    DiscreteBayesNet,
    dirichlet_parameterize,
    fit_parameters,
    forward_sample,
    interventional_distribution,
    intervene,
    query,
)
from .graph import Dag, Pdag, cpdag_of, consistent_extension, d_separated, random_dag
from .kernels import BACKEND
from .learners import LearnerConfig, ges, mmhc, pc, run_learner
from .metrics import shd, sid, tvd

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CategoricalDistribution",
    "Dag",
    "Dataset",
    "DiscreteBayesNet",
    "LearnerConfig",
    "Pdag",
    "consistent_extension",
    "cpdag_of",
    "d_separated",
    "dirichlet_parameterize",
    "fit_parameters",
    "forward_sample",
    "ges",
    "interventional_distribution",
    "intervene",
    "mmhc",
    "pc",
    "query",
    "random_dag",
    "run_learner",
    "shd",
    "sid",
    "tvd",
]
