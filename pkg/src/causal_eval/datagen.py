"""Experiment-level data generation."""

from __future__ import annotations

import itertools
import logging
from typing import Mapping, Sequence

import numpy as np

from .bayesnet import Dataset, DiscreteBayesNet, dirichlet_parameterize, fit_parameters, forward_sample
from .errors import AlterationError, IdentifierError, ParameterError
from .graph import Dag, Pdag, extend_or_repair, random_dag
from .learners import LearnerConfig, run_learner
from .obsbias import FactorialDataset

logger = logging.getLogger(__name__)

__all__ = [
    "derive_seed",
    "synthetic_benchmark",
    "synthetic_from_empirical",
    "alter_model",
    "synthesize_factorial",
]


def derive_seed(master_seed: int, *keys: int) -> int:
    """Independent 32-bit seed for a cell identified by integer ``keys``."""
    seq = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFF, *[int(k) for k in keys]])
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def synthetic_benchmark(
    n_dags: int,
    n_vars: int,
    expected_neighbors: float,
    n_samples: int,
    alpha_dirichlet: float = 1.0,
    seed: int = 0,
    cardinality: int = 2,
) -> list[tuple[DiscreteBayesNet, Dataset]]:
    """Random DAGs with Dirichlet CPTs and forward-sampled data, one per index."""
    if n_dags < 0 or n_vars < 1 or n_samples < 0:
        raise ParameterError("counts must be nonnegative (n_vars positive)")
    out = []
    for i in range(n_dags):
        g = random_dag(n_vars, expected_neighbors, derive_seed(seed, i, 0))
        net = dirichlet_parameterize(g, cardinality, alpha_dirichlet, derive_seed(seed, i, 1))
        out.append((net, forward_sample(net, n_samples, derive_seed(seed, i, 2))))
    return out


def synthetic_from_empirical(
    data: Dataset,
    learner: str,
    config: LearnerConfig = LearnerConfig(),
    n_samples: int | None = None,
    seed: int = 0,
    smoothing: float = 1.0,
) -> tuple[DiscreteBayesNet, Dataset]:
    """Learn a model from ``data``, fit it on ``data``, and sample from it.

    ``n_samples`` defaults to the size of ``data``.
    """
    learned = run_learner(learner, data, config)
    if isinstance(learned, Pdag):
        dag, repaired = extend_or_repair(learned)
        if repaired:
            logger.warning("%s output had no consistent extension; re-oriented acyclically", learner)
    else:
        dag = learned
    net = fit_parameters(dag, data, smoothing)
    n = data.n_rows if n_samples is None else n_samples
    return net, forward_sample(net, n, seed)


def alter_model(
    net: DiscreteBayesNet,
    treatment: str,
    outcomes: Sequence[str],
    mode: str,
    data: Dataset,
    smoothing: float = 1.0,
) -> DiscreteBayesNet:
    """Over- or under-specify the effects of ``treatment`` and refit.

    ``overspecify`` adds ``treatment -> o`` for every listed outcome;
    ``underspecify`` removes every outgoing edge of ``treatment``. The CPTs
    of all outcomes and former children of the treatment are refitted on
    ``data``; other CPTs are kept.
    """
    g = net.dag
    if treatment not in g.variables:
        raise IdentifierError(f"unknown variable {treatment!r}")
    for o in outcomes:
        if o not in g.variables:
            raise IdentifierError(f"unknown variable {o!r}")
    children = set(g.children(treatment))
    if mode == "overspecify":
        add = [(treatment, o) for o in outcomes if o not in children and o != treatment]
        for _, o in add:
            if o in g.ancestors([treatment]):
                raise AlterationError(f"adding {treatment} -> {o} would create a cycle")
        new_g = g.with_edges(add=add)
    elif mode == "underspecify":
        new_g = g.with_edges(remove=[(treatment, c) for c in children])
    else:
        raise ParameterError(f"unknown alteration mode {mode!r}")
    affected = set(outcomes) | children
    refit = fit_parameters(new_g, data, smoothing)
    cpts = {v: refit.cpts[v] if v in affected else net.cpts[v] for v in new_g.variables}
    return DiscreteBayesNet(new_g, net.labels, cpts)


def synthesize_factorial(
    n_subjects: int,
    n_treatments: int = 3,
    n_outcomes: int = 3,
    n_trials: int = 1,
    effects: Mapping[tuple[str, str], float] | None = None,
    covariate_levels: int = 3,
    covariate_effect: float = 0.0,
    effect_strength: float = 1.5,
    subject_sd: float = 0.5,
    noise_sd: float = 0.5,
    seed: int = 0,
) -> tuple[FactorialDataset, dict]:
    """Factorial fixture from a known covariate/treatment/outcome model.

    Each outcome is log-normal::

        log y = base_o + u_subject + covariate_effect * code
                + sum_j effect[T_j, O] * t_j + noise

    with subject effects ``u ~ N(0, subject_sd)`` shared across the grid, so
    the Friedman test sees within-subject contrasts. When ``effects`` is not
    given, every treatment gets one or two outcomes with shift
    ``+/- effect_strength`` and the remaining pairs have no effect.

    Returns the dataset and the effect map actually used.
    """
    if n_subjects < 1 or n_treatments < 1 or n_outcomes < 1 or n_trials < 1:
        raise ParameterError("fixture dimensions must be positive")
    rng = np.random.default_rng(seed)
    treatments = [f"T{j + 1}" for j in range(n_treatments)]
    outcomes = [f"O{k + 1}" for k in range(n_outcomes)]
    if effects is None:
        effects = {}
        for j, t in enumerate(treatments):
            chosen = {j % n_outcomes}
            if n_outcomes > 1 and rng.random() < 0.5:
                chosen.add(int(rng.integers(n_outcomes)))
            for k in sorted(chosen):
                effects[(t, outcomes[k])] = effect_strength * (1 if rng.random() < 0.5 else -1)
    effects = {k: float(v) for k, v in effects.items() if v != 0}
    levels = [f"c{i + 1}" for i in range(covariate_levels)]
    cov = rng.integers(covariate_levels, size=n_subjects)
    u = rng.normal(0.0, subject_sd, size=n_subjects)
    base = rng.normal(0.0, 0.25, size=n_outcomes)
    width = len(str(n_subjects))
    ids = [f"s{i:0{width}d}" for i in range(n_subjects)]

    data = {"subject_id": [], "trial": [], "C": []}
    data.update({t: [] for t in treatments})
    data.update({o: [] for o in outcomes})
    for i in range(n_subjects):
        for assign in itertools.product((0, 1), repeat=n_treatments):
            for trial in range(n_trials):
                data["subject_id"].append(ids[i])
                data["trial"].append(trial)
                data["C"].append(levels[cov[i]])
                for t, a in zip(treatments, assign):
                    data[t].append(a)
                for k, o in enumerate(outcomes):
                    shift = sum(effects.get((t, o), 0.0) * a for t, a in zip(treatments, assign))
                    log_y = base[k] + u[i] + covariate_effect * (cov[i] + 1) + shift + rng.normal(0.0, noise_sd)
                    data[o].append(float(np.exp(log_y)))
    kinds = {"C": "categorical", **{o: "continuous" for o in outcomes}}
    ds = FactorialDataset(["C"], treatments, outcomes, data, kinds, {"C": levels})
    return ds, effects
