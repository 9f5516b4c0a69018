"""Experiment orchestration.

Every experiment is split into independent cells. A cell rebuilds its
inputs from seeds derived from ``(master_seed, cell index)``, so the report
is identical for any worker count.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from ..bayesnet import DiscreteBayesNet, fit_parameters, interventional_distribution
from ..datagen import alter_model, derive_seed, synthesize_factorial, synthetic_benchmark
from ..errors import CausalEvalError, ConfigError
from ..graph import Dag, Pdag, cpdag_of, extend_or_repair
from ..groundtruth import consistent_dag, empirical_do_distribution
from ..learners import run_learner
from ..metrics import EffectTable, aggregate_effects, shd, sid, tvd
from ..obsbias import load_factorial_csv, logistic_bias_sample, prepare_dataset
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

WORKERS_ENV = "CAUSAL_EVAL_WORKERS"
TREATED = "1"


@dataclass
class MetricRow:
    experiment: str
    dataset_id: str
    trial: int
    algorithm: str
    shd: Optional[int] = None
    sid: Optional[int] = None
    tvd_mean: Optional[float] = None
    tvd_sum: Optional[float] = None
    seed: int = 0
    extension: str = ""
    status: str = "ok"
    wall_time: float = 0.0
    effects: list = field(default_factory=list)


@dataclass
class MetricReport:
    experiment: str
    config: dict
    rows: list = field(default_factory=list)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _normalize(learned) -> tuple[Dag, str]:
    if isinstance(learned, Pdag):
        dag, repaired = extend_or_repair(learned)
        return dag, "repaired" if repaired else "consistent"
    return learned, "dag"


def _effect_table(true_dists: dict, learned: DiscreteBayesNet, triples) -> EffectTable:
    table = EffectTable()
    for t, value, o in triples:
        est = interventional_distribution(learned, o, t, value)
        table.add(t, value, o, tvd(true_dists[(t, value, o)], est))
    return table


def _fill_tvd(row: MetricRow, table: EffectTable):
    row.effects = [(e.treatment, e.value, e.outcome, e.tvd) for e in table]
    row.tvd_mean = aggregate_effects(table, "mean")
    treated = table.where(TREATED)
    row.tvd_sum = aggregate_effects(treated, "sum") if len(treated) else 0.0


def _learner_row(cfg, dataset_id, trial, seed, name, data, true_dag, true_dists, triples) -> MetricRow:
    row = MetricRow(cfg.experiment, dataset_id, trial, name, seed=seed)
    start = time.perf_counter()
    try:
        learned, row.extension = _normalize(run_learner(name, data, cfg.learner_config))
        row.shd = shd(cpdag_of(true_dag), cpdag_of(learned))
        row.sid = sid(true_dag, learned)
        net = fit_parameters(learned, data, 1.0)
        _fill_tvd(row, _effect_table(true_dists, net, triples))
    except CausalEvalError as exc:
        row.status = f"error: {type(exc).__name__}: {exc}"
        logger.warning("cell %s/%s/%s failed: %s", dataset_id, trial, name, exc)
    row.wall_time = time.perf_counter() - start
    return row


def _synthetic_cell(args) -> list:
    cfg, index, trial = args
    seed = derive_seed(cfg.master_seed, index, trial)
    [(net, data)] = synthetic_benchmark(
        1, cfg.n_vars, cfg.expected_neighbors, cfg.n_samples, cfg.alpha_dirichlet, seed, cfg.cardinality
    )
    variables = net.dag.variables
    triples = [(t, v, o) for t in variables for v in net.labels[t] for o in variables if o != t]
    true_dists = {(t, v, o): interventional_distribution(net, o, t, v) for t, v, o in triples}
    dataset_id = f"dag{index:03d}"
    return [
        _learner_row(cfg, dataset_id, trial, seed, name, data, net.dag, true_dists, triples)
        for name in cfg.learners
    ]


def _factorial_source(cfg: ExperimentConfig, trial: int):
    if cfg.factorial_csv is not None:
        return load_factorial_csv(cfg.factorial_csv, cfg.factorial_roles), "factorial"
    fx = cfg.fixture
    data, _ = synthesize_factorial(
        fx.n_subjects, fx.n_treatments, fx.n_outcomes, fx.n_trials,
        covariate_levels=fx.covariate_levels, covariate_effect=fx.covariate_effect,
        effect_strength=fx.effect_strength, seed=derive_seed(cfg.master_seed, trial, 0),
    )
    return data, "fixture"


def _prepared(cfg, trial):
    raw, name = _factorial_source(cfg, trial)
    data = prepare_dataset(raw, cfg.bins)
    if cfg.covariate not in data.covariates:
        raise ConfigError(f"biasing covariate {cfg.covariate!r} not in the dataset")
    return data, name


def _spec_error_cell(args) -> list:
    cfg, trial = args
    seed = derive_seed(cfg.master_seed, trial, 1)
    data, source = _prepared(cfg, trial)
    truth, _ = consistent_dag(data, cfg.covariate, cfg.friedman_alpha)
    biased = logistic_bias_sample(data, cfg.beta, cfg.covariate, seed, cfg.sample_mode).select(truth.variables)
    reference = fit_parameters(truth, biased, 1.0)
    triples = [(t, v, o) for t in data.treatments for v in ("0", "1") for o in data.outcomes]
    ref_dists = {(t, v, o): interventional_distribution(reference, o, t, v) for t, v, o in triples}
    rows = []
    for mode in ("overspecify", "underspecify"):
        for t in data.treatments:
            row = MetricRow(cfg.experiment, f"{source}:{t}", trial, mode, seed=seed, extension="dag")
            start = time.perf_counter()
            try:
                altered = alter_model(reference, t, data.outcomes, mode, biased)
                row.shd = shd(truth, altered.dag)
                row.sid = sid(truth, altered.dag)
                _fill_tvd(row, _effect_table(ref_dists, altered, triples))
            except CausalEvalError as exc:
                row.status = f"error: {type(exc).__name__}: {exc}"
            row.wall_time = time.perf_counter() - start
            rows.append(row)
    return rows


def _empirical_cell(args) -> list:
    cfg, trial = args
    seed = derive_seed(cfg.master_seed, trial, 1)
    data, source = _prepared(cfg, 0)
    truth, ledger = consistent_dag(data, cfg.covariate, cfg.friedman_alpha)
    triples = [(t, v, o) for t, o in ledger.related_pairs() for v in ("0", "1")]
    true_dists = {(t, v, o): empirical_do_distribution(data, o, t, v) for t, v, o in triples}
    biased = logistic_bias_sample(data, cfg.beta, cfg.covariate, seed, cfg.sample_mode).select(truth.variables)
    return [
        _learner_row(cfg, source, trial, seed, name, biased, truth, true_dists, triples)
        for name in cfg.learners
    ]


def _cells(cfg: ExperimentConfig):
    if cfg.experiment in ("correlation", "algo_compare"):
        return _synthetic_cell, [(cfg, i, t) for t in range(cfg.trials) for i in range(cfg.n_dags)]
    if cfg.experiment == "spec_error":
        return _spec_error_cell, [(cfg, t) for t in range(cfg.trials)]
    return _empirical_cell, [(cfg, t) for t in range(cfg.trials)]


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> MetricReport:
    """Run every cell of the configured study and assemble the report in cell order."""
    fn, cells = _cells(cfg)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(cells) <= 1:
        results = [fn(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, cells))
    report = MetricReport(cfg.experiment, cfg.to_dict())
    for rows in results:
        report.rows.extend(rows)
    return report
