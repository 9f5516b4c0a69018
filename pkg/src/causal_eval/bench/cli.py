"""``causal-eval`` command line.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..bayesnet import Dataset, DiscreteBayesNet, fit_parameters, interventional_distribution
from ..datagen import synthesize_factorial, synthetic_benchmark
from ..errors import CausalEvalError, ConfigError, DataError, ParameterError
from ..graph import Dag, cpdag_of, dumps_graph, extend_or_repair, loads_graph
from ..learners import LEARNERS, LearnerConfig, run_learner
from ..metrics import EffectTable, aggregate_effects, shd, sid, sid_bounds, tvd
from ..obsbias import load_factorial_csv, logistic_bias_sample, prepare_dataset
from .config import ExperimentConfig
from .report import emit_report
from .runner import TREATED, default_workers, run_experiment

EXIT_CONFIG = 2
EXIT_DATA = 3

log = logging.getLogger("causal_eval")


def _cmd_gen(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "synthetic":
        pairs = synthetic_benchmark(args.n_dags, args.n_vars, args.expected_neighbors,
                                    args.n_samples, args.alpha_dirichlet, args.seed)
        for i, (net, data) in enumerate(pairs):
            (out / f"net_{i:03d}.json").write_text(net.dumps())
            data.to_csv(out / f"data_{i:03d}.csv")
        print(f"wrote {len(pairs)} nets and datasets to {out}")
    else:
        data, effects = synthesize_factorial(args.n_subjects, args.n_treatments, args.n_outcomes,
                                             args.n_trials, seed=args.seed)
        data.write(out / "factorial.csv", out / "roles.json")
        (out / "effects.json").write_text(
            json.dumps([{"treatment": t, "outcome": o, "shift": v} for (t, o), v in sorted(effects.items())], indent=2) + "\n"
        )
        print(f"wrote factorial fixture ({data.n_rows} rows) to {out}")


def _cmd_bias(args):
    data = load_factorial_csv(args.factorial, args.roles)
    if not args.no_prepare:
        data = prepare_dataset(data, args.bins)
    out = logistic_bias_sample(data, args.beta, args.covariate, args.seed, args.mode)
    out.to_csv(args.out)
    print(f"wrote {out.n_rows} biased records to {args.out}")


def _learner_config(args) -> LearnerConfig:
    return LearnerConfig(alpha=args.alpha, ess=args.ess, max_cond_set=args.max_cond_set, seed=args.seed)


def _cmd_learn(args):
    data = Dataset.from_csv(args.data)
    g = run_learner(args.learner, data, _learner_config(args))
    Path(args.out).write_text(dumps_graph(g))
    print(f"wrote {args.learner} output to {args.out}")


def _cmd_eval(args):
    true_net = DiscreteBayesNet.loads(Path(args.true_net).read_text())
    learned = loads_graph(Path(args.learned).read_text())
    data = Dataset.from_csv(args.data, labels=true_net.labels)
    if isinstance(learned, Dag):
        dag, extension = learned, "dag"
    else:
        dag, repaired = extend_or_repair(learned)
        extension = "repaired" if repaired else "consistent"
    net = fit_parameters(dag, data.select(dag.variables), args.smoothing)
    table = EffectTable()
    for t in true_net.variables:
        for v in true_net.labels[t]:
            for o in true_net.variables:
                if o != t:
                    table.add(t, v, o, tvd(interventional_distribution(true_net, o, t, v),
                                           interventional_distribution(net, o, t, v)))
    treated = table.where(TREATED)
    result = {
        "shd": shd(cpdag_of(true_net.dag), cpdag_of(dag)),
        "sid": sid(true_net.dag, dag),
        "tvd_mean": aggregate_effects(table, "mean"),
        "tvd_sum": aggregate_effects(treated, "sum") if len(treated) else 0.0,
        "extension": extension,
        "effects": [{"treatment": e.treatment, "value": e.value, "outcome": e.outcome, "tvd": e.tvd} for e in table],
    }
    if args.sid_bounds:
        # a DAG output names one member, so both bounds are its SID
        result["sid_bounds"] = ([result["sid"]] * 2 if isinstance(learned, Dag)
                                else list(sid_bounds(true_net.dag, learned)))
    text = json.dumps(result, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_experiment(args):
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    out = args.out or cfg.output_dir
    if not out:
        raise ConfigError("no output directory: pass --out or set output_dir")
    report = run_experiment(cfg, args.workers)
    summary = emit_report(report, out)
    print(f"{cfg.experiment}: {summary['n_rows']} rows ({summary['n_failed']} failed) -> {out}")
    for name, value in summary["flags"].items():
        print(f"  {name}: {value}")


def _cmd_validate(args):
    data = load_factorial_csv(args.factorial, args.roles)
    print(f"ok: {data!r}, {data.n_rows} cells")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causal-eval", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate synthetic benchmarks or a factorial fixture")
    g.add_argument("kind", choices=("synthetic", "factorial"))
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n-dags", type=int, default=30)
    g.add_argument("--n-vars", type=int, default=14)
    g.add_argument("--expected-neighbors", type=float, default=2.0)
    g.add_argument("--n-samples", type=int, default=5000)
    g.add_argument("--alpha-dirichlet", type=float, default=1.0)
    g.add_argument("--n-subjects", type=int, default=1000)
    g.add_argument("--n-treatments", type=int, default=3)
    g.add_argument("--n-outcomes", type=int, default=3)
    g.add_argument("--n-trials", type=int, default=1)
    g.set_defaults(func=_cmd_gen)

    b = sub.add_parser("bias", help="logistic observational sub-sampling of factorial data")
    b.add_argument("--factorial", required=True)
    b.add_argument("--roles", required=True)
    b.add_argument("--covariate", required=True)
    b.add_argument("--beta", type=float, default=1.0)
    b.add_argument("--bins", type=int, default=3)
    b.add_argument("--mode", choices=("single", "all_trials"), default="single")
    b.add_argument("--no-prepare", action="store_true", help="skip normalization/discretization")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_bias)

    for name, func, helptext in (("learn", _cmd_learn, "run a structure learner on a CSV dataset"),):
        lp = sub.add_parser(name, help=helptext)
        lp.add_argument("--data", required=True)
        lp.add_argument("--learner", choices=sorted(LEARNERS), required=True)
        lp.add_argument("--alpha", type=float, default=0.05)
        lp.add_argument("--ess", type=float, default=10.0)
        lp.add_argument("--max-cond-set", type=int, default=None)
        lp.add_argument("--seed", type=int, default=0)
        lp.add_argument("--out", required=True)
        lp.set_defaults(func=func)

    e = sub.add_parser("eval", help="SHD, SID and TVD of a learned graph against a true net")
    e.add_argument("--true-net", required=True)
    e.add_argument("--learned", required=True)
    e.add_argument("--data", required=True, help="dataset used to fit the learned graph")
    e.add_argument("--smoothing", type=float, default=1.0)
    e.add_argument("--sid-bounds", action="store_true",
                   help="also report min/max SID over the learned equivalence class (<= 8 variables)")
    e.add_argument("--out")
    e.set_defaults(func=_cmd_eval)

    x = sub.add_parser("experiment", help="run a configured study and write its report")
    x.add_argument("--config", required=True)
    x.add_argument("--out")
    x.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default: $CAUSAL_EVAL_WORKERS or {default_workers()})")
    x.add_argument("--seed", type=int, default=None, help="override master_seed")
    x.set_defaults(func=_cmd_experiment)

    v = sub.add_parser("validate", help="check a factorial CSV against its role sidecar")
    v.add_argument("--factorial", required=True)
    v.add_argument("--roles", required=True)
    v.set_defaults(func=_cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ParameterError, FileNotFoundError, CausalEvalError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
