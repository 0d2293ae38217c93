"""Command-line entry point.

Subcommands: simulate, fit, evaluate, existence, b2-demo, report.
Configuration for the report runner comes from a key=value file plus
repeatable --set overrides; every subcommand takes --seed where it
matters.  Exit codes: 0 success, 1 config error, 2 data error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .data import CsvSchema, DiscreteEnv, SimConfig, generate_simulation, load_csv, save_csv
from .errors import ConfigError, DataError, NumericalError
from .existence import existence_report
from .harness import ExperimentConfig, run_experiment
from .metrics import MetricConfig, compute_metrics
from .nuisance import fit_outcome, fit_shift
from .policies import Policy, PolicyClassSpec
from .report import emit_report
from .solver import DFLConfig, Nuisances, dfl_fit, fit_advb, fit_optimal, fit_single_fair

__all__ = ["main", "parse_config_file", "experiment_from_mapping"]


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems as config errors."""

    def error(self, message):
        raise ConfigError(message)


def _atom(text: str):
    t = text.strip()
    if t.lower() == "true":
        return True
    if t.lower() == "false":
        return False
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


_LIST_KEYS = {"methods", "c0_grid", "K_grid", "covariate_cols"}


def _parse_value(key: str, text: str):
    if key in _LIST_KEYS or "," in text:
        items = [p for p in (s.strip() for s in text.split(",")) if p]
        return tuple(_atom(p) for p in items)
    return _atom(text)


def parse_config_file(path) -> dict:
    """key=value lines; # starts a comment; lists are comma-separated."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            out[key] = _parse_value(key, value)
    return out


_EXPERIMENT_KEYS = {
    "scenario",
    "methods",
    "replications",
    "seed",
    "workers",
    "eval_models",
    "family",
    "vb_value_step",
    "keep_fit_results",
    "output_dir",
    "c0_grid",
    "K_grid",
    "csv_path",
    "csv_split",
    "n_train",
    "n_test",
    "K",
    "c0",
    "gamma2",
    "notion",
    "variant",
    "kappa",
    "refine_budget",
    "pool_size",
    "weight_bound",
    "temperature",
    "uses_sensitive",
    "budget_cap",
    "n_covariates",
    "sensitive_col",
    "action_col",
    "reward_col",
    "fairness_col",
    "covariate_cols",
}


def _as_tuple(value):
    return value if isinstance(value, tuple) else (value,)


def experiment_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build the full experiment config from a flat key=value mapping."""
    unknown = set(mapping) - _EXPERIMENT_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    m = dict(mapping)
    scenario = m.get("scenario", "simulation")
    covariate_cols = _as_tuple(m.get("covariate_cols", ("x1", "x2")))
    schema = CsvSchema(
        sensitive=m.get("sensitive_col", "s"),
        action=m.get("action_col", "a"),
        reward_primary=m.get("reward_col", "r"),
        covariates=tuple(str(c) for c in covariate_cols),
        reward_fairness=m.get("fairness_col"),
    )
    n_cov = m.get("n_covariates", 2 if scenario == "simulation" else len(schema.covariates))
    class_spec = PolicyClassSpec(
        n_covariates=int(n_cov),
        pool_size=int(m.get("pool_size", 2000)),
        weight_bound=float(m.get("weight_bound", 1.0)),
        temperature=float(m.get("temperature", 0.0)),
        uses_sensitive=bool(m.get("uses_sensitive", True)),
        budget_cap=m.get("budget_cap"),
    )
    dfl = DFLConfig(
        class_spec=class_spec,
        K=int(m.get("K", 10)),
        c0=float(m.get("c0", 0.5)),
        gamma2=float(m.get("gamma2", 1.0)),
        metric=MetricConfig(
            notion=m.get("notion", "equal_opportunity"),
            variant=m.get("variant", "squared"),
        ),
        seed=int(m.get("seed", 0)),
        kappa_override=m.get("kappa"),
        refine_budget=int(m.get("refine_budget", 200)),
    )
    sim = SimConfig(
        n_train=int(m.get("n_train", 200)),
        n_test=int(m.get("n_test", 5000)),
        seed=int(m.get("seed", 0)),
    )
    return ExperimentConfig(
        scenario=scenario,
        methods=_as_tuple(m.get("methods", ("DFL", "Optimal", "VB1", "VB2", "ADVB"))),
        replications=int(m.get("replications", 100)),
        sim=sim,
        dfl=dfl,
        c0_grid=_as_tuple(m.get("c0_grid", ())),
        K_grid=_as_tuple(m.get("K_grid", ())),
        seed=int(m.get("seed", 0)),
        workers=int(m.get("workers", 1)),
        eval_models=m.get("eval_models", "train"),
        family=m.get("family", "linear-gaussian"),
        vb_value_step=bool(m.get("vb_value_step", False)),
        csv_path=m.get("csv_path"),
        csv_schema=schema,
        csv_split=float(m.get("csv_split", 0.0)),
        keep_fit_results=bool(m.get("keep_fit_results", False)),
        output_dir=m.get("output_dir"),
    )


def _schema_from_args(args) -> CsvSchema:
    covs = tuple(s.strip() for s in args.covariate_cols.split(",") if s.strip())
    return CsvSchema(
        sensitive=args.sensitive_col,
        action=args.action_col,
        reward_primary=args.reward_col,
        covariates=covs,
        reward_fairness=args.fairness_col,
    )


def _add_schema_flags(sub):
    sub.add_argument("--sensitive-col", default="s")
    sub.add_argument("--action-col", default="a")
    sub.add_argument("--reward-col", default="r")
    sub.add_argument("--fairness-col", default=None)
    sub.add_argument("--covariate-cols", default="x1,x2")


def _write_or_print(text: str, path) -> None:
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _cmd_simulate(args) -> None:
    config = SimConfig(n_train=args.n_train, n_test=args.n_test, seed=args.seed)
    train, test = generate_simulation(config)
    schema = CsvSchema()
    save_csv(train, args.out_train, schema)
    save_csv(test, args.out_test, schema)
    print(f"wrote {train.n} training rows to {args.out_train}")
    print(f"wrote {test.n} test rows to {args.out_test}")


def _fit_cli_models(data, family: str, notion: str) -> Nuisances:
    primary = fit_outcome(data, family=family, channel="primary")
    fairness = fit_outcome(data, family=family, channel="fairness")
    shift = fit_shift(data) if notion == "counterfactual" else None
    return Nuisances(primary=primary, fairness=fairness, shift=shift)


def _cmd_fit(args) -> None:
    schema = _schema_from_args(args)
    data = load_csv(args.data, schema)
    class_spec = PolicyClassSpec(
        n_covariates=data.d,
        pool_size=args.pool_size,
        weight_bound=args.weight_bound,
        temperature=args.temperature,
        uses_sensitive=not args.no_sensitive,
        budget_cap=args.budget_cap,
    )
    config = DFLConfig(
        class_spec=class_spec,
        K=args.K,
        c0=args.c0,
        gamma2=args.gamma2,
        metric=MetricConfig(notion=args.notion, variant=args.variant),
        seed=args.seed,
        kappa_override=args.kappa,
        refine_budget=args.refine_budget,
    )
    models = _fit_cli_models(data, args.family, args.notion)
    if args.method == "DFL":
        result = dfl_fit(data, models, config)
        policy = result.policy
        if args.result_json is not None:
            _write_or_print(result.to_json(), args.result_json)
        row = result.per_alpha[result.chosen_alpha_index]
        print(
            f"DFL: kappa={result.kappa:.4f} chose alpha={row.alpha:.3f} "
            f"(delta1={row.delta1:.4f}, delta2={row.delta2:.4f}, value={row.value:.4f})"
        )
    elif args.method == "Optimal":
        policy = fit_optimal(data, models.primary, class_spec, seed=args.seed, refine_budget=args.refine_budget)
        print("Optimal: value-maximizing policy over the sampled class")
    elif args.method in ("VB1", "VB2"):
        which = "action" if args.method == "VB1" else "outcome"
        policy = fit_single_fair(data, models, config, which=which, maximize_value=not args.no_value_step)
        print(f"{args.method}: single-metric baseline ({which} fairness)")
    elif args.method == "ADVB":
        policy = fit_advb(data, models, config)
        print("ADVB: linear-scalarization baseline")
    else:
        raise ConfigError(f"unknown method {args.method!r}")
    _write_or_print(policy.to_json(), args.out)


def _cmd_evaluate(args) -> None:
    schema = _schema_from_args(args)
    data = load_csv(args.data, schema)
    with open(args.policy, "r", encoding="utf-8") as fh:
        policy = Policy.from_json(fh.read())
    models = _fit_cli_models(data, args.family, args.notion)
    report = compute_metrics(
        policy,
        data,
        models.primary,
        models.fairness,
        MetricConfig(notion=args.notion, variant=args.variant),
        shift=models.shift,
    )
    _write_or_print(report.to_json(), args.out)


def _cmd_existence(args) -> None:
    with open(args.env, "r", encoding="utf-8") as fh:
        env = DiscreteEnv.from_json(fh.read())
    report = existence_report(env)
    _write_or_print(report.to_json(), args.out)


def _cmd_b2_demo(args) -> None:
    spec = PolicyClassSpec(n_covariates=1)
    dfl = DFLConfig(class_spec=spec, K=args.K, kappa_override=args.kappa)
    config = ExperimentConfig(scenario="b2_demo", methods=("DFL", "ADVB"), replications=1, dfl=dfl)
    report = run_experiment(config)
    tcheb = report.extras["tchebyshev_selected"]
    union = report.extras["linear_union"]
    print("three fixed policies, fairness metrics taken as reference values")
    print(f"weight grid size K={args.K}, slack kappa={report.metadata['kappa']:g}")
    print(f"max-scalarization sweep recovers policies {tcheb} ({len(tcheb)} of 3)")
    print(f"linear-scalarization union recovers policies {union} ({len(union)} of 3)")
    if args.out is not None:
        _write_or_print(emit_report(report, "json"), args.out)


def _cmd_report(args) -> None:
    mapping = parse_config_file(args.config) if args.config else {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        mapping[key.strip()] = _parse_value(key.strip(), value)
    if args.seed is not None:
        mapping["seed"] = args.seed
    if args.output_dir is not None:
        mapping["output_dir"] = args.output_dir
    config = experiment_from_mapping(mapping)
    report = run_experiment(config)
    out_dir = config.output_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    formats = tuple(s.strip() for s in args.formats.split(",") if s.strip())
    names = {
        "csv": "report.csv",
        "json": "report.json",
        "svg-scatter": "scatter.svg",
        "svg-radar": "radar.svg",
    }
    for fmt in formats:
        if fmt not in names:
            raise ConfigError(f"unknown report format {fmt!r}")
        path = os.path.join(out_dir, names[fmt])
        emit_report(report, fmt, path)
        print(f"wrote {path}")
    agg = report.aggregates()
    for method, stats in agg.items():
        print(
            f"{method}: delta1={stats['delta1_mean']:.4f} delta2={stats['delta2_mean']:.4f} "
            f"value={stats['value_mean']:.4f} (n={stats['n_rep']})"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairpolicy", description="Double-fairness policy learning toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], description="Draw the synthetic study data and write CSVs")
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-train", default="train.csv")
    p.add_argument("--out-test", default="test.csv")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", description="Fit a policy on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--method", default="DFL", choices=("DFL", "Optimal", "VB1", "VB2", "ADVB"))
    p.add_argument("--notion", default="equal_opportunity", choices=("equal_opportunity", "counterfactual"))
    p.add_argument("--variant", default="squared", choices=("squared", "absolute"))
    p.add_argument("--family", default="linear-gaussian", choices=("linear-gaussian", "logistic"))
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--c0", type=float, default=0.5)
    p.add_argument("--gamma2", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--pool-size", type=int, default=2000)
    p.add_argument("--refine-budget", type=int, default=200)
    p.add_argument("--weight-bound", type=float, default=1.0)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--budget-cap", type=float, default=None)
    p.add_argument("--no-sensitive", action="store_true", help="exclude the sensitive attribute from rules")
    p.add_argument("--no-value-step", action="store_true", help="VB baselines return the bare metric minimizer")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="policy JSON path (default: stdout)")
    p.add_argument("--result-json", default=None, help="full fit table JSON path (DFL only)")
    _add_schema_flags(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("evaluate", description="Evaluate a stored policy on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--notion", default="equal_opportunity", choices=("equal_opportunity", "counterfactual"))
    p.add_argument("--variant", default="squared", choices=("squared", "absolute"))
    p.add_argument("--family", default="linear-gaussian", choices=("linear-gaussian", "logistic"))
    p.add_argument("--out", default=None)
    _add_schema_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("existence", description="Fairness existence report for a discrete environment JSON")
    p.add_argument("--env", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_existence)

    p = sub.add_parser("b2-demo", description="Scalarization comparison on the three fixed policies")
    p.add_argument("--K", type=int, default=99)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(func=_cmd_b2_demo)

    p = sub.add_parser("report", description="Run a replication study and emit reports")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--formats", default="csv,json,svg-scatter,svg-radar")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
