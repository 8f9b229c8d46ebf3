"""Command line interface: ``irgcouple <command> ...``.

Exit codes: 0 success, 1 a check or acceptance assertion failed, 2 bad
configuration or input.
"""
import argparse
import json
import logging
import os
import sys

import yaml

from . import __version__
from .graph import GraphError, read_edge_list, write_edge_list
from .kernels import KernelError, kernel_from_config, p_max, scaling_from_config
from .properties.budget import SolveBudget
from .properties.chromatic import chromatic_number_exact
from .properties.predictors import (DegenerateProduct, DomainError, HypothesisViolation,
                                    predict_chromatic_dense_d, predict_chromatic_sparse_ell,
                                    predict_quasi_clique)
from .properties.quasi_clique import quasi_clique_number_exact
from .rng import UniformStream
from .samplers import CouplingError, rate_from_config, sample_coupled_triple, sample_irg, save_triple
from .serialize import canonical_json, load_canonical
from .experiments.config import ConfigError, config_from_dict, load_config
from .experiments.harness import BudgetExceededFractionTooHigh, check_certificates, run_experiment
from .experiments.report import FORMATS, emit_report

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class UsageError(Exception):
    pass


def _spec(text, what):
    """Inline JSON/YAML mapping, or a path to a file holding one."""
    if text is None:
        return None
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse {what}: {exc}") from exc
    if not isinstance(value, dict):
        raise UsageError(f"{what} must be a mapping")
    return value


def _budget(args):
    return SolveBudget(node_limit=args.node_limit,
                       time_limit=args.time_limit if args.time_limit else float("inf"))


def _emit(obj):
    sys.stdout.write(canonical_json(obj))


def cmd_sample(args):
    k = kernel_from_config(_spec(args.kernel, "kernel"))
    lam = scaling_from_config(_spec(args.scaling, "scaling") or {"rule": "constant", "C": 1.0})
    g, w = sample_irg(args.n, k, lam, UniformStream(args.seed, args.trial))
    if args.out:
        write_edge_list(g, args.out)
    else:
        from .graph import format_edge_list
        sys.stdout.write(format_edge_list(g))
    return EXIT_OK


def cmd_couple(args):
    k = kernel_from_config(_spec(args.kernel, "kernel"))
    lam = scaling_from_config(_spec(args.scaling, "scaling") or {"rule": "constant", "C": 1.0})
    r = rate_from_config(_spec(args.rate, "rate") or {"form": "inverse_log"})
    tri = sample_coupled_triple(args.n, k, lam, r, UniformStream(args.seed, args.trial))
    save_triple(tri, args.out)
    _emit(tri.metadata())
    return EXIT_OK


def cmd_chromatic(args):
    res = chromatic_number_exact(read_edge_list(args.graph), _budget(args))
    _emit(res.record())
    return EXIT_OK


def cmd_quasi_clique(args):
    res = quasi_clique_number_exact(read_edge_list(args.graph), args.gamma, _budget(args))
    _emit(res.record())
    return EXIT_OK


def cmd_predict(args):
    if args.target == "quasi-clique":
        if args.n is None or args.gamma is None or args.p_max is None:
            raise UsageError("quasi-clique prediction needs --n, --gamma and --p-max")
        win = predict_quasi_clique(args.n, args.gamma, args.p_max, args.epsilon, args.refined_epsilon)
    elif args.k_mm is not None:
        _, win = predict_chromatic_dense_d(args.k_mm)
    else:
        if args.n is None or args.p_max is None:
            raise UsageError("chromatic prediction needs --k-mm, or --n and --p-max")
        _, win = predict_chromatic_sparse_ell(args.p_max, args.n)
    _emit(win.record())
    return EXIT_OK


def _run_and_emit(cfg, out, fmt):
    try:
        report = run_experiment(cfg)
    except BudgetExceededFractionTooHigh as exc:
        emit_report(exc.report, out, fmt)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = emit_report(report, out, fmt)
    if out is None:
        sys.stdout.write(text)
    for f in report.failures:
        print(f"FAIL: {f}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_experiment_run(args):
    cfg = load_config(args.config, args.set)
    if args.workers is not None:
        cfg.workers = args.workers
    cfg.validate()
    return _run_and_emit(cfg, args.out or cfg.output, args.format)


def cmd_experiment_verify(args):
    with open(args.report, encoding="utf-8") as fh:
        stored = fh.read()
    data = load_canonical(stored)
    cfg = config_from_dict(data["config"])
    if args.workers is not None:
        cfg.workers = args.workers
    if cfg.config_hash() != data["environment"]["config_hash"]:
        print("FAIL: config hash mismatch", file=sys.stderr)
        return EXIT_FAIL
    try:
        fresh = run_experiment(cfg).to_json()
    except BudgetExceededFractionTooHigh as exc:
        fresh = exc.report.to_json()
    problems = []
    if fresh != stored:
        problems.append("re-run report differs from the stored report")
    problems += check_certificates(cfg, data["records"])
    for p in problems:
        print(f"FAIL: {p}", file=sys.stderr)
    if not problems:
        print(f"verified {args.report} ({len(data['records'])} records, hash {cfg.config_hash()[:12]})")
    return EXIT_FAIL if problems else EXIT_OK


def _add_budget(p):
    p.add_argument("--node-limit", type=int, default=10**8)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")


def build_parser():
    ap = argparse.ArgumentParser(prog="irgcouple", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def sampling(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--kernel", required=True, help="inline JSON/YAML or a file path")
        p.add_argument("--scaling", help="inline JSON/YAML or a file path (default constant 1)")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("sample", help="sample one IRG, print or write its edge list")
    sampling(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("couple", help="sample a coupled (lower, middle, upper) triple into a directory")
    sampling(p)
    p.add_argument("--rate", help="inline JSON/YAML or a file path (default 1/log n)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("chromatic", help="exact chromatic number of an edge-list file")
    p.add_argument("graph")
    _add_budget(p)
    p.set_defaults(func=cmd_chromatic)

    p = sub.add_parser("quasi-clique", help="exact gamma-quasi-clique number of an edge-list file")
    p.add_argument("graph")
    p.add_argument("--gamma", type=float, required=True)
    _add_budget(p)
    p.set_defaults(func=cmd_quasi_clique)

    p = sub.add_parser("predict", help="print a prediction window")
    p.add_argument("target", choices=["chromatic", "quasi-clique"])
    p.add_argument("--n", type=int)
    p.add_argument("--p-max", type=float)
    p.add_argument("--k-mm", type=float, help="kernel peak over C for lambda_n = C n")
    p.add_argument("--gamma", type=float)
    p.add_argument("--epsilon", type=float, default=0.35)
    p.add_argument("--refined-epsilon", type=float)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", help="run or verify a Monte Carlo experiment")
    esub = p.add_subparsers(dest="action", required=True)
    r = esub.add_parser("run")
    r.add_argument("config", help="YAML or JSON experiment config")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    r.add_argument("--out")
    r.add_argument("--format", choices=FORMATS, default="json")
    r.add_argument("--workers", type=int)
    r.set_defaults(func=cmd_experiment_run)
    v = esub.add_parser("verify")
    v.add_argument("report", help="JSON report written by 'experiment run'")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=cmd_experiment_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError, KernelError, GraphError, DomainError, DegenerateProduct,
            HypothesisViolation, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CouplingError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
