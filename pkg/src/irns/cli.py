"""Command line entry point: ``irns-bench``.

Settings come from (lowest to highest precedence) built-in defaults, a
``key=value`` config file given by ``--config``, and command line flags.
``IRNS_SEED`` replaces the base seed unless ``--seed`` is passed explicitly.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import ConfigError, RunSpec, run_suite
from .problems import (HingeProblem, SlcpProblem, generate_slcp, make_separable_hinge,
                       parse_sparse_dataset)
from .problems.libsvm import ParseError
from .solver import SolverConfig

_FLAGS = {"strict-beta", "timing"}
# full-sample budgets: smaller datasets 1e6, larger ones 1e7; ERM 1e5
_LARGE_DATASET = 20000


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="irns-bench",
        description="Compare IRBFGS, HBFGS and FBFGS under a scalar-product budget.")
    p.add_argument("--config", help="key=value file mirroring the long flags")
    p.add_argument("--problem", choices=["hinge", "slcp"])
    p.add_argument("--data", help="sparse 'label idx:val' dataset (hinge)")
    p.add_argument("--label-map", help="raw-to-sign label map, e.g. '0:-1,1:1'")
    p.add_argument("--n", type=int, help="dimension (slcp; synthetic hinge)")
    p.add_argument("--n-samples", type=int,
                   help="synthetic separable hinge data with this many samples")
    p.add_argument("--sigma", type=float, help="SLCP volatility (default 10)")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-5, help="hinge regularization")
    p.add_argument("--alg", choices=["irbfgs", "hbfgs", "fbfgs", "all"], default="all")
    p.add_argument("--seeds", type=int, default=10, help="number of runs")
    p.add_argument("--seed", type=int, help="base seed (default 0 or $IRNS_SEED)")
    p.add_argument("--instance-seed", type=int, help="seed of the generated problem instance")
    p.add_argument("--max-fev", type=int, help="scalar-product budget per run")
    p.add_argument("--n0", type=int, help="initial sample size")
    p.add_argument("--theta0", type=float, default=0.9)
    p.add_argument("--r", type=float, default=0.95)
    p.add_argument("--gamma", type=float, default=1e-4)
    p.add_argument("--gamma-bar", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1e6)
    p.add_argument("--alpha-min", type=float, default=2.0**-30)
    p.add_argument("--out", default="irns_out", help="output directory")
    p.add_argument("--strict-beta", action="store_true",
                   help="abort a run when the beta condition fails")
    p.add_argument("--timing", action="store_true",
                   help="record wall time (CSV output is then not reproducible)")
    return p


def read_config(path) -> list:
    """Translate a ``key=value`` file into command line tokens."""
    argv = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key = key.strip().lstrip("-").replace("_", "-")
            value = value.strip()
            if key == "config":
                raise ConfigError(f"{path}:{lineno}: nested config files are not supported")
            if key in _FLAGS:
                if value.lower() in ("1", "true", "yes", "on"):
                    argv.append(f"--{key}")
            else:
                argv += [f"--{key}", value]
    return argv


def _label_map(text):
    if not text:
        return None
    out = {}
    for item in text.split(","):
        raw, _, sign = item.partition(":")
        out[float(raw)] = int(sign)
    return out


def build_problem(args):
    if args.problem == "hinge":
        if args.data:
            ds = parse_sparse_dataset(args.data, label_map=_label_map(args.label_map),
                                      lam=args.lam)
        elif args.n and args.n_samples:
            ds = make_separable_hinge(args.n_samples, args.n, seed=args.instance_seed,
                                      lam=args.lam)
        else:
            raise ConfigError("hinge needs --data, or --n with --n-samples")
        return HingeProblem(ds)
    n = args.n if args.n is not None else 100
    sigma = args.sigma if args.sigma is not None else 10.0
    return SlcpProblem(generate_slcp(n, sigma, seed=args.instance_seed))


def default_max_fev(problem) -> int:
    if not problem.finite_sum:
        return 10**5
    return 10**7 if problem.n_max >= _LARGE_DATASET else 10**6


def build_specs(args, problem) -> list:
    if args.alg == "all":
        algs = ["IRBFGS", "HBFGS"] + (["FBFGS"] if problem.finite_sum else [])
    else:
        algs = [args.alg.upper()]
        if algs == ["FBFGS"] and not problem.finite_sum:
            raise ConfigError("fbfgs needs a finite-sum problem; slcp has an unbounded sample")
    max_fev = args.max_fev if args.max_fev is not None else default_max_fev(problem)
    config = SolverConfig(theta0=args.theta0, r=args.r, gamma=args.gamma,
                          gamma_bar=args.gamma_bar, beta=args.beta, n0=args.n0,
                          max_fev=max_fev, alpha_min=args.alpha_min, seed=args.seed,
                          strict_beta=args.strict_beta)
    return [RunSpec(a, problem, config, num_runs=args.seeds) for a in algs]


def cli_main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        pre, _ = parser.parse_known_args(argv)
        cfg_argv = read_config(pre.config) if pre.config else []
        args = parser.parse_args(cfg_argv + argv)
        if args.problem is None:
            parser.error("--problem is required")
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigError, OSError) as exc:
        print(f"irns-bench: config error: {exc}", file=sys.stderr)
        return 1

    if "--seed" not in argv and os.environ.get("IRNS_SEED"):
        args.seed = int(os.environ["IRNS_SEED"])
    if args.seed is None:
        args.seed = 0
    if args.instance_seed is None:
        args.instance_seed = args.seed
    try:
        problem = build_problem(args)
        specs = build_specs(args, problem)
        paths = run_suite(specs, args.out, record_timing=args.timing)
    except (ConfigError, ParseError, ValueError) as exc:
        print(f"irns-bench: config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"irns-bench: I/O error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


def main():
    sys.exit(cli_main())
