"""Command line entry point: ``mjmcmc run | simulate | oracle``."""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .chain import MaxJumpCap, THREADS_ENV, run_bd, run_mh, run_mj_mcmc
from .config import MODEL_KINDS, SAMPLERS, parse_config
from .errors import MJError
from .io import load_matrix_csv, write_inclusion, write_json, write_metrics, write_outputs
from .models import BvsModel, ExplicitModel, GgmModel, IsingModel, edges_from_adjacency

log = logging.getLogger("mjmcmc")


# -- model construction ---------------------------------------------------------
def build_model(config):
    if config.data is None:
        raise MJError("data: a data file is required for the run command")
    kind = config.model
    if kind == "toy":
        probs = load_matrix_csv(config.data).values.ravel()
        return ExplicitModel(probs=probs)
    if kind == "ising":
        return IsingModel(load_matrix_csv(config.data, "binary").values, rho=config.rho,
                          ebic_gamma=config.ebic_gamma)
    values = load_matrix_csv(config.data).values
    if kind == "ggm":
        return GgmModel(values, rho=config.rho)
    col = config.response_column
    if col >= values.shape[1]:
        raise MJError(f"response_column: {col} out of range for {values.shape[1]} columns")
    x = np.delete(values, col, axis=1)
    return BvsModel(values[:, col], x, g=config.g, rho=config.rho)


def load_truth(path, model):
    """0/1 truth as a flat vector of length k, or a p x p adjacency for graph models."""
    t = load_matrix_csv(path, "binary").values
    if t.size == model.k:
        return t.ravel()
    p = getattr(model, "p", None)
    if p is not None and t.shape == (p, p):
        return edges_from_adjacency(t)
    raise MJError(f"truth: {t.size} entries do not match {model.k} model elements")


def _is_graph(model):
    return isinstance(model, (GgmModel, IsingModel))


def run_config(config, threads=None, on_sample=None):
    """Build the model and run the configured sampler; returns (model, trace)."""
    model = build_model(config)
    m0 = np.zeros(model.k, dtype=np.uint8)
    common = dict(burn_in=config.burn_in, seed=config.seed, threads=threads,
                  checkpoint_interval=config.checkpoint_interval, on_sample=on_sample)
    if config.sampler == "bd":
        trace = run_bd(model, m0, n_events=config.iterations, **common)
    elif config.sampler == "mh":
        trace = run_mh(model, m0, config.schedule.base, config.iterations, **common)
    else:
        cap = (MaxJumpCap(config.max_jump, config.max_jump_iterations)
               if config.max_jump is not None else None)
        trace = run_mj_mcmc(model, m0, config.schedule, config.iterations, cap=cap, **common)
    return model, trace


# -- subcommands --------------------------------------------------------------
def cmd_run(args):
    flags = {k: getattr(args, k) for k in (
        "model", "data", "response_column", "truth", "sampler", "eps", "iterations", "seed",
        "burn_in", "max_jump", "max_jump_iterations", "rho", "g", "ebic_gamma", "out",
        "checkpoint_interval")}
    config = parse_config(args.config, **flags)
    # absolute paths keep config.lock usable from any working directory
    for name in ("data", "truth"):
        if getattr(config, name) is not None:
            setattr(config, name, str(Path(getattr(config, name)).resolve()))
    from .harness.benchmark import _Snapshotter

    snap = None
    if config.truth is not None:
        truth = load_truth(config.truth, build_model(config))
        snap = _Snapshotter(truth.size, truth, config.iterations, config.burn_in, 1.5,
                            "iteration")
    model, trace = run_config(config, threads=args.threads, on_sample=snap)
    files = write_outputs(trace, snap.rows if snap else None, config, config.out,
                          graph=_is_graph(model))
    for name, path in files.items():
        print(f"{name}: {path}")
    return 0


def cmd_simulate(args):
    from .harness import (SamplerConfig, chain_ising_instance, generate_bvs_instance,
                          generate_ggm_instance, run_benchmark)
    from .harness.benchmark import SERIES_COLUMNS

    if args.model == "ggm":
        inst = generate_ggm_instance(args.p, args.n, args.alpha, args.seed)
        model, truth = GgmModel(inst.data, rho=args.rho if args.rho else args.alpha), inst.graph
    elif args.model == "ising":
        inst = chain_ising_instance(args.p, args.n, args.seed)
        model, truth = IsingModel(inst.data, rho=args.rho or 0.5), inst.graph
    else:
        inst = generate_bvs_instance(args.n, args.p, args.active, args.seed)
        model, truth = BvsModel(inst.y, inst.x, rho=args.rho or 0.5), inst.truth
    configs = [SamplerConfig("bd", "bd", args.bd_iterations)]
    for spec in args.eps:
        configs.append(SamplerConfig(f"mj-{spec}", "mj", args.iterations, spec))
    reports = run_benchmark(model, truth, configs, seed=args.seed, burn_in=args.burn_in,
                            by=args.checkpoints, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scores = {"truth": truth}
    for rep in reports:
        safe = rep.name.replace(":", "_")
        write_metrics(out / f"metrics_{safe}.csv", rep.series, SERIES_COLUMNS)
        scores[rep.name] = rep.inclusion
        print(f"{rep.name}: auc_pr={rep.auc_pr:.4f} auc_roc={rep.auc_roc:.4f} "
              f"p_plus={rep.p_plus:.4f} p_minus={rep.p_minus:.4f} "
              f"wall={rep.wall_time:.2f}s iterations={rep.iterations}")
    with (out / "scores.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index"] + list(scores))
        for i in range(truth.size):
            w.writerow([i] + [repr(float(v[i])) for v in scores.values()])
    write_json(out / "summary.json", {rep.name: {
        "auc_pr": rep.auc_pr, "auc_roc": rep.auc_roc, "p_plus": rep.p_plus,
        "p_minus": rep.p_minus, "wall_time_s": rep.wall_time, "iterations": rep.iterations,
    } for rep in reports})
    return 0


def cmd_oracle(args):
    from . import oracle

    eps_list = [float(e) for e in args.eps]
    for e in eps_list:
        if not 0.0 < e < 1.0:
            raise MJError(f"eps: must lie in (0,1), got {e}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "oracle_bias.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["posterior", "epsilon", "tv", "slope", "kernel_residual",
                    "residual_slope"])
        for r in range(args.replicates):
            model = oracle.random_posterior(args.k, args.seed + r)
            report = oracle.bias_slope(model, eps_list)
            rslope, resid = oracle.kernel_rate_slope(model, eps_list)
            slope = "exact" if report.exact else repr(report.slope)
            for e, tv, res in zip(eps_list, report.tv, resid):
                w.writerow([r, repr(e), repr(tv), slope, repr(res), repr(rslope)])
            print(f"posterior {r}: bias slope {slope}, residual slope {rslope:.3f}")
    return 0


# -- parser -------------------------------------------------------------------------
def _add_run_args(p):
    p.add_argument("--config", help="JSON config or config.lock file; flags override it")
    p.add_argument("--model", choices=MODEL_KINDS)
    p.add_argument("--data", help="CSV data file (header row optional)")
    p.add_argument("--response-column", type=int, help="bvs: column holding the response")
    p.add_argument("--truth", help="0/1 CSV of true elements; enables metrics.csv")
    p.add_argument("--sampler", choices=SAMPLERS)
    p.add_argument("--eps", help="schedule: constant:0.3, slow:0.3, fast:0.3 or table:<path>")
    p.add_argument("--iters", "--iterations", dest="iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--burn-in", type=float)
    p.add_argument("--max-jump", type=float, help="cap flips at ceil(r k) early on")
    p.add_argument("--max-jump-iterations", type=int)
    p.add_argument("--rho", type=float, help="prior inclusion probability")
    p.add_argument("--g", type=float, help="bvs g-prior scale (default n)")
    p.add_argument("--ebic-gamma", type=float)
    p.add_argument("--out")
    p.add_argument("--checkpoint-interval", type=int)


def make_parser():
    parser = argparse.ArgumentParser(prog="mjmcmc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"rate-evaluation threads (default ${THREADS_ENV} or 1)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="sample a posterior for user data")
    _add_run_args(run)
    run.set_defaults(func=cmd_run)

    sim = sub.add_parser("simulate", help="synthetic instance plus BD/MJ benchmark")
    sim.add_argument("--model", choices=("ggm", "ising", "bvs"), default="ggm")
    sim.add_argument("--p", type=int, default=50, help="nodes (graphs) or predictors (bvs)")
    sim.add_argument("--n", type=int, default=200)
    sim.add_argument("--alpha", type=float, default=0.04, help="ggm edge density")
    sim.add_argument("--active", type=int, default=5, help="bvs active predictors")
    sim.add_argument("--rho", type=float, default=None)
    sim.add_argument("--eps", nargs="+", default=["constant:0.3"])
    sim.add_argument("--iters", "--iterations", dest="iterations", type=int, default=2000)
    sim.add_argument("--bd-iters", dest="bd_iterations", type=int, default=20000)
    sim.add_argument("--burn-in", type=float, default=0.25)
    sim.add_argument("--checkpoints", choices=("iteration", "time"), default="iteration")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default="mjmcmc-sim")
    sim.set_defaults(func=cmd_simulate)

    orc = sub.add_parser("oracle", help="exact small-space bias reports")
    orc.add_argument("--k", type=int, default=6)
    orc.add_argument("--eps", nargs="+", default=["0.2", "0.1", "0.05", "0.025"])
    orc.add_argument("--replicates", type=int, default=5)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--out", default="mjmcmc-oracle")
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (MJError, ValueError, OSError) as exc:
        print(f"mjmcmc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
