"""Command-line surface: graph generation, runs, exact curves, verification.

Subcommands: generate-graph, simulate, exact, oracle-check, figure.
All randomness descends from one --seed; outputs are CSV plus JSON metadata
and are byte-identical for identical resolved parameters.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import dynamics, exact, graphs, oracle, stats
from .states import SpaceTooLargeError


class CliError(ValueError):
    pass


@dataclass(frozen=True)
class RunSpec:
    """Everything that determines a simulate/figure run's output bytes."""

    model: int
    graph: str
    n: int
    m: int
    init: str
    steps: int
    burn_in: int
    stride: int
    replicas: int
    seed: int
    estimator: str
    vertex: int | None
    pooled: bool


def parse_count(text: str) -> int:
    """Integer argument that also accepts scientific notation like 1e7."""
    try:
        if any(c in text for c in ".eE"):
            val = float(text)
            if val != int(val):
                raise ValueError
            return int(val)
        return int(text)
    except ValueError:
        raise CliError(f"not a whole number: {text!r}") from None


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    if os.environ.get("CI"):
        raise CliError("--seed is required when CI is set")
    return time.time_ns() % (1 << 63)


def load_or_parse_graph(spec: str, seed: int | None = None) -> graphs.Graph:
    if os.path.exists(spec) or spec.endswith(".json"):
        return graphs.load_graph(spec)
    return graphs.parse_graph_spec(spec, seed=seed)


def graph_family(spec: str) -> str:
    if os.path.exists(spec) or spec.endswith(".json"):
        return "file"
    return spec.split(":", 1)[0]


def parse_init(init: str, g: graphs.Graph, money: int | None) -> np.ndarray:
    """Initial configuration: equal:K, all-at:V (needs --money), or a file."""
    if init.startswith("equal:"):
        per = parse_count(init.split(":", 1)[1])
        if per < 0:
            raise CliError("per-vertex amount must be non-negative")
        return np.full(g.n, per, dtype=np.int64)
    if init.startswith("all-at:"):
        v = parse_count(init.split(":", 1)[1])
        if not 0 <= v < g.n:
            raise CliError(f"vertex {v} outside [0, {g.n})")
        if money is None:
            raise CliError("all-at initial condition requires --money")
        cfg = np.zeros(g.n, dtype=np.int64)
        cfg[v] = money
        return cfg
    if os.path.exists(init):
        with open(init) as fh:
            data = json.load(fh)
        cfg = np.asarray(data, dtype=np.int64)
        if cfg.shape != (g.n,) or (cfg < 0).any():
            raise CliError(f"bad initial configuration in {init}")
        return cfg
    raise CliError(f"cannot interpret initial condition {init!r}")


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return v


def write_json(path: str, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _replica_counts(payload) -> tuple[np.ndarray, int]:
    """One replica's sampling pass; returns (counts over d, sample weight)."""
    spec, g, init = payload
    rng = dynamics.replica_rng(spec.seed, replica_id=spec.replicas_index)
    state = dynamics.make_state(spec.model, g, init, rng=rng)
    vertices = None if spec.pooled else [spec.vertex]
    if spec.steps == 0:
        sel = state.config if spec.pooled else state.config[[spec.vertex]]
        counts = np.bincount(sel, minlength=spec.m + 1).astype(np.int64)
        return counts, int(sel.shape[0])
    dynamics.run(state, g, spec.burn_in)
    if spec.estimator == "occupation":
        acc, weight = dynamics.run_occupation(state, g, spec.steps,
                                              vertices=vertices)
        return acc, weight
    obs = stats.SnapshotMarginal(vertices=vertices)
    dynamics.run(state, g, spec.steps, observers=[obs], stride=spec.stride)
    counts = obs.histogram.to_array(dmax=spec.m)
    return counts, int(counts.sum())


@dataclass(frozen=True)
class _ReplicaSpec:
    model: int
    m: int
    steps: int
    burn_in: int
    stride: int
    seed: int
    estimator: str
    vertex: int | None
    pooled: bool
    replicas_index: int


def run_sampling(spec: RunSpec, g: graphs.Graph,
                 init: np.ndarray) -> tuple[np.ndarray, int]:
    """All replicas merged, deterministically, into (counts, weight)."""
    payloads = []
    for r in range(spec.replicas):
        rs = _ReplicaSpec(model=spec.model, m=spec.m, steps=spec.steps,
                          burn_in=spec.burn_in, stride=spec.stride,
                          seed=spec.seed, estimator=spec.estimator,
                          vertex=spec.vertex, pooled=spec.pooled,
                          replicas_index=r)
        payloads.append((rs, g, init))
    if spec.replicas == 1:
        results = [_replica_counts(payloads[0])]
    else:
        workers = min(spec.replicas, os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replica_counts, payloads))
    total = np.zeros(spec.m + 1, dtype=np.int64)
    weight = 0
    for counts, w in results:
        total[:len(counts)] += counts
        weight += w
    return total, weight


def build_run_spec(args, g: graphs.Graph, init: np.ndarray,
                   seed: int) -> RunSpec:
    m = int(init.sum())
    family = graph_family(args.graph)
    pooled = family in stats.POOLABLE_FAMILIES and args.vertex is None
    vertex = args.vertex if args.vertex is not None else (
        None if pooled else 0)
    if args.estimator:
        estimator = args.estimator
    else:
        estimator = "occupation" if args.model == 2 else "snapshot"
    stride = args.stride if args.stride is not None else max(g.n * m, 1)
    burn_in = args.burn_in if args.burn_in is not None else 10 * g.n * m
    return RunSpec(model=args.model, graph=args.graph, n=g.n, m=m,
                   init=args.init, steps=args.steps, burn_in=burn_in,
                   stride=stride, replicas=args.replicas, seed=seed,
                   estimator=estimator, vertex=vertex, pooled=pooled)


def spec_metadata(spec: RunSpec, weight: int) -> dict:
    meta = asdict(spec)
    meta["N"] = meta.pop("n")
    meta["M"] = meta.pop("m")
    meta["T"] = spec.m / spec.n
    meta["samples"] = weight
    return meta


def cmd_generate_graph(args) -> int:
    seed = resolve_seed(args.seed)
    g = graphs.parse_graph_spec(args.spec, seed=seed)
    graphs.save_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n} edges={g.edge_count}")
    return 0


def _sampled_histogram(args) -> tuple[RunSpec, np.ndarray, int]:
    seed = resolve_seed(args.seed)
    g = load_or_parse_graph(args.graph, seed=seed)
    init = parse_init(args.init, g, args.money)
    spec = build_run_spec(args, g, init, seed)
    if spec.estimator not in ("snapshot", "occupation"):
        raise CliError(f"unknown estimator {spec.estimator!r}")
    counts, weight = run_sampling(spec, g, init)
    if weight == 0:
        raise stats.InsufficientSamplesError(
            "no samples collected; steps is below the snapshot stride")
    return spec, counts, weight


def cmd_simulate(args) -> int:
    spec, counts, weight = _sampled_histogram(args)
    rows = [(d, int(counts[d]), counts[d] / weight)
            for d in range(len(counts))]
    write_csv(args.out + ".csv", ["d", "count", "empirical_probability"], rows)
    write_json(args.out + ".json", spec_metadata(spec, weight))
    print(f"wrote {args.out}.csv and {args.out}.json "
          f"({weight} samples)")
    return 0


def _limit_curve(model: int, g: graphs.Graph | None, n: int, m: int,
                 vertex: int | None, dmax: int) -> np.ndarray:
    if model == 1:
        return exact.model1_marginal_limit(m / n, np.arange(dmax + 1))
    lam = m * float(exact.bill_marginal(g, vertex if vertex is not None else 0))
    return exact.poisson_pmf_vector(lam, dmax)


def cmd_exact(args) -> int:
    if args.model == 1:
        if args.graph:
            g = load_or_parse_graph(args.graph, seed=resolve_seed(args.seed))
            n = g.n
        elif args.agents:
            n = args.agents
        else:
            raise CliError("model 1 needs --graph or --agents")
        m = args.money
        if m is None:
            raise CliError("--money is required")
        dmax = args.dmax if args.dmax is not None else m
        finite = exact.model1_marginal_vector(n, m, dmax=dmax)
        limit = _limit_curve(1, None, n, m, None, dmax)
    else:
        if not args.graph:
            raise CliError("model 2 needs --graph")
        g = load_or_parse_graph(args.graph, seed=resolve_seed(args.seed))
        m = args.money
        if m is None:
            raise CliError("--money is required")
        x = args.vertex if args.vertex is not None else 0
        dmax = args.dmax if args.dmax is not None else m
        finite = exact.model2_marginal_vector(g, x, m, dmax=dmax)
        limit = _limit_curve(2, g, g.n, m, x, dmax)
    rows = [(d, float(finite[d]), float(limit[d])) for d in range(dmax + 1)]
    if args.out:
        write_csv(args.out, ["d", "finite_N_marginal", "limit_curve"], rows)
        print(f"wrote {args.out}")
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["d", "finite_N_marginal", "limit_curve"])
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return 0


def cmd_oracle_check(args) -> int:
    g = load_or_parse_graph(args.graph, seed=resolve_seed(args.seed))
    report = oracle.oracle_report(args.model, g, args.money,
                                  label=f"model={args.model} "
                                        f"graph={args.graph} m={args.money}")
    passed = report.pop("passed")
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if args.out:
        write_json(args.out, report)
    return 0 if passed else 1


def cmd_figure(args) -> int:
    spec, counts, weight = _sampled_histogram(args)
    g = load_or_parse_graph(spec.graph, seed=spec.seed)
    dmax = args.dmax if args.dmax is not None else spec.m
    emp = counts / weight
    if spec.model == 1:
        ex = exact.model1_marginal_vector(spec.n, spec.m, dmax=dmax)
    else:
        ex = exact.model2_marginal_vector(
            g, spec.vertex if spec.vertex is not None else 0, spec.m,
            dmax=dmax)
    limit = _limit_curve(spec.model, g, spec.n, spec.m, spec.vertex, dmax)
    rows = [(d, float(emp[d]) if d < len(emp) else 0.0,
             float(ex[d]), float(limit[d]))
            for d in range(dmax + 1)]
    write_csv(args.out + ".csv",
              ["d", "empirical_probability", "exact_marginal", "limit_curve"],
              rows)
    write_json(args.out + ".json", spec_metadata(spec, weight))
    print(f"wrote {args.out}.csv and {args.out}.json ({weight} samples)")
    return 0


def _add_run_flags(p: argparse.ArgumentParser, steps_required: bool) -> None:
    p.add_argument("--model", type=int, choices=(1, 2), required=True,
                   help="1 = oriented-edge moves, 2 = uniform-dollar moves")
    p.add_argument("--graph", required=True,
                   help="inline spec (complete:1000, grid:20x30, "
                        "er:100:0.05:SEED) or a JSON graph file")
    p.add_argument("--init", default="equal:100",
                   help="equal:K, all-at:V, or a JSON config file")
    p.add_argument("--money", type=parse_count, default=None,
                   help="total money (required for all-at)")
    p.add_argument("--steps", type=parse_count, required=steps_required,
                   help="post-burn-in steps (accepts 1e7 notation)")
    p.add_argument("--burn-in", type=parse_count, default=None,
                   help="steps discarded before sampling (default 10*N*M)")
    p.add_argument("--sample-every", "--stride", dest="stride",
                   type=parse_count, default=None,
                   help="steps between snapshots (default N*M)")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--estimator", choices=("snapshot", "occupation"),
                   default=None,
                   help="default: snapshot for model 1, occupation for 2")
    p.add_argument("--vertex", type=int, default=None,
                   help="track this vertex only (default: pool on "
                        "exchangeable families, else vertex 0)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output base path")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="moneychains",
        description="Simulate and exactly analyze money-exchange chains "
                    "on connected graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-graph", help="write a graph JSON file")
    p.add_argument("spec", help="inline graph spec, e.g. er:100:0.05:7")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_generate_graph)

    p = sub.add_parser("simulate", help="run a chain, write histogram CSV")
    _add_run_flags(p, steps_required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("exact", help="closed-form marginal and limit curve")
    p.add_argument("--model", type=int, choices=(1, 2), required=True)
    p.add_argument("--graph", default=None)
    p.add_argument("--agents", type=parse_count, default=None,
                   help="number of agents (model 1 without a graph)")
    p.add_argument("--money", type=parse_count, default=None)
    p.add_argument("--vertex", type=int, default=None)
    p.add_argument("--dmax", type=parse_count, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("oracle-check",
                       help="exact verification of one small instance")
    p.add_argument("--model", type=int, choices=(1, 2), required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--money", type=parse_count, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_oracle_check)

    p = sub.add_parser("figure",
                       help="simulate plus exact overlay in one CSV")
    _add_run_flags(p, steps_required=True)
    p.add_argument("--dmax", type=parse_count, default=None)
    p.set_defaults(fn=cmd_figure)
    return ap


def entrypoint(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, graphs.GraphError, SpaceTooLargeError,
            stats.NotNormalizedError, stats.InsufficientSamplesError,
            dynamics.TotalMismatchError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(entrypoint())
