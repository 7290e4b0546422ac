"""Step-by-step and long-run execution of the two exchange dynamics.

Model selection is ``ModelKind``: ``EDGE_UNIFORM`` picks a uniform oriented
edge per step and pushes one dollar along it (no-op on an empty source);
``DOLLAR_UNIFORM`` picks a uniform dollar bill and walks it to a uniform
neighbor of its current vertex.

The hot path pre-draws randomness in batches from a PCG64 generator and
hands flat arrays to compiled kernels, so a multi-billion-step run stays in
the tens of seconds while remaining a deterministic function of the seed.
Single-step functions (``step_model1``/``step_model2``) implement the same
laws one draw at a time and exist for tests and tiny runs; they do not
promise draw-for-draw agreement with the batched path.

Trajectory-summary helpers: ``run`` with observers fired on a stride, and
``run_occupation`` which accumulates, exactly and in integer arithmetic,
the per-dollar-count occupation time of a vertex set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .graphs import Graph
from .states import check_config

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap

BATCH = 1 << 20


class TotalMismatchError(ValueError):
    """Transition queried between configurations with different totals."""


class ConservationError(RuntimeError):
    """A step changed the total amount of money."""


class ModelKind(IntEnum):
    EDGE_UNIFORM = 1
    DOLLAR_UNIFORM = 2


@dataclass
class ChainState:
    """Mutable state of one running chain.

    ``bills`` is the per-dollar vertex array, maintained only for
    ``DOLLAR_UNIFORM``; its multiset of positions always equals ``config``.
    """

    model: ModelKind
    config: np.ndarray
    bills: np.ndarray | None
    step: int
    rng: np.random.Generator

    @property
    def n(self) -> int:
        return int(self.config.shape[0])

    @property
    def total(self) -> int:
        return int(self.config.sum())


def replica_rng(master_seed: int, replica_id: int = 0) -> np.random.Generator:
    """Independent stream for one replica, derived from the master seed."""
    return np.random.default_rng([master_seed, replica_id])


def make_state(model: ModelKind, g: Graph, initial: Sequence[int],
               seed: int | None = None,
               rng: np.random.Generator | None = None) -> ChainState:
    """Fresh ChainState at ``initial``; pass either a seed or a generator."""
    cfg = check_config(initial, n=g.n)
    config = np.asarray(cfg, dtype=np.int64)
    if rng is None:
        rng = np.random.default_rng(seed)
    model = ModelKind(model)
    bills = None
    if model is ModelKind.DOLLAR_UNIFORM:
        bills = np.repeat(np.arange(g.n, dtype=np.int64), config)
    return ChainState(model=model, config=config, bills=bills, step=0, rng=rng)


def check_bill_consistency(state: ChainState) -> None:
    """Assert the bill array and the count vector describe the same money."""
    if state.bills is None:
        return
    counted = np.bincount(state.bills, minlength=state.n)
    if not np.array_equal(counted, state.config):
        raise ConservationError("bill array inconsistent with counts")


def step_model1(state: ChainState, g: Graph) -> ChainState:
    """One oriented-edge move: uniform edge, uniform direction."""
    r = int(state.rng.integers(0, 2 * g.edge_count))
    e, flip = r >> 1, r & 1
    u, v = int(g.edges[e, 0]), int(g.edges[e, 1])
    x, y = (v, u) if flip else (u, v)
    if state.config[x] > 0:
        state.config[x] -= 1
        state.config[y] += 1
    state.step += 1
    return state


def step_model2(state: ChainState, g: Graph) -> ChainState:
    """One dollar-bill move: uniform bill, then uniform neighbor."""
    m = state.total
    if m == 0:
        state.step += 1
        return state
    b = int(state.rng.integers(0, m))
    x = int(state.bills[b])
    k = int(state.rng.random() * g.degree(x))
    y = int(g.adj_flat[g.adj_start[x] + k])
    state.bills[b] = y
    state.config[x] -= 1
    state.config[y] += 1
    state.step += 1
    return state


def step(state: ChainState, g: Graph) -> ChainState:
    if state.model is ModelKind.EDGE_UNIFORM:
        return step_model1(state, g)
    return step_model2(state, g)


@njit(cache=True)
def _kernel_m1(config, eu, ev, draws):
    for i in range(draws.shape[0]):
        r = draws[i]
        e = r >> 1
        if r & 1:
            x, y = ev[e], eu[e]
        else:
            x, y = eu[e], ev[e]
        if config[x] > 0:
            config[x] -= 1
            config[y] += 1


@njit(cache=True)
def _kernel_m2(config, bills, adj_start, adj_flat, bidx, unif):
    for i in range(bidx.shape[0]):
        b = bidx[i]
        x = bills[b]
        a0 = adj_start[x]
        deg = adj_start[x + 1] - a0
        y = adj_flat[a0 + np.int64(unif[i] * deg)]
        bills[b] = y
        config[x] -= 1
        config[y] += 1


@njit(cache=True)
def _kernel_m1_checked(config, eu, ev, draws, total):
    for i in range(draws.shape[0]):
        r = draws[i]
        e = r >> 1
        if r & 1:
            x, y = ev[e], eu[e]
        else:
            x, y = eu[e], ev[e]
        if config[x] > 0:
            config[x] -= 1
            config[y] += 1
        if config.sum() != total:
            return i
    return -1


@njit(cache=True)
def _kernel_m2_checked(config, bills, adj_start, adj_flat, bidx, unif, total):
    for i in range(bidx.shape[0]):
        b = bidx[i]
        x = bills[b]
        a0 = adj_start[x]
        deg = adj_start[x + 1] - a0
        y = adj_flat[a0 + np.int64(unif[i] * deg)]
        bills[b] = y
        config[x] -= 1
        config[y] += 1
        if config.sum() != total:
            return i
    return -1


@njit(cache=True)
def _kernel_m1_occ(config, eu, ev, draws, tracked, hist, acc, last, t0):
    t = t0
    for i in range(draws.shape[0]):
        r = draws[i]
        e = r >> 1
        if r & 1:
            x, y = ev[e], eu[e]
        else:
            x, y = eu[e], ev[e]
        if config[x] > 0:
            t1 = t + 1
            if tracked[x]:
                cx = config[x]
                acc[cx] += hist[cx] * (t1 - last[cx])
                last[cx] = t1
                hist[cx] -= 1
                acc[cx - 1] += hist[cx - 1] * (t1 - last[cx - 1])
                last[cx - 1] = t1
                hist[cx - 1] += 1
            if tracked[y]:
                cy = config[y]
                acc[cy] += hist[cy] * (t1 - last[cy])
                last[cy] = t1
                hist[cy] -= 1
                acc[cy + 1] += hist[cy + 1] * (t1 - last[cy + 1])
                last[cy + 1] = t1
                hist[cy + 1] += 1
            config[x] -= 1
            config[y] += 1
        t += 1
    return t


@njit(cache=True)
def _kernel_m2_occ(config, bills, adj_start, adj_flat, bidx, unif,
                   tracked, hist, acc, last, t0):
    t = t0
    for i in range(bidx.shape[0]):
        b = bidx[i]
        x = bills[b]
        a0 = adj_start[x]
        deg = adj_start[x + 1] - a0
        y = adj_flat[a0 + np.int64(unif[i] * deg)]
        t1 = t + 1
        if tracked[x]:
            cx = config[x]
            acc[cx] += hist[cx] * (t1 - last[cx])
            last[cx] = t1
            hist[cx] -= 1
            acc[cx - 1] += hist[cx - 1] * (t1 - last[cx - 1])
            last[cx - 1] = t1
            hist[cx - 1] += 1
        if tracked[y]:
            cy = config[y]
            acc[cy] += hist[cy] * (t1 - last[cy])
            last[cy] = t1
            hist[cy] -= 1
            acc[cy + 1] += hist[cy + 1] * (t1 - last[cy + 1])
            last[cy + 1] = t1
            hist[cy + 1] += 1
        bills[b] = y
        config[x] -= 1
        config[y] += 1
        t += 1
    return t


def _draws_m1(rng: np.random.Generator, g: Graph, k: int) -> np.ndarray:
    return rng.integers(0, 2 * g.edge_count, size=k, dtype=np.int64)


def _chunks(total: int, boundary: int) -> list[int]:
    out = []
    done = 0
    while done < total:
        to_boundary = boundary - (done % boundary) if boundary else total - done
        out.append(min(BATCH, total - done, to_boundary))
        done += out[-1]
    return out


def run(state: ChainState, g: Graph, steps: int,
        observers: Sequence[Callable[[ChainState], None]] = (),
        stride: int | None = None) -> ChainState:
    """Advance ``steps`` steps, firing observers every ``stride`` steps.

    Observers are called with the (mutated) state after each completed
    stride, counted from the start of this call; the default stride is one
    sweep, ``n * total``.  The trajectory is a deterministic function of the
    generator state on entry.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    m = state.total
    if stride is None:
        stride = max(state.n * m, 1)
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    eu = np.ascontiguousarray(g.edges[:, 0].astype(np.int64))
    ev = np.ascontiguousarray(g.edges[:, 1].astype(np.int64))
    done = 0
    boundary = stride if observers else 0
    for k in _chunks(steps, boundary):
        if state.model is ModelKind.EDGE_UNIFORM:
            _kernel_m1(state.config, eu, ev, _draws_m1(state.rng, g, k))
        elif m > 0:
            bidx = state.rng.integers(0, m, size=k, dtype=np.int64)
            unif = state.rng.random(size=k)
            _kernel_m2(state.config, state.bills, g.adj_start,
                       g.adj_flat, bidx, unif)
        done += k
        state.step += k
        if observers and done % stride == 0:
            for obs in observers:
                obs(state)
    return state


def run_occupation(state: ChainState, g: Graph, steps: int,
                   vertices: Sequence[int] | None = None
                   ) -> tuple[np.ndarray, int]:
    """Exact occupation times of dollar counts over a window of steps.

    Returns ``(counts, weight)`` where ``counts[d]`` is the number of
    (vertex, step) pairs with the vertex holding exactly ``d`` dollars at
    that step, over the tracked vertices and the ``steps`` configurations
    seen at the start of each step.  ``weight = len(vertices) * steps``, so
    ``counts / weight`` is the time-average estimate of the dollar-count
    law.  Integer arithmetic throughout; accumulation is event-driven, so
    cost per step does not depend on the money total.
    """
    if steps < 1:
        raise ValueError(f"need at least one step, got {steps}")
    m = state.total
    tracked = np.zeros(state.n, dtype=np.bool_)
    if vertices is None:
        tracked[:] = True
    else:
        tracked[np.asarray(vertices, dtype=np.int64)] = True
    nt = int(tracked.sum())
    if nt == 0:
        raise ValueError("no vertices tracked")

    hist = np.bincount(state.config[tracked], minlength=m + 1).astype(np.int64)
    acc = np.zeros(m + 1, dtype=np.int64)
    last = np.zeros(m + 1, dtype=np.int64)
    eu = np.ascontiguousarray(g.edges[:, 0].astype(np.int64))
    ev = np.ascontiguousarray(g.edges[:, 1].astype(np.int64))
    t = 0
    for k in _chunks(steps, 0):
        if state.model is ModelKind.EDGE_UNIFORM:
            t = _kernel_m1_occ(state.config, eu, ev,
                               _draws_m1(state.rng, g, k),
                               tracked, hist, acc, last, t)
        elif m > 0:
            bidx = state.rng.integers(0, m, size=k, dtype=np.int64)
            unif = state.rng.random(size=k)
            t = _kernel_m2_occ(state.config, state.bills, g.adj_start,
                               g.adj_flat, bidx, unif,
                               tracked, hist, acc, last, t)
        else:
            t += k
        state.step += k
    acc += hist * (steps - last)
    return acc, nt * steps


def run_checked(state: ChainState, g: Graph, steps: int) -> ChainState:
    """Like ``run`` but verifies money conservation after every step."""
    m = state.total
    for k in _chunks(steps, 0):
        if state.model is ModelKind.EDGE_UNIFORM:
            eu = np.ascontiguousarray(g.edges[:, 0].astype(np.int64))
            ev = np.ascontiguousarray(g.edges[:, 1].astype(np.int64))
            bad = _kernel_m1_checked(state.config, eu, ev,
                                     _draws_m1(state.rng, g, k), m)
        elif m > 0:
            bidx = state.rng.integers(0, m, size=k, dtype=np.int64)
            unif = state.rng.random(size=k)
            bad = _kernel_m2_checked(state.config, state.bills, g.adj_start,
                                     g.adj_flat, bidx, unif, m)
        else:
            bad = -1
        if bad >= 0:
            raise ConservationError(
                f"total changed at step {state.step + bad}")
        state.step += k
    if state.model is ModelKind.DOLLAR_UNIFORM:
        check_bill_consistency(state)
    return state


def _single_move_endpoints(src: tuple[int, ...], dst: tuple[int, ...]):
    """Return (x, y) if dst is src with one dollar moved x to y, else None."""
    downs = [i for i, (a, b) in enumerate(zip(src, dst)) if b - a == -1]
    ups = [i for i, (a, b) in enumerate(zip(src, dst)) if b - a == 1]
    others = sum(1 for a, b in zip(src, dst) if abs(b - a) > 1)
    if others or len(downs) != 1 or len(ups) != 1:
        return None
    return downs[0], ups[0]


def transition_prob(model: ModelKind, g: Graph, src: Sequence[int],
                    dst: Sequence[int]) -> Fraction:
    """Exact one-step probability from ``src`` to ``dst``.

    Oriented-edge model: each lawful move has mass 1/(2E); the diagonal
    collects the mass of oriented edges whose source vertex is empty.
    Dollar model: mass src[x]/(total * deg(x)) for a move along an edge,
    zero diagonal whenever any money exists; with zero total the chain is
    the identity.
    """
    model = ModelKind(model)
    a = check_config(src, n=g.n)
    b = check_config(dst, n=g.n)
    m = sum(a)
    if m != sum(b):
        raise TotalMismatchError(f"totals differ: {m} vs {sum(b)}")
    two_e = 2 * g.edge_count

    if model is ModelKind.EDGE_UNIFORM:
        if a == b:
            empty_mass = sum(g.degree(z) for z in range(g.n) if a[z] == 0)
            return Fraction(empty_mass, two_e)
        ends = _single_move_endpoints(a, b)
        if ends is None:
            return Fraction(0)
        x, y = ends
        if a[x] > 0 and g.has_edge(x, y):
            return Fraction(1, two_e)
        return Fraction(0)

    if m == 0:
        return Fraction(1 if a == b else 0)
    if a == b:
        return Fraction(0)
    ends = _single_move_endpoints(a, b)
    if ends is None:
        return Fraction(0)
    x, y = ends
    if g.has_edge(x, y):
        return Fraction(a[x], m * g.degree(x))
    return Fraction(0)
