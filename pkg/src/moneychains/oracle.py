"""Brute-force verification on fully enumerated state spaces.

Everything here is exact: transition matrices hold ``fractions.Fraction``
entries, stationarity is decided by rational linear algebra, and a detailed
balance "violation of zero" really means zero, not 1e-17.  The point is to
check the closed forms in ``exact`` and the samplers in ``dynamics``
against an implementation that shares no code path with either: matrices
are built by enumerating moves state by state, not by evaluating the
kernel formula.

Sizes are limited by enumeration (see ``states.enum_cap``) and, for the
rational solver, by ``EXACT_SOLVE_LIMIT``; larger enumerable spaces fall
back to float power iteration on the lazy chain ``(P + I)/2``, which has
the same stationary vector but never oscillates on periodic chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix

from . import exact
from .dynamics import ModelKind
from .graphs import Graph
from .states import apply_move, count_states, enumerate_configs, rank_config

EXACT_SOLVE_LIMIT = 200
POWER_TOL = 1e-14
POWER_MAX_ITER = 2_000_000


class NotIrreducibleError(ValueError):
    """Operation requires an irreducible chain."""


class DimensionMismatchError(ValueError):
    """Distribution length does not match the matrix size."""


@dataclass
class TransitionMatrix:
    """Sparse exact transition matrix over the enumerated configurations.

    ``states[i]`` is the configuration with rank ``i``; ``rows[i]`` maps
    column rank to the exact probability.  Rows sum to 1 by construction.
    """

    model: ModelKind
    n: int
    m: int
    states: list[tuple[int, ...]]
    rows: list[dict[int, Fraction]]

    @property
    def size(self) -> int:
        return len(self.states)

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i].get(j, Fraction(0))


def build_matrix(model: ModelKind, g: Graph, m: int) -> TransitionMatrix:
    """Enumerate every state's outgoing moves into an exact sparse matrix."""
    model = ModelKind(model)
    state_list = list(enumerate_configs(g.n, m))
    index = {c: i for i, c in enumerate(state_list)}
    two_e = 2 * g.edge_count
    rows: list[dict[int, Fraction]] = []
    for src in state_list:
        row: dict[int, Fraction] = {}
        if model is ModelKind.EDGE_UNIFORM:
            for u, v in g.edges:
                for x, y in ((int(u), int(v)), (int(v), int(u))):
                    dst = apply_move(src, x, y)
                    j = index[dst]
                    row[j] = row.get(j, Fraction(0)) + Fraction(1, two_e)
        elif m == 0:
            row[index[src]] = Fraction(1)
        else:
            for x in range(g.n):
                if src[x] == 0:
                    continue
                share = Fraction(src[x], m * g.degree(x))
                for y in g.neighbors(x):
                    dst = apply_move(src, x, int(y))
                    j = index[dst]
                    row[j] = row.get(j, Fraction(0)) + share
        assert sum(row.values()) == 1
        rows.append(row)
    return TransitionMatrix(model=model, n=g.n, m=m, states=state_list,
                            rows=rows)


def uniform_stationary(size: int) -> list[Fraction]:
    return [Fraction(1, size)] * size


def multinomial_stationary(g: Graph, m: int) -> list[Fraction]:
    return [exact.model2_stationary_prob(g, c)
            for c in enumerate_configs(g.n, m)]


def closed_form_stationary(model: ModelKind, g: Graph, m: int
                           ) -> list[Fraction]:
    """The stationary law each model is proved to have: flat or multinomial."""
    if ModelKind(model) is ModelKind.EDGE_UNIFORM:
        return uniform_stationary(count_states(g.n, m))
    return multinomial_stationary(g, m)


def check_detailed_balance(p: TransitionMatrix,
                           pi: Sequence[Fraction]) -> Fraction:
    """Largest |pi(i) p(i,j) - pi(j) p(j,i)| over ordered pairs."""
    if len(pi) != p.size:
        raise DimensionMismatchError(
            f"distribution has {len(pi)} entries, matrix is {p.size}")
    worst = Fraction(0)
    for i, row in enumerate(p.rows):
        for j, pij in row.items():
            flow = pi[i] * pij - pi[j] * p.entry(j, i)
            if flow < 0:
                flow = -flow
            if flow > worst:
                worst = flow
    return worst


def check_irreducible(p: TransitionMatrix) -> bool:
    """Strong connectivity of the nonzero-transition digraph."""
    fwd = [set(row) for row in p.rows]
    rev: list[set[int]] = [set() for _ in range(p.size)]
    for i, row in enumerate(p.rows):
        for j in row:
            rev[j].add(i)
    for adj in (fwd, rev):
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != p.size:
            return False
    return True


def period(p: TransitionMatrix) -> int:
    """Common period of all states of an irreducible chain.

    Breadth-first levels from state 0; every arc (i, j) closes a walk whose
    length mismatch level(i) + 1 - level(j) feeds a running gcd.
    """
    if not check_irreducible(p):
        raise NotIrreducibleError("period undefined for reducible chain")
    level = {0: 0}
    order = [0]
    head = 0
    while head < len(order):
        i = order[head]
        head += 1
        for j in p.rows[i]:
            if j not in level:
                level[j] = level[i] + 1
                order.append(j)
    g = 0
    for i, row in enumerate(p.rows):
        for j in row:
            g = math.gcd(g, level[i] + 1 - level[j])
    return g


def solve_stationary(p: TransitionMatrix):
    """The unique solution of pi P = pi, sum(pi) = 1.

    Exact rational elimination up to ``EXACT_SOLVE_LIMIT`` states (returns
    Fractions); beyond that, float power iteration on the lazy chain
    ``(P + I)/2`` until successive iterates differ by at most ``POWER_TOL``
    in L1 (returns a float vector).
    """
    if not check_irreducible(p):
        raise NotIrreducibleError("stationary vector not unique")
    if p.size <= EXACT_SOLVE_LIMIT:
        return _solve_exact(p)
    return _solve_power(p)


def _solve_exact(p: TransitionMatrix) -> list[Fraction]:
    k = p.size
    # rows of (P^T - I) with the first equation replaced by normalization
    a = [[Fraction(0)] * (k + 1) for _ in range(k)]
    for j in range(k):
        a[0][j] = Fraction(1)
    a[0][k] = Fraction(1)
    for i, row in enumerate(p.rows):
        for j, pij in row.items():
            if j != 0:
                a[j][i] += pij
    for i in range(1, k):
        a[i][i] -= 1

    for col in range(k):
        piv = next(r for r in range(col, k) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(k):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    pi = [a[i][k] for i in range(k)]
    assert sum(pi) == 1
    return pi


def _solve_power(p: TransitionMatrix) -> np.ndarray:
    data, indices, indptr = [], [], [0]
    for row in p.rows:
        for j, pij in sorted(row.items()):
            indices.append(j)
            data.append(float(pij))
        indptr.append(len(indices))
    mat = csr_matrix((data, indices, indptr), shape=(p.size, p.size))
    x = np.full(p.size, 1.0 / p.size)
    for _ in range(POWER_MAX_ITER):
        nxt = 0.5 * (x @ mat) + 0.5 * x
        nxt /= nxt.sum()
        if np.abs(nxt - x).sum() <= POWER_TOL:
            return nxt
        x = nxt
    raise RuntimeError(f"power iteration did not reach {POWER_TOL}")


def marginal_from_dist(pi: Sequence, n: int, m: int, x: int, d: int):
    """Mass of {configurations with exactly d dollars at x} under pi."""
    total = pi[0] - pi[0]  # zero of whatever numeric type pi carries
    for i, cfg in enumerate(enumerate_configs(n, m)):
        if cfg[x] == d:
            total += pi[i]
    return total


def oracle_report(model: ModelKind, g: Graph, m: int,
                  label: str | None = None) -> dict:
    """End-to-end verification of one instance, as a JSON-ready dict.

    ``max_marginal_error`` compares per-vertex marginals of the solved
    stationary vector against the closed-form laws; with the exact solver
    this is a literal zero on a correct implementation.
    """
    model = ModelKind(model)
    p = build_matrix(model, g, m)
    irreducible = check_irreducible(p)
    per = period(p) if irreducible else 0
    pi_closed = closed_form_stationary(model, g, m)
    db = check_detailed_balance(p, pi_closed)

    max_err = None
    if irreducible:
        pi_solved = solve_stationary(p)
        exact_mode = p.size <= EXACT_SOLVE_LIMIT
        max_err = Fraction(0) if exact_mode else 0.0
        for x in range(g.n):
            for d in range(m + 1):
                got = marginal_from_dist(pi_solved, g.n, m, x, d)
                if model is ModelKind.EDGE_UNIFORM:
                    want = exact.model1_marginal(g.n, m, d)
                else:
                    want = exact.model2_marginal(g, x, m, d)
                err = abs(got - want)
                if err > max_err:
                    max_err = err

    passed = bool(irreducible and db == 0 and max_err is not None
                  and max_err <= 1e-12)
    return {
        "instance": label or f"model={int(model)} {g!r} m={m}",
        "irreducible": irreducible,
        "period": per,
        "max_db_violation": float(db),
        "max_marginal_error": float(max_err) if max_err is not None else None,
        "passed": passed,
    }
