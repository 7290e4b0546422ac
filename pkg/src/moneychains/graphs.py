"""Finite connected simple graphs the exchange dynamics run on.

Vertices are dense ids ``0..n-1``.  A ``Graph`` is immutable after
construction and stores, besides the edge list, a CSR adjacency layout and
the flat oriented-edge arrays (``tails``/``heads``) that the samplers index
into.  Construction validates simplicity and connectivity; everything
downstream assumes both.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from collections import deque
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Base class for graph construction failures."""


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedError(GraphError):
    pass


class TooSmallError(GraphError):
    pass


class InvalidParamsError(GraphError):
    pass


class ConnectivityRetryExhaustedError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Validated simple connected graph.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``.
    ``tails``/``heads`` list all ``2E`` oriented edges; drawing a uniform
    index into them is a uniform oriented-edge draw.  ``adj_flat`` between
    ``adj_start[v]`` and ``adj_start[v + 1]`` is the neighbor list of ``v``.
    """

    n: int
    edges: np.ndarray
    degrees: np.ndarray
    adj_start: np.ndarray
    adj_flat: np.ndarray
    tails: np.ndarray
    heads: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj_flat[self.adj_start[v]:self.adj_start[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = int(np.searchsorted(nb, v))
        return i < len(nb) and nb[i] == v

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def build_graph(n: int, edge_list: Sequence[Sequence[int]]) -> Graph:
    """Build and validate a graph from an explicit edge list.

    Rejects ``n < 2`` or an empty edge list (``TooSmallError``), self-loops,
    duplicate edges in either orientation, out-of-range vertex ids, and
    disconnected input.
    """
    if n < 2:
        raise TooSmallError(f"need at least 2 vertices, got n={n}")
    edges = np.asarray(edge_list, dtype=np.int64)
    if edges.size == 0:
        raise TooSmallError("edge list is empty")
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise GraphError(f"edge list must be pairs, got shape {edges.shape}")
    if edges.min() < 0 or edges.max() >= n:
        raise GraphError(f"vertex id outside [0, {n}) in edge list")
    if np.any(edges[:, 0] == edges[:, 1]):
        bad = edges[edges[:, 0] == edges[:, 1]][0]
        raise SelfLoopError(f"self-loop at vertex {int(bad[0])}")
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    canon = lo * n + hi
    if len(np.unique(canon)) != len(canon):
        raise DuplicateEdgeError("duplicate edge in list")

    order = np.argsort(canon, kind="stable")
    edges = np.stack([lo[order], hi[order]], axis=1).astype(np.int32)

    tails = np.concatenate([edges[:, 0], edges[:, 1]]).astype(np.int32)
    heads = np.concatenate([edges[:, 1], edges[:, 0]]).astype(np.int32)
    degrees = np.bincount(tails, minlength=n).astype(np.int64)
    adj_start = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=adj_start[1:])
    by_tail = np.lexsort((heads, tails))  # neighbor lists come out sorted
    adj_flat = heads[by_tail]

    adj = csr_matrix(
        (np.ones(len(tails), dtype=np.int8), (tails, heads)), shape=(n, n))
    ncomp, _ = connected_components(adj, directed=False)
    if ncomp != 1:
        raise DisconnectedError(f"graph has {ncomp} components")

    return Graph(n=n, edges=edges, degrees=degrees, adj_start=adj_start,
                 adj_flat=adj_flat, tails=tails, heads=heads)


def complete(n: int) -> Graph:
    if n < 2:
        raise InvalidParamsError(f"complete graph needs n >= 2, got {n}")
    u, v = np.triu_indices(n, k=1)
    return build_graph(n, np.stack([u, v], axis=1))


def cycle(n: int) -> Graph:
    if n < 3:
        raise InvalidParamsError(f"cycle needs n >= 3, got {n}")
    idx = np.arange(n)
    return build_graph(n, np.stack([idx, (idx + 1) % n], axis=1))


def path(n: int) -> Graph:
    if n < 2:
        raise InvalidParamsError(f"path needs n >= 2, got {n}")
    idx = np.arange(n - 1)
    return build_graph(n, np.stack([idx, idx + 1], axis=1))


def star(n: int) -> Graph:
    """Star on ``n`` vertices: center 0 joined to leaves ``1..n-1``."""
    if n < 2:
        raise InvalidParamsError(f"star needs n >= 2, got {n}")
    leaves = np.arange(1, n)
    return build_graph(n, np.stack([np.zeros(n - 1, dtype=np.int64), leaves],
                                   axis=1))


def grid(width: int, height: int) -> Graph:
    """Open rectangular grid, ``width * height`` vertices in row-major order.

    Not vertex transitive (corners, borders, interior differ), so marginal
    pooling across vertices is off for grids.
    """
    if width < 1 or height < 1 or width * height < 2:
        raise InvalidParamsError(
            f"grid needs width*height >= 2, got {width}x{height}")
    pairs = []
    for r in range(height):
        for c in range(width):
            v = r * width + c
            if c + 1 < width:
                pairs.append((v, v + 1))
            if r + 1 < height:
                pairs.append((v, v + width))
    return build_graph(width * height, pairs)


def erdos_renyi(n: int, p: float, seed: int,
                max_retries: int = 1000) -> Graph:
    """Connected G(n, p) sample; disconnected draws are rejected.

    Each retry consumes fresh randomness from the same generator, so the
    result is a deterministic function of ``(n, p, seed)``.  Raises
    ``ConnectivityRetryExhaustedError`` after ``max_retries`` failures.
    """
    if n < 2:
        raise InvalidParamsError(f"erdos_renyi needs n >= 2, got {n}")
    if not 0.0 < p <= 1.0:
        raise InvalidParamsError(f"erdos_renyi needs p in (0, 1], got {p}")
    rng = np.random.default_rng(seed)
    u, v = np.triu_indices(n, k=1)
    for _ in range(max_retries):
        mask = rng.random(len(u)) < p
        if not mask.any():
            continue
        try:
            return build_graph(n, np.stack([u[mask], v[mask]], axis=1))
        except DisconnectedError:
            continue
    raise ConnectivityRetryExhaustedError(
        f"no connected G({n}, {p}) draw in {max_retries} attempts")


_FAMILIES = ("complete", "cycle", "path", "star", "grid", "erdos_renyi")


def generate(kind: str, params: Mapping[str, object],
             seed: int | None = None) -> Graph:
    """Dispatch to a named generator; ``seed`` is only used by erdos_renyi."""
    if kind == "complete":
        return complete(int(params["n"]))
    if kind == "cycle":
        return cycle(int(params["n"]))
    if kind == "path":
        return path(int(params["n"]))
    if kind == "star":
        return star(int(params["n"]))
    if kind == "grid":
        return grid(int(params["width"]), int(params["height"]))
    if kind == "erdos_renyi":
        if seed is None and "seed" not in params:
            raise InvalidParamsError("erdos_renyi requires a seed")
        use = int(params.get("seed", seed))
        retries = int(params.get("max_retries", 1000))
        return erdos_renyi(int(params["n"]), float(params["p"]), use,
                           max_retries=retries)
    raise InvalidParamsError(
        f"unknown graph kind {kind!r}; known: {', '.join(_FAMILIES)}")


def parse_graph_spec(text: str, seed: int | None = None) -> Graph:
    """Parse an inline graph spec.

    Forms: ``complete:N``, ``cycle:N``, ``path:N``, ``star:N``,
    ``grid:WxH``, ``er:N:P[:SEED]`` (``erdos_renyi`` also accepted).  The
    ER seed falls back to ``seed`` when the spec omits it.
    """
    parts = text.strip().split(":")
    kind = parts[0]
    try:
        if kind in ("complete", "cycle", "path", "star"):
            if len(parts) != 2:
                raise InvalidParamsError(f"expected {kind}:N, got {text!r}")
            return generate(kind, {"n": int(parts[1])})
        if kind == "grid":
            if len(parts) != 2 or "x" not in parts[1]:
                raise InvalidParamsError(f"expected grid:WxH, got {text!r}")
            w, h = parts[1].split("x", 1)
            return generate("grid", {"width": int(w), "height": int(h)})
        if kind in ("er", "erdos_renyi"):
            if len(parts) == 3:
                return generate("erdos_renyi",
                                {"n": int(parts[1]), "p": float(parts[2])},
                                seed=seed)
            if len(parts) == 4:
                return generate("erdos_renyi",
                                {"n": int(parts[1]), "p": float(parts[2]),
                                 "seed": int(parts[3])})
            raise InvalidParamsError(f"expected er:N:P[:SEED], got {text!r}")
    except (ValueError, IndexError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise InvalidParamsError(f"bad graph spec {text!r}: {exc}") from exc
    raise InvalidParamsError(f"unknown graph spec {text!r}")


def is_bipartite(g: Graph) -> bool:
    """True iff the graph is 2-colorable, i.e. has no odd cycle."""
    color = np.full(g.n, -1, dtype=np.int8)
    color[0] = 0
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if color[w] < 0:
                color[w] = 1 - color[v]
                queue.append(int(w))
            elif color[w] == color[v]:
                return False
    return True


def is_regular(g: Graph) -> int | None:
    """Common degree if the graph is regular, else None."""
    d = int(g.degrees[0])
    return d if np.all(g.degrees == d) else None


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[int(u), int(v)] for u, v in g.edges]}


def graph_from_json(obj: Mapping[str, object]) -> Graph:
    try:
        return build_graph(int(obj["n"]), obj["edges"])
    except KeyError as exc:
        raise GraphError(f"graph JSON missing key {exc}") from exc


def save_graph(g: Graph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(g), fh)
        fh.write("\n")


def load_graph(path: str) -> Graph:
    with open(path) as fh:
        return graph_from_json(json.load(fh))
