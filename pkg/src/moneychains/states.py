"""Money configurations and the stars-and-bars state space.

A configuration assigns a non-negative dollar count to each of ``n`` agents.
For a fixed total of ``m`` dollars the state space is the set of weak
compositions of ``m`` into ``n`` parts, of size ``C(m + n - 1, n - 1)``.

Configurations are put in bijection with the (n-1)-element subsets of
``{1, ..., m + n - 1}`` by recording the positions of the "bars" that
separate consecutive agents' dollars (``bar_positions`` /
``config_from_bars``).  Ranking and unranking are exact big-integer
computations against that bijection, with configurations ordered by
descending lexicographic order, so ``(2, 0)`` precedes ``(1, 1)`` precedes
``(0, 2)``.  This matches the order produced by ``enumerate_configs`` and is
stable across platforms, which keeps golden tests and oracle matrices
deterministic.
"""

from __future__ import annotations

import math
import os
from typing import Iterator, Sequence

DEFAULT_ENUM_CAP = 10_000_000
ENUM_CAP_ENV = "MONEYCHAINS_ENUM_CAP"


class SpaceTooLargeError(ValueError):
    """State space exceeds the enumeration cap."""


class IndexOutOfRangeError(IndexError):
    """Rank index outside [0, count_states(n, m))."""


def enum_cap() -> int:
    """Current enumeration cap (env var ``MONEYCHAINS_ENUM_CAP`` overrides)."""
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None:
        return DEFAULT_ENUM_CAP
    return int(raw)


def count_states(n: int, m: int) -> int:
    """Number of configurations of ``m`` dollars on ``n`` agents.

    Exact ``C(m + n - 1, n - 1)``; Python integers, so never overflows.
    """
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    if m < 0:
        raise ValueError(f"total money must be non-negative, got m={m}")
    return math.comb(m + n - 1, n - 1)


def check_config(config: Sequence[int], n: int | None = None,
                 total: int | None = None) -> tuple[int, ...]:
    """Validate a configuration and return it as a tuple.

    Checks non-negative integer entries, and optionally the length and sum.
    """
    cfg = tuple(int(c) for c in config)
    if len(cfg) < 1:
        raise ValueError("configuration must have at least one agent")
    if any(c < 0 for c in cfg):
        raise ValueError(f"negative dollar count in {cfg}")
    if n is not None and len(cfg) != n:
        raise ValueError(f"expected {n} agents, got {len(cfg)}")
    if total is not None and sum(cfg) != total:
        raise ValueError(f"expected total {total}, got {sum(cfg)}")
    return cfg


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (m,)
        return
    for c in range(m, -1, -1):
        for rest in _compositions(n - 1, m - c):
            yield (c,) + rest


def enumerate_configs(n: int, m: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every configuration of ``m`` dollars on ``n`` agents in rank order.

    Rank order is descending lexicographic on the count vectors.  Raises
    ``SpaceTooLargeError`` when the space exceeds the enumeration cap.
    """
    total = count_states(n, m)
    limit = enum_cap() if cap is None else cap
    if total > limit:
        raise SpaceTooLargeError(
            f"state space has {total} configurations, cap is {limit}")
    return _compositions(n, m)


def rank_config(config: Sequence[int]) -> int:
    """Rank of a configuration in the ``enumerate_configs`` order.

    At each position the configurations with a larger count there form a
    contiguous block whose size telescopes to a single binomial coefficient,
    so the rank is a sum of ``n - 1`` exact binomials.
    """
    cfg = check_config(config)
    n = len(cfg)
    rem = sum(cfg)
    r = 0
    for i in range(n - 1):
        s = n - i  # slots left, including this one
        c = cfg[i]
        # configurations with a larger count at slot i all precede this one
        r += math.comb(rem - c + s - 2, s - 1)
        rem -= c
    return r


def unrank_config(index: int, n: int, m: int) -> tuple[int, ...]:
    """Configuration at ``index`` in the ``enumerate_configs`` order."""
    total = count_states(n, m)
    if not 0 <= index < total:
        raise IndexOutOfRangeError(
            f"index {index} outside [0, {total}) for n={n}, m={m}")
    r = index
    rem = m
    out = []
    for i in range(n - 1):
        s = n - i
        c = rem
        # walk down from the largest feasible count until the block holds r
        while r >= math.comb(rem - c + s - 1, s - 1):
            c -= 1
        r -= math.comb(rem - c + s - 2, s - 1)
        out.append(c)
        rem -= c
    out.append(rem)
    return tuple(out)


def bar_positions(config: Sequence[int]) -> tuple[int, ...]:
    """Bar positions of a configuration: its image as an (n-1)-subset.

    The i-th bar sits at ``config[0] + ... + config[i-1] + i`` inside
    ``{1, ..., m + n - 1}``; e.g. ``(1, 1, 0) -> (2, 4)``.
    """
    cfg = check_config(config)
    acc = 0
    bars = []
    for i, c in enumerate(cfg[:-1], start=1):
        acc += c
        bars.append(acc + i)
    return tuple(bars)


def config_from_bars(bars: Sequence[int], n: int, m: int) -> tuple[int, ...]:
    """Inverse of ``bar_positions`` for ``n`` agents and total ``m``."""
    pos = tuple(int(b) for b in bars)
    if len(pos) != n - 1:
        raise ValueError(f"expected {n - 1} bars, got {len(pos)}")
    if any(b2 <= b1 for b1, b2 in zip(pos, pos[1:])):
        raise ValueError(f"bar positions must be strictly increasing: {pos}")
    if pos and not (1 <= pos[0] and pos[-1] <= m + n - 1):
        raise ValueError(f"bar positions must lie in [1, {m + n - 1}]: {pos}")
    prev = 0
    out = []
    for b in pos:
        out.append(b - prev - 1)
        prev = b
    out.append(m + n - 1 - prev)
    return tuple(out)


def apply_move(config: Sequence[int], x: int, y: int) -> tuple[int, ...]:
    """Move one dollar from agent ``x`` to agent ``y``.

    A lawful no-op when ``x`` holds nothing.  ``x`` and ``y`` must differ.
    """
    cfg = check_config(config)
    if x == y:
        raise ValueError("source and target agents must differ")
    if not (0 <= x < len(cfg) and 0 <= y < len(cfg)):
        raise ValueError(f"agents ({x}, {y}) out of range for {len(cfg)} agents")
    if cfg[x] == 0:
        return cfg
    out = list(cfg)
    out[x] -= 1
    out[y] += 1
    return tuple(out)
