"""Per-vertex random color lists drawn with replacement from ``[1, k+1]``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidParameters, InvalidSplit


def default_list_size(n: int, k: int, scale: float = 2.0, cap: bool = True) -> int:
    """``min(k+1, ceil(scale * log2(n)**2))``, at least 1.

    With ``cap=False`` the ``k+1`` ceiling is skipped; lists are drawn with
    replacement, so longer lists are still meaningful (the two-phase
    witness coloring splits them in two).
    """
    raw = math.ceil(scale * math.log2(max(n, 2)) ** 2)
    return max(1, min(k + 1, raw) if cap else raw)


@dataclass(frozen=True, eq=False)
class PaletteLists:
    """Sampled lists, one row of ``s`` colors per vertex (duplicates kept)."""

    k: int
    s: int
    lists: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.lists, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != self.s:
            raise InvalidParameters(f"lists must have shape (n, {self.s}), got {arr.shape}")
        if arr.size and (arr.min() < 1 or arr.max() > self.k + 1):
            raise InvalidParameters(f"list entries must lie in [1, {self.k + 1}]")
        arr.setflags(write=False)
        object.__setattr__(self, "lists", arr)

    @classmethod
    def full(cls, n: int, k: int) -> "PaletteLists":
        """Every vertex gets the whole palette, once each."""
        row = np.arange(1, k + 2, dtype=np.int64)
        return cls(k, k + 1, np.tile(row, (n, 1)))

    @property
    def n(self) -> int:
        return self.lists.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, v) -> tuple[int, ...]:
        return tuple(int(c) for c in self.lists[v])

    def __eq__(self, other):
        return (
            isinstance(other, PaletteLists)
            and (self.k, self.s) == (other.k, other.s)
            and np.array_equal(self.lists, other.lists)
        )

    @cached_property
    def distinct(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(int(c) for c in row) for row in self.lists)

    @cached_property
    def member(self) -> np.ndarray:
        """Boolean ``(n, k+2)`` table, ``member[v, c]`` iff ``c`` is in ``L(v)``."""
        table = np.zeros((self.n, self.k + 2), dtype=np.bool_)
        rows = np.repeat(np.arange(self.n), self.s)
        table[rows, self.lists.ravel()] = True
        return table

    def intersect(self, u: int, v: int) -> bool:
        return not self.distinct[u].isdisjoint(self.distinct[v])


def sample_lists(n: int, k: int, s: int, seed=None) -> PaletteLists:
    """Draw ``s`` independent uniform colors from ``[1, k+1]`` for each of ``n`` vertices.

    One child stream per vertex is spawned from the root seed, so each
    vertex's list depends only on ``(seed, v)``.
    """
    if n < 0:
        raise InvalidParameters(f"n must be non-negative, got {n}")
    if k < 1:
        raise InvalidParameters(f"k must be at least 1, got {k}")
    if s < 1:
        raise InvalidParameters(f"s must be at least 1, got {s}")
    children = np.random.SeedSequence(seed).spawn(n)
    lists = np.empty((n, s), dtype=np.int64)
    for v, child in enumerate(children):
        lists[v] = np.random.default_rng(child).integers(1, k + 2, size=s)
    return PaletteLists(k, s, lists)


def lists_intersect(a: Sequence[int], b: Sequence[int]) -> bool:
    return not set(a).isdisjoint(b)


def split_list(l: Sequence[int], s1: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """First ``s1`` entries and the remainder."""
    if not 1 <= s1 < len(l):
        raise InvalidSplit(f"split point {s1} must satisfy 1 <= s1 < {len(l)}")
    l = tuple(int(c) for c in l)
    return l[:s1], l[s1:]
