"""Interference graphs, maximal independent set enumeration, interference degrees.

Links are nodes of the interference graph; an edge between two links means
they cannot transmit in the same slot. All set machinery works on index
bitmasks, so graphs are capped at a small number of links (default 16,
override with FLPF_MAX_LINKS).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AsymmetricInterference, EmptyActiveSet, LimitExceeded, SelfInterference

DEFAULT_MAX_LINKS = 16


def enumeration_cap() -> int:
    raw = os.environ.get("FLPF_MAX_LINKS")
    if raw is None:
        return DEFAULT_MAX_LINKS
    return int(raw)


@dataclass(frozen=True, order=True)
class LinkId:
    index: int
    label: str

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class InterferenceGraph:
    """Immutable interference relation over an ordered set of links.

    ``interference[i]`` is the set of link indices that conflict with link i
    (symmetric, irreflexive). ``nbr_mask[i]`` is the same set as a bitmask.
    """

    links: tuple[LinkId, ...]
    interference: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "nbr_mask",
            tuple(sum(1 << j for j in s) for s in self.interference),
        )

    @classmethod
    def from_edges(cls, labels: Sequence[str], edges: Iterable[tuple[str, str]]) -> "InterferenceGraph":
        if len(set(labels)) != len(labels):
            raise ValueError("link labels must be unique")
        index = {lab: i for i, lab in enumerate(labels)}
        sets: list[set[int]] = [set() for _ in labels]
        for u, v in edges:
            iu, iv = index[u], index[v]
            if iu == iv:
                raise SelfInterference(u)
            sets[iu].add(iv)
            sets[iv].add(iu)
        links = tuple(LinkId(i, lab) for i, lab in enumerate(labels))
        return cls(links, tuple(frozenset(s) for s in sets))

    @property
    def num_links(self) -> int:
        return len(self.links)

    def link(self, key) -> LinkId:
        """Resolve an index, label, or LinkId to the canonical LinkId."""
        if isinstance(key, LinkId):
            return self.links[key.index]
        if isinstance(key, int):
            return self.links[key]
        for l in self.links:
            if l.label == key:
                return l
        raise KeyError(key)

    def indices(self, keys) -> tuple[int, ...]:
        return tuple(self.link(k).index for k in keys)

    def full_mask(self) -> int:
        return (1 << self.num_links) - 1


def validate_graph(g: InterferenceGraph) -> None:
    """Check symmetry and irreflexivity; raise on the first violation."""
    for i, s in enumerate(g.interference):
        if i in s:
            raise SelfInterference(g.links[i].label)
        for j in s:
            if i not in g.interference[j]:
                raise AsymmetricInterference(g.links[i].label, g.links[j].label)


def _independent_mask(v: int, nbr: Sequence[int], verts: int) -> int:
    """Vertices of ``verts`` compatible with v (non-adjacent, not v itself)."""
    return verts & ~nbr[v] & ~(1 << v)


def _enumerate_maximal(nbr: Sequence[int], verts: int) -> list[int]:
    """All maximal independent sets of the subgraph induced on ``verts``.

    Pivoted Bron-Kerbosch on the complement graph; returns bitmasks. The
    empty vertex set yields the single empty set, which callers render as
    one all-zero column.
    """
    out: list[int] = []
    compat = {}

    def comp(v: int) -> int:
        m = compat.get(v)
        if m is None:
            m = _independent_mask(v, nbr, verts)
            compat[v] = m
        return m

    def bk(r: int, p: int, x: int):
        if p == 0 and x == 0:
            out.append(r)
            return
        # pivot: vertex of P|X compatible with the most of P
        pool = p | x
        best_v, best_n = -1, -1
        m = pool
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            n = (p & comp(v)).bit_count()
            if n > best_n:
                best_v, best_n = v, n
        cand = p & ~comp(best_v)
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            bk(r | (1 << v), p & comp(v), x & comp(v))
            p &= ~(1 << v)
            x |= 1 << v

    bk(0, verts, 0)
    return out


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        out.append((mask & -mask).bit_length() - 1)
        mask &= mask - 1
    return tuple(out)


@dataclass(frozen=True)
class ScheduleMatrix:
    """Columns are the maximal independent sets of the induced subgraph on
    ``active``, written as length-len(row_links) vectors in row order.

    Rows for links outside ``active`` are zero. Entries are 1 for plain
    ON/OFF channels; the fading module scales them by channel values.
    """

    row_links: tuple[LinkId, ...]
    active: frozenset[int]
    columns: tuple[tuple, ...]

    @property
    def num_rows(self) -> int:
        return len(self.row_links)

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def column_sums(self) -> tuple:
        return tuple(sum(col) for col in self.columns)

    def column_support(self, c: int) -> tuple[int, ...]:
        """Link indices with a nonzero entry in column c."""
        return tuple(
            l.index for l, v in zip(self.row_links, self.columns[c]) if v
        )

    def scaled(self, values_by_index: dict) -> "ScheduleMatrix":
        """Replace unit entries by per-link channel values."""
        cols = tuple(
            tuple(values_by_index[l.index] * v if v else 0 for l, v in zip(self.row_links, col))
            for col in self.columns
        )
        return ScheduleMatrix(self.row_links, self.active, cols)


def maximal_independent_sets(g: InterferenceGraph, active, rows) -> ScheduleMatrix:
    """Schedule matrix for the given active subset, with rows indexed by ``rows``.

    ``active`` must be a subset of ``rows``. Columns are ordered
    lexicographically by their sorted member indices so output is
    reproducible. An empty active set gives exactly one all-zero column.
    """
    row_idx = sorted(g.indices(rows))
    active_idx = set(g.indices(active))
    if not active_idx.issubset(row_idx):
        raise ValueError("active set must be contained in the row set")
    cap = enumeration_cap()
    if len(row_idx) > cap:
        raise LimitExceeded(len(row_idx), cap)

    verts = sum(1 << i for i in active_idx)
    masks = _enumerate_maximal(g.nbr_mask, verts)
    sets = sorted(_mask_to_tuple(m) for m in masks)
    columns = tuple(
        tuple(1 if i in s else 0 for i in row_idx) for s in map(set, sets)
    )
    return ScheduleMatrix(
        tuple(g.links[i] for i in row_idx), frozenset(active_idx), columns
    )


def _max_independent_size(nbr: Sequence[int], verts: int) -> int:
    if verts == 0:
        return 0
    return max(m.bit_count() for m in _enumerate_maximal(nbr, verts))


def interference_degree_link(g: InterferenceGraph, l, within=None) -> int:
    """Largest set of mutually compatible links inside l's closed neighborhood.

    ``within`` restricts the neighborhood to an induced subgraph; the link
    itself must belong to it. Always at least 1.
    """
    li = g.link(l).index
    closed = (1 << li) | g.nbr_mask[li]
    if within is not None:
        closed &= within
    return _max_independent_size(g.nbr_mask, closed)


def interference_degree_graph(g: InterferenceGraph, active=None) -> int:
    """Interference degree of the subgraph induced on ``active`` (default: all)."""
    if active is None:
        idx = list(range(g.num_links))
    else:
        idx = sorted(set(g.indices(active)))
    if not idx:
        raise EmptyActiveSet("interference degree needs a nonempty link set")
    within = sum(1 << i for i in idx)
    return max(interference_degree_link(g, i, within=within) for i in idx)
