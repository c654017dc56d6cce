"""Shared fixtures and independent test-side oracles."""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from flpf import InterferenceGraph, from_explicit


@pytest.fixture
def four_link():
    """Four links where 2 conflicts with everyone and 3-4 conflict too."""
    return InterferenceGraph.from_edges(
        ["1", "2", "3", "4"], [("1", "2"), ("2", "3"), ("2", "4"), ("3", "4")]
    )


@pytest.fixture
def path3():
    return InterferenceGraph.from_edges(["a", "b", "c"], [("a", "b"), ("b", "c")])


@pytest.fixture
def path3_fading(path3):
    return from_explicit(path3, ["110", "011", "111"], [Fraction(1, 3)] * 3)


@pytest.fixture
def hexagon():
    labels = list("abcdef")
    edges = [(labels[i], labels[(i + 1) % 6]) for i in range(6)]
    return InterferenceGraph.from_edges(labels, edges)


@pytest.fixture
def single_link():
    return InterferenceGraph.from_edges(["l"], [])


# -- independent oracles -------------------------------------------------------


def brute_force_maximal_sets(g, active_idx):
    """All maximal independent sets by scanning every subset: the definition,
    verbatim. Returns sorted tuples of indices."""
    active = sorted(active_idx)

    def independent(sub):
        return all(
            j not in g.interference[i] for i, j in combinations(sub, 2)
        )

    inds = [set(s) for r in range(len(active) + 1)
            for s in combinations(active, r) if independent(s)]
    maximal = [
        s for s in inds
        if not any(s < t for t in inds)
    ]
    return sorted(tuple(sorted(s)) for s in maximal)


def random_instance(rng: random.Random, max_links: int = 5, max_states: int = 4):
    """Random graph + random explicit ON/OFF fading, reproducible."""
    k = rng.randint(1, max_links)
    labels = [chr(ord("a") + i) for i in range(k)]
    edges = [
        (labels[i], labels[j])
        for i in range(k)
        for j in range(i + 1, k)
        if rng.random() < 0.5
    ]
    g = InterferenceGraph.from_edges(labels, edges)
    n_states = rng.randint(1, min(max_states, 2**k))
    pats = rng.sample(range(2**k), n_states)
    states = [tuple((p >> i) & 1 for i in range(k)) for p in pats]
    weights = [rng.randint(1, 10) for _ in states]
    total = sum(weights)
    f = from_explicit(g, states, [Fraction(w, total) for w in weights])
    return g, f
