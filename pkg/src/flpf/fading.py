"""Fading structures: distributions over global channel states.

A global state assigns one channel value per link. ON/OFF structures use
values in {0,1}; multi-state structures use any nonnegative rationals.
Probabilities are exact rationals everywhere on the analysis side; floats
appear only when the simulator samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import (
    DuplicateState,
    LimitExceeded,
    NonIntegerChannelValue,
    ProbabilitiesDontSumToOne,
    ProbabilityOutOfRange,
)
from .interference import InterferenceGraph, LinkId, ScheduleMatrix, enumeration_cap, maximal_independent_sets


def _norm_value(v):
    """Canonicalize channel values: integral rationals become ints."""
    f = Fraction(v)
    if f < 0:
        raise ProbabilityOutOfRange(f"channel value {v} is negative")
    return int(f) if f.denominator == 1 else f


@dataclass(frozen=True)
class GlobalState:
    """Per-link channel values, aligned with the owning structure's links."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_norm_value(v) for v in self.values))

    @property
    def on_positions(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v)

    def restrict(self, positions) -> "GlobalState":
        return GlobalState(tuple(self.values[i] for i in positions))

    def pattern(self) -> str:
        """Compact display: '110' for ON/OFF, '(1,2,0)' otherwise."""
        if all(v in (0, 1) for v in self.values):
            return "".join("1" if v else "0" for v in self.values)
        return "(" + ",".join(str(v) for v in self.values) + ")"


@dataclass(frozen=True)
class FadingStructure:
    """Probability distribution over global states of ``links``.

    States are deduplicated, zero-probability states dropped, and the
    support kept sorted by value tuple so equal distributions compare equal
    and downstream LPs are reproducible.
    """

    links: tuple[LinkId, ...]
    states: tuple[tuple[GlobalState, Fraction], ...]

    def __post_init__(self):
        k = len(self.links)
        seen = set()
        total = Fraction(0)
        kept = []
        for state, prob in self.states:
            if len(state.values) != k:
                raise ValueError(
                    f"state {state.pattern()} has {len(state.values)} values, expected {k}"
                )
            p = Fraction(prob)
            if p < 0:
                raise ProbabilityOutOfRange(f"probability {p} is negative")
            total += p
            if state.values in seen:
                raise DuplicateState(state.pattern())
            seen.add(state.values)
            if p > 0:
                kept.append((state, p))
        if total != 1:
            raise ProbabilitiesDontSumToOne(total)
        kept.sort(key=lambda sp: sp[0].values)
        object.__setattr__(self, "states", tuple(kept))

    @property
    def mode(self) -> str:
        onoff = all(
            v in (0, 1) for state, _ in self.states for v in state.values
        )
        return "onoff" if onoff else "multistate"

    @property
    def support_size(self) -> int:
        return len(self.states)

    def probability(self, state: GlobalState) -> Fraction:
        for s, p in self.states:
            if s.values == state.values:
                return p
        return Fraction(0)

    def value_matrix(self):
        """Support as a (num_states, num_links) array of exact values."""
        return [list(s.values) for s, _ in self.states]

    def capacity_matrix(self) -> np.ndarray:
        """Integer per-link capacities for the simulator, one row per state."""
        rows = []
        for state, _ in self.states:
            row = []
            for v in state.values:
                if not isinstance(v, int):
                    raise NonIntegerChannelValue(
                        f"channel value {v} is not an integer packet capacity"
                    )
                row.append(v)
            rows.append(row)
        return np.array(rows, dtype=np.int64)

    def probabilities_float(self) -> np.ndarray:
        return np.array([float(p) for _, p in self.states], dtype=np.float64)


def from_iid_bernoulli(g: InterferenceGraph, p) -> FadingStructure:
    """Independent ON/OFF fading: each link is ON with probability p.

    Produces the full 2^K product distribution (zero-probability states are
    dropped, so p=0 and p=1 collapse to a single state).
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ProbabilityOutOfRange(f"p = {p} outside [0, 1]")
    k = g.num_links
    cap = enumeration_cap()
    if k > cap:
        raise LimitExceeded(k, cap)
    q = 1 - p
    states = []
    for bits in product((0, 1), repeat=k):
        n_on = sum(bits)
        prob = p**n_on * q ** (k - n_on)
        states.append((GlobalState(bits), prob))
    return FadingStructure(g.links, tuple(states))


def from_explicit(g: InterferenceGraph, states, probs) -> FadingStructure:
    """Structure from explicit (values, probability) pairs.

    ``states`` may be value tuples, '110'-style patterns, or GlobalState.
    """
    parsed = []
    for s in states:
        if isinstance(s, GlobalState):
            parsed.append(s)
        elif isinstance(s, str):
            parsed.append(GlobalState(tuple(int(c) for c in s)))
        else:
            parsed.append(GlobalState(tuple(s)))
    return FadingStructure(g.links, tuple(zip(parsed, map(Fraction, probs))))


def marginal(f: FadingStructure, L) -> FadingStructure:
    """Distribution of the state restricted to the links of L.

    States agreeing on L are merged with their probabilities summed exactly.
    """
    positions = sorted(
        i for i, link in enumerate(f.links) if link in _link_set(f, L)
    )
    merged: dict[tuple, Fraction] = {}
    for state, prob in f.states:
        key = tuple(state.values[i] for i in positions)
        merged[key] = merged.get(key, Fraction(0)) + prob
    sub_links = tuple(f.links[i] for i in positions)
    states = tuple((GlobalState(vals), p) for vals, p in merged.items())
    return FadingStructure(sub_links, states)


def _link_set(f: FadingStructure, L) -> set[LinkId]:
    out = set()
    by_label = {link.label: link for link in f.links}
    by_index = {link.index: link for link in f.links}
    for item in L:
        if isinstance(item, LinkId):
            out.add(item)
        elif isinstance(item, int):
            out.add(by_index[item])
        else:
            out.add(by_label[item])
    return out


def sample(f: FadingStructure, rng: np.random.Generator) -> GlobalState:
    """One draw from the structure; deterministic given the generator state."""
    idx = rng.choice(f.support_size, p=f.probabilities_float())
    return f.states[idx][0]


def sample_state_indices(f: FadingStructure, rng: np.random.Generator, n: int) -> np.ndarray:
    """n i.i.d. support indices, for bulk capacity generation."""
    return rng.choice(f.support_size, size=n, p=f.probabilities_float())


def schedule_matrix_for_state(
    g: InterferenceGraph, state: GlobalState, rows, state_links=None
) -> ScheduleMatrix:
    """Schedule matrix of one channel state: maximal independent sets over the
    links with nonzero value, entries scaled by the channel values.

    ``state_links`` names the links the state's values refer to (defaults to
    the whole graph); rows outside the state's nonzero set are zero, and an
    all-OFF state yields the single zero column.
    """
    if state_links is None:
        state_links = g.links
    values = {
        g.link(link).index: v for link, v in zip(state_links, state.values)
    }
    row_idx = g.indices(rows)
    active = [i for i in row_idx if values.get(i, 0) != 0]
    mat = maximal_independent_sets(g, active, rows)
    if all(values.get(i, 0) in (0, 1) for i in row_idx):
        return mat
    return mat.scaled(values)
