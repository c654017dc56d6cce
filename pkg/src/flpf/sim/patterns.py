"""Scripted adversarial arrival/channel patterns.

Given an attainable service vector on a link subset L, written as per-state
convex weights over the schedule columns, this builds a periodic channel and
arrival script whose channel fractions match the marginal distribution
exactly and whose arrival rate sits just above the target. Run under greedy
maximal scheduling with arrival-first slot order, the queues of L stay equal
at every frame boundary and climb by one on each surge, so the system is
unstable even though the load exceeds the target only by epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import (
    DecompositionNotInPhi,
    DeltaTooLargeForTargetRate,
    UnsupportedMode,
)
from ..fading import FadingStructure, marginal, schedule_matrix_for_state
from ..interference import InterferenceGraph, LinkId
from ..rates import rate_vector


@dataclass(frozen=True)
class ScriptedPattern:
    """One period of the adversarial script, plus exact rate bookkeeping.

    Arrays cover the full link set (links outside the subset get zero
    arrivals and OFF channels). ``frame_ends[i]`` is the in-period slot index
    of frame i's last slot, where ``frame_surge[i]`` replaces the base
    arrivals whenever the frame surges.
    """

    links: tuple[LinkId, ...]
    subset: tuple[LinkId, ...]
    period_caps: np.ndarray
    period_arrivals: np.ndarray
    frame_ends: np.ndarray
    frame_surge: np.ndarray
    frame_patterns: tuple[str, ...]
    channel_fractions: dict[str, Fraction]
    target_rate: tuple[Fraction, ...]
    base_rate: tuple[Fraction, ...]
    realized_rate: tuple[Fraction, ...]
    eps: Fraction
    surge_mode: str
    surge_every: int  # deterministic surge period in frames; 0 when eps == 0

    @property
    def period_slots(self) -> int:
        return self.period_caps.shape[0]

    @property
    def frames_per_period(self) -> int:
        return len(self.frame_ends)


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out


def _rationalize(weights, delta: Fraction):
    """Round a weight vector to exact rationals within delta (sup norm)."""
    exact = [Fraction(w) for w in weights]
    cap = max(1, math.ceil(2 / delta)) if delta > 0 else None
    if cap is None or all(w.denominator <= cap for w in exact):
        return exact
    rounded = [w.limit_denominator(cap) for w in exact]
    rounded[-1] = 1 - sum(rounded[:-1])
    for r, w in zip(rounded, exact):
        if r < 0 or abs(r - w) >= delta:
            raise DeltaTooLargeForTargetRate(
                f"cannot round weights to rationals within delta={delta}"
            )
    return rounded


def build_adversarial_pattern(
    g: InterferenceGraph,
    f: FadingStructure,
    L,
    weights: dict,
    eps,
    nu=None,
    delta=Fraction(1, 1000),
    surge: str = "deterministic",
) -> ScriptedPattern:
    """Construct the periodic instability script.

    ``weights`` maps each marginal support state's pattern ('110', ...) to a
    convex weight vector over that state's schedule columns; together they
    decompose the target service vector ``nu`` (computed from the weights if
    omitted). ``eps`` is the per-frame surge intensity; ``delta`` bounds the
    weight rationalization error. Surge mode is "deterministic" (every
    ceil(1/eps) frames) or "probabilistic" (per-frame coin flips at runtime).
    """
    if f.mode != "onoff":
        raise UnsupportedMode("adversarial patterns are defined for ON/OFF fading")
    if surge not in ("deterministic", "probabilistic"):
        raise ValueError(f"unknown surge mode {surge!r}")
    eps = Fraction(eps)
    delta = Fraction(delta)
    if eps < 0 or delta <= 0:
        raise ValueError("need eps >= 0 and delta > 0")

    sub_idx = sorted(set(g.indices(L)))
    subset = tuple(g.links[i] for i in sub_idx)
    marg = marginal(f, subset)
    k = g.num_links

    states = []
    rounded_any = False
    for state, prob in marg.states:
        pat = state.pattern()
        mat = schedule_matrix_for_state(g, state, rows=subset, state_links=marg.links)
        if pat not in weights:
            raise DecompositionNotInPhi(f"no weights for support state {pat}")
        w = list(weights[pat])
        if len(w) != mat.num_columns:
            raise DecompositionNotInPhi(
                f"state {pat}: expected {mat.num_columns} weights, got {len(w)}"
            )
        w_exact = [Fraction(v) for v in w]
        if any(v < 0 for v in w_exact):
            raise DecompositionNotInPhi(f"state {pat}: negative weight")
        total = sum(w_exact)
        if abs(total - 1) > delta:
            raise DecompositionNotInPhi(f"state {pat}: weights sum to {total}")
        r = _rationalize([v / total for v in w_exact], delta)
        if r != w_exact:
            rounded_any = True
        states.append((pat, prob, state, mat, r))
    if not states:
        raise DecompositionNotInPhi("fading structure has empty support")

    # base long-run rate of the script, exact, over the full link set
    base = [Fraction(0)] * k
    for pat, prob, _, mat, r in states:
        for c, col in enumerate(mat.columns):
            if r[c]:
                for link, v in zip(mat.row_links, col):
                    base[link.index] += prob * r[c] * v

    if nu is not None:
        target = list(rate_vector(subset, nu))
        tol = len(subset) * delta
        full_target = [Fraction(0)] * k
        for link, v in zip(subset, target):
            full_target[link.index] = v
        for i in range(k):
            err = abs(base[i] - full_target[i])
            limit = tol if rounded_any else 0
            if err > limit:
                raise DecompositionNotInPhi(
                    f"weights produce rate {base[i]} at link "
                    f"{g.links[i].label}, target is {full_target[i]}"
                )
        target_full = tuple(full_target)
    else:
        target_full = tuple(base)

    # frame lengths and repetition counts giving the marginal exactly
    frame_len = {}
    for pat, prob, _, mat, r in states:
        frame_len[pat] = _lcm(v.denominator for v in r)
    q = _lcm(prob.denominator for _, prob, _, _, _ in states)
    lcm_t = _lcm(frame_len.values())
    reps = {}
    for pat, prob, _, mat, r in states:
        reps[pat] = int(prob * q * lcm_t) // frame_len[pat]
    shrink = math.gcd(*reps.values())
    reps = {pat: n // shrink for pat, n in reps.items()}

    period = sum(reps[pat] * frame_len[pat] for pat, _, _, _, _ in states)
    caps = np.zeros((period, k), dtype=np.int64)
    arrivals = np.zeros((period, k), dtype=np.int64)
    frame_ends = []
    frame_surge = []
    frame_patterns = []
    fractions = {}
    slot = 0
    for pat, prob, state, mat, r in states:
        t_len = frame_len[pat]
        col_slots = [v * t_len for v in r]
        assert all(c.denominator == 1 for c in col_slots)
        cap_row = np.zeros(k, dtype=np.int64)
        for link, v in zip(marg.links, state.values):
            cap_row[g.link(link).index] = v
        supports = [
            [g.links[i].index for i in mat.column_support(c)]
            for c in range(mat.num_columns)
        ]
        active_cols = [c for c in range(mat.num_columns) if col_slots[c] > 0]
        last_col = active_cols[-1]
        surge_vec = np.zeros(k, dtype=np.int64)
        for link in subset:
            surge_vec[link.index] = 1
        for i in supports[last_col]:
            surge_vec[i] = 2
        fractions[pat] = Fraction(reps[pat] * t_len, period)
        for _ in range(reps[pat]):
            start = slot
            for c in active_cols:
                n = int(col_slots[c])
                caps[slot : slot + n] = cap_row
                for i in supports[c]:
                    arrivals[slot : slot + n, i] = 1
                slot += n
            assert slot - start == t_len
            frame_ends.append(slot - 1)
            frame_surge.append(surge_vec)
            frame_patterns.append(pat)

    for pat, prob, _, _, _ in states:
        assert fractions[pat] == prob  # channel fractions are exact

    if eps > 0:
        m = math.ceil(1 / eps)
        n_frames = len(frame_ends)
        surge_rate = Fraction(n_frames, m * period)
        realized = [
            base[i] + (surge_rate if g.links[i] in subset else 0)
            for i in range(k)
        ]
        for link in subset:
            i = link.index
            if realized[i] > target_full[i] + eps:
                raise DeltaTooLargeForTargetRate(
                    f"realized rate {realized[i]} at link {link.label} exceeds "
                    f"target {target_full[i]} + eps"
                )
    else:
        m = 0
        realized = list(base)

    return ScriptedPattern(
        links=g.links,
        subset=subset,
        period_caps=caps,
        period_arrivals=arrivals,
        frame_ends=np.array(frame_ends, dtype=np.int64),
        frame_surge=np.array(frame_surge, dtype=np.int64),
        frame_patterns=tuple(frame_patterns),
        channel_fractions=fractions,
        target_rate=target_full,
        base_rate=tuple(base),
        realized_rate=tuple(realized),
        eps=eps,
        surge_mode=surge,
        surge_every=m,
    )
