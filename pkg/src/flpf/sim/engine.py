"""Slot-based simulation runs, traces, and stability verdicts.

Channel states and arrivals are pregenerated as arrays (deterministic given
the seed), then handed to the slot-loop kernel; the compiled and pure-Python
backends are interchangeable. Queue snapshots are recorded every ``stride``
slots; schedules, capacities, and arrivals are kept per slot for
conservation checks and CSV export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import TraceTooShort
from ..fading import FadingStructure, sample_state_indices
from ..interference import InterferenceGraph
from ..rates import rate_vector
from .patterns import ScriptedPattern
from . import backend, kernel_backend

MIN_VERDICT_SLOTS = 10_000


@dataclass
class SimTrace:
    """Recorded history of one run. ``q`` holds queue vectors after slots
    stride, 2*stride, ...; schedules/caps/arrivals are per slot."""

    links: tuple
    slots: int
    stride: int
    q0: np.ndarray
    q: np.ndarray
    sched_mask: np.ndarray
    caps: np.ndarray
    arrivals: np.ndarray
    served_total: np.ndarray
    arrived_total: np.ndarray
    q_final: np.ndarray
    meta: dict

    def snapshot_slots(self) -> np.ndarray:
        return np.arange(1, self.q.shape[0] + 1, dtype=np.int64) * self.stride

    def max_queue_series(self) -> np.ndarray:
        return self.q.max(axis=1)

    def sum_queue_series(self) -> np.ndarray:
        return self.q.sum(axis=1)

    def queues_after(self, slot: int) -> np.ndarray:
        """Queue vector right after the given 0-based slot (needs stride
        alignment)."""
        if (slot + 1) % self.stride:
            raise ValueError(f"slot {slot} not on the recording stride")
        return self.q[(slot + 1) // self.stride - 1]

    def schedule_links(self, slot: int) -> tuple[int, ...]:
        mask = int(self.sched_mask[slot])
        return tuple(l for l in range(len(self.links)) if (mask >> l) & 1)

    def to_csv(self, path) -> None:
        """Per-slot, per-link rows: slot,link,Q,C,S,A (Q after the slot;
        only slots on the recording stride are emitted)."""
        with open(path, "w", newline="") as fh:
            fh.write("slot,link,Q,C,S,A\n")
            for r in range(self.q.shape[0]):
                t = (r + 1) * self.stride - 1
                mask = int(self.sched_mask[t])
                for l, link in enumerate(self.links):
                    fh.write(
                        f"{t},{link.label},{self.q[r, l]},{self.caps[t, l]},"
                        f"{(mask >> l) & 1},{self.arrivals[t, l]}\n"
                    )


@dataclass(frozen=True)
class SimVerdict:
    verdict: str  # stable | unstable | inconclusive
    slope: float
    slope_se: float
    band: tuple[float, float]
    max_queue: int
    window_slots: int

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_queue_slope_per_slot": self.slope,
            "slope_stderr": self.slope_se,
            "slope_band": list(self.band),
            "max_queue": self.max_queue,
            "window_slots": self.window_slots,
        }


def _run(g, caps, arrivals, q0, order, tie_break, stride, meta) -> SimTrace:
    if order not in ("service_first", "arrival_first"):
        raise ValueError(f"unknown slot order {order!r}")
    if tie_break not in ("low", "high"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    nbr = np.array(g.nbr_mask, dtype=np.int64)
    q0 = np.asarray(q0, dtype=np.int64)
    q_out, sched, served, arrived, q_final = backend.run_slots(
        caps,
        arrivals,
        nbr,
        q0,
        order == "arrival_first",
        tie_break == "high",
        stride,
    )
    meta = dict(meta, order=order, tie_break=tie_break, backend=kernel_backend())
    return SimTrace(
        links=g.links,
        slots=caps.shape[0],
        stride=stride,
        q0=q0,
        q=q_out,
        sched_mask=sched,
        caps=caps,
        arrivals=arrivals,
        served_total=served,
        arrived_total=arrived,
        q_final=q_final,
        meta=meta,
    )


def run_iid(
    g: InterferenceGraph,
    f: FadingStructure,
    rates,
    slots: int,
    seed: int = 0,
    order: str = "service_first",
    tie_break: str = "low",
    stride: int | None = None,
    weight_fn_name: str = "identity",
) -> SimTrace:
    """Simulate i.i.d. channels from f and i.i.d. bounded arrivals.

    Arrivals are Bernoulli batches with the requested means: a link with
    rate r receives floor(r) packets plus one more with probability
    frac(r), every slot, independently. The channel draw and the arrival
    draws share one seeded generator, so runs are reproducible.

    Any strictly increasing zero-at-zero weight function selects the same
    greedy schedules as the identity, so the kernels compare raw
    queue*capacity products; ``weight_fn_name`` is recorded for reporting.
    """
    lam = [float(v) for v in rate_vector(g.links, rates)]
    if stride is None:
        stride = max(1, slots // 20_000)
    rng = np.random.default_rng(seed)
    idx = sample_state_indices(f, rng, slots)
    caps = f.capacity_matrix()[idx]
    base = np.floor(lam).astype(np.int64)
    frac = np.array(lam) - base
    arrivals = base[None, :] + (
        rng.random((slots, g.num_links)) < frac[None, :]
    ).astype(np.int64)
    meta = {
        "mode": "iid",
        "seed": seed,
        "rates": lam,
        "weight_fn": weight_fn_name,
    }
    return _run(g, caps, arrivals, np.zeros(g.num_links), order, tie_break, stride, meta)


def run_scripted(
    g: InterferenceGraph,
    pattern: ScriptedPattern,
    periods: int,
    seed: int = 0,
    order: str = "arrival_first",
    tie_break: str = "low",
    stride: int = 1,
) -> SimTrace:
    """Run a scripted pattern for a whole number of periods.

    Deterministic surges fire every ``pattern.surge_every`` frames; the
    probabilistic mode flips one seeded coin per frame. The default
    arrival-first order is what keeps the equal-queue argument intact.
    """
    p = pattern.period_slots
    caps = np.tile(pattern.period_caps, (periods, 1))
    arrivals = np.tile(pattern.period_arrivals, (periods, 1))
    n_frames = pattern.frames_per_period
    frame_ends = (
        np.tile(pattern.frame_ends, periods)
        + np.repeat(np.arange(periods, dtype=np.int64) * p, n_frames)
    )
    surge_rows = np.tile(np.arange(n_frames), periods)
    if pattern.eps > 0:
        total = n_frames * periods
        if pattern.surge_mode == "deterministic":
            m = pattern.surge_every
            surging = (np.arange(total) % m) == m - 1
        else:
            rng = np.random.default_rng(seed)
            surging = rng.random(total) < float(pattern.eps)
        for fi in np.nonzero(surging)[0]:
            arrivals[frame_ends[fi]] = pattern.frame_surge[surge_rows[fi]]
    meta = {
        "mode": "scripted",
        "seed": seed,
        "periods": periods,
        "period_slots": p,
        "frame_ends": frame_ends,
        "surge_every": pattern.surge_every,
        "surge_mode": pattern.surge_mode,
        "eps": pattern.eps,
        "subset": [l.label for l in pattern.subset],
        "realized_rate": pattern.realized_rate,
    }
    return _run(
        g, caps, arrivals, np.zeros(g.num_links), order, tie_break, stride, meta
    )


def stability_verdict(
    trace: SimTrace,
    warmup_fraction: float = 0.2,
    slope_threshold: float = 1e-4,
    stable_bound: float = 1000.0,
    band_sigmas: float = 3.0,
) -> SimVerdict:
    """Classify a trace as stable, unstable, or inconclusive.

    Unstable: the least-squares slope of the max-queue series over the
    post-warmup window is at least slope_threshold and its +-band_sigmas
    stderr band excludes zero. Stable: the window's max queue stays under
    stable_bound. Anything else is inconclusive.
    """
    if trace.slots < MIN_VERDICT_SLOTS:
        raise TraceTooShort(trace.slots, MIN_VERDICT_SLOTS)
    series = trace.max_queue_series().astype(np.float64)
    x = trace.snapshot_slots().astype(np.float64)
    start = int(len(series) * warmup_fraction)
    xs, ys = x[start:], series[start:]
    n = len(xs)
    if n < 3:
        raise TraceTooShort(n, 3)
    xm = xs.mean()
    sxx = float(((xs - xm) ** 2).sum())
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    dof = max(n - 2, 1)
    se = math.sqrt(float((resid**2).sum()) / dof / sxx) if sxx > 0 else math.inf
    band = (slope - band_sigmas * se, slope + band_sigmas * se)
    max_q = int(ys.max())
    if slope >= slope_threshold and band[0] > 0:
        verdict = "unstable"
    elif max_q <= stable_bound:
        verdict = "stable"
    else:
        verdict = "inconclusive"
    window = int(xs[-1] - xs[0]) if n else 0
    return SimVerdict(verdict, float(slope), se, band, max_q, window)
