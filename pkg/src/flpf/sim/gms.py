"""Reference single-slot operations: greedy maximal scheduling and the queue
update. The bulk kernels reimplement this loop over arrays; these functions
are the readable contract and are what the property tests exercise.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..fading import GlobalState
from ..interference import InterferenceGraph


@dataclass(frozen=True)
class QueueState:
    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("queue backlogs cannot be negative")


@dataclass(frozen=True)
class Schedule:
    on: tuple[int, ...]  # 0/1 per link

    @property
    def links(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.on) if v)


def _caps(state) -> tuple:
    return state.values if isinstance(state, GlobalState) else tuple(state)


def gms_schedule(
    q: QueueState,
    state,
    g: InterferenceGraph,
    weight_fn=None,
    tie_break: str = "low",
) -> Schedule:
    """One greedy pass: repeatedly activate the heaviest link with positive
    weight and knock out its interferers.

    Weights are weight_fn(queue * capacity); weight_fn must be strictly
    increasing with weight_fn(0) = 0 (default: identity). Ties go to the
    lowest link index, or the highest with tie_break="high". The result is
    maximal among links with positive queue*capacity.
    """
    if tie_break not in ("low", "high"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    caps = _caps(state)
    k = g.num_links
    if len(q.counts) != k or len(caps) != k:
        raise ValueError("queue/state length does not match the graph")
    wf = weight_fn or (lambda x: x)
    tie_high = tie_break == "high"
    weights = [wf(q.counts[l] * caps[l]) for l in range(k)]
    zero = wf(0)
    rem = (1 << k) - 1
    chosen = 0
    while True:
        best, bw = -1, zero
        for l in range(k):
            if (rem >> l) & 1:
                w = weights[l]
                if w > bw or (tie_high and w == bw and w > zero):
                    bw, best = w, l
        if best < 0:
            break
        chosen |= 1 << best
        rem &= ~((1 << best) | g.nbr_mask[best])
    return Schedule(tuple((chosen >> l) & 1 for l in range(k)))


def step(
    q: QueueState,
    state,
    schedule: Schedule,
    arrivals,
    order: str = "service_first",
) -> QueueState:
    """Advance the queues one slot.

    service_first applies q <- max(q - cap*sched, 0) + a; arrival_first adds
    the arrivals before serving, so a packet arriving in the slot can be
    transmitted in it.
    """
    caps = _caps(state)
    arr = tuple(int(a) for a in arrivals)
    if order == "service_first":
        nxt = tuple(
            max(qc - c * s, 0) + a
            for qc, c, s, a in zip(q.counts, caps, schedule.on, arr)
        )
    elif order == "arrival_first":
        nxt = tuple(
            (qc + a) - min(qc + a, c * s)
            for qc, c, s, a in zip(q.counts, caps, schedule.on, arr)
        )
    else:
        raise ValueError(f"unknown slot order {order!r}")
    return QueueState(nxt)
