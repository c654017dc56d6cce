"""Pure-Python slot loop, the reference backend.

Semantics are the contract: the compiled backend in _kernel.pyx must produce
bit-identical outputs on identical inputs (the test suite enforces this).
Scheduling uses raw queue*capacity products; any strictly increasing weight
function with f(0)=0 induces the same ordering and the same ties, so the
greedy selection is unchanged.
"""

import numpy as np

BACKEND = "python"


def run_slots(caps, arrivals, nbr_mask, q0, arrival_first, tie_high, stride):
    """Simulate T slots of greedy maximal scheduling.

    caps, arrivals: int64 arrays (T, K); nbr_mask: int64 (K,) interference
    bitmasks; q0: int64 (K,) initial backlog. Returns (queue snapshots after
    every ``stride`` slots, per-slot schedule bitmasks, served totals,
    arrival totals, final queues).
    """
    T, K = caps.shape
    if K > 60:
        raise ValueError("kernel supports at most 60 links")
    n_rec = T // stride
    q_out = np.empty((n_rec, K), dtype=np.int64)
    sched_out = np.empty(T, dtype=np.int64)
    served = [0] * K
    arrived = [0] * K

    caps_l = caps.tolist()
    arr_l = arrivals.tolist()
    nbr = [int(m) for m in nbr_mask]
    q = [int(v) for v in q0]
    full = (1 << K) - 1
    snapshots = []
    rng_k = range(K)

    for t in range(T):
        c = caps_l[t]
        a = arr_l[t]
        if arrival_first:
            for l in rng_k:
                q[l] += a[l]
                arrived[l] += a[l]
        rem = full
        sched = 0
        while True:
            best = -1
            bw = 0
            for l in rng_k:
                if (rem >> l) & 1:
                    w = q[l] * c[l]
                    if w > bw or (tie_high and w == bw and w > 0):
                        bw = w
                        best = l
            if best < 0:
                break
            sched |= 1 << best
            rem &= ~((1 << best) | nbr[best])
        sched_out[t] = sched
        for l in rng_k:
            if (sched >> l) & 1:
                d = q[l] if q[l] < c[l] else c[l]
                q[l] -= d
                served[l] += d
        if not arrival_first:
            for l in rng_k:
                q[l] += a[l]
                arrived[l] += a[l]
        if (t + 1) % stride == 0:
            snapshots.append(list(q))

    if snapshots:
        q_out[:] = snapshots
    return (
        q_out,
        sched_out,
        np.array(served, dtype=np.int64),
        np.array(arrived, dtype=np.int64),
        np.array(q, dtype=np.int64),
    )
