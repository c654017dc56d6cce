import random
from fractions import Fraction

import numpy as np
import pytest

from flpf.errors import (
    DecompositionNotInPhi,
    TraceTooShort,
)
from flpf.fading import GlobalState, from_explicit, from_iid_bernoulli
from flpf.sim import (
    QueueState,
    Schedule,
    build_adversarial_pattern,
    gms_schedule,
    kernel_backend,
    run_iid,
    run_scripted,
    stability_verdict,
    step,
)
from flpf.sim import _kernel_available
from flpf.sim import _pykernel

WEIGHTS_B = {"110": [1, 0], "011": [0, 1], "111": [0, 1]}


def _pattern(g, f, eps=Fraction(1, 50), surge="deterministic"):
    return build_adversarial_pattern(
        g, f, ["a", "b", "c"], WEIGHTS_B, eps=eps,
        nu=[Fraction(1, 3)] * 3, surge=surge,
    )


# -- single-slot reference ops ----------------------------------------------


def test_gms_side_links_win(path3):
    s = gms_schedule(QueueState((5, 1, 5)), (1, 1, 1), path3)
    assert s.on == (1, 0, 1)


def test_gms_all_zero(path3):
    assert gms_schedule(QueueState((0, 0, 0)), (1, 1, 1), path3).on == (0, 0, 0)


def test_gms_center_wins(path3):
    assert gms_schedule(QueueState((1, 9, 1)), (1, 1, 1), path3).on == (0, 1, 0)


def test_gms_off_links_never_scheduled(path3):
    s = gms_schedule(QueueState((5, 0, 5)), (0, 1, 1), path3)
    assert s.on == (0, 0, 1)


def test_gms_weight_fn_invariance(path3, four_link):
    rng = random.Random(5)
    for g in (path3, four_link):
        k = g.num_links
        for _ in range(10_000):
            q = QueueState(tuple(rng.randint(0, 6) for _ in range(k)))
            s = tuple(rng.randint(0, 1) for _ in range(k))
            for tie in ("low", "high"):
                a = gms_schedule(q, s, g, tie_break=tie)
                b = gms_schedule(q, s, g, weight_fn=lambda x: x**3, tie_break=tie)
                assert a == b


def test_gms_maximal_among_positive(path3, four_link):
    rng = random.Random(6)
    for g in (path3, four_link):
        k = g.num_links
        for _ in range(10_000):
            q = tuple(rng.randint(0, 6) for _ in range(k))
            s = tuple(rng.randint(0, 2) for _ in range(k))
            sched = gms_schedule(QueueState(q), s, g)
            on = set(sched.links)
            for l in on:
                assert q[l] * s[l] > 0
                assert not (g.interference[l] & on)
            for l in range(k):
                if l not in on and q[l] * s[l] > 0:
                    assert g.interference[l] & on, "addable link left out"


def test_gms_first_pick_is_argmax(path3):
    rng = random.Random(7)
    for _ in range(2000):
        q = tuple(rng.randint(0, 9) for _ in range(3))
        s = tuple(rng.randint(0, 1) for _ in range(3))
        sched = gms_schedule(QueueState(q), s, path3)
        w = [q[l] * s[l] for l in range(3)]
        if max(w) > 0:
            assert max(w[l] for l in sched.links) == max(w)


def test_step_examples(single_link):
    serve = Schedule((1,))
    q = step(QueueState((3,)), (1,), serve, (0,), "service_first")
    assert q.counts == (2,)
    q = step(QueueState((0,)), (1,), serve, (1,), "service_first")
    assert q.counts == (1,)
    q = step(QueueState((0,)), (1,), serve, (1,), "arrival_first")
    assert q.counts == (0,)


# -- kernels -------------------------------------------------------------------


def _random_workload(seed, T=5000, K=4):
    rng = np.random.default_rng(seed)
    caps = rng.integers(0, 3, size=(T, K)).astype(np.int64)
    arr = rng.integers(0, 2, size=(T, K)).astype(np.int64)
    nbr = np.array([0b0010, 0b1101, 0b0010, 0b0110], dtype=np.int64)
    q0 = np.zeros(K, dtype=np.int64)
    return caps, arr, nbr, q0


@pytest.mark.skipif(not _kernel_available, reason="compiled kernel not built")
def test_backends_identical():
    from flpf.sim import _kernel

    caps, arr, nbr, q0 = _random_workload(11)
    for afirst in (False, True):
        for thigh in (False, True):
            a = _pykernel.run_slots(caps, arr, nbr, q0, afirst, thigh, 13)
            b = _kernel.run_slots(caps, arr, nbr, q0, afirst, thigh, 13)
            for x, y in zip(a, b):
                assert np.array_equal(x, y)


def test_kernel_conservation():
    caps, arr, nbr, q0 = _random_workload(12, T=3000)
    q_out, sched, served, arrived, q_final = _pykernel.run_slots(
        caps, arr, nbr, q0, False, False, 1
    )
    assert np.array_equal(q0 + arrived - served, q_final)
    # slot-by-slot: q[t+1] == (q[t] - caps*sched)+ + arr
    q = q0.copy()
    for t in range(200):
        on = np.array([(int(sched[t]) >> l) & 1 for l in range(len(q0))])
        q = np.maximum(q - caps[t] * on, 0) + arr[t]
        assert np.array_equal(q, q_out[t])


def test_kernel_conservation_arrival_first():
    caps, arr, nbr, q0 = _random_workload(13, T=2000)
    q_out, sched, served, arrived, q_final = _pykernel.run_slots(
        caps, arr, nbr, q0, True, False, 1
    )
    assert np.array_equal(q0 + arrived - served, q_final)
    q = q0.copy()
    for t in range(200):
        on = np.array([(int(sched[t]) >> l) & 1 for l in range(len(q0))])
        pre = q + arr[t]
        q = pre - np.minimum(pre, caps[t] * on)
        assert np.array_equal(q, q_out[t])


def test_engine_matches_reference_ops(path3, path3_fading):
    """The bulk engine agrees with gms_schedule + step, slot by slot."""
    tr = run_iid(path3, path3_fading, [0.4] * 3, slots=400, seed=3, stride=1)
    q = QueueState((0, 0, 0))
    for t in range(400):
        state = tuple(tr.caps[t])
        sched = gms_schedule(q, state, path3)
        assert sched.links == tr.schedule_links(t)
        q = step(q, state, sched, tuple(tr.arrivals[t]), "service_first")
        assert q.counts == tuple(tr.q[t])


def test_run_iid_deterministic(path3, path3_fading):
    a = run_iid(path3, path3_fading, [0.3] * 3, slots=20_000, seed=9)
    b = run_iid(path3, path3_fading, [0.3] * 3, slots=20_000, seed=9)
    assert np.array_equal(a.q, b.q) and np.array_equal(a.sched_mask, b.sched_mask)


# -- scripted patterns ------------------------------------------------------------


def test_pattern_example_b(path3, path3_fading):
    pat = _pattern(path3, path3_fading)
    assert pat.period_slots == 3 and pat.frames_per_period == 3
    assert pat.surge_every == 50
    assert all(v == Fraction(1, 3) for v in pat.channel_fractions.values())
    assert pat.base_rate == (Fraction(1, 3),) * 3
    lo, hi = Fraction(1, 3), Fraction(1, 3) + Fraction(1, 50)
    assert all(lo < r <= hi for r in pat.realized_rate)


def test_pattern_rational_weights_kept_exact(path3, path3_fading):
    pat = _pattern(path3, path3_fading, eps=0)
    assert pat.realized_rate == pat.base_rate == (Fraction(1, 3),) * 3


def test_pattern_weights_must_be_convex(path3, path3_fading):
    bad = dict(WEIGHTS_B, **{"111": [Fraction(1, 2), 0]})
    with pytest.raises(DecompositionNotInPhi):
        build_adversarial_pattern(path3, path3_fading, ["a", "b", "c"], bad, eps=0)


def test_pattern_missing_state(path3, path3_fading):
    bad = {k: v for k, v in WEIGHTS_B.items() if k != "011"}
    with pytest.raises(DecompositionNotInPhi):
        build_adversarial_pattern(path3, path3_fading, ["a", "b", "c"], bad, eps=0)


def test_pattern_wrong_target(path3, path3_fading):
    with pytest.raises(DecompositionNotInPhi):
        build_adversarial_pattern(
            path3, path3_fading, ["a", "b", "c"], WEIGHTS_B,
            eps=0, nu=[Fraction(1, 2)] * 3,
        )


def test_scripted_equal_queues_and_growth(path3, path3_fading):
    pat = _pattern(path3, path3_fading)
    tr = run_scripted(path3, pat, periods=200)
    ends = tr.meta["frame_ends"]
    qs = tr.q[ends]
    assert (qs.max(axis=1) == qs.min(axis=1)).all()
    # deterministic surge: +1 to every queue each surge_every frames
    frames = len(ends)
    expected = frames // pat.surge_every
    assert tr.q_final.min() == expected


def test_scripted_no_surge_returns_to_zero(path3, path3_fading):
    pat = _pattern(path3, path3_fading, eps=0)
    tr = run_scripted(path3, pat, periods=50)
    period_ends = np.arange(1, 51) * pat.period_slots - 1
    assert (tr.q[period_ends] == 0).all()


def test_scripted_single_link_constant(single_link):
    f = from_iid_bernoulli(single_link, 1)
    pat = build_adversarial_pattern(
        single_link, f, ["l"], {"1": [1]}, eps=0
    )
    tr = run_scripted(single_link, pat, periods=100)
    assert (tr.q == 0).all()


def test_scripted_probabilistic_surge_seeded(path3, path3_fading):
    pat = _pattern(path3, path3_fading, surge="probabilistic")
    a = run_scripted(path3, pat, periods=500, seed=4)
    b = run_scripted(path3, pat, periods=500, seed=4)
    assert np.array_equal(a.q, b.q)
    ends = a.meta["frame_ends"]
    qs = a.q[ends]
    assert (qs.max(axis=1) == qs.min(axis=1)).all()
    assert a.q_final.max() > 0  # some surges happened over 1500 frames


# -- verdicts -----------------------------------------------------------------------


def test_verdict_overloaded_single_link(single_link):
    f = from_iid_bernoulli(single_link, 1)
    tr = run_iid(single_link, f, [1.2], slots=100_000, seed=0)
    v = stability_verdict(tr)
    assert v.verdict == "unstable"
    assert 0.15 <= v.slope <= 0.25


def test_verdict_underloaded_single_link(single_link):
    f = from_iid_bernoulli(single_link, 1)
    tr = run_iid(single_link, f, [0.4], slots=100_000, seed=0)
    assert stability_verdict(tr).verdict == "stable"


def test_verdict_trace_too_short(single_link):
    f = from_iid_bernoulli(single_link, 1)
    tr = run_iid(single_link, f, [0.4], slots=5000, seed=0)
    with pytest.raises(TraceTooShort):
        stability_verdict(tr)


def test_trace_csv_roundtrip(tmp_path, path3, path3_fading):
    tr = run_iid(path3, path3_fading, [0.3] * 3, slots=64, seed=1, stride=1)
    out = tmp_path / "trace.csv"
    tr.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "slot,link,Q,C,S,A"
    assert len(lines) == 1 + 64 * 3
    slot0 = [l.split(",") for l in lines[1:4]]
    assert [r[1] for r in slot0] == ["a", "b", "c"]


def test_backend_reported():
    assert kernel_backend() in ("compiled", "python")
