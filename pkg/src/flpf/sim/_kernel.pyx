# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled slot loop. Mirrors _pykernel.run_slots exactly; see there for the
semantics contract."""

import numpy as np

BACKEND = "compiled"


def run_slots(caps, arrivals, nbr_mask, q0, arrival_first, tie_high, stride):
    cdef long long[:, ::1] C = np.ascontiguousarray(caps, dtype=np.int64)
    cdef long long[:, ::1] A = np.ascontiguousarray(arrivals, dtype=np.int64)
    nbr_arr = np.ascontiguousarray(nbr_mask, dtype=np.int64)
    q0_arr = np.ascontiguousarray(q0, dtype=np.int64)
    cdef long long[::1] NBR = nbr_arr
    cdef long long[::1] Q0 = q0_arr

    cdef Py_ssize_t T = C.shape[0]
    cdef Py_ssize_t K = C.shape[1]
    if K > 60:
        raise ValueError("kernel supports at most 60 links")
    cdef long long stride_ll = stride
    cdef int afirst = 1 if arrival_first else 0
    cdef int thigh = 1 if tie_high else 0
    cdef Py_ssize_t n_rec = T // stride_ll

    q_out_arr = np.empty((n_rec, K), dtype=np.int64)
    sched_arr = np.empty(T, dtype=np.int64)
    served_arr = np.zeros(K, dtype=np.int64)
    arrived_arr = np.zeros(K, dtype=np.int64)
    q_final_arr = np.empty(K, dtype=np.int64)
    cdef long long[:, ::1] QO = q_out_arr
    cdef long long[::1] SCH = sched_arr
    cdef long long[::1] SRV = served_arr
    cdef long long[::1] ARV = arrived_arr
    cdef long long[::1] QF = q_final_arr

    cdef long long q[60]
    cdef long long nbr[60]
    cdef Py_ssize_t t, l, rec = 0
    cdef long long full = ((<long long>1) << K) - 1
    cdef long long rem, sched, w, bw, d
    cdef int best

    for l in range(K):
        q[l] = Q0[l]
        nbr[l] = NBR[l]

    for t in range(T):
        if afirst:
            for l in range(K):
                q[l] += A[t, l]
                ARV[l] += A[t, l]
        rem = full
        sched = 0
        while True:
            best = -1
            bw = 0
            for l in range(K):
                if (rem >> l) & 1:
                    w = q[l] * C[t, l]
                    if w > bw or (thigh and w == bw and w > 0):
                        bw = w
                        best = <int>l
            if best < 0:
                break
            sched |= (<long long>1) << best
            rem &= ~(((<long long>1) << best) | nbr[best])
        SCH[t] = sched
        for l in range(K):
            if (sched >> l) & 1:
                d = q[l] if q[l] < C[t, l] else C[t, l]
                q[l] -= d
                SRV[l] += d
        if not afirst:
            for l in range(K):
                q[l] += A[t, l]
                ARV[l] += A[t, l]
        if (t + 1) % stride_ll == 0:
            for l in range(K):
                QO[rec, l] = q[l]
            rec += 1

    for l in range(K):
        QF[l] = q[l]
    return q_out_arr, sched_arr, served_arr, arrived_arr, q_final_arr
