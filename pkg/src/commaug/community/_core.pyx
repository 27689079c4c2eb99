# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Louvain local-move kernel.

Mirror of ``_core_py.local_move``: same operations in the same order on
IEEE doubles, so both backends yield bit-identical assignments. Keep any
change in lockstep with the fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND_NAME = "cython"


# a relocation must beat staying put by this much (see _core_py.GAIN_EPS)
cdef double GAIN_EPS = 1e-12


def local_move(indptr, indices, weights, strength, comm, comm_tot, total_w, gamma, order):
    """Sweep nodes in ``order`` until a full pass moves nothing.

    Candidates per node are its current community plus every neighbor
    community, scanned in ascending id so equal gains resolve to the lowest
    id; a move happens only when the winner beats the current community by
    more than GAIN_EPS. ``comm`` and ``comm_tot`` are updated in place;
    returns the total number of moves.
    """
    cdef cnp.int64_t[::1] indptr_v = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] indices_v = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[::1] weights_v = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[::1] strength_v = np.ascontiguousarray(strength, dtype=np.float64)
    cdef cnp.int64_t[::1] comm_v = comm
    cdef double[::1] tot_v = comm_tot
    cdef cnp.int64_t[::1] order_v = np.ascontiguousarray(order, dtype=np.int64)

    cdef Py_ssize_t n = order_v.shape[0]
    cdef Py_ssize_t ncomm = tot_v.shape[0]
    cdef double total_w_c = float(total_w)
    cdef double gamma_c = float(gamma)
    cdef double inv_m = 1.0 / total_w_c
    cdef double inv_2mm = 1.0 / (2.0 * total_w_c * total_w_c)

    w_acc_arr = np.zeros(ncomm, dtype=np.float64)
    touched_arr = np.zeros(ncomm, dtype=np.int64)
    cdef double[::1] w_acc = w_acc_arr
    cdef cnp.int64_t[::1] touched = touched_arr

    cdef Py_ssize_t oi, idx, k, pos
    cdef cnp.int64_t i, j, a, c, best_c, key
    cdef cnp.int64_t ntouched
    cdef double deg_i, gain, best_gain, gain_home
    cdef bint saw_home
    cdef long total_moves = 0
    cdef long moves

    while True:
        moves = 0
        for oi in range(n):
            i = order_v[oi]
            a = comm_v[i]
            deg_i = strength_v[i]

            ntouched = 0
            saw_home = False
            for idx in range(indptr_v[i], indptr_v[i + 1]):
                j = indices_v[idx]
                if j == i:
                    continue
                c = comm_v[j]
                if w_acc[c] == 0.0:
                    touched[ntouched] = c
                    ntouched += 1
                if c == a:
                    saw_home = True
                w_acc[c] += weights_v[idx]
            if not saw_home:
                touched[ntouched] = a
                ntouched += 1

            # insertion sort: ascending community id for tie-breaking
            for k in range(1, ntouched):
                key = touched[k]
                pos = k
                while pos > 0 and touched[pos - 1] > key:
                    touched[pos] = touched[pos - 1]
                    pos -= 1
                touched[pos] = key

            tot_v[a] -= deg_i
            best_c = -1
            best_gain = -INFINITY
            gain_home = 0.0
            for k in range(ntouched):
                c = touched[k]
                gain = w_acc[c] * inv_m - gamma_c * deg_i * tot_v[c] * inv_2mm
                if c == a:
                    gain_home = gain
                if gain > best_gain:
                    best_gain = gain
                    best_c = c
            if best_c == a or best_gain <= gain_home + GAIN_EPS:
                best_c = a
            tot_v[best_c] += deg_i
            if best_c != a:
                comm_v[i] = best_c
                moves += 1

            for k in range(ntouched):
                w_acc[touched[k]] = 0.0

        total_moves += moves
        if moves == 0:
            break

    return total_moves
