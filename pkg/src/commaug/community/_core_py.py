"""Pure-Python Louvain local-move kernel.

This is the fallback for the compiled module ``_core``. Both backends run
the same operations in the same order on IEEE doubles, so they produce
bit-identical assignments; keep any change here in lockstep with
``_core.pyx``.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


#: a relocation must beat staying put by this much; float noise between
#: modularity-equal configurations is orders of magnitude smaller, so this
#: cannot suppress a real improvement but does stop ulp-level move cycles
GAIN_EPS = 1e-12


def local_move(indptr, indices, weights, strength, comm, comm_tot, total_w, gamma, order):
    """Sweep nodes in ``order`` until a full pass moves nothing.

    For each node the candidate communities are its current one plus every
    neighbor community, scanned in ascending id so equal gains resolve to
    the lowest id; a move happens only when the winner beats the current
    community by more than GAIN_EPS. ``comm`` and ``comm_tot`` are updated
    in place; returns the total number of moves.
    """
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    weights_l = weights.tolist()
    strength_l = strength.tolist()
    comm_l = comm.tolist()
    tot_l = comm_tot.tolist()
    order_l = order.tolist()
    n = len(order_l)

    total_w = float(total_w)
    gamma = float(gamma)
    inv_m = 1.0 / total_w
    inv_2mm = 1.0 / (2.0 * total_w * total_w)

    w_acc = [0.0] * len(tot_l)
    touched = [0] * len(tot_l)
    total_moves = 0

    while True:
        moves = 0
        for oi in range(n):
            i = order_l[oi]
            a = comm_l[i]
            deg_i = strength_l[i]

            ntouched = 0
            saw_home = False
            for idx in range(indptr_l[i], indptr_l[i + 1]):
                j = indices_l[idx]
                if j == i:
                    continue
                c = comm_l[j]
                if w_acc[c] == 0.0:
                    touched[ntouched] = c
                    ntouched += 1
                if c == a:
                    saw_home = True
                w_acc[c] += weights_l[idx]
            if not saw_home:
                touched[ntouched] = a
                ntouched += 1

            # ascending community id; first strict max wins ties
            cand = sorted(touched[:ntouched])

            tot_l[a] -= deg_i
            best_c = -1
            best_gain = -np.inf
            gain_home = 0.0
            for c in cand:
                gain = w_acc[c] * inv_m - gamma * deg_i * tot_l[c] * inv_2mm
                if c == a:
                    gain_home = gain
                if gain > best_gain:
                    best_gain = gain
                    best_c = c
            if best_c == a or best_gain <= gain_home + GAIN_EPS:
                best_c = a
            tot_l[best_c] += deg_i
            if best_c != a:
                comm_l[i] = best_c
                moves += 1

            for k in range(ntouched):
                w_acc[touched[k]] = 0.0

        total_moves += moves
        if moves == 0:
            break

    comm[:] = comm_l
    comm_tot[:] = tot_l
    return total_moves
