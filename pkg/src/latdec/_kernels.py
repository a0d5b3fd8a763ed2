"""Compiled enumeration kernels.

Everything here works on a lower-triangular basis L (rows are basis
vectors, L[i, j] = 0 for j > i, positive diagonal) and a target already
rotated into that frame.  The Schnorr-Euchner zigzag guarantees that per
level the partial distances are visited in nondecreasing order, so the
first pruned value at a level prunes the whole level.

All kernels count visited nodes and bail out with status 1 when the node
budget is exceeded; callers translate that into an exception.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_BUDGET = 1
STATUS_OVERFLOW = 2

# Relative slack used to recognise equidistant candidates.
TIE_REL = 1e-12


@njit(cache=True, nogil=True, inline="always")
def _lex_less(a, b):
    for i in range(a.shape[0]):
        if a[i] < b[i]:
            return True
        if a[i] > b[i]:
            return False
    return False


@njit(cache=True, nogil=True)
def _decode_core(L, yp, U, budget, E, dist, u, step, best_orig, cand_orig):
    """Workspace form of the closest-point search. Returns (status, dist, nodes)."""
    n = L.shape[0]
    best = np.inf
    have = False
    nodes = 0

    k = n - 1
    for j in range(n):
        E[k, j] = yp[j]
    dist[k] = 0.0
    c = E[k, k] / L[k, k]
    u[k] = np.int64(np.rint(c))
    step[k] = 1 if c - u[k] >= 0 else -1

    while True:
        nodes += 1
        if nodes > budget:
            return STATUS_BUDGET, best, nodes
        d = E[k, k] - u[k] * L[k, k]
        newdist = dist[k] + d * d
        tol = TIE_REL * (1.0 + best) if have else 0.0
        if newdist <= best + tol:
            if k > 0:
                for j in range(k):
                    E[k - 1, j] = E[k, j] - u[k] * L[k, j]
                dist[k - 1] = newdist
                k -= 1
                c = E[k, k] / L[k, k]
                u[k] = np.int64(np.rint(c))
                step[k] = 1 if c - u[k] >= 0 else -1
                continue
            # leaf
            if (not have) or newdist < best - tol:
                best = newdist
                have = True
                for j in range(n):
                    best_orig[j] = 0
                for i in range(n):
                    ui = u[i]
                    if ui != 0:
                        for j in range(n):
                            best_orig[j] += ui * U[i, j]
            else:
                for j in range(n):
                    cand_orig[j] = 0
                for i in range(n):
                    ui = u[i]
                    if ui != 0:
                        for j in range(n):
                            cand_orig[j] += ui * U[i, j]
                if _lex_less(cand_orig, best_orig):
                    for j in range(n):
                        best_orig[j] = cand_orig[j]
                    if newdist < best:
                        best = newdist
            u[0] += step[0]
            step[0] = -step[0] - (1 if step[0] >= 0 else -1)
            continue
        # pruned: zigzag order means the rest of the level is pruned too
        if k == n - 1:
            break
        k += 1
        u[k] += step[k]
        step[k] = -step[k] - (1 if step[k] >= 0 else -1)

    return STATUS_OK, best, nodes


@njit(cache=True, nogil=True)
def _decode_se(L, yp, U, budget):
    """Closest lattice point to yp, lexicographic-smallest original z on ties.

    Returns (status, z_orig, dist_sq, nodes).  U maps reduced coordinates
    to the caller's basis: z_orig = z_red @ U.
    """
    n = L.shape[0]
    E = np.zeros((n, n))
    dist = np.zeros(n)
    u = np.zeros(n, dtype=np.int64)
    step = np.zeros(n, dtype=np.int64)
    best_orig = np.zeros(n, dtype=np.int64)
    cand_orig = np.zeros(n, dtype=np.int64)
    st, d, nodes = _decode_core(L, yp, U, budget, E, dist, u, step,
                                best_orig, cand_orig)
    return st, best_orig, d, nodes


@njit(cache=True, nogil=True)
def _decode_se_batch(L, Yp, U, budget):
    """Decode every row of Yp. Returns (status, Z_orig, dists, nodes)."""
    m = Yp.shape[0]
    n = L.shape[0]
    Z = np.zeros((m, n), dtype=np.int64)
    D = np.zeros(m)
    E = np.zeros((n, n))
    dist = np.zeros(n)
    u = np.zeros(n, dtype=np.int64)
    step = np.zeros(n, dtype=np.int64)
    best_orig = np.zeros(n, dtype=np.int64)
    cand_orig = np.zeros(n, dtype=np.int64)
    total = 0
    for r in range(m):
        st, d, nd = _decode_core(L, Yp[r], U, budget, E, dist, u, step,
                                 best_orig, cand_orig)
        total += nd
        if st != STATUS_OK:
            return st, Z, D, total
        for j in range(n):
            Z[r, j] = best_orig[j]
        D[r] = d
    return STATUS_OK, Z, D, total


@njit(cache=True, nogil=True)
def _shortest_sq(L, budget):
    """Squared norm of the shortest nonzero vector of the lattice of L."""
    n = L.shape[0]
    best = np.inf
    for i in range(n):
        s = 0.0
        for j in range(i + 1):
            s += L[i, j] * L[i, j]
        if s < best:
            best = s

    E = np.zeros((n, n))
    dist = np.zeros(n)
    u = np.zeros(n, dtype=np.int64)
    step = np.zeros(n, dtype=np.int64)
    nodes = 0

    k = n - 1
    dist[k] = 0.0
    u[k] = 0
    step[k] = 1

    while True:
        nodes += 1
        if nodes > budget:
            return STATUS_BUDGET, best, nodes
        d = E[k, k] - u[k] * L[k, k]
        newdist = dist[k] + d * d
        if newdist <= best * (1.0 - 1e-15):
            if k > 0:
                for j in range(k):
                    E[k - 1, j] = E[k, j] - u[k] * L[k, j]
                dist[k - 1] = newdist
                k -= 1
                c = E[k, k] / L[k, k]
                u[k] = np.int64(np.rint(c))
                step[k] = 1 if c - u[k] >= 0 else -1
                continue
            nonzero = False
            for i in range(n):
                if u[i] != 0:
                    nonzero = True
                    break
            if nonzero and newdist < best:
                best = newdist
            u[0] += step[0]
            step[0] = -step[0] - (1 if step[0] >= 0 else -1)
            continue
        if k == n - 1:
            break
        k += 1
        u[k] += step[k]
        step[k] = -step[k] - (1 if step[k] >= 0 else -1)

    return STATUS_OK, best, nodes


@njit(cache=True, nogil=True)
def _norms_upto(L, cap, budget, max_out):
    """Squared norms of all nonzero lattice vectors with norm^2 <= cap.

    Returns (status, norms, count); norms[:count] is unsorted.
    """
    n = L.shape[0]
    out = np.zeros(max_out)
    count = 0
    bound = cap * (1.0 + 1e-12) + 1e-15

    E = np.zeros((n, n))
    dist = np.zeros(n)
    u = np.zeros(n, dtype=np.int64)
    step = np.zeros(n, dtype=np.int64)
    nodes = 0

    k = n - 1
    dist[k] = 0.0
    u[k] = 0
    step[k] = 1

    while True:
        nodes += 1
        if nodes > budget:
            return STATUS_BUDGET, out, count
        d = E[k, k] - u[k] * L[k, k]
        newdist = dist[k] + d * d
        if newdist <= bound:
            if k > 0:
                for j in range(k):
                    E[k - 1, j] = E[k, j] - u[k] * L[k, j]
                dist[k - 1] = newdist
                k -= 1
                c = E[k, k] / L[k, k]
                u[k] = np.int64(np.rint(c))
                step[k] = 1 if c - u[k] >= 0 else -1
                continue
            nonzero = False
            for i in range(n):
                if u[i] != 0:
                    nonzero = True
                    break
            if nonzero:
                if count >= max_out:
                    return STATUS_OVERFLOW, out, count
                out[count] = newdist
                count += 1
            u[0] += step[0]
            step[0] = -step[0] - (1 if step[0] >= 0 else -1)
            continue
        if k == n - 1:
            break
        k += 1
        u[k] += step[k]
        step[k] = -step[k] - (1 if step[k] >= 0 else -1)

    return STATUS_OK, out, count


@njit(cache=True, nogil=True)
def _collect_within(L, yp, cap, budget, max_out):
    """All z with ||z L - yp||^2 <= cap. Returns (status, Z, count)."""
    n = L.shape[0]
    Z = np.zeros((max_out, n), dtype=np.int64)
    count = 0
    bound = cap * (1.0 + 1e-12) + 1e-15

    E = np.zeros((n, n))
    dist = np.zeros(n)
    u = np.zeros(n, dtype=np.int64)
    step = np.zeros(n, dtype=np.int64)
    nodes = 0

    k = n - 1
    for j in range(n):
        E[k, j] = yp[j]
    dist[k] = 0.0
    c = E[k, k] / L[k, k]
    u[k] = np.int64(np.rint(c))
    step[k] = 1 if c - u[k] >= 0 else -1

    while True:
        nodes += 1
        if nodes > budget:
            return STATUS_BUDGET, Z, count
        d = E[k, k] - u[k] * L[k, k]
        newdist = dist[k] + d * d
        if newdist <= bound:
            if k > 0:
                for j in range(k):
                    E[k - 1, j] = E[k, j] - u[k] * L[k, j]
                dist[k - 1] = newdist
                k -= 1
                c = E[k, k] / L[k, k]
                u[k] = np.int64(np.rint(c))
                step[k] = 1 if c - u[k] >= 0 else -1
                continue
            if count >= max_out:
                return STATUS_OVERFLOW, Z, count
            for i in range(n):
                Z[count, i] = u[i]
            count += 1
            u[0] += step[0]
            step[0] = -step[0] - (1 if step[0] >= 0 else -1)
            continue
        if k == n - 1:
            break
        k += 1
        u[k] += step[k]
        step[k] = -step[k] - (1 if step[k] >= 0 else -1)

    return STATUS_OK, Z, count


@njit(cache=True, nogil=True, inline="always")
def _fill_order(order, k, width, lo, c):
    """Values lo..lo+width-1 sorted by |v - c|, value ascending on ties."""
    for w in range(width):
        order[k, w] = lo + w
    for a in range(1, width):
        key = order[k, a]
        b = a - 1
        while b >= 0:
            va = abs(key - c)
            vb = abs(order[k, b] - c)
            if vb > va or (vb == va and order[k, b] > key):
                order[k, b + 1] = order[k, b]
                b -= 1
            else:
                break
        order[k, b + 1] = key


@njit(cache=True, nogil=True)
def _box_decode(L, yp, lo, hi, budget):
    """Closest point with coordinates restricted to {lo, ..., hi}.

    Works in the caller's basis directly (no reduction), so the
    lexicographic tie-break applies to the returned z itself.
    Returns (status, z, dist_sq, nodes).
    """
    n = L.shape[0]
    width = hi - lo + 1
    E = np.zeros((n, n))
    dist = np.zeros(n)
    order = np.zeros((n, width), dtype=np.int64)
    idx = np.zeros(n, dtype=np.int64)
    u = np.zeros(n, dtype=np.int64)
    best = np.inf
    best_z = np.zeros(n, dtype=np.int64)
    have = False
    nodes = 0

    k = n - 1
    for j in range(n):
        E[k, j] = yp[j]
    dist[k] = 0.0
    _fill_order(order, k, width, lo, E[k, k] / L[k, k])
    idx[k] = 0

    while True:
        nodes += 1
        if nodes > budget:
            return STATUS_BUDGET, best_z, best, nodes
        if idx[k] >= width:
            if k == n - 1:
                break
            k += 1
            idx[k] += 1
            continue
        uk = order[k, idx[k]]
        d = E[k, k] - uk * L[k, k]
        newdist = dist[k] + d * d
        tol = TIE_REL * (1.0 + best) if have else 0.0
        if newdist <= best + tol:
            u[k] = uk
            if k > 0:
                for j in range(k):
                    E[k - 1, j] = E[k, j] - uk * L[k, j]
                dist[k - 1] = newdist
                k -= 1
                _fill_order(order, k, width, lo, E[k, k] / L[k, k])
                idx[k] = 0
                continue
            if (not have) or newdist < best - tol:
                best = newdist
                have = True
                for i in range(n):
                    best_z[i] = u[i]
            elif _lex_less(u, best_z):
                for i in range(n):
                    best_z[i] = u[i]
                if newdist < best:
                    best = newdist
            idx[0] += 1
            continue
        # ordered by distance: the rest of this level is pruned too
        if k == n - 1:
            break
        k += 1
        idx[k] += 1

    return STATUS_OK, best_z, best, nodes
