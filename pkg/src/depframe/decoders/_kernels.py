"""Compiled first-order decoding kernels.

All kernels take a float64 (n+1, n+1) matrix whose column 0 and diagonal are
already -inf, and return an int64 head array of length n+1 (entry 0 unused).
"""
import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True)
def eisner_kernel(scores):
    m = scores.shape[0]
    n = m - 1
    # [s, t, 0] head at t (left-facing), [s, t, 1] head at s (right-facing)
    comp = np.full((m, m, 2), NEG_INF)
    inc = np.full((m, m, 2), NEG_INF)
    comp_bp = np.zeros((m, m, 2), dtype=np.int64)
    inc_bp = np.zeros((m, m, 2), dtype=np.int64)
    for s in range(m):
        comp[s, s, 0] = 0.0
        comp[s, s, 1] = 0.0

    for k in range(1, m):
        for s in range(m - k):
            t = s + k
            best = NEG_INF
            arg = s
            for r in range(s, t):
                v = comp[s, r, 1] + comp[r + 1, t, 0]
                if v > best:
                    best = v
                    arg = r
            inc[s, t, 0] = best + scores[t, s]
            inc[s, t, 1] = best + scores[s, t]
            inc_bp[s, t, 0] = arg
            inc_bp[s, t, 1] = arg

            best = NEG_INF
            arg = s
            for r in range(s, t):
                v = comp[s, r, 0] + inc[r, t, 0]
                if v > best:
                    best = v
                    arg = r
            comp[s, t, 0] = best
            comp_bp[s, t, 0] = arg

            best = NEG_INF
            arg = t
            for r in range(s + 1, t + 1):
                v = inc[s, r, 1] + comp[r, t, 1]
                if v > best:
                    best = v
                    arg = r
            comp[s, t, 1] = best
            comp_bp[s, t, 1] = arg

    heads = np.full(m, -1, dtype=np.int64)
    # explicit stack of (s, t, direction, complete)
    stack = np.empty((4 * m + 4, 4), dtype=np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 1
    stack[0, 3] = 1
    top = 1
    while top > 0:
        top -= 1
        s = stack[top, 0]
        t = stack[top, 1]
        direction = stack[top, 2]
        complete = stack[top, 3]
        if s == t:
            continue
        if complete == 1:
            r = comp_bp[s, t, direction]
            if direction == 0:
                # C[s,r,L] + I[r,t,L]
                stack[top, 0] = s; stack[top, 1] = r; stack[top, 2] = 0; stack[top, 3] = 1
                stack[top + 1, 0] = r; stack[top + 1, 1] = t; stack[top + 1, 2] = 0; stack[top + 1, 3] = 0
            else:
                # I[s,r,R] + C[r,t,R]
                stack[top, 0] = s; stack[top, 1] = r; stack[top, 2] = 1; stack[top, 3] = 0
                stack[top + 1, 0] = r; stack[top + 1, 1] = t; stack[top + 1, 2] = 1; stack[top + 1, 3] = 1
            top += 2
        else:
            r = inc_bp[s, t, direction]
            if direction == 0:
                heads[s] = t
            else:
                heads[t] = s
            stack[top, 0] = s; stack[top, 1] = r; stack[top, 2] = 1; stack[top, 3] = 1
            stack[top + 1, 0] = r + 1; stack[top + 1, 1] = t; stack[top + 1, 2] = 0; stack[top + 1, 3] = 1
            top += 2
    return heads


@njit(cache=True)
def cle_kernel(scores):
    m = scores.shape[0]
    work = scores.copy()
    # original arc behind each working arc
    orig_h = np.empty((m, m), dtype=np.int64)
    orig_d = np.empty((m, m), dtype=np.int64)
    for u in range(m):
        for v in range(m):
            orig_h[u, v] = u
            orig_d[u, v] = v
    active = np.ones(m, dtype=np.bool_)
    owner = np.arange(m)
    parent = np.full(m, -1, dtype=np.int64)
    mark = np.full(m, -1, dtype=np.int64)
    in_cycle = np.zeros(m, dtype=np.bool_)
    members = np.empty(m, dtype=np.int64)
    # per contraction k: owner of each original node inside the cycle (else -1),
    # and the original arc of each member's cycle edge
    rec_owner = np.full((m, m), -1, dtype=np.int64)
    rec_h = np.full((m, m), -1, dtype=np.int64)
    rec_d = np.full((m, m), -1, dtype=np.int64)
    nrec = 0

    while True:
        for v in range(1, m):
            if not active[v]:
                continue
            best = NEG_INF
            bp = -1
            for u in range(m):
                if u == v or not active[u]:
                    continue
                if bp == -1 or work[u, v] > best:
                    best = work[u, v]
                    bp = u
            parent[v] = bp

        for v in range(m):
            mark[v] = -1
        start_cycle = -1
        for v in range(1, m):
            if not active[v] or mark[v] != -1:
                continue
            u = v
            while u != 0 and mark[u] == -1:
                mark[u] = v
                u = parent[u]
            if u != 0 and mark[u] == v:
                start_cycle = u
                break
        if start_cycle == -1:
            break

        size = 0
        u = start_cycle
        while True:
            members[size] = u
            in_cycle[u] = True
            size += 1
            u = parent[u]
            if u == start_cycle:
                break
        rep = start_cycle

        for x in range(m):
            if in_cycle[owner[x]]:
                rec_owner[nrec, x] = owner[x]
        for i in range(size):
            c = members[i]
            rec_h[nrec, c] = orig_h[parent[c], c]
            rec_d[nrec, c] = orig_d[parent[c], c]

        for v in range(m):
            if not active[v] or in_cycle[v]:
                continue
            best_in = NEG_INF
            bc = members[0]
            best_out = NEG_INF
            bo = members[0]
            for i in range(size):
                c = members[i]
                val = work[v, c] - work[parent[c], c]
                if val > best_in:
                    best_in = val
                    bc = c
                if work[c, v] > best_out:
                    best_out = work[c, v]
                    bo = c
            work[v, rep] = best_in
            orig_h[v, rep] = orig_h[v, bc]
            orig_d[v, rep] = orig_d[v, bc]
            work[rep, v] = best_out
            orig_h[rep, v] = orig_h[bo, v]
            orig_d[rep, v] = orig_d[bo, v]

        for i in range(size):
            c = members[i]
            if c != rep:
                active[c] = False
        for x in range(m):
            if in_cycle[owner[x]]:
                owner[x] = rep
        for i in range(size):
            in_cycle[members[i]] = False
        nrec += 1

    heads = np.full(m, -1, dtype=np.int64)
    for v in range(1, m):
        if active[v]:
            p = parent[v]
            heads[orig_d[p, v]] = orig_h[p, v]

    for k in range(nrec - 1, -1, -1):
        entered = -1
        for x in range(m):
            if rec_owner[k, x] != -1 and heads[x] != -1:
                entered = rec_owner[k, x]
                break
        for c in range(m):
            if rec_h[k, c] != -1 and c != entered:
                heads[rec_d[k, c]] = rec_h[k, c]
    return heads


@njit(cache=True)
def _crosses(a, b, c, d):
    lo1 = min(a, b)
    hi1 = max(a, b)
    lo2 = min(c, d)
    hi2 = max(c, d)
    return (lo1 < lo2 < hi1 < hi2) or (lo2 < lo1 < hi2 < hi1)


@njit(cache=True)
def brute_force_kernel(scores, projective):
    """Depth-first enumeration of head assignments in lexicographic order.

    Partial assignments that already contain a cycle (or a crossing pair of
    arcs when ``projective``) are abandoned, and so is any branch whose
    optimistic completion cannot reach the incumbent. The first maximal
    assignment found is kept, so ties resolve to the smallest head array.
    """
    m = scores.shape[0]
    n = m - 1
    colmax = np.zeros(m + 1)
    for d in range(1, m):
        best = NEG_INF
        for h in range(m):
            if h != d and scores[h, d] > best:
                best = scores[h, d]
        colmax[d] = best
    # optimistic score of positions d..n
    suffix = np.zeros(m + 2)
    for d in range(n, 0, -1):
        suffix[d] = suffix[d + 1] + colmax[d]
    scale = 0.0
    for d in range(1, m):
        scale += abs(colmax[d])
    tol = 1e-9 * (1.0 + scale)

    heads = np.zeros(m + 1, dtype=np.int64)
    nxt = np.zeros(m + 2, dtype=np.int64)
    partial = np.zeros(m + 2)
    best = NEG_INF
    best_heads = np.full(m, -1, dtype=np.int64)
    d = 1
    while d >= 1:
        if d > n:
            if partial[d] > best:
                best = partial[d]
                for j in range(1, m):
                    best_heads[j] = heads[j]
            d -= 1
            continue
        h = nxt[d]
        if h > n:
            d -= 1
            continue
        nxt[d] = h + 1
        if h == d:
            continue
        sc = scores[h, d]
        if sc == NEG_INF:
            continue
        if best > NEG_INF and partial[d] + sc + suffix[d + 1] < best - tol:
            continue
        u = h
        cyclic = False
        while u != 0 and u < d:
            u = heads[u]
        if u == d:
            cyclic = True
        if cyclic:
            continue
        if projective:
            ok = True
            for j in range(1, d):
                if _crosses(h, d, heads[j], j):
                    ok = False
                    break
            if not ok:
                continue
        heads[d] = h
        partial[d + 1] = partial[d] + sc
        d += 1
        if d <= n:
            nxt[d] = 0
    return best_heads, best
