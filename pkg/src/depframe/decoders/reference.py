"""Plain-Python decoders kept as speed baselines and cross-checks."""
from __future__ import annotations

import math

NEG_INF = -math.inf


def eisner_reference_heads(s: list[list[float]]) -> list[int]:
    """Textbook Eisner over nested lists; ``s`` is already masked."""
    m = len(s)
    n = m - 1
    comp = [[[NEG_INF, NEG_INF] for _ in range(m)] for _ in range(m)]
    inc = [[[NEG_INF, NEG_INF] for _ in range(m)] for _ in range(m)]
    comp_bp = [[[0, 0] for _ in range(m)] for _ in range(m)]
    inc_bp = [[[0, 0] for _ in range(m)] for _ in range(m)]
    for i in range(m):
        comp[i][i] = [0.0, 0.0]

    for k in range(1, m):
        for a in range(m - k):
            b = a + k
            cands = [comp[a][r][1] + comp[r + 1][b][0] for r in range(a, b)]
            best = max(cands)
            arg = a + cands.index(best)
            inc[a][b][0] = best + s[b][a]
            inc[a][b][1] = best + s[a][b]
            inc_bp[a][b] = [arg, arg]

            cands = [comp[a][r][0] + inc[r][b][0] for r in range(a, b)]
            best = max(cands)
            comp[a][b][0] = best
            comp_bp[a][b][0] = a + cands.index(best)

            cands = [inc[a][r][1] + comp[r][b][1] for r in range(a + 1, b + 1)]
            best = max(cands)
            comp[a][b][1] = best
            comp_bp[a][b][1] = a + 1 + cands.index(best)

    heads = [-1] * m

    def backtrack(a, b, direction, complete):
        if a == b:
            return
        if complete:
            r = comp_bp[a][b][direction]
            if direction == 0:
                backtrack(a, r, 0, True)
                backtrack(r, b, 0, False)
            else:
                backtrack(a, r, 1, False)
                backtrack(r, b, 1, True)
        else:
            r = inc_bp[a][b][direction]
            if direction == 0:
                heads[a] = b
            else:
                heads[b] = a
            backtrack(a, r, 1, True)
            backtrack(r + 1, b, 0, True)

    backtrack(0, n, 1, True)
    return heads[1:]


def _find_cycle(parent: dict[int, int]) -> list[int] | None:
    seen: dict[int, int] = {}
    for start in parent:
        v = start
        while v in parent and v not in seen:
            seen[v] = start
            v = parent[v]
        if v in parent and seen.get(v) == start:
            cycle = [v]
            u = parent[v]
            while u != v:
                cycle.append(u)
                u = parent[u]
            return cycle
    return None


def _cle(nodes: list[int], score: dict[tuple[int, int], float]) -> dict[int, int]:
    parent = {}
    for v in nodes:
        if v == 0:
            continue
        incoming = [(score[(u, v)], u) for u in nodes if u != v and (u, v) in score]
        best = max(sc for sc, _ in incoming)
        parent[v] = next(u for sc, u in incoming if sc == best)
    cycle = _find_cycle(parent)
    if cycle is None:
        return parent

    cyc = set(cycle)
    c = max(nodes) + 1
    new_score: dict[tuple[int, int], float] = {}
    enters: dict[int, int] = {}
    leaves: dict[int, int] = {}
    for (u, v), sc in score.items():
        if u in cyc and v in cyc:
            continue
        if v in cyc:
            val = sc - score[(parent[v], v)]
            if (u, c) not in new_score or val > new_score[(u, c)]:
                new_score[(u, c)] = val
                enters[u] = v
        elif u in cyc:
            if (c, v) not in new_score or sc > new_score[(c, v)]:
                new_score[(c, v)] = sc
                leaves[v] = u
        else:
            new_score[(u, v)] = sc
    sub = _cle([v for v in nodes if v not in cyc] + [c], new_score)

    result = {}
    for v, u in sub.items():
        if v == c:
            entry = enters[u]
            result[entry] = u
            for w in cycle:
                if w != entry:
                    result[w] = parent[w]
        elif u == c:
            result[v] = leaves[v]
        else:
            result[v] = u
    return result


def cle_reference_heads(s: list[list[float]]) -> list[int]:
    """Recursive contract-and-expand Chu-Liu-Edmonds over dicts."""
    m = len(s)
    score = {(u, v): s[u][v] for u in range(m) for v in range(1, m) if u != v}
    parent = _cle(list(range(m)), score)
    return [parent[d] for d in range(1, m)]
