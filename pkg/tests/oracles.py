"""Reference implementations written independently of the package code."""

from fractions import Fraction
from functools import reduce


def raw_edges(concepts, w_nt, w_bt, w_rt):
    """Directed hop costs straight from a raw concept list."""
    parent = {c["id"]: c.get("parent") for c in concepts}

    def depth(cid):
        d = 1
        while parent[cid] is not None:
            cid = parent[cid]
            d += 1
        return d

    edges = {c["id"]: [] for c in concepts}
    for c in concepts:
        p = c.get("parent")
        if p is not None:
            edges[p].append((c["id"], w_nt / depth(c["id"])))
            edges[c["id"]].append((p, w_bt / depth(p)))
        for r in c.get("related", []):
            edges[c["id"]].append((r, w_rt / depth(r)))
    return edges


def all_paths_distance(edges, a, b):
    """Minimum cost over every simple directed path from a to b (exhaustive)."""
    if a == b:
        return 0.0
    best = float("inf")

    def walk(node, cost, seen):
        nonlocal best
        for nxt, c in edges[node]:
            if nxt in seen:
                continue
            if nxt == b:
                best = min(best, cost + c)
            else:
                walk(nxt, cost + c, seen | {nxt})

    walk(a, 0.0, {a})
    return best


def support_fold_belief(alphas):
    """Belief in T after fusing simple support functions: 1 - prod(1 - a)."""
    return 1.0 - reduce(lambda acc, a: acc * (1.0 - a), alphas, 1.0)


def brute_force_11pt(run, relevant):
    """Max precision over every cut-off whose recall reaches each level, in exact arithmetic."""
    relevant = set(relevant)
    total = len(relevant)
    run = list(dict.fromkeys(run))
    cuts = []
    hits = 0
    for k, d in enumerate(run, 1):
        hits += d in relevant
        cuts.append((Fraction(hits, total), Fraction(hits, k)))
    curve = []
    for j in range(11):
        level = Fraction(j, 10)
        ps = [p for r, p in cuts if r >= level]
        curve.append(float(max(ps)) if ps else 0.0)
    return tuple(curve)


def dempster(m1, m2):
    """Dempster's rule over arbitrary focal sets given as {frozenset: mass}."""
    out = {}
    conflict = 0.0
    for a, x in m1.items():
        for b, y in m2.items():
            c = a & b
            if c:
                out[c] = out.get(c, 0.0) + x * y
            else:
                conflict += x * y
    return {k: v / (1.0 - conflict) for k, v in out.items()}
