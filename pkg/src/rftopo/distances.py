"""Bottleneck and Wasserstein distances between persistence diagrams.

Finite points may be matched to the diagonal at L-infinity cost (d - b)/2.
Essential points (death = inf) are matched among themselves in birth order
at cost |b - b'|; different essential counts give an infinite distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

SINGLE_FEATURE_RATIO = 1.05


def _split(points):
    pts = np.asarray(getattr(points, "points", points), dtype=float).reshape(-1, 2)
    ess = np.isinf(pts[:, 1])
    return pts[~ess], np.sort(pts[ess, 0])


def cost_matrix(a, b):
    """Square augmented cost matrix for finite point sets ``a`` (n) and ``b`` (m).

    Rows: a's points then m diagonal slots; columns: b's points then n slots.
    """
    n, m = len(a), len(b)
    c = np.zeros((n + m, n + m))
    if n and m:
        c[:n, :m] = np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]),
                               np.abs(a[:, None, 1] - b[None, :, 1]))
    if n:
        c[:n, m:] = ((a[:, 1] - a[:, 0]) / 2.0)[:, None]
    if m:
        c[n:, :m] = ((b[:, 1] - b[:, 0]) / 2.0)[None, :]
    return c


def _essential_costs(ea, eb):
    if len(ea) != len(eb):
        return None
    return np.abs(ea - eb)


def wasserstein(pd_a, pd_b, q=1):
    fa, ea = _split(pd_a)
    fb, eb = _split(pd_b)
    ess = _essential_costs(ea, eb)
    if ess is None:
        return math.inf
    terms = list(ess ** q)
    if len(fa) + len(fb):
        c = cost_matrix(fa, fb) ** q
        rows, cols = linear_sum_assignment(c)
        terms += list(c[rows, cols])
    # fsum is exactly rounded, so the result does not depend on argument order
    return math.fsum(terms) ** (1.0 / q)


def _perfect_matching_exists(c, threshold):
    graph = csr_matrix((c <= threshold).astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(pd_a, pd_b):
    fa, ea = _split(pd_a)
    fb, eb = _split(pd_b)
    ess = _essential_costs(ea, eb)
    if ess is None:
        return math.inf
    best = float(ess.max()) if len(ess) else 0.0
    if len(fa) + len(fb) == 0:
        return best
    c = cost_matrix(fa, fb)
    cand = np.unique(c)
    lo, hi = 0, len(cand) - 1  # the largest candidate always admits a matching
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(c, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return max(best, float(cand[lo]))


def distance_triple(pd_a, pd_b):
    return bottleneck(pd_a, pd_b), wasserstein(pd_a, pd_b, 1), wasserstein(pd_a, pd_b, 2)


@dataclass
class DistanceReport:
    pair_index: int
    dim: int
    d_bottleneck: float
    d_wasserstein1: float
    d_wasserstein2: float
    ratio_w1_b: float | None
    ratio_w1_w2: float | None
    tag: str


def _ratio(num, den):
    if den > 0 and math.isfinite(den) and math.isfinite(num):
        return num / den
    return None


def ratio_report(triples, threshold=SINGLE_FEATURE_RATIO):
    """Ratios (d_W1/d_B, d_W1/d_W2) and a single/multi-feature tag per pair.

    ``triples`` is a sequence of ``(pair_index, dim, d_B, d_W1, d_W2)`` or of
    bare ``(d_B, d_W1, d_W2)`` (numbered from 1, dimension 0).
    """
    out = []
    for k, row in enumerate(triples, start=1):
        if len(row) == 3:
            idx, dim, (db, dw1, dw2) = k, 0, row
        else:
            idx, dim, db, dw1, dw2 = row
        r1 = _ratio(dw1, db)
        r2 = _ratio(dw1, dw2)
        if r1 is None:
            tag = "undefined"
        elif r1 <= threshold:
            tag = "single-feature"
        else:
            tag = "multi-feature"
        out.append(DistanceReport(int(idx), int(dim), float(db), float(dw1), float(dw2),
                                  r1, r2, tag))
    return out
