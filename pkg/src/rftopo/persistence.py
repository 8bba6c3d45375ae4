"""Persistence diagrams by GF(2) reduction of the filtered boundary matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import OrderingError
from .filtration import Filtration


@dataclass
class PersistenceDiagram:
    dimension: int
    points: np.ndarray  # (n, 2); essential classes have death = inf

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if np.any(pts[:, 1] < pts[:, 0]):
            raise ValueError("every point needs birth <= death")
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        self.points = pts[order]

    def __len__(self):
        return len(self.points)

    @property
    def finite(self):
        return self.points[np.isfinite(self.points[:, 1])]

    @property
    def essential(self):
        return self.points[~np.isfinite(self.points[:, 1])]

    def as_multiset(self):
        return sorted((float(b), float(d)) for b, d in self.points)


def _check_order(f: Filtration, indptr, indices):
    if np.any(np.diff(f.values) < 0):
        k = int(np.argmax(np.diff(f.values) < 0))
        raise OrderingError(f"values decrease between positions {k} and {k + 1}")
    cols = np.repeat(np.arange(len(f)), np.diff(indptr))
    bad = indices >= cols
    if np.any(bad):
        k = int(np.argmax(bad))
        raise OrderingError(
            f"simplex at position {cols[k]} precedes its face at position {indices[k]}")


def pairs(f: Filtration, clearing=True, backend=None):
    """Persistence pairs as ``(birth_pos, death_pos)`` with -1 for essential."""
    indptr, indices = f.boundary()
    _check_order(f, indptr, indices)
    reduce_boundary = kernels.get_backend(backend).reduce_boundary
    low = reduce_boundary(indptr, indices, np.ascontiguousarray(f.dims, dtype=np.int64),
                          bool(clearing))
    paired = np.zeros(len(f), dtype=bool)
    out = []
    for j in np.flatnonzero(low >= 0):
        i = int(low[j])
        paired[i] = paired[j] = True
        out.append((i, int(j)))
    for k in np.flatnonzero(~paired):
        out.append((int(k), -1))
    out.sort()
    return out


def reduce(f: Filtration, keep_zero_length=True, clearing=True, backend=None):
    """Diagrams for dimensions 0..max dimension of the filtration."""
    top = int(f.dims.max()) if len(f) else 0
    pts = {d: [] for d in range(top + 1)}
    for i, j in pairs(f, clearing, backend):
        b = float(f.values[i])
        dth = math.inf if j < 0 else float(f.values[j])
        if not keep_zero_length and dth == b:
            continue
        pts[int(f.dims[i])].append((b, dth))
    return [PersistenceDiagram(d, pts[d]) for d in range(top + 1)]


@dataclass
class BettiTable:
    thresholds: np.ndarray
    betti: np.ndarray  # (n_thresholds, 3)

    def rows(self):
        for p, b in zip(self.thresholds, self.betti):
            yield float(p), int(b[0]), int(b[1]), int(b[2])


def betti_at(diagrams, p):
    out = [0, 0, 0]
    for dg in diagrams:
        if dg.dimension > 2 or len(dg) == 0:
            continue
        b, d = dg.points[:, 0], dg.points[:, 1]
        out[dg.dimension] = int(np.sum((b <= p) & (p < d)))
    return out


def betti_table(diagrams, thresholds) -> BettiTable:
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be sorted")
    rows = np.array([betti_at(diagrams, p) for p in thresholds], dtype=np.int64).reshape(-1, 3)
    return BettiTable(thresholds, rows)


def lifespans(diagram: PersistenceDiagram):
    """Finite lifespans d - b and the number of essential classes."""
    fin = diagram.finite
    return fin[:, 1] - fin[:, 0], int(len(diagram.essential))


def euler_check(f: Filtration, diagrams, thresholds=None):
    """Per threshold: (alternating Betti sum, alternating simplex count)."""
    if thresholds is None:
        thresholds = f.distinct_values
    out = []
    for p in thresholds:
        b = betti_at(diagrams, p)
        inside = f.dims[f.values <= p]
        chi = sum((-1) ** d * int(np.sum(inside == d)) for d in range(3))
        out.append((b[0] - b[1] + b[2], chi))
    return out
