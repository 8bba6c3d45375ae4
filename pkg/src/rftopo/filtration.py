"""Star filtrations along values given on the d-simplices of a complex."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FiltrationValidationError, IllPosedFiltrationError
from .mesh import SimplicialComplex

NATIVE_HEADER = "dim value v0 [v1 [v2]]"


@dataclass
class Filtration:
    """Simplices in filtration order.

    ``verts`` is padded with -1 past the simplex dimension; ``ids`` are the
    per-dimension indices in the source complex.
    """

    dims: np.ndarray
    ids: np.ndarray
    verts: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.dims)

    @property
    def distinct_values(self):
        return np.unique(self.values)

    def simplex(self, k):
        d = int(self.dims[k])
        return tuple(int(v) for v in self.verts[k, :d + 1])

    def boundary(self):
        """Boundary columns in filtration order as CSR-like (indptr, indices).

        Row indices are positions in the order and sorted ascending.
        """
        pos = {}
        for k in range(len(self)):
            pos[self.simplex(k)] = k
        indptr = np.zeros(len(self) + 1, dtype=np.int64)
        indices = []
        for k in range(len(self)):
            s = self.simplex(k)
            if len(s) > 1:
                rows = []
                for drop in range(len(s)):
                    face = s[:drop] + s[drop + 1:]
                    if face not in pos:
                        raise FiltrationValidationError(f"face {face} of {s} is missing")
                    rows.append(pos[face])
                indices.extend(sorted(rows))
            indptr[k + 1] = len(indices)
        return indptr, np.asarray(indices, dtype=np.int64)

    # --- file formats -----------------------------------------------------

    def lines(self):
        out = [NATIVE_HEADER]
        for k in range(len(self)):
            vs = " ".join(str(v) for v in self.simplex(k))
            out.append(f"{int(self.dims[k])} {format(float(self.values[k]), '.17g')} {vs}")
        return out

    def write(self, path):
        with open(path, "w") as fh:
            fh.write("\n".join(self.lines()) + "\n")

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            rows = [ln.split() for ln in fh.read().splitlines()[1:] if ln.strip()]
        dims = np.array([int(r[0]) for r in rows], dtype=np.int64)
        values = np.array([float(r[1]) for r in rows])
        verts = np.full((len(rows), 3), -1, dtype=np.int64)
        counters = {}
        ids = np.empty(len(rows), dtype=np.int64)
        for k, r in enumerate(rows):
            vs = [int(v) for v in r[2:]]
            verts[k, :len(vs)] = vs
            d = int(r[0])
            ids[k] = counters.get(d, 0)
            counters[d] = ids[k] + 1
        return cls(dims, ids, verts, values)

    def write_perseus(self, path, scale=1e6):
        """Lossy export in Perseus' non-uniform simplicial format.

        Values are scaled, rounded and shifted so the smallest birth is 1;
        vertex ids become 1-based.
        """
        births = np.rint(self.values * scale).astype(np.int64)
        if len(births):
            births = births - births.min() + 1
        with open(path, "w") as fh:
            fh.write("1\n")
            for k in range(len(self)):
                vs = " ".join(str(v + 1) for v in self.simplex(k))
                fh.write(f"{int(self.dims[k])} {vs} {int(births[k])}\n")


def _vertex_cofaces_min(n_vertices, simplices, vals):
    out = np.full(n_vertices, np.inf)
    for col in range(simplices.shape[1]):
        np.minimum.at(out, simplices[:, col], vals)
    return out


def _edge_index(edges):
    return {(int(a), int(b)): k for k, (a, b) in enumerate(edges)}


def simplex_values(cx: SimplicialComplex, values, d=1):
    """Filtration value of every simplex, per dimension (list of 3 arrays)."""
    values = np.asarray(values, dtype=float)
    V, E, F = cx.counts()
    expected = (V, E, F)[d]
    if values.shape != (expected,):
        raise ValueError(f"need {expected} values on the {d}-simplices, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise FiltrationValidationError("filtration values must be finite")
    edges, tris = cx.edges, cx.triangles
    if d == 0:
        v = values
        e = np.maximum(v[edges[:, 0]], v[edges[:, 1]]) if E else np.empty(0)
        t = np.maximum.reduce([v[tris[:, i]] for i in range(3)]) if F else np.empty(0)
    elif d == 1:
        e = values
        v = _vertex_cofaces_min(V, edges, e)
        if F:
            idx = _edge_index(edges)
            tri_edges = np.array([[idx[(a, b)], idx[(a, c)], idx[(b, c)]] for a, b, c in tris])
            t = e[tri_edges].max(axis=1)
        else:
            t = np.empty(0)
    elif d == 2:
        t = values
        v = _vertex_cofaces_min(V, tris, t)
        e = np.full(E, np.inf)
        idx = _edge_index(edges)
        for k, (a, b, c) in enumerate(tris):
            for pair in ((a, b), (a, c), (b, c)):
                j = idx[pair]
                if t[k] < e[j]:
                    e[j] = t[k]
    else:
        raise ValueError("d must be 0, 1 or 2")
    for dim, arr in ((0, v), (1, e)):
        if dim < d and np.any(np.isinf(arr)):
            k = int(np.argmax(np.isinf(arr)))
            raise IllPosedFiltrationError(
                f"{dim}-simplex {k} has no {d}-dimensional coface to inherit a value from")
    return [np.asarray(v, dtype=float), np.asarray(e, dtype=float), np.asarray(t, dtype=float)]


def star_filtration(cx: SimplicialComplex, values, d=1) -> Filtration:
    """Order all simplices by (value, dimension, id)."""
    per_dim = simplex_values(cx, values, d)
    dims, ids, verts, vals = [], [], [], []
    for dim, arr in enumerate(per_dim):
        n = len(arr)
        dims.append(np.full(n, dim, dtype=np.int64))
        ids.append(np.arange(n, dtype=np.int64))
        pad = np.full((n, 3), -1, dtype=np.int64)
        pad[:, :dim + 1] = cx.simplices(dim)
        verts.append(pad)
        vals.append(arr)
    dims = np.concatenate(dims)
    ids = np.concatenate(ids)
    verts = np.concatenate(verts)
    vals = np.concatenate(vals)
    order = np.lexsort((ids, dims, vals))
    return Filtration(dims[order], ids[order], verts[order], vals[order])


def validate(f: Filtration):
    """Check finiteness and that faces never follow their cofaces."""
    if not np.all(np.isfinite(f.values)):
        k = int(np.argmax(~np.isfinite(f.values)))
        raise FiltrationValidationError(f"simplex {f.simplex(k)} has non-finite value")
    pos = {f.simplex(k): k for k in range(len(f))}
    if len(pos) != len(f):
        raise FiltrationValidationError("duplicate simplices in filtration")
    for k in range(len(f)):
        s = f.simplex(k)
        if len(s) == 1:
            continue
        for drop in range(len(s)):
            face = s[:drop] + s[drop + 1:]
            j = pos.get(face)
            if j is None:
                raise FiltrationValidationError(f"face {face} of {s} is missing")
            if j > k or f.values[j] > f.values[k]:
                raise FiltrationValidationError(
                    f"face {face} (position {j}, value {f.values[j]!r}) comes after "
                    f"coface {s} (position {k}, value {f.values[k]!r})")
    counts = {d: int(np.sum(f.dims == d)) for d in range(3)}
    return {"counts": counts, "n_distinct_values": int(len(f.distinct_values))}
