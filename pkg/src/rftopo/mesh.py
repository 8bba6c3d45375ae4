"""Grid triangulation of the rotational surfaces and curvature sampling.

Row ``i`` runs along the polar direction (theta, or x for dumbbells) and
column ``j`` along the azimuth.  With 1-based indices the vertex id is
``v = j + (i - 1) * n_phi``; internally ids are 0-based (``v - 1``).  Each
cell is cut by the diagonal from (i, j) to (i + 1, j + 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomainError
from .profiles import uniform_grid


def vertex_index(i, j, n_phi):
    """1-based vertex id of grid point (i, j)."""
    return j + (i - 1) * n_phi


@dataclass(frozen=True)
class SimplicialComplex:
    """Vertices ``0..n_vertices-1`` with sorted edge and triangle arrays."""

    n_vertices: int
    edges: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "edges", _canonical(self.edges, 2))
        object.__setattr__(self, "triangles", _canonical(self.triangles, 3))

    def simplices(self, dim):
        if dim == 0:
            return np.arange(self.n_vertices, dtype=np.int64)[:, None]
        if dim == 1:
            return self.edges
        if dim == 2:
            return self.triangles
        raise ValueError(f"no simplices of dimension {dim}")

    def counts(self):
        return self.n_vertices, len(self.edges), len(self.triangles)

    @property
    def euler_characteristic(self):
        v, e, f = self.counts()
        return v - e + f

    def lines(self):
        """One simplex per line: dimension then sorted vertex ids."""
        out = [f"0 {v}" for v in range(self.n_vertices)]
        out += [f"1 {a} {b}" for a, b in self.edges]
        out += [f"2 {a} {b} {c}" for a, b, c in self.triangles]
        return out

    def write(self, path):
        with open(path, "w") as fh:
            fh.write("\n".join(self.lines()) + "\n")


def _canonical(arr, width):
    arr = np.asarray(arr, dtype=np.int64).reshape(-1, width)
    if arr.size == 0:
        return np.empty((0, width), dtype=np.int64)
    arr = np.sort(arr, axis=1)
    arr = np.unique(arr, axis=0)  # lexicographic order, duplicates merged
    return arr


def closure(n_vertices, triangles=(), edges=()):
    """Complex generated by the given triangles and extra edges."""
    tri = _canonical(triangles, 3)
    faces = [tri[:, [0, 1]], tri[:, [0, 2]], tri[:, [1, 2]], _canonical(edges, 2)]
    return SimplicialComplex(n_vertices, np.concatenate(faces), tri)


@dataclass(frozen=True)
class Triangulation(SimplicialComplex):
    n_theta: int = 0
    n_phi: int = 0
    wrap: bool = False

    @property
    def n_columns(self):
        return self.n_phi - 1 if self.wrap else self.n_phi

    def row_of(self, v):
        return np.asarray(v) // self.n_columns


def build_grid(n_theta, n_phi, wrap=False) -> Triangulation:
    """Triangulate an ``n_theta x n_phi`` vertex grid.

    With ``wrap`` the last column is identified with the first, so only
    ``n_phi - 1`` distinct columns remain and the surface is an annulus.
    """
    if n_theta < 2 or n_phi < 2:
        raise ValueError("n_theta and n_phi must be at least 2")
    if wrap and n_phi < 4:
        # fewer than three distinct columns would glue two edges together
        raise ValueError("wrap=True needs n_phi >= 4")
    cols = n_phi - 1 if wrap else n_phi

    def vid(i, j):  # 0-based row/col -> 0-based id
        return i * cols + (j % cols)

    tris = []
    for i in range(n_theta - 1):
        for j in range(n_phi - 1):
            a, b = vid(i, j), vid(i, j + 1)
            c, d = vid(i + 1, j), vid(i + 1, j + 1)
            tris.append((a, b, d))
            tris.append((a, c, d))
    base = closure(n_theta * cols, tris)
    return Triangulation(base.n_vertices, base.edges, base.triangles, n_theta, n_phi, wrap)


def row_coordinates(snapshot_grid, n_theta):
    """Mesh row positions spanning the solver domain evenly."""
    return uniform_grid(float(snapshot_grid[0]), float(snapshot_grid[-1]), n_theta)


def sample_vertex_curvature(grid, R, tri: Triangulation, coords=None):
    """Scalar curvature at every vertex, constant along each row.

    ``grid`` and ``R`` are the solver nodes and values; ``coords`` are the
    row positions (defaults to an even spread over the solver domain).
    """
    grid = np.asarray(grid, dtype=float)
    R = np.asarray(R, dtype=float)
    if coords is None:
        coords = row_coordinates(grid, tri.n_theta)
    coords = np.asarray(coords, dtype=float)
    if len(coords) != tri.n_theta:
        raise ValueError(f"expected {tri.n_theta} row coordinates, got {len(coords)}")
    if coords.min() < grid[0] or coords.max() > grid[-1]:
        raise OutOfDomainError(
            f"rows span [{coords.min()}, {coords.max()}] outside [{grid[0]}, {grid[-1]}]")
    if not np.all(np.isfinite(R)):
        raise ValueError("curvature contains non-finite values")
    if _mirror_symmetric(grid, R) and np.array_equal(coords, -coords[::-1]):
        # reflection-symmetric data: interpolate one half so rows mirror exactly
        rows = np.interp(-np.abs(coords), grid, R)
    else:
        rows = np.interp(coords, grid, R)
    return np.repeat(rows, tri.n_columns)


def _mirror_symmetric(grid, values):
    return np.array_equal(grid, -grid[::-1]) and np.array_equal(values, values[::-1])


def edge_values(vertex_values, complex_: SimplicialComplex):
    """Mean of the two endpoint values for every edge."""
    vals = np.asarray(vertex_values, dtype=float)
    e = complex_.edges
    return (vals[e[:, 0]] + vals[e[:, 1]]) / 2.0
