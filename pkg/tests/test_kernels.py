"""Compiled and pure-Python kernels must agree bit for bit."""
import numpy as np
import pytest

from rftopo import _fallback, kernels

core = pytest.importorskip("rftopo._core")


def _dumbbell_state(n=61, seed=0):
    rng = np.random.default_rng(seed)
    x = np.linspace(-3, 3, n)
    psi = 2.0 + np.cos(x) + 0.01 * rng.random(n)
    phi = 1.0 + 0.05 * rng.random(n)
    return psi, phi, x[1] - x[0]


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")
    assert kernels.get_backend("python") is _fallback
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("dirichlet", [True, False])
def test_dumbbell_rhs_identical(dirichlet):
    psi, phi, h = _dumbbell_state()
    a = core.dumbbell_rhs(psi, phi, h, dirichlet)
    b = _fallback.dumbbell_rhs(psi, phi, h, dirichlet)
    for u, v in zip(a, b):
        assert np.array_equal(u, v)


def test_rk4_dumbbell_identical():
    psi, phi, h = _dumbbell_state(seed=3)
    k1 = _fallback.dumbbell_rhs(psi, phi, h, True)
    a = core.rk4_dumbbell(psi, phi, h, 1e-4, True, k1[0], k1[1])
    b = _fallback.rk4_dumbbell(psi, phi, h, 1e-4, True, k1[0], k1[1])
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_sphere_kernels_identical():
    theta = np.linspace(1e-3, np.pi - 1e-3, 40)
    w = (1 + 0.2 * np.sin(3 * theta)) ** 2
    cot = np.cos(theta) / np.sin(theta)
    h = theta[1] - theta[0]
    a = core.sphere_rhs(w, cot, h)
    b = _fallback.sphere_rhs(w, cot, h)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert np.array_equal(core.rk4_sphere(w, cot, h, 1e-5, a[0]),
                          _fallback.rk4_sphere(w, cot, h, 1e-5, a[0]))


def test_reduction_identical_on_mesh():
    from rftopo.filtration import star_filtration
    from rftopo.mesh import build_grid, edge_values

    tri = build_grid(12, 9)
    vals = np.random.default_rng(1).integers(0, 6, tri.n_vertices).astype(float)
    f = star_filtration(tri, edge_values(vals, tri))
    indptr, indices = f.boundary()
    dims = f.dims.astype(np.int64)
    for clearing in (True, False):
        assert np.array_equal(core.reduce_boundary(indptr, indices, dims, clearing),
                              _fallback.reduce_boundary(indptr, indices, dims, clearing))
