import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rftopo.errors import OutOfDomainError
from rftopo.flow import FlowState, Schedule, curvature_sphere2d, evolve
from rftopo.mesh import (SimplicialComplex, build_grid, closure, edge_values,
                         sample_vertex_curvature, vertex_index)
from rftopo.profiles import round_sphere_profile, symmetric_dumbbell_profile


@pytest.fixture(scope="module")
def dumbbell_late():
    return evolve(symmetric_dumbbell_profile(201), Schedule(cadence=20000))


def test_three_by_three_counts():
    tri = build_grid(3, 3)
    assert tri.counts() == (9, 16, 8)
    assert tri.euler_characteristic == 1


def test_wrapped_counts():
    # three columns collapse to two, which would glue edges; refused
    with pytest.raises(ValueError, match="n_phi >= 4"):
        build_grid(3, 3, wrap=True)
    tri = build_grid(3, 4, wrap=True)
    assert tri.counts() == (9, 21, 12)
    assert tri.euler_characteristic == 0


def test_vertex_index_formula():
    assert vertex_index(2, 3, 3) == 6
    assert vertex_index(1, 1, 50) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 15), st.integers(2, 15))
def test_grid_counts_and_euler(nt, nph):
    tri = build_grid(nt, nph)
    v, e, f = tri.counts()
    assert v == nt * nph
    assert f == 2 * (nt - 1) * (nph - 1)
    assert e == (nt - 1) * nph + nt * (nph - 1) + (nt - 1) * (nph - 1)
    assert tri.euler_characteristic == 1


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 12), st.integers(4, 12))
def test_wrapped_grid_is_annulus(nt, nph):
    assert build_grid(nt, nph, wrap=True).euler_characteristic == 0


def test_closure_and_canonical_order():
    cx = closure(4, [(2, 1, 0), (3, 2, 1)], [(3, 0)])
    assert cx.triangles.tolist() == [[0, 1, 2], [1, 2, 3]]
    assert cx.edges.tolist() == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]
    assert cx.lines()[:2] == ["0 0", "0 1"]


def test_diagonal_direction():
    tri = build_grid(2, 2)
    # the cell (0,0),(0,1),(1,0),(1,1) is split along 0 -- 3
    assert [0, 3] in tri.edges.tolist()
    assert [1, 2] not in tri.edges.tolist()


def test_round_sphere_every_vertex_two():
    prof = round_sphere_profile(n_points=40)
    c = curvature_sphere2d(FlowState.from_profile(prof))
    tri = build_grid(10, 7)
    vals = sample_vertex_curvature(prof.grid, c.R, tri)
    assert np.all(vals == 2.0)


def test_rows_are_constant():
    prof = symmetric_dumbbell_profile(101)
    tr = evolve(prof, Schedule(cadence=500, max_time=0.01))
    s = tr.snapshots[-1]
    tri = build_grid(17, 9)
    vals = sample_vertex_curvature(s.state.grid, s.curvature.R, tri).reshape(17, 9)
    assert np.all(vals == vals[:, :1])
    assert np.array_equal(vals, vals[::-1])


def test_late_dumbbell_peak_in_middle_row(dumbbell_late):
    tri = build_grid(51, 4)
    for s in dumbbell_late.snapshots:
        vals = sample_vertex_curvature(s.state.grid, s.curvature.R, tri).reshape(51, 4)[:, 0]
        # the two cut-end rows carry the boundary stencil and are skipped
        assert 1 + int(np.argmax(vals[1:-1])) == 25
    assert int(np.argmax(vals)) == 25


def test_out_of_domain():
    x = np.linspace(0, 1, 11)
    tri = build_grid(3, 3)
    with pytest.raises(OutOfDomainError):
        sample_vertex_curvature(x, np.ones(11), tri, coords=[-0.1, 0.5, 1.0])


def test_interpolation_between_nodes():
    x = np.linspace(0, 1, 3)
    tri = build_grid(5, 2)
    vals = sample_vertex_curvature(x, np.array([0.0, 1.0, 4.0]), tri).reshape(5, 2)
    assert vals[:, 0].tolist() == [0.0, 0.5, 1.0, 2.5, 4.0]


def test_edge_mean():
    cx = SimplicialComplex(2, np.array([[0, 1]]), np.empty((0, 3)))
    assert edge_values([2.0, 4.0], cx).tolist() == [3.0]
    tri = build_grid(6, 5)
    assert np.all(edge_values(np.full(tri.n_vertices, 1.5), tri) == 1.5)


def test_edge_values_brute_force():
    rng = np.random.default_rng(4)
    tri = build_grid(7, 6, wrap=True)
    v = rng.normal(size=tri.n_vertices)
    got = edge_values(v, tri)
    for k, (a, b) in enumerate(tri.edges):
        assert got[k] == (v[a] + v[b]) / 2
