import numpy as np
import pytest

from conftest import filtration_values, random_complex
from rftopo.errors import FiltrationValidationError, IllPosedFiltrationError
from rftopo.filtration import Filtration, simplex_values, star_filtration, validate
from rftopo.mesh import SimplicialComplex, build_grid, closure, edge_values


def path_abc():
    return closure(3, [], [(0, 1), (1, 2)])


def test_path_example():
    f = star_filtration(path_abc(), [1.0, 2.0])
    vals = filtration_values(f)
    assert vals[(0,)] == 1 and vals[(1,)] == 1 and vals[(2,)] == 2
    k1 = {s for s, v in vals.items() if v <= 1}
    assert k1 == {(0,), (1,), (0, 1)}
    assert set(vals) - k1 == {(2,), (1, 2)}


def test_filled_triangle_takes_max():
    f = star_filtration(closure(3, [(0, 1, 2)]), [1.0, 3.0, 2.0])
    assert filtration_values(f)[(0, 1, 2)] == 3.0


def test_constant_values_single_step():
    tri = build_grid(5, 5)
    f = star_filtration(tri, np.full(len(tri.edges), 0.25))
    assert np.all(f.values == 0.25)
    assert len(f.distinct_values) == 1
    # ties fall back to dimension then id
    assert np.all(np.diff(f.dims) >= 0)


def test_tie_order_is_dimension_then_id():
    f = star_filtration(path_abc(), [1.0, 1.0])
    assert f.dims.tolist() == [0, 0, 0, 1, 1]
    assert f.ids.tolist() == [0, 1, 2, 0, 1]


def test_vertex_and_triangle_modes():
    cx = closure(3, [(0, 1, 2)])
    v = simplex_values(cx, [0.0, 1.0, 5.0], d=0)
    assert v[1].tolist() == [1.0, 5.0, 5.0] and v[2].tolist() == [5.0]
    t = simplex_values(cx, [2.0], d=2)
    assert v[0].tolist() == [0.0, 1.0, 5.0]
    assert t[0].tolist() == [2.0, 2.0, 2.0] and t[1].tolist() == [2.0, 2.0, 2.0]


def test_isolated_vertex_is_ill_posed():
    cx = SimplicialComplex(3, np.array([[0, 1]]), np.empty((0, 3)))
    with pytest.raises(IllPosedFiltrationError):
        star_filtration(cx, [1.0])


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        star_filtration(path_abc(), [1.0])


def test_validate_passes_on_meshes():
    rng = np.random.default_rng(0)
    for nt, nph, wrap in ((4, 4, False), (6, 5, True), (9, 3, False)):
        tri = build_grid(nt, nph, wrap)
        f = star_filtration(tri, rng.random(len(tri.edges)))
        rep = validate(f)
        assert rep["counts"] == {0: tri.n_vertices, 1: len(tri.edges), 2: len(tri.triangles)}


def test_validate_reports_corrupted_pair():
    f = star_filtration(closure(3, [(0, 1, 2)]), [1.0, 2.0, 3.0])
    last = len(f) - 1  # the triangle
    order = np.arange(len(f))
    order[[last - 1, last]] = order[[last, last - 1]]
    bad = Filtration(f.dims[order], f.ids[order], f.verts[order], f.values[order].copy())
    with pytest.raises(FiltrationValidationError, match=r"face .* comes after coface \(0, 1, 2\)"):
        validate(bad)


def test_distinct_values_bounded_by_edges():
    tri = build_grid(50, 50)
    vals = np.random.default_rng(2).random(tri.n_vertices)
    f = star_filtration(tri, edge_values(vals, tri))
    assert validate(f)["n_distinct_values"] <= len(tri.edges)


def test_sublevel_sets_are_nested_complexes():
    rng = np.random.default_rng(5)
    for _ in range(30):
        cx = random_complex(rng)
        f = star_filtration(cx, rng.integers(0, 4, len(cx.edges)).astype(float))
        vals = filtration_values(f)
        for p in f.distinct_values:
            kp = {s for s, v in vals.items() if v <= p}
            for s in kp:
                for i in range(len(s)):
                    if len(s) > 1:
                        assert s[:i] + s[i + 1:] in kp


def test_monotone_and_lipschitz():
    rng = np.random.default_rng(8)
    tri = build_grid(8, 7)
    e = rng.random(len(tri.edges))
    base = simplex_values(tri, e)
    raised = e.copy()
    raised[rng.integers(len(e))] += 0.3
    for a, b in zip(base, simplex_values(tri, raised)):
        assert np.all(b >= a)
    delta = 0.01
    moved = simplex_values(tri, e + rng.uniform(-delta, delta, len(e)))
    for a, b in zip(base, moved):
        assert np.max(np.abs(a - b)) <= delta


def test_native_round_trip(tmp_path):
    tri = build_grid(6, 6)
    f = star_filtration(tri, np.random.default_rng(3).normal(size=len(tri.edges)) / 3)
    f.write(tmp_path / "f.txt")
    text = (tmp_path / "f.txt").read_text().splitlines()
    assert text[0] == "dim value v0 [v1 [v2]]"
    g = Filtration.read(tmp_path / "f.txt")
    assert np.array_equal(g.values, f.values)
    assert np.array_equal(g.dims, f.dims) and np.array_equal(g.verts, f.verts)


def test_perseus_export(tmp_path):
    f = star_filtration(closure(3, [(0, 1, 2)]), [0.5, 0.75, 1.0])
    f.write_perseus(tmp_path / "p.txt")
    lines = (tmp_path / "p.txt").read_text().splitlines()
    assert lines[0] == "1"
    births = [int(ln.split()[-1]) for ln in lines[1:]]
    assert min(births) == 1
    assert births[-1] == 500001
    assert lines[1].split()[:2] == ["0", "1"]  # 1-based ids
