"""End-to-end runs: flow -> snapshots -> filtrations -> diagrams -> reports.

Every stage reads the previous stage's files from the run directory, so
stages can be rerun on their own.  All files except ``manifest.json`` are
byte-identical across reruns of the same config.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import io
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .distances import distance_triple, ratio_report
from .filtration import star_filtration
from .flow import Schedule, StopReason, classify_singularity, evolve
from .errors import InsufficientDataError
from .mesh import build_grid, edge_values, row_coordinates, sample_vertex_curvature
from .persistence import PersistenceDiagram, betti_table, reduce
from .profiles import (ProfileParams, degenerate_dumbbell_profile, dimpled_sphere_profile,
                       gmp_profile, symmetric_dumbbell_profile)

MODELS = ("DimpledSphere", "SymmetricDumbbell", "GMP", "DegenerateDumbbell")
DISTANCE_DIMS = (0, 1)


@dataclass
class MeshConfig:
    n_theta: int = 50
    n_phi: int = 50
    wrap: bool = False


@dataclass
class FiltrationConfig:
    d: int = 1
    keep_zero_length: bool = True


@dataclass
class ExperimentConfig:
    model: str = "SymmetricDumbbell"
    seed: int = 1
    n_points: int = 201
    profile: dict = field(default_factory=dict)
    schedule: Schedule = field(default_factory=Schedule)
    mesh: MeshConfig = field(default_factory=MeshConfig)
    filtration: FiltrationConfig = field(default_factory=FiltrationConfig)
    output_dir: str = "runs/out"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n_points < 5:
            raise ValueError("n_points must be at least 5")

    def to_dict(self):
        return {
            "model": self.model,
            "seed": self.seed,
            "grid": {"n_points": self.n_points},
            "profile": dict(self.profile),
            "schedule": dataclasses.asdict(self.schedule),
            "mesh": dataclasses.asdict(self.mesh),
            "filtration": dataclasses.asdict(self.filtration),
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d):
        known = {"model", "seed", "grid", "profile", "schedule", "mesh", "filtration",
                 "output_dir"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(
            model=d.get("model", "SymmetricDumbbell"),
            seed=int(d.get("seed", 1)),
            n_points=int(d.get("grid", {}).get("n_points", 201)),
            profile=dict(d.get("profile", {})),
            schedule=Schedule(**d.get("schedule", {})),
            mesh=MeshConfig(**d.get("mesh", {})),
            filtration=FiltrationConfig(**d.get("filtration", {})),
            output_dir=d.get("output_dir", "runs/out"),
        )


def shipped_configs():
    root = resources.files("rftopo") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path_or_name) -> ExperimentConfig:
    """Read a JSON config from a path, or by name from the shipped set."""
    p = Path(path_or_name)
    if p.exists():
        text = p.read_text()
    else:
        name = str(path_or_name)
        name = name[:-5] if name.endswith(".json") else name
        ref = resources.files("rftopo") / "configs" / f"{name}.json"
        if not ref.is_file():
            raise FileNotFoundError(f"no config file or shipped config named {path_or_name!r}")
        text = ref.read_text()
    return ExperimentConfig.from_dict(json.loads(text))


def build_profile(cfg: ExperimentConfig):
    params = dict(cfg.profile)
    table = params.pop("control_table", None)
    if cfg.model == "GMP":
        kw = {} if table is None else {"control_table": [tuple(r) for r in table]}
        return gmp_profile(n_points=cfg.n_points, **kw)
    if cfg.model == "DimpledSphere":
        return dimpled_sphere_profile(ProfileParams(seed=cfg.seed, **params), cfg.n_points)
    if cfg.model == "SymmetricDumbbell":
        base = dict(alpha=1.0, L=1.0, k=1.0 / 25.0, mu=100.0, epsilon=1e-3)
        return symmetric_dumbbell_profile(cfg.n_points, ProfileParams(**{**base, **params}))
    base = dict(alpha=0.0, L=1.0, k=1.0 / 25.0, mu=100.0, epsilon=1e-3)
    return degenerate_dumbbell_profile(cfg.n_points, ProfileParams(**{**base, **params}))


# --- file helpers ------------------------------------------------------------

def _f(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


class Manifest:
    """Run metadata; the only file allowed to carry timestamps."""

    def __init__(self, out: Path, cfg: ExperimentConfig):
        self.path = out / "manifest.json"
        if self.path.exists():
            self.data = json.loads(self.path.read_text())
        else:
            self.data = {"created_utc": _now(), "stages": {}}
        self.data["config"] = cfg.to_dict()
        self.data["seed"] = cfg.seed
        self.data["backend"] = kernels.BACKEND

    def stage(self, name, status, **info):
        self.data["stages"][name] = {"status": status, "finished_utc": _now(), **info}
        self.data["partial"] = any(s["status"] != "ok" for s in self.data["stages"].values())
        _atomic_write(self.path, _json_text(self.data))


# --- stages ------------------------------------------------------------------

def simulate(cfg: ExperimentConfig, out: Path):
    profile = build_profile(cfg)
    traj = evolve(profile, cfg.schedule)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    for old in snap_dir.glob("snapshot_*.csv"):
        old.unlink()
    entries = []
    for s in traj.snapshots:
        name = f"snapshot_{s.index:04d}.csv"
        st, cv = s.state, s.curvature
        phi = st.phi if st.phi is not None else [None] * len(st.grid)
        rows = [[_f(x), _f(p), "" if f is None else _f(f), _f(k), _f(lc), _f(r)]
                for x, p, f, k, lc, r in zip(st.grid, st.psi, phi, cv.K, cv.Lcurv, cv.R)]
        _atomic_write(snap_dir / name, _csv_text(["x", "psi", "phi", "K", "L", "R"], rows))
        entries.append({"index": s.index, "step": s.step, "t": st.t, "file": f"snapshots/{name}"})
    info = traj.to_dict()
    info["snapshots"] = entries
    try:
        info["singularity_type"] = classify_singularity(traj.diagnostics).value
    except InsufficientDataError:
        info["singularity_type"] = None
    _atomic_write(out / "trajectory.json", _json_text(info))
    return traj


def _load_snapshots(out: Path):
    info = json.loads((out / "trajectory.json").read_text())
    snaps = []
    for e in info["snapshots"]:
        rows = _read_csv(out / e["file"])
        grid = np.array([float(r["x"]) for r in rows])
        R = np.array([float(r["R"]) for r in rows])
        snaps.append((e["index"], float(e["t"]), grid, R))
    return snaps


def _topology_one(args):
    index, t, grid, R, mesh_cfg, filt_cfg, fpath = args
    tri = build_grid(mesh_cfg.n_theta, mesh_cfg.n_phi, mesh_cfg.wrap)
    coords = row_coordinates(grid, tri.n_theta)
    verts = sample_vertex_curvature(grid, R, tri, coords)
    if filt_cfg.d == 0:
        vals = verts
    elif filt_cfg.d == 1:
        vals = edge_values(verts, tri)
    else:
        raise ValueError("pipeline filtrations use d = 0 or d = 1")
    filt = star_filtration(tri, vals, filt_cfg.d)
    _atomic_write(Path(fpath), "\n".join(filt.lines()) + "\n")
    dgs = reduce(filt, keep_zero_length=filt_cfg.keep_zero_length)
    table = betti_table(dgs, filt.distinct_values)
    return index, t, dgs, table


def topology(cfg: ExperimentConfig, out: Path, jobs=1):
    snaps = _load_snapshots(out)
    fdir = out / "filtrations"
    fdir.mkdir(parents=True, exist_ok=True)
    for old in fdir.glob("filtration_*.txt"):
        old.unlink()
    tasks = [(i, t, g, R, cfg.mesh, cfg.filtration, str(fdir / f"filtration_{i:04d}.txt"))
             for i, t, g, R in snaps]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_topology_one, tasks))
    else:
        results = [_topology_one(a) for a in tasks]
    drows, brows = [], []
    for index, t, dgs, table in results:
        for dg in dgs:
            for b, d in dg.points:
                drows.append([index, _f(t), dg.dimension, _f(b), _f(d)])
        for p, b0, b1, b2 in table.rows():
            brows.append([index, _f(p), b0, b1, b2])
    _atomic_write(out / "diagrams.csv",
                  _csv_text(["snapshot_index", "t", "dim", "birth", "death"], drows))
    _atomic_write(out / "betti.csv",
                  _csv_text(["snapshot_index", "threshold", "beta0", "beta1", "beta2"], brows))
    return results


def read_diagrams(path):
    """{snapshot_index: (t, {dim: PersistenceDiagram})} from a diagram CSV."""
    snaps = {}
    traj = Path(path).parent / "trajectory.json"
    if traj.exists():
        for e in json.loads(traj.read_text())["snapshots"]:
            snaps[int(e["index"])] = (float(e["t"]), {})
    pts = {}
    for r in _read_csv(path):
        i, d = int(r["snapshot_index"]), int(r["dim"])
        snaps.setdefault(i, (float(r["t"]), {}))
        pts.setdefault((i, d), []).append((float(r["birth"]), float(r["death"])))
    for i, (t, dgs) in snaps.items():
        for d in range(3):
            dgs[d] = PersistenceDiagram(d, pts.get((i, d), []))
    return dict(sorted(snaps.items()))


def distances(cfg: ExperimentConfig, out: Path, threshold=1.05):
    snaps = read_diagrams(out / "diagrams.csv")
    keys = list(snaps)
    triples = []
    for k in range(len(keys) - 1):
        a, b = snaps[keys[k]][1], snaps[keys[k + 1]][1]
        for d in DISTANCE_DIMS:
            triples.append((k + 1, d, *distance_triple(a[d], b[d])))
    reports = ratio_report(triples, threshold)
    rows = [[r.pair_index, r.dim, _f(r.d_bottleneck), _f(r.d_wasserstein1),
             _f(r.d_wasserstein2),
             "" if r.ratio_w1_b is None else _f(r.ratio_w1_b),
             "" if r.ratio_w1_w2 is None else _f(r.ratio_w1_w2), r.tag] for r in reports]
    header = ["pair_index", "dim", "d_bottleneck", "d_wasserstein1", "d_wasserstein2",
              "ratio_w1_b", "ratio_w1_w2", "tag"]
    _atomic_write(out / "distances.csv", _csv_text(header, rows))
    return reports


def report(cfg: ExperimentConfig, out: Path):
    """Plot-ready lifespan table plus a per-snapshot summary."""
    snaps = read_diagrams(out / "diagrams.csv")
    rows, summary = [], []
    for i, (t, dgs) in snaps.items():
        mass = 0.0
        counts = {}
        for d, dg in dgs.items():
            fin = dg.finite
            for b, dth in fin:
                rows.append([i, _f(t), d, _f(b), _f(dth), _f(dth - b)])
            for b, _ in dg.essential:
                rows.append([i, _f(t), d, _f(b), "inf", "inf"])
            if d <= 1:
                mass += float(np.sum(fin[:, 1] - fin[:, 0]))
            counts[d] = (len(fin), len(dg.essential))
        summary.append([i, _f(t), counts[0][0], counts[0][1], counts[1][0], counts[1][1],
                        _f(mass)])
    _atomic_write(out / "lifespans.csv",
                  _csv_text(["snapshot_index", "t", "dim", "birth", "death", "lifespan"], rows))
    _atomic_write(out / "summary.csv", _csv_text(
        ["snapshot_index", "t", "finite0", "essential0", "finite1", "essential1",
         "finite_mass"], summary))
    return summary


STAGES = ("simulate", "topology", "distances", "report")


def run_stages(cfg: ExperimentConfig, out, stages=STAGES, jobs=1):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out, cfg)
    for name in stages:
        try:
            if name == "simulate":
                traj = simulate(cfg, out)
                manifest.stage(name, "ok", n_snapshots=len(traj.snapshots),
                               stop_reason=traj.diagnostics.stop_reason.value)
            elif name == "topology":
                res = topology(cfg, out, jobs)
                manifest.stage(name, "ok", n_diagram_sets=len(res))
            elif name == "distances":
                rep = distances(cfg, out)
                manifest.stage(name, "ok", n_rows=len(rep))
            elif name == "report":
                report(cfg, out)
                manifest.stage(name, "ok")
            else:
                raise ValueError(f"unknown stage {name!r}")
        except Exception as exc:
            manifest.stage(name, "failed", error=f"{type(exc).__name__}: {exc}")
            raise
    return out


def run(cfg: ExperimentConfig, out=None, jobs=1):
    return run_stages(cfg, out or cfg.output_dir, STAGES, jobs)


def compare(dir_a, dir_b):
    """Per-snapshot distances between two runs over their common prefix."""
    loaded = []
    for d in (dir_a, dir_b):
        try:
            loaded.append(read_diagrams(Path(d) / "diagrams.csv"))
        except (OSError, KeyError, ValueError) as exc:
            warnings.warn(f"alignment: cannot read diagrams in {d} ({exc}); "
                          "comparing an empty prefix", stacklevel=2)
            loaded.append({})
    a, b = loaded
    ka, kb = list(a), list(b)
    if len(ka) != len(kb):
        warnings.warn(f"alignment: snapshot counts differ ({len(ka)} vs {len(kb)}); "
                      "comparing the common prefix", stacklevel=2)
    rows = []
    for k in range(min(len(ka), len(kb))):
        for d in DISTANCE_DIMS:
            db, w1, w2 = distance_triple(a[ka[k]][1][d], b[kb[k]][1][d])
            rows.append({"snapshot_index": k, "dim": d, "t_a": a[ka[k]][0],
                         "t_b": b[kb[k]][0], "d_bottleneck": db, "d_wasserstein1": w1,
                         "d_wasserstein2": w2})
    return rows


def compare_csv(rows):
    header = ["snapshot_index", "dim", "t_a", "t_b", "d_bottleneck", "d_wasserstein1",
              "d_wasserstein2"]
    return _csv_text(header, [[r["snapshot_index"], r["dim"], _f(r["t_a"]), _f(r["t_b"]),
                               _f(r["d_bottleneck"]), _f(r["d_wasserstein1"]),
                               _f(r["d_wasserstein2"])] for r in rows])


__all__ = ["ExperimentConfig", "MeshConfig", "FiltrationConfig", "StopReason", "load_config",
           "run", "run_stages", "simulate", "topology", "distances", "report", "compare",
           "shipped_configs", "read_diagrams"]
