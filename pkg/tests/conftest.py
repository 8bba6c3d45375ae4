import itertools
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from rftopo.mesh import closure  # noqa: E402


def random_complex(rng, max_vertices=8):
    """Random closed 2-complex where every vertex has at least one edge."""
    n = int(rng.integers(2, max_vertices + 1))
    triples = list(itertools.combinations(range(n), 3))
    pairs = list(itertools.combinations(range(n), 2))
    tris = [t for t in triples if rng.random() < 0.25]
    edges = [e for e in pairs if rng.random() < 0.3]
    for v in range(n):
        if not any(v in e for e in edges) and not any(v in t for t in tris):
            w = int(rng.integers(0, n - 1))
            edges.append(tuple(sorted((v, w if w < v else w + 1))))
    return closure(n, tris, edges)


def filtration_values(f):
    return {f.simplex(k): float(f.values[k]) for k in range(len(f))}


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[n])
