"""Smoke test for the qrbnb_py extension module.

Builds the cdylib if it is missing, imports it from a scratch directory, and
exercises the Problem class end to end: constructors, JSON round trips, brute
force reference solves, quantumness gaps, and both solver backends.

Run from anywhere:  python3 python/smoke_test.py
"""

import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
CDYLIB = REPO_ROOT / "target" / "debug" / "libqrbnb_py.so"


def import_extension():
    if not CDYLIB.exists():
        subprocess.run(
            ["cargo", "build", "-p", "qrbnb-py"], cwd=REPO_ROOT, check=True
        )
    scratch = Path(tempfile.mkdtemp(prefix="qrbnb-py-"))
    shutil.copy(CDYLIB, scratch / "qrbnb_py.so")
    sys.path.insert(0, str(scratch))
    import qrbnb_py

    return qrbnb_py


def square_distances():
    coords = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]
    return [
        [math.dist(a, b) for b in coords]
        for a in coords
    ]


def main():
    qrbnb_py = import_extension()
    triangle = qrbnb_py.Problem.maxcut(3, [(0, 1), (0, 2), (1, 2)])
    assert triangle.n_vars == 3
    assert repr(triangle) == "Problem(n_vars=3, terms=6, constraints=0)"

    # Any 2-1 split of a triangle cuts two edges.
    assert triangle.evaluate([0, 1, 1]) == -2.0
    assert triangle.is_feasible([0, 1, 1])
    value, bits = triangle.brute_force()
    assert value == -2.0
    assert sorted(bits) in ([0, 0, 1], [0, 1, 1])

    assert abs(triangle.quantumness_gap("31") - 1.5) < 1e-6
    assert abs(triangle.quantumness_gap("21") - 1.25) < 1e-6

    report = triangle.solve()
    assert report["proven_optimal"] and not report["capped"]
    assert report["incumbent"]["value"] == -2.0
    assert report["n_eval"] >= report["n_eval_quantum"] >= 1
    assert len(report["node_trace"]) == report["n_eval"]

    # Identical configurations must reproduce the report bit for bit.
    again = triangle.solve()
    assert json.dumps(report, sort_keys=True) == json.dumps(again, sort_keys=True)

    vqe = triangle.solve(backend="vqe", layers=2, seed=5)
    assert vqe["n_eval_quantum"] > 0
    assert not vqe["proven_optimal"]
    assert vqe["incumbent"]["value"] == -2.0

    # Unit-square tour: the perimeter is optimal.
    tsp = qrbnb_py.Problem.tsp(square_distances())
    assert tsp.n_vars == 16
    value, bits = tsp.brute_force()
    assert abs(value - 4.0) < 1e-9
    report = tsp.solve(kind="21", branch="onehot", eval_cap=5000)
    assert report["proven_optimal"]
    assert abs(report["incumbent"]["value"] - 4.0) < 1e-9
    assert tsp.is_feasible(report["incumbent"]["assignment"]["values"])

    # JSON round trip preserves behaviour, including constraints.
    clone = qrbnb_py.Problem.from_json(tsp.to_json())
    assert clone.to_json() == tsp.to_json()
    assert clone.evaluate(bits) == tsp.evaluate(bits)

    hand_built = qrbnb_py.Problem(3)
    hand_built.add_quadratic(0, 1, 1.0)
    hand_built.add_quadratic(2, 2, -0.5)
    hand_built.add_onehot([0, 1, 2], "onehot-row")
    assert hand_built.evaluate([0, 0, 1]) == -0.5
    assert hand_built.is_feasible([0, 0, 1])
    assert not hand_built.is_feasible([1, 1, 0])

    for bad_call in (
        lambda: triangle.evaluate([0, 1, 2]),
        lambda: triangle.evaluate([0, 1]),
        lambda: triangle.solve(kind="32"),
        lambda: triangle.solve(search="idfs"),
        lambda: qrbnb_py.Problem.maxcut(2, [(0, 5)]),
    ):
        try:
            bad_call()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
