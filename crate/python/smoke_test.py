#!/usr/bin/env python3
"""Smoke test for the bandit_lab_py extension module.

Builds nothing itself: run `cargo build -p bandit-lab-py --release` first
(or pass the path to an existing cdylib as argv[1]).
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    if len(sys.argv) > 1:
        return Path(sys.argv[1])
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libbandit_lab_py.so", "bandit_lab_py.dll", "libbandit_lab_py.dylib")
    ]
    for path in candidates:
        if path.exists():
            return path
    sys.exit(
        "no built extension found; run `cargo build -p bandit-lab-py --release` first"
    )


def import_module(cdylib: Path):
    stage = Path(tempfile.mkdtemp(prefix="bandit-lab-py-"))
    suffix = ".pyd" if cdylib.suffix == ".dll" else ".so"
    shutil.copy2(cdylib, stage / f"bandit_lab_py{suffix}")
    sys.path.insert(0, str(stage))
    import bandit_lab_py

    return bandit_lab_py


def main() -> None:
    lab = import_module(locate_cdylib())

    s1 = lab.Scenario.builtin("S1")
    assert s1.num_arms == 5
    assert s1.optimal_arm == 1
    assert math.isclose(s1.best_mean, 0.82, rel_tol=1e-12)
    assert math.isclose(s1.stationary(0)[1], 0.25, rel_tol=1e-9)

    s2 = lab.Scenario.builtin("S2")
    report = lab.bounds(s2, convention="raw")
    assert math.isclose(report["l_threshold"], 1037.04, rel_tol=1e-3), report
    assert report["meets_threshold"]
    assert report["theorem2_bound"] > report["theorem1_bound"] > 0

    custom = lab.Scenario(
        "pair",
        transitions=[
            [[0.9, 0.1], [0.2, 0.8]],
            [[0.5, 0.5], [0.5, 0.5]],
        ],
        rewards=[[0.1, 1.0], [0.1, 1.0]],
    )
    assert custom.optimal_arm == 1  # mean 0.55 beats 1/3 * 0.9 + ...
    assert math.isclose(custom.mean_rewards[1], 0.55, rel_tol=1e-12)

    out = lab.simulate(s1, "rca", exploration=10.0, horizon=20_000, runs=20, seed=7)
    assert out["slots"][-1] == 20_000
    assert len(out["mean_regret"]) == len(out["slots"])
    random = lab.simulate(s1, "random", horizon=20_000, runs=20, seed=7)
    assert out["mean_regret"][-1] < random["mean_regret"][-1]

    # Determinism across calls.
    again = lab.simulate(s1, "rca", exploration=10.0, horizon=20_000, runs=20, seed=7)
    assert again["mean_regret"] == out["mean_regret"]

    assert math.isclose(
        lab.rca_index(3.25, 10, 100, 1.0),
        0.325 + math.sqrt(math.log(100) / 10),
        rel_tol=1e-12,
    )
    assert math.isclose(lab.exp3_horizon_tuned_gain(5, 100_000), 0.0068434, abs_tol=1e-6)

    for bad in (
        lambda: lab.Scenario.builtin("S9"),
        lambda: lab.simulate(s1, "rca"),  # missing exploration
        lambda: lab.simulate(s1, "oracle", gain=0.1),
    ):
        try:
            bad()
        except ValueError:
            pass
        else:
            sys.exit("expected ValueError was not raised")

    print("smoke test passed")


if __name__ == "__main__":
    main()
