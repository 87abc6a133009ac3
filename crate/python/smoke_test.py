"""Smoke test for the pyweaktomo extension.

Build and install first, e.g. `maturin build --release` in crates/py and
`pip install` the wheel, then run `python3 python/smoke_test.py`.
"""

import json
import math
import random

import pyweaktomo as wt


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL {what}")
    print(f"ok   {what}")


def main():
    names = wt.protocol_names()
    check("das-arvind" in names and "mub" in names, "protocol names")

    mub = wt.Protocol("mub")
    c = mub.crb()
    check(abs(c.c_value - 13 / 12) < 0.01 * 13 / 12, f"MUB C = {c.c_value:.5f}")

    da = wt.Protocol("das-arvind", 0.575)
    povm = da.povm()
    report = povm.validate(completeness=1e-6)
    check(report.passes, f"Das-Arvind POVM valid, deficit {report.completeness_deficit:.1e}")
    check(povm.odop(completeness=1e-6)[0], "Das-Arvind is a random ODOP")
    probs = povm.probabilities([0.0, 0.0, 1.0])
    check(abs(sum(probs) - 1) < 1e-6, "probabilities sum to one")

    tet = wt.Protocol("tetrahedron").povm()
    check(tet.odop() == (False, 4), "tetrahedron has 4 unmatched elements")
    back = wt.Povm.from_json(tet.to_json())
    check(len(back) == 4 and back.dim == 2, "POVM JSON round trip")
    check(all(isinstance(json.loads(l), dict) for l in back.labels()), "labels are JSON")

    try:
        wt.Protocol("dst-original")
        check(False, "missing strength rejected")
    except ValueError:
        check(True, "missing strength rejected")

    rows = wt.crb_scan("dst-original", [0.5, 0.9, 1.3])
    best = min(rows, key=lambda r: r[1])
    check(best[0] == 0.9, f"DST scan minimum at {best[0]}")

    rng = random.Random(3)
    amps = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)]
    stats = wt.conditional_stats(amps, 0.5)
    check(stats.dim == 3 and len(stats.exp_y) == 3, "conditional stats shape")
    estimate = wt.reconstruct_exact_augmented(stats)
    f = wt.state_fidelity(amps, estimate)
    check(1 - f < 1e-10, f"exact reconstruction infidelity {1 - f:.1e}")
    weak = wt.reconstruct_weak(wt.conditional_stats(amps, 1e-4), all_outcomes=True)
    check(1 - wt.state_fidelity(amps, weak) < 1e-6, "weak-limit reconstruction")

    points, metric = wt.basis_distribution(0.575, nodes=201)
    total = sum(w for _, w in points)
    check(abs(total - 1) < 1e-6 and all(n[1] >= 0 for n, _ in points), "basis distribution")
    _, weak_metric = wt.basis_distribution(0.1, nodes=201)
    check(weak_metric > metric, f"uniformity {weak_metric:.3f} (0.1) > {metric:.3f} (0.575)")

    curve = wt.Protocol("dst-original", 0.89).simulate(100, seed=1, trials=20, particles=500)
    again = wt.Protocol("dst-original", 0.89).simulate(100, seed=1, trials=20, particles=500)
    check(curve == again and curve[-1][0] == 100, "simulation is reproducible")
    check(all(math.isfinite(r[1]) for r in curve), "finite infidelities")
    print("all checks passed")


if __name__ == "__main__":
    main()
