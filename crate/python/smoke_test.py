"""Smoke test for the meanfield_opt extension.

Build and install first, e.g. `maturin build --release -m crates/python/Cargo.toml`
followed by `pip install target/wheels/meanfield_opt-*.whl`.
"""

import math
import sys

import meanfield_opt as m


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    close(m.ground_state_energy("matching"), math.pi**2 / 12, 1e-6)
    close(m.ground_state_energy("tsp"), 2.0415, 5e-4)
    close(m.fixed_point_g0("tsp", 2.0), 1.146, 1e-3)
    assert m.verify_consistency("tsp") <= 1e-5

    curve = m.solve_order_parameter("matching", 1.0, 10.0, 200)
    for p in curve["points"]:
        close(p["g"], math.log1p(math.exp(p["x"])), 1e-6)

    q = m.q_from_lambda(3.0)
    close(q, math.exp(-(1 + q) * 1.5), 1e-12)
    close(m.limit_f(3.0, 0.0), 0.5 * (1 + q), 1e-14)
    close(m.h_matching(0.0, 0.3), 0.5 + 0.3 - 0.045, 1e-9)
    close(m.total_diluted_cost(3.0), m.matching_edge_cost(q) + 1.5 * q, 1e-12)

    c = m.tsp_constant_from_lambda(4.0)
    assert 2.0 < c["c"] < 4.0

    run = m.run_iteration("min", 3.0, 500, 1000)
    assert run["converged"]
    close(run["cost"], m.matching_edge_cost(q), 1e-4)

    pop = m.run_population("min", 3.0, 10, 20000, 1)
    assert len(pop["samples"]) == 20000
    assert abs(pop["atom_fraction"] - q) < 0.02

    w = m.sample_instance(6, 3)
    assert len(w) == 6 and w[0][0] == 0.0 and w[1][2] == w[2][1]
    tour = m.held_karp_tsp(w)
    assert len(tour["edges"]) == 6
    matching = m.min_diluted_matching(w, 2.0)
    assert matching["cost"] <= 6 * 0.5 * 2.0 + 1e-12

    s = m.ensemble_stats(10, 3.0, 20, 7)
    assert len(s["records"]) == 20

    try:
        m.q_from_lambda(-1.0)
    except m.DomainError:
        pass
    else:
        raise AssertionError("expected DomainError")
    try:
        m.min_diluted_matching(m.sample_instance(30, 0), 1.0)
    except m.CapacityError:
        pass
    else:
        raise AssertionError("expected CapacityError")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
