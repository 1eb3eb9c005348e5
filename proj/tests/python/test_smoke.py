"""Smoke tests for the compiled python module.

These only exercise the binding surface; the numerical heavy-lifting is
covered by the C++ test binaries.
"""

import math

import varalpha as va


def test_version_string():
    assert isinstance(va.__version__, str) and va.__version__


def test_stable_sampler_transform():
    draws = va.sample_positive_stable(0.5, 20000, seed=1)
    assert len(draws) == 20000
    assert all(s > 0 for s in draws[:100])
    mean = sum(math.exp(-s) for s in draws) / len(draws)
    # E exp(-S) = exp(-1); generous 5-sigma band for a smoke test
    assert abs(mean - math.exp(-1.0)) < 0.02


def test_field_evaluation_and_classification():
    f = va.AlphaField.two_level(0.3, 0.7, 0.0, 1.0)
    assert f(0.5) == 0.3
    assert f(2.0) == 0.7
    assert f.alpha_star == 0.3
    pred = f.classify()
    assert pred.kind == "LocalizeProbability"
    assert math.isclose(pred.condition_lhs, 0.6)
    assert math.isclose(pred.condition_rhs, 0.7)
    lvl = f.level_set(0.05)
    assert lvl == [(0.0, 1.0)]

    lat = va.AlphaField.lattice(0.3, 0.7, 0.5, 1e4)
    assert lat(1.5) == 0.3
    assert lat(3.0) == 0.7
    assert lat.classify().kind == "LocalizeOccupation"


def test_path_simulation_and_inversion():
    f = va.AlphaField.two_level(0.3, 0.7, 0.0, 1.0)
    cfg = va.SimConfig(dt=0.02, x0=0.5, target_time=50.0)
    cell = va.IntervalUnion([(0.0, 1.0)])
    p = va.simulate_coupled(f, cfg, seed=4, split=cell)
    assert p.status == "complete"
    assert len(p) >= 2
    assert p.b[0] == 0.5 and p.sigma[0] == 0.0
    sig = p.sigma
    assert all(sig[i] < sig[i + 1] for i in range(len(sig) - 1))
    assert math.isclose(p.sigma1 + p.sigma2, sig[-1], rel_tol=1e-9)

    sample = va.invert_time_change(p, [0.0, 1.0, 10.0, 49.0])
    assert sample.x[0] == 0.5  # starts at x0
    for t, g, h in zip(sample.t, sample.g, sample.h):
        assert g <= t < h

    occ = va.occupation_fraction(p, cell, 49.0)
    assert 0.0 <= occ <= 1.0
    # grid quadrature agrees loosely with the exact path fraction
    dense = va.invert_time_change(p, [0.05 * k for k in range(981)])
    occ_q = va.occupation_fraction(dense, cell, 49.0)
    assert abs(occ_q - occ) < 0.05


def test_ensemble_summary():
    f = va.AlphaField.two_level(0.3, 0.7, 0.0, 1.0)
    cfg = va.SimConfig(dt=0.05, x0=0.5, target_time=100.0)
    cell = va.IntervalUnion([(0.0, 1.0)])
    s = va.run_ensemble(f, cfg, cell, [1.0, 10.0, 100.0], n_paths=20, seed=2)
    assert s.n_complete == 20
    assert len(s.occ_mean) == 3
    assert all(0.0 <= v <= 1.0 for v in s.occ_mean)
    assert all(0.0 <= v <= 1.0 for v in s.hit_prob)
    assert all(w > 0 for w in s.occ_ci95)


def test_solver_and_relaxation_function():
    assert math.isclose(va.mittag_leffler(0.5, -1.0), 0.427583576155807004,
                        rel_tol=1e-10)
    assert va.mittag_leffler(0.7, 0.0) == 1.0

    f = va.AlphaField.constant(0.5)
    ones = [1.0] * 64
    sol = va.solve_fde(f, -4.0, 4.0, 64, "periodic", ones, 0.5, 0.01)
    final = sol.level(sol.n_steps)
    assert max(abs(v - 1.0) for v in final) < 1e-12
    assert sol.residual() < 1e-11
    assert len(sol.x) == 64
    assert sol.orders == [0.5] * 64


def test_ks_two_sample():
    d, p = va.ks_two_sample([1.0, 2.0, 3.0, 4.0], [1.5, 2.5, 3.5, 4.5])
    assert math.isclose(d, 0.25)
    assert 0.0 <= p <= 1.0


def test_run_experiment_validate():
    code, log = va.run_experiment("validate", "experiment = validate\nseed = 3\n")
    assert code == 0
    assert log
