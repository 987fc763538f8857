import json
import math

import numpy as np
import pytest

import noether


def test_exponent_cases():
    for k, a, expected in [
        (0.0, 1.0, (1, 1, 1)),
        (-2.0, 1.0, (1, 2, 0)),
        (-1.0, 2.0, (2, 3, 1)),
        (1.0, 2.0, (2, 1, 3)),
        (2.0, 1.0, (1, 0, 2)),
    ]:
        law = noether.solve_exponents(k, a)
        assert (law.a, law.b, law.c) == expected


def test_zero_a_raises():
    with pytest.raises(noether.UsageError):
        noether.solve_exponents(-1.0, 0.0)


def test_kepler_charge_is_conserved():
    sys = noether.DynamicalSystem(2, noether.Potential.kepler(1.0))
    traj = noether.integrate(sys, [1.0, 0.0], [0.0, 1.2], 15.0, tol=1e-10)
    assert traj.q.shape == (1001, 2)
    assert traj.t[-1] == 15.0
    charge = noether.noether_charge(noether.solve_exponents(-1.0, 2.0), traj)
    assert charge.drift_rel <= 1e-7
    wrong = noether.noether_charge(noether.ScalingLaw(1.0, 1.0, 1.0), traj)
    assert wrong.drift_rel >= 1e-2


def test_oscillator_virial_and_period():
    sys = noether.DynamicalSystem(1, noether.Potential.harmonic(2.0))
    traj = noether.integrate(sys, [1.0], [0.0], 4.0, tol=1e-12, grid_intervals=2000)
    assert noether.detect_period(traj) == pytest.approx(math.pi, abs=1e-8)
    report = noether.virial_check(traj)
    assert report is not None and report.passed
    assert report.ratio == pytest.approx(1.0, abs=1e-6)


def test_free_fall_has_no_virial():
    sys = noether.DynamicalSystem(1, noether.Potential.linear_force(1.0))
    assert noether.virial_check(noether.integrate(sys, [0.0], [1.0], 2.0)) is None


def test_custom_potential_from_python():
    pot = noether.Potential.custom(2.0, lambda q: 0.5 * float(q @ q))
    sys = noether.DynamicalSystem(1, pot)
    traj = noether.integrate(sys, [1.0], [0.0], math.pi)
    q, _, action = traj.sample(math.pi)
    assert q[0] == pytest.approx(-1.0, abs=1e-6)
    assert action == pytest.approx(0.0, abs=1e-6)


def test_singular_state_raises():
    sys = noether.DynamicalSystem(2, noether.Potential.kepler(1.0))
    with pytest.raises(noether.DomainError):
        sys.lagrangian(np.zeros(2), np.ones(2))


def test_generator_residual():
    kepler = noether.DynamicalSystem(2, noether.Potential.kepler(1.0))
    law = noether.solve_exponents(-1.0, 2.0)
    assert noether.generator_residual(kepler, law, [0.3, 1.1], [0.4, -0.2], 1.5) <= 1e-8
    osc = noether.DynamicalSystem(1, noether.Potential.harmonic(1.0))
    assert noether.generator_residual(osc, noether.ScalingLaw(1, 1, 1), [1.0], [0.0]) > 0.1


def test_bargmann_catalog():
    kepler = noether.BargmannMetric.from_system(noether.DynamicalSystem(2, noether.Potential.kepler(1.0)))
    two_chi, defect = noether.lie_derivative(kepler, noether.ConformalVector.kepler(2), [0.1, 0.7, -0.4, 0.3])
    assert two_chi == pytest.approx(4.0, abs=1e-10)
    assert defect <= 1e-9
    assert noether.chrono_projective_check(noether.ConformalVector.kepler(2)) == -1.0
    assert noether.chrono_projective_check(noether.ConformalVector.homothety(2)) == -2.0


def test_brdicka_geodesic():
    metric = noether.BargmannMetric.from_profile(noether.PPWaveProfile.brdicka(1.0))
    t, q, s = noether.upstairs_geodesic(metric, 0.0, [1.0, 1.0], 0.0, [1.0, 0.0, 0.0, 0.0], 3.0, tol=1e-13,
                                        grid_intervals=300)
    assert np.max(np.abs(q[:, 0] - np.cos(t))) <= 1e-8
    assert np.max(np.abs(q[:, 1] - np.cosh(t))) <= 1e-8
    assert np.max(np.abs(s - 0.25 * (np.sin(2 * t) - np.sinh(2 * t)))) <= 1e-7


def test_lift_is_null():
    sys = noether.DynamicalSystem(2, noether.Potential.harmonic(1.0))
    traj = noether.integrate(sys, [1.0, 0.0], [0.0, 0.7], 20.0, tol=1e-12)
    assert noether.lift_null_residual(traj, 0.5) <= 1e-8


def test_builtin_catalog_runs(tmp_path):
    names = [name for name, _ in noether.list_builtins()]
    assert len(names) == 8
    report = noether.run_builtin("kepler-rescale", str(tmp_path))
    assert report["pass"] is True
    assert json.loads((tmp_path / "report.json").read_text())["scenario"] == "kepler-rescale"


def test_config_error(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('name = "x"\nchecks = [\n')
    with pytest.raises(noether.ConfigError):
        noether.run_config(str(cfg), str(tmp_path / "out"))
