import math

import pytest

import hwsim

CONFIG = """
[rates]
atoms = 0.5 0.0 0.5 : 1.5 0.0 0.5

[arrivals]
lambda_hat = -0.2

[experiment]
ladder = 25
replications = 50
horizon = 0.5
report_times = 0.5
seed = 5

[diffusion]
step = 0.001
horizon = 0.5
"""


def test_stats_roundtrip():
    a = [0.1 * i for i in range(100)]
    b = [0.1 * i + 0.05 for i in range(100)]
    d, p = hwsim.ks_two_sample(a, a)
    assert d == 0.0 and p == 1.0
    assert hwsim.wasserstein1(a, b) == pytest.approx(0.05)
    s = hwsim.summarize([1.0, 2.0, 3.0])
    assert s["count"] == 3
    assert s["mean"] == pytest.approx(2.0)
    assert s["variance"] == pytest.approx(1.0)


def test_limit_params():
    p = hwsim.limit_params(CONFIG)
    assert p["mu"] == pytest.approx(1.0)
    assert p["var_tilde"] == pytest.approx(0.25)
    assert p["gamma"] == pytest.approx(1.25)
    assert p["mu_min"] == pytest.approx(0.5)
    assert p["sigma_sq"] == pytest.approx(2.0)
    assert p["drift_g"] == pytest.approx(1.25)


def test_config_error_maps_to_python():
    with pytest.raises(hwsim.ConfigError):
        hwsim.limit_params("[rates]\natoms = 1 0 0.4\n")


def test_des_marginal_runs_and_is_seeded():
    a = hwsim.des_marginal(CONFIG, n=25, t=0.5, replications=40, workers=1)
    b = hwsim.des_marginal(CONFIG, n=25, t=0.5, replications=40, workers=3)
    assert len(a) == 40
    assert a == b
    assert all(math.isfinite(x) for x in a)
    c = hwsim.des_marginal(CONFIG, n=25, t=0.5, replications=40, seed=11)
    assert c != a


def test_sde_marginal_runs():
    xs = hwsim.sde_marginal(CONFIG, t=0.5, paths=64)
    assert len(xs) == 64
    assert all(math.isfinite(x) for x in xs)


def test_euler_terminal_matches_closed_form():
    xs = hwsim.euler_terminal(
        sigma=0.0, g=1.0, beta=0.0, xi0=-1.0, step=1e-3, horizon=1.0, paths=1, seed=3
    )
    assert xs[0] == pytest.approx(-math.exp(-1.0), abs=1e-3)
