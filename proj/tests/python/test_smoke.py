import math
import os
import subprocess

import numpy as np
import pytest

import gbk


def test_collision_conserves_momentum():
    v, w = (1.0, 0.5, -0.2), (-0.3, 0.1, 0.4)
    n = (0.0, 0.6, 0.8)
    vp, wp = gbk.post_collision(v, w, n, 0.7)
    assert np.allclose(np.add(vp, wp), np.add(v, w), atol=1e-14)
    un = np.dot(np.subtract(v, w), n)
    expected = -0.5 * (1 - 0.7**2) * un**2
    assert gbk.energy_change(v, w, n, 0.7) == pytest.approx(expected, rel=1e-12)


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        gbk.post_collision((1, 0, 0), (0, 0, 0), (1, 1, 0), 0.5)
    with pytest.raises(ValueError):
        gbk.WeightParams(b=0.1, beta=1.5)


def test_theta_sharp_and_frequency():
    assert gbk.theta_sharp(0.5) == pytest.approx(0.6)
    for d in (0.0, 0.7, 3.0):
        assert gbk.collision_frequency(d) == pytest.approx(gbk.collision_frequency_quadrature(d), rel=1e-10)
    assert gbk.collision_frequency(0.0) == pytest.approx(4 * math.pi * math.sqrt(8 / math.pi))


def test_kernel_is_positive():
    assert gbk.kernel_k_e((1.0, 0.0, 0.0), (0.0, 0.5, 0.0), 0.5) > 0.0


def test_simulate_is_reproducible():
    a = gbk.simulate(n_particles=2000, t_end=0.3, alpha=0.9, e=0.5, seed=4)
    b = gbk.simulate(n_particles=2000, t_end=0.3, alpha=0.9, e=0.5, seed=4)
    assert a["velocities"].shape == (2000, 3)
    assert np.array_equal(a["velocities"], b["velocities"])
    assert a["series"][-1]["t"] == pytest.approx(0.3, abs=a["dt"])


def test_bath_operator_null_direction():
    op = gbk.assemble_operator("bath", n=11, e=1.0)
    a = op["matrix"]
    m = np.asarray(op["maxwellian"])
    residual = np.linalg.norm(a @ m) / np.linalg.norm(m) / op["rate_scale"]
    assert residual < 0.03
    ev = np.asarray(gbk.eigenvalues(a))
    assert ev.shape == (11**3,)
    assert abs(ev[0]) < 0.05 * op["rate_scale"]
    assert ev[1].real < 0.0


def test_inequality_checks():
    split = gbk.power_split_check(0.5, trials=1000)
    assert not split["passed"]
    assert split["violations"] > 0
    gauss = gbk.stretched_gaussian_check(0.3, 1.0, 0.5, 0.5, trials=1000)
    assert gauss["passed"]


@pytest.mark.skipif("GBK_CLI" not in os.environ, reason="command-line tool path not provided")
def test_cli_exit_codes():
    cli = os.environ["GBK_CLI"]
    ok = subprocess.run([cli, "freq", "--set", "points=3"], capture_output=True, text=True)
    assert ok.returncode == 0
    assert ok.stdout.startswith("# gbk")
    bad = subprocess.run([cli, "freq", "--set", "nonsense=1"], capture_output=True, text=True)
    assert bad.returncode == 2
