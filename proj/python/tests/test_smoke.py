import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import qcomb

ORACLE = Path(os.environ.get("QCOMB_ORACLE", Path(__file__).parents[2] / "tests/oracle/derive.py"))


@pytest.fixture(scope="module")
def oracle():
    if not ORACLE.is_file():
        pytest.skip("oracle script not available")
    try:
        import scipy  # noqa: F401
    except ImportError:
        pytest.skip("oracle needs scipy")
    out = subprocess.run([sys.executable, str(ORACLE)], check=True, capture_output=True, text=True)
    return json.loads(out.stdout)


def reference_comb(gain_db=0.0, p_s=1e-4):
    g = qcomb.db_to_gain(gain_db)
    return qcomb.Comb(lines=100000, signal_power_w=p_s, lo_power_w=5 * p_s, signal_gain=g, lo_gain=g)


REFERENCE_DETECTOR = qcomb.Detector(nep_w_per_rthz=5e-13, rin_dbc_per_hz=-170)


def test_joint_quadrature_variance(oracle):
    ref = oracle["eq11"]
    assert qcomb.joint_quadrature_variance(1.0, 0.7) == 1.0
    assert qcomb.joint_quadrature_variance(10.0, 0.0) == pytest.approx(ref["g10_theta0"], abs=1e-12)
    assert qcomb.joint_quadrature_variance(10.0, math.pi / 4) == pytest.approx(ref["g10_theta_pi4"], abs=1e-12)
    with pytest.raises(ValueError):
        qcomb.joint_quadrature_variance(0.5, 0.0)


def test_reference_budget_matches_oracle(oracle):
    b = qcomb.snr(reference_comb(), detector=REFERENCE_DETECTOR)
    ref = oracle["fig1c_classical_1e-4"]
    for key in ("sigma2_nep", "sigma2_quad", "sigma2_rin"):
        assert b[key] == pytest.approx(ref[key], rel=1e-9)
    assert b["snr_db"] == pytest.approx(ref["snr_db"], abs=1e-9)
    adv = qcomb.quantum_advantage(reference_comb(10.0), detector=REFERENCE_DETECTOR)
    assert adv == pytest.approx(oracle["fig1c_quantum_1e-4"]["advantage_db"], abs=1e-9)
    power, best = qcomb.max_advantage_over_power(reference_comb(10.0), detector=REFERENCE_DETECTOR)
    assert best == pytest.approx(oracle["fig1c_max_advantage"]["advantage_db"], abs=1e-6)
    assert power == pytest.approx(1e-4, rel=1e-2)


def test_thresholds_and_occupation(oracle):
    nep_w, rin_w = qcomb.saturation_thresholds(10.0, 5.0, 1.0, REFERENCE_DETECTOR)
    assert nep_w == pytest.approx(oracle["thresholds_g10"]["nep_w"], rel=1e-6)
    assert rin_w == pytest.approx(oracle["thresholds_g10"]["rin_w"], rel=1e-6)
    c = 299792458.0
    assert qcomb.thermal_occupation(c / 10e-6, 300.0) == pytest.approx(oracle["occupation"]["300K_10um"], rel=1e-9)


def test_readout_variance_oracle(oracle):
    comb = qcomb.Comb(lines=1)
    hv = comb.photon_energy_j
    comb.signal_power_w, comb.lo_power_w = 2.25 * hv, 6.25 * hv
    comb.signal_gain, comb.lo_gain = 10.0, 3.0
    v = qcomb.ac_noise_variance(
        comb, qcomb.Sample(0.8, 0.5), qcomb.LOPath(0.9, 0.2), qcomb.Environment(occupation=0.05)
    )
    assert v == pytest.approx(oracle["readout_variance"]["kappa0.8_eta0.9_theta0.3_g10_glo3_occ0.05"], rel=1e-10)


def test_monte_carlo_readout_is_seeded_and_unbiased():
    comb = qcomb.Comb(lines=16, signal_power_w=2.5e-12, lo_power_w=1.25e-11, signal_gain=10.0, lo_gain=10.0)
    env = qcomb.Environment(occupation=0.0)
    x = qcomb.sample_readout(comb, 50000, seed=3, line=5, environment=env)
    y = qcomb.sample_readout(comb, 50000, seed=3, line=5, environment=env)
    assert x.dtype == np.complex128 and x.shape == (50000,)
    np.testing.assert_array_equal(x, y)
    analytic = qcomb.ac_noise_variance(comb, line=5, environment=env)
    empirical = np.var(x, ddof=1)
    assert abs(empirical / analytic - 1.0) < 0.03
    assert np.mean(x) == pytest.approx(qcomb.mean_ac_spectrum(comb, line=5), rel=0.01)


def test_verification_suite_small():
    rows = qcomb.verification_suite(seed=42, n_samples=20000, crb_samples=5000, time_domain_samples=2000)
    assert rows and all({"check", "analytic", "empirical", "z_score", "pass"} <= r.keys() for r in rows)
    assert any(r["check"].startswith("dft_identity") for r in rows)


def test_water_advantage(oracle):
    table = qcomb.AbsorptionTable([0.5, 20.0], [1e-4, 1e-4])
    w = qcomb.water_limited_advantage(table, 1.0, 15.0, gain=100.0, environment=qcomb.Environment())
    assert w["transmissivity"] == pytest.approx(oracle["water"]["kappa_alpha1e-4_L15"], rel=1e-12)
    # Single line, A^2 : B^2 = 1 : gamma, lossless LO, vacuum environment.
    k, g, gamma = w["transmissivity"], 100.0, 5.0
    quantum = gamma * (1 - k) + k * (gamma + 1) / g
    classical = gamma * (1 - k) + k * (gamma + 1)
    assert w["advantage_db"] == pytest.approx(5 * math.log10(classical / quantum), abs=1e-9)
    water = qcomb.AbsorptionTable.bundled_water()
    assert len(water) > 10
    with pytest.raises(qcomb.ExtrapolationError):
        water.alpha_per_um(50.0)


def test_run_command(tmp_path):
    out = tmp_path / "fig4.csv"
    code, stdout, _ = qcomb.run_command("sweep", preset="fig4", out=str(out), plot=True)
    assert code == 0 and out.is_file() and out.with_suffix(".svg").is_file()
    code, _, stderr = qcomb.run_command("sweep", preset="fig4", set=["comb.nope=1"])
    assert code == 2 and "comb.nope" in stderr
    with pytest.raises(qcomb.ConfigError):
        qcomb.preset("fig99")


def test_degenerate_model_maps_to_arithmetic_error():
    comb = qcomb.Comb(lines=10, signal_gain=math.inf, lo_gain=math.inf)
    with pytest.raises(ArithmeticError):
        qcomb.snr(comb)
