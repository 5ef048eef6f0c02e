import os

import numpy as np
import pytest

import qjump
from qjump import oscillator as osc

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "..", "configs")


def qubit(d=0.5):
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    return qjump.Generator(1.0, np.zeros((2, 2), complex), [sx], np.array([[d]], complex))


def test_eigh_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = a + a.conj().T
    values, vectors = qjump.eigh(h)
    assert np.allclose(values, np.linalg.eigvalsh(h))
    assert np.allclose(vectors @ np.diag(values) @ vectors.conj().T, h)


def test_trace_distance():
    e0 = np.diag([1.0, 0.0]).astype(complex)
    assert qjump.trace_distance(e0, np.eye(2, dtype=complex) / 2) == pytest.approx(0.5)


def test_generator_is_traceless():
    g = qubit()
    rho = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    out = g(rho)
    assert abs(np.trace(out)) < 1e-14
    assert np.allclose(out, qjump.apply_generator(g, rho))


def test_ground_state_channel():
    params = osc.Params(levels=20, D22=0.5)
    g = osc.generator(params)
    psi = osc.fock_state(20, 0)
    assert qjump.total_decay_rate(g, psi) == pytest.approx(0.5, abs=1e-12)
    (rate, target), = qjump.jump_channels(g, psi)
    assert rate == pytest.approx(0.5, abs=1e-12)
    assert abs(target[1]) == pytest.approx(1.0)


def test_modified_rate_operator_annihilates_state():
    params = osc.Params(levels=16, D11=0.3, D22=0.5, ReD12=0.1, ImD12=0.05)
    g = osc.generator(params)
    psi = osc.coherent_state(16, 0.5 + 0.5j)
    w = qjump.modified_rate_operator(g, psi)
    assert np.linalg.norm(w @ psi) < 1e-10
    assert np.trace(w).real == pytest.approx(qjump.total_decay_rate(g, psi))
    assert len(osc.closed_form_channels(psi, params)) <= 2


def test_invalid_generator_raises():
    with pytest.raises(qjump.InvalidGenerator):
        osc.generator(osc.Params(D11=0.1, D22=0.1, ImD12=0.5))


def test_trajectory_reproducible():
    g = qubit()
    psi = np.array([1, 0], dtype=complex)
    obs = {"p0": np.diag([1.0, 0.0]).astype(complex)}
    a = qjump.run_trajectory(g, psi, 0.01, 1.0, seed=3, observables=obs)
    b = qjump.run_trajectory(g, psi, 0.01, 1.0, seed=3, observables=obs)
    assert a["observables"] == b["observables"]
    assert len(a["times"]) == 101


def test_ensemble_small():
    g = qubit()
    psi = np.array([1, 0], dtype=complex)
    (snap,) = qjump.run_ensemble(g, psi, 400, 0.01, 0.5, seed=1)
    assert snap["trace_distance"] < 0.1
    rho = qjump.integrate_master(g, np.outer(psi, psi.conj()), 0.01, 50)
    assert np.allclose(rho, snap["rho_oracle"])


def test_verify_config():
    checks = qjump.verify(os.path.join(CONFIGS, "position_diffusion.ini"))
    assert checks and all(passed for _, passed, _ in checks)
