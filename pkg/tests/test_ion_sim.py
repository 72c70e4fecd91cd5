import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import trotter_propagator
from spinkey.ion_sim import (
    ExperimentConfig,
    NoiseModel,
    angle_scan,
    apply_laser_pi,
    apply_oracle,
    apply_rf,
    default_config,
    detuning_scan,
    init_state,
    light_shift_isolation,
    rabi_curve,
    rf_unitary,
    run,
    run_qubit_reduction,
    sequential_readout,
    time_series,
)
from spinkey.protocols import DESIGN_ANGLES, OracleSpec, ask3_sequence, psk3_sequence
from spinkey.spin_algebra import spin_operators

DESIGN = np.array(DESIGN_ANGLES)


def test_init_state_and_trivial_readout():
    state = init_state()
    assert abs(np.linalg.norm(state) - 1.0) < 1e-12
    assert abs(state[6]) == 1.0
    probs = sequential_readout(state).probabilities
    np.testing.assert_allclose(probs, [1, 0, 0, 0], atol=1e-12)


def test_pi_pulse_mirrors_population():
    state = np.zeros(8, dtype=complex)
    state[4] = 1.0  # m = -3/2
    out = apply_rf(state, math.pi, 0.0)
    assert abs(out[1]) ** 2 > 1 - 1e-10  # m = +3/2
    # Ground block untouched.
    state[4], state[6] = 0.0, 1.0
    out = apply_rf(state, math.pi, 0.0)
    assert abs(out[6]) ** 2 > 1 - 1e-12


def test_two_pi_pulse_preserves_populations():
    rng = np.random.default_rng(2)
    amps = rng.normal(size=6) + 1j * rng.normal(size=6)
    state = np.zeros(8, dtype=complex)
    state[:6] = amps / np.linalg.norm(amps)
    out = apply_rf(state, 2 * math.pi, 0.4)
    np.testing.assert_allclose(np.abs(out) ** 2, np.abs(state) ** 2, atol=1e-10)


def test_detuned_pulse_matches_trotter_oracle():
    ops = spin_operators(6)
    config = ExperimentConfig()
    noise = NoiseModel(detuning_hz=1000.0)
    u = rf_unitary(math.pi, 0.0, noise, config)
    h_a = 2 * math.pi * 1000.0 * np.asarray(ops.jz)
    h_b = config.rabi_freq * np.asarray(ops.jx)
    reference = trotter_propagator(h_a, h_b, math.pi / config.rabi_freq)
    np.testing.assert_allclose(u, reference, atol=1e-8)
    # Transfer is degraded below unity.
    state = np.zeros(8, dtype=complex)
    state[4] = 1.0
    out = apply_rf(state, math.pi, 0.0, noise, config)
    assert abs(out[1]) ** 2 < 1.0 - 1e-6


def test_random_detuned_pulses_match_trotter():
    ops = spin_operators(6)
    config = ExperimentConfig()
    rng = np.random.default_rng(20)
    for _ in range(20):
        theta = rng.uniform(0.05, 2 * math.pi)
        phi = rng.uniform(0, 2 * math.pi)
        delta = rng.uniform(-2000, 2000)
        u = rf_unitary(theta, phi, NoiseModel(detuning_hz=delta), config)
        j_phi = math.cos(phi) * ops.jx + math.sin(phi) * ops.jy
        reference = trotter_propagator(
            2 * math.pi * delta * np.asarray(ops.jz),
            config.rabi_freq * np.asarray(j_phi),
            theta / config.rabi_freq,
        )
        np.testing.assert_allclose(u, reference, atol=1e-8)


def test_laser_swap_and_error_channel():
    config = default_config(psk3_sequence())
    state = init_state(config)
    swapped = apply_laser_pi(state, config.couple_pair)
    d_level = config.couple_pair[0]
    assert abs(swapped[d_level]) ** 2 > 1 - 1e-12
    twice = apply_laser_pi(swapped, config.couple_pair)
    np.testing.assert_allclose(np.abs(twice) ** 2, np.abs(state) ** 2, atol=1e-12)
    # Error leaves the stated population behind.
    noisy = apply_laser_pi(state, config.couple_pair, NoiseModel(laser_pi_error=0.002))
    assert abs(noisy[6]) ** 2 == pytest.approx(0.002, abs=1e-12)
    assert abs(np.linalg.norm(noisy) - 1.0) < 1e-12


def test_apply_oracle_dispatch():
    state = init_state()
    state = apply_laser_pi(state, (4, 6))
    psk = OracleSpec("psk", DESIGN_ANGLES, 0)
    np.testing.assert_allclose(
        apply_oracle(state, psk), apply_rf(state, math.pi, math.pi), atol=1e-14
    )
    ask1 = OracleSpec("ask", DESIGN_ANGLES, 1)
    np.testing.assert_allclose(
        apply_oracle(state, ask1),
        apply_rf(state, 2 * math.pi / 3, math.pi / 2),
        atol=1e-14,
    )
    ask0 = OracleSpec("ask", DESIGN_ANGLES, 0)
    np.testing.assert_allclose(apply_oracle(state, ask0), state, atol=1e-14)


def test_ideal_runs_are_deterministic():
    seq = psk3_sequence()
    for index in range(3):
        probs = run(seq, index).probabilities
        assert probs[seq.readout_map[index]] > 0.9999
    # Verbatim amplitude-keyed table: the printed processing angles are a
    # slightly off solver output, capping the six-level branch fidelity at
    # 0.99950 (frozen); the closed-form variant is exact.
    seq = ask3_sequence()
    values = [run(seq, i).probabilities[seq.readout_map[i]] for i in range(3)]
    np.testing.assert_allclose(values, [0.999500, 1.0, 0.999501], atol=2e-6)
    seq = ask3_sequence(exact=True)
    for index in range(3):
        assert run(seq, index).probabilities[seq.readout_map[index]] > 1 - 1e-9


def test_run_identity_matrix_invariant():
    for seq, tol in ((psk3_sequence(), 1e-4), (ask3_sequence(exact=True), 1e-9)):
        mat = np.array([run(seq, i).probabilities[:3] for i in range(3)])
        np.testing.assert_allclose(mat, np.eye(3), atol=tol)


def test_run_psk3_under_30hz_detuning():
    result = run(psk3_sequence(), 1, NoiseModel(detuning_hz=30.0))
    assert result.probabilities[1] > 0.99


def test_norm_preserved_under_unitary_noise():
    noise = NoiseModel(detuning_hz=25.0, rf_amp_error=0.01)
    seq = psk3_sequence()
    probs = run(seq, 2, noise).probabilities
    assert abs(probs.sum() - 1.0) < 1e-10


def test_sampled_readout_reproducible():
    r1 = run(psk3_sequence(), 2, seed=42)
    r2 = run(psk3_sequence(), 2, seed=42)
    assert r1.outcome == r2.outcome == 2


def test_sequential_readout_splits_and_leakage():
    config = default_config(psk3_sequence())
    lvl1, lvl2 = config.readout_pairs[0][0], config.readout_pairs[1][0]
    state = np.zeros(8, dtype=complex)
    state[lvl1] = state[lvl2] = 1 / math.sqrt(2)
    probs = sequential_readout(state, config=config).probabilities
    np.testing.assert_allclose(probs, [0, 0.5, 0.5, 0], atol=1e-12)
    # Population on a non-readout level is pure leakage.
    state = np.zeros(8, dtype=complex)
    state[5] = 1.0
    probs = sequential_readout(state, config=config).probabilities
    np.testing.assert_allclose(probs, [0, 0, 0, 1], atol=1e-12)


def test_readout_spam_flip():
    state = init_state()
    s = 0.002
    probs = sequential_readout(state, NoiseModel(spam_error=s)).probabilities
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert probs[0] == pytest.approx(1.0 - s, abs=2 * s * s)


def test_leakage_rate_scales_distribution():
    seq = psk3_sequence()
    clean = run(seq, 0).probabilities
    leaky = run(seq, 0, NoiseModel(leakage_rate=10.0)).probabilities
    assert leaky[0] < clean[0]
    assert leaky[3] > clean[3]
    assert abs(leaky.sum() - 1.0) < 1e-12


def test_noise_model_validation_and_preset():
    with pytest.raises(ValueError):
        NoiseModel(spam_error=1.5)
    preset = NoiseModel.lab()
    assert preset.laser_pi_error == 5e-4 and preset.spam_error == 2e-4


def test_time_series_boundaries():
    seq = psk3_sequence()
    for index in range(3):
        table = time_series(seq, index, 24)
        np.testing.assert_allclose(table[0, 1:], [1, 0, 0], atol=1e-12)
        final = run(seq, index).probabilities[:3]
        np.testing.assert_allclose(table[-1, 1:], final, atol=1e-10)
        # Populations plus leakage stay normalized at every point.
        assert np.all(table[:, 1:].sum(axis=1) <= 1 + 1e-10)


def test_angle_scan_identity_at_design_angles():
    for seq in (ask3_sequence(exact=True), psk3_sequence()):
        table = angle_scan(seq, DESIGN)
        np.testing.assert_allclose(table[:, 1:], np.eye(3), atol=1e-3)


def test_psk_scan_is_pi_periodic():
    seq = psk3_sequence()
    grid = np.linspace(0.1, 2.0, 7)
    base = angle_scan(seq, grid)
    shifted = angle_scan(seq, grid + np.pi)
    np.testing.assert_allclose(base[:, 1:], shifted[:, 1:], atol=1e-8)


def test_ask_scan_is_2pi_periodic():
    seq = ask3_sequence()
    grid = np.linspace(0.2, 2.2, 5)
    base = angle_scan(seq, grid)
    shifted = angle_scan(seq, grid + 2 * np.pi)
    np.testing.assert_allclose(base[:, 1:], shifted[:, 1:], atol=1e-8)


def test_qubit_reduction_agrees_at_design_angles_only():
    seq = ask3_sequence(exact=True)
    for index, angle in enumerate(DESIGN):
        two = run_qubit_reduction(seq, angle)
        six = run(seq, index).probabilities[:3]
        np.testing.assert_allclose(two, six, atol=1e-8)
    # Between the candidates the two spaces genuinely differ.
    mid = 1.0
    two = run_qubit_reduction(seq, mid)
    six = run(seq, 0, candidate_angles=(mid,)).probabilities[:3]
    assert np.max(np.abs(two - six)) > 0.01


def test_detuning_scan_shape_and_threshold():
    seq = psk3_sequence()
    grid = np.array([-30.0, -10.0, 0.0, 10.0, 30.0])
    table = detuning_scan(seq, grid)
    assert table.shape == (5, 2)
    assert table[2, 1] > 0.9999
    assert np.all(table[:, 1] >= 0.99)


def test_detuning_scan_asymmetry_is_small_but_nonzero():
    """No exact mirror symmetry exists for these pulse programs; the odd
    component of the minimum-accuracy curve is at the 1e-4 scale at the
    edge of the +-30 Hz budget window."""
    seq = psk3_sequence()
    table = detuning_scan(seq, np.array([-30.0, 30.0]))
    asym = abs(table[0, 1] - table[1, 1])
    assert 1e-6 < asym < 2e-4


def test_rabi_curve_transfer_and_return():
    config = ExperimentConfig()
    times = np.array([0.0, config.pi_time, 2 * config.pi_time])
    _, pops = rabi_curve(times, start_level=4, config=config)
    assert pops[0, 4] == pytest.approx(1.0, abs=1e-12)
    assert pops[1, 1] > 1 - 1e-10  # m = -3/2 -> +3/2 at 55 us
    assert pops[2, 4] > 1 - 1e-10  # and back at 110 us


def test_light_shift_zero_reduces_to_rabi():
    times = np.linspace(0, 110e-6, 31)
    _, shifted = light_shift_isolation(0.0, times)
    _, free = rabi_curve(times, start_level=5)
    np.testing.assert_allclose(shifted, free, atol=1e-10)


def test_light_shift_isolation_leakage_levels():
    config = ExperimentConfig()
    t_eff = math.pi / (config.rabi_freq * 0.5 * math.sqrt(5.0))
    times = np.linspace(0, t_eff, 200)
    # At the algorithm drive strength a 30 kHz shift is not yet isolating:
    # the computed leakage peaks near 0.45 (frozen from simulation).
    _, pops = light_shift_isolation(30e3, times, config=config)
    leak = 1.0 - pops[:, 5] - pops[:, 4]
    assert np.max(leak) == pytest.approx(0.446, abs=0.01)
    # At a servo-grade drive (250 us pi-time) the same shift isolates the
    # two-level subspace to within a few percent.
    slow = ExperimentConfig(rabi_freq=math.pi / 250e-6)
    t_eff = math.pi / (slow.rabi_freq * 0.5 * math.sqrt(5.0))
    _, pops = light_shift_isolation(30e3, np.linspace(0, t_eff, 200), config=slow)
    leak = 1.0 - pops[:, 5] - pops[:, 4]
    assert np.max(leak) <= 0.05


def test_light_shift_infinite_limit_is_two_level():
    config = ExperimentConfig()
    omega_eff = config.rabi_freq * 0.5 * math.sqrt(5.0)
    times = np.linspace(0, math.pi / omega_eff, 100)
    _, pops = light_shift_isolation(1e9, times, config=config)
    np.testing.assert_allclose(pops[:, 4], np.sin(omega_eff * times) ** 2, atol=1e-6)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(rabi_freq=0.0)
    assert ExperimentConfig().pi_time == pytest.approx(55e-6)


def test_named_laser_pairs():
    config = default_config(psk3_sequence())
    state = init_state(config)
    by_name = apply_laser_pi(state, "couple", config=config)
    by_tuple = apply_laser_pi(state, config.couple_pair)
    np.testing.assert_allclose(by_name, by_tuple, atol=1e-15)
    with pytest.raises(ValueError, match="unknown laser pair"):
        apply_laser_pi(state, "sideband", config=config)


def test_fixed_length_oracle_option():
    seq = ask3_sequence(exact=True)
    config = replace(default_config(seq), oracle_fixed_length=True)
    # Ideal drive: rescaled amplitude reproduces the same rotations.
    for index in range(3):
        probs = run(seq, index, config=config).probabilities
        assert probs[seq.readout_map[index]] > 1 - 1e-9
    # With detuning, the zero-angle query takes a pi-time of free
    # precession instead of zero time, so the two timings are physically
    # distinct channels.
    noise = NoiseModel(detuning_hz=500.0)
    p_default = run(seq, 0, noise).probabilities[0]
    p_fixed = run(seq, 0, noise, config=config).probabilities[0]
    assert abs(p_fixed - p_default) > 1e-4
