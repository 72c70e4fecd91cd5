"""Single-ion simulation: 8-level state, noisy pulses, shelving, readout.

The state space is six metastable sublevels (indices 0..5, m = +5/2 down
to -5/2) followed by two ground sublevels (6: m = +1/2, 7: m = -1/2). rf
pulses drive the whole metastable block through the spin-5/2 generators;
laser pulses swap one metastable sublevel with one ground sublevel and are
modeled as instantaneous two-level rotations with a scalar failure
probability. Readout is the three-stage fluorescence cascade: detect the
ground manifold, then deshelve and detect each metastable readout level in
turn; whatever norm remains is leakage.

The laser coupling and readout sublevels are configuration. The defaults
were frozen from noiseless simulation of the built-in sequences: the
phase-keyed table is exact when the laser couples m = +1/2 (branches end on
m = -1/2 and m = +1/2), and the amplitude-keyed table wants m = +5/2
(branches end on m = +5/2 and m = -5/2).
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .protocols import (
    ASK,
    DESIGN_ANGLES,
    LASER,
    ORACLE,
    OracleSpec,
    PSK,
    resolve_oracle_pulse,
)
from .spin_algebra import rotation, spin_operators, _expm_i_hermitian

D_DIM = 6
DIM = 8
S_LEVELS = (6, 7)

_J6 = spin_operators(6)


@dataclass(frozen=True)
class NoiseModel:
    """Error channels applied during a run; everything defaults to ideal.

    detuning_hz is the rf offset from the Zeeman resonance (constant within
    a run), rf_amp_error a fractional Rabi-frequency error, laser_pi_error
    the failure probability of one laser pi-swap, spam_error the flip
    probability of each binary fluorescence detection, and leakage_rate a
    uniform per-second probability of leaving the readout space.
    """

    detuning_hz: float = 0.0
    rf_amp_error: float = 0.0
    laser_pi_error: float = 0.0
    spam_error: float = 0.0
    leakage_rate: float = 0.0

    def __post_init__(self):
        for name in ("laser_pi_error", "spam_error"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")

    @classmethod
    def lab(cls):
        """Preset reproducing the measured 0.21% prep/detection/laser budget.

        The combined budget is split across the roughly two in-sequence
        laser pulses, one readout deshelve, and three detections of a
        typical run.
        """
        return cls(laser_pi_error=5e-4, spam_error=2e-4)


IDEAL = NoiseModel()


@dataclass(frozen=True)
class ExperimentConfig:
    """Pulse timing and level assignments.

    rabi_freq fixes the rf pi-time (55 us by default). couple_pair is the
    (metastable, ground) index pair driven by in-sequence laser pulses;
    readout_pairs are the deshelving pairs for readout states 1 and 2, in
    detection order. Readout state 0 is the ground manifold itself.
    """

    rabi_freq: float = math.pi / 55e-6
    pulse_gap_s: float = 0.0
    laser_time_s: float = 0.0
    init_level: int = 6
    couple_pair: tuple = (2, 6)
    readout_pairs: tuple = ((3, 6), (2, 6))
    # Non-default alternative: drive zero-angle oracle pulses for a full
    # pi-time at zero amplitude so every query takes the same wall time.
    oracle_fixed_length: bool = False

    def __post_init__(self):
        if self.rabi_freq <= 0:
            raise ValueError("rabi_freq must be positive")

    @property
    def pi_time(self):
        return math.pi / self.rabi_freq

    @property
    def laser_pairs(self):
        """Named coupling map used by apply_laser_pi."""
        return {
            "couple": self.couple_pair,
            "readout1": self.readout_pairs[0],
            "readout2": self.readout_pairs[1],
        }


_SEQUENCE_CONFIGS = {
    PSK: ExperimentConfig(couple_pair=(2, 6), readout_pairs=((3, 6), (2, 6))),
    ASK: ExperimentConfig(couple_pair=(0, 6), readout_pairs=((0, 6), (5, 7))),
}


def default_config(seq):
    """Frozen level assignment for a sequence's encoding."""
    return _SEQUENCE_CONFIGS[seq.encoding]


@dataclass(frozen=True)
class ReadoutResult:
    """Probabilities over (state0, state1, state2, leakage), plus a sampled
    outcome when a seed was supplied (3 denotes leakage)."""

    probabilities: np.ndarray
    outcome: int = None
    seed: int = None

    @property
    def leakage(self):
        return float(self.probabilities[3])


def init_state(config=None):
    """All amplitude on the configured ground sublevel."""
    config = config or ExperimentConfig()
    state = np.zeros(DIM, dtype=complex)
    state[config.init_level] = 1.0
    return state


def _embed6(u6):
    u = np.eye(DIM, dtype=complex)
    u[:D_DIM, :D_DIM] = u6
    return u


def rf_unitary(theta, phi, noise=IDEAL, config=None, duration=None):
    """Propagator of one rf pulse on the metastable block.

    A negative rotation angle is driven as a positive-duration pulse about
    the opposite axis. The detuning enters as 2*pi*detuning*Jz alongside
    the (1 + amp_error)-scaled drive. The duration is theta/rabi_freq
    unless an explicit duration is given, in which case the drive amplitude
    is rescaled to produce the same rotation angle in that time.
    """
    config = config or ExperimentConfig()
    if theta < 0:
        theta, phi = -theta, phi + math.pi
    if duration is None:
        if theta == 0.0:
            return np.eye(D_DIM, dtype=complex)
        duration = theta / config.rabi_freq
        omega = config.rabi_freq * (1.0 + noise.rf_amp_error)
    else:
        omega = (theta / duration) * (1.0 + noise.rf_amp_error)
    j_phi = math.cos(phi) * _J6.jx + math.sin(phi) * _J6.jy
    h = 2.0 * math.pi * noise.detuning_hz * _J6.jz + omega * j_phi
    return _expm_i_hermitian(h, duration)


def apply_rf(state, theta, phi, noise=IDEAL, config=None, duration=None):
    """Apply one rf pulse; the ground block is untouched."""
    out = state.copy()
    out[:D_DIM] = rf_unitary(theta, phi, noise, config, duration) @ state[:D_DIM]
    return out


def _laser_unitary(pair, theta, phase=0.0):
    u = np.eye(DIM, dtype=complex)
    i, k = pair
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    u[i, i] = c
    u[k, k] = c
    u[i, k] = -1j * s * np.exp(1j * phase)
    u[k, i] = -1j * s * np.exp(-1j * phase)
    return u


def apply_laser(state, pair, theta=math.pi, phase=0.0):
    """Two-level rotation between one metastable and one ground sublevel."""
    return _laser_unitary(pair, theta, phase) @ state


def apply_laser_pi(state, pair, noise=IDEAL, config=None):
    """Population swap of the pair; with error p, a fraction p stays behind.

    pair is either a (metastable, ground) index tuple or the name of an
    entry in the config's coupling map ("couple", "readout1", "readout2").
    The imperfect swap is unitary: the transfer probability is 1 - p, so
    applying it twice is the identity on populations only in the ideal
    case.
    """
    if isinstance(pair, str):
        pairs = (config or ExperimentConfig()).laser_pairs
        if pair not in pairs:
            raise ValueError(f"unknown laser pair {pair!r}; expected one of {sorted(pairs)}")
        pair = pairs[pair]
    theta = 2.0 * math.asin(math.sqrt(1.0 - noise.laser_pi_error))
    return apply_laser(state, pair, theta)


def apply_oracle(state, oracle, noise=IDEAL, config=None, phase_offset=math.pi):
    """Apply the hidden channel once.

    Phase keying drives a fixed-length pi-pulse about the encoded axis plus
    the sequence's phase offset; amplitude keying drives the encoded angle
    about the y axis.
    """
    if oracle.encoding == PSK:
        return apply_rf(state, math.pi, oracle.hidden_angle + phase_offset,
                        noise, config)
    return apply_rf(state, oracle.hidden_angle, math.pi / 2.0, noise, config)


def _free_evolution(state, duration, noise):
    if duration == 0.0 or noise.detuning_hz == 0.0:
        return state
    out = state.copy()
    phases = np.exp(-2j * math.pi * noise.detuning_hz * _m6 * duration)
    out[:D_DIM] = phases * state[:D_DIM]
    return out


_m6 = np.diag(_J6.jz).real.copy()


def _run_pulses(seq, signal_angle, noise, config):
    """Apply init and the full pulse program; returns (state, duration)."""
    state = init_state(config)
    elapsed = 0.0
    for n, pulse in enumerate(seq.pulses):
        if n > 0 and config.pulse_gap_s > 0.0:
            state = _free_evolution(state, config.pulse_gap_s, noise)
            elapsed += config.pulse_gap_s
        if pulse.channel == LASER:
            state = apply_laser_pi(state, config.couple_pair, noise)
            state = _free_evolution(state, config.laser_time_s, noise)
            elapsed += config.laser_time_s
        else:
            duration = None
            if pulse.channel == ORACLE:
                theta, phi = resolve_oracle_pulse(pulse, seq.encoding, signal_angle)
                if config.oracle_fixed_length and seq.encoding == ASK:
                    duration = config.pi_time
            else:
                theta, phi = pulse.theta, pulse.phi
            state = apply_rf(state, theta, phi, noise, config, duration)
            elapsed += duration if duration is not None else abs(theta) / config.rabi_freq
    return state, elapsed


def sequential_readout(state, noise=IDEAL, config=None, seed=None):
    """Three-stage fluorescence cascade.

    Stage 0 detects the ground manifold; stages 1 and 2 deshelve the
    configured readout levels and detect again. Each binary detection
    projects the true state and is misreported with probability
    spam_error; the procedure follows the reports, so a flipped detection
    both mislabels and derails the remaining cascade, as it does in the
    lab. Returns exact outcome probabilities, plus one sampled outcome when
    a seed is given.
    """
    config = config or ExperimentConfig()
    s = noise.spam_error
    outcome_probs = np.zeros(4)

    def detect(weight, psi, stage):
        """Recursively walk the cascade; weight is the path probability."""
        if stage > 2:
            outcome_probs[3] += weight
            return
        p_ground = min(1.0, float(np.sum(np.abs(psi[list(S_LEVELS)]) ** 2)))
        p_dark = 1.0 - p_ground
        # True-bright branch: collapse into the ground manifold.
        if p_ground > 0.0:
            bright = np.zeros(DIM, dtype=complex)
            bright[list(S_LEVELS)] = psi[list(S_LEVELS)]
            bright /= math.sqrt(p_ground)
            outcome_probs[stage] += weight * p_ground * (1.0 - s)
            _continue(weight * p_ground * s, bright, stage)
        # True-dark branch: collapse out of the ground manifold.
        if p_dark > 1e-300:
            dark = psi.copy()
            dark[list(S_LEVELS)] = 0.0
            dark /= math.sqrt(p_dark)
            outcome_probs[stage] += weight * p_dark * s
            _continue(weight * p_dark * (1.0 - s), dark, stage)

    def _continue(weight, psi, stage):
        if weight <= 1e-300:
            return
        if stage >= 2:
            outcome_probs[3] += weight
            return
        psi = apply_laser_pi(psi, config.readout_pairs[stage], noise)
        detect(weight, psi, stage + 1)

    detect(1.0, np.asarray(state, dtype=complex), 0)

    outcome = None
    if seed is not None:
        rng = np.random.default_rng(seed)
        outcome = int(rng.choice(4, p=outcome_probs / outcome_probs.sum()))
    return ReadoutResult(probabilities=outcome_probs, outcome=outcome, seed=seed)


def _apply_leakage(result, noise, duration):
    if noise.leakage_rate == 0.0:
        return result
    survive = math.exp(-noise.leakage_rate * duration)
    probs = result.probabilities.copy()
    kept = probs[:3] * survive
    probs[3] = 1.0 - kept.sum()
    probs[:3] = kept
    return replace(result, probabilities=probs)


def run(seq, oracle_index, noise=IDEAL, config=None, candidate_angles=DESIGN_ANGLES,
        seed=None):
    """Initialize, apply the full pulse program, and read out.

    With ideal noise every oracle index of the built-in sequences lands on
    readout_map[oracle_index] deterministically (to the precision of the
    stored pulse angles).
    """
    config = config or default_config(seq)
    oracle = OracleSpec(seq.encoding, tuple(candidate_angles), oracle_index)
    state, duration = _run_pulses(seq, oracle.hidden_angle, noise, config)
    result = sequential_readout(state, noise, config, seed=seed)
    return _apply_leakage(result, noise, duration)


def run_qubit_reduction(seq, signal_angle):
    """Two-level execution of the rotation core, shelving bookkeeping included.

    The first laser pulse loads the start level; the later one removes the
    amplitude of the coupled level to a spectator slot. Returns the three
    readout-state populations in the same order as run(). At the design
    angles, where each half of a built-in sequence composes to an exact
    identity or flip, this matches the six-level run; away from them the
    two spaces genuinely differ.
    """
    from .spin_algebra import rotation

    config = default_config(seq)
    couple_d = config.couple_pair[0]
    state1_d = config.readout_pairs[0][0]

    psi = np.array([1.0, 0.0], dtype=complex)  # index 0 = the coupled level
    shelf = 0.0 + 0.0j
    lasers_seen = 0
    for pulse in seq.pulses:
        if pulse.channel == LASER:
            lasers_seen += 1
            if lasers_seen == 1:
                continue
            shelf = psi[0]
            psi = np.array([0.0, psi[1]], dtype=complex)
            continue
        if pulse.channel == ORACLE:
            theta, phi = resolve_oracle_pulse(pulse, seq.encoding, signal_angle)
        else:
            theta, phi = pulse.theta, pulse.phi
        psi = rotation(2, theta, phi) @ psi
    p_couple, p_mirror = abs(psi[0]) ** 2, abs(psi[1]) ** 2
    p1 = p_couple if state1_d == couple_d else p_mirror
    p2 = p_mirror if state1_d == couple_d else p_couple
    return np.array([abs(shelf) ** 2, p1, p2])


def time_series(seq, oracle_index, n_points, config=None, noise=IDEAL,
                candidate_angles=DESIGN_ANGLES):
    """Readout-state populations versus evolution time.

    The pulse program is truncated at n_points evenly spaced times; laser
    pulses are instantaneous by default, so the curves are piecewise smooth
    with steps at the shelving events. The final row equals run().

    Returns an (n_points, 4) array with columns (time, p0, p1, p2).
    """
    config = config or default_config(seq)
    oracle = OracleSpec(seq.encoding, tuple(candidate_angles), oracle_index)

    # Timeline of (kind, payload, duration) entries.
    timeline = []
    for n, pulse in enumerate(seq.pulses):
        if n > 0 and config.pulse_gap_s > 0.0:
            timeline.append(("gap", None, config.pulse_gap_s))
        if pulse.channel == LASER:
            timeline.append(("laser", None, config.laser_time_s))
        else:
            if pulse.channel == ORACLE:
                theta, phi = resolve_oracle_pulse(pulse, seq.encoding, oracle.hidden_angle)
                if config.oracle_fixed_length and seq.encoding == ASK:
                    timeline.append(("rf_fixed", (theta, phi), config.pi_time))
                    continue
            else:
                theta, phi = pulse.theta, pulse.phi
            timeline.append(("rf", (theta, phi), abs(theta) / config.rabi_freq))
    total = sum(entry[2] for entry in timeline)

    times = np.linspace(0.0, total, n_points)
    eps = 1e-15 * max(total, 1e-30)
    rows = np.empty((n_points, 4))
    for i, t in enumerate(times):
        state = init_state(config)
        remaining = t
        for kind, payload, duration in timeline:
            if remaining <= eps:
                break
            if kind == "laser":
                # The swap itself is instantaneous; any configured duration
                # is pure detuning dephasing.
                state = apply_laser_pi(state, config.couple_pair, noise)
                if duration > 0.0:
                    step = min(remaining, duration)
                    state = _free_evolution(state, step, noise)
                    remaining -= step
            elif kind == "gap":
                step = min(remaining, duration)
                state = _free_evolution(state, step, noise)
                remaining -= step
            else:
                theta, phi = payload
                fixed = duration if kind == "rf_fixed" else None
                if duration <= remaining + eps:
                    state = apply_rf(state, theta, phi, noise, config, fixed)
                    remaining -= duration
                else:
                    frac = remaining / duration
                    state = apply_rf(state, theta * frac, phi, noise, config,
                                     fixed and fixed * frac)
                    remaining = 0.0
        probs = sequential_readout(state, noise, config).probabilities
        rows[i] = (t, probs[0], probs[1], probs[2])
    return rows


def angle_scan(seq, angles, config=None, noise=IDEAL, dim=6):
    """Readout populations as the oracle's signal angle sweeps a grid.

    dim=6 runs the full ion model; dim=2 runs the two-level reduction.
    Returns an (n, 4) array with columns (angle, p0, p1, p2).
    """
    angles = np.asarray(angles, dtype=float)
    rows = np.empty((angles.size, 4))
    for i, angle in enumerate(angles):
        if dim == 2:
            probs = run_qubit_reduction(seq, angle)
        elif dim == 6:
            probs = run(seq, 0, noise, config, candidate_angles=(angle,)).probabilities[:3]
        else:
            raise ValueError(f"unsupported dimension {dim}")
        rows[i] = (angle, probs[0], probs[1], probs[2])
    return rows


def detuning_scan(seq, detunings_hz, config=None, candidate_angles=DESIGN_ANGLES,
                  noise=IDEAL):
    """Minimum correct-identification probability over the candidate set.

    Returns an (n, 2) array with columns (detuning_hz, min_accuracy); other
    noise fields are taken from the supplied model.
    """
    detunings_hz = np.asarray(detunings_hz, dtype=float)
    rows = np.empty((detunings_hz.size, 2))
    for i, delta in enumerate(detunings_hz):
        model = replace(noise, detuning_hz=float(delta))
        accs = []
        for index in range(len(candidate_angles)):
            result = run(seq, index, model, config, candidate_angles)
            accs.append(result.probabilities[seq.readout_map[index]])
        rows[i] = (delta, min(accs))
    return rows


def rabi_curve(times, start_level, config=None):
    """Six-level populations under a continuous resonant drive from one level.

    Evolution is exp(-1j * rabi_freq * t * Jx); at the pi-time the
    populations mirror m -> -m, and after twice that they return.

    Returns (times, populations) with populations of shape (n, 6).
    """
    config = config or ExperimentConfig()
    times = np.asarray(times, dtype=float)
    w, v = np.linalg.eigh(_J6.jx)
    start = np.zeros(D_DIM, dtype=complex)
    start[start_level] = 1.0
    coeffs = v.conj().T @ start
    pops = np.empty((times.size, D_DIM))
    for i, t in enumerate(times):
        psi = v @ (np.exp(-1j * w * config.rabi_freq * t) * coeffs)
        pops[i] = np.abs(psi) ** 2
    return times, pops


def light_shift_isolation(shift_hz, times, config=None, start_level=5,
                          shifted_level=3):
    """Rabi dynamics with one sublevel shifted out of resonance.

    Shifting m = -1/2 while driving from m = -5/2 pins the dynamics to the
    lowest two sublevels once the shift dominates the drive's ladder
    coupling; at zero shift this reduces to the free six-level curve.

    Returns (times, populations) with populations of shape (n, 6).
    """
    config = config or ExperimentConfig()
    times = np.asarray(times, dtype=float)
    h = config.rabi_freq * _J6.jx.copy()
    h[shifted_level, shifted_level] += 2.0 * math.pi * shift_hz
    w, v = np.linalg.eigh(h)
    start = np.zeros(D_DIM, dtype=complex)
    start[start_level] = 1.0
    coeffs = v.conj().T @ start
    pops = np.empty((times.size, D_DIM))
    for i, t in enumerate(times):
        psi = v @ (np.exp(-1j * w * t) * coeffs)
        pops[i] = np.abs(psi) ** 2
    return times, pops
