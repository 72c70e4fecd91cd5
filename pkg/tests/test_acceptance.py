"""Acceptance suite: one test per criterion, printed as pass/fail lines.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. Four sub-criteria encode stated targets that a faithful
implementation provably cannot meet; they are implemented exactly as
stated and fail honestly, with the analysis recorded in
notes/decisions.md (outside the package):

- 1b: the tabulated amplitude-keyed processing angles are not a rounding
      of the exact design; the six-level branch fidelity caps at 0.99950.
- 4b: the halving protocol needs n - 1 oracle queries, not the stated 2n
      (which also contradicts the stated single-query n = 2 base case).
- 6b: the minimum-accuracy curve has no exact mirror symmetry in the
      detuning; its odd part is ~1e-4 at 30 Hz, far above 1e-6.
- 7b: the Bayesian posterior after four unanimous outcomes is 0.9922,
      outside the stated [0.986, 0.990] band (which matches an arithmetic
      slip reproducible only with a phantom third wrong hypothesis).
"""

import math
import time

import numpy as np

from conftest import trotter_propagator
from spinkey import baselines, field_servo, ion_sim, protocols, qsp
from spinkey.protocols import DESIGN_ANGLES
from spinkey.spin_algebra import commutator, rotation, spin_operators

DESIGN = np.array(DESIGN_ANGLES)


def _report(tag, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {tag}: {detail}")
    assert ok, f"criterion {tag}: {detail}"


def test_criterion_01a_psk3_ideal_determinism():
    start = time.perf_counter()
    seq = protocols.psk3_sequence()
    values = [ion_sim.run(seq, i).probabilities[seq.readout_map[i]] for i in range(3)]
    elapsed = time.perf_counter() - start
    ok = all(v >= 0.9999 for v in values) and elapsed < 1.0
    _report("1a", ok,
            f"psk3 ideal branch probabilities {np.round(values, 7).tolist()} "
            f">= 0.9999 in {elapsed:.3f} s")


def test_criterion_01b_ask3_ideal_determinism_verbatim():
    """Stated bound >= 0.9999 with the verbatim table; the printed
    processing angles carry a solver offset (~0.005 rad, not a rounding
    artifact), capping two branches at 0.99950. The closed-form variant
    ask3_sequence(exact=True) reaches 1 - 1e-9 on every branch."""
    start = time.perf_counter()
    seq = protocols.ask3_sequence()
    values = [ion_sim.run(seq, i).probabilities[seq.readout_map[i]] for i in range(3)]
    exact = protocols.ask3_sequence(exact=True)
    exact_values = [ion_sim.run(exact, i).probabilities[exact.readout_map[i]]
                    for i in range(3)]
    elapsed = time.perf_counter() - start
    ok = all(v >= 0.9999 for v in values) and elapsed < 1.0
    _report("1b", ok,
            f"ask3 verbatim branch probabilities {np.round(values, 7).tolist()} "
            f"vs stated >= 0.9999 (closed-form variant reaches "
            f"{np.round(exact_values, 10).tolist()}); see notes/decisions.md")


def test_criterion_02_design_angle_identity_and_periodicity():
    rows = []
    for seq in (protocols.psk3_sequence(), protocols.ask3_sequence()):
        table = ion_sim.angle_scan(seq, DESIGN)
        rows.append(np.max(np.abs(table[:, 1:] - np.eye(3))))
    psk = protocols.psk3_sequence()
    grid = np.linspace(0.05, 2.9, 8)
    dev = np.max(np.abs(ion_sim.angle_scan(psk, grid)[:, 1:]
                        - ion_sim.angle_scan(psk, grid + np.pi)[:, 1:]))
    ok = max(rows) <= 1e-3 and dev <= 1e-8
    _report("2", ok,
            f"identity-matrix deviation psk3={rows[0]:.2e}, ask3={rows[1]:.2e} "
            f"(<= 1e-3); pi-periodicity deviation {dev:.2e} (<= 1e-8)")


def test_criterion_03_bisecting_polynomial():
    exact = (qsp.bisecting_poly(1.0) == 1.0
             and qsp.bisecting_poly(0.5) == 0.0
             and qsp.bisecting_poly(-0.5) == 0.0)
    phases = qsp.find_phases(qsp.PolynomialSpec.bisecting())
    point_errs = [abs(abs(qsp.qsp_unitary(phases, a)[0, 0]) ** 2 - t)
                  for a, t in ((1.0, 1.0), (0.5, 0.0), (-0.5, 0.0))]
    comp_err = 0.0
    for a in np.linspace(-1 + 1e-6, 1 - 1e-6, 101):
        p, q = qsp.polynomial_entries(phases, a)
        comp_err = max(comp_err, abs(abs(p) ** 2 + (1 - a * a) * abs(q) ** 2 - 1))
    ok = exact and max(point_errs) <= 1e-8 and comp_err <= 1e-10
    _report("3", ok,
            f"anchor values exact={exact}; |P|^2 target error {max(point_errs):.2e} "
            f"(<= 1e-8); completion identity error {comp_err:.2e} (<= 1e-10)")


def test_criterion_04a_bisection_certainty():
    start = time.perf_counter()
    worst = 0.0
    for n in (2, 4, 8):
        proto = protocols.bisection_protocol(n)
        for hidden in range(n):
            identified, _, margin = protocols.run_bisection(proto, hidden)
            assert identified == hidden
            worst = max(worst, margin)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    _report("4a", ok,
            f"every hidden index identified for n in (2,4,8); worst probability "
            f"margin {worst:.2e} (<= 1e-8) in {elapsed:.2f} s")


def test_criterion_04b_bisection_query_count():
    """Stated count: exactly 2n oracle queries. The Chebyshev stages need
    degree n/2, n/4, ..., 1, totalling n - 1; no stage accounting we could
    derive reproduces 2n, and the stated single-query n = 2 base case
    contradicts 2n = 4 directly."""
    counts = {n: protocols.bisection_protocol(n).total_queries for n in (2, 4, 8)}
    ok = all(counts[n] == 2 * n for n in counts)
    _report("4b", ok,
            f"query counts {counts} vs stated 2n = {{2: 4, 4: 8, 8: 16}}; "
            "construction uses n - 1 (see notes/decisions.md)")


def test_criterion_05_wrap_identity_and_disambiguation():
    worst = 0.0
    for dim in (2, 6):
        for phi in np.linspace(0.0, 2 * np.pi, 64, endpoint=False):
            wrapped = protocols.psk_to_ask_wrap(phi, dim)
            trace = abs(np.trace(wrapped.conj().T @ rotation(dim, 2 * phi, 0.0)))
            worst = max(worst, abs(trace - dim))
    step = protocols.even_psk_disambiguation((np.pi / 3, np.pi / 3 + np.pi))
    p_min = min(protocols.run_disambiguation(step, which)[1] for which in (0, 1))
    ok = worst <= 1e-10 and p_min >= 1 - 1e-9 and step.extra_queries == 1
    _report("5", ok,
            f"wrap-trace deviation {worst:.2e} (<= 1e-10) over 64 phases x dims 2,6; "
            f"disambiguation success {p_min:.12f} with exactly 1 extra query")


def test_criterion_06a_detuning_budget_threshold():
    seq = protocols.psk3_sequence()
    grid = np.array([-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0])
    table = ion_sim.detuning_scan(seq, grid)
    ok = bool(np.all(table[:, 1] >= 0.99))
    _report("6a", ok,
            f"psk3 min accuracy over |detuning| <= 30 Hz is "
            f"{table[:, 1].min():.6f} (>= 0.99) at 55 us pi-time")


def test_criterion_06b_detuning_curve_evenness():
    """Stated evenness to 1e-6. The pulse program has no symmetry mapping
    detuning to its negative, and the computed odd component of the
    minimum-accuracy curve is ~1e-4 at the 30 Hz budget edge."""
    seq = protocols.psk3_sequence()
    devs = []
    for delta in (10.0, 20.0, 30.0):
        table = ion_sim.detuning_scan(seq, np.array([-delta, delta]))
        devs.append(abs(table[0, 1] - table[1, 1]))
    ok = max(devs) <= 1e-6
    _report("6b", ok,
            f"min-accuracy evenness deviations {['%.2e' % d for d in devs]} at "
            f"10/20/30 Hz vs stated <= 1e-6 (see notes/decisions.md)")


def test_criterion_07a_baseline_values():
    start = time.perf_counter()
    triad = baselines.symmetric_states(3)
    me1 = baselines.me_single_shot(triad)
    maj4 = baselines.me_majority(triad, 4)
    ud1 = baselines.ud_success(triad)
    ud4 = baselines.ud_multi(triad, 4)
    elapsed = time.perf_counter() - start
    ok = (abs(me1 - 2 / 3) <= 1e-10
          and 0.73 <= maj4 <= 0.75
          and abs(ud1 - 0.5) <= 1e-12
          and abs(ud4 - 0.9375) <= 1e-12
          and elapsed < 5.0)
    _report("7a", ok,
            f"single-shot {me1:.12f} (2/3), majority-of-4 {maj4:.6f} "
            f"(in [0.73, 0.75]), UD {ud1:.12f} (1/2), 4-trial UD {ud4:.12f} "
            f"(0.9375) in {elapsed:.2f} s")


def test_criterion_07b_posterior_band():
    """Stated band [0.986, 0.990]. The minimum-error outcome probabilities
    (2/3 correct, 1/6 each wrong) force the unanimous-outcome posterior to
    (2/3)^4 / ((2/3)^4 + 2 (1/6)^4) = 0.99225; the stated band matches the
    value obtained only by counting three wrong hypotheses instead of two,
    which would also break the k = 1 consistency value of 2/3."""
    triad = baselines.symmetric_states(3)
    value = baselines.posterior_all_agree(triad, 4)
    ok = 0.986 <= value <= 0.990
    _report("7b", ok,
            f"posterior after four unanimous outcomes {value:.6f} vs stated "
            f"[0.986, 0.990] (see notes/decisions.md)")


def test_criterion_08_su6_algebra_and_rabi():
    ops = spin_operators(6)
    comm = max(
        float(np.max(np.abs(commutator(ops.jx, ops.jy) - 1j * ops.jz))),
        float(np.max(np.abs(commutator(ops.jy, ops.jz) - 1j * ops.jx))),
        float(np.max(np.abs(commutator(ops.jz, ops.jx) - 1j * ops.jy))),
    )
    full_turn = float(np.max(np.abs(rotation(6, 2 * np.pi, 0.0) + np.eye(6))))
    flip = rotation(6, np.pi, 0.0)
    anti = np.fliplr(np.eye(6)).astype(bool)
    antidiag = (np.max(np.abs(np.abs(flip[anti]) - 1)) < 1e-12
                and np.max(np.abs(flip[~anti])) < 1e-12)
    config = ion_sim.ExperimentConfig()
    _, pops = ion_sim.rabi_curve(np.array([config.pi_time]), start_level=4,
                                 config=config)
    transfer = float(pops[0, 1])
    ok = comm <= 1e-12 and full_turn <= 1e-12 and antidiag and transfer >= 1 - 1e-10
    _report("8", ok,
            f"commutator residual {comm:.2e} (<= 1e-12); 2pi rotation vs -1 "
            f"{full_turn:.2e}; flip anti-diagonal {antidiag}; 55 us transfer "
            f"{transfer:.12f} (>= 1 - 1e-10)")


def test_criterion_09_servo_and_allan():
    start = time.perf_counter()
    _, y_white = field_servo.DriftModel.white(1e-6).generate(4096, seed=1)
    taus = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0])
    sigma = field_servo.allan_deviation(y_white, taus)
    slope = float(np.polyfit(np.log(taus), np.log(sigma), 1)[0])

    _, y_preset = field_servo.DriftModel.lab().generate(4000, seed=3)
    sigma10 = float(field_servo.allan_deviation(y_preset, [10.0])[0])

    trace = field_servo.simulate_servo(field_servo.DriftModel.lab(),
                                       field_servo.ServoConfig.lab(), 600, seed=7)
    contained = float(np.mean(np.abs(trace.residual_hz) <= 30.0))
    budget = field_servo.detuning_error_budget(trace.residual_hz)
    elapsed = time.perf_counter() - start
    ok = (abs(slope + 0.5) <= 0.1 and sigma10 <= 2e-7 and contained >= 0.99
          and 0.001 <= budget <= 0.006 and elapsed < 60.0)
    _report("9", ok,
            f"white-FM slope {slope:.3f} (-0.5 +/- 0.1); preset sigma_y(10 s) "
            f"{sigma10:.2e} (<= 2e-7); residual containment {contained:.4f} "
            f"(>= 0.99); budget {budget * 100:.3f}% (in [0.1%, 0.6%]) "
            f"in {elapsed:.1f} s")


def test_criterion_10_oracle_equivalence():
    ops = spin_operators(6)
    config = ion_sim.ExperimentConfig()
    rng = np.random.default_rng(20)
    worst_trotter = 0.0
    for _ in range(20):
        theta = rng.uniform(0.05, 2 * math.pi)
        phi = rng.uniform(0.0, 2 * math.pi)
        delta = rng.uniform(-2000.0, 2000.0)
        u = ion_sim.rf_unitary(theta, phi, ion_sim.NoiseModel(detuning_hz=delta),
                               config)
        j_phi = math.cos(phi) * ops.jx + math.sin(phi) * ops.jy
        ref = trotter_propagator(2 * math.pi * delta * np.asarray(ops.jz),
                                 config.rabi_freq * np.asarray(j_phi),
                                 theta / config.rabi_freq)
        worst_trotter = max(worst_trotter, float(np.max(np.abs(u - ref))))

    seq = protocols.ask3_sequence(exact=True)
    worst_equiv = 0.0
    for index, angle in enumerate(DESIGN):
        two = ion_sim.run_qubit_reduction(seq, angle)
        six = ion_sim.run(seq, index).probabilities[:3]
        worst_equiv = max(worst_equiv, float(np.max(np.abs(two - six))))
    ok = worst_trotter <= 1e-8 and worst_equiv <= 1e-8
    _report("10", ok,
            f"20 detuned pulses vs 1e4-step Trotter: {worst_trotter:.2e} (<= 1e-8); "
            f"two-level vs six-level runs at design angles: {worst_equiv:.2e} "
            f"(<= 1e-8, exact-angle variant; the verbatim table agrees to 4e-4)")
