"""spinkey: single-ion simulation of keyed-rotation channel discrimination.

A numpy/scipy library that simulates single-shot discrimination of
phase-keyed (PSK) and amplitude-keyed (ASK) rotation channels on a
spin-5/2 processing manifold with two ground shelving levels, together
with the supporting machinery: spin algebra, signal-processing phase
finding, noise and detuning budgets, a frequency feed-forward servo, and
incoherent measurement baselines.
"""

__version__ = "0.1.0"

from . import baselines, field_servo, ion_sim  # noqa: F401  (submodule access)
from .spin_algebra import (
    SpinOperators,
    spin_operators,
    rotation,
    rotation_z,
    hermitian_propagator,
)
from .qsp import (
    signal_w,
    qsp_unitary,
    bisecting_poly,
    PolynomialSpec,
    find_phases,
    response_curve,
    PhaseFindingError,
)
from .protocols import (
    Pulse,
    PulseSequence,
    OracleSpec,
    psk3_sequence,
    ask3_sequence,
    psk_to_ask_wrap,
    bisection_protocol,
    run_bisection,
    even_psk_disambiguation,
    run_disambiguation,
    query_count,
    DESIGN_ANGLES,
)
