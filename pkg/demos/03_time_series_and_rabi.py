"""Population dynamics: the full pulse program and bare six-level Rabi flops.

First reconstructs the readout-state populations as a function of
evolution time through the phase-keyed program for each hidden channel
(the curves are piecewise smooth, with steps where the instantaneous
shelving pulses fire). Then shows generalized Rabi oscillations in the
six-level manifold: a resonant drive started in m = -3/2 moves all
population to m = +3/2 at the 55 us pi-time and back after twice that,
and a light shift on m = -1/2 pins the dynamics to the lowest two levels
once the drive is slow enough.
"""

import numpy as np

from spinkey import ion_sim, protocols

seq = protocols.psk3_sequence()
for index in range(3):
    table = ion_sim.time_series(seq, index, 161)
    final = table[-1, 1:]
    print(f"hidden {index}: final populations {np.round(final, 6)} "
          f"over {table[-1, 0] * 1e6:.0f} us")

config = ion_sim.ExperimentConfig()
times = np.linspace(0.0, 2 * config.pi_time, 221)
_, pops = ion_sim.rabi_curve(times, start_level=4, config=config)
i_pi = np.argmin(np.abs(times - config.pi_time))
print(f"\nrabi: population of m=+3/2 at the pi-time: {pops[i_pi, 1]:.9f}")
print(f"rabi: population of m=-3/2 after 2x pi-time: {pops[-1, 4]:.9f}")

slow = ion_sim.ExperimentConfig(rabi_freq=np.pi / 250e-6)
t_eff = np.pi / (slow.rabi_freq * 0.5 * np.sqrt(5.0))
shift_times = np.linspace(0.0, 2 * t_eff, 200)
_, isolated = ion_sim.light_shift_isolation(30e3, shift_times, config=slow)
leak = 1.0 - isolated[:, 5] - isolated[:, 4]
print(f"light shift 30 kHz at 250 us pi-time: max leakage out of the "
      f"isolated pair = {np.max(leak):.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping figures")
else:
    fig, axes = plt.subplots(2, 1, figsize=(7, 7))
    table = ion_sim.time_series(seq, 1, 321)
    for col, label in ((1, "state0"), (2, "state1"), (3, "state2")):
        axes[0].plot(table[:, 0] * 1e6, table[:, col], label=label)
    axes[0].set_title("phase-keyed program, hidden channel 1")
    axes[0].set_xlabel("time (us)")
    axes[0].set_ylabel("population")
    axes[0].legend()
    for level, label in ((4, "m=-3/2"), (1, "m=+3/2"), (3, "m=-1/2")):
        axes[1].plot(times * 1e6, pops[:, level], label=label)
    axes[1].set_title("six-level Rabi oscillation from m=-3/2")
    axes[1].set_xlabel("time (us)")
    axes[1].set_ylabel("population")
    axes[1].legend()
    fig.tight_layout()
    fig.savefig("demo03_dynamics.png", dpi=120)
    print("wrote demo03_dynamics.png")
