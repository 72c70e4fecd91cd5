"""Frequency drift, the feed-forward servo, and the detuning error budget.

Generates the calibrated composite drift (white noise averaging down to
below 2e-7 at ten seconds, with a random walk taking over beyond that),
checks it with the overlapping Allan deviation, runs the five-hertz-step
Ramsey servo against it for ten minutes, and maps the residual detuning
distribution through the simulated accuracy curve of the phase-keyed
program to get the error the drive instability contributes per trial.
"""

import numpy as np

from spinkey import field_servo

drift = field_servo.DriftModel.lab()
servo = field_servo.ServoConfig.lab()

_, y = drift.generate(4000, seed=3)
taus = np.array([1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0])
sigma = field_servo.allan_deviation(y, taus)
print("unservoed Allan deviation:")
for tau, s in zip(taus, sigma):
    print(f"   tau = {tau:6.0f} s   sigma_y = {s:.3e}")

trace = field_servo.simulate_servo(drift, servo, 600, seed=7)
res = trace.residual_hz
print(f"\nservoed residual over 600 s: rms {np.sqrt(np.mean(res ** 2)):.1f} Hz, "
      f"|residual| <= 30 Hz for {100 * np.mean(np.abs(res) <= 30):.1f}% of samples")

budget = field_servo.detuning_error_budget(res)
print(f"implied per-trial inaccuracy: {budget * 100:.3f}%")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping figure")
else:
    fig, axes = plt.subplots(2, 1, figsize=(7, 7))
    axes[0].loglog(taus, sigma, "o-")
    axes[0].set_xlabel("averaging time (s)")
    axes[0].set_ylabel("sigma_y")
    axes[0].set_title("Allan deviation of the free-running resonance")
    axes[1].plot(trace.t, trace.true_freq_hz, label="resonance")
    axes[1].plot(trace.t, trace.applied_freq_hz, label="applied drive")
    axes[1].set_xlabel("time (s)")
    axes[1].set_ylabel("offset from nominal (Hz)")
    axes[1].set_title("feed-forward servo tracking")
    axes[1].legend()
    fig.tight_layout()
    fig.savefig("demo05_servo.png", dpi=120)
    print("wrote demo05_servo.png")
