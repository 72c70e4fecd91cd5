"""Command-line surface: seeded, reproducible runs emitting CSV or JSON.

Every command writes a metadata header (command, version, seed, config
hash) followed by tabular data; identical invocations produce byte-identical
output. Subcommands: run, scan, bisect, baselines, servo, rabi.
"""

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__, baselines, field_servo, ion_sim, protocols


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _config_hash(params):
    payload = json.dumps(params, sort_keys=True, default=str)
    return hashlib.sha1(payload.encode()).hexdigest()[:12]


def _strip_io_flags(argv):
    """Drop output-destination flags so metadata describes the computation."""
    skip_next = False
    kept = []
    for token in argv:
        if skip_next:
            skip_next = False
            continue
        if token in ("--out", "--allan-out"):
            skip_next = True
            continue
        if token.startswith(("--out=", "--allan-out=")) or token == "--gnuplot":
            continue
        kept.append(token)
    return kept


def _meta(args, params):
    return {
        "command": "spinkey " + " ".join(_strip_io_flags(args._raw_argv)),
        "version": __version__,
        "seed": params.get("seed"),
        "config": _config_hash(params),
    }


def _emit(args, params, columns, rows, extra_meta=None):
    meta = _meta(args, params)
    meta.update(extra_meta or {})
    if args.format == "json":
        payload = {"meta": meta, "columns": list(columns),
                   "rows": [list(row) for row in rows]}
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        lines = [f"# {k}: {v}" for k, v in meta.items()]
        lines.append(",".join(columns))
        lines += [",".join(_fmt(x) for x in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        if getattr(args, "gnuplot", False):
            _write_gnuplot(args.out, columns)
    else:
        sys.stdout.write(text)


def _write_gnuplot(out_path, columns):
    gp_path = out_path + ".gp"
    plots = ", ".join(
        f"'{out_path}' using 1:{i + 2} with lines title '{c}'"
        for i, c in enumerate(columns[1:])
    )
    with open(gp_path, "w", newline="") as fh:
        fh.write(f"set datafile separator ','\nset xlabel '{columns[0]}'\nplot {plots}\n")


def _load_sequence(args):
    if args.seq_file:
        try:
            with open(args.seq_file) as fh:
                text = fh.read()
            return protocols.PulseSequence.from_json(text)
        except json.JSONDecodeError as err:
            raise RuntimeError(
                f"cannot parse sequence file {args.seq_file}: {err.msg} "
                f"at line {err.lineno}, column {err.colno}"
            ) from err
    builders = {
        "psk3": protocols.psk3_sequence,
        "ask3": protocols.ask3_sequence,
        "ask3-exact": lambda: protocols.ask3_sequence(exact=True),
    }
    if args.seq not in builders:
        raise RuntimeError(f"unknown sequence {args.seq!r}; expected one of {sorted(builders)}")
    return builders[args.seq]()


def _with_overrides(args, **kw):
    ns = argparse.Namespace(**vars(args))
    for k, v in kw.items():
        setattr(ns, k, v)
    return ns


def _noise_from(args):
    return ion_sim.NoiseModel(
        detuning_hz=args.detuning_hz,
        rf_amp_error=args.rf_amp_error,
        laser_pi_error=args.laser_pi_error,
        spam_error=args.spam_error,
        leakage_rate=args.leakage_rate,
    )


def _add_common(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--gnuplot", action="store_true",
                   help="also write a companion gnuplot script next to --out")
    p.add_argument("--seed", type=int, default=0)


def _add_noise(p):
    p.add_argument("--detuning-hz", type=float, default=0.0)
    p.add_argument("--rf-amp-error", type=float, default=0.0)
    p.add_argument("--laser-pi-error", type=float, default=0.0)
    p.add_argument("--spam-error", type=float, default=0.0)
    p.add_argument("--leakage-rate", type=float, default=0.0)


def _add_seq(p):
    p.add_argument("--seq", default="psk3", help="psk3, ask3, or ask3-exact")
    p.add_argument("--seq-file", help="JSON pulse sequence file")


def _cmd_run(args):
    seq = _load_sequence(args)
    noise = _noise_from(args)
    params = {"cmd": "run", "seq": seq.name, "oracle": args.oracle,
              "noise": {f: getattr(noise, f) for f in noise.__dataclass_fields__},
              "seed": args.seed}
    result = ion_sim.run(seq, args.oracle, noise,
                         seed=args.seed if args.sample else None)
    rows = [(label, float(p)) for label, p in
            zip(("state0", "state1", "state2", "leakage"), result.probabilities)]
    extra = {}
    if args.sample:
        extra["sampled_outcome"] = result.outcome
    _emit(args, params, ("state", "probability"), rows, extra)
    return 0


def _cmd_scan(args):
    seq = _load_sequence(args)
    noise = _noise_from(args)
    params = {"cmd": f"scan-{args.kind}", "seq": seq.name, "seed": args.seed,
              "points": args.points, "start": args.start, "stop": args.stop}
    if args.points < 1:
        raise RuntimeError("scan needs at least one grid point")
    extra = {}
    if args.kind == "angle":
        grid = np.linspace(args.start, args.stop, args.points)
        table = ion_sim.angle_scan(seq, grid, noise=noise, dim=args.dim)
        columns = ("angle_rad", "p_state0", "p_state1", "p_state2")
        if args.check_period and seq.encoding == protocols.PSK:
            shifted = ion_sim.angle_scan(seq, grid + np.pi, noise=noise, dim=args.dim)
            extra["pi_period_max_dev"] = float(np.max(np.abs(table[:, 1:] - shifted[:, 1:])))
    elif args.kind == "detuning":
        grid = np.linspace(args.start, args.stop, args.points)
        table = ion_sim.detuning_scan(seq, grid, noise=noise)
        columns = ("detuning_hz", "min_accuracy")
    else:
        table = ion_sim.time_series(seq, args.oracle, args.points, noise=noise)
        columns = ("time_s", "p_state0", "p_state1", "p_state2")
    _emit(args, params, columns, [tuple(map(float, row)) for row in table], extra)
    return 0


def _cmd_bisect(args):
    proto = protocols.bisection_protocol(args.n)
    params = {"cmd": "bisect", "n": args.n, "seed": args.seed}
    rows = [(s.stage, s.subset_size, s.qsp_degree, float(s.offset)) for s in proto.stages]
    extra = {"total_queries": proto.total_queries}
    summary = None
    if args.verify:
        perfect = True
        for hidden in range(args.n):
            identified, _, worst = protocols.run_bisection(proto, hidden)
            perfect = perfect and identified == hidden and worst < 1e-8
        extra["perfect"] = "true" if perfect else "false"
        summary = f"queries={proto.total_queries}, perfect={extra['perfect']}"
    _emit(args, params, ("stage", "subset_size", "qsp_degree", "offset_rad"), rows, extra)
    if summary is not None:
        print(summary)
    return 0


def _cmd_baselines(args):
    params = {"cmd": "baselines", "accuracy": args.accuracy, "seed": args.seed}
    report = baselines.advantage_report(args.accuracy)
    rows = [(r["strategy"], float(r["success_probability"]),
             "" if r["beaten"] is None else str(r["beaten"]).lower())
            for r in report]
    _emit(args, params, ("strategy", "success_probability", "beaten"), rows)
    return 0


def _cmd_servo(args):
    if args.preset == "lab":
        drift = field_servo.DriftModel.lab()
        servo = field_servo.ServoConfig.lab()
    else:
        drift = field_servo.DriftModel(white_sigma1=args.white_sigma1,
                                       rw_sigma10=args.rw_sigma10)
        servo = field_servo.ServoConfig(miscalibration_hz=args.miscal_hz,
                                        shots=args.shots)
    params = {"cmd": "servo", "preset": args.preset, "duration": args.duration,
              "seed": args.seed}
    trace = field_servo.simulate_servo(drift, servo, args.duration, seed=args.seed)
    rows = list(zip(map(float, trace.t), map(float, trace.true_freq_hz),
                    map(float, trace.applied_freq_hz), map(float, trace.residual_hz)))
    _emit(args, params, ("t_s", "true_freq_hz", "applied_freq_hz", "residual_hz"), rows)
    if args.allan_out:
        y = trace.true_freq_hz / drift.carrier_hz
        n = len(y)
        taus = [float(m) for m in (1, 2, 5, 10, 20, 50, 100, 200) if 2 * m <= n]
        sigma = field_servo.allan_deviation(y, taus, dt=servo.period_s)
        allan_args = _with_overrides(args, out=args.allan_out, gnuplot=False)
        _emit(allan_args, {**params, "cmd": "servo-allan"}, ("tau_s", "sigma_y"),
              list(zip(taus, map(float, sigma))))
    return 0


def _cmd_rabi(args):
    params = {"cmd": "rabi", "start_level": args.start_level,
              "t_max": args.t_max, "points": args.points, "seed": args.seed}
    times = np.linspace(0.0, args.t_max, args.points)
    t, pops = ion_sim.rabi_curve(times, args.start_level)
    columns = ("time_s",) + tuple(f"p_m{m}" for m in ("+5/2", "+3/2", "+1/2", "-1/2", "-3/2", "-5/2"))
    rows = [tuple([float(ti)] + [float(x) for x in row]) for ti, row in zip(t, pops)]
    _emit(args, params, columns, rows)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinkey",
        description="Simulate keyed-rotation channel discrimination on a single ion.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one discrimination sequence")
    _add_seq(p)
    p.add_argument("--oracle", type=int, required=True, help="hidden candidate index")
    p.add_argument("--sample", action="store_true", help="also draw one readout outcome")
    _add_noise(p)
    _add_common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("scan", help="sweep an angle, detuning, or time grid")
    p.add_argument("kind", choices=("angle", "detuning", "time"))
    _add_seq(p)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=2.0 * np.pi)
    p.add_argument("--oracle", type=int, default=0, help="oracle index for time scans")
    p.add_argument("--dim", type=int, choices=(2, 6), default=6)
    p.add_argument("--check-period", action="store_true",
                   help="report the pi-periodicity deviation of a phase-keyed scan")
    _add_noise(p)
    _add_common(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("bisect", help="build and verify a halving protocol")
    p.add_argument("--n", type=int, required=True, help="candidate count (power of two)")
    p.add_argument("--verify", action="store_true",
                   help="simulate every hidden index and print a summary line")
    _add_common(p)
    p.set_defaults(func=_cmd_bisect)

    p = sub.add_parser("baselines", help="tabulate incoherent strategies")
    p.add_argument("--accuracy", type=float, required=True,
                   help="measured accuracy to compare against")
    _add_common(p)
    p.set_defaults(func=_cmd_baselines)

    p = sub.add_parser("servo", help="simulate the frequency feed-forward loop")
    p.add_argument("--preset", choices=("lab", "custom"), default="lab")
    p.add_argument("--duration", type=float, default=600.0)
    p.add_argument("--white-sigma1", type=float, default=0.0)
    p.add_argument("--rw-sigma10", type=float, default=0.0)
    p.add_argument("--miscal-hz", type=float, default=0.0)
    p.add_argument("--shots", type=int, default=50)
    p.add_argument("--allan-out", help="also write an Allan-deviation table here")
    _add_common(p)
    p.set_defaults(func=_cmd_servo)

    p = sub.add_parser("rabi", help="six-level Rabi oscillation curve")
    p.add_argument("--start-level", type=int, default=4,
                   help="initial sublevel index, 0 (m=+5/2) to 5 (m=-5/2)")
    p.add_argument("--t-max", type=float, default=220e-6)
    p.add_argument("--points", type=int, default=221)
    _add_common(p)
    p.set_defaults(func=_cmd_rabi)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._raw_argv = argv
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
