"""Command-line frontend over the schedule file formats.

Machine-readable results go to stdout; diagnostics and progress go to
stderr.  Exit codes: 0 success, 1 verification failure (bound violated or
convergence ratios out of range), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, compiler, serialization, simulator
from .errors import ChromlcError
from .hamiltonian import HamiltonianSchedule, generate, integrated_chromatic_index

_GENERATOR_PARAMS = {
    "chain": ("n", "t_total", "coupling"),
    "disjoint_pairs": ("n", "t_total", "coupling"),
    "complete_mean_field": ("n", "t_total", "coupling"),
    "random_graph": ("n", "t_total", "coupling", "p", "seed", "segments"),
    "random_time_varying": ("n", "t_total", "coupling", "p", "seed", "degree"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromlc",
        description="Compile pair-interaction Hamiltonian schedules into parallel "
        "two-qubit gate schedules and verify the chromatic-index accounting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a schedule from a named generator")
    p.add_argument("kind", choices=sorted(_GENERATOR_PARAMS))
    p.add_argument("--n", type=int, required=True, help="number of qubits")
    p.add_argument("--t", type=float, default=1.0, help="total time (default 1.0)")
    p.add_argument("--coupling", type=float, default=1.0, help="pair norm (default 1.0)")
    p.add_argument("--p", type=float, default=0.5, help="edge probability (random kinds)")
    p.add_argument("--segments", type=int, default=1, help="segment count (random_graph)")
    p.add_argument("--degree", type=int, default=2, help="polynomial degree (random_time_varying)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="output path (default stdout)")

    p = sub.add_parser("index", help="print W(t) samples and the integrated index")
    p.add_argument("schedule")
    p.add_argument("--samples", type=int, default=64, help="samples per segment")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("compile", help="compile a schedule into gate steps")
    p.add_argument("schedule")
    p.add_argument("--epsilon", type=float, required=True, help="subinterval length")
    p.add_argument("-o", "--output", help="gate file path (default stdout)")
    p.add_argument("--report", help="write compilation diagnostics to this JSON file")

    p = sub.add_parser("simulate", help="run a gate or Hamiltonian schedule on a state")
    p.add_argument("input", help="schedule or gate document")
    p.add_argument("--state", default="basis:0", help="basis:K or a product-state file")
    p.add_argument("--observable", choices=("x", "y", "z"), default="z")
    p.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify", help="run a verification study")
    vsub = p.add_subparsers(dest="study", required=True)

    v = vsub.add_parser("theorem1", help="compiled-unitary and weighted-depth convergence")
    v.add_argument("schedule")
    v.add_argument("--epsilons", required=True, help="comma-separated, strictly decreasing")
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--format", choices=("csv", "json"), default="csv")

    v = vsub.add_parser("variance", help="mean-field variance bound sweep")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--alpha", type=float, required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("trotter", help="sequential baseline vs parallel compilation")
    p.add_argument("schedule")
    p.add_argument("--m-list", required=True, help="comma-separated slice counts")
    p.add_argument("--epsilons", default="", help="comma-separated compile epsilons")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    return parser


def _float_list(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def _write_text(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_state(spec: str, n_qubits: int) -> simulator.StateVector:
    if spec.startswith("basis:"):
        return simulator.StateVector.basis(n_qubits, int(spec.split(":", 1)[1]))
    with open(spec, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "chromlc-product" or doc.get("version") != 1:
        raise ChromlcError(f"{spec}: expected a chromlc-product version 1 document")
    qubits = doc.get("qubits")
    if not isinstance(qubits, list) or len(qubits) != n_qubits:
        raise ChromlcError(f"{spec}: expected {n_qubits} per-qubit states")
    vectors = [np.array([complex(a[0], a[1]) for a in q]) for q in qubits]
    return simulator.ProductState.pure(vectors).branches()[0][1]


def _cmd_generate(args) -> int:
    params = {"n": args.n, "t_total": args.t, "coupling": args.coupling,
              "p": args.p, "seed": args.seed, "segments": args.segments,
              "degree": args.degree}
    allowed = _GENERATOR_PARAMS[args.kind]
    schedule = generate(args.kind, **{k: v for k, v in params.items() if k in allowed})
    _write_text(serialization.dumps_schedule(schedule), args.output)
    if args.output:
        print(f"wrote {args.kind} schedule to {args.output}", file=sys.stderr)
    return 0


def _cmd_index(args) -> int:
    schedule = serialization.load_schedule(args.schedule)
    profile = integrated_chromatic_index(schedule, samples_per_segment=args.samples)
    if args.format == "json":
        doc = {
            "study": "index",
            "params": {"schedule": args.schedule, "samples": args.samples},
            "I": profile.integral,
            "error_estimate": profile.error_estimate,
            "samples": [
                {"t": float(t), "W": float(w)} for t, w in zip(profile.times, profile.values)
            ],
        }
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(f"I = {profile.integral!r} (error estimate {profile.error_estimate!r})\n")
        sys.stdout.write("t,W\n")
        for t, w in zip(profile.times, profile.values):
            sys.stdout.write(f"{float(t)!r},{float(w)!r}\n")
    return 0


def _cmd_compile(args) -> int:
    schedule = serialization.load_schedule(args.schedule)
    gates, report = compiler.compile(schedule, args.epsilon)
    _write_text(serialization.dumps_gates(gates), args.output)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(report.to_dict(), indent=2) + "\n")
    print(
        f"compiled {report.n_steps} steps, weighted depth {report.weighted_depth!r}, "
        f"source integrated index {report.source_integrated_index!r}",
        file=sys.stderr,
    )
    return 0


def _cmd_simulate(args) -> int:
    doc = serialization.load_document(args.input)
    psi = _load_state(args.state, doc.n_qubits)
    if isinstance(doc, HamiltonianSchedule):
        out = simulator.evolve_continuous(psi, doc, args.tol)
    else:
        out = simulator.run_schedule(psi, doc)
    obs = simulator.MeanFieldObservable.pauli(doc.n_qubits, args.observable)
    m1, m2 = simulator._moments(out, obs)
    amp = out.amplitudes
    probs = np.abs(amp) ** 2
    top = sorted(range(len(amp)), key=lambda i: (-probs[i], i))[:16]
    rows = [
        {
            "index": int(i),
            "bitstring": format(i, f"0{doc.n_qubits}b"),
            "re": float(amp[i].real),
            "im": float(amp[i].imag),
            "probability": float(probs[i]),
        }
        for i in top
    ]
    if args.format == "json":
        doc_out = {
            "n_qubits": doc.n_qubits,
            "norm": out.norm(),
            "observable": args.observable,
            "expectation": m1,
            "variance": m2 - m1 * m1,
            "amplitudes": rows,
        }
        sys.stdout.write(json.dumps(doc_out, indent=2) + "\n")
    else:
        sys.stdout.write(f"n_qubits,{doc.n_qubits}\n")
        sys.stdout.write(f"norm,{out.norm()!r}\n")
        sys.stdout.write(f"observable,{args.observable}\n")
        sys.stdout.write(f"expectation,{m1!r}\n")
        sys.stdout.write(f"variance,{m2 - m1 * m1!r}\n")
        sys.stdout.write("index,bitstring,re,im,probability\n")
        for row in rows:
            sys.stdout.write(
                f"{row['index']},{row['bitstring']},{row['re']!r},{row['im']!r},{row['probability']!r}\n"
            )
    return 0


def _cmd_verify_theorem1(args) -> int:
    schedule = serialization.load_schedule(args.schedule)
    epsilons = _float_list(args.epsilons)
    rows = analysis.convergence_study(schedule, epsilons, tol=args.tol)
    problems = analysis.check_convergence(rows)
    if schedule.is_piecewise_constant:
        for row in rows:
            if row.depth_gap > 1e-9:
                problems.append(
                    f"weighted depth misses the integrated index by {row.depth_gap:.3e} "
                    f"at eps {row.epsilon} on a piecewise-constant schedule"
                )
    if args.format == "json":
        sys.stdout.write(
            analysis.summary_json(
                "theorem1",
                {"schedule": args.schedule, "epsilons": epsilons, "tol": args.tol},
                rows,
            )
        )
    else:
        sys.stdout.write(analysis.rows_to_csv(rows))
    for problem in problems:
        print(f"FAIL: {problem}", file=sys.stderr)
    if not problems:
        print("convergence check passed", file=sys.stderr)
    return 1 if problems else 0


def _cmd_verify_variance(args) -> int:
    records = analysis.variance_bound_experiment(
        args.n, args.alpha, args.trials, seed=args.seed, tol=args.tol
    )
    if args.format == "json":
        sys.stdout.write(
            analysis.summary_json(
                "variance",
                {"n": args.n, "alpha": args.alpha, "trials": args.trials, "seed": args.seed},
                records,
            )
        )
    else:
        sys.stdout.write(analysis.rows_to_csv(records))
    violations = [r for r in records if r.slack < 0]
    for record in violations:
        print(
            f"FAIL: trial {record.seed} variance {record.variance!r} exceeds bound {record.bound!r}",
            file=sys.stderr,
        )
    if not violations:
        print(f"all {len(records)} trials satisfy the bound", file=sys.stderr)
    return 1 if violations else 0


def _cmd_trotter(args) -> int:
    schedule = serialization.load_schedule(args.schedule)
    rows = analysis.trotter_comparison(
        schedule, _int_list(args.m_list), _float_list(args.epsilons), tol=args.tol
    )
    if args.format == "json":
        sys.stdout.write(
            analysis.summary_json(
                "trotter",
                {"schedule": args.schedule, "m_list": _int_list(args.m_list)},
                rows,
            )
        )
    else:
        sys.stdout.write(analysis.rows_to_csv(rows))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own diagnostics
        return int(exc.code or 0)
    handlers = {
        "generate": _cmd_generate,
        "index": _cmd_index,
        "compile": _cmd_compile,
        "simulate": _cmd_simulate,
        "trotter": _cmd_trotter,
    }
    try:
        if args.command == "verify":
            if args.study == "theorem1":
                return _cmd_verify_theorem1(args)
            return _cmd_verify_variance(args)
        return handlers[args.command](args)
    except ChromlcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
