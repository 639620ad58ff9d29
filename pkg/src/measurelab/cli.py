"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 malformed or
inconsistent input. States on the command line are either diag:p1,p2,...
(diagonal weights), vec:a,b,... (vector amplitudes, i allowed for the
imaginary unit), or a path to a state JSON file.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import serialize
from .dilation import instrument_of, realize_instrument
from .instruments import instrument_distance, verify_axioms
from .report import Report
from .sampling import sample_histogram
from .scenarios import (build_projective_scenario, chi_ladder_report,
                        run_projective_check, tensor_power_report)
from .serialize import InputError
from .states import State, diagonal_state, vector_state


def _parse_state(text: str, expected_dim: int | None = None) -> State:
    try:
        if text.startswith("diag:"):
            vals = [float(x) for x in text[5:].split(",") if x.strip()]
            st = diagonal_state(vals)
        elif text.startswith("vec:"):
            vals = [complex(x.strip().replace("i", "j"))
                    for x in text[4:].split(",") if x.strip()]
            st = vector_state(np.array(vals, dtype=complex))
        else:
            st = serialize.state_from_json(serialize.read_json(text))
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot parse state {text!r}: {exc}") from exc
    if expected_dim is not None and st.dim != expected_dim:
        raise InputError(f"state has dimension {st.dim}, expected {expected_dim}")
    return st


def _print_report(rep: Report, stream=None) -> None:
    stream = stream or sys.stdout
    for c in rep.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: residual={c.residual:.3e} "
              f"tol={c.tolerance:.1e}", file=stream)
    for note in rep.notes:
        print(f"note: {note}", file=stream)


def _finish(rep: Report, out_path: str | None) -> int:
    _print_report(rep)
    if out_path:
        serialize.write_json(out_path, serialize.report_to_json(rep))
        print(f"report written to {out_path}")
    return 0 if rep.all_pass else 1


def _cmd_verify(args) -> int:
    payload = serialize.read_json(args.instrument)
    E = serialize.instrument_from_json(payload, validate=False)
    from .instruments import default_probe_states
    probes = default_probe_states(E.observed_dim, length=args.probes)
    rep = verify_axioms(E, probe_states=probes, tol=args.tol, seed=args.seed)
    return _finish(rep, args.out)


def _cmd_demo(args) -> int:
    if args.scenario == "projective":
        p = build_projective_scenario(args.k, args.levels, flavor=args.flavor,
                                      identity_interaction=args.identity_u)
        state = _parse_state(args.state, args.k) if args.state else None
        rep = run_projective_check(p, state=state, shots=args.shots,
                                   seed=args.seed)
        if args.hist:
            from .instruments import instrument_from_process
            inst = instrument_from_process(p)
            st = state
            if st is None:
                from ._linalg import random_density
                st = State(random_density(args.k, np.random.default_rng(args.seed)))
            hist = sample_histogram(inst.outcome_weights(st), args.shots,
                                    args.seed, labels=p.labels)
            serialize.write_histogram_csv(args.hist, hist)
            print(f"histogram written to {args.hist}")
    elif args.scenario == "chi":
        rep = chi_ladder_report(args.k, levels=args.levels)
    else:
        rep = tensor_power_report(args.k, n=args.levels, copies=args.copies)
    return _finish(rep, args.out)


def _cmd_dilate(args) -> int:
    payload = serialize.read_json(args.instrument)
    E = serialize.instrument_from_json(payload, validate=False)
    try:
        dil = realize_instrument(E, psd_tol=args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    dist = instrument_distance(E, instrument_of(dil))
    print(f"probe_dim={dil.probe_dim} kraus_rank={dil.kraus_rank} "
          f"round_trip_distance={dist:.3e}")
    if args.out:
        serialize.write_json(args.out, serialize.dilation_to_json(dil))
        print(f"dilation written to {args.out}")
    return 0 if dist <= args.tol else 1


def _cmd_sample(args) -> int:
    payload = serialize.read_json(args.instrument)
    E = serialize.instrument_from_json(payload, validate=True)
    state = _parse_state(args.state, E.observed_dim)
    try:
        hist = sample_histogram(E.outcome_weights(state), args.shots,
                                args.seed, labels=E.labels)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    text = serialize.histogram_csv(hist)
    if args.out:
        serialize.write_histogram_csv(args.out, hist)
        print(f"histogram written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="measurelab",
        description="Finite-truncation laboratory for instrument "
                    "measurement models")
    sub = ap.add_subparsers(dest="command", required=True)

    p_ver = sub.add_parser("verify", help="check instrument axioms")
    p_ver.add_argument("instrument", help="instrument JSON file")
    p_ver.add_argument("--probes", type=int, default=16,
                       help="number of probe states")
    p_ver.add_argument("--tol", type=float, default=1e-9)
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.add_argument("--out", help="write the report JSON here")
    p_ver.set_defaults(func=_cmd_verify)

    p_demo = sub.add_parser("demo", help="run a built-in scenario")
    p_demo.add_argument("scenario",
                        choices=["projective", "chi", "tensor-power"])
    p_demo.add_argument("--k", type=int, default=2,
                        help="site size / observed dimension")
    p_demo.add_argument("--levels", type=int, default=2,
                        help="truncation level (chi: top ladder level)")
    p_demo.add_argument("--flavor", choices=["natural", "generic"],
                        default="natural")
    p_demo.add_argument("--copies", type=int, default=2,
                        help="tensor-power copies")
    p_demo.add_argument("--state", help="observed-system state literal or file")
    p_demo.add_argument("--shots", type=int, default=100_000)
    p_demo.add_argument("--seed", type=int, default=42)
    p_demo.add_argument("--identity-U", dest="identity_u", action="store_true",
                        help="disable the interaction")
    p_demo.add_argument("--out", help="write the report JSON here")
    p_demo.add_argument("--hist", help="write sampled counts CSV here")
    p_demo.set_defaults(func=_cmd_demo)

    p_dil = sub.add_parser("dilate", help="realize an instrument by a "
                                          "probe-space measurement")
    p_dil.add_argument("instrument", help="instrument JSON file")
    p_dil.add_argument("--tol", type=float, default=1e-8,
                       help="PSD tolerance for the Choi blocks")
    p_dil.add_argument("--out", help="write the dilation JSON here")
    p_dil.set_defaults(func=_cmd_dilate)

    p_sam = sub.add_parser("sample", help="draw outcome counts")
    p_sam.add_argument("instrument", help="instrument JSON file")
    p_sam.add_argument("--state", required=True,
                       help="state literal (diag:/vec:) or JSON file")
    p_sam.add_argument("--shots", type=int, default=100_000)
    p_sam.add_argument("--seed", type=int, default=42)
    p_sam.add_argument("--out", help="write counts CSV here")
    p_sam.set_defaults(func=_cmd_sample)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
