"""Command-line front end. Data goes to stdout, diagnostics to stderr."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from .acceptance import run_all
from .circuit import CircuitParseError, CircuitSpec, builtin_circuit, parse_circuit, run_circuit, serialize
from .entanglement import FractionCurve, four_photon_fraction, witness_passes
from .fock import FockState, norm_sq
from .mismatch import MismatchScenario, line_channel, mismatch_output, mixed_circular_distribution
from .optics import merge_cascade
from .polarization import circular_distribution, linear_distribution
from .postselect import bottleneck_output, closed_form_probability

MAX_PHOTONS = 10
DEFAULT_PRECISION = 15
NOISE_FLOOR = 1e-15


class CliError(Exception):
    pass


def _precision() -> int:
    raw = os.environ.get("PBSIM_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        p = int(raw)
    except ValueError:
        raise CliError(f"PBSIM_PRECISION must be an integer, got {raw!r}")
    if not 1 <= p <= 17:
        raise CliError("PBSIM_PRECISION must be between 1 and 17")
    return p


def fmt(x: float) -> str:
    x = float(x)
    if abs(x) < NOISE_FLOOR:
        x = 0.0  # rounding residue, and no "-0"
    return format(x, f".{_precision()}g")


def _round(x: float) -> float:
    return float(fmt(x))


def _check_photons(n: int, force: bool) -> None:
    if n < 1:
        raise CliError("--photons must be at least 1")
    if n > MAX_PHOTONS and not force:
        raise CliError(f"{n} photons exceeds the cap of {MAX_PHOTONS}; pass --force to override")


def _load_circuit(path: str) -> CircuitSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}")
    try:
        return parse_circuit(text)
    except CircuitParseError as e:
        raise CliError(f"{path}:{e.line}:{e.column}: {e.message}")


def _state_and_channel(args) -> tuple[FockState, tuple[int, ...]]:
    if getattr(args, "circuit", None):
        spec = _load_circuit(args.circuit)
        _check_photons(spec.photon_number, args.force)
        s = run_circuit(spec)
        if s.is_zero():
            raise CliError("post-selection leaves an empty state")
        return s, spec.outputs or tuple(range(spec.n_spatial))
    _check_photons(args.photons, args.force)
    if getattr(args, "state", "cat") == "error":
        sc = MismatchScenario(args.photons, args.bad_port)
        return mismatch_output(sc), line_channel(sc)
    return bottleneck_output(args.photons, fast=True)[0], (0,)


def _write_rows(header, rows) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _state_json(s: FockState) -> dict:
    d = s.to_dict()
    for t in d["terms"]:
        t["re"], t["im"] = _round(t["re"]), _round(t["im"])
    return d


def cmd_simulate(args) -> int:
    if args.circuit:
        spec = _load_circuit(args.circuit)
        _check_photons(spec.photon_number, args.force)
        s = run_circuit(spec)
        u = spec.mode_map()
        out = {"photons": spec.photon_number, "probability": _round(norm_sq(s)), "outputs": list(spec.outputs)}
    else:
        _check_photons(args.photons, args.force)
        s, p = bottleneck_output(args.photons, fast=True)
        u = merge_cascade(args.photons)
        out = {
            "photons": args.photons,
            "probability": _round(p),
            "closed_form_probability": _round(closed_form_probability(args.photons)),
            "outputs": [0],
        }
    if args.dump_state:
        out["state"] = _state_json(s)
    if args.dump_unitary:
        d = u.to_dict()
        d["matrix"] = [[[_round(re), _round(im)] for re, im in row] for row in d["matrix"]]
        out["unitary"] = d
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _distribution_rows(s, channel, basis, phi):
    if basis == "circular":
        d = circular_distribution(s, channel)
        return [("circular", "", dn, fmt(d[dn])) for dn in d.support()]
    d = linear_distribution(s, phi, channel)
    return [("linear", fmt(phi), dn, fmt(d[dn])) for dn in d.support()]


def cmd_stats(args) -> int:
    s, channel = _state_and_channel(args)
    _write_rows(("basis", "phi", "delta_n", "probability"), _distribution_rows(s, channel, args.basis, args.phi))
    return 0


def cmd_sweep(args) -> int:
    if args.phi_steps < 1:
        raise CliError("--phi-steps must be positive")
    s, channel = _state_and_channel(args)
    rows = []
    for j in range(args.phi_steps):
        rows.extend(_distribution_rows(s, channel, "linear", j * math.pi / args.phi_steps))
    _write_rows(("basis", "phi", "delta_n", "probability"), rows)
    return 0


def cmd_error(args) -> int:
    _check_photons(args.photons, args.force)
    if not 0 <= args.epsilon <= 1:
        raise CliError("--epsilon must be in [0, 1]")
    if not 0 <= args.bad_port < args.photons:
        raise CliError(f"--bad-port must be in 0..{args.photons - 1}")
    weights, total = mixed_circular_distribution(args.epsilon, args.photons, args.bad_port)
    rows = [(dn, fmt(w), fmt(w / total)) for dn, w in weights.items()]
    _write_rows(("delta_n", "weight", "probability"), rows)
    return 0


def cmd_ghz(args) -> int:
    _check_photons(args.photons, args.force)
    if not 0 <= args.epsilon <= 1:
        raise CliError("--epsilon must be in [0, 1]")
    if args.curve_steps < 1:
        raise CliError("--curve-steps must be positive")
    curve = FractionCurve.simulate(args.photons, args.bad_port)

    def row(kind, eps):
        f = curve.exact(eps)
        closed = fmt(four_photon_fraction(eps)) if args.photons == 4 else ""
        verdict = "pass" if witness_passes(f) else "fail"
        return (kind, fmt(eps), fmt(f), fmt(curve.first_order(eps)), closed, verdict)

    rows = [row("point", args.epsilon)]
    rows += [row("curve", k / args.curve_steps) for k in range(args.curve_steps + 1)]
    _write_rows(("kind", "epsilon", "fraction", "first_order", "closed_form", "witness"), rows)
    return 0


def cmd_validate(args) -> int:
    results = run_all()
    for r in results:
        print(r.line())
        if args.verbose or not r.passed:
            for d in r.details:
                print("    " + d)
    return 0 if all(r.passed for r in results) else 1


def cmd_circuit(args) -> int:
    _check_photons(args.photons, True)
    sys.stdout.write(serialize(builtin_circuit(args.kind, args.photons)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pbsim", description="Photon-bottleneck polarization simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_source(p, state_choice=False):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--photons", "-n", type=int, default=4, help="photon count for the builtin setup")
        g.add_argument("--circuit", help="circuit description file")
        p.add_argument("--force", action="store_true", help=f"allow more than {MAX_PHOTONS} photons")
        if state_choice:
            p.add_argument("--state", choices=("cat", "error"), default="cat")
            p.add_argument("--bad-port", type=int, default=0)

    p = sub.add_parser("simulate", help="run the merge pipeline, print JSON")
    add_source(p)
    p.add_argument("--dump-state", action="store_true")
    p.add_argument("--dump-unitary", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", help="polarization distribution as CSV")
    add_source(p, state_choice=True)
    p.add_argument("--basis", choices=("circular", "linear"), default="circular")
    p.add_argument("--phi", type=float, default=0.0, help="linear basis angle in radians")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="linear statistics over phi in [0, pi)")
    add_source(p, state_choice=True)
    p.add_argument("--phi-steps", type=int, default=64)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("error", help="circular statistics of an epsilon mismatch mixture")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--bad-port", type=int, default=0)
    p.add_argument("--photons", "-n", type=int, default=4)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("ghz", help="GHZ fraction and witness verdict")
    p.add_argument("--photons", "-n", type=int, default=4)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--bad-port", type=int, default=0)
    p.add_argument("--curve-steps", type=int, default=10)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--verbose", "-v", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("circuit", help="print a builtin circuit description")
    p.add_argument("kind", choices=("merge", "ghz"))
    p.add_argument("--photons", "-n", type=int, default=4)
    p.set_defaults(func=cmd_circuit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"pbsim: error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"pbsim: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
