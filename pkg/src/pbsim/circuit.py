"""Line-oriented circuit description format.

Example (the four-photon merge setup)::

    format 1
    modes 4
    source 0 linear 0deg
    source 1 linear 45deg
    source 2 linear 90deg
    source 3 linear 135deg
    bs 1 0 R=1/2
    bs 2 0 R=1/3
    bs 3 0 R=1/4
    detect 1 zero
    detect 2 zero
    detect 3 zero
    output 0

``bs <port_in> <port_line> R=<p>/<q>`` couples ``port_in`` onto the line
port with reflectivity p/q. Elements are applied in file order. ``#``
starts a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fock import FockState, ModeId, Pol, ProductPhotonState
from .optics import BeamSplitter, ModeMap, apply_mode_map, linear_photon, network_map
from .postselect import Constraint, PostSelectionRule, project_product

FORMAT_VERSION = 1

_INT = re.compile(r"[0-9]+\Z")
_ANGLE = re.compile(r"([+-]?[0-9]+(?:\.[0-9]+)?)(?:/([0-9]+))?deg\Z")
_REFL = re.compile(r"R=([0-9]+(?:\.[0-9]+)?)(?:/([0-9]+))?\Z")
_FLOAT = re.compile(r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?\Z")
_TOKEN = re.compile(r"\S+")


class CircuitParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, col {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Source:
    """Single-photon source. Exactly one of ``angle_deg`` / ``amps`` is set;
    ``amps`` is (re_R, im_R, re_L, im_L) and is used as given."""

    port: int
    angle_deg: Fraction | None = None
    amps: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if (self.angle_deg is None) == (self.amps is None):
            raise ValueError("source needs exactly one of angle_deg or amps")
        if self.amps is not None:
            if len(self.amps) != 4 or not all(math.isfinite(a) for a in self.amps):
                raise ValueError("amps must be four finite numbers")
            if not any(self.amps):
                raise ValueError("source amplitudes are all zero")

    def photon(self) -> dict[ModeId, complex]:
        if self.angle_deg is not None:
            return linear_photon(self.port, math.radians(float(self.angle_deg)))
        rr, ri, lr, li = self.amps
        vec = {ModeId(self.port, Pol.R): complex(rr, ri), ModeId(self.port, Pol.L): complex(lr, li)}
        return {m: c for m, c in vec.items() if c != 0}


@dataclass(frozen=True)
class CircuitSpec:
    n_spatial: int
    sources: tuple[Source, ...] = ()
    elements: tuple[BeamSplitter, ...] = ()
    rules: tuple[tuple[int, Constraint], ...] = ()
    outputs: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_spatial < 1:
            raise ValueError("circuit needs at least one mode")
        object.__setattr__(self, "sources", tuple(sorted(self.sources, key=lambda s: s.port)))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "rules", tuple(sorted((int(p), Constraint(c)) for p, c in self.rules)))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        ports = (
            [s.port for s in self.sources]
            + [p for bs in self.elements for p in (bs.port_a, bs.port_b)]
            + [p for p, _ in self.rules]
            + list(self.outputs)
        )
        bad = [p for p in ports if not 0 <= p < self.n_spatial]
        if bad:
            raise ValueError(f"port {bad[0]} out of range for {self.n_spatial} modes")
        if any(c is Constraint.ANY for _, c in self.rules):
            raise ValueError("circuit detectors are zero or one")
        src = [s.port for s in self.sources]
        if len(set(src)) != len(src):
            raise ValueError("duplicate source port")

    @property
    def photon_number(self) -> int:
        return len(self.sources)

    def input_state(self) -> ProductPhotonState:
        return ProductPhotonState(tuple(s.photon() for s in self.sources))

    def mode_map(self) -> ModeMap:
        return network_map(self.elements, self.n_spatial)

    def rule(self) -> PostSelectionRule | None:
        return PostSelectionRule(dict(self.rules)) if self.rules else None


def run_circuit(spec: CircuitSpec) -> FockState:
    """Propagate the sources and apply the detector conditions (unnormalized)."""
    p = apply_mode_map(spec.input_state(), spec.mode_map())
    rule = spec.rule() or PostSelectionRule({0: Constraint.ANY})
    return project_product(p, rule)


def _parse_port(tok: str, col: int, lineno: int, n: int | None) -> int:
    if not _INT.match(tok):
        raise CircuitParseError(f"expected a port number, got {tok!r}", lineno, col)
    p = int(tok)
    if n is not None and p >= n:
        raise CircuitParseError(f"port {p} out of range (modes {n})", lineno, col)
    return p


def _parse_angle(tok: str, col: int, lineno: int) -> Fraction:
    m = _ANGLE.match(tok)
    if not m:
        raise CircuitParseError(f"malformed angle {tok!r} (expected e.g. 45deg or 180/7deg)", lineno, col)
    num = Fraction(m.group(1))
    if m.group(2) is not None:
        den = int(m.group(2))
        if den == 0:
            raise CircuitParseError(f"malformed angle {tok!r}: zero denominator", lineno, col)
        num /= den
    return num


def _parse_reflectivity(tok: str, col: int, lineno: int) -> Fraction:
    m = _REFL.match(tok)
    if not m:
        raise CircuitParseError(f"malformed reflectivity {tok!r} (expected R=p/q)", lineno, col)
    r = Fraction(m.group(1))
    if m.group(2) is not None:
        den = int(m.group(2))
        if den == 0:
            raise CircuitParseError(f"malformed reflectivity {tok!r}: zero denominator", lineno, col)
        r /= den
    if r > 1:
        raise CircuitParseError(f"reflectivity {r} outside [0, 1]", lineno, col)
    return r


def _parse_float(tok: str, col: int, lineno: int) -> float:
    if not _FLOAT.match(tok):
        raise CircuitParseError(f"malformed number {tok!r}", lineno, col)
    x = float(tok)
    if not math.isfinite(x):
        raise CircuitParseError(f"number {tok!r} is not finite", lineno, col)
    return x


def parse_circuit(text: str) -> CircuitSpec:
    """Parse circuit text. Raises ``CircuitParseError`` with line and column."""
    n: int | None = None
    sources: dict[int, Source] = {}
    elements: list[BeamSplitter] = []
    rules: dict[int, Constraint] = {}
    outputs: list[int] = []
    seen_directive = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not toks:
            continue
        (word, wcol), args = toks[0], toks[1:]

        def need(k: int, usage: str):
            if len(args) != k:
                col = args[k][1] if len(args) > k else len(line.rstrip()) + 1
                raise CircuitParseError(f"usage: {usage}", lineno, col)

        if word == "format":
            need(1, "format 1")
            if seen_directive:
                raise CircuitParseError("format must be the first directive", lineno, wcol)
            if args[0][0] != str(FORMAT_VERSION):
                raise CircuitParseError(f"unsupported format version {args[0][0]!r}", lineno, args[0][1])
            seen_directive = True
            continue
        seen_directive = True

        if word == "modes":
            need(1, "modes <count>")
            if n is not None:
                raise CircuitParseError("duplicate modes directive", lineno, wcol)
            tok, col = args[0]
            if not _INT.match(tok) or int(tok) < 1:
                raise CircuitParseError(f"modes needs a positive integer, got {tok!r}", lineno, col)
            n = int(tok)
            continue

        if word not in ("source", "bs", "detect", "output"):
            raise CircuitParseError(f"unknown directive {word!r}", lineno, wcol)
        if n is None:
            raise CircuitParseError("no modes directive", lineno, wcol)

        if word == "source":
            if len(args) < 2:
                need(2, "source <port> (linear <angle>deg | amps <re_R> <im_R> <re_L> <im_L>)")
            port = _parse_port(*args[0], lineno, n)
            if port in sources:
                raise CircuitParseError(f"duplicate source on port {port}", lineno, args[0][1])
            kind, kcol = args[1]
            if kind == "linear":
                need(3, "source <port> linear <angle>deg")
                sources[port] = Source(port, angle_deg=_parse_angle(*args[2], lineno))
            elif kind == "amps":
                need(6, "source <port> amps <re_R> <im_R> <re_L> <im_L>")
                amps = tuple(_parse_float(t, c, lineno) for t, c in args[2:])
                if not any(amps):
                    raise CircuitParseError("source amplitudes are all zero", lineno, args[2][1])
                sources[port] = Source(port, amps=amps)
            else:
                raise CircuitParseError(f"unknown source kind {kind!r}", lineno, kcol)
        elif word == "bs":
            need(3, "bs <port_in> <port_line> R=<p>/<q>")
            p_in = _parse_port(*args[0], lineno, n)
            p_line = _parse_port(*args[1], lineno, n)
            if p_in == p_line:
                raise CircuitParseError("beam splitter ports must differ", lineno, args[1][1])
            r = _parse_reflectivity(*args[2], lineno)
            elements.append(BeamSplitter(p_line, p_in, r))
        elif word == "detect":
            need(2, "detect <port> (zero|one)")
            port = _parse_port(*args[0], lineno, n)
            if port in rules:
                raise CircuitParseError(f"duplicate detector on port {port}", lineno, args[0][1])
            kind, kcol = args[1]
            if kind not in ("zero", "one"):
                raise CircuitParseError(f"detector kind must be zero or one, got {kind!r}", lineno, kcol)
            rules[port] = Constraint(kind)
        else:
            need(1, "output <port>")
            port = _parse_port(*args[0], lineno, n)
            if port in outputs:
                raise CircuitParseError(f"duplicate output port {port}", lineno, args[0][1])
            outputs.append(port)

    if n is None:
        last = max(1, len(text.splitlines()))
        raise CircuitParseError("no modes directive", last, 1)
    return CircuitSpec(n, tuple(sources.values()), tuple(elements), tuple(rules.items()), tuple(outputs))


def _fmt_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def serialize(spec: CircuitSpec) -> str:
    lines = [f"format {FORMAT_VERSION}", f"modes {spec.n_spatial}"]
    for s in spec.sources:
        if s.angle_deg is not None:
            lines.append(f"source {s.port} linear {_fmt_fraction(s.angle_deg)}deg")
        else:
            lines.append(f"source {s.port} amps " + " ".join(repr(float(a)) for a in s.amps))
    for bs in spec.elements:
        lines.append(f"bs {bs.port_b} {bs.port_a} R={_fmt_fraction(bs.reflectivity)}")
    for port, c in spec.rules:
        lines.append(f"detect {port} {c.value}")
    for port in spec.outputs:
        lines.append(f"output {port}")
    return "\n".join(lines) + "\n"


def _merge_elements(n: int) -> list[BeamSplitter]:
    return [BeamSplitter(0, l, Fraction(1, l + 1)) for l in range(1, n)]


def builtin_circuit(kind: str, n: int) -> CircuitSpec:
    """``merge``: n sources funneled into port 0 with vacuum checks on the
    other ports. ``ghz``: the same merge followed by a split cascade onto
    fresh ports n..2n-2, with one-photon detection on all n outputs."""
    if n < 1:
        raise ValueError("need at least one photon")
    sources = tuple(Source(l, angle_deg=Fraction(180 * l, n)) for l in range(n))
    if kind == "merge":
        rules = tuple((l, Constraint.ZERO) for l in range(1, n))
        return CircuitSpec(n, sources, tuple(_merge_elements(n)), rules, (0,))
    if kind == "ghz":
        split = [BeamSplitter(0, n + k - 1, Fraction(1, k + 1)) for k in range(n - 1, 0, -1)]
        outs = (0,) + tuple(range(n, 2 * n - 1))
        rules = tuple((p, Constraint.ONE) for p in outs)
        return CircuitSpec(2 * n - 1 if n > 1 else 1, sources, tuple(_merge_elements(n) + split), rules, outs)
    raise ValueError(f"unknown builtin circuit {kind!r}")


def ghz_channel_map(n: int) -> dict[int, int]:
    """Builtin ghz output port -> split-cascade channel index."""
    return {0: 0, **{n + k - 1: k for k in range(1, n)}}


def check_circuit(text: str) -> list[CircuitParseError]:
    """Diagnostics for ``text`` (empty if it parses)."""
    try:
        parse_circuit(text)
    except CircuitParseError as e:
        return [e]
    return []


__all__: Sequence[str] = [
    "CircuitParseError",
    "CircuitSpec",
    "Source",
    "builtin_circuit",
    "check_circuit",
    "ghz_channel_map",
    "parse_circuit",
    "run_circuit",
    "serialize",
]
