from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbsim.acceptance import max_amplitude_gap
from pbsim.circuit import (
    CircuitParseError,
    CircuitSpec,
    Source,
    builtin_circuit,
    check_circuit,
    ghz_channel_map,
    parse_circuit,
    run_circuit,
    serialize,
)
from pbsim.entanglement import ghz_state
from pbsim.fock import ModeId, equivalent
from pbsim.optics import BeamSplitter
from pbsim.postselect import Constraint, bottleneck_output

FOUR_PHOTON_MERGE = """\
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
"""


def test_text_example_is_builtin_merge():
    assert parse_circuit(FOUR_PHOTON_MERGE) == builtin_circuit("merge", 4)
    assert serialize(builtin_circuit("merge", 4)) == FOUR_PHOTON_MERGE


@pytest.mark.parametrize("kind", ["merge", "ghz"])
@pytest.mark.parametrize("n", range(1, 7))
def test_builtin_round_trip(kind, n):
    spec = builtin_circuit(kind, n)
    assert parse_circuit(serialize(spec)) == spec


@pytest.mark.parametrize("n", range(1, 6))
def test_merge_circuit_runs_like_pipeline(n):
    s = run_circuit(builtin_circuit("merge", n))
    ref, _ = bottleneck_output(n)
    assert max_amplitude_gap(s, ref) <= 1e-12


def test_odd_angles_are_exact():
    spec = builtin_circuit("merge", 7)
    assert spec.sources[1].angle_deg == Fraction(180, 7)
    assert "180/7deg" in serialize(spec)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ghz_circuit_gives_ghz(n):
    s = run_circuit(builtin_circuit("ghz", n))
    remap = ghz_channel_map(n)
    s = s.relabel(lambda m: ModeId(remap[m.spatial], m.pol))
    assert equivalent(s, ghz_state(n), 1e-10)


def test_comments_and_blank_lines():
    text = "# header\n\nmodes 2  # two ports\nsource 0 linear 30deg\nsource 1 amps 1 0 0 0.5\nbs 1 0 R=0.5\n"
    spec = parse_circuit(text)
    assert spec.elements == (BeamSplitter(0, 1, Fraction(1, 2)),)
    assert spec.sources[1].amps == (1.0, 0.0, 0.0, 0.5)
    assert parse_circuit(serialize(spec)) == spec


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("modes 2\nfoo 1\n", 2, 1, "unknown directive"),
        ("modes 2\nsource 5 linear 0deg\n", 2, 8, "out of range"),
        ("modes 2\nsource 0 linear 12\n", 2, 17, "malformed angle"),
        ("modes 2\nbs 1 0 R=3/2\n", 2, 8, "outside [0, 1]"),
        ("modes 2\nbs 1 0 R=1/0\n", 2, 8, "zero denominator"),
        ("modes 2\nbs 1 0 R=x\n", 2, 8, "malformed reflectivity"),
        ("modes 2\nsource 0 linear 0deg\nsource 0 linear 0deg\n", 3, 8, "duplicate source"),
        ("modes 2\ndetect 1 zero\ndetect 1 one\n", 3, 8, "duplicate detector"),
        ("modes 2\ndetect 1 maybe\n", 2, 10, "zero or one"),
        ("source 0 linear 0deg\n", 1, 1, "no modes directive"),
        ("# empty\n", 1, 1, "no modes directive"),
        ("modes 2\nformat 1\n", 2, 1, "first directive"),
        ("format 2\nmodes 2\n", 1, 8, "unsupported format"),
        ("modes 2\nbs 1 1 R=1/2\n", 2, 6, "must differ"),
        ("modes 2\nsource 0 amps 0 0 0 0\n", 2, 15, "all zero"),
        ("modes 2\noutput 1\noutput 1\n", 3, 8, "duplicate output"),
        ("modes 0\n", 1, 7, "positive integer"),
        ("modes 2\nbs 1 0\n", 2, 7, "usage"),
    ],
)
def test_parse_errors(text, line, col, fragment):
    with pytest.raises(CircuitParseError) as info:
        parse_circuit(text)
    e = info.value
    assert (e.line, e.column) == (line, col)
    assert fragment in e.message
    assert check_circuit(text) and check_circuit(FOUR_PHOTON_MERGE) == []


def test_spec_validation():
    with pytest.raises(ValueError):
        CircuitSpec(2, (Source(3, angle_deg=Fraction(0)),))
    with pytest.raises(ValueError):
        Source(0)
    with pytest.raises(ValueError):
        CircuitSpec(1, rules=((0, Constraint.ANY),))
    with pytest.raises(ValueError):
        Source(0, angle_deg=Fraction(0), amps=(1, 0, 0, 0))


angles = st.fractions(min_value=-360, max_value=360, max_denominator=12)
refl = st.fractions(min_value=0, max_value=1, max_denominator=9)


@st.composite
def specs(draw):
    n = draw(st.integers(1, 5))
    ports = draw(st.sets(st.integers(0, n - 1), min_size=1))
    sources = tuple(Source(p, angle_deg=draw(angles)) for p in ports)
    elements = []
    if n > 1:
        for _ in range(draw(st.integers(0, 4))):
            a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            elements.append(BeamSplitter(a, b, draw(refl)))
    rules = tuple(draw(st.dictionaries(st.integers(0, n - 1), st.sampled_from([Constraint.ZERO, Constraint.ONE]))).items())
    outputs = tuple(draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n)))
    return CircuitSpec(n, sources, tuple(elements), rules, outputs)


@settings(max_examples=100, deadline=None)
@given(specs())
def test_round_trip_generated(spec):
    text = serialize(spec)
    again = parse_circuit(text)
    assert again == spec
    assert serialize(again) == text
