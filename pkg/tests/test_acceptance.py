"""One check per acceptance criterion; each prints a PASS/FAIL line."""

import numpy as np
import pytest

from pbsim import acceptance
from pbsim.circuit import CircuitParseError, builtin_circuit, parse_circuit, serialize
from pbsim.cli import main


def report(res, capsys):
    with capsys.disabled():
        print("\n" + res.line())
        if not res.passed:
            for d in res.details:
                print("    " + d)
    return res.passed


@pytest.mark.parametrize("crit", acceptance.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(crit, capsys):
    assert report(crit(), capsys)


def test_criterion_10(capsys):
    res = acceptance.CheckResult(10, "circuit round trip, parser fuzz, validate exit code")
    for kind in ("merge", "ghz"):
        spec = builtin_circuit(kind, 4)
        res.check(parse_circuit(serialize(spec)) == spec, f"{kind} n=4 round trip")
    rng = np.random.default_rng(10)
    bases = [serialize(builtin_circuit(kind, 4)) for kind in ("merge", "ghz")]
    crashes, diagnostics, parsed = [], 0, 0
    for i in range(1000):
        text = acceptance.fuzz_circuit_text(rng, bases[i % 2])
        try:
            parse_circuit(text)
            parsed += 1
        except CircuitParseError as e:
            diagnostics += e.line >= 1 and e.column >= 1
        except Exception as e:  # anything else is a crash
            crashes.append(f"{type(e).__name__}: {e}")
    res.check(not crashes, f"1000 fuzz cases: {parsed} parsed, {diagnostics} diagnostics, {len(crashes)} crashes {crashes[:3]}")
    code = main(["validate"])
    capsys.readouterr()
    res.check(code == 0, f"validate exit code {code}")
    assert report(res, capsys)
