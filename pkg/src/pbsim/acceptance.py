"""End-to-end checks of the simulator against the known closed forms.

Each ``criterion_*`` function returns a ``CheckResult``. ``run_all``
evaluates criteria 1-9; the CLI ``validate`` command prints them and
exits nonzero if any fails. Tolerances are fixed here, not configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .entanglement import (
    FractionCurve,
    PureEnsemble,
    four_photon_first_order,
    four_photon_fraction,
    ghz_fraction,
    ghz_state,
    mixture_ensemble,
    redistribute,
)
from .fock import FockState, ModeId, Pol, ProductPhotonState, equivalent, expand_product, norm_sq
from .mismatch import MismatchScenario, error_circular_distribution, error_hv_distribution, mismatch_output
from .oracles import brute_force_expand
from .polarization import cat_linear_closed_form, circular_distribution, linear_distribution, rotation_symmetry_defect
from .postselect import bottleneck_output, closed_form_output, closed_form_probability_exact


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool = True
    details: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str) -> None:
        self.details.append(("ok   " if ok else "FAIL ") + message)
        self.passed = self.passed and bool(ok)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.number}: {self.title}"


def criterion_1() -> CheckResult:
    res = CheckResult(1, "success probability 2 n!/(2n)^n")
    for n in range(1, 8):
        _, p = bottleneck_output(n)
        exact = float(closed_form_probability_exact(n))
        res.check(abs(p - exact) <= 1e-12, f"n={n}: pipeline {p:.15g} vs {exact:.15g}")
    for n, frac in ((3, Fraction(1, 18)), (4, Fraction(3, 256))):
        _, p = bottleneck_output(n)
        res.check(
            closed_form_probability_exact(n) == frac and f"{p:.12g}" == f"{float(frac):.12g}",
            f"p({n}) prints as {p:.12g}, expected {frac} = {float(frac):.12g}",
        )
    return res


def criterion_2() -> CheckResult:
    res = CheckResult(2, "pipeline output is the circular cat state")
    for n in (2, 3, 4, 5):
        s, _ = bottleneck_output(n)
        ref = closed_form_output(n)
        res.check(equivalent(s, ref, 1e-10), f"n={n}: same ray as sqrt(n!/(2n)^n)(|n;0> - (-1)^n |0;n>)")
        res.check(abs(norm_sq(s) - norm_sq(ref)) <= 1e-12, f"n={n}: norms agree")
    return res


def criterion_3() -> CheckResult:
    res = CheckResult(3, "four-photon circular super-bunching")
    d = circular_distribution(bottleneck_output(4)[0]).as_array()
    want = np.array([0.5, 0, 0, 0, 0.5])
    res.check(np.max(np.abs(d - want)) <= 1e-12, f"p(dn=+4..-4) = {np.round(d, 15).tolist()}")
    return res


def criterion_4() -> CheckResult:
    res = CheckResult(4, "cos(8 phi) fringes of the linear statistics")
    cat = bottleneck_output(4)[0]
    worst = 0.0
    worst_period = 0.0
    for j in range(64):
        phi = j * math.pi / 64
        d = linear_distribution(cat, phi)
        ref = cat_linear_closed_form(phi)
        worst = max(worst, max(abs(d[k] - v) for k, v in ref.items()))
        d2 = linear_distribution(cat, phi + math.pi / 4)
        worst_period = max(worst_period, float(np.max(np.abs(d.as_array() - d2.as_array()))))
    res.check(worst <= 1e-10, f"64 angles: max deviation from closed form {worst:.3g}")
    res.check(worst_period <= 1e-10, f"pi/4 periodicity: max deviation {worst_period:.3g}")
    d = linear_distribution(cat, math.pi / 8)
    res.check(abs(d[0] - 0.75) <= 1e-10, f"phi=pi/8: p(dn=0) = {d[0]:.15g}")
    d = linear_distribution(cat, math.pi / 16).as_array()
    binom = np.array([1, 4, 6, 4, 1]) / 16
    res.check(np.max(np.abs(d - binom)) <= 1e-10, f"phi=pi/16: {np.round(d * 16, 12).tolist()} / 16")
    return res


def criterion_5() -> CheckResult:
    res = CheckResult(5, "single-photon mismatch state")
    s = mismatch_output(MismatchScenario(4, 0))
    n2 = norm_sq(s)
    p4 = float(closed_form_probability_exact(4))
    res.check(abs(n2 - 1 / 128) <= 1e-12, f"norm^2 = {n2:.15g} (1/128 = {1 / 128:.15g})")
    res.check(abs(n2 - 2 * p4 / 3) <= 1e-12, "norm^2 = (2/3) p(4)")
    circ = error_circular_distribution().as_array()
    res.check(
        np.max(np.abs(circ - np.array([3, 4, 2, 4, 3]) / 16)) <= 1e-12,
        f"circular = {np.round(circ * 16, 12).tolist()} / 16",
    )
    hv = error_hv_distribution()
    off = max(abs(hv[k]) for k in (4, 0, -4))
    res.check(off <= 1e-12, f"H/V mass off dn=+-2 is {off:.3g}")
    ratio = hv[-2] / hv[2]
    res.check(abs(ratio - 3) <= 1e-10, f"p(dn=-2) : p(dn=+2) = {ratio:.15g} : 1")
    return res


def criterion_6() -> CheckResult:
    res = CheckResult(6, "mismatch circular statistics are universal")
    ref = error_circular_distribution().as_array()
    worst = 0.0
    for bad in range(4):
        for k in range(8):
            sc = MismatchScenario(4, bad, bad_angle=k * math.pi / 8)
            d = error_circular_distribution(sc).as_array()
            worst = max(worst, float(np.max(np.abs(d - ref))))
    res.check(worst <= 1e-10, f"4 ports x 8 angles: max deviation {worst:.3g}")
    return res


def criterion_7() -> CheckResult:
    res = CheckResult(7, "GHZ redistribution and witness fraction")
    g = redistribute(closed_form_output(4), 4)
    res.check(equivalent(g, ghz_state(4), 1e-10), "redistributed cat ~ (|RRRR> - |LLLL>)/sqrt(2)")
    err = redistribute(mismatch_output(MismatchScenario(4, 0)), 4)
    f_err = ghz_fraction(PureEnsemble(((1.0, err),)), 4)
    res.check(abs(f_err - 3 / 8) <= 1e-12, f"mismatch fraction {f_err:.15g} (3/8)")
    worst = 0.0
    for k in range(11):
        eps = k / 10
        f = ghz_fraction(mixture_ensemble(eps), 4)
        worst = max(worst, abs(f - four_photon_fraction(eps)))
    res.check(worst <= 1e-10, f"mixture vs (12-9e)/(12-4e), 11 points: max deviation {worst:.3g}")
    h = 1e-6
    slope = (ghz_fraction(mixture_ensemble(h), 4) - ghz_fraction(mixture_ensemble(0.0), 4)) / h
    res.check(abs(slope + 5 / 12) <= 1e-5, f"initial slope {slope:.9g} vs -5/12 (first order)")
    curve = FractionCurve.simulate()
    res.check(
        abs(curve.first_order(0.2) - four_photon_first_order(0.2)) <= 1e-10,
        f"eps=0.2: exact {four_photon_fraction(0.2):.6f}, first order {four_photon_first_order(0.2):.6f}",
    )
    return res


def random_product_state(rng: np.random.Generator, max_photons: int = 4, max_modes: int = 8) -> ProductPhotonState:
    n = int(rng.integers(1, max_photons + 1))
    m = int(rng.integers(1, max_modes + 1))
    pool = [ModeId(s, p) for s in range((max_modes + 1) // 2) for p in Pol]
    modes = [pool[i] for i in rng.choice(len(pool), size=m, replace=False)]
    photons = []
    for _ in range(n):
        k = int(rng.integers(1, m + 1))
        chosen = rng.choice(m, size=k, replace=False)
        amps = rng.normal(size=k) + 1j * rng.normal(size=k)
        photons.append({modes[i]: complex(a) for i, a in zip(chosen, amps)})
    scale = complex(rng.normal(), rng.normal())
    return ProductPhotonState(tuple(photons), scale)


def max_amplitude_gap(a: FockState, b: FockState) -> float:
    keys = set(a.terms) | set(b.terms)
    return max((abs(a.terms.get(k, 0) - b.terms.get(k, 0)) for k in keys), default=0.0)


def criterion_8(seed: int = 20040501, cases: int = 100) -> CheckResult:
    res = CheckResult(8, "expansion agrees with brute-force enumeration")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        p = random_product_state(rng)
        worst = max(worst, max_amplitude_gap(expand_product(p), brute_force_expand(p)))
    res.check(worst <= 1e-12, f"{cases} random states: max amplitude gap {worst:.3g}")
    return res


def criterion_9() -> CheckResult:
    res = CheckResult(9, "n-fold rotation symmetry of the cat state")
    for n in range(2, 7):
        d = rotation_symmetry_defect(closed_form_output(n), n)
        res.check(d < 1e-12, f"n={n}: cat defect {d:.3g}")
    for n in range(2, 7):
        broken = FockState.ket({ModeId(0, Pol.R): n - 1, ModeId(0, Pol.L): 1})
        d = rotation_symmetry_defect(broken, n)
        res.check(d > 0.01, f"n={n}: |{n - 1};1> defect {d:.3g} (needs > 0.01)")
    return res


CRITERIA: tuple[Callable[[], CheckResult], ...] = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
)


def run_all() -> list[CheckResult]:
    return [c() for c in CRITERIA]


_FUZZ_WORDS = (
    "modes", "source", "bs", "detect", "output", "format", "linear", "amps", "zero", "one",
    "R=1/2", "R=0/0", "R=7/3", "45deg", "180/0deg", "-0.5deg", "1e309", "nan", "0", "1", "99", "#", "\n", "\t",
)


def fuzz_circuit_text(rng: np.random.Generator, base: str) -> str:
    """Randomly mutate ``base``: drop, duplicate, splice tokens or characters."""
    lines = base.splitlines()
    for _ in range(int(rng.integers(1, 6))):
        op = int(rng.integers(0, 5))
        i = int(rng.integers(0, len(lines))) if lines else 0
        if op == 0 and lines:
            del lines[i]
        elif op == 1 and lines:
            lines.insert(i, lines[int(rng.integers(0, len(lines)))])
        elif op == 2:
            words = [str(rng.choice(_FUZZ_WORDS)) for _ in range(int(rng.integers(1, 6)))]
            lines.insert(i, " ".join(words))
        elif op == 3 and lines and lines[i]:
            j = int(rng.integers(0, len(lines[i])))
            lines[i] = lines[i][:j] + chr(int(rng.integers(32, 127))) + lines[i][j + 1 :]
        elif lines:
            toks = lines[i].split()
            if toks:
                toks[int(rng.integers(0, len(toks)))] = str(rng.choice(_FUZZ_WORDS))
                lines[i] = " ".join(toks)
    return "\n".join(lines)
