"""Redistribution of the line state into n channels and GHZ-fraction analysis."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .fock import FockState, ModeId, Pol, inner_product, norm_sq
from .mismatch import MismatchScenario, ghost, is_ghost, mismatch_output
from .optics import direct_sum, split_cascade, transform_state
from .postselect import PostSelectionRule, bottleneck_output, project

WITNESS_THRESHOLD = 0.5


@dataclass(frozen=True)
class PureEnsemble:
    """rho = sum_i w_i |psi_i><psi_i| with unnormalized psi_i."""

    components: tuple[tuple[float, FockState], ...] = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if any(w < 0 for w, _ in comps):
            raise ValueError("ensemble weights must be non-negative")
        object.__setattr__(self, "components", comps)

    def trace(self) -> float:
        return math.fsum(w * norm_sq(s) for w, s in self.components)

    def scaled(self, c: float) -> PureEnsemble:
        return PureEnsemble(tuple((w * c, s) for w, s in self.components))


def redistribute(s: FockState, n: int) -> FockState:
    """Split the line into n channels and keep one photon per channel.

    If ``s`` carries ghost-copy photons (ports >= n) they go through a copy
    of the split cascade, and each detector counts both copies.
    """
    if s.photon_number != n:
        raise ValueError(f"state has {s.photon_number} photons, expected {n}")
    u = split_cascade(n)
    has_ghost = any(is_ghost(m, n) for m in s.modes())
    if has_ghost:
        u = direct_sum(u, u.relabel(lambda m: ghost(m, n)))
    spread = transform_state(s, u)
    rule = PostSelectionRule.one_each(range(n), ghost_offset=n if has_ghost else None)
    return project(spread, rule)


def fold_ghosts(s: FockState, n: int) -> list[FockState]:
    """Trace out the real/ghost label of a one-photon-per-channel state.

    Terms are grouped by which channels hold a ghost photon; those groups
    are orthogonal in the traced-out label, so each becomes a separate
    pure component with ghost modes renamed onto the real ports.
    """
    groups: dict[tuple, dict] = defaultdict(dict)
    for occ, amp in s:
        key = tuple(sorted(m.spatial - n for m, _ in occ if is_ghost(m, n)))
        folded = [(ModeId(m.spatial - n, m.pol) if is_ghost(m, n) else m, k) for m, k in occ]
        spatial = [m.spatial for m, _ in folded]
        if len(set(spatial)) != len(spatial):
            raise ValueError("real and ghost photons share a channel; cannot fold")
        groups[key][tuple(folded)] = amp
    return [FockState(terms, s.photon_number) for _, terms in sorted(groups.items())]


def ghz_state(n: int) -> FockState:
    """(|R...R> - (-1)^n |L...L>) / sqrt(2), one photon in each of n channels.

    For even n this is the usual minus-sign GHZ state; for odd n the sign
    follows what redistribution of the odd-n cat produces.
    """
    if n < 1:
        raise ValueError("need at least one photon")
    c = 1 / math.sqrt(2)
    rr = {ModeId(j, Pol.R): 1 for j in range(n)}
    ll = {ModeId(j, Pol.L): 1 for j in range(n)}
    return FockState([(rr, c), (ll, -((-1) ** n) * c)], n)


def ghz_fraction(e: PureEnsemble, n: int) -> float:
    """<GHZ|rho|GHZ> / Tr rho, folding ghost modes into their real ports."""
    g = ghz_state(n)
    num = []
    den = []
    for w, s in e.components:
        for part in fold_ghosts(s, n):
            num.append(w * abs(inner_product(g, part)) ** 2)
            den.append(w * norm_sq(part))
    total = math.fsum(den)
    if total == 0.0:
        raise ValueError("ensemble has zero trace")
    return min(1.0, math.fsum(num) / total)


def witness_passes(fraction: float) -> bool:
    return fraction >= WITNESS_THRESHOLD


def mixture_ensemble(epsilon: float, n: int = 4, bad_port: int = 0) -> PureEnsemble:
    """Redistributed ideal output with weight 1-eps plus the one-photon
    mismatch output with weight eps."""
    ideal = redistribute(bottleneck_output(n)[0], n)
    err = redistribute(mismatch_output(MismatchScenario(n, bad_port)), n)
    return PureEnsemble(((1 - epsilon, ideal), (epsilon, err)))


@dataclass(frozen=True)
class FractionCurve:
    """GHZ fraction of the eps mixture, from the two simulated components.

    f(eps) = ((1-eps) p0 F0 + eps p1 F1) / ((1-eps) p0 + eps p1) where p is
    the post-selected weight of a component and F its GHZ fraction.
    """

    p_ideal: float
    f_ideal: float
    p_error: float
    f_error: float

    @classmethod
    def simulate(cls, n: int = 4, bad_port: int = 0) -> FractionCurve:
        ideal = redistribute(bottleneck_output(n)[0], n)
        err = redistribute(mismatch_output(MismatchScenario(n, bad_port)), n)
        return cls(
            norm_sq(ideal),
            ghz_fraction(PureEnsemble(((1.0, ideal),)), n),
            norm_sq(err),
            ghz_fraction(PureEnsemble(((1.0, err),)), n),
        )

    def exact(self, epsilon: float) -> float:
        a = (1 - epsilon) * self.p_ideal
        b = epsilon * self.p_error
        return (a * self.f_ideal + b * self.f_error) / (a + b)

    def first_order(self, epsilon: float) -> float:
        """Linearization about eps = 0."""
        slope = (self.p_error / self.p_ideal) * (self.f_error - self.f_ideal)
        return self.f_ideal + slope * epsilon


def four_photon_fraction(epsilon: float) -> float:
    return (12 - 9 * epsilon) / (12 - 4 * epsilon)


def four_photon_first_order(epsilon: float) -> float:
    return 1 - 5 * epsilon / 12


def witness_threshold_epsilon() -> Fraction:
    """eps where (12 - 9 eps)/(12 - 4 eps) = 1/2."""
    return Fraction(6, 7)
