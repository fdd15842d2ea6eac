"""Detector-conditioned projections and the bottleneck cat-state pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .fock import (
    FockState,
    ModeId,
    Pol,
    ProductPhotonState,
    expand_product,
    norm_sq,
)
from .optics import apply_mode_map, build_input, merge_cascade

LINE = 0


class Constraint(Enum):
    ZERO = "zero"
    ONE = "one"  # exactly one photon summed over the channel's modes
    ANY = "any"


Channel = Union[ModeId, tuple]  # a single mode, or a tuple of spatial ports


def _channel_modes_match(channel: Channel, mode: ModeId) -> bool:
    if isinstance(channel, ModeId):
        return mode == channel
    return mode.spatial in channel


def _normalize_channel(ch) -> Channel:
    if isinstance(ch, ModeId):
        return ch
    if isinstance(ch, int):
        return (ch,)
    return tuple(sorted(int(p) for p in ch))


@dataclass(frozen=True)
class PostSelectionRule:
    """Per-channel photon-count conditions.

    A channel is either one ``ModeId`` or a tuple of spatial ports whose
    polarization modes are all seen by the same detector (a real port and
    its ghost copy, for instance).
    """

    constraints: Mapping[Channel, Constraint] = field(default_factory=dict)

    def __post_init__(self):
        norm = {_normalize_channel(ch): Constraint(c) for ch, c in dict(self.constraints).items()}
        if not norm:
            raise ValueError("a post-selection rule needs at least one constraint")
        object.__setattr__(self, "constraints", norm)

    @classmethod
    def zero(cls, ports: Iterable, ghost_offset: int | None = None) -> PostSelectionRule:
        return cls({_with_ghost(p, ghost_offset): Constraint.ZERO for p in ports})

    @classmethod
    def one_each(cls, ports: Iterable, ghost_offset: int | None = None) -> PostSelectionRule:
        return cls({_with_ghost(p, ghost_offset): Constraint.ONE for p in ports})

    def accepts(self, occ) -> bool:
        for ch, c in self.constraints.items():
            if c is Constraint.ANY:
                continue
            k = sum(n for m, n in occ if _channel_modes_match(ch, m))
            if (c is Constraint.ZERO and k) or (c is Constraint.ONE and k != 1):
                return False
        return True

    def zero_modes(self) -> set:
        """Channels constrained to be empty (modes or port tuples)."""
        return {ch for ch, c in self.constraints.items() if c is Constraint.ZERO}


def _with_ghost(port, ghost_offset):
    if ghost_offset is None:
        return port
    return (port, port + ghost_offset)


def project(s: FockState, rule: PostSelectionRule) -> FockState:
    """Keep the terms that satisfy every constraint. The result is unnormalized."""
    return FockState({occ: a for occ, a in s if rule.accepts(occ)}, s.photon_number)


def project_product(p: ProductPhotonState, rule: PostSelectionRule) -> FockState:
    """Expand and project, discarding zero-constrained modes before expanding.

    Vacuum conditions factor through a product state: a term survives only
    if every photon avoided those modes, so each photon vector can simply
    be truncated. Remaining constraints are applied after expansion.
    """
    zeros = rule.zero_modes()
    photons = []
    for vec in p.photons:
        kept = {
            m: c for m, c in vec.items() if not any(_channel_modes_match(ch, m) for ch in zeros)
        }
        if not kept:
            return FockState.zero(p.photon_number)
        photons.append(kept)
    rest = {ch: c for ch, c in rule.constraints.items() if ch not in zeros}
    s = expand_product(ProductPhotonState(tuple(photons), p.global_scale))
    return project(s, PostSelectionRule(rest)) if rest else s


def discard_rule(n: int) -> PostSelectionRule:
    """Vacuum on every merge-cascade port except the output line."""
    if n == 1:
        return PostSelectionRule({LINE: Constraint.ANY})
    return PostSelectionRule.zero(range(1, n))


def bottleneck_output(n: int, fast: bool = False) -> tuple[FockState, float]:
    """Run input -> merge cascade -> expansion -> vacuum post-selection.

    With ``fast`` the discarded modes are dropped before expansion, which
    gives the same state without building the full output superposition.
    """
    p = apply_mode_map(build_input(n), merge_cascade(n))
    rule = discard_rule(n)
    out = project_product(p, rule) if fast else project(expand_product(p), rule)
    return out, norm_sq(out)


def closed_form_output(n: int) -> FockState:
    """sqrt(n!/(2n)^n) (|n;0> - (-1)^n |0;n>) on the output line."""
    if n < 1:
        raise ValueError("need at least one photon")
    c = math.sqrt(math.factorial(n) / (2 * n) ** n)
    sign = -((-1) ** n)
    return FockState(
        [({ModeId(LINE, Pol.R): n}, c), ({ModeId(LINE, Pol.L): n}, sign * c)], n
    )


def closed_form_probability_exact(n: int) -> Fraction:
    if n < 1:
        raise ValueError("need at least one photon")
    return Fraction(2 * math.factorial(n), (2 * n) ** n)


def closed_form_probability(n: int) -> float:
    return float(closed_form_probability_exact(n))


def independent_particle_probability(n: int) -> Fraction:
    """Chance that n distinguishable photons all land in the output line."""
    return Fraction(1, n) ** n
