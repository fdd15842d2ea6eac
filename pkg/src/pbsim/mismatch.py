"""Single-photon mode-matching errors modeled with orthogonal ghost modes.

The distinguishable photon travels through an identical copy of the
network whose spatial ports are shifted by ``n`` (port j -> j + n). The
copies never interfere, but a detector on port j also sees port j + n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fock import FockState, ModeId, ProductPhotonState, expand_product, norm_sq
from .optics import apply_mode_map, direct_sum, linear_photon, merge_cascade
from .polarization import PolarDistribution, circular_distribution, linear_distribution
from .postselect import LINE, PostSelectionRule, bottleneck_output, project


@dataclass(frozen=True)
class MismatchScenario:
    """``bad_port`` is the input whose photon is distinguishable (None for the
    ideal case). ``bad_angle`` overrides that photon's linear polarization,
    which otherwise stays at pi*bad_port/n. ``epsilon`` is the probability
    that the mismatch happens at all."""

    n: int = 4
    bad_port: int | None = 0
    epsilon: float = 0.0
    bad_angle: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one photon")
        if self.bad_port is not None and not 0 <= self.bad_port < self.n:
            raise ValueError(f"bad_port {self.bad_port} outside 0..{self.n - 1}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon {self.epsilon} outside [0, 1]")


def ghost(mode: ModeId, offset: int) -> ModeId:
    return ModeId(mode.spatial + offset, mode.pol)


def is_ghost(mode: ModeId, n: int) -> bool:
    return mode.spatial >= n


def mismatch_input(sc: MismatchScenario) -> ProductPhotonState:
    photons = []
    for l in range(sc.n):
        angle = math.pi * l / sc.n
        if l == sc.bad_port:
            if sc.bad_angle is not None:
                angle = sc.bad_angle
            photons.append(linear_photon(l + sc.n, angle))
        else:
            photons.append(linear_photon(l, angle))
    return ProductPhotonState(tuple(photons))


def mismatch_output(sc: MismatchScenario) -> FockState:
    """Unnormalized post-selected line state with one photon on the ghost line.

    Real and ghost photons pass through the same merge cascade; every
    discard detector must see vacuum in both copies.
    """
    if sc.bad_port is None:
        return bottleneck_output(sc.n)[0]
    u = merge_cascade(sc.n)
    both = direct_sum(u, u.relabel(lambda m: ghost(m, sc.n)))
    p = apply_mode_map(mismatch_input(sc), both)
    rule = PostSelectionRule.zero(range(1, sc.n), ghost_offset=sc.n) if sc.n > 1 else None
    s = expand_product(p)
    return project(s, rule) if rule else s


def line_channel(sc: MismatchScenario) -> tuple[int, ...]:
    return (LINE,) if sc.bad_port is None else (LINE, LINE + sc.n)


def error_circular_distribution(sc: MismatchScenario = MismatchScenario()) -> PolarDistribution:
    """n_R - n_L over the real and ghost line modes together."""
    return circular_distribution(mismatch_output(sc), line_channel(sc))


def error_hv_distribution(sc: MismatchScenario = MismatchScenario()) -> PolarDistribution:
    return linear_distribution(mismatch_output(sc), 0.0, line_channel(sc))


def mixed_circular_distribution(
    epsilon: float, n: int = 4, bad_port: int = 0
) -> tuple[dict[int, float], float]:
    """Post-selection-weighted circular statistics of an epsilon mixture.

    weight(dn) = (1 - eps) p_ideal P_ideal(dn) + eps p_err P_err(dn), with
    p_ideal and p_err the success probabilities of the two cases. Returns
    the unnormalized weights and their total.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon {epsilon} outside [0, 1]")
    ideal = bottleneck_output(n)[0]
    err = mismatch_output(MismatchScenario(n, bad_port))
    d_ideal = circular_distribution(ideal)
    d_err = circular_distribution(err, (LINE, LINE + n))
    w_ideal = (1 - epsilon) * norm_sq(ideal)
    w_err = epsilon * norm_sq(err)
    weights = {dn: w_ideal * d_ideal[dn] + w_err * d_err[dn] for dn in d_ideal.support()}
    return weights, math.fsum(weights.values())
