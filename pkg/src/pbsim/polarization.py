"""Polarization photon-number statistics of (mostly single-line) Fock states.

Linear bases are reached by rewriting the R/L creation operators:

    a_phi^dag  = (e^{+i phi} a_R^dag + e^{-i phi} a_L^dag) / sqrt(2)
    a_perp^dag = (e^{+i phi} a_R^dag - e^{-i phi} a_L^dag) / sqrt(2)

so phi = 0 gives H = (R + L)/sqrt(2). With this phase choice the overlaps
<dn|4R> come out as sqrt(C(4,k))/4 * e^{-4i phi}, with no extra ket phases.
After the basis change the R slot of each mode holds the phi photons and
the L slot holds the phi + pi/2 photons.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .fock import FockState, ModeId, Pol, inner_product, norm_sq, normalize
from .optics import ModeMap, direct_sum, transform_state


@dataclass(frozen=True)
class PolarDistribution:
    """Probability over photon-number differences dn in {-n, -n+2, ..., n}.

    ``phi`` is None for the circular basis (dn = n_R - n_L) and the
    measurement angle otherwise (dn = n_phi - n_{phi+pi/2}).
    """

    n: int
    probs: Mapping[int, float]
    phi: float | None = None

    @property
    def basis(self) -> str:
        return "circular" if self.phi is None else "linear"

    def __getitem__(self, dn: int) -> float:
        return self.probs.get(dn, 0.0)

    def support(self) -> list[int]:
        """dn values from +n down to -n, the order used for tables."""
        return list(range(self.n, -self.n - 1, -2))

    def as_array(self) -> np.ndarray:
        return np.array([self[d] for d in self.support()])

    def mean(self) -> float:
        return math.fsum(d * p for d, p in self.probs.items())


def _channel(channel) -> tuple[int, ...]:
    if isinstance(channel, int):
        return (channel,)
    return tuple(channel)


def _difference_marginal(s: FockState, channel: Iterable[int]) -> tuple[int, dict[int, float]]:
    ports = set(_channel(channel))
    s, _ = normalize(s)
    probs: dict[int, float] = defaultdict(float)
    counts = set()
    for occ, amp in s:
        dn = 0
        k = 0
        for m, c in occ:
            if m.spatial in ports:
                k += c
                dn += c if m.pol is Pol.R else -c
        counts.add(k)
        probs[dn] += abs(amp) ** 2
    if len(counts) != 1:
        raise ValueError(f"channel {sorted(ports)} holds a varying photon number")
    return counts.pop(), dict(probs)


def circular_distribution(s: FockState, channel=(0,)) -> PolarDistribution:
    """Distribution of n_R - n_L summed over the spatial ports of ``channel``."""
    n, probs = _difference_marginal(s, channel)
    return PolarDistribution(n, probs)


def linear_basis_map(phi: float, ports: Iterable[int] = (0,)) -> ModeMap:
    """Rewrite R/L photons in the (phi, phi + pi/2) basis on each port."""
    ports = sorted(set(_channel(ports)))
    modes = tuple(ModeId(p, pol) for p in ports for pol in Pol)
    u = np.zeros((len(modes), len(modes)), dtype=complex)
    em, ep = cmath.exp(-1j * phi), cmath.exp(1j * phi)
    s = 1 / math.sqrt(2)
    for i in range(0, len(modes), 2):
        # columns: R, L inputs; rows: phi slot, perp slot
        u[i, i], u[i + 1, i] = em * s, em * s
        u[i, i + 1], u[i + 1, i + 1] = ep * s, -ep * s
    return ModeMap(modes, modes, u)


def difference_distribution(s: FockState, basis: ModeMap, channel=(0,), phi=None) -> PolarDistribution:
    """Change basis with ``basis`` (applied to the channel's modes), then
    read off the slot-R minus slot-L photon-number difference."""
    spare = s.modes() - set(basis.in_modes)
    if spare:
        # other ports pass through untouched
        extra = tuple(sorted(spare))
        basis = direct_sum(basis, ModeMap.identity(extra))
    rotated = transform_state(s, basis)
    n, probs = _difference_marginal(rotated, channel)
    return PolarDistribution(n, probs, phi)


def linear_distribution(s: FockState, phi: float, channel=(0,)) -> PolarDistribution:
    return difference_distribution(s, linear_basis_map(phi, channel), channel, phi=phi)


def stokes_expectations(s: FockState, channel=(0,)) -> tuple[float, float, float]:
    """(S1, S2, S3) as mean photon-number differences: H-V, diagonal, R-L."""
    s1 = linear_distribution(s, 0.0, channel).mean()
    s2 = linear_distribution(s, math.pi / 4, channel).mean()
    s3 = circular_distribution(s, channel).mean()
    return s1, s2, s3


def rotate_about_circular_axis(s: FockState, angle: float) -> FockState:
    """Multiply every L photon by exp(-i angle) relative to R.

    This turns the Stokes vector by ``angle`` about the S3 axis, i.e. the
    linear polarization by angle/2.
    """
    out = {}
    for occ, amp in s:
        n_l = sum(k for m, k in occ if m.pol is Pol.L)
        out[occ] = amp * cmath.exp(-1j * angle * n_l)
    return FockState(out, s.photon_number)


def rotation_symmetry_defect(s: FockState, k: int) -> float:
    """1 - |<s|R_k s>|^2 / |s|^4 for a 2*pi/k Stokes rotation R_k.

    Zero when the state is invariant up to a global phase.
    """
    n2 = norm_sq(s)
    if n2 == 0.0:
        raise ValueError("empty post-selected state")
    ov = inner_product(s, rotate_about_circular_axis(s, 2 * math.pi / k))
    return max(0.0, 1.0 - abs(ov) ** 2 / n2**2)


def cat_linear_closed_form(phi: float) -> dict[int, float]:
    """Four-photon cat fringes: dn -> probability at linear angle phi."""
    c = math.cos(8 * phi)
    return {
        4: (1 - c) / 16,
        2: 4 * (1 + c) / 16,
        0: 6 * (1 - c) / 16,
        -2: 4 * (1 + c) / 16,
        -4: (1 - c) / 16,
    }
