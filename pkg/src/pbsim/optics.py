"""Linear-optical mode maps: beam splitters, merge/split cascades, input states.

A ``ModeMap`` acts on creation operators: a photon with amplitude vector
``v`` over ``in_modes`` leaves with amplitude vector ``U @ v`` over
``out_modes``. Every element here is polarization neutral, so the same
2x2 block acts on the R and L slots of a spatial port.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .fock import (
    PRUNE_TOL,
    FockState,
    ModeId,
    Pol,
    ProductPhotonState,
    expand_product,
)


def spatial_modes(ports: Iterable[int]) -> tuple[ModeId, ...]:
    """Both polarization modes of each spatial port, in canonical order."""
    return tuple(ModeId(p, pol) for p in sorted(set(ports)) for pol in Pol)


@dataclass(frozen=True, eq=False)
class ModeMap:
    in_modes: tuple[ModeId, ...]
    out_modes: tuple[ModeId, ...]
    matrix: np.ndarray  # shape (len(out_modes), len(in_modes)), U[out][in]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.out_modes), len(self.in_modes)):
            raise ValueError(
                f"matrix shape {m.shape} does not match "
                f"{len(self.out_modes)} out x {len(self.in_modes)} in modes"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "in_modes", tuple(self.in_modes))
        object.__setattr__(self, "out_modes", tuple(self.out_modes))

    @classmethod
    def identity(cls, modes: Sequence[ModeId]) -> ModeMap:
        return cls(tuple(modes), tuple(modes), np.eye(len(modes)))

    def adjoint(self) -> ModeMap:
        return ModeMap(self.out_modes, self.in_modes, self.matrix.conj().T)

    def is_isometry(self, tol: float = 1e-12) -> bool:
        g = self.matrix.conj().T @ self.matrix
        return bool(np.allclose(g, np.eye(len(self.in_modes)), atol=tol, rtol=0))

    def entry(self, out_mode: ModeId, in_mode: ModeId) -> complex:
        return complex(self.matrix[self.out_modes.index(out_mode), self.in_modes.index(in_mode)])

    def row(self, out_mode: ModeId) -> np.ndarray:
        return self.matrix[self.out_modes.index(out_mode)]

    def relabel(self, fn: Callable[[ModeId], ModeId]) -> ModeMap:
        return ModeMap(
            tuple(fn(m) for m in self.in_modes),
            tuple(fn(m) for m in self.out_modes),
            self.matrix,
        )

    def to_dict(self) -> dict:
        return {
            "in_modes": [[m.spatial, m.pol.name] for m in self.in_modes],
            "out_modes": [[m.spatial, m.pol.name] for m in self.out_modes],
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix.tolist()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ModeMap:
        ins = tuple(ModeId(int(s), Pol[p]) for s, p in data["in_modes"])
        outs = tuple(ModeId(int(s), Pol[p]) for s, p in data["out_modes"])
        mat = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return cls(ins, outs, mat.reshape(len(outs), len(ins)))

    def __eq__(self, other):
        if not isinstance(other, ModeMap):
            return NotImplemented
        return (
            self.in_modes == other.in_modes
            and self.out_modes == other.out_modes
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless polarization-neutral splitter between two spatial ports.

    ``port_a`` is the through line: it keeps amplitude sqrt(1-R) of itself
    and picks up sqrt(R) of ``port_b``. The sign flip sits on the ``port_b``
    output row, so contributions collected along a line stay in phase.
    """

    port_a: int
    port_b: int
    reflectivity: Fraction | float

    def __post_init__(self):
        if self.port_a == self.port_b:
            raise ValueError("beam splitter ports must be distinct")
        if not 0 <= self.reflectivity <= 1:
            raise ValueError(f"reflectivity {self.reflectivity} outside [0, 1]")

    def block(self) -> np.ndarray:
        r = math.sqrt(self.reflectivity)
        t = math.sqrt(1 - self.reflectivity)
        return np.array([[t, r], [r, -t]])


def beam_splitter_map(bs: BeamSplitter, total_spatial: int) -> ModeMap:
    if not (0 <= bs.port_a < total_spatial and 0 <= bs.port_b < total_spatial):
        raise ValueError(
            f"beam splitter ports ({bs.port_a}, {bs.port_b}) out of range "
            f"for {total_spatial} spatial modes"
        )
    modes = spatial_modes(range(total_spatial))
    u = np.eye(len(modes))
    blk = bs.block()
    for pol in Pol:
        ia = modes.index(ModeId(bs.port_a, pol))
        ib = modes.index(ModeId(bs.port_b, pol))
        u[np.ix_([ia, ib], [ia, ib])] = blk
    return ModeMap(modes, modes, u)


def compose(u1: ModeMap, u2: ModeMap) -> ModeMap:
    """The map that applies ``u1`` first, then ``u2``."""
    if u1.out_modes != u2.in_modes:
        raise ValueError("cannot compose: u1.out_modes != u2.in_modes")
    return ModeMap(u1.in_modes, u2.out_modes, u2.matrix @ u1.matrix)


def direct_sum(u1: ModeMap, u2: ModeMap) -> ModeMap:
    """Block-diagonal map acting independently on two disjoint mode sets."""
    if set(u1.in_modes) & set(u2.in_modes) or set(u1.out_modes) & set(u2.out_modes):
        raise ValueError("direct_sum requires disjoint mode sets")
    m = np.zeros(
        (len(u1.out_modes) + len(u2.out_modes), len(u1.in_modes) + len(u2.in_modes)),
        dtype=complex,
    )
    m[: len(u1.out_modes), : len(u1.in_modes)] = u1.matrix
    m[len(u1.out_modes):, len(u1.in_modes):] = u2.matrix
    return ModeMap(u1.in_modes + u2.in_modes, u1.out_modes + u2.out_modes, m)


def network_map(elements: Sequence[BeamSplitter], total_spatial: int) -> ModeMap:
    """Compose beam splitters in evaluation order over ``total_spatial`` ports."""
    u = ModeMap.identity(spatial_modes(range(total_spatial)))
    for bs in elements:
        u = compose(u, beam_splitter_map(bs, total_spatial))
    return u


class Direction(Enum):
    MERGE = "merge"
    SPLIT = "split"


@dataclass(frozen=True)
class CascadeSpec:
    """Line of n-1 beam splitters joining ports 1..n-1 onto line port 0.

    Merge applies R = 1/2, 1/3, ..., 1/n in that order; split is the
    adjoint and runs the same splitters in reverse.
    """

    n: int
    direction: Direction = Direction.MERGE

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("cascade needs at least one port")

    @property
    def splitters(self) -> list[BeamSplitter]:
        merge = [BeamSplitter(0, k, Fraction(1, k + 1)) for k in range(1, self.n)]
        # each block is real symmetric and involutory, so the adjoint of the
        # whole cascade is the same splitters in reverse order
        return merge if self.direction is Direction.MERGE else merge[::-1]

    def mode_map(self) -> ModeMap:
        return network_map(self.splitters, self.n)


def merge_cascade(n: int) -> ModeMap:
    return CascadeSpec(n, Direction.MERGE).mode_map()


def split_cascade(n: int) -> ModeMap:
    return CascadeSpec(n, Direction.SPLIT).mode_map()


def linear_photon(spatial: int, angle: float) -> dict[ModeId, complex]:
    """Single photon linearly polarized at ``angle`` radians from horizontal.

    Circular amplitudes (1, exp(-2i angle)) / sqrt(2).
    """
    s = 1 / math.sqrt(2)
    return {ModeId(spatial, Pol.R): s, ModeId(spatial, Pol.L): s * cmath.exp(-2j * angle)}


def build_input(n: int) -> ProductPhotonState:
    """One photon per port, port l linearly polarized at angle pi*l/n."""
    if n < 1:
        raise ValueError("need at least one photon")
    return ProductPhotonState(tuple(linear_photon(l, math.pi * l / n) for l in range(n)))


def apply_mode_map(p: ProductPhotonState, u: ModeMap, tol: float = PRUNE_TOL) -> ProductPhotonState:
    index = {m: i for i, m in enumerate(u.in_modes)}
    photons = []
    for vec in p.photons:
        v = np.zeros(len(u.in_modes), dtype=complex)
        for mode, c in vec.items():
            if mode not in index:
                raise ValueError(f"mode {mode!r} is not an input of the mode map")
            v[index[mode]] = c
        w = u.matrix @ v
        photons.append({u.out_modes[i]: complex(c) for i, c in enumerate(w) if abs(c) > tol})
    return ProductPhotonState(tuple(photons), p.global_scale)


def transform_state(s: FockState, u: ModeMap) -> FockState:
    """Apply a mode map to an arbitrary (possibly entangled) Fock state.

    Each basis ket is rewritten as a normalized product of creation
    operators, pushed through ``u`` photon by photon and re-expanded.
    """
    acc: dict = defaultdict(complex)
    for occ, amp in s:
        photons = []
        fact = 1
        for mode, k in occ:
            photons.extend([{mode: 1.0}] * k)
            fact *= math.factorial(k)
        p = ProductPhotonState(tuple(photons), amp / math.sqrt(fact))
        for o, a in expand_product(apply_mode_map(p, u)):
            acc[o] += a
    return FockState(acc, s.photon_number)
