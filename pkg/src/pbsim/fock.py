"""Sparse multimode bosonic number states with circular polarization labels.

States are stored as a map from canonical occupation tuples to complex
amplitudes. An occupation tuple is a sorted, zero-free tuple of
``(ModeId, count)`` pairs, so it can be used directly as a dict key.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import IntEnum
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

PRUNE_TOL = 1e-14


class Pol(IntEnum):
    R = 0
    L = 1


class ModeId(NamedTuple):
    """One optical mode: a spatial port plus a polarization slot.

    Ordering is lexicographic, spatial first and R before L.
    """

    spatial: int
    pol: Pol

    def __repr__(self) -> str:
        return f"({self.spatial},{self.pol.name})"


Occupation = tuple  # tuple[tuple[ModeId, int], ...], canonical


def R(spatial: int) -> ModeId:
    return ModeId(spatial, Pol.R)


def L(spatial: int) -> ModeId:
    return ModeId(spatial, Pol.L)


def occupation(counts: Mapping[ModeId, int] | Iterable[tuple[ModeId, int]]) -> Occupation:
    """Canonicalize a mode->count mapping into a hashable occupation tuple."""
    items = counts.items() if isinstance(counts, Mapping) else counts
    merged: dict[ModeId, int] = {}
    for mode, k in items:
        if k < 0:
            raise ValueError(f"negative photon count {k} in mode {mode!r}")
        if k:
            mode = ModeId(int(mode[0]), Pol(mode[1]))
            merged[mode] = merged.get(mode, 0) + int(k)
    return tuple(sorted(merged.items()))


def occupation_total(occ: Occupation) -> int:
    return sum(k for _, k in occ)


def _add_photon(occ: Occupation, mode: ModeId) -> tuple[Occupation, int]:
    """Return (occ + one photon in mode, previous count in mode)."""
    out = list(occ)
    for i, (m, k) in enumerate(out):
        if m == mode:
            out[i] = (m, k + 1)
            return tuple(out), k
        if m > mode:
            out.insert(i, (mode, 1))
            return tuple(out), 0
    out.append((mode, 1))
    return tuple(out), 0


class FockState:
    """Superposition of occupation-basis kets with a fixed total photon number.

    Amplitudes smaller than ``PRUNE_TOL`` in magnitude are dropped on
    construction. The state need not be normalized; post-selected states
    carry their success probability as their squared norm.
    """

    __slots__ = ("_terms", "photon_number")

    def __init__(
        self,
        terms: Mapping | Iterable = (),
        photon_number: int | None = None,
        *,
        tol: float = PRUNE_TOL,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Occupation, complex] = defaultdict(complex)
        for occ, amp in items:
            acc[occupation(occ)] += complex(amp)
        kept = {k: v for k, v in acc.items() if abs(v) > tol}
        totals = {occupation_total(k) for k in kept}
        if len(totals) > 1:
            raise ValueError(f"terms mix photon numbers {sorted(totals)}")
        if photon_number is None:
            photon_number = totals.pop() if totals else 0
        elif totals and totals != {photon_number}:
            raise ValueError(
                f"terms have {totals.pop()} photons, expected {photon_number}"
            )
        self._terms = dict(sorted(kept.items()))
        self.photon_number = int(photon_number)

    @classmethod
    def ket(cls, counts: Mapping[ModeId, int], amplitude: complex = 1.0) -> FockState:
        occ = occupation(counts)
        return cls({occ: amplitude}, occupation_total(occ))

    @classmethod
    def vacuum(cls, amplitude: complex = 1.0) -> FockState:
        return cls({(): amplitude}, 0)

    @classmethod
    def zero(cls, photon_number: int) -> FockState:
        return cls({}, photon_number)

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return MappingProxyType(self._terms)

    def amplitude(self, counts: Mapping[ModeId, int] | Occupation) -> complex:
        return self._terms.get(occupation(counts), 0j)

    def modes(self) -> set[ModeId]:
        return {m for occ in self._terms for m, _ in occ}

    def is_zero(self) -> bool:
        return not self._terms

    def __iter__(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __mul__(self, c: complex) -> FockState:
        return FockState({k: v * c for k, v in self._terms.items()}, self.photon_number)

    __rmul__ = __mul__

    def __add__(self, other: FockState) -> FockState:
        if other.photon_number != self.photon_number:
            raise ValueError("cannot add states with different photon numbers")
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0j) + v
        return FockState(acc, self.photon_number)

    def __sub__(self, other: FockState) -> FockState:
        return self + other * -1

    def relabel(self, fn: Callable[[ModeId], ModeId]) -> FockState:
        """Rename modes. ``fn`` must be injective on the modes in use."""
        out = {}
        for occ, amp in self._terms.items():
            new = occupation([(fn(m), k) for m, k in occ])
            if len(new) != len(occ):
                raise ValueError("relabeling merged two occupied modes")
            out[new] = amp
        return FockState(out, self.photon_number)

    def to_dict(self) -> dict:
        return {
            "photons": self.photon_number,
            "terms": [
                {
                    "occ": [[m.spatial, m.pol.name, k] for m, k in occ],
                    "re": amp.real,
                    "im": amp.imag,
                }
                for occ, amp in self._terms.items()
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> FockState:
        terms = []
        for t in data["terms"]:
            occ = [(ModeId(int(s), Pol[p]), int(k)) for s, p, k in t["occ"]]
            terms.append((occ, complex(t["re"], t["im"])))
        return cls(terms, int(data["photons"]))

    @classmethod
    def from_json(cls, text: str) -> FockState:
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        if not self._terms:
            return f"FockState(0, photons={self.photon_number})"
        parts = []
        for occ, amp in self._terms.items():
            label = ",".join(f"{m.spatial}{m.pol.name}:{k}" for m, k in occ)
            parts.append(f"({amp.real:.6g}{amp.imag:+.6g}j)|{label}>")
        return " + ".join(parts)


@dataclass(frozen=True)
class ProductPhotonState:
    """Unentangled photons, each a linear combination of creation operators.

    Represents ``global_scale * prod_l (sum_m photons[l][m] a_m^dag) |vac>``.
    """

    photons: tuple[Mapping[ModeId, complex], ...]
    global_scale: complex = 1.0

    def __post_init__(self):
        cleaned = []
        for i, vec in enumerate(self.photons):
            v = {ModeId(int(m[0]), Pol(m[1])): complex(c) for m, c in vec.items() if c != 0}
            if not v:
                raise ValueError(f"photon {i} has no nonzero amplitude")
            cleaned.append(MappingProxyType(v))
        object.__setattr__(self, "photons", tuple(cleaned))
        object.__setattr__(self, "global_scale", complex(self.global_scale))

    @property
    def photon_number(self) -> int:
        return len(self.photons)

    def modes(self) -> set[ModeId]:
        return {m for v in self.photons for m in v}


def expand_product(p: ProductPhotonState) -> FockState:
    """Expand a product of creation-operator sums into the occupation basis.

    Photons are applied one at a time; creating a photon in a mode already
    holding k photons contributes the bosonic factor sqrt(k + 1).
    """
    acc: dict[Occupation, complex] = {(): p.global_scale}
    for vec in p.photons:
        nxt: dict[Occupation, complex] = defaultdict(complex)
        for occ, amp in acc.items():
            for mode, c in vec.items():
                new, k = _add_photon(occ, mode)
                nxt[new] += amp * c * math.sqrt(k + 1)
        acc = nxt
    return FockState(acc, p.photon_number)


def inner_product(a: FockState, b: FockState) -> complex:
    """<a|b>, antilinear in ``a``. States of different photon number are orthogonal."""
    if a.photon_number != b.photon_number:
        return 0j
    if len(a) > len(b):
        return inner_product(b, a).conjugate()
    bt = b.terms
    return sum((amp.conjugate() * bt[occ] for occ, amp in a if occ in bt), 0j)


def norm_sq(a: FockState) -> float:
    return math.fsum(abs(v) ** 2 for _, v in a)


def normalize(a: FockState) -> tuple[FockState, float]:
    """Return the unit-norm state and the original squared norm."""
    n2 = norm_sq(a)
    if n2 == 0.0:
        raise ValueError("empty post-selected state")
    return a * (1.0 / math.sqrt(n2)), n2


def tensor(
    a: FockState, b: FockState, relabel: Callable[[ModeId], ModeId] | None = None
) -> FockState:
    """Tensor product of states on disjoint mode sets.

    ``relabel`` is applied to the modes of ``b`` first, which allows two
    copies of the same state to be combined.
    """
    if relabel is not None:
        b = b.relabel(relabel)
    if a.modes() & b.modes():
        raise ValueError("tensor requires disjoint mode sets")
    out = {}
    for oa, va in a:
        for ob, vb in b:
            out[oa + ob] = va * vb
    return FockState(out, a.photon_number + b.photon_number)


def equivalent(a: FockState, b: FockState, tol: float = 1e-10) -> bool:
    """True if ``a`` and ``b`` lie on the same ray (equal up to scale and phase).

    Uses |<a|b>|^2 = |a|^2 |b|^2, compared relative to |a|^2 |b|^2.
    """
    na, nb = norm_sq(a), norm_sq(b)
    if na == 0.0 or nb == 0.0:
        return na == nb
    return abs(1.0 - abs(inner_product(a, b)) ** 2 / (na * nb)) <= tol
