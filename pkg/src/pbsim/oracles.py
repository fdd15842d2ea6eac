"""Brute-force reference computations used to cross-check the fast paths.

Nothing in here is used by the simulation pipeline itself. These are
deliberately naive so that they share no code with ``fock.expand_product``
or ``optics.transform_state``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict

import numpy as np

from .fock import FockState, ModeId, ProductPhotonState, occupation


def brute_force_expand(p: ProductPhotonState) -> FockState:
    """Expand by enumerating every photon -> mode assignment tuple.

    Each tuple contributes prod_l v_l[m_l] to the normally ordered monomial
    prod_m (a_m^dag)^{n_m}, which acting on vacuum is sqrt(prod n_m!) |n>.
    """
    vecs = [sorted(v.items()) for v in p.photons]
    sums: dict = defaultdict(complex)
    for choice in itertools.product(*vecs):
        coeff = p.global_scale
        for _, c in choice:
            coeff *= c
        occ = occupation(Counter(m for m, _ in choice))
        sums[occ] += coeff
    out = {}
    for occ, s in sums.items():
        out[occ] = s * math.sqrt(math.prod(math.factorial(k) for _, k in occ))
    return FockState(out, p.photon_number)


def permanent(a: np.ndarray) -> complex:
    """Permanent by direct sum over permutations. Only for small matrices."""
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    total = 0j
    for perm in itertools.permutations(range(n)):
        term = 1.0 + 0j
        for i, j in enumerate(perm):
            term *= a[i, j]
        total += term
    return total


def _ports(occ, index: dict[ModeId, int]) -> list[int]:
    out = []
    for m, k in occ:
        out.extend([index[m]] * k)
    return out


def permanent_transform(
    s: FockState,
    matrix: np.ndarray,
    in_modes: list[ModeId],
    out_modes: list[ModeId],
) -> FockState:
    """Transform a Fock state by a linear mode map using permanents.

    <out|U|in> = perm(U[out_ports, in_ports]) / sqrt(prod n_in! prod n_out!).
    Every output configuration with the right photon number is enumerated.
    """
    in_index = {m: i for i, m in enumerate(in_modes)}
    n = s.photon_number
    out_configs = itertools.combinations_with_replacement(range(len(out_modes)), n)
    out_configs = list(out_configs)
    result: dict = defaultdict(complex)
    for occ_in, amp in s:
        cols = _ports(occ_in, in_index)
        norm_in = math.prod(math.factorial(k) for _, k in occ_in)
        for cfg in out_configs:
            counts = Counter(cfg)
            norm_out = math.prod(math.factorial(k) for k in counts.values())
            sub = matrix[np.ix_(list(cfg), cols)]
            val = permanent(sub) / math.sqrt(norm_in * norm_out)
            if val != 0:
                occ_out = occupation({out_modes[i]: k for i, k in counts.items()})
                result[occ_out] += amp * val
    return FockState(result, n)
