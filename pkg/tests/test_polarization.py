import cmath
import math

import numpy as np
import pytest

from pbsim.fock import FockState, L, R, tensor
from pbsim.optics import ModeMap, spatial_modes
from pbsim.polarization import (
    cat_linear_closed_form,
    circular_distribution,
    difference_distribution,
    linear_basis_map,
    linear_distribution,
    rotation_symmetry_defect,
    stokes_expectations,
)
from pbsim.postselect import closed_form_output
from pbsim.optics import transform_state
from pbsim.mismatch import MismatchScenario, line_channel, mismatch_output


def cat4():
    return closed_form_output(4)


def test_four_r_overlaps_in_linear_basis():
    phi = 0.37
    out = transform_state(FockState.ket({R(0): 4}), linear_basis_map(phi))
    for k in range(5):
        want = math.sqrt(math.comb(4, k)) / 4 * cmath.exp(-4j * phi)
        # k photons in the perpendicular slot
        occ = {R(0): 4 - k, L(0): k}
        assert out.amplitude(occ) == pytest.approx(want, abs=1e-12)


def test_four_r_point_mass_circular():
    d = circular_distribution(FockState.ket({R(0): 4}))
    assert d.as_array().tolist() == [1.0, 0, 0, 0, 0]


def test_cat_circular():
    d = circular_distribution(cat4())
    assert d.as_array() == pytest.approx([0.5, 0, 0, 0, 0.5], abs=1e-14)
    assert d.basis == "circular"


@pytest.mark.parametrize("j", range(64))
def test_cat_linear_matches_fringes(j):
    phi = j * math.pi / 64
    d = linear_distribution(cat4(), phi)
    ref = cat_linear_closed_form(phi)
    assert [d[k] for k in d.support()] == pytest.approx([ref[k] for k in d.support()], abs=1e-10)
    d2 = linear_distribution(cat4(), phi + math.pi / 4)
    assert d.as_array() == pytest.approx(d2.as_array(), abs=1e-10)


def test_special_angles():
    assert linear_distribution(cat4(), math.pi / 8)[0] == pytest.approx(0.75, abs=1e-12)
    d = linear_distribution(cat4(), math.pi / 16)
    assert d.as_array() * 16 == pytest.approx([1, 4, 6, 4, 1], abs=1e-10)


def test_circular_through_difference_distribution():
    # a diagonal phase map leaves n_R - n_L untouched
    modes = spatial_modes([0])
    basis = ModeMap(modes, modes, np.diag([cmath.exp(0.3j), cmath.exp(-1.1j)]))
    s = closed_form_output(3) + FockState.ket({R(0): 1, L(0): 2}, 0.2j)
    a = circular_distribution(s)
    b = difference_distribution(s, basis)
    assert a.as_array() == pytest.approx(b.as_array(), abs=1e-14)


def test_extra_ports_pass_through():
    s = tensor(cat4(), FockState.ket({R(1): 1}))
    assert linear_distribution(s, 0.2).as_array() == pytest.approx(
        linear_distribution(cat4(), 0.2).as_array(), abs=1e-12
    )


def test_multi_port_channel():
    s = FockState.ket({R(0): 1, L(3): 1}) + FockState.ket({R(0): 2})
    with pytest.raises(ValueError):
        circular_distribution(s, (0,))
    d = circular_distribution(FockState.ket({R(0): 1, R(3): 1}), (0, 3))
    assert d[2] == 1.0


def test_stokes():
    assert stokes_expectations(cat4()) == pytest.approx((0, 0, 0), abs=1e-12)
    assert stokes_expectations(FockState.ket({R(0): 4})) == pytest.approx((0, 0, 4), abs=1e-12)
    # one mismatched photon: 3:1 weight on dn = -2 against +2 in H/V
    sc = MismatchScenario()
    s1, s2, s3 = stokes_expectations(mismatch_output(sc), line_channel(sc))
    assert s1 == pytest.approx(-1, abs=1e-12)
    assert s2 == pytest.approx(0, abs=1e-12)
    assert s3 == pytest.approx(0, abs=1e-12)


def test_h_photon_is_horizontal():
    h = FockState.ket({R(0): 1}) + FockState.ket({L(0): 1})
    d = linear_distribution(h, 0.0)
    assert d[1] == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("n", range(2, 7))
def test_cat_rotation_symmetric(n):
    assert rotation_symmetry_defect(closed_form_output(n), n) < 1e-12


def test_rotation_defect_edge_cases():
    assert rotation_symmetry_defect(cat4(), 1) < 1e-12
    # a single circular Fock ket only picks up a global phase
    assert rotation_symmetry_defect(FockState.ket({R(0): 3, L(0): 1}), 4) < 1e-12
    mixed = cat4() + FockState.ket({R(0): 3, L(0): 1}, 0.1)
    assert rotation_symmetry_defect(mixed, 4) > 0.01
    with pytest.raises(ValueError):
        rotation_symmetry_defect(FockState.zero(4), 4)


def test_empty_state_raises():
    with pytest.raises(ValueError):
        circular_distribution(FockState.zero(4))
