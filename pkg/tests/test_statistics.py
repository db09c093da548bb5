import numpy as np
import pytest
from sympy import jacobi_symbol

from chiralcc.codes import build_boundary, build_chiral, tensor_codes
from chiralcc.exceptions import ParameterError, StructureError, UnsupportedError
from chiralcc.lattice import boundary_chirality
from chiralcc.pauli import PauliOperator
from chiralcc.topo import (BraidingResult, braiding_phase, bulk_junction_hops,
                           chiral_central_charge, dress_hops, gauss_sum, surface_anyon_string,
                           surface_braiding, surface_junction_hops, syndrome_of, t_junction_phase,
                           tensor_hops)


@pytest.fixture(scope='module')
def boundary_codes(slab):
    cache = {}

    def build(d, alpha, region='bottom'):
        key = (d, alpha, region)
        if key not in cache:
            cache[key] = build_boundary(slab, 'A', 'chiral', d, alpha, region=region)
        return cache[key]
    return build


def expected_central_charge(d, alpha):
    return ((0 if d % 4 == 1 else 2) + (0 if jacobi_symbol(alpha, d) == 1 else 4)) % 8


# ==================== Bulk T-Junctions ====================

def test_xyz_bulk_excitation_is_a_fermion(xyz_torus):
    for center in (0, 17, 101):
        hops = bulk_junction_hops(xyz_torus, center)
        assert len(hops) == 3
        assert t_junction_phase(xyz_torus, hops) == 2


def test_bulk_junction_needs_even_d(chiral3_torus):
    with pytest.raises(UnsupportedError):
        bulk_junction_hops(chiral3_torus, 0)


def test_bulk_hops_of_even_chiral_code_are_point_like(torus):
    code = build_chiral(torus, 4, 1)
    for hop in bulk_junction_hops(code, 0):
        assert (hop.x % 2 == 0).all() and (hop.z % 2 == 0).all()


# ==================== Surface T-Junctions ====================

@pytest.mark.parametrize('d,alpha', [(3, 1), (3, 2), (5, 1), (5, 2)])
def test_surface_spin(boundary_codes, slab, d, alpha):
    code = boundary_codes(d, alpha)
    sites = slab.boundary_sites('A', 'bottom')
    for v in sites[:6]:
        for j in range(1, d):
            hops = surface_junction_hops(code, v, j)
            assert t_junction_phase(code, hops) == (2 * alpha * j * j) % (2 * d)


def test_every_boundary_site_hosts_the_same_anyon(surface_code, slab):
    for v in slab.boundary_sites('A', 'bottom'):
        assert t_junction_phase(surface_code, surface_junction_hops(surface_code, v)) == 2


def test_viewpoint_from_above_follows_layer_handedness(boundary_codes, slab):
    bottom = boundary_codes(3, 1, 'bottom')
    top = boundary_codes(3, 1, 'top')
    v_bottom = slab.boundary_sites('A', 'bottom')[0]
    v_top = slab.boundary_sites('A', 'top')[0]
    above_bottom = t_junction_phase(bottom, surface_junction_hops(bottom, v_bottom,
                                                                  viewpoint='above'))
    above_top = t_junction_phase(top, surface_junction_hops(top, v_top, viewpoint='above'))
    assert above_bottom == (2 * boundary_chirality(slab, 'bottom')) % 6
    assert above_top == (-above_bottom) % 6


def test_dressing_leaves_the_spin_unchanged(surface_code, slab, rng):
    v = slab.boundary_sites('A', 'bottom')[3]
    hops = surface_junction_hops(surface_code, v)
    for _ in range(100):
        assert t_junction_phase(surface_code, dress_hops(surface_code, hops, rng)) == 2


def test_tensor_copies_add_spins(surface_code, slab):
    v = slab.boundary_sites('A', 'bottom')[0]
    hops = surface_junction_hops(surface_code, v)
    stacked = tensor_codes([surface_code, surface_code])
    assert t_junction_phase(stacked, tensor_hops(hops, (0, 1), 2)) == 4
    assert t_junction_phase(stacked, tensor_hops(hops, (1,), 2)) == 2


def test_disjoint_hops_commute_trivially(surface_code):
    n = surface_code.n
    hops = [PauliOperator.single_site(n, 3, 0, x=1), PauliOperator.single_site(n, 3, 20, z=1),
            PauliOperator.single_site(n, 3, 40, x=2)]
    assert t_junction_phase(surface_code, hops) == 0


def test_junction_errors(surface_code, xyz_torus, slab):
    hop = PauliOperator.identity(surface_code.n, 3)
    with pytest.raises(ParameterError):
        t_junction_phase(surface_code, [hop, hop])
    with pytest.raises(StructureError):
        t_junction_phase(surface_code, [hop, hop, PauliOperator.identity(surface_code.n + 1, 3)])
    with pytest.raises(ParameterError):
        surface_junction_hops(xyz_torus, 0)
    v = slab.boundary_sites('A', 'bottom')[0]
    with pytest.raises(ParameterError):
        surface_junction_hops(surface_code, v, viewpoint='below')


# ==================== Braiding ====================

@pytest.mark.parametrize('i,j', [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_surface_braiding_d3(surface_code, i, j):
    result = surface_braiding(surface_code, i, j)
    assert result.invariant
    assert result.exponent == (2 * i * j) % 3
    assert result.phase == (2 * result.exponent) % 6
    assert result.spin == 2


@pytest.mark.parametrize('d,alpha', [(3, 1), (3, 2), (5, 1), (5, 2)])
def test_surface_braiding_is_not_rescaled(boundary_codes, d, alpha):
    code = boundary_codes(d, alpha)
    result = surface_braiding(code)
    assert result.charge in {(2 * alpha) % d, (-2 * alpha) % d}
    assert result.spin == (2 * alpha) % (2 * d)
    for i, j in [(1, 1), (2, 3), (d - 1, d - 1)]:
        assert surface_braiding(code, i, j).exponent == (2 * alpha * i * j) % d


def test_oriented_surface_string_carries_the_junction_anyon(boundary_codes):
    code = boundary_codes(5, 2)
    string, region, charge, spin = surface_anyon_string(code)
    enclosed = braiding_phase(code, region, string)
    assert enclosed.invariant
    assert enclosed.exponent == 4
    assert spin == 4


def test_braiding_region_counts_enclosed_charge(surface_code, slab):
    op = PauliOperator.single_site(surface_code.n, 3, 0, x=1)
    charges = syndrome_of(surface_code, op).face_values()
    assert charges
    everything = braiding_phase(surface_code, slab.boundary_faces('A', 'bottom'), op, 2)
    assert everything.invariant
    assert everything.exponent == (2 * sum(charges.values())) % 3
    nothing = braiding_phase(surface_code, [], op)
    assert nothing.exponent == 0 and nothing.invariant


def test_braiding_result_dict():
    result = BraidingResult(exponent=2, d=3, invariant=True)
    assert result.to_dict() == {'exponent': 2, 'phase_exponent': 4, 'd': 3, 'invariant': True}


def test_braiding_needs_boundary_code(chiral3_torus):
    with pytest.raises(ParameterError):
        surface_braiding(chiral3_torus)


# ==================== Central Charge ====================

@pytest.mark.parametrize('d', [3, 5, 7, 9, 11, 13])
def test_central_charge_matches_jacobi_rule(d):
    for alpha in range(1, d):
        if np.gcd(alpha, d) != 1:
            continue
        assert chiral_central_charge(d, alpha) == expected_central_charge(d, alpha)


def test_central_charge_values():
    assert chiral_central_charge(3, 1) == 2
    assert chiral_central_charge(5, 1) == 0
    assert chiral_central_charge(5, 2) == 4


def test_gauss_sum_norm():
    value = complex(gauss_sum(7, 3).evalf(30))
    assert abs(abs(value) ** 2 - 7) < 1e-9


def test_central_charge_regime():
    with pytest.raises(UnsupportedError):
        chiral_central_charge(4, 1)
    with pytest.raises(ParameterError):
        chiral_central_charge(9, 3)
