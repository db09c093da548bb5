import numpy as np
import pytest

from chiralcc.codes import (build_2dcc, build_3dcc, build_chiral, build_gauge, build_xyz,
                            code_distance, gauge_center, group_contains, is_stabilizer_element,
                            is_subgroup, logical_structure, native_exponents, noncommuting_pairs,
                            redundancy_relations, tensor_codes, volume_operator)
from chiralcc.codes.analysis import relation_phase
from chiralcc.exceptions import ParameterError, StructureError
from chiralcc.lattice import build_hex_layer
from chiralcc.pauli import PauliOperator, multiply, power


# ==================== Native Factors ====================

@pytest.mark.parametrize('colors,lam,expected', [
    ('AB', 1, (1, 0)),
    ('CD', -1, (1, 0)),
    ('AC', 1, (2, 2)),
    ('BD', -1, (2, 1)),
    ('AD', 1, (0, 1)),
    ('BC', -1, (0, 2)),
])
def test_chiral_natives_for_d3(colors, lam, expected):
    assert native_exponents(colors, lam, 3, alpha=1) == expected


def test_chiral_natives_scale_with_alpha():
    assert native_exponents('AD', 1, 5, alpha=2) == (0, 2)
    assert native_exponents('AC', -1, 5, alpha=2) == (4, 2)


def test_non_coprime_natives_drop_alpha():
    assert native_exponents('AD', 1, 4, alpha=2) == (0, 1)
    assert native_exponents('BC', -1, 4, alpha=2) == (0, 3)
    assert native_exponents('AC', 1, 4, alpha=2) == (3, 2)


def test_xyz_natives():
    assert native_exponents('AB', -1, 2, family='xyz') == (1, 0)
    assert native_exponents('CA', 1, 2, family='xyz') == (1, 1)
    assert native_exponents('AD', -1, 2, family='xyz') == (0, 1)
    with pytest.raises(ParameterError):
        native_exponents('AB', 1, 2, family='3dcc')


# ==================== Generators ====================

@pytest.mark.parametrize('d,alpha', [(2, 1), (3, 1), (4, 1), (5, 2), (6, 1)])
def test_chiral_generators_commute(torus, d, alpha):
    code = build_chiral(torus, d, alpha)
    assert noncommuting_pairs(code) == []
    assert len(code) == len(torus.faces)
    for g in code.generators[:12]:
        assert power(g, d) == power(g, 0)


def test_xyz_generators_are_paulis(xyz_torus, torus):
    assert noncommuting_pairs(xyz_torus) == []
    for source, g in zip(xyz_torus.sources, xyz_torus.generators):
        face = torus.faces[source[1]]
        assert g.weight == len(face.vertices)
        assert power(g, 2).is_identity() and power(g, 2).phase == 0


def test_face_generator_lookup(chiral3_torus, torus):
    g = chiral3_torus.generator_for(('face', 5))
    assert sorted(g.support.tolist()) == sorted(torus.faces[5].vertices)
    assert chiral3_torus.to_dict()['generators'][5]['source'] == ['face', 5]


def test_non_coprime_code_is_flagged(torus):
    assert build_chiral(torus, 4, 2).warnings == ('non_coprime',)
    assert build_chiral(torus, 3, 1).warnings == ()


def test_invalid_dimensions(torus):
    with pytest.raises(ParameterError):
        build_chiral(torus, 1, 1)
    with pytest.raises(ParameterError):
        build_chiral(torus, 3, 1.5)


def test_invalid_lattice_is_rejected(torus):
    broken = torus.with_signs(np.ones(torus.n, dtype=np.int64))
    with pytest.raises(StructureError):
        build_xyz(broken)


def test_syndrome_of_single_site_error(chiral3_torus, torus):
    error = PauliOperator.single_site(torus.n, 3, 0, x=1)
    syndrome = chiral3_torus.syndrome(error)
    excited = set(np.flatnonzero(syndrome).tolist())
    # X commutes with the X factors of AB and CD faces
    expected = {f for f in torus.faces_of(0) if torus.faces[f].colors not in ('AB', 'CD')}
    assert excited == expected
    batch = chiral3_torus.syndromes(error.x[None, :], error.z[None, :])
    assert (batch[0] == syndrome).all()


# ==================== Gauge Group ====================

def test_xyz_code_lies_in_gauge_group(xyz_torus, torus):
    result = is_subgroup(xyz_torus, build_gauge(torus, 2))
    assert result
    assert len(result.witness) == len(xyz_torus)


def test_chiral_code_lies_in_gauge_group(chiral3_torus, torus):
    assert is_subgroup(chiral3_torus, build_gauge(torus, 3)).contained


def test_gauge_center_holds_volume_operators(sphere):
    gauge = build_gauge(sphere, 2)
    center = gauge_center(gauge)
    assert len(center)
    for volume in sphere.volumes:
        assert group_contains(center, volume_operator(sphere, volume.id, 'x'), 2) is not None


def test_subgroup_needs_shared_register(xyz_torus, sphere):
    with pytest.raises(StructureError):
        is_subgroup(xyz_torus, build_gauge(sphere, 2))


# ==================== Redundancy ====================

def test_xyz_torus_redundancy(xyz_torus):
    report = redundancy_relations(xyz_torus)
    assert report.count == 35
    assert report.local == 31
    assert report.other == 4
    assert set(report.to_dict()) == {'count', 'local', 'other', 'orders', 'signed_relations'}


def test_chiral_torus_redundancy(chiral3_torus):
    report = redundancy_relations(chiral3_torus)
    assert report.count == 32
    assert report.local == 32
    for a in report.relations:
        assert relation_phase(chiral3_torus, a) in range(6)


# ==================== Logical Structure ====================

def test_cube8_xyz_logicals(cube8):
    code = build_xyz(cube8)
    structure = logical_structure(code)
    assert structure.group.to_list() == [2, 2, 2]
    assert len(structure.pairs) == 3
    distance = code_distance(code, 3, structure)
    assert distance.value == 2
    assert distance.exact
    assert not np.any(code.syndrome(distance.witness))


def test_tetra15_xyz_logicals(tetra15):
    code = build_xyz(tetra15)
    structure = logical_structure(code)
    assert structure.group.to_list() == [2]
    assert structure.k == 1
    assert code_distance(code, 3, structure).render() == '3'


def test_distance_cap_is_reported(tetra15):
    result = code_distance(build_xyz(tetra15), weight_cap=2)
    assert not result.exact
    assert result.render() == '≥3'
    assert result.to_dict()['text'] == '≥3'


def test_xyz_torus_logicals(xyz_torus):
    structure = logical_structure(xyz_torus)
    assert structure.group.to_list() == [2, 2, 2]
    x_bar, z_bar = structure.pairs[0]
    assert structure.commutation.any()
    assert multiply(x_bar.operator, z_bar.operator) != multiply(z_bar.operator, x_bar.operator)


@pytest.mark.parametrize('d,expected', [(3, []), (5, []), (4, [2, 2, 2]), (6, [2, 2, 2])])
def test_chiral_torus_logicals(torus, d, expected):
    structure = logical_structure(build_chiral(torus, d, 1))
    assert structure.group.to_list() == expected


def test_stabilizer_membership(chiral3_torus):
    structure = logical_structure(chiral3_torus)
    element = multiply(chiral3_torus.generators[0], power(chiral3_torus.generators[7], 2))
    assert is_stabilizer_element(chiral3_torus, element, structure)


def test_logicals_are_not_stabilizers(xyz_torus):
    structure = logical_structure(xyz_torus)
    for rep in structure.representatives:
        assert not np.any(xyz_torus.syndrome(rep.operator))
        assert not is_stabilizer_element(xyz_torus, rep.operator, structure)


# ==================== Other Families ====================

def test_3d_color_code_on_torus(torus):
    code = build_3dcc(torus)
    assert noncommuting_pairs(code) == []
    assert logical_structure(code).group.to_list() == [2] * 9


def test_2d_color_code_on_hex_layer():
    layer = build_hex_layer(2, 2)
    code = build_2dcc(layer)
    assert code.n == 24
    assert len(code) == 24
    assert logical_structure(code).group.to_list() == [2, 2, 2, 2]


def test_boundary_code(surface_code, slab):
    assert surface_code.n == 54
    assert surface_code.boundary == {'color': 'A', 'region': 'bottom', 'family': 'chiral'}
    assert noncommuting_pairs(surface_code) == []
    v = surface_code.lattice_site(0)
    assert surface_code.code_site(v) == 0
    inner = next(w for w in range(slab.n) if w not in surface_code.site_index)
    with pytest.raises(ParameterError):
        surface_code.code_site(inner)


def test_tensor_copies(cube8):
    code = build_xyz(cube8)
    stacked = tensor_codes([code, code])
    assert stacked.n == 16
    assert len(stacked) == 2 * len(code)
    assert stacked.sources[0][0] == 'copy0'
    assert stacked.sources[-1][0] == 'copy1'
    assert stacked.copies == (code, code)
    assert logical_structure(stacked).group.to_list() == [2] * 6
    with pytest.raises(StructureError):
        tensor_codes([])
