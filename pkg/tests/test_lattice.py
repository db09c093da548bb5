import json
from collections import defaultdict

import networkx as nx
import numpy as np
import pytest

from chiralcc.exceptions import NotBipartiteError, ParameterError, StructureError, UnsupportedError
from chiralcc.lattice import (ColorLattice, betti2, bipartition, boundary_chirality, boundary_maps,
                              build_hex_layer, build_slab, build_torus, lattice_from_spec)
from chiralcc.utils import parse_lattice_spec, validate_lattice_spec


# ==================== Cell Counts ====================

def test_cube8_counts(cube8):
    assert cube8.counts == {'V': 8, 'E': 12, 'F': 6, 'C': 1}
    assert cube8.boundary_colors() == ['B', 'C', 'D']
    assert sorted(f.colors for f in cube8.faces) == ['AB', 'AB', 'AC', 'AC', 'AD', 'AD']
    assert all(f.is_boundary for f in cube8.faces)


def test_tetra15_counts(tetra15):
    assert tetra15.n == 15
    assert len(tetra15.volumes) == 4
    assert sorted(c.color for c in tetra15.volumes) == ['A', 'B', 'C', 'D']


def test_sphere_is_closed(sphere):
    assert sphere.is_closed
    assert sphere.counts['V'] == 16
    assert sphere.counts['F'] == 24
    assert sphere.counts['C'] == 8


def test_torus_counts(torus):
    assert torus.counts == {'V': 192, 'E': 384, 'F': 224, 'C': 32}
    assert torus.is_closed
    assert torus.periodic


def test_torus_blocks_hold_one_volume_of_each_color(torus):
    blocks = defaultdict(list)
    for volume in torus.volumes:
        blocks[tuple(torus.geometry.volume_cells[volume.id])].append(volume.color)
    assert len(blocks) == 8
    for colors in blocks.values():
        assert sorted(colors) == ['A', 'B', 'C', 'D']


def test_every_site_sees_four_volumes_and_six_faces(torus):
    for v in range(torus.n):
        assert len(torus.edges_of(v)) == 4
        assert len(torus.faces_of(v)) == 6
        for u in torus.neighbors(v):
            assert torus.lam[u] == -torus.lam[v]


def test_faces_are_closed_even_cycles(torus):
    for face in torus.faces:
        assert face.closed
        assert len(face.vertices) % 2 == 0
        assert len(face.volumes) == 2


def test_face_lookup(torus):
    f = torus.face_at(0, 'BA')
    assert f == torus.face_at(0, 'AB')
    assert 0 in torus.faces[f].vertices
    e = torus.edge_at(0, 'ABC')
    assert torus.edges[e].colors == 'ABC'
    assert len(torus.faces_of_edge(e)) == 3
    with pytest.raises(StructureError):
        torus.face_at(0, 'AE')


# ==================== Validation ====================

@pytest.mark.parametrize('name', ['cube8', 'tetra15', 'sphere', 'torus', 'slab'])
def test_builders_produce_valid_lattices(name, request):
    lattice = request.getfixturevalue(name)
    report = lattice.validate()
    assert report.passed, report.violations[:3]
    assert report.to_dict() == {'passed': True, 'violations': []}


def test_validation_reports_wrong_signs(torus):
    report = torus.with_signs(np.ones(torus.n, dtype=np.int64)).validate()
    assert not report.passed
    assert report.kinds() == ['bipartition']


def test_bipartition_matches_lattice_signs(sphere):
    signs = bipartition(sphere)
    assert signs[0] == 1
    assert (signs == sphere.lam).all()


def test_bipartition_rejects_odd_cycle():
    with pytest.raises(NotBipartiteError) as excinfo:
        bipartition(nx.cycle_graph(3))
    assert excinfo.value.cycle_vertex == 1


def test_dual_incidence_round_trips(torus):
    dual = torus.dual
    assert (dual.primal_face_edge_matrix() == torus.face_edge_matrix()).all()
    assert (dual.volume_face_matrix() == torus.edge_vertex_matrix().T).all()
    assert (dual.edge_vertex_matrix().sum(axis=1) == 2).all()


# ==================== Boundaries ====================

def test_slab_boundary_layers(slab):
    assert slab.boundary_regions() == {'bottom': 'A', 'top': 'A'}
    assert len(slab.boundary_sites('A', 'bottom')) == 54
    assert len(slab.boundary_sites('A', 'top')) == 54
    assert slab.boundary_sites('B') == []


def test_slab_layers_have_opposite_chirality(slab):
    assert boundary_chirality(slab, 'bottom') == -boundary_chirality(slab, 'top')
    with pytest.raises(ParameterError):
        boundary_chirality(slab, 'left')


@pytest.mark.parametrize('color', ['B', 'C', 'D'])
def test_slab_accepts_any_boundary_color(color):
    slab = build_slab(2, 2, 1, color)
    assert slab.boundary_colors() == [color]
    assert slab.name == f'slab:2,2,1,{color}'


def test_hex_layer():
    layer = build_hex_layer(2, 2)
    assert layer.n == 24
    assert len(layer.faces) == 12
    # three faces meet at every layer site
    assert sum(len(face) for face in layer.faces) == 3 * layer.n
    assert all(len(face) % 2 == 0 for face in layer.faces)
    assert sorted(set(layer.colors)) == ['B', 'C', 'D']
    for u, w in layer.edges:
        assert layer.lam[u] == -layer.lam[w]


def test_builder_parameters_are_checked():
    with pytest.raises(ParameterError):
        build_torus(1, 2, 2)
    with pytest.raises(ParameterError):
        build_slab(3, 3, 0)
    with pytest.raises(ParameterError):
        build_slab(3, 3, 1, 'E')


# ==================== Homology ====================

def test_boundary_maps_compose_to_zero(torus, sphere):
    for lattice in (torus, sphere):
        d2, d3 = boundary_maps(lattice)
        assert not (d2 @ d3).any()


def test_betti2(torus, sphere):
    assert betti2(torus, 2) == 3
    assert betti2(torus, 3) == 3
    assert betti2(sphere, 2) == 0


def test_homology_needs_closed_lattice(slab, torus):
    with pytest.raises(UnsupportedError):
        boundary_maps(slab)
    with pytest.raises(ParameterError):
        betti2(torus, 1)


# ==================== Serialization and Specs ====================

def test_dict_round_trip_keeps_geometry(torus):
    rebuilt = ColorLattice.from_dict(json.loads(json.dumps(torus.to_dict())))
    assert rebuilt.counts == torus.counts
    assert (rebuilt.lam == torus.lam).all()
    assert (rebuilt.geometry.volume_cells == torus.geometry.volume_cells).all()


def test_lattice_from_json_file(sphere, tmp_path):
    path = tmp_path / 'sphere.json'
    path.write_text(json.dumps(sphere.to_dict()))
    loaded = lattice_from_spec(str(path))
    assert loaded.counts == sphere.counts
    assert loaded.name == 'sphere'


def test_lattice_file_errors(tmp_path):
    with pytest.raises(ParameterError):
        lattice_from_spec(str(tmp_path / 'missing.json'))
    broken = tmp_path / 'broken.json'
    broken.write_text('{not json')
    with pytest.raises(StructureError):
        lattice_from_spec(str(broken))
    empty = tmp_path / 'empty.json'
    empty.write_text('{}')
    with pytest.raises(StructureError):
        lattice_from_spec(str(empty))


@pytest.mark.parametrize('spec,expected', [
    ('cube8', ('cube8', ())),
    ('torus:2,3,4', ('torus', (2, 3, 4))),
    ('slab:3,3,1', ('slab', (3, 3, 1, 'A'))),
    ('slab:4,4,2,C', ('slab', (4, 4, 2, 'C'))),
    ('lattices/mine.json', ('file', ('lattices/mine.json',))),
])
def test_parse_lattice_spec(spec, expected):
    assert parse_lattice_spec(spec) == expected


def test_unknown_specs_are_rejected():
    assert not validate_lattice_spec('torus:2,2')
    assert not validate_lattice_spec('cylinder')
    assert validate_lattice_spec('sphere')
    with pytest.raises(ParameterError):
        parse_lattice_spec('slab:3,3,1,E')
