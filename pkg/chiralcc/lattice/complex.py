"""
Four-colorable 3D cell complexes.

A ColorLattice is built from its dual: a set of colored dual vertices (the
volumes, plus fictitious vertices standing for colored boundaries) and one
tetrahedron per primal vertex whose four corners carry the four colors. Every
primal cell is read off the dual:

* vertex (qudit site)  -> tetrahedron
* edge                 -> dual triangle shared by exactly two tetrahedra
* face                 -> dual edge with at least one real endpoint
* volume               -> real dual vertex

On small periodic lattices two cells can meet along more than one face, so dual
simplices are keyed by their real members together with the displacement of the
volume centres, not by vertex ids alone.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import networkx as nx
import numpy as np

from ..exceptions import NotBipartiteError, StructureError

logger = logging.getLogger(__name__)

COLORS = ('A', 'B', 'C', 'D')
COLOR_INDEX = {color: i for i, color in enumerate(COLORS)}
PAIR_INDICES = tuple(combinations(range(4), 2))
FACE_COLORS = tuple(COLORS[i] + COLORS[j] for i, j in PAIR_INDICES)
EDGE_COLORS = ('BCD', 'ACD', 'ABD', 'ABC')  # indexed by the omitted color
PAIR_POSITION = {pair: k for k, pair in enumerate(PAIR_INDICES)}


def face_color_index(colors):
    """Position of a two-letter face color in FACE_COLORS (order-insensitive)."""
    key = ''.join(sorted(colors.upper()))
    if key not in FACE_COLORS:
        raise StructureError(f"Unknown face color {colors!r}")
    return FACE_COLORS.index(key)


# ==================== Cell Records ====================

@dataclass(frozen=True)
class DualVertex:
    color: str
    real: bool = True
    label: str = ''


@dataclass(frozen=True)
class Face:
    """A 2-cell: dual edge between ``dual[0]`` and ``dual[1]`` (color order)."""

    id: int
    colors: str
    dual: tuple
    vertices: tuple
    volumes: tuple
    closed: bool = True

    @property
    def is_boundary(self):
        return len(self.volumes) < 2


@dataclass(frozen=True)
class Edge:
    id: int
    colors: str
    dual: tuple
    vertices: tuple


@dataclass(frozen=True)
class Volume:
    id: int
    color: str
    dual: int
    faces: tuple
    vertices: tuple


@dataclass(frozen=True)
class Geometry:
    """
    Embedding data for generated lattices.

    ``tet_centers[v, i]`` is the unwrapped centre of the color-i volume at site v,
    in the chart around ``positions[v]``; for a fictitious corner it is the centre
    of the cell that was removed to make the boundary.
    """

    positions: np.ndarray
    tet_centers: np.ndarray
    volume_centers: np.ndarray
    volume_cells: np.ndarray
    periods: tuple = ()


@dataclass
class ValidationReport:
    """Every violation found by ColorLattice.validate, as (kind, detail) pairs."""

    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def add(self, kind, detail):
        self.violations.append((kind, detail))

    def kinds(self):
        return sorted({kind for kind, _ in self.violations})

    def to_dict(self):
        return {
            'passed': self.passed,
            'violations': [{'kind': kind, 'detail': detail} for kind, detail in self.violations],
        }


# ==================== Color Lattice ====================

class ColorLattice:
    """
    Immutable four-colorable lattice with bipartition signs.

    Args:
        dual_vertices: Sequence of DualVertex
        tets: (V, 4) array; ``tets[v, i]`` is the dual vertex of color COLORS[i] at site v
        lam: Optional (V,) array of +-1 signs; computed by bipartition when omitted
        geometry: Optional Geometry
        name: Human-readable name
        periodic: True for lattices built on a torus
    """

    def __init__(self, dual_vertices, tets, lam=None, geometry=None, name='', periodic=False):
        self.dual_vertices = tuple(dual_vertices)
        self.tets = np.array(tets, dtype=np.int64).reshape(-1, 4)
        self.tets.setflags(write=False)
        self.geometry = geometry
        self.name = name
        self.periodic = periodic
        if self.tets.size and (self.tets.min() < 0 or self.tets.max() >= len(self.dual_vertices)):
            raise StructureError("Tetrahedron refers to an unknown dual vertex")
        self._real = np.array([dv.real for dv in self.dual_vertices], dtype=bool)
        self._build_cells()
        if lam is None:
            lam = bipartition(self)
        lam = np.array(lam, dtype=np.int64)
        if lam.shape != (self.n,):
            raise StructureError(f"Sign vector has shape {lam.shape}, expected ({self.n},)")
        lam.setflags(write=False)
        self.lam = lam
        logger.debug(f"Built lattice {name or '<unnamed>'}: V={self.n} E={len(self.edges)} "
                     f"F={len(self.faces)} C={len(self.volumes)}")

    # ==================== Construction ====================

    def _centers(self, v):
        if self.geometry is None:
            return None
        return self.geometry.tet_centers[v]

    def _key(self, v, members):
        ids = [int(self.tets[v, i]) for i in members]
        fictitious = tuple(sorted(x for x in ids if not self._real[x]))
        centers = self._centers(v)
        real = sorted((x, i) for x, i in zip(ids, members) if self._real[x])
        if centers is None or not real:
            return fictitious, tuple(x for x, _ in real)
        ref = centers[real[0][1]]
        return fictitious, tuple((x, tuple(int(c) for c in centers[i] - ref)) for x, i in real)

    def _build_cells(self):
        V = self.tets.shape[0]
        volume_ids = [i for i, dv in enumerate(self.dual_vertices) if dv.real]
        self._volume_of_dual = {dual: k for k, dual in enumerate(volume_ids)}

        triangle_members = {}
        for v in range(V):
            for omit in range(4):
                members = tuple(i for i in range(4) if i != omit)
                triangle_members.setdefault(self._key(v, members), []).append((v, omit))

        self.tet_edges = np.full((V, 4), -1, dtype=np.int64)
        edges = []
        self._triangle_multiplicity = {}
        for key, members in triangle_members.items():
            self._triangle_multiplicity[key] = len(members)
            if len(members) != 2:
                continue
            (u, omit), (w, _) = members
            dual = tuple(int(self.tets[u, i]) for i in range(4) if i != omit)
            edge = Edge(id=len(edges), colors=EDGE_COLORS[omit], dual=dual, vertices=(u, w))
            edges.append(edge)
            self.tet_edges[u, omit] = edge.id
            self.tet_edges[w, omit] = edge.id

        pair_members = {}
        for v in range(V):
            for k, (i, j) in enumerate(PAIR_INDICES):
                a, b = self.tets[v, i], self.tets[v, j]
                if not (self._real[a] or self._real[b]):
                    continue
                pair_members.setdefault(self._key(v, (i, j)), []).append((v, k))

        self.tet_faces = np.full((V, 6), -1, dtype=np.int64)
        faces = []
        for key, members in pair_members.items():
            v0, k = members[0]
            i, j = PAIR_INDICES[k]
            dual = (int(self.tets[v0, i]), int(self.tets[v0, j]))
            sites = [v for v, _ in members]
            order, closed = self._cycle(sites, i, j, edges)
            volumes = tuple(self._volume_of_dual[x] for x in dual if self._real[x])
            face = Face(id=len(faces), colors=FACE_COLORS[k], dual=dual, vertices=tuple(order),
                        volumes=volumes, closed=closed)
            faces.append(face)
            for v in sites:
                self.tet_faces[v, k] = face.id

        self.edges = tuple(edges)
        self.faces = tuple(faces)
        self.tet_edges.setflags(write=False)
        self.tet_faces.setflags(write=False)

        volume_faces = {k: [] for k in range(len(volume_ids))}
        for face in self.faces:
            for c in face.volumes:
                volume_faces[c].append(face.id)
        volumes = []
        for k, dual in enumerate(volume_ids):
            color_index = COLOR_INDEX[self.dual_vertices[dual].color]
            sites = tuple(int(v) for v in np.flatnonzero(self.tets[:, color_index] == dual))
            volumes.append(Volume(id=k, color=self.dual_vertices[dual].color, dual=dual,
                                  faces=tuple(volume_faces[k]), vertices=sites))
        self.volumes = tuple(volumes)

    def _cycle(self, sites, i, j, edges):
        """Cyclic vertex order of a face via the edges of the face (shared triangles)."""
        site_set = set(sites)
        others = [c for c in range(4) if c not in (i, j)]
        neighbors = {}
        for v in sites:
            nbrs = []
            for k in others:
                omit = next(c for c in others if c != k)
                e = self.tet_edges[v, omit]
                if e >= 0:
                    u, w = edges[e].vertices
                    other = w if u == v else u
                    if other in site_set:
                        nbrs.append(other)
            neighbors[v] = nbrs
        if any(len(nbrs) != 2 for nbrs in neighbors.values()):
            return sorted(sites), False
        start = min(sites)
        order = [start]
        prev, cur = None, start
        while True:
            candidates = [x for x in neighbors[cur] if x != prev]
            nxt = min(candidates) if prev is None else candidates[0]
            if nxt == start:
                break
            if nxt in order:
                return sorted(sites), False
            order.append(nxt)
            prev, cur = cur, nxt
        return order, len(order) == len(sites)

    # ==================== Queries ====================

    @property
    def n(self):
        return self.tets.shape[0]

    @property
    def counts(self):
        return {'V': self.n, 'E': len(self.edges), 'F': len(self.faces), 'C': len(self.volumes)}

    @property
    def is_closed(self):
        return bool(self._real.all())

    def boundary_regions(self):
        """Mapping fictitious-vertex label -> boundary color."""
        return {dv.label: dv.color for dv in self.dual_vertices if not dv.real}

    def boundary_colors(self):
        return sorted(set(self.boundary_regions().values()))

    def _fictitious_ids(self, color, region=None):
        ids = [i for i, dv in enumerate(self.dual_vertices)
               if not dv.real and dv.color == color and (region is None or dv.label == region)]
        return ids

    def boundary_sites(self, color, region=None):
        """Sites whose tetrahedron touches the named boundary."""
        ids = self._fictitious_ids(color, region)
        if not ids:
            return []
        column = self.tets[:, COLOR_INDEX[color]]
        return [int(v) for v in np.flatnonzero(np.isin(column, ids))]

    def boundary_faces(self, color, region=None):
        """Faces with a fictitious endpoint on the named boundary."""
        ids = set(self._fictitious_ids(color, region))
        return [f.id for f in self.faces if ids.intersection(f.dual)]

    def face_at(self, v, colors):
        """Face of the given color pair containing site v, or None."""
        f = int(self.tet_faces[v, face_color_index(colors)])
        return None if f < 0 else f

    def faces_of(self, v):
        return [int(f) for f in self.tet_faces[v] if f >= 0]

    def edges_of(self, v):
        return [int(e) for e in self.tet_edges[v] if e >= 0]

    def edge_at(self, v, colors):
        """Edge of the given three colors at site v, or None."""
        omitted = next(c for c in COLORS if c not in colors.upper())
        e = int(self.tet_edges[v, COLOR_INDEX[omitted]])
        return None if e < 0 else e

    def other_end(self, e, v):
        u, w = self.edges[e].vertices
        if v not in (u, w):
            raise StructureError(f"Vertex {v} is not an endpoint of edge {e}")
        return w if u == v else u

    def face_direction(self, f):
        """Displacement between the two volume centres of a face, in color order."""
        if self.geometry is None:
            raise StructureError(f"Lattice {self.name} carries no geometry")
        face = self.faces[f]
        i, j = (COLOR_INDEX[c] for c in face.colors)
        centers = self.geometry.tet_centers[face.vertices[0]]
        return centers[j] - centers[i]

    def neighbors(self, v):
        return [self.other_end(e, v) for e in self.edges_of(v)]

    def faces_of_edge(self, e):
        """Faces containing edge e (the dual edges of its dual triangle)."""
        u = self.edges[e].vertices[0]
        omit = EDGE_COLORS.index(self.edges[e].colors)
        present = [c for c in range(4) if c != omit]
        result = []
        for i, j in combinations(present, 2):
            f = self.tet_faces[u, PAIR_POSITION[(i, j)]]
            if f >= 0:
                result.append(int(f))
        return result

    @cached_property
    def vertex_graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        for edge in self.edges:
            graph.add_edge(*edge.vertices, id=edge.id)
        return graph

    @cached_property
    def volume_graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.volumes)))
        for face in self.faces:
            if len(face.volumes) == 2:
                graph.add_edge(*face.volumes, face=face.id)
        return graph

    # ==================== Incidence ====================

    def volume_face_matrix(self):
        """C x F 0/1 incidence."""
        matrix = np.zeros((len(self.volumes), len(self.faces)), dtype=np.int64)
        for volume in self.volumes:
            matrix[volume.id, list(volume.faces)] = 1
        return matrix

    def face_edge_matrix(self):
        """F x E 0/1 incidence."""
        matrix = np.zeros((len(self.faces), len(self.edges)), dtype=np.int64)
        for edge in self.edges:
            matrix[self.faces_of_edge(edge.id), edge.id] = 1
        return matrix

    def edge_vertex_matrix(self):
        """E x V 0/1 incidence."""
        matrix = np.zeros((len(self.edges), self.n), dtype=np.int64)
        for edge in self.edges:
            matrix[edge.id, list(edge.vertices)] = 1
        return matrix

    @property
    def dual(self):
        return DualLattice(self)

    # ==================== Validation ====================

    def validate(self):
        """
        Check valency, coloring, bipartition and incidence closure.

        Returns:
            ValidationReport listing every violation
        """
        report = ValidationReport()
        for v in range(self.n):
            for i, color in enumerate(COLORS):
                actual = self.dual_vertices[self.tets[v, i]].color
                if actual != color:
                    report.add('coloring', f"site {v}: corner {color} holds a {actual} dual vertex")
            fictitious = int((~self._real[self.tets[v]]).sum())
            expected = 3 if fictitious == 3 else 4
            valency = int((self.tet_edges[v] >= 0).sum())
            if valency != expected:
                report.add('valency', f"site {v}: {valency} edges, expected {expected}")

        for key, count in self._triangle_multiplicity.items():
            if count > 2:
                report.add('incidence', f"dual triangle {key} lies in {count} tetrahedra")

        for edge in self.edges:
            u, w = edge.vertices
            if self.lam[u] == self.lam[w]:
                report.add('bipartition', f"edge {edge.id} joins sites {u} and {w} of equal sign")

        for face in self.faces:
            if face.dual[0] == face.dual[1]:
                report.add('coloring', f"face {face.id} joins a volume to itself")
            if not face.closed:
                report.add('incidence', f"face {face.id} boundary is not a closed cycle")
                continue
            cycle = face.vertices
            if len(cycle) % 2:
                report.add('bipartition', f"face {face.id} has odd length {len(cycle)}")
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if self.lam[a] == self.lam[b]:
                    report.add('bipartition', f"face {face.id}: sites {a}, {b} do not alternate")
                    break

        for volume in self.volumes:
            face_set = set(volume.faces)
            for v in volume.vertices:
                for e in self.edges_of(v):
                    if volume.dual not in self.edges[e].dual:
                        continue
                    count = len(face_set.intersection(self.faces_of_edge(e)))
                    if count != 2:
                        report.add('incidence', f"volume {volume.id}: edge {e} in {count} faces")

        if report.passed:
            logger.debug(f"Lattice {self.name} validated")
        else:
            logger.info(f"Lattice {self.name}: {len(report.violations)} violations")
        return report

    def with_signs(self, lam):
        """Same cells with a different sign assignment (not re-validated)."""
        return ColorLattice(self.dual_vertices, self.tets, lam=lam, geometry=self.geometry,
                            name=self.name, periodic=self.periodic)

    # ==================== Serialization ====================

    def to_dict(self):
        data = {
            'name': self.name,
            'periodic': self.periodic,
            'dual_vertices': [{'color': dv.color, 'real': dv.real, 'label': dv.label}
                              for dv in self.dual_vertices],
            'tets': self.tets.tolist(),
            'lam': self.lam.tolist(),
            'cells': {
                'vertices': [{'id': v, 'dim': 0, 'lam': int(self.lam[v])} for v in range(self.n)],
                'edges': [{'id': e.id, 'dim': 1, 'color': e.colors, 'vertices': list(e.vertices)}
                          for e in self.edges],
                'faces': [{'id': f.id, 'dim': 2, 'color': f.colors, 'vertices': list(f.vertices),
                           'volumes': list(f.volumes)} for f in self.faces],
                'volumes': [{'id': c.id, 'dim': 3, 'color': c.color, 'faces': list(c.faces)}
                            for c in self.volumes],
            },
        }
        if self.geometry is not None:
            data['geometry'] = {
                'positions': self.geometry.positions.tolist(),
                'tet_centers': self.geometry.tet_centers.tolist(),
                'volume_centers': self.geometry.volume_centers.tolist(),
                'volume_cells': self.geometry.volume_cells.tolist(),
                'periods': [list(map(int, p)) for p in self.geometry.periods],
            }
        return data

    @classmethod
    def from_dict(cls, data):
        try:
            dual_vertices = [DualVertex(d['color'], bool(d.get('real', True)), d.get('label', ''))
                             for d in data['dual_vertices']]
            geometry = None
            if data.get('geometry'):
                g = data['geometry']
                geometry = Geometry(
                    positions=np.array(g['positions'], dtype=np.int64),
                    tet_centers=np.array(g['tet_centers'], dtype=np.int64),
                    volume_centers=np.array(g['volume_centers'], dtype=np.int64),
                    volume_cells=np.array(g['volume_cells'], dtype=np.int64),
                    periods=tuple(np.array(p, dtype=np.int64) for p in g.get('periods', [])),
                )
            return cls(dual_vertices, data['tets'], lam=data.get('lam'), geometry=geometry,
                       name=data.get('name', ''), periodic=bool(data.get('periodic', False)))
        except (KeyError, TypeError) as e:
            raise StructureError(f"Malformed lattice document: {e}") from e

    def __repr__(self):
        counts = self.counts
        return (f"ColorLattice({self.name!r}, V={counts['V']}, E={counts['E']}, "
                f"F={counts['F']}, C={counts['C']})")


class DualLattice:
    """
    Dual view: dual vertices are volumes (plus fictitious boundary vertices),
    dual edges are faces, dual faces are edges and dual volumes are sites.
    """

    def __init__(self, lattice):
        self.lattice = lattice

    @property
    def vertices(self):
        return self.lattice.dual_vertices

    def edge_vertex_matrix(self):
        """Dual edge x dual vertex incidence, over real and fictitious vertices."""
        lattice = self.lattice
        matrix = np.zeros((len(lattice.faces), len(lattice.dual_vertices)), dtype=np.int64)
        for face in lattice.faces:
            matrix[face.id, list(face.dual)] = 1
        return matrix

    def face_edge_matrix(self):
        """Dual face (primal edge) x dual edge (primal face) incidence."""
        return self.lattice.face_edge_matrix().T

    def volume_face_matrix(self):
        """Dual volume (primal site) x dual face (primal edge) incidence."""
        return self.lattice.edge_vertex_matrix().T

    def primal_face_edge_matrix(self):
        """Reverse the dual incidence once more; equals the primal face/edge incidence."""
        return self.face_edge_matrix().T


# ==================== Bipartition ====================

def bipartition(graph_or_lattice):
    """
    Deterministic BFS 2-coloring with sign +1 at the lowest vertex of each component.

    Args:
        graph_or_lattice: ColorLattice or networkx Graph on nodes 0..n-1

    Returns:
        np.ndarray of +1/-1 signs

    Raises:
        NotBipartiteError: an odd cycle exists
    """
    if isinstance(graph_or_lattice, ColorLattice):
        graph = graph_or_lattice.vertex_graph
    else:
        graph = graph_or_lattice
    nodes = sorted(graph.nodes)
    lam = np.zeros(len(nodes), dtype=np.int64)
    for component in sorted((sorted(c) for c in nx.connected_components(graph)), key=min):
        root = component[0]
        lam[root] = 1
        for u, w in nx.bfs_edges(graph, root, sort_neighbors=sorted):
            lam[w] = -lam[u]
    for u, w in graph.edges:
        if lam[u] == lam[w]:
            raise NotBipartiteError(min(u, w))
    return lam
