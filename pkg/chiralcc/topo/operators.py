"""
String, membrane and surface operators, syndromes and meta-checks.

A string is described by a LatticePath. At every path vertex the two path edges
share exactly one face, and the string acts there with the native factor of that
face (the factor the face stabilizer itself uses at the vertex). Open paths either
carry explicit end edges, which count as path edges, or end on a boundary, where
the terminal factor is the boundary face not containing the last path edge.

Usage:
    from chiralcc.topo import LatticePath, string_operator, syndrome_of

    path = LatticePath.from_vertices(lattice, [3, 7, 12], end_edges=(0, 40))
    op = string_operator(lattice, path, d=3, alpha=1)
    syndrome_of(code, op).excited()
"""

import logging
from dataclasses import dataclass
from itertools import islice

import networkx as nx
import numpy as np

from ..codes.builders import native_exponents
from ..exceptions import ParameterError, StructureError
from ..lattice.complex import COLORS, EDGE_COLORS, FACE_COLORS, PAIR_POSITION
from ..pauli import PauliOperator, product, restrict

logger = logging.getLogger(__name__)

# Candidate paths tried before a path search gives up
PATH_SEARCH_LIMIT = 200


# ==================== Paths ====================

@dataclass(frozen=True)
class LatticePath:
    """
    Ordered vertices with their connecting edges.

    ``edges[k]`` joins ``vertices[k]`` and ``vertices[k + 1]`` (cyclically for a closed
    path). ``end_edges`` holds the extra edge at each terminal vertex of an open path;
    None means the path ends on a boundary.
    """

    vertices: tuple
    edges: tuple
    closed: bool = False
    end_edges: tuple = None

    def __post_init__(self):
        expected = len(self.vertices) if self.closed else len(self.vertices) - 1
        if not self.vertices or len(self.edges) != expected:
            raise StructureError(f"Path with {len(self.vertices)} vertices needs {expected} "
                                 f"edges, got {len(self.edges)}")
        if self.end_edges is not None and (self.closed or len(self.end_edges) != 2):
            raise StructureError("End edges are a pair and only apply to open paths")

    @classmethod
    def from_vertices(cls, lattice, vertices, closed=False, end_edges=None):
        """Look up the connecting edges of a vertex sequence."""
        vertices = tuple(int(v) for v in vertices)
        graph = lattice.vertex_graph
        pairs = list(zip(vertices, vertices[1:]))
        if closed:
            pairs.append((vertices[-1], vertices[0]))
        edges = []
        for u, w in pairs:
            if not graph.has_edge(u, w):
                raise StructureError(f"Sites {u} and {w} are not adjacent")
            edges.append(graph.edges[u, w]['id'])
        return cls(vertices, tuple(edges), closed, None if end_edges is None else tuple(end_edges))

    def incidences(self):
        """(vertex, incoming edge, outgoing edge) triples; None marks a boundary end."""
        m = len(self.vertices)
        for k, v in enumerate(self.vertices):
            if self.closed:
                yield v, self.edges[k - 1], self.edges[k]
                continue
            first = self.edges[k - 1] if k > 0 else (self.end_edges[0] if self.end_edges else None)
            second = self.edges[k] if k < m - 1 else (self.end_edges[1] if self.end_edges else None)
            if m == 1 and self.end_edges is None:
                raise StructureError("A single-vertex path needs end edges")
            yield v, first, second

    def validate(self, lattice):
        for k, e in enumerate(self.edges):
            u = self.vertices[k]
            w = self.vertices[(k + 1) % len(self.vertices)]
            if set(lattice.edges[e].vertices) != {u, w}:
                raise StructureError(f"Edge {e} does not join path sites {u} and {w}")
        if self.end_edges is not None:
            for v, e in zip((self.vertices[0], self.vertices[-1]), self.end_edges):
                if v not in lattice.edges[e].vertices:
                    raise StructureError(f"End edge {e} is not incident to site {v}")

    def __len__(self):
        return len(self.vertices)


def _omitted(lattice, e):
    return EDGE_COLORS.index(lattice.edges[e].colors)


def end_face(lattice, v, e):
    """
    Boundary face at v that does not contain edge e.

    At a site with one fictitious corner this is the boundary face of the color e
    omits; at a corner of tetra15 it is the one existing face of that color.
    """
    omitted = COLORS[_omitted(lattice, e)]
    candidates = [f for f in lattice.faces_of(v)
                  if omitted in lattice.faces[f].colors and lattice.faces[f].is_boundary]
    if len(candidates) != 1:
        raise ParameterError(f"Site {v} has no unique boundary face avoiding edge {e}")
    return candidates[0]


def path_face(lattice, v, e1, e2):
    """
    Face label f[l] at v, fixed by the two path edges (one may be None at a boundary end).

    Raises:
        StructureError: the edges coincide or their shared face is not a lattice face
    """
    if e1 is None and e2 is None:
        raise StructureError(f"Site {v} has no path edges")
    if e1 is None or e2 is None:
        return end_face(lattice, v, e2 if e1 is None else e1)
    i, j = _omitted(lattice, e1), _omitted(lattice, e2)
    if i == j:
        raise StructureError(f"Edges {e1} and {e2} at site {v} leave the face label ambiguous")
    pair = tuple(c for c in range(4) if c not in (i, j))
    f = int(lattice.tet_faces[v, PAIR_POSITION[pair]])
    if f < 0:
        raise StructureError(f"Edges {e1} and {e2} at site {v} meet on a boundary, not a face")
    return f


def shortest_path(lattice, source, target, avoid=(), end_edges=None):
    """
    Shortest vertex path whose interior face labels all exist.

    Args:
        avoid: Sites the path must not visit
        end_edges: Optional end edges; None means both ends sit on boundaries

    Returns:
        LatticePath
    """
    graph = lattice.vertex_graph
    if avoid:
        graph = nx.restricted_view(graph, list(avoid), [])
    try:
        candidates = nx.shortest_simple_paths(graph, int(source), int(target))
        for vertices in islice(candidates, PATH_SEARCH_LIMIT):
            path = LatticePath.from_vertices(lattice, vertices, end_edges=end_edges)
            try:
                for v, e1, e2 in path.incidences():
                    path_face(lattice, v, e1, e2)
            except (StructureError, ParameterError):
                continue
            return path
    except nx.NetworkXNoPath:
        pass
    raise StructureError(f"No admissible path from site {source} to site {target}")


# ==================== Native and String Operators ====================

def _native_xz(lattice, f, v, d, alpha, family):
    return native_exponents(lattice.faces[f].colors, int(lattice.lam[v]), d, alpha, family)


def native_pauli(lattice, f, v, d=2, alpha=1, family='chiral'):
    """
    Single-site native operator P(f)_v.

    Args:
        lattice: ColorLattice
        f: Face id
        v: Site of f

    Returns:
        PauliOperator on lattice.n sites

    Raises:
        ParameterError: v is not a site of f
    """
    if v not in lattice.faces[f].vertices:
        raise ParameterError(f"Site {v} does not lie on face {f}")
    x, z = _native_xz(lattice, f, v, d, alpha, family)
    return PauliOperator.weyl(d, *_single(lattice.n, v, x, z))


def _single(n, v, x, z):
    xs = np.zeros(n, dtype=np.int64)
    zs = np.zeros(n, dtype=np.int64)
    xs[v], zs[v] = x, z
    return xs, zs


def string_operator(lattice, path, d=2, alpha=1, family='chiral'):
    """
    String operator O_l: product of native factors along the path.

    A closed path around a single face reproduces that face stabilizer.

    Args:
        lattice: ColorLattice
        path: LatticePath
        d: Qudit dimension
        alpha: Chirality
        family: Native table ("xyz" or "chiral")

    Returns:
        PauliOperator on lattice sites
    """
    path.validate(lattice)
    x = np.zeros(lattice.n, dtype=np.int64)
    z = np.zeros(lattice.n, dtype=np.int64)
    for v, e1, e2 in path.incidences():
        f = path_face(lattice, v, e1, e2)
        dx, dz = _native_xz(lattice, f, v, d, alpha, family)
        x[v] += dx
        z[v] += dz
    return PauliOperator.weyl(d, x, z)


def edge_operator(lattice, e, d=2, alpha=1, family='chiral'):
    """
    Two-body boundary operator g_e on an in-layer boundary edge e = (v, w).

    Acts at v with the native of the boundary face not containing e, and at w with
    the native of the same-colored face there.
    """
    v, w = lattice.edges[e].vertices
    fv, fw = end_face(lattice, v, e), end_face(lattice, w, e)
    xv, zv = _native_xz(lattice, fv, v, d, alpha, family)
    xw, zw = _native_xz(lattice, fw, w, d, alpha, family)
    x = np.zeros(lattice.n, dtype=np.int64)
    z = np.zeros(lattice.n, dtype=np.int64)
    x[v], z[v] = xv, zv
    x[w], z[w] = xw, zw
    return PauliOperator.weyl(d, x, z)


def code_operator(code, op):
    """
    Lattice-site operator re-indexed onto the sites of a (boundary) code.

    Raises:
        ParameterError: the operator acts on a site outside the code
    """
    if code.sites is None:
        return op
    outside = set(int(v) for v in op.support) - set(code.site_index)
    if outside:
        raise ParameterError(f"Operator acts on sites {sorted(outside)[:5]} outside code "
                             f"{code.name}")
    return PauliOperator(op.d, op.x[code.sites], op.z[code.sites], op.phase)


def corner_vertices(lattice):
    """Sites whose tetrahedron has three fictitious corners, keyed by their real color."""
    corners = {}
    for v in range(lattice.n):
        real = [i for i in range(4) if lattice.dual_vertices[lattice.tets[v, i]].real]
        if len(real) == 1:
            corners[COLORS[real[0]]] = v
    return corners


def corner_string(lattice, source, target, d=2, alpha=1, family='xyz'):
    """String between two boundary corners, terminated by the corner faces."""
    path = shortest_path(lattice, source, target)
    return string_operator(lattice, path, d, alpha, family)


# ==================== Syndromes ====================

@dataclass(frozen=True)
class SyndromeConfig:
    """
    Per-generator syndrome values reduced mod d.

    ``face_ids[k]`` is the lattice face behind generator k, or -1 when the
    generator is not a face stabilizer.
    """

    values: np.ndarray
    d: int
    face_ids: tuple

    def __post_init__(self):
        values = np.mod(np.asarray(self.values, dtype=np.int64), self.d)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        if len(self.face_ids) != values.shape[0]:
            raise StructureError("Syndrome values and face ids differ in length")

    @classmethod
    def from_faces(cls, lattice, d, mapping):
        """Configuration over all lattice faces from a sparse ``{face: value}`` map."""
        values = np.zeros(len(lattice.faces), dtype=np.int64)
        for f, value in mapping.items():
            values[int(f)] = value
        return cls(values, d, tuple(range(len(lattice.faces))))

    @property
    def weight(self):
        return int(np.count_nonzero(self.values))

    def is_zero(self):
        return not self.values.any()

    def excited(self):
        """Faces carrying a nonzero value."""
        return [self.face_ids[k] for k in np.flatnonzero(self.values) if self.face_ids[k] >= 0]

    def face_values(self):
        return {self.face_ids[k]: int(self.values[k]) for k in np.flatnonzero(self.values)
                if self.face_ids[k] >= 0}

    def face_vector(self, lattice):
        """Values laid out over all faces of the lattice."""
        vector = np.zeros(len(lattice.faces), dtype=np.int64)
        for f, value in self.face_values().items():
            vector[f] = value
        return vector

    def dual_edges(self, lattice):
        """Dual-edge view: (dual vertex, dual vertex, value) for every excited face."""
        return [(*lattice.faces[f].dual, value) for f, value in sorted(self.face_values().items())]

    def to_dict(self):
        return {'d': self.d, 'faces': {str(f): v for f, v in sorted(self.face_values().items())}}


def syndrome_of(code, op):
    """
    Syndrome of an operator: value k is commutation_exponent(S_k, op).

    Returns:
        SyndromeConfig aligned with the code generators
    """
    face_ids = tuple(int(source[-1]) if len(source) >= 2 and source[-2] == 'face' else -1
                     for source in code.sources)
    return SyndromeConfig(code.syndrome(op), code.d, face_ids)


@dataclass(frozen=True)
class MetacheckReport:
    valid: bool
    violations: tuple
    sums: np.ndarray

    def to_dict(self):
        return {'valid': self.valid, 'violations': list(self.violations)}


def check_metachecks(lattice, syndrome):
    """
    Volume meta-checks: the face values around every real volume sum to zero mod d.

    The three native factors of a volume's faces at each of its sites multiply to a
    scalar, so the relation is an unsigned sum. Fictitious vertices carry no check.

    Returns:
        MetacheckReport listing violated volumes
    """
    vector = syndrome.face_vector(lattice)
    sums = np.mod(lattice.volume_face_matrix() @ vector, syndrome.d)
    violations = tuple(int(c) for c in np.flatnonzero(sums))
    if violations:
        logger.debug(f"{len(violations)} meta-check violations on {lattice.name}")
    return MetacheckReport(valid=not violations, violations=violations, sums=sums)


def excitation_clusters(lattice, syndrome):
    """
    Excited faces grouped into clusters of faces that share a site.

    Returns:
        list of dicts with sorted ``faces``, their ``values`` and a ``label`` made of
        the face-color multiset plus the value pattern
    """
    values = syndrome.face_values()
    graph = nx.Graph()
    graph.add_nodes_from(values)
    by_site = {}
    for f in values:
        for v in lattice.faces[f].vertices:
            by_site.setdefault(v, []).append(f)
    for faces in by_site.values():
        graph.add_edges_from(zip(faces, faces[1:]))
    clusters = []
    for component in sorted((sorted(c) for c in nx.connected_components(graph)), key=min):
        pattern = sorted((lattice.faces[f].colors, values[f]) for f in component)
        clusters.append({
            'faces': component,
            'values': [values[f] for f in component],
            'charge': sum(values[f] for f in component) % syndrome.d,
            'label': tuple(pattern),
        })
    return clusters


# ==================== Membranes ====================

@dataclass(frozen=True)
class SurfaceRegion:
    """
    Faces of a surface together with the volume each face treats as inside.

    Build one with ``from_volumes`` to get the boundary of a set of volumes.
    """

    faces: tuple
    inside: tuple

    def __post_init__(self):
        if len(self.faces) != len(self.inside):
            raise StructureError("Every surface face needs an inside volume")
        if len(set(self.faces)) != len(self.faces):
            raise StructureError("Surface lists a face twice")

    @classmethod
    def from_volumes(cls, lattice, volumes, face_filter=None):
        """
        Boundary of a volume set: faces between a member volume and a non-member.

        Args:
            volumes: Iterable of volume ids (the inside)
            face_filter: Optional predicate ``(face_id, inside_volume) -> bool``
        """
        members = set(int(c) for c in volumes)
        faces, inside = [], []
        for face in lattice.faces:
            if len(face.volumes) != 2:
                continue
            a, b = face.volumes
            if (a in members) == (b in members):
                continue
            c = a if a in members else b
            if face_filter is None or face_filter(face.id, c):
                faces.append(face.id)
                inside.append(c)
        return cls(tuple(faces), tuple(inside))

    def validate(self, lattice):
        counts = {}
        for f, c in zip(self.faces, self.inside):
            if c not in lattice.faces[f].volumes:
                raise StructureError(f"Volume {c} is not adjacent to surface face {f}")
            for e in _face_edges(lattice, f):
                counts[e] = counts.get(e, 0) + 1
        crowded = [e for e, k in counts.items() if k > 2]
        if crowded:
            raise StructureError(f"Edges {crowded[:5]} lie in more than two surface faces")
        return counts

    def boundary_edges(self, lattice):
        return sorted(e for e, k in self.validate(lattice).items() if k == 1)

    def __len__(self):
        return len(self.faces)


def _face_edges(lattice, f):
    edges = set()
    for v in lattice.faces[f].vertices:
        for e in lattice.edges_of(v):
            if f in lattice.faces_of_edge(e):
                edges.add(e)
    return edges


def _membrane_exponents(colors, gamma, lam, alpha):
    """Per-site factor of a membrane on a face of the given color pair."""
    if colors in ('AB', 'CD'):
        return 0, alpha * gamma * lam
    if colors in ('AC', 'BD'):
        return gamma, 0
    return -gamma, -alpha * gamma * lam


def membrane_operator(lattice, region, color, d=2, alpha=1):
    """
    Membrane operator M_Sigma over the faces of one color pair in a surface.

    Each face contributes ``Z^(alpha gamma)`` (AB, CD), ``X^gamma`` (AC, BD) or
    ``X^-gamma Z^(-alpha gamma)`` (AD, BC) with lambda-signed Z, where gamma = +1 when
    the inside volume carries the first color of the pair.

    Args:
        lattice: ColorLattice
        region: SurfaceRegion
        color: Two-letter face color

    Returns:
        PauliOperator (identity for an empty selection)
    """
    key = ''.join(sorted(color.upper()))
    if key not in FACE_COLORS:
        raise ParameterError(f"Unknown face color {color!r}")
    region.validate(lattice)
    x = np.zeros(lattice.n, dtype=np.int64)
    z = np.zeros(lattice.n, dtype=np.int64)
    for f, c in zip(region.faces, region.inside):
        face = lattice.faces[f]
        if face.colors != key:
            continue
        gamma = 1 if lattice.volumes[c].color == face.colors[0] else -1
        for v in face.vertices:
            dx, dz = _membrane_exponents(key, gamma, int(lattice.lam[v]), alpha)
            x[v] += dx
            z[v] += dz
    return PauliOperator.weyl(d, x, z)


def torus_plane(lattice):
    """
    Non-contractible plane of a torus lattice.

    The inside is every volume with canonical height in ``[0, 4 Lz)``; the plane keeps
    the faces through which height decreases on leaving the inside.

    Returns:
        SurfaceRegion
    """
    geometry = lattice.geometry
    if geometry is None or len(geometry.periods) != 3:
        raise ParameterError(f"Lattice {lattice.name} is not an embedded 3-torus")
    Lz = int(geometry.periods[2][0]) // 4
    heights = geometry.volume_centers.sum(axis=1)
    inside = [c for c in range(len(lattice.volumes)) if 0 <= heights[c] < 4 * Lz]

    def downward(f, c):
        step = lattice.face_direction(f)
        if lattice.volumes[c].color != lattice.faces[f].colors[0]:
            step = -step
        return int(step.sum()) < 0

    return SurfaceRegion.from_volumes(lattice, inside, face_filter=downward)


# ==================== Surface Strings ====================

def boundary_face_graph(lattice, color, region=None):
    """Boundary faces of one boundary, adjacent when they share an in-layer edge."""
    faces = set(lattice.boundary_faces(color, region))
    sites = set(lattice.boundary_sites(color, region))
    graph = nx.Graph()
    graph.add_nodes_from(sorted(faces))
    for edge in lattice.edges:
        if not sites.issuperset(edge.vertices):
            continue
        shared = [f for f in lattice.faces_of_edge(edge.id) if f in faces]
        if len(shared) == 2:
            graph.add_edge(*shared, id=edge.id)
    return graph


def surface_disk(lattice, color, center_face, radius=1, region=None):
    """Boundary faces within ``radius`` shared-edge steps of a centre face."""
    graph = boundary_face_graph(lattice, color, region)
    if center_face not in graph:
        raise ParameterError(f"Face {center_face} is not on the {color} boundary")
    reach = nx.single_source_shortest_path_length(graph, center_face, cutoff=radius)
    return sorted(reach)


def _region_counts(lattice, faces):
    counts = {}
    for f in faces:
        for v in lattice.faces[f].vertices:
            counts[v] = counts.get(v, 0) + 1
    return counts


def boundary_loop(lattice, faces):
    """
    Perimeter of a disk of boundary faces, as a closed LatticePath.

    Raises:
        StructureError: the perimeter is not a single cycle
    """
    edge_counts = {}
    for f in faces:
        for e in _face_edges(lattice, f):
            edge_counts[e] = edge_counts.get(e, 0) + 1
    perimeter = [e for e, k in edge_counts.items() if k == 1]
    graph = nx.Graph()
    for e in perimeter:
        graph.add_edge(*lattice.edges[e].vertices, id=e)
    if not perimeter or any(deg != 2 for _, deg in graph.degree) or not nx.is_connected(graph):
        raise StructureError("Region perimeter is not a single cycle")
    start = min(graph.nodes)
    order = [start] + [w for _, w in nx.dfs_edges(graph, start, sort_neighbors=sorted)]
    return LatticePath.from_vertices(lattice, order, closed=True)


def surface_arc(lattice, faces):
    """
    Open half of a disk's perimeter, cut at two edges lying inside single faces.

    Returns:
        LatticePath whose end edges are the two cut edges
    """
    loop = boundary_loop(lattice, faces)
    counts = _region_counts(lattice, faces)
    m = len(loop.vertices)
    cuts = [k for k in range(m)
            if counts[loop.vertices[k]] == 1 and counts[loop.vertices[(k + 1) % m]] == 1]
    if len(cuts) < 2:
        raise StructureError("Region perimeter has no two cuttable edges")
    first = cuts[0]
    second = min(cuts[1:], key=lambda k: abs((k - first) - m / 2))
    vertices = loop.vertices[first + 1:second + 1]
    edges = loop.edges[first + 1:second]
    return LatticePath(tuple(vertices), tuple(edges), False,
                       (loop.edges[first], loop.edges[second]))


def surface_string(code, faces, path):
    """
    Product of boundary face stabilizers over a region, truncated to a path.

    Args:
        code: Boundary StabilizerCode
        faces: Boundary faces of the region
        path: LatticePath along the region perimeter (closed for the untruncated loop)

    Returns:
        PauliOperator on code sites

    Raises:
        ParameterError: the path leaves the boundary layer
    """
    off = [v for v in path.vertices if int(v) not in code.site_index]
    if off:
        raise ParameterError(f"Surface path visits sites {off[:5]} off the boundary")
    loop = product((code.generator_for(('face', int(f))) for f in faces), code.n, code.d)
    return restrict(loop, [code.code_site(v) for v in path.vertices])
