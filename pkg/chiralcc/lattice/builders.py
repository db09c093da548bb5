"""
Lattice builders.

Small examples are joins of colored dual-vertex groups: every choice of one dual
vertex per color is a tetrahedron (a site). Periodic and slab lattices are the
bitruncated cubic honeycomb: one truncated-octahedron volume per BCC point,
colored by ``h = x + y + z`` modulo 8.

Usage:
    from chiralcc.lattice import build_torus, build_slab

    torus = build_torus(2, 2, 2)
    slab = build_slab(4, 4, 1, 'A')
"""

import json
import logging
from dataclasses import dataclass
from itertools import permutations, product
from pathlib import Path

import numpy as np

from ..exceptions import ConstructionError, ParameterError, StructureError
from ..utils import parse_lattice_spec
from .complex import COLOR_INDEX, COLORS, ColorLattice, DualVertex, Geometry

logger = logging.getLogger(__name__)

# Color of a cell by h mod 8
HEIGHT_COLORS = {0: 'A', 2: 'C', 4: 'B', 6: 'D'}
COLOR_HEIGHTS = {color: h for h, color in HEIGHT_COLORS.items()}

VERTEX_OFFSETS = tuple(sorted({
    tuple(s * c for s, c in zip(signs, perm))
    for perm in permutations((0, 1, 2))
    for signs in product((1, -1), repeat=3)
}))


# ==================== Joins ====================

def _join(groups, exclude=None, name=''):
    """
    Lattice whose sites are all choices of one dual vertex per color.

    Args:
        groups: Four lists of DualVertex, in color order
        exclude: Optional predicate on a tuple of DualVertex; matching choices are skipped
    """
    dual_vertices = []
    index_groups = []
    for group in groups:
        ids = []
        for dv in group:
            ids.append(len(dual_vertices))
            dual_vertices.append(dv)
        index_groups.append(ids)
    tets = [choice for choice in product(*index_groups)
            if exclude is None or not exclude(tuple(dual_vertices[i] for i in choice))]
    lattice = ColorLattice(dual_vertices, tets, name=name)
    _check(lattice)
    return lattice


def _check(lattice):
    report = lattice.validate()
    if not report.passed:
        logger.error(f"Builder for {lattice.name} produced an invalid lattice: "
                     f"{report.violations[:5]}")
        raise ConstructionError(f"{lattice.name}: {len(report.violations)} validation violations")


def build_cube8():
    """
    One cubic volume (color A) with six boundary faces, two each of AB, AC, AD.

    Returns:
        ColorLattice with 8 sites
    """
    groups = [[DualVertex('A', True, 'a')]]
    for color in 'BCD':
        groups.append([DualVertex(color, False, f'{color.lower()}{k}') for k in (1, 2)])
    return _join(groups, name='cube8')


def build_tetra15():
    """
    Four volumes of distinct colors meeting at a point, with four color boundaries.

    Every color contributes a real volume and a fictitious boundary vertex; the
    all-fictitious choice is not a site.

    Returns:
        ColorLattice with 15 sites
    """
    groups = [[DualVertex(color, True, color.lower()),
               DualVertex(color, False, f"{color.lower()}'")]
              for color in COLORS]
    return _join(groups, exclude=lambda choice: not any(dv.real for dv in choice), name='tetra15')


def build_sphere():
    """
    Boundary of the tesseract: a closed lattice with the topology of the 3-sphere.

    Returns:
        ColorLattice with 16 sites, 24 faces and 8 volumes
    """
    groups = [[DualVertex(color, True, f'{color.lower()}{k}') for k in (1, 2)] for color in COLORS]
    return _join(groups, name='sphere')


# ==================== Bitruncated Cubic Honeycomb ====================

def _is_bcc(point):
    residues = {c % 4 for c in point}
    return residues == {0} or residues == {2}


def _height(point):
    return int(point[0] + point[1] + point[2])


def _cells_at(point):
    """
    Unwrapped centres of the four volumes around a vertex, in color order.

    A vertex has one odd coordinate, one coordinate = 0 mod 4 and one = 2 mod 4.
    """
    odd = next(i for i in range(3) if point[i] % 2)
    zero = next(i for i in range(3) if point[i] % 4 == 0)
    two = next(i for i in range(3) if point[i] % 4 == 2)
    down = point[odd] - 1
    near0 = down if down % 4 == 0 else point[odd] + 1
    near2 = down if down % 4 == 2 else point[odd] + 1
    centers = []
    for shift in (-2, 2):
        c = list(point)
        c[odd], c[two] = near0, point[two] + shift
        centers.append(tuple(c))
        c = list(point)
        c[odd], c[zero] = near2, point[zero] + shift
        centers.append(tuple(c))
    ordered = [None] * 4
    for c in centers:
        ordered[COLOR_INDEX[HEIGHT_COLORS[_height(c) % 8]]] = c
    return ordered


def _geometric_sign(point):
    odd = next(i for i in range(3) if point[i] % 2)
    two = next(i for i in range(3) if point[i] % 4 == 2)
    return 1 if (two - odd) % 3 == 1 else -1


class _Chart:
    """Canonical representatives modulo the lattice periods."""

    def __init__(self, Lx, Ly, Lz=None):
        self.Lx, self.Ly, self.Lz = Lx, Ly, Lz
        self.b1 = np.array([4 * Lx, -4 * Lx, 0])
        self.b2 = np.array([0, 4 * Ly, -4 * Ly])
        self.b3 = None if Lz is None else np.array([4 * Lz, 4 * Lz, 0])

    @property
    def periods(self):
        if self.b3 is None:
            return (self.b1, self.b2)
        return (self.b1, self.b2, self.b3)

    def canonical(self, point):
        p = np.array(point, dtype=np.int64)
        if self.b3 is not None:
            p -= (_height(p) // (8 * self.Lz)) * self.b3
        p -= (p[0] // (4 * self.Lx)) * self.b1
        p -= (p[1] // (4 * self.Ly)) * self.b2
        return tuple(int(c) for c in p)


def _sort_key(point):
    return (_height(point), point[0], point[1])


def _cell_coordinates(center):
    return (center[0] // 4, center[1] // 4, _height(center) // 8)


def _honeycomb_lattice(chart, real_cells, name, periodic, boundary_color=None, h_range=None):
    """
    Assemble sites from real cells; on a slab, cone the boundary with fictitious vertices.
    """
    cells = sorted(real_cells, key=_sort_key)
    cell_index = {c: i for i, c in enumerate(cells)}

    candidates = set()
    for c in cells:
        for offset in VERTEX_OFFSETS:
            candidates.add(chart.canonical(np.add(c, offset)))

    full = []
    partial = []
    for point in sorted(candidates, key=_sort_key):
        centers = _cells_at(point)
        ids = [cell_index.get(chart.canonical(c)) for c in centers]
        missing = [i for i, x in enumerate(ids) if x is None]
        if not missing:
            full.append((point, centers, ids))
        elif len(missing) == 1:
            partial.append((point, centers, ids, missing[0]))

    def triangle_key(centers, ids, omit):
        members = sorted((ids[i], i) for i in range(4) if i != omit)
        ref = np.array(centers[members[0][1]])
        return tuple((x, tuple(int(c) for c in np.subtract(centers[i], ref))) for x, i in members)

    dual_vertices = [DualVertex(HEIGHT_COLORS[_height(c) % 8], True, f'c{i}')
                     for i, c in enumerate(cells)]
    sites = list(full)

    if partial:
        if boundary_color is None:
            raise ConstructionError(f"{name}: open cells found on a closed lattice")
        inner = {}
        for _, centers, ids in full:
            for omit in range(4):
                key = triangle_key(centers, ids, omit)
                inner[key] = inner.get(key, 0) + 1
        fictitious = {}
        low, _ = h_range
        for point, centers, ids, omit in partial:
            if inner.get(triangle_key(centers, ids, omit)) != 1:
                continue
            if COLORS[omit] != boundary_color:
                raise ConstructionError(f"{name}: boundary cell at {point} has color "
                                        f"{COLORS[omit]}")
            region = 'bottom' if _height(centers[omit]) < low else 'top'
            if region not in fictitious:
                fictitious[region] = len(dual_vertices)
                dual_vertices.append(DualVertex(boundary_color, False, region))
            ids = list(ids)
            ids[omit] = fictitious[region]
            sites.append((point, centers, ids))
        sites.sort(key=lambda site: _sort_key(site[0]))

    positions = np.array([site[0] for site in sites], dtype=np.int64)
    tet_centers = np.array([site[1] for site in sites], dtype=np.int64)
    tets = np.array([site[2] for site in sites], dtype=np.int64)
    lam = np.array([_geometric_sign(site[0]) for site in sites], dtype=np.int64)
    geometry = Geometry(
        positions=positions,
        tet_centers=tet_centers,
        volume_centers=np.array(cells, dtype=np.int64),
        volume_cells=np.array([_cell_coordinates(c) for c in cells], dtype=np.int64),
        periods=chart.periods,
    )
    lattice = ColorLattice(dual_vertices, tets, lam=lam, geometry=geometry, name=name,
                           periodic=periodic)
    _check(lattice)
    logger.info(f"Built {lattice!r}")
    return lattice


def build_torus(Lx, Ly, Lz):
    """
    Bitruncated cubic honeycomb on the 3-torus.

    Args:
        Lx, Ly, Lz: Periods in primitive cells (each at least 2)

    Returns:
        ColorLattice with 24 LxLyLz sites and 4 LxLyLz volumes
    """
    sizes = (Lx, Ly, Lz)
    if any(not isinstance(s, (int, np.integer)) or s < 2 for s in sizes):
        raise ParameterError(f"Torus sizes must be integers >= 2, got {sizes}")
    chart = _Chart(Lx, Ly, Lz)
    cells = []
    for h in range(0, 8 * Lz, 2):
        for x in range(0, 4 * Lx, 2):
            for y in range(0, 4 * Ly, 2):
                point = (x, y, h - x - y)
                if _is_bcc(point):
                    cells.append(point)
    return _honeycomb_lattice(chart, cells, f'torus:{Lx},{Ly},{Lz}', periodic=True)


def build_slab(Lx, Ly, thickness, boundary_color='A'):
    """
    Honeycomb slab, periodic in-plane, with a boundary of one color on each side.

    Volumes occupy heights ``layer + 2 .. layer + 8*thickness + 6`` where ``layer``
    is the height class of the boundary color; the cells just outside are replaced
    by the fictitious vertices ``bottom`` and ``top``.

    Args:
        Lx, Ly: In-plane periods (each at least 2)
        thickness: Number of color periods stacked (at least 1)
        boundary_color: One of A, B, C, D

    Returns:
        ColorLattice
    """
    if any(not isinstance(s, (int, np.integer)) or s < 2 for s in (Lx, Ly)):
        raise ParameterError(f"Slab periods must be integers >= 2, got {(Lx, Ly)}")
    if not isinstance(thickness, (int, np.integer)) or thickness < 1:
        raise ParameterError(f"Slab thickness must be at least 1, got {thickness}")
    if boundary_color not in COLOR_HEIGHTS:
        raise ParameterError(f"Unknown boundary color {boundary_color!r}")
    layer = COLOR_HEIGHTS[boundary_color]
    low = layer + 2
    high = layer + 8 * thickness + 6
    chart = _Chart(Lx, Ly)
    cells = []
    for h in range(low, high + 1, 2):
        for x in range(0, 4 * Lx, 2):
            for y in range(0, 4 * Ly, 2):
                point = (x, y, h - x - y)
                if _is_bcc(point):
                    cells.append(point)
    return _honeycomb_lattice(chart, cells, f'slab:{Lx},{Ly},{thickness},{boundary_color}',
                              periodic=False, boundary_color=boundary_color, h_range=(low, high))


def build_thickened_torus(Lx, Ly, thickness):
    """Slab with A-colored boundaries on both sides."""
    return build_slab(Lx, Ly, thickness, 'A')


# ==================== Boundary Layers ====================

def boundary_chirality(lattice, region):
    """
    Handedness of a boundary layer in the stacking frame.

    At each boundary site w the three real volumes, in color order, span a
    triangle; its orientation against the stacking axis (1, 1, 1) times lambda(w)
    is the same at every site of one layer, and opposite on the two layers of a
    slab.

    Args:
        lattice: ColorLattice with geometry
        region: Fictitious-vertex label, e.g. "bottom" or "top"

    Returns:
        +1 or -1
    """
    if lattice.geometry is None:
        raise ParameterError("Chirality needs an embedded lattice")
    regions = lattice.boundary_regions()
    if region not in regions:
        raise ParameterError(f"Lattice {lattice.name} has no boundary region {region!r}")
    color = regions[region]
    real_columns = [i for i, c in enumerate(COLORS) if c != color]
    normal = np.array([1, 1, 1])
    signs = set()
    for v in lattice.boundary_sites(color, region):
        r = lattice.geometry.tet_centers[v][real_columns]
        det = int(round(np.linalg.det(np.array([r[1] - r[0], r[2] - r[0], normal], dtype=float))))
        signs.add(int(lattice.lam[v]) * (1 if det > 0 else -1))
    if len(signs) != 1:
        raise ConstructionError(f"Boundary {region} of {lattice.name} has mixed handedness")
    return signs.pop()


@dataclass(frozen=True)
class HexLayer:
    """
    Honeycomb layer cut from the bottom boundary of a slab.

    ``faces[i]`` lists layer sites in cyclic order; ``colors[i]`` is the single
    color of the volume behind the face; ``site_map[k]`` is the slab site of layer
    site k.
    """

    faces: tuple
    colors: tuple
    lam: np.ndarray
    edges: tuple
    site_map: np.ndarray
    slab: ColorLattice

    @property
    def n(self):
        return len(self.site_map)


def build_hex_layer(Lx, Ly):
    """
    Periodic hexagonal 2D color-code lattice: the boundary layer of a thickened torus.

    Args:
        Lx, Ly: In-plane periods

    Returns:
        HexLayer with 6 LxLy sites and 3 LxLy hexagons
    """
    slab = build_slab(Lx, Ly, 1, 'A')
    sites = slab.boundary_sites('A', 'bottom')
    local = {v: k for k, v in enumerate(sites)}
    faces = []
    colors = []
    for f in slab.boundary_faces('A', 'bottom'):
        face = slab.faces[f]
        faces.append(tuple(local[v] for v in face.vertices))
        colors.append(face.colors.replace('A', '', 1))
    edges = []
    for edge in slab.edges:
        u, w = edge.vertices
        if u in local and w in local:
            edges.append((local[u], local[w]))
    return HexLayer(faces=tuple(faces), colors=tuple(colors), lam=slab.lam[sites].copy(),
                    edges=tuple(edges), site_map=np.array(sites, dtype=np.int64), slab=slab)


# ==================== Specs ====================

def lattice_from_spec(spec):
    """
    Build a lattice from a ``name:params`` spec or a JSON file path.

    Args:
        spec: See chiralcc.utils.parse_lattice_spec

    Returns:
        ColorLattice
    """
    name, params = parse_lattice_spec(spec)
    if name == 'file':
        path = Path(params[0])
        if not path.exists():
            raise ParameterError(f"Lattice file {path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise StructureError(f"Lattice file {path} is not valid JSON: {e}") from e
        return ColorLattice.from_dict(data)
    builders = {
        'cube8': build_cube8,
        'tetra15': build_tetra15,
        'sphere': build_sphere,
        'torus': build_torus,
        'slab': build_slab,
    }
    return builders[name](*params)
