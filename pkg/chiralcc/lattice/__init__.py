"""
Four-colorable lattices: cell complexes, builders and homology.
"""

from .builders import (
    HexLayer,
    boundary_chirality,
    build_cube8,
    build_hex_layer,
    build_slab,
    build_sphere,
    build_tetra15,
    build_thickened_torus,
    build_torus,
    lattice_from_spec,
)
from .complex import (
    COLORS,
    EDGE_COLORS,
    FACE_COLORS,
    ColorLattice,
    DualLattice,
    DualVertex,
    ValidationReport,
    bipartition,
)
from .homology import betti2, boundary_maps

__all__ = [
    'COLORS', 'EDGE_COLORS', 'FACE_COLORS',
    'ColorLattice', 'DualLattice', 'DualVertex', 'HexLayer', 'ValidationReport',
    'betti2', 'bipartition', 'boundary_chirality', 'boundary_maps',
    'build_cube8', 'build_hex_layer', 'build_slab', 'build_sphere', 'build_tetra15',
    'build_thickened_torus', 'build_torus', 'lattice_from_spec',
]
