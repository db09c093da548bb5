"""
Cellular homology of closed color lattices.

Cells are oriented through the dual simplices: every dual simplex has distinct
colors, so ordering its corners by color fixes an orientation. With that choice
the primal boundary maps are the simplicial coboundaries of the dual complex.
"""

import logging

import numpy as np
from sympy import factorint

from ..exceptions import ParameterError, UnsupportedError
from ..linalg import local_smith_form
from .complex import COLOR_INDEX

logger = logging.getLogger(__name__)


def boundary_maps(lattice):
    """
    Oriented boundary maps of a closed lattice.

    Returns:
        tuple (d2, d3): d2 is E x F (faces to edges), d3 is F x C (volumes to faces),
        with d2 @ d3 == 0
    """
    if not lattice.is_closed:
        raise UnsupportedError(f"Lattice {lattice.name} has boundaries; homology needs a "
                               f"closed lattice")
    F, E, C = len(lattice.faces), len(lattice.edges), len(lattice.volumes)
    d3 = np.zeros((F, C), dtype=np.int64)
    for face in lattice.faces:
        first, second = face.volumes
        d3[face.id, first] -= 1
        d3[face.id, second] += 1

    d2 = np.zeros((E, F), dtype=np.int64)
    for edge in lattice.edges:
        faces = sorted(lattice.faces_of_edge(edge.id),
                       key=lambda f: tuple(COLOR_INDEX[c] for c in lattice.faces[f].colors))
        if len(faces) != 3:
            raise ParameterError(f"Edge {edge.id} does not bound three faces")
        # faces are (01), (02), (12) in the color order of the dual triangle
        for f, sign in zip(faces, (1, -1, 1)):
            d2[edge.id, f] += sign
    return d2, d3


def _rank_mod_prime(matrix, p):
    if matrix.size == 0:
        return 0
    return local_smith_form(matrix, p, 1, with_u=False).rank


def betti2(lattice, modulus):
    """
    Number of invariant factors of H_2(L; Z_m).

    By the universal coefficient theorem the p-primary part of H_2(L; Z_m) has
    F_p-dimension ``F - rank_p(d2) - rank_p(d3)`` for every prime p | m; the
    invariant-factor count is the largest of these.

    Args:
        lattice: Closed ColorLattice
        modulus: m >= 2

    Returns:
        int
    """
    modulus = int(modulus)
    if modulus < 2:
        raise ParameterError(f"Modulus must be at least 2, got {modulus}")
    d2, d3 = boundary_maps(lattice)
    F = len(lattice.faces)
    best = 0
    for p in factorint(modulus):
        dimension = F - _rank_mod_prime(d2, int(p)) - _rank_mod_prime(d3, int(p))
        best = max(best, dimension)
    logger.debug(f"betti2({lattice.name}, {modulus}) = {best}")
    return best
