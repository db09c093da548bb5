"""
Anyon statistics oracles: T-junction spins, braiding phases and the chiral central charge.

Phases are returned as tau exponents (tau = exp(i*pi/d)), the same unit used for
operator phases, so ``2 * k`` is the omega exponent k.

Usage:
    from chiralcc.topo import surface_junction_hops, t_junction_phase

    hops = surface_junction_hops(boundary_code, v)
    t_junction_phase(boundary_code, hops)  # -> 2 * alpha, i.e. omega^alpha
"""

import logging
from dataclasses import dataclass
from math import gcd

import numpy as np
from sympy import I, Poly, Symbol, cyclotomic_poly, exp, pi, rem, sqrt

from ..codes.builders import native_exponents
from ..exceptions import ConstructionError, ParameterError, StructureError, UnsupportedError
from ..lattice.builders import boundary_chirality
from ..pauli import PauliOperator, group_commutator_phase, multiply, power, tensor
from .operators import (LatticePath, code_operator, edge_operator, excitation_clusters,
                        string_operator, surface_arc, surface_disk, surface_string, syndrome_of)

logger = logging.getLogger(__name__)

# Numeric tolerance when matching the normalized Gauss sum to an eighth root of unity
GAUSS_TOLERANCE = 1e-9
# Largest d whose |G|^2 = d identity is also certified in the cyclotomic ring
EXACT_GAUSS_LIMIT = 16
VIEWPOINTS = ('interior', 'above')


# ==================== T-Junctions ====================

def t_junction_phase(code, hops):
    """
    Exchange phase of the T-junction process T3^-1 T2^-1 T1^-1 T3 T2 T1.

    Args:
        code: StabilizerCode the hops act on
        hops: Three PauliOperator hops sharing the junction point

    Returns:
        tau exponent of the scalar composite

    Raises:
        ConstructionError: invalid T-junction (composite is not a scalar)
    """
    hops = list(hops)
    if len(hops) != 3:
        raise ParameterError(f"A T-junction needs three hops, got {len(hops)}")
    for hop in hops:
        if hop.n != code.n or hop.d != code.d:
            raise StructureError(f"Hop does not act on code {code.name}")
    phase = group_commutator_phase(hops)
    if phase is None:
        raise ConstructionError("invalid T-junction: composite is not a scalar")
    logger.debug(f"T-junction on {code.name}: tau^{phase}")
    return phase


def _leg(lattice, center_edge, u, first, length):
    """Leg leaving u through edge ``first``, extended by ``length - 1`` further edges."""
    vertices = [u]
    edges = []
    used = {u, lattice.other_end(center_edge, u)}
    current, edge = u, first
    for _ in range(length - 1):
        nxt = lattice.other_end(edge, current)
        if nxt in used:
            break
        options = [e for e in lattice.edges_of(nxt)
                   if e != edge and lattice.other_end(e, nxt) not in used | {nxt}]
        if not options:
            break
        used.add(nxt)
        vertices.append(nxt)
        edges.append(edge)
        current, edge = nxt, min(options)
    return LatticePath(tuple(vertices), tuple(edges), False, (center_edge, edge))


def bulk_junction_hops(code, center_edge, length=1):
    """
    Three string hops sharing the excitation on ``center_edge``.

    The legs leave one end u of the centre edge through its other three edges. For
    even d the strings are raised to the power d/2, which leaves point-like ends.

    Args:
        code: Closed-lattice "xyz" or "chiral" StabilizerCode with even d
        center_edge: Edge id shared by all three hops
        length: Edges per leg beyond the junction

    Returns:
        tuple of three PauliOperator
    """
    if code.natives not in ('xyz', 'chiral') or code.lattice is None:
        raise ParameterError(f"Code {code.name} has no native string operators")
    if code.d % 2:
        raise UnsupportedError("Bulk strings of odd-d chiral codes leave string-like "
                               "excitations; use surface_junction_hops")
    lattice = code.lattice
    u = lattice.edges[center_edge].vertices[0]
    legs = [e for e in lattice.edges_of(u) if e != center_edge]
    hops = []
    for first in legs:
        path = _leg(lattice, center_edge, u, first, max(1, int(length)))
        op = string_operator(lattice, path, code.d, code.alpha, code.natives)
        hops.append(power(op, code.d // 2))
    return tuple(hops)


def _native_rank(colors, d, alpha, family):
    x, z = native_exponents(colors, 1, d, alpha, family)
    if z == 0:
        return 0
    return 1 if x == 0 else 2


def surface_junction_hops(code, v, j=1, viewpoint='interior'):
    """
    Two-body hops g_e on the three in-layer edges at a boundary site.

    The legs are ordered X-type, Z-type, XZ-type by the native of the boundary face
    each one uses, reversed at lambda = -1 sites. From the interior every boundary
    vertex then hosts the anyon with spin omega^alpha. The "above" viewpoint flips
    the order by the layer's handedness, so the two sides of a slab give conjugate
    spins.

    Args:
        code: Boundary StabilizerCode
        v: Lattice site on the boundary
        j: Anyon power (the hops are raised to j)
        viewpoint: "interior" or "above"

    Returns:
        tuple of three PauliOperator on code sites
    """
    if viewpoint not in VIEWPOINTS:
        raise ParameterError(f"Unknown viewpoint {viewpoint!r}")
    boundary = getattr(code, 'boundary', None)
    if boundary is None:
        raise ParameterError(f"Code {code.name} is not a boundary code")
    lattice = code.lattice
    code.code_site(v)
    color = boundary['color']
    legs = []
    for omit, other in enumerate('ABCD'):
        if other == color:
            continue
        e = int(lattice.tet_edges[v, omit])
        if e < 0:
            raise ParameterError(f"Site {v} is missing its {other}-omitting boundary edge")
        colors = ''.join(sorted(color + other))
        legs.append((_native_rank(colors, code.d, code.alpha, boundary['family']), e))
    legs.sort()
    orientation = int(lattice.lam[v])
    if viewpoint == 'above':
        orientation *= boundary_chirality(lattice, boundary['region'])
    if orientation < 0:
        legs.reverse()
    hops = []
    for _, e in legs:
        op = edge_operator(lattice, e, code.d, code.alpha, boundary['family'])
        hops.append(power(code_operator(code, op), j))
    return tuple(hops)


def tensor_hops(hops, copies, ncopies):
    """
    Place every hop on each listed copy of an ``ncopies``-fold tensor code.

    Args:
        hops: Operators on one copy
        copies: Copy indices carrying the hop (e.g. (0, 1) for a1 a2)
        ncopies: Number of copies
    """
    copies = set(copies)
    result = []
    for hop in hops:
        identity = PauliOperator.identity(hop.n, hop.d)
        result.append(tensor(hop if j in copies else identity for j in range(ncopies)))
    return tuple(result)


def dress_hops(code, hops, rng, count=3):
    """
    Multiply each hop by random powers of generators that no hop excites.

    Dressed hops create the same excitations, so the T-junction phase is unchanged.
    """
    excited = np.zeros(len(code), dtype=bool)
    for hop in hops:
        excited |= code.syndrome(hop) != 0
    allowed = np.flatnonzero(~excited)
    dressed = []
    for hop in hops:
        if allowed.size:
            for k in rng.choice(allowed, size=min(count, allowed.size), replace=False):
                hop = multiply(hop, power(code.generators[k], int(rng.integers(1, code.d))))
        dressed.append(hop)
    return tuple(dressed)


# ==================== Braiding ====================

@dataclass(frozen=True)
class BraidingResult:
    """
    Commutation phase of a loop of boundary stabilizers with a string.

    ``exponent`` is the omega exponent; ``invariant`` is False when the loop region
    cuts through an excitation cluster. Surface braiding also records the raw end
    ``charge`` of the unit string and the ``spin`` (tau exponent) of the anyon.
    """

    exponent: int
    d: int
    invariant: bool
    charge: int = None
    spin: int = None

    @property
    def phase(self):
        return (2 * self.exponent) % (2 * self.d)

    def to_dict(self):
        data = {'exponent': self.exponent, 'phase_exponent': self.phase, 'd': self.d,
                'invariant': self.invariant}
        if self.charge is not None:
            data.update(charge=self.charge, spin=self.spin)
        return data


def braiding_phase(code, region, op, loop_power=1):
    """
    Braid the loop W = prod_{f in region} S_f^loop_power around the ends of a string.

    Args:
        code: Boundary StabilizerCode
        region: Boundary faces enclosing the anyon
        op: Anyon-creating string on code sites
        loop_power: Power i of the loop operator

    Returns:
        BraidingResult
    """
    syndrome = syndrome_of(code, op)
    members = set(int(f) for f in region)
    values = syndrome.face_values()
    exponent = (loop_power * sum(values.get(f, 0) for f in members)) % code.d
    invariant = True
    for cluster in excitation_clusters(code.lattice, syndrome):
        inside = [f in members for f in cluster['faces']]
        if any(inside) and not all(inside):
            invariant = False
    if not invariant:
        logger.warning(f"Braiding region splits an excitation on {code.name}; "
                       f"the phase is not a topological invariant")
    return BraidingResult(exponent, code.d, invariant)


# ==================== Central Charge ====================

def gauss_sum(d, alpha):
    """Quadratic Gauss sum sum_i omega^(alpha i^2) as a sympy expression."""
    return sum(exp(2 * pi * I * ((alpha * i * i) % d) / d) for i in range(d))


def _certify_norm(d, alpha):
    """|G|^2 = d checked exactly in Z[x]/Phi_d(x)."""
    x = Symbol('x')
    forward = sum(x ** ((alpha * i * i) % d) for i in range(d))
    backward = sum(x ** ((-alpha * i * i) % d) for i in range(d))
    remainder = rem(Poly(forward * backward - d, x), Poly(cyclotomic_poly(d, x), x))
    return remainder.is_zero


def chiral_central_charge(d, alpha):
    """
    Chiral central charge c_- mod 8 of the surface theory Z_d^(alpha).

    Solves exp(2 pi i c_- / 8) = G / sqrt(d) for the Gauss sum G.

    Args:
        d: Odd qudit dimension
        alpha: Chirality, coprime to d

    Returns:
        int in 0..7

    Raises:
        UnsupportedError: d is even (condense first)
        ParameterError: gcd(d, alpha) != 1
    """
    if d % 2 == 0:
        raise UnsupportedError(f"d={d} is even: the surface anyons must be condensed before "
                               f"the central charge is defined")
    if d < 3 or gcd(d, alpha) != 1:
        raise ParameterError(f"Central charge needs odd d >= 3 and gcd(d, alpha) = 1, "
                             f"got d={d}, alpha={alpha}")
    value = complex((gauss_sum(d, alpha) / sqrt(d)).evalf(40))
    eighths = np.angle(value) / (2 * np.pi / 8)
    charge = int(round(eighths)) % 8
    if abs(abs(value) - 1) > GAUSS_TOLERANCE or abs(eighths - round(eighths)) > GAUSS_TOLERANCE:
        raise ConstructionError(f"Gauss sum for d={d}, alpha={alpha} is not an eighth root "
                                f"of unity times sqrt(d): {value}")
    if d <= EXACT_GAUSS_LIMIT and not _certify_norm(d, alpha):
        raise ConstructionError(f"Gauss sum norm certificate failed for d={d}")
    logger.debug(f"c_-(d={d}, alpha={alpha}) = {charge}")
    return charge


def surface_flower(code, center_face=None):
    """Seven boundary faces: a centre face and its six neighbours."""
    lattice = code.lattice
    color, region = code.boundary['color'], code.boundary['region']
    if center_face is not None:
        candidates = [center_face]
    else:
        candidates = lattice.boundary_faces(color, region)
    for f in candidates:
        faces = surface_disk(lattice, color, f, 1, region)
        if len(faces) == 7:
            return faces
    raise ConstructionError(f"No boundary face of {code.name} has six boundary neighbours")


def _junction_braiding(code, v):
    """omega exponent of B(a, a) = theta(a^2) / theta(a)^2 from junction hops at v."""
    single = t_junction_phase(code, surface_junction_hops(code, v, 1))
    double = t_junction_phase(code, surface_junction_hops(code, v, 2))
    return ((double - 2 * single) % (2 * code.d)) // 2, single


def surface_anyon_string(code, center_face=None):
    """
    Cut surface string oriented so its first end carries the junction anyon a.

    The end charge c read by the disk loop must be +-B(a, a), with B(a, a) taken from
    the T-junction spins at the first end site; the string is inverted when c = -B(a, a).

    Returns:
        tuple (string PauliOperator, disk of faces around the first end, raw end charge,
        spin tau exponent of a)

    Raises:
        ConstructionError: the end anyon is not a or its conjugate
    """
    if getattr(code, 'boundary', None) is None:
        raise ParameterError(f"Code {code.name} is not a boundary code")
    lattice = code.lattice
    flower = surface_flower(code, center_face)
    arc = surface_arc(lattice, flower)
    string = surface_string(code, flower, arc)
    end_faces = set(lattice.faces_of_edge(arc.end_edges[0]))
    clusters = excitation_clusters(lattice, syndrome_of(code, string))
    first = next((c for c in clusters if end_faces.intersection(c['faces'])), None)
    if first is None:
        raise ConstructionError("Surface string leaves no excitation at its first end")
    charge = first['charge']
    expected, spin = _junction_braiding(code, int(arc.vertices[0]))
    if charge == expected:
        sign = 1
    elif charge == (-expected) % code.d:
        sign = -1
    else:
        raise ConstructionError(f"End charge {charge} is neither a nor its conjugate "
                                f"(B(a, a) = omega^{expected})")
    anchor = min(f for f in flower if f in end_faces)
    region = surface_disk(lattice, code.boundary['color'], anchor, 1, code.boundary['region'])
    return power(string, sign), region, charge, spin


def surface_braiding(code, i=1, j=1, center_face=None):
    """
    Braid the loop around a^i with the anyon a^j on a boundary code.

    The anyon a is the one the junction hops at the string's first end create. The
    oriented string is raised to j and encircled by the disk of faces around that
    end; the loop is the product of those faces raised to i.

    Args:
        code: Boundary StabilizerCode
        i: Power of the loop
        j: Power of the enclosed anyon
        center_face: Centre of the flower (first suitable boundary face by default)

    Returns:
        BraidingResult carrying the raw end charge and the spin of a
    """
    string, region, charge, spin = surface_anyon_string(code, center_face)
    result = braiding_phase(code, region, power(string, j), loop_power=i)
    return BraidingResult(result.exponent, code.d, result.invariant, charge=charge, spin=spin)
