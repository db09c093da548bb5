"""
Condensation Service

Projective measurement of commuting Pauli operators post-selected to +1, and
the two worked condensations of the Z_4^(1) surface theory.

Features:
- Generic stabilizer update: kept generators, powers that commute, and
  recombined products of the ones that do not
- Chiral semion: a^2 bosons condensed by squared two-body edge operators, on the
  boundary layer or in the bulk
- Three-fermion: four copies with a_j^2 and a_1 a_2 a_3 a_4 condensed
- Re-verification report with the exchange and braiding phases of the survivors

Usage:
    from chiralcc.services.condense_services import condense_semion, run_condense_service

    condensed = condense_semion(build_slab(2, 2, 2))
    result = run_condense_service(build_slab(2, 2, 2), recipe='semion')
"""

import logging
from dataclasses import dataclass, field
from math import gcd

import networkx as nx
import numpy as np

from ..codes.analysis import commutation_matrix, group_contains
from ..codes.builders import StabilizerCode, build_boundary, build_chiral, tensor_codes
from ..exceptions import ChiralccError, ConstructionError, ParameterError, StructureError
from ..linalg import kernel_mod, solve_mod
from ..lattice.complex import COLORS
from ..pauli import commutation_exponent, multiply, power, product, stack_symplectic, tensor
from ..topo.operators import code_operator, edge_operator, native_pauli
from ..topo.statistics import (bulk_junction_hops, surface_anyon_string, surface_junction_hops,
                               t_junction_phase, tensor_hops)
from ..utils import render_phase, service_result

logger = logging.getLogger(__name__)

RECIPES = ('semion', 'semion-bulk', 'three-fermion')
FERMION_COPIES = 4


# ===============================
# Measurement Update
# ===============================

@dataclass(frozen=True)
class MeasurementSet:
    """
    Operators measured together and post-selected on +1.

    Raises:
        ConstructionError: two operators fail to commute
    """

    operators: tuple
    outcome: int = 1

    def __post_init__(self):
        operators = tuple(self.operators)
        object.__setattr__(self, 'operators', operators)
        if self.outcome != 1:
            raise ParameterError(f"Only +1 post-selection is supported, got {self.outcome}")
        if not operators:
            raise ParameterError("Nothing to measure")
        d, n = operators[0].d, operators[0].n
        if any(op.d != d or op.n != n for op in operators):
            raise StructureError("Measured operators act on different registers")
        matrix = commutation_matrix(stack_symplectic(operators), d=d)
        rows, cols = np.nonzero(np.triu(matrix, 1))
        if rows.size:
            i, j = int(rows[0]), int(cols[0])
            raise ConstructionError(f"Measured operators {i} and {j} do not commute "
                                    f"(omega^{int(matrix[i, j])})")

    @property
    def d(self):
        return self.operators[0].d

    @property
    def n(self):
        return self.operators[0].n

    def __len__(self):
        return len(self.operators)


def _commuting_power(row, d):
    """Smallest k with k * row = 0 (mod d)."""
    common = d
    for value in row:
        common = gcd(common, int(value))
    return d // common


def measure_and_update(code, measurements):
    """
    Stabilizer group after measuring ``measurements`` on ``code`` and post-selecting +1.

    Generators commuting with every measured operator are kept. A generator that
    does not is replaced by its smallest commuting power, and products of the
    non-commuting generators whose charges cancel are added when they are not
    already in the group.

    Args:
        code: StabilizerCode
        measurements: MeasurementSet on the code register

    Returns:
        StabilizerCode of family "condensed"

    Raises:
        ConstructionError: the updated generators fail to commute
    """
    if measurements.d != code.d or measurements.n != code.n:
        raise StructureError(f"Measurements do not act on the register of {code.name}")
    d = code.d
    measured = list(measurements.operators)
    charges = commutation_matrix(code.symplectic, stack_symplectic(measured), d)

    generators, sources, noncommuting = [], [], []
    for i, (g, source) in enumerate(zip(code.generators, code.sources)):
        k = _commuting_power(charges[i], d)
        if k == 1:
            generators.append(g)
            sources.append(('kept', source, 1))
            continue
        noncommuting.append(i)
        if k < d:
            generators.append(power(g, k))
            sources.append(('kept', source, k))

    combined = 0
    if noncommuting:
        current = stack_symplectic(generators + measured, code.n)
        relations = kernel_mod(charges[noncommuting].T, d)
        for a in relations.vectors:
            factors = [power(code.generators[i], int(c)) for i, c in zip(noncommuting, a) if c]
            if not factors:
                continue
            op = product(factors)
            if op.is_identity() or group_contains(current, op, d) is not None:
                continue
            generators.append(op)
            sources.append(('combined', combined))
            current = np.vstack([current, op.symplectic()])
            combined += 1

    dropped = len(noncommuting)
    generators.extend(measured)
    sources.extend(('measured', j) for j in range(len(measured)))

    check = commutation_matrix(stack_symplectic(generators), d=d)
    if check.any():
        rows, cols = np.nonzero(check)
        raise ConstructionError(f"Condensed generators {sources[rows[0]]} and {sources[cols[0]]} "
                                f"do not commute")

    condensed = StabilizerCode('condensed', d, generators, sources, lattice=code.lattice,
                               alpha=code.alpha, sites=code.sites, natives=code.natives,
                               name=f'condensed[{code.name}]', n=code.n)
    for attribute in ('boundary', 'copies'):
        if hasattr(code, attribute):
            setattr(condensed, attribute, getattr(code, attribute))
    logger.info(f"Measured {len(measured)} operators on {code.name}: {dropped} generators "
                f"replaced, {combined} recombined")
    return condensed


# ===============================
# Semion Condensation
# ===============================

def _check_z4(d, alpha):
    if d != 4 or alpha % d != 1:
        raise ParameterError(f"This condensation starts from Z_4^(1), got d={d}, alpha={alpha}")


def a_edge_operator(lattice, e, d=4, alpha=1):
    """
    Two-body operator on an A-containing edge: at each end, the native of the
    face pairing A with the color the edge omits.
    """
    colors = lattice.edges[e].colors
    if 'A' not in colors:
        raise ParameterError(f"Edge {e} ({colors}) does not contain A")
    omitted = next(c for c in COLORS if c not in colors)
    pair = 'A' + omitted
    factors = [native_pauli(lattice, lattice.face_at(v, pair), v, d, alpha, 'chiral')
               for v in lattice.edges[e].vertices]
    return multiply(*factors)


def boundary_edges(code):
    """In-layer edges of a boundary code (both ends on the layer), sorted."""
    lattice = code.lattice
    color = code.boundary['color']
    skip = COLORS.index(color)
    edges = set()
    for v in code.sites:
        for omit in range(4):
            e = int(lattice.tet_edges[v, omit])
            if omit == skip or e < 0:
                continue
            if all(int(w) in code.site_index for w in lattice.edges[e].vertices):
                edges.add(e)
    return sorted(edges)


def semion_measurements(code):
    """Squared edge operators that condense a^2 on a boundary code."""
    lattice = code.lattice
    family = code.boundary['family']
    ops = []
    for e in boundary_edges(code):
        op = edge_operator(lattice, e, code.d, code.alpha, family)
        ops.append(code_operator(code, power(op, 2)))
    return MeasurementSet(tuple(ops))


def condense_semion(lattice, scope='boundary', color='A', region=None, d=4, alpha=1):
    """
    Condense the a^2 boson of Z_4^(1), leaving the chiral semion theory.

    Args:
        lattice: ColorLattice; with scope "boundary" it must expose a ``color`` boundary
        scope: "boundary" measures the squared in-layer edge operators on the boundary
            code; "bulk" measures every squared A-containing edge operator on the
            chiral code of the whole lattice
        color: Boundary color for the boundary scope
        region: Boundary component for the boundary scope
        d, alpha: Parent theory, which must be Z_4^(1)

    Returns:
        StabilizerCode of family "condensed"

    Raises:
        ParameterError: (d, alpha) is not (4, 1)
    """
    _check_z4(d, alpha)
    if scope == 'boundary':
        code = build_boundary(lattice, color, 'chiral', d, alpha, region)
        return measure_and_update(code, semion_measurements(code))
    if scope == 'bulk':
        code = build_chiral(lattice, d, alpha)
        edges = [edge.id for edge in lattice.edges if 'A' in edge.colors]
        ops = tuple(power(a_edge_operator(lattice, e, d, alpha), 2) for e in edges)
        return measure_and_update(code, MeasurementSet(ops))
    raise ParameterError(f"Unknown semion scope {scope!r}; expected 'boundary' or 'bulk'")


def hop_string(code, source=None):
    """
    Surface string O_l built from the in-layer hops g_e along a shortest path.

    The path runs from ``source`` (the first code site by default) to the farthest
    site reachable through in-layer edges. Every hop squares to a measured edge
    operator, so O_l^2 is a product of the semion measurements.

    Returns:
        tuple (PauliOperator on code sites, path edge ids)
    """
    lattice = code.lattice
    family = code.boundary['family']
    graph = nx.Graph()
    for e in boundary_edges(code):
        u, w = (int(v) for v in lattice.edges[e].vertices)
        graph.add_edge(u, w, id=e)
    source = int(code.sites[0]) if source is None else int(source)
    if source not in graph:
        raise ParameterError(f"Site {source} has no in-layer edge on {code.name}")
    reach = nx.single_source_shortest_path(graph, source)
    target = max(sorted(reach), key=lambda v: len(reach[v]))
    vertices = reach[target]
    edges = tuple(graph.edges[u, w]['id'] for u, w in zip(vertices, vertices[1:]))
    hops = [code_operator(code, edge_operator(lattice, e, code.d, code.alpha, family))
            for e in edges]
    return product(hops, code.n, code.d), edges

# ===============================
# Three-Fermion Condensation
# ===============================

def _short_string(code, v):
    """g_ACD(v) * g_ABD(v) on a boundary code, or None when an edge leaves the layer."""
    lattice = code.lattice
    family = code.boundary['family']
    ops = []
    for omit in (1, 2):
        e = int(lattice.tet_edges[v, omit])
        if e < 0 or not all(int(w) in code.site_index for w in lattice.edges[e].vertices):
            return None
        ops.append(code_operator(code, edge_operator(lattice, e, code.d, code.alpha, family)))
    return multiply(*ops)


def three_fermion_measurements(single):
    """
    Short strings condensing a_j^2 on every copy and a_1 a_2 a_3 a_4 across copies.

    Sites with lambda = -1 carry the squared string on each copy; sites with
    lambda = +1 carry the string on all four copies at once.
    """
    lattice = single.lattice
    ops = []
    for v in single.sites:
        string = _short_string(single, int(v))
        if string is None:
            continue
        blocks = [power(string, 0)] * FERMION_COPIES
        if lattice.lam[v] < 0:
            for j in range(FERMION_COPIES):
                placed = list(blocks)
                placed[j] = power(string, 2)
                ops.append(tensor(placed))
        else:
            ops.append(tensor([string] * FERMION_COPIES))
    return MeasurementSet(tuple(ops))


def condense_three_fermion(lattice, color='A', region=None, d=4, alpha=1):
    """
    Four copies of the Z_4^(1) boundary theory condensed down to the three-fermion theory.

    Returns:
        tuple (condensed StabilizerCode, single-copy boundary code)
    """
    _check_z4(d, alpha)
    single = build_boundary(lattice, color, 'chiral', d, alpha, region)
    stacked = tensor_codes([single] * FERMION_COPIES)
    stacked.boundary = single.boundary
    return measure_and_update(stacked, three_fermion_measurements(single)), single


def anyon_class_trivial(label, d=4):
    """
    Whether a_1^x1 ... a_4^x4 lies in the condensed vacuum generated by
    the a_j^2 and a_1 a_2 a_3 a_4.
    """
    label = np.mod(np.asarray(label, dtype=np.int64), d)
    if label.shape != (FERMION_COPIES,):
        raise ParameterError(f"Anyon label needs {FERMION_COPIES} entries, got {label.shape}")
    vacuum = np.vstack([2 * np.eye(FERMION_COPIES, dtype=np.int64),
                        np.ones((1, FERMION_COPIES), dtype=np.int64)])
    return solve_mod(vacuum.T, label, d).feasible


def tensor_braiding(condensed, single, x, y, center_face=None):
    """
    omega exponent of braiding the loop of a^x around a^y on the four-copy register.

    Copy j carries the face loop of ``single`` raised to x_j and the oriented surface
    string raised to y_j. The loop must survive as a stabilizer of ``condensed``.

    Raises:
        ConstructionError: the loop is not in the condensed group
    """
    string, region, _, _ = surface_anyon_string(single, center_face)
    faces = product((single.generator_for(('face', int(f))) for f in region), single.n, single.d)
    loop = tensor([power(faces, int(xj)) for xj in x])
    anyon = tensor([power(string, int(yj)) for yj in y])
    if group_contains(condensed, loop) is None:
        raise ConstructionError(f"Loop of {tuple(x)} is not a stabilizer of {condensed.name}")
    return commutation_exponent(loop, anyon)


# ===============================
# Reports
# ===============================

@dataclass
class CondensationReport:
    """Before/after generator counts plus every re-verification check."""

    recipe: str
    before: StabilizerCode
    after: StabilizerCode
    measured: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check['passed'] for check in self.checks)

    def add(self, name, value, expected, d=None):
        check = {'name': name, 'value': value, 'expected': expected, 'passed': value == expected}
        if d is not None:
            check['rendered'] = render_phase(value, d)
        self.checks.append(check)

    def to_dict(self):
        return {
            'recipe': self.recipe,
            'before': self.before.to_dict(),
            'after': self.after.to_dict(),
            'measured': self.measured,
            'checks': self.checks,
            'passed': self.passed,
        }


def _same_group(first, second, d):
    """Whether two generator lists span the same group (mod phase)."""
    a, b = stack_symplectic(first), stack_symplectic(second)
    return (all(group_contains(b, g, d) is not None for g in first)
            and all(group_contains(a, g, d) is not None for g in second))


def _semion_report(lattice):
    boundary = build_boundary(lattice, 'A', 'chiral', 4, 1)
    measurements = semion_measurements(boundary)
    condensed = measure_and_update(boundary, measurements)
    report = CondensationReport('semion', boundary, condensed, len(measurements))
    quoted = list(boundary.generators) + list(measurements.operators)
    report.add('generators_match', _same_group(condensed.generators, quoted, 4), True)
    v = int(boundary.sites[0])
    theta = t_junction_phase(condensed, surface_junction_hops(boundary, v))
    report.add('theta', theta, 2, d=4)
    string, _ = hop_string(boundary, v)
    square = power(string, 2)
    membership = group_contains(stack_symplectic(measurements.operators), square, 4)
    report.add('square_in_measured', membership is not None, True)
    return report


def _semion_bulk_report(lattice):
    code = build_chiral(lattice, 4, 1)
    condensed = condense_semion(lattice, scope='bulk')
    measured = sum(1 for source in condensed.sources if source[0] == 'measured')
    report = CondensationReport('semion-bulk', code, condensed, measured)
    faces = {}
    for face in lattice.faces:
        faces.setdefault(face.colors, face.id)
    for colors in ('AB', 'AC', 'AD'):
        g = code.generator_for(('face', faces[colors]))
        report.add(f'{colors.lower()}_face_kept', group_contains(condensed, g) is not None, True)
    for colors in ('BC', 'BD', 'CD'):
        g = code.generator_for(('face', faces[colors]))
        report.add(f'{colors.lower()}_face_dropped', group_contains(condensed, g) is None, True)
        report.add(f'{colors.lower()}_square_kept',
                   group_contains(condensed, power(g, 2)) is not None, True)
    squares = bulk_junction_hops(code, 0, length=2)
    report.add('square_charged_before', all(code.syndrome(op).any() for op in squares), True)
    report.add('square_commutes', not any(condensed.syndrome(op).any() for op in squares), True)
    return report


def _three_fermion_report(lattice):
    condensed, single = condense_three_fermion(lattice)
    measured = sum(1 for source in condensed.sources if source[0] == 'measured')
    stacked = tensor_codes([single] * FERMION_COPIES)
    report = CondensationReport('three-fermion', stacked, condensed, measured)
    hops = surface_junction_hops(single, int(single.sites[0]))
    labels = {}
    for j in range(1, FERMION_COPIES):
        label = np.zeros(FERMION_COPIES, dtype=np.int64)
        label[[0, j]] = 1
        labels[f'a1a{j + 1}'] = label
        theta = t_junction_phase(condensed, tensor_hops(hops, (0, j), FERMION_COPIES))
        report.add(f'theta(a1a{j + 1})', theta, 4, d=4)
    names = sorted(labels)
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            exponent = tensor_braiding(condensed, single, labels[first], labels[second])
            report.add(f'braiding({first},{second})', 2 * exponent % 8, 4, d=4)
    fused = sum(labels.values())
    report.add('fusion_trivial', anyon_class_trivial(fused), True)
    return report


_REPORTS = {
    'semion': _semion_report,
    'semion-bulk': _semion_bulk_report,
    'three-fermion': _three_fermion_report,
}


def run_condense_service(lattice, recipe='semion'):
    """
    Run one condensation recipe and re-verify the surviving anyons.

    Returns:
        dict from service_result with the CondensationReport under ``report``
    """
    if recipe not in _REPORTS:
        raise ParameterError(f"Unknown recipe {recipe!r}; expected one of {', '.join(RECIPES)}")
    try:
        report = _REPORTS[recipe](lattice)
    except ChiralccError as exc:
        logger.exception(f"Condensation {recipe} failed on {lattice.name}: {exc}")
        return service_result("failed", str(exc))
    failing = [check['name'] for check in report.checks if not check['passed']]
    if failing:
        return service_result("failed", f"Checks failed: {', '.join(failing)}", report=report)
    return service_result(message=f"{recipe}: {len(report.checks)} checks passed", report=report)
