"""
Algebraic checks on stabilizer codes.

All computations work on symplectic vectors ``(x | z)`` mod d. Phases are
audited separately where they carry meaning (redundancy relations).

Usage:
    from chiralcc.codes import analysis

    structure = analysis.logical_structure(code)
    structure.group.to_list()          # e.g. [2, 2, 2]
    analysis.code_distance(code, 3).render()
"""

import logging
from dataclasses import dataclass, field
from itertools import product as cartesian

import networkx as nx
import numpy as np

from ..conf import get_setting
from ..exceptions import ConstructionError, StructureError
from ..linalg import (AbelianGroupStructure, ModularSystem, _crt_idempotent, _factor_modulus,
                      invariant_chain, kernel_mod, local_smith_form, solve_mod)
from ..pauli import PauliOperator, power, product
from .builders import volume_operator

logger = logging.getLogger(__name__)


# ==================== Commutation ====================

def commutation_matrix(left, right=None, d=None):
    """
    Pairwise commutation exponents between rows of symplectic matrices.

    Entry (i, j) is c with ``a_i b_j = omega^c b_j a_i``.
    """
    left = getattr(left, 'symplectic', left)
    right = left if right is None else getattr(right, 'symplectic', right)
    n = left.shape[1] // 2
    if right.shape[1] != 2 * n:
        raise StructureError("Operators act on different registers")
    matrix = left[:, n:] @ right[:, :n].T - left[:, :n] @ right[:, n:].T
    return matrix if d is None else np.mod(matrix, d)


def noncommuting_pairs(code):
    """Generator index pairs (i < j) that fail to commute."""
    matrix = commutation_matrix(code.symplectic, d=code.d)
    rows, cols = np.nonzero(np.triu(matrix, 1))
    return [(int(i), int(j)) for i, j in zip(rows, cols)]


# ==================== Group Membership ====================

@dataclass(frozen=True)
class SubgroupResult:
    """Outcome of a containment check; ``witness`` maps generator index -> expansion."""

    contained: bool
    witness: dict = field(default_factory=dict)
    failing: int = None

    def __bool__(self):
        return self.contained


def group_contains(generators, operator, d=None):
    """
    Whether an operator (mod phase) lies in the group generated by symplectic rows.

    Args:
        generators: Code, GaugeCode or (m x 2n) symplectic matrix
        operator: PauliOperator or symplectic vector

    Returns:
        Coefficient vector over the generators, or None
    """
    matrix = getattr(generators, 'symplectic', generators)
    d = d or generators.d
    vector = operator.symplectic() if isinstance(operator, PauliOperator) else operator
    if matrix.shape[0] == 0:
        return np.zeros(0, dtype=np.int64) if not np.mod(vector, d).any() else None
    result = solve_mod(matrix.T, vector, d)
    return result.x if result.feasible else None


def is_subgroup(code, gauge):
    """
    Whether every generator of a stabilizer code lies in the gauge group.

    Args:
        code: StabilizerCode
        gauge: GaugeCode on the same lattice and d

    Returns:
        SubgroupResult with the expansion of each generator, or the first failing one
    """
    if code.d != gauge.d or code.n != gauge.n:
        raise StructureError(f"{code!r} and {gauge!r} do not share a register")
    system = gauge.symplectic.T
    witness = {}
    solver = ModularSystem(system, code.d)
    for i, row in enumerate(code.symplectic):
        result = solver.solve(row)
        if not result.feasible:
            logger.info(f"Generator {code.sources[i]} of {code.name} is not in the gauge group")
            return SubgroupResult(False, witness, failing=i)
        witness[i] = result.x
    return SubgroupResult(True, witness)


def gauge_center(gauge):
    """
    Symplectic generators of the center of a gauge group.

    An element ``a @ G`` is central iff it commutes with every gauge generator,
    i.e. ``a`` is in the left kernel of the commutation matrix.
    """
    omega = commutation_matrix(gauge.symplectic, d=gauge.d)
    kernel = kernel_mod(omega.T, gauge.d)
    if not len(kernel):
        return np.zeros((0, gauge.symplectic.shape[1]), dtype=np.int64)
    return np.mod(kernel.vectors @ gauge.symplectic, gauge.d)


def volume_operators(code, c):
    """The three volume operators X(c), Z^alpha(c) and X^-1 Z^-alpha(c) of a chiral code."""
    return [volume_operator(code.lattice, c, kind, code.d, code.alpha) for kind in ('x', 'z', 'xz')]


# ==================== Redundancy ====================

@dataclass(frozen=True)
class RedundancyReport:
    """
    Relations among generators.

    ``count`` is the number of invariant factors of the relation module; ``local``
    is the part spanned by single-volume relations. ``phases[i]`` is the tau
    exponent of the product for ``relations[i]``; nonzero phases are listed in
    ``signed``.
    """

    count: int
    local: int
    relations: np.ndarray
    orders: tuple
    phases: tuple
    signed: tuple

    @property
    def other(self):
        return self.count - self.local

    def to_dict(self):
        return {
            'count': self.count,
            'local': self.local,
            'other': self.other,
            'orders': list(self.orders),
            'signed_relations': list(self.signed),
        }


def relation_phase(code, coefficients):
    """tau exponent of prod_i g_i^{a_i}; raises if the product is not a scalar."""
    factors = [power(g, int(a)) for g, a in zip(code.generators, coefficients) if int(a) % code.d]
    total = product(factors, code.n, code.d)
    if not total.is_identity():
        raise ConstructionError("Relation vector does not multiply to a scalar")
    return total.phase


def _cyclic_count(orders):
    """Invariant-factor count of a group given as a sum of prime-power cyclic groups."""
    parts = {}
    for order in orders:
        for p, _ in _factor_modulus(order):
            parts.setdefault(p, []).append(order)
    return len(invariant_chain(parts))


def span_rank(rows, d):
    """Invariant-factor count of the row span of an integer matrix over Z_d."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return 0
    return max(local_smith_form(rows, p, k, with_u=False).rank for p, k in _factor_modulus(d))


def redundancy_relations(code):
    """
    Relations sum_i a_i g_i = 0 among the generators, with a phase audit.

    A relation whose product is -I (or another nontrivial scalar) is reported in
    ``signed`` rather than hidden.

    Returns:
        RedundancyReport
    """
    kernel = kernel_mod(code.symplectic.T, code.d)
    phases = tuple(relation_phase(code, a) for a in kernel.vectors)
    signed = tuple(i for i, phase in enumerate(phases) if phase)
    count = _cyclic_count(kernel.orders)

    local = 0
    if code.lattice is not None and code.family in ('xyz', 'chiral'):
        rows = []
        for volume in code.lattice.volumes:
            row = np.zeros(len(code.generators), dtype=np.int64)
            for f in volume.faces:
                row[code.source_index[('face', f)]] = 1
            rows.append(row)
        local = span_rank(np.array(rows).reshape(len(rows), len(code.generators)), code.d)
    if signed:
        logger.warning(f"{code.name}: {len(signed)} relations multiply to a nontrivial phase")
    logger.info(f"{code.name}: {count} redundancy relations ({local} local)")
    return RedundancyReport(count=count, local=local, relations=kernel.vectors,
                            orders=kernel.orders, phases=phases, signed=signed)


# ==================== Logical Structure ====================

@dataclass(frozen=True)
class LogicalOperator:
    operator: PauliOperator
    order: int

    def to_dict(self):
        return {'order': self.order, **self.operator.to_dict()}


@dataclass(frozen=True)
class LogicalStructure:
    """
    Logical group of a code: ``C(S)/S`` is isomorphic to ``group x group``.

    ``representatives`` generate C(S)/S; ``commutation`` holds their pairwise
    exponents. ``pairs`` holds conjugate (X-bar, Z-bar) operators when every
    class has the same prime order.
    """

    group: AbelianGroupStructure
    representatives: tuple
    commutation: np.ndarray
    pairs: tuple = ()

    @property
    def k(self):
        return self.group.rank

    @property
    def symplectic(self):
        if not self.representatives:
            return None
        return np.array([r.operator.symplectic() for r in self.representatives])

    def to_dict(self):
        return {
            'group': self.group.to_list(),
            'representatives': [r.to_dict() for r in self.representatives],
            'commutation': self.commutation.tolist(),
            'pairs': [[x.to_dict(), z.to_dict()] for x, z in self.pairs],
        }


def _centralizer_generators(check, p, k):
    """Generators of ker(check) over Z_{p^k} with their orders and coordinate map."""
    q = p ** k
    form = local_smith_form(check, p, k, with_u=False, with_inverse=True)
    n = check.shape[1]
    vectors, orders, scales, columns = [], [], [], []
    for t in range(n):
        v = form.valuations[t] if t < form.rank else k
        if v == 0:
            continue
        scale = p ** (k - v)
        vectors.append(form.V[:, t] * scale % q)
        orders.append(p ** v)
        scales.append(scale)
        columns.append(t)
    return form, np.array(vectors, dtype=np.int64).reshape(len(vectors), n), orders, scales, columns


def _symplectic_pairs(matrix, commutation, p, d):
    """
    Greedy symplectic pairing over F_p of logical generators of order p.

    Commutation exponents between order-p classes are multiples of d/p; divided
    through they give an alternating form over F_p.

    Returns:
        tuple of (X-bar, Z-bar) LogicalOperator pairs, empty if the form is degenerate
    """
    gram = np.mod(commutation // (d // p), p)
    g = gram.shape[0]
    remaining = [row for row in np.eye(g, dtype=np.int64)]
    pairs = []

    def form(a, b):
        return int(a @ gram @ b) % p

    def operator(coefficients):
        vector = np.mod(coefficients @ matrix, d)
        n = vector.shape[0] // 2
        return LogicalOperator(PauliOperator.weyl(d, vector[:n], vector[n:]), p)

    while remaining:
        a = remaining.pop(0)
        partner = next((j for j, b in enumerate(remaining) if form(a, b)), None)
        if partner is None:
            return ()
        b = remaining.pop(partner)
        b = np.mod(b * pow(form(a, b), -1, p), p)
        remaining = [np.mod(c - form(c, b) * a + form(c, a) * b, p) for c in remaining]
        pairs.append((operator(a), operator(b)))
    return tuple(pairs)


def logical_structure(code):
    """
    Logical group C(S)/S and operator representatives.

    For each prime power q = p^k dividing d, the centralizer is the kernel of the
    syndrome map ``[Gz | -Gx]`` over Z_q. Stabilizer rows are expressed in the
    centralizer generators and the quotient is read off a second Smith form.

    Returns:
        LogicalStructure

    Raises:
        ConstructionError: the quotient is not a square, i.e. the generators do not commute
    """
    d = code.d
    n = code.n
    check = np.asarray(code.check_matrix)
    stabilizers = np.asarray(code.symplectic)
    reps = []
    parts = {}
    for p, k in _factor_modulus(d):
        q = p ** k
        e = _crt_idempotent(d, q)
        form, gens, orders, scales, columns = _centralizer_generators(check, p, k)
        if not len(gens):
            continue
        y = np.mod(np.mod(stabilizers, q) @ form.Vinv.T, q) if len(stabilizers) else \
            np.zeros((0, 2 * n), dtype=np.int64)
        coords = np.zeros((y.shape[0], len(columns)), dtype=np.int64)
        for s, (t, scale) in enumerate(zip(columns, scales)):
            if np.any(y[:, t] % scale):
                raise ConstructionError(f"{code.name}: a generator fails its own syndrome check")
            coords[:, s] = y[:, t] // scale
        relations = np.vstack([coords, np.diag(orders)])
        quotient = local_smith_form(relations, p, k, with_u=False, with_inverse=True)
        powers = []
        g = len(columns)
        for t in range(g):
            v = quotient.valuations[t] if t < quotient.rank else k
            if v == 0:
                continue
            w = quotient.Vinv[t]
            local = np.mod(w @ gens, q)
            lifted = (local.astype(object) * e % d).astype(np.int64)
            operator = PauliOperator.weyl(d, lifted[:n], lifted[n:])
            reps.append(LogicalOperator(operator, p ** v))
            powers.append(p ** v)
        counts = {}
        for value in powers:
            counts[value] = counts.get(value, 0) + 1
        if any(c % 2 for c in counts.values()):
            raise ConstructionError(f"{code.name}: logical quotient {sorted(powers)} "
                                    f"is not symplectic")
        parts[p] = [value for value, c in sorted(counts.items()) for _ in range(c // 2)]

    group = AbelianGroupStructure(invariant_chain(parts))
    matrix = np.array([r.operator.symplectic() for r in reps],
                      dtype=np.int64).reshape(len(reps), 2 * n)
    commutation = commutation_matrix(matrix, d=d)
    pairs = ()
    orders = {r.order for r in reps}
    if len(orders) == 1:
        order = orders.pop()
        if _factor_modulus(order) == [(order, 1)]:
            pairs = _symplectic_pairs(matrix, commutation, order, d)
    logger.info(f"{code.name}: logical group {group.to_list()}")
    return LogicalStructure(group=group, representatives=tuple(reps), commutation=commutation,
                            pairs=pairs)


def is_stabilizer_element(code, operator, structure=None):
    """
    Membership in the stabilizer group, mod phase.

    An operator is a stabilizer iff it has zero syndrome and commutes with every
    logical representative.
    """
    if np.any(code.syndrome(operator)):
        return False
    structure = structure or logical_structure(code)
    return not logical_class(structure, operator).any()


def logical_class(structure, operator):
    """Commutation exponents of an operator against the logical representatives."""
    if not structure.representatives:
        return np.zeros(0, dtype=np.int64)
    reps = structure.symplectic
    n = operator.n
    return np.mod(operator.z @ reps[:, :n].T - operator.x @ reps[:, n:].T, operator.d)


# ==================== Distance ====================

@dataclass(frozen=True)
class DistanceResult:
    """Minimum logical weight; ``exact`` is False when the search stopped at the cap."""

    value: int
    exact: bool
    witness: PauliOperator = None

    def render(self):
        if self.value is None:
            return 'none'
        return str(self.value) if self.exact else f"≥{self.value}"

    def to_dict(self):
        data = {'value': self.value, 'exact': self.exact, 'text': self.render()}
        if self.witness is not None:
            data['witness'] = self.witness.to_dict()
        return data


def interaction_graph(code):
    """Sites are adjacent when some generator acts on both."""
    graph = nx.Graph()
    graph.add_nodes_from(range(code.n))
    for g in code.generators:
        support = [int(v) for v in g.support]
        for i, u in enumerate(support):
            for w in support[i + 1:]:
                graph.add_edge(u, w)
    return graph


def connected_supports(graph, size):
    """All connected site sets of the given size, as sorted tuples."""
    level = {frozenset([v]) for v in graph.nodes}
    for _ in range(size - 1):
        grown = set()
        for support in level:
            for v in support:
                for u in graph.neighbors(v):
                    if u not in support:
                        grown.add(support | {u})
        level = grown
    return sorted(tuple(sorted(s)) for s in level)


def code_distance(code, weight_cap=None, structure=None):
    """
    Brute-force minimum weight of a logical operator.

    A minimal logical has a support that is connected in the interaction graph:
    otherwise one of its pieces is already a logical. Only connected supports
    are searched.

    Args:
        code: StabilizerCode
        weight_cap: Largest weight searched (defaults to DISTANCE_WEIGHT_CAP)

    Returns:
        DistanceResult; value None when the code has no logical operators
    """
    cap = int(weight_cap if weight_cap is not None else get_setting('DISTANCE_WEIGHT_CAP'))
    structure = structure or logical_structure(code)
    if not structure.representatives:
        return DistanceResult(value=None, exact=True)
    d = code.d
    reps = structure.symplectic
    n = code.n
    gx, gz = np.asarray(code.gx), np.asarray(code.gz)
    rx, rz = reps[:, :n], reps[:, n:]
    graph = interaction_graph(code)
    nonzero = [(x, z) for x, z in cartesian(range(d), repeat=2) if x or z]
    for w in range(1, cap + 1):
        assignments = np.array(list(cartesian(nonzero, repeat=w)), dtype=np.int64)
        ax, az = assignments[:, :, 0], assignments[:, :, 1]
        for support in connected_supports(graph, w):
            cols = list(support)
            syndromes = np.mod(ax @ gz[:, cols].T - az @ gx[:, cols].T, d)
            candidates = np.flatnonzero(~syndromes.any(axis=1))
            if not candidates.size:
                continue
            classes = np.mod(ax[candidates] @ rx[:, cols].T - az[candidates] @ rz[:, cols].T, d)
            hits = candidates[classes.any(axis=1)]
            if hits.size:
                x = np.zeros(n, dtype=np.int64)
                z = np.zeros(n, dtype=np.int64)
                x[cols] = ax[hits[0]]
                z[cols] = az[hits[0]]
                witness = PauliOperator.weyl(d, x, z)
                logger.info(f"{code.name}: distance {w}")
                return DistanceResult(value=w, exact=True, witness=witness)
    logger.info(f"{code.name}: no logical up to weight {cap}")
    return DistanceResult(value=cap + 1, exact=False)
