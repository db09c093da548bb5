"""
Phase-tracked generalized Pauli algebra on n qudits of dimension d.

An operator is stored in canonical form ``tau^phase * prod_v X_v^{x_v} Z_v^{z_v}``
with X written before Z on every site, ``tau = exp(i*pi/d)`` and
``omega = tau^2 = exp(2*pi*i/d)``. The single-site relation is ``Z X = omega X Z``.

Usage:
    from chiralcc.pauli import PauliOperator, multiply, commutation_exponent

    a = PauliOperator.single_site(1, 3, 0, z=1)
    b = PauliOperator.single_site(1, 3, 0, x=1)
    multiply(a, b).phase  # -> 2, i.e. omega
"""

import numpy as np

from .exceptions import ParameterError, StructureError


class PauliOperator:
    """Immutable generalized Pauli operator in X-before-Z canonical form."""

    __slots__ = ('d', 'x', 'z', 'phase')

    def __init__(self, d, x, z, phase=0):
        d = int(d)
        if d < 2:
            raise ParameterError(f"Qudit dimension must be at least 2, got {d}")
        x = np.mod(np.asarray(x, dtype=np.int64), d)
        z = np.mod(np.asarray(z, dtype=np.int64), d)
        if x.ndim != 1 or x.shape != z.shape:
            raise StructureError(f"X and Z exponent vectors must be 1-D of equal length, "
                                 f"got shapes {x.shape} and {z.shape}")
        x.setflags(write=False)
        z.setflags(write=False)
        self.d = d
        self.x = x
        self.z = z
        self.phase = int(phase) % (2 * d)

    # ==================== Constructors ====================

    @classmethod
    def identity(cls, n, d):
        return cls(d, np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))

    @classmethod
    def single_site(cls, n, d, site, x=0, z=0, phase=0):
        xs = np.zeros(n, dtype=np.int64)
        zs = np.zeros(n, dtype=np.int64)
        xs[site] = x
        zs[site] = z
        return cls(d, xs, zs, phase)

    @classmethod
    def from_sparse(cls, n, d, sites, phase=0):
        """
        Build an operator from a ``{site: (x, z)}`` mapping.

        Args:
            n: Number of sites
            d: Qudit dimension
            sites: Mapping of site index to exponent pair
            phase: tau exponent

        Returns:
            PauliOperator
        """
        xs = np.zeros(n, dtype=np.int64)
        zs = np.zeros(n, dtype=np.int64)
        for site, (x, z) in sites.items():
            xs[int(site)] = x
            zs[int(site)] = z
        return cls(d, xs, zs, phase)

    @classmethod
    def from_symplectic(cls, vector, d, phase=0):
        vector = np.asarray(vector, dtype=np.int64)
        n = vector.shape[0] // 2
        return cls(d, vector[:n], vector[n:], phase)

    @classmethod
    def weyl(cls, d, x, z):
        """Operator whose per-site factors are normalized to have order d."""
        x = np.mod(np.asarray(x, dtype=np.int64), d)
        z = np.mod(np.asarray(z, dtype=np.int64), d)
        return cls(d, x, z, int(weyl_phase(x, z, d).sum()))

    # ==================== Properties ====================

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def support(self):
        return np.flatnonzero((self.x != 0) | (self.z != 0))

    @property
    def weight(self):
        return int(np.count_nonzero((self.x != 0) | (self.z != 0)))

    def is_identity(self):
        return not self.x.any() and not self.z.any()

    def symplectic(self):
        return np.concatenate([self.x, self.z])

    def sparse(self):
        return {int(v): (int(self.x[v]), int(self.z[v])) for v in self.support}

    # ==================== Operators ====================

    def __mul__(self, other):
        return multiply(self, other)

    def __pow__(self, k):
        return power(self, k)

    def __eq__(self, other):
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.d == other.d and self.phase == other.phase
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __hash__(self):
        return hash((self.d, self.phase, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self):
        return f"PauliOperator(d={self.d}, {render(self)})"

    def to_dict(self):
        return {
            'd': self.d,
            'n': self.n,
            'phase': self.phase,
            'sites': {str(v): list(xz) for v, xz in self.sparse().items()},
        }

    @classmethod
    def from_dict(cls, data):
        return cls.from_sparse(data['n'], data['d'], data['sites'], data.get('phase', 0))


# ==================== Algebra ====================

def _check_compatible(a, b):
    if a.d != b.d:
        raise StructureError(f"Qudit dimensions differ: {a.d} vs {b.d}")
    if a.n != b.n:
        raise StructureError(f"Site counts differ: {a.n} vs {b.n}")


def weyl_phase(x, z, d):
    """
    Per-site tau exponent making ``tau^k X^x Z^z`` an order-d element.

    For d = 2 this turns XZ into Y; for odd d it is the symmetric ordering phase.
    """
    factor = 1 if d % 2 == 0 else d + 1
    return np.mod(np.asarray(x, dtype=np.int64) * np.asarray(z, dtype=np.int64) * factor, 2 * d)


def multiply(a, b):
    """
    Canonical form of the product a*b.

    Moving Z^{z_a} past X^{x_b} on each site contributes omega^{z_a x_b}.

    Args:
        a: Left factor
        b: Right factor

    Returns:
        PauliOperator
    """
    _check_compatible(a, b)
    phase = a.phase + b.phase + 2 * int(np.dot(a.z, b.x))
    return PauliOperator(a.d, a.x + b.x, a.z + b.z, phase)


def commutation_exponent(a, b):
    """
    Exponent c with ``a*b = omega^c * b*a``.

    Args:
        a: First operator
        b: Second operator

    Returns:
        int in [0, d)
    """
    _check_compatible(a, b)
    return int(np.dot(a.z, b.x) - np.dot(a.x, b.z)) % a.d


def power(a, k):
    """
    Canonical form of a^k for any integer k (negative k gives inverses).

    (X^x Z^z)^k = omega^{x z k(k-1)/2} X^{kx} Z^{kz}, so the tau exponent grows by
    x z k(k-1); the whole expression is periodic in k with period 2d.
    """
    d = a.d
    k = int(k) % (2 * d)
    phase = a.phase * k + int(np.dot(a.x, a.z)) * k * (k - 1)
    return PauliOperator(d, a.x * k, a.z * k, phase)


def inverse(a):
    return power(a, -1)


def proportional_identity_phase(a):
    """
    Phase exponent of a if it is a multiple of the identity.

    Returns:
        int or None
    """
    if a.is_identity():
        return a.phase
    return None


def product(operators, n=None, d=None):
    """Left-to-right product of an iterable of operators."""
    result = None
    for op in operators:
        result = op if result is None else multiply(result, op)
    if result is None:
        if n is None or d is None:
            raise StructureError("Empty product needs explicit n and d")
        return PauliOperator.identity(n, d)
    return result


def group_commutator_phase(ops):
    """
    Phase of ``T_k^-1 ... T_1^-1 T_k ... T_1`` for ops = (T_1, ..., T_k).

    Returns:
        tau exponent, or None if the composite is not a scalar
    """
    forward = product(reversed(ops))
    backward = product(inverse(op) for op in reversed(ops))
    return proportional_identity_phase(multiply(backward, forward))


# ==================== Site Manipulation ====================

def restrict(a, sites):
    """
    Restriction of a to the given sites (other sites set to identity).

    The global phase of a truncated operator carries no meaning; the result gets
    the order-d normalized phase of its remaining factors.
    """
    mask = np.zeros(a.n, dtype=bool)
    mask[np.asarray(list(sites), dtype=np.int64)] = True
    return PauliOperator.weyl(a.d, np.where(mask, a.x, 0), np.where(mask, a.z, 0))


def embed(a, n_total, sites):
    """Place a's site i onto ``sites[i]`` of an n_total-site register."""
    sites = np.asarray(sites, dtype=np.int64)
    if sites.shape[0] != a.n:
        raise StructureError(f"Embedding needs {a.n} target sites, got {sites.shape[0]}")
    x = np.zeros(n_total, dtype=np.int64)
    z = np.zeros(n_total, dtype=np.int64)
    x[sites] = a.x
    z[sites] = a.z
    return PauliOperator(a.d, x, z, a.phase)


def tensor(operators):
    """Tensor product of operators on disjoint registers, in order."""
    operators = list(operators)
    if not operators:
        raise StructureError("Tensor product of nothing")
    d = operators[0].d
    if any(op.d != d for op in operators):
        raise StructureError("Tensor factors have different qudit dimensions")
    return PauliOperator(d, np.concatenate([op.x for op in operators]),
                         np.concatenate([op.z for op in operators]),
                         sum(op.phase for op in operators))


def stack_symplectic(operators, n=None):
    """Rows ``[x | z]`` for a list of same-size operators (n needed when the list is empty)."""
    operators = list(operators)
    if n is None:
        if not operators:
            raise StructureError("Empty operator list needs an explicit site count")
        n = operators[0].n
    matrix = np.zeros((len(operators), 2 * n), dtype=np.int64)
    for i, op in enumerate(operators):
        matrix[i] = op.symplectic()
    return matrix


# ==================== Rendering ====================

def _site_token(x, z):
    if x == 0 and z == 0:
        return 'I'
    token = ''
    if x:
        token += 'X' if x == 1 else f'X^{x}'
    if z:
        token += 'Z' if z == 1 else f'Z^{z}'
    return token


def render(a):
    """
    Text form with per-site tokens, e.g. ``"τ^3 X I Z^2 XZ^3"``.
    """
    tokens = ' '.join(_site_token(int(x), int(z)) for x, z in zip(a.x, a.z))
    if a.phase:
        return f"τ^{a.phase} {tokens}".strip()
    return tokens
