"""
Exact integer and modular linear algebra.

Two layers live here:

* Integer Smith normal form with unimodular transforms, on object-dtype arrays so
  entries never overflow. Used for homology and as an oracle in tests.
* Linear algebra over Z_d for composite d. The modulus is split into prime powers
  with ``sympy.factorint``; over each Z_{p^k} a local Smith form is computed with
  int64 numpy arithmetic, and the pieces are recombined with CRT idempotents.
  Z_d is never treated as a field.

Usage:
    from chiralcc.linalg import kernel_mod, solve_mod

    basis = kernel_mod(M, 4)
    result = solve_mod(M, b, 6)
    if result.feasible:
        x = result.x
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import factorint

from .exceptions import ParameterError, StructureError

logger = logging.getLogger(__name__)

# float64 holds integers exactly below 2**53
_FLOAT_EXACT_LIMIT = 2 ** 52


# ==================== Integer Smith Normal Form ====================

def _bezout(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _gcd_matrix(a, b):
    """
    Unimodular 2x2 matrix E with E @ (a, b) = (gcd, 0).

    When a divides b the first row is (+-1, 0), so the pivot row is left alone.
    """
    if a != 0 and b % a == 0:
        sign = 1 if a > 0 else -1
        return np.array([[sign, 0], [-(b // a), 1]], dtype=object)
    g, s, t = _bezout(a, b)
    return np.array([[s, t], [-(b // g), a // g]], dtype=object)


def _as_object_matrix(matrix):
    A = np.array(matrix, dtype=object)
    if A.ndim != 2:
        raise StructureError(f"Expected a 2-D matrix, got {A.ndim} dimensions")
    return A


def smith_normal_form(matrix):
    """
    Smith normal form with transforms.

    Args:
        matrix: Integer matrix (m x n), any array-like

    Returns:
        tuple (U, D, V) of object-dtype arrays with U @ M @ V == D, U and V
        unimodular, D diagonal with non-negative entries d_1 | d_2 | ...
    """
    A = _as_object_matrix(matrix).copy()
    m, n = A.shape
    U = np.eye(m, dtype=int).astype(object)
    V = np.eye(n, dtype=int).astype(object)

    for t in range(min(m, n)):
        candidates = [(abs(A[i, j]), i, j) for i in range(t, m) for j in range(t, n)
                      if A[i, j] != 0]
        if not candidates:
            break
        _, pi, pj = min(candidates)
        A[[t, pi]] = A[[pi, t]]
        U[[t, pi]] = U[[pi, t]]
        A[:, [t, pj]] = A[:, [pj, t]]
        V[:, [t, pj]] = V[:, [pj, t]]

        while True:
            for i in range(t + 1, m):
                if A[i, t] != 0:
                    E = _gcd_matrix(A[t, t], A[i, t])
                    rows = [t, i]
                    A[rows] = E.dot(A[rows])
                    U[rows] = E.dot(U[rows])
            for j in range(t + 1, n):
                if A[t, j] != 0:
                    E = _gcd_matrix(A[t, t], A[t, j])
                    cols = [t, j]
                    A[:, cols] = A[:, cols].dot(E.T)
                    V[:, cols] = V[:, cols].dot(E.T)
            if any(A[i, t] != 0 for i in range(t + 1, m)):
                continue
            # Divisibility: pull any entry the pivot does not divide into row t
            offender = next((i for i in range(t + 1, m)
                             if any(A[i, j] % A[t, t] != 0 for j in range(t + 1, n))), None)
            if offender is None:
                break
            A[t] = A[t] + A[offender]
            U[t] = U[t] + U[offender]

        if A[t, t] < 0:
            A[t] = -A[t]
            U[t] = -U[t]

    return U, A, V


def elementary_divisors(matrix):
    """Nonzero diagonal entries of the Smith normal form, in divisibility order."""
    _, D, _ = smith_normal_form(matrix)
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def rank_rational(matrix):
    """
    Rank over Q by fraction-free (Bareiss) elimination.

    Independent of the Smith form code path, so it serves as a cross-check.
    """
    A = _as_object_matrix(matrix).copy()
    m, n = A.shape
    rank = 0
    previous = 1
    for col in range(n):
        if rank == m:
            break
        pivot = next((i for i in range(rank, m) if A[i, col] != 0), None)
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        for i in range(rank + 1, m):
            A[i, col + 1:] = [(A[rank, col] * A[i, j] - A[i, col] * A[rank, j]) // previous
                              for j in range(col + 1, n)]
            A[i, col] = 0
        previous = A[rank, col]
        rank += 1
    return rank


# ==================== Modular Arithmetic ====================

def _factor_modulus(d):
    d = int(d)
    if d < 2:
        raise ParameterError(f"Modulus must be at least 2, got {d}")
    return sorted((int(p), int(k)) for p, k in factorint(d).items())


def _matmul_mod(A, B, q):
    """(A @ B) mod q for non-negative entries below q, exact."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    inner = A.shape[-1]
    if inner * (q - 1) ** 2 < _FLOAT_EXACT_LIMIT:
        product = np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
        return np.mod(product, q)
    if inner * (q - 1) ** 2 < 2 ** 62:
        return np.mod(A @ B, q)
    return np.mod(A.astype(object) @ B.astype(object), q).astype(np.int64)


def _crt_idempotent(d, q):
    cofactor = d // q
    return cofactor * pow(cofactor % q, -1, q) % d


@dataclass(frozen=True)
class LocalSmithForm:
    """
    Smith form of a matrix over Z_q, q = p^k.

    ``U @ M @ V == diag(p^valuations)`` modulo q, with ``Vinv @ V == I`` when the
    inverse was requested. ``rank`` counts the pivots whose valuation is below k.
    """

    p: int
    k: int
    shape: tuple
    valuations: tuple
    U: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray = None

    @property
    def q(self):
        return self.p ** self.k

    @property
    def rank(self):
        return len(self.valuations)


def _pivot_position(A, t, p, k):
    column = A[t:, t]
    units = np.flatnonzero(column % p != 0)
    if units.size:
        return t + int(units[0]), t
    sub = A[t:, t:]
    for v in range(k):
        mask = (sub % p ** (v + 1)) != 0
        if mask.any():
            flat = int(np.argmax(mask))
            i, j = divmod(flat, sub.shape[1])
            return t + i, t + j
    return None


def local_smith_form(matrix, p, k, with_u=True, with_inverse=False):
    """
    Diagonalize a matrix over Z_{p^k} by unimodular row and column operations.

    Args:
        matrix: Integer matrix (m x n)
        p: Prime
        k: Exponent, the ring is Z_{p^k}
        with_u: Track the row transform
        with_inverse: Track the inverse of the column transform

    Returns:
        LocalSmithForm
    """
    q = p ** k
    A = np.mod(np.array(matrix, dtype=np.int64), q)
    if A.ndim != 2:
        raise StructureError(f"Expected a 2-D matrix, got {A.ndim} dimensions")
    m, n = A.shape
    U = np.eye(m, dtype=np.int64) if with_u else None
    V = np.eye(n, dtype=np.int64)
    Vinv = np.eye(n, dtype=np.int64) if with_inverse else None
    valuations = []

    for t in range(min(m, n)):
        pivot = _pivot_position(A, t, p, k)
        if pivot is None:
            break
        i, j = pivot
        if i != t:
            A[[t, i]] = A[[i, t]]
            if with_u:
                U[[t, i]] = U[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
            if with_inverse:
                Vinv[[t, j]] = Vinv[[j, t]]

        entry = int(A[t, t])
        v = 0
        while entry % p == 0:
            entry //= p
            v += 1
        pv = p ** v
        scale = pow(entry % q, -1, q)
        A[t] = A[t] * scale % q
        if with_u:
            U[t] = U[t] * scale % q

        below = A[t + 1:, t] // pv
        if below.any():
            A[t + 1:] = np.mod(A[t + 1:] - np.outer(below, A[t]), q)
            if with_u:
                U[t + 1:] = np.mod(U[t + 1:] - np.outer(below, U[t]), q)

        right = A[t, t + 1:] // pv
        if right.any():
            A[t, t + 1:] = 0
            V[:, t + 1:] = np.mod(V[:, t + 1:] - np.outer(V[:, t], right), q)
            if with_inverse:
                Vinv[t] = np.mod(Vinv[t] + _matmul_mod(right, Vinv[t + 1:], q), q)
        valuations.append(v)

    return LocalSmithForm(p=p, k=k, shape=(m, n), valuations=tuple(valuations),
                          U=U, V=V, Vinv=Vinv)


# ==================== Kernels and Affine Solving ====================

@dataclass(frozen=True)
class KernelBasis:
    """
    Generating set of a kernel over Z_d.

    ``vectors[i]`` has additive order ``orders[i]``; the kernel is the direct sum
    of the cyclic groups they generate.
    """

    d: int
    vectors: np.ndarray
    orders: tuple

    def __len__(self):
        return len(self.orders)

    @property
    def size(self):
        total = 1
        for order in self.orders:
            total *= order
        return total


@dataclass(frozen=True)
class Solution:
    """A particular solution of M x = b (mod d) with the kernel of M."""

    x: np.ndarray
    kernel: KernelBasis
    feasible: bool = field(default=True, init=False)


@dataclass(frozen=True)
class Infeasible:
    """Certificate that M x = b has no solution: transformed row ``row`` fails mod ``modulus``."""

    modulus: int
    row: int
    feasible: bool = field(default=False, init=False)


class ModularSystem:
    """
    Reusable factorization of an integer matrix over Z_d.

    Factor once, then solve for many right-hand sides. Used by the decoder and
    by ground-state preparation, where the same local system is solved per trial.
    """

    def __init__(self, matrix, d):
        self.d = int(d)
        self.matrix = np.mod(np.array(matrix, dtype=np.int64), self.d)
        if self.matrix.ndim != 2:
            raise StructureError(f"Expected a 2-D matrix, got {self.matrix.ndim} dimensions")
        self.primes = _factor_modulus(self.d)
        self.forms = [local_smith_form(self.matrix, p, k) for p, k in self.primes]

    @property
    def shape(self):
        return self.matrix.shape

    @cached_property
    def _idempotents(self):
        return [_crt_idempotent(self.d, p ** k) for p, k in self.primes]

    def kernel(self):
        """
        Generators of {x : M x = 0 (mod d)}.

        Returns:
            KernelBasis
        """
        return self._kernel

    @cached_property
    def _kernel(self):
        n = self.matrix.shape[1]
        vectors = []
        orders = []
        for form, e in zip(self.forms, self._idempotents):
            q = form.q
            for t in range(n):
                v = form.valuations[t] if t < form.rank else form.k
                if v == 0:
                    continue
                local = form.V[:, t] * form.p ** (form.k - v) % q
                vectors.append(local.astype(object) * e % self.d)
                orders.append(form.p ** v)
        array = np.array(vectors, dtype=np.int64).reshape(len(vectors), n)
        return KernelBasis(d=self.d, vectors=array, orders=tuple(orders))

    def solve(self, b):
        """
        One solution of M x = b (mod d).

        Args:
            b: Right-hand side, length m

        Returns:
            Solution, or Infeasible naming the failing prime power and row
        """
        b = np.mod(np.asarray(b, dtype=np.int64), self.d)
        m, n = self.matrix.shape
        if b.shape != (m,):
            raise StructureError(f"Right-hand side has shape {b.shape}, expected ({m},)")
        x = np.zeros(n, dtype=object)
        for form, e in zip(self.forms, self._idempotents):
            q = form.q
            c = _matmul_mod(form.U, np.mod(b, q), q)
            y = np.zeros(n, dtype=np.int64)
            for t, v in enumerate(form.valuations):
                pv = form.p ** v
                if c[t] % pv:
                    return Infeasible(modulus=q, row=t)
                y[t] = c[t] // pv
            tail = np.flatnonzero(c[form.rank:])
            if tail.size:
                return Infeasible(modulus=q, row=form.rank + int(tail[0]))
            local = _matmul_mod(form.V, y, q)
            x = (x + local.astype(object) * e) % self.d
        return Solution(x=x.astype(np.int64), kernel=self.kernel())


def kernel_mod(matrix, d):
    """
    Generators of the kernel of a matrix over Z_d.

    Args:
        matrix: Integer matrix (m x n)
        d: Modulus >= 2

    Returns:
        KernelBasis
    """
    return ModularSystem(matrix, d).kernel()


def solve_mod(matrix, b, d):
    """
    Solve M x = b (mod d).

    Args:
        matrix: Integer matrix (m x n)
        b: Right-hand side
        d: Modulus >= 2

    Returns:
        Solution or Infeasible
    """
    return ModularSystem(matrix, d).solve(b)


# ==================== Finite Abelian Groups ====================

@dataclass(frozen=True)
class AbelianGroupStructure:
    """Invariant factors d_1 | d_2 | ... (each > 1) of a finite abelian group."""

    divisors: tuple

    def __post_init__(self):
        for a, b in zip(self.divisors, self.divisors[1:]):
            if b % a:
                raise StructureError(f"Divisors {self.divisors} do not form a chain")

    @property
    def order(self):
        total = 1
        for divisor in self.divisors:
            total *= divisor
        return total

    @property
    def rank(self):
        return len(self.divisors)

    def to_list(self):
        return list(self.divisors)


def invariant_chain(primary_parts):
    """
    Merge prime-power cyclic factors into invariant factors.

    Args:
        primary_parts: Mapping prime -> list of prime powers (each > 1)

    Returns:
        tuple of invariant factors in increasing divisibility order
    """
    columns = [sorted(powers, reverse=True) for powers in primary_parts.values() if powers]
    if not columns:
        return ()
    length = max(len(column) for column in columns)
    chain = []
    for i in range(length):
        value = 1
        for column in columns:
            if i < len(column):
                value *= column[i]
        chain.append(value)
    return tuple(reversed(chain))


def cokernel_primary_parts(relations, d):
    """
    Prime-power factors of Z_d^g / rowspan(relations).

    Returns:
        dict prime -> list of prime powers
    """
    R = np.array(relations, dtype=np.int64)
    if R.ndim != 2:
        raise StructureError(f"Expected a 2-D relation matrix, got {R.ndim} dimensions")
    g = R.shape[1]
    parts = {}
    for p, k in _factor_modulus(d):
        form = local_smith_form(R, p, k, with_u=False)
        powers = [p ** v for v in form.valuations if v > 0]
        powers.extend([p ** k] * (g - form.rank))
        parts[p] = powers
    return parts


def group_structure(relations, d):
    """
    Structure of the Z_d-module presented by relation rows.

    Args:
        relations: Integer matrix (r x g); rows are relations among g generators
        d: Modulus >= 2

    Returns:
        AbelianGroupStructure
    """
    return AbelianGroupStructure(invariant_chain(cokernel_primary_parts(relations, d)))
