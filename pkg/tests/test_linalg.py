from itertools import product as cartesian

import numpy as np
import pytest

from chiralcc.exceptions import ParameterError, StructureError
from chiralcc.linalg import (AbelianGroupStructure, ModularSystem, elementary_divisors,
                             group_structure, invariant_chain, kernel_mod, local_smith_form,
                             rank_rational, smith_normal_form, solve_mod)


def brute_kernel(matrix, d):
    matrix = np.asarray(matrix, dtype=np.int64)
    n = matrix.shape[1]
    return {x for x in cartesian(range(d), repeat=n)
            if not np.mod(matrix @ np.array(x, dtype=np.int64), d).any()}


def span(basis):
    elements = set()
    for coefficients in cartesian(*(range(order) for order in basis.orders)):
        total = np.zeros(basis.vectors.shape[1], dtype=np.int64)
        for c, vector in zip(coefficients, basis.vectors):
            total = total + c * vector
        elements.add(tuple(int(v) for v in np.mod(total, basis.d)))
    return elements


# ==================== Smith Normal Form ====================

def test_smith_normal_form_known_example():
    M = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    U, D, V = smith_normal_form(M)
    assert (U.dot(np.array(M, dtype=object)).dot(V) == D).all()
    assert [D[i, i] for i in range(3)] == [2, 6, 12]
    assert elementary_divisors(M) == [2, 6, 12]


def test_smith_normal_form_rectangular(rng):
    M = rng.integers(-5, 6, size=(4, 6))
    U, D, V = smith_normal_form(M)
    assert (U.dot(M.astype(object)).dot(V) == D).all()
    diagonal = [int(D[i, i]) for i in range(4) if D[i, i] != 0]
    for a, b in zip(diagonal, diagonal[1:]):
        assert b % a == 0
    off_diagonal = D.copy()
    for i in range(4):
        off_diagonal[i, i] = 0
    assert not off_diagonal.any()


def test_rank_rational_agrees_with_smith_form(rng):
    assert rank_rational([[1, 2], [2, 4]]) == 1
    for _ in range(10):
        M = rng.integers(-2, 3, size=(5, 4))
        assert rank_rational(M) == len(elementary_divisors(M))


def test_smith_form_rejects_vectors():
    with pytest.raises(StructureError):
        smith_normal_form([1, 2, 3])


# ==================== Modular Kernels ====================

@pytest.mark.parametrize('d', [2, 3, 4, 6, 8, 9, 12])
def test_kernel_matches_brute_force(d, rng):
    for _ in range(5):
        M = rng.integers(0, d, size=(2, 3))
        basis = kernel_mod(M, d)
        expected = brute_kernel(M, d)
        assert basis.size == len(expected)
        for vector in basis.vectors:
            assert not np.mod(M @ vector, d).any()
        assert span(basis) == expected


def test_kernel_orders_over_z4():
    basis = kernel_mod([[2, 0]], 4)
    assert sorted(basis.orders) == [2, 4]
    assert basis.size == 8


def test_local_smith_form_valuations():
    form = local_smith_form([[2, 0], [0, 4], [0, 0]], 2, 3, with_inverse=True)
    assert sorted(form.valuations) == [1, 2]
    assert form.rank == 2
    assert form.q == 8
    assert (np.mod(form.Vinv @ form.V, 8) == np.eye(2, dtype=np.int64)).all()
    diagonal = np.mod(form.U @ np.mod([[2, 0], [0, 4], [0, 0]], 8) @ form.V, 8)
    assert sorted(int(diagonal[t, t]) for t in range(2)) == [2, 4]


# ==================== Affine Solving ====================

@pytest.mark.parametrize('d', [3, 4, 6, 12])
def test_solve_recovers_image_points(d, rng):
    system = ModularSystem(rng.integers(0, d, size=(4, 5)), d)
    for _ in range(10):
        b = np.mod(system.matrix @ rng.integers(0, d, size=5), d)
        result = system.solve(b)
        assert result.feasible
        assert (np.mod(system.matrix @ result.x, d) == b).all()


def test_solve_reports_infeasibility():
    result = solve_mod([[2]], [1], 4)
    assert not result.feasible
    assert result.modulus == 4
    assert result.row == 0


def test_solve_over_composite_modulus_uses_each_prime():
    # 2 is not invertible mod 6 but 2x = 4 still has solutions x = 2, 5
    result = solve_mod([[2]], [4], 6)
    assert result.feasible
    assert (2 * int(result.x[0])) % 6 == 4
    assert result.kernel.size == 2
    assert not solve_mod([[2]], [3], 6).feasible


def test_solve_rejects_wrong_right_hand_side():
    with pytest.raises(StructureError):
        solve_mod([[1, 0], [0, 1]], [1], 5)


def test_modulus_must_be_at_least_two():
    with pytest.raises(ParameterError):
        kernel_mod([[1]], 1)


# ==================== Group Structure ====================

def test_group_structure_merges_primes():
    assert group_structure([[2, 0], [0, 3]], 6).to_list() == [6]


def test_group_structure_of_free_module():
    structure = group_structure(np.zeros((0, 3), dtype=np.int64), 4)
    assert structure.to_list() == [4, 4, 4]
    assert structure.order == 64
    assert structure.rank == 3


def test_invariant_chain():
    assert invariant_chain({2: [2, 4], 3: [3]}) == (2, 12)
    assert invariant_chain({}) == ()


def test_abelian_group_structure_requires_divisibility():
    with pytest.raises(StructureError):
        AbelianGroupStructure((2, 3))
