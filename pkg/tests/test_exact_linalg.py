"""Smith normal form and exact rank routines against independent oracles."""

import math
from fractions import Fraction
from itertools import combinations
from random import Random

import pytest

from novikov_lab.exact_linalg import (
    EvaluationAt,
    GenericPoint,
    PolyMatrix,
    ReductionIp,
    det_sign,
    field_rank,
    kernel_basis,
    mat_mul,
    rank_at_ideal,
    smith_normal_form,
    snf_rank,
)
from novikov_lab.polynomials import MultiPoly


def minor_gcd_diagonal(A):
    """Smith diagonal via determinantal divisors: d_k = gcd(k-minors)/gcd((k-1)-minors).

    Exhaustive over all k x k minors, so only usable for tiny matrices; it is
    fully independent of the elimination code.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    size = min(m, n)

    def gcd_of_minors(k):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                sub = [[A[i][j] for j in cols] for i in rows]
                g = math.gcd(g, int(det_sign(sub)))
        return g

    diag = []
    prev = 1
    for k in range(1, size + 1):
        g = gcd_of_minors(k)
        if g == 0:
            diag.extend([0] * (size - len(diag)))
            break
        diag.append(g // prev)
        prev = g
    return diag


def apply_transforms(res, A):
    return mat_mul(mat_mul(res.left, A), res.right)


def test_snf_zero_matrix():
    assert smith_normal_form([[0]]).diagonal == [0]


def test_snf_identity():
    assert smith_normal_form([[1, 0], [0, 1]]).diagonal == [1, 1]


def test_snf_divisor_chain_example():
    A = [[2, 0], [0, 3]]
    res = smith_normal_form(A)
    assert res.diagonal == [1, 6]
    assert res.diagonal == minor_gcd_diagonal(A)


def test_snf_empty_matrix():
    res = smith_normal_form([])
    assert res.diagonal == []


def test_snf_random_against_minor_oracle_and_transforms():
    rng = Random(20240311)
    for _ in range(200):
        m = rng.randint(1, 6)
        n = rng.randint(1, 6)
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        res = smith_normal_form(A)
        # transform soundness: left*A*right is the diagonal embedding
        D = apply_transforms(res, A)
        for i in range(m):
            for j in range(n):
                expected = res.diagonal[i] if i == j and i < len(res.diagonal) else 0
                assert D[i][j] == expected
        assert abs(det_sign(res.left)) == 1
        assert abs(det_sign(res.right)) == 1
        # divisor chain, with zeros trailing
        for a, b in zip(res.diagonal, res.diagonal[1:]):
            if a == 0:
                assert b == 0
            else:
                assert b % a == 0
        assert res.diagonal == minor_gcd_diagonal(A)
        # rank agreement with field elimination over Q
        rank = sum(1 for d in res.diagonal if d)
        assert rank == field_rank(A)


def test_field_rank_identity_and_mod_p():
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert field_rank(eye) == 3
    assert field_rank([[2]], p=2) == 0
    assert field_rank([[2]], p=3) == 1


def test_field_rank_matches_snf_rank():
    rng = Random(7)
    for _ in range(50):
        A = [[rng.randint(-9, 9) for _ in range(6)] for _ in range(4)]
        assert field_rank(A) == snf_rank(A)


def test_kernel_basis_spans_null_space():
    rng = Random(11)
    for _ in range(30):
        m = rng.randint(1, 4)
        n = rng.randint(1, 5)
        A = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]
        basis = kernel_basis(A)
        assert len(basis) == n - field_rank(A)
        for vec in basis:
            for row in A:
                assert sum(a * x for a, x in zip(row, vec)) == 0


def poly_matrix(rows, s=1):
    return PolyMatrix(
        rows=len(rows), cols=len(rows[0]) if rows else 0, num_vars=s, entries=rows
    )


def t_minus(c, s=1):
    return MultiPoly(s, {(1,): 1, (0,): -c})


def test_rank_at_evaluation_point():
    M = poly_matrix([[t_minus(1)]])
    assert rank_at_ideal(M, EvaluationAt((Fraction(2),))) == 1
    assert rank_at_ideal(M, EvaluationAt((Fraction(1),))) == 0


def test_rank_at_ideal_ip_kills_variables():
    M = poly_matrix([[MultiPoly.variable(1, 0)]])
    assert rank_at_ideal(M, ReductionIp(5)) == 0


def test_rank_at_ideal_dimension_mismatch():
    M = poly_matrix([[t_minus(1)]])
    with pytest.raises(ValueError):
        rank_at_ideal(M, EvaluationAt((Fraction(2), Fraction(3))))


def test_rank_at_generic_point_refused():
    M = poly_matrix([[t_minus(1)]])
    with pytest.raises(ValueError):
        rank_at_ideal(M, GenericPoint())


def test_rank_semicontinuity_generic_maximum():
    rng = Random(13)
    for _ in range(20):
        rows = []
        for _ in range(3):
            row = []
            for _ in range(3):
                row.append(
                    MultiPoly(
                        1,
                        {
                            (0,): rng.randint(-3, 3),
                            (1,): rng.randint(-3, 3),
                        },
                    )
                )
            rows.append(row)
        M = poly_matrix(rows)
        samples = [
            rank_at_ideal(
                M, EvaluationAt((Fraction(rng.randint(1, 50), rng.randint(1, 50)),))
            )
            for _ in range(20)
        ]
        generic = max(samples)
        a = Fraction(rng.randint(1, 50), rng.randint(1, 50))
        assert rank_at_ideal(M, EvaluationAt((a,))) <= generic
