"""Chain complexes: homology oracles, mapping cones, filtrations, and the
prime-ideal comparison."""

from fractions import Fraction
from random import Random

import pytest

from conftest import (
    inclusion_matrices,
    random_complex_with_subcomplex,
    random_filtered_complex,
    restrict_complex,
)
from novikov_lab.complexes import (
    ChainMap,
    ComplexError,
    FreeChainComplex,
    PoincarePolynomial,
    divide_by_one_plus_t,
    filtration_polynomials,
    homology,
    identity_chain_map,
    mapping_cone,
    poincare_at_ideal,
    prime_comparison,
    quotient_complex,
    skeletal_filtration,
    verify_complex,
)
from novikov_lab.exact_linalg import EvaluationAt, PolyMatrix, ReductionIp
from novikov_lab.polynomials import MultiPoly


def circle():
    return FreeChainComplex.build([1, 1], {1: [[0]]})


def projective_plane():
    return FreeChainComplex.build([1, 1, 1], {1: [[0]], 2: [[2]]})


def q_point():
    return EvaluationAt(())


# -- verify_complex ---------------------------------------------------------


def test_verify_circle():
    assert verify_complex(circle())


def test_verify_rejects_nonzero_composite():
    C = FreeChainComplex.build([1, 1, 1], {1: [[1]], 2: [[1]]})
    assert not verify_complex(C)


def test_verify_shape_mismatch_reported_distinctly():
    # wrong shapes fail at construction, before any composite is formed
    bad = PolyMatrix.from_int_rows([[1, 0], [0, 1]])
    with pytest.raises(ComplexError):
        FreeChainComplex.build([1, 1, 2], {1: [[1]], 2: bad})


# -- homology ---------------------------------------------------------------


def test_circle_homology_over_z():
    assert homology(circle(), "Z") == [(1, []), (1, [])]


def test_projective_plane_homology():
    assert homology(projective_plane(), "Z") == [(1, []), (0, [2]), (0, [])]
    assert [b for b, _ in homology(projective_plane(), 2)] == [1, 1, 1]
    assert [b for b, _ in homology(projective_plane(), 3)] == [1, 0, 0]


def test_homology_rejects_non_complex():
    C = FreeChainComplex.build([1, 1, 1], {1: [[1]], 2: [[1]]})
    with pytest.raises(ComplexError):
        homology(C, "Z")


# -- mapping cones ----------------------------------------------------------


def test_cone_of_identity_is_acyclic():
    rng = Random(5)
    for _ in range(10):
        C, _, _ = random_filtered_complex(rng)
        cone = mapping_cone(identity_chain_map(C))
        assert all(b == 0 and not tor for b, tor in homology(cone, "Z"))


def test_cone_of_sign_flip_equivalence_is_acyclic():
    rng = Random(6)
    for _ in range(10):
        C, _, _ = random_filtered_complex(rng)
        f = identity_chain_map(C)
        flipped = [
            PolyMatrix.from_int_rows(
                [[-1 if i == j else 0 for j in range(r)] for i in range(r)]
            )
            if r
            else PolyMatrix(0, 0, 0)
            for r in C.ranks
        ]
        cone = mapping_cone(ChainMap(source=C, target=C, components=flipped))
        assert all(b == 0 and not tor for b, tor in homology(cone, "Z"))


def test_cone_of_zero_map_between_points():
    point = FreeChainComplex.build([1], {})
    zero = ChainMap(
        source=point, target=point, components=[PolyMatrix.from_int_rows([[0]])]
    )
    cone = mapping_cone(zero)
    assert [b for b, _ in homology(cone, "Z")] == [1, 1]


def test_cone_of_boundary_circle_in_disk():
    disk = FreeChainComplex.build([1, 1, 1], {1: [[0]], 2: [[1]]})
    boundary = circle()
    f = ChainMap(
        source=boundary,
        target=disk,
        components=[
            PolyMatrix.from_int_rows([[1]]),
            PolyMatrix.from_int_rows([[1]]),
        ],
    )
    cone = mapping_cone(f)
    assert [b for b, _ in homology(cone, "Z")] == [0, 0, 1]


def test_cone_rejects_non_chain_map():
    interval = FreeChainComplex.build([1, 1], {1: [[1]]})
    f = ChainMap(
        source=circle(),
        target=interval,
        components=[
            PolyMatrix.from_int_rows([[1]]),
            PolyMatrix.from_int_rows([[1]]),
        ],
    )
    with pytest.raises(ComplexError):
        mapping_cone(f)


def test_cone_vs_relative_homology_on_random_pairs():
    rng = Random(424242)
    checked = 0
    while checked < 50:
        C, sub_level, _ = random_complex_with_subcomplex(rng)
        sub = restrict_complex(C, sub_level)
        f = ChainMap(
            source=sub,
            target=C,
            components=[
                PolyMatrix.from_int_rows(m) if m and m[0] or m else PolyMatrix(
                    len(m), 0, 0
                )
                for m in inclusion_matrices(C, sub_level)
            ],
        )
        cone = mapping_cone(f)
        full_level = [tuple(range(r)) for r in C.ranks]
        rel = quotient_complex(C, sub_level, full_level)
        cone_h = homology(cone, "Z")
        rel_h = homology(rel, "Z")
        for q in range(len(rel_h)):
            assert cone_h[q] == rel_h[q]
        # degrees above the relative complex must be trivial in the cone
        for q in range(len(rel_h), len(cone_h)):
            assert cone_h[q] == (0, [])
        checked += 1


# -- filtrations ------------------------------------------------------------


def test_trivial_filtration_identity():
    # two levels only: the zero complex inside the full complex
    from novikov_lab.complexes import FiltrationSpec

    C = circle()
    trivial = FiltrationSpec(levels=[[(), ()], [(0,), (0,)]])
    report = filtration_polynomials(C, trivial, q_point())
    assert report.relative == [PoincarePolynomial([1, 1])]
    assert report.total == PoincarePolynomial([1, 1])
    assert not report.connecting
    assert report.identity_holds()


def test_skeletal_filtration_circle():
    C = circle()
    report = filtration_polynomials(C, skeletal_filtration(C), q_point())
    total_relative = PoincarePolynomial()
    for p in report.relative:
        total_relative = total_relative + p
    assert total_relative == PoincarePolynomial([1, 1])
    assert report.total == PoincarePolynomial([1, 1])
    assert all(not q for q in report.connecting)


def test_skeletal_filtration_projective_plane_over_q():
    C = projective_plane()
    report = filtration_polynomials(C, skeletal_filtration(C), q_point())
    total_relative = PoincarePolynomial()
    for p in report.relative:
        total_relative = total_relative + p
    assert total_relative == PoincarePolynomial([1, 1, 1])
    assert report.total == PoincarePolynomial([1])
    one_plus_t = PoincarePolynomial([1, 1])
    summed = PoincarePolynomial()
    for q in report.connecting:
        summed = summed + one_plus_t.scale_by(q)
    assert summed == PoincarePolynomial([0, 1, 1])


def test_filtration_identity_on_random_complexes():
    rng = Random(31337)
    for _ in range(100):
        C, filtration, _ = random_filtered_complex(rng)
        report = filtration_polynomials(C, filtration, q_point())
        assert report.identity_holds()
        # Lemma-level check per triple: (1+t) q == p(inner) - p(mid) + p(outer)
        levels = filtration.levels
        for idx, q in enumerate(report.connecting, start=1):
            inner = poincare_at_ideal(
                quotient_complex(C, levels[idx], levels[idx + 1]), q_point()
            )
            mid = poincare_at_ideal(
                quotient_complex(C, levels[0], levels[idx + 1]), q_point()
            )
            outer = poincare_at_ideal(
                quotient_complex(C, levels[0], levels[idx]), q_point()
            )
            lhs = PoincarePolynomial([1, 1]).scale_by(q)
            for j in range(4):
                assert lhs.coefficient(j) == inner.coefficient(j) - mid.coefficient(
                    j
                ) + outer.coefficient(j)


def test_euler_invariance_under_ideals():
    rng = Random(8)
    for _ in range(30):
        C, _, _ = random_filtered_complex(rng)
        chi = C.euler_characteristic()
        poly = poincare_at_ideal(C, q_point())
        assert poly(-1) == chi


# -- prime comparison -------------------------------------------------------


def t_poly():
    return MultiPoly.variable(1, 0)


def test_prime_comparison_single_t():
    C = FreeChainComplex.build(
        [1, 1],
        {1: PolyMatrix(1, 1, 1, [[t_poly()]])},
        num_vars=1,
    )
    report = prime_comparison(
        C, EvaluationAt((Fraction(2),)), ReductionIp(5)
    )
    assert report.poly_p == PoincarePolynomial()
    assert report.poly_q == PoincarePolynomial([1, 1])
    assert report.torsion[0] == 1


def test_prime_comparison_identity_boundary():
    C = FreeChainComplex.build(
        [1, 1],
        {1: PolyMatrix(1, 1, 1, [[MultiPoly.constant(1, 1)]])},
        num_vars=1,
    )
    report = prime_comparison(C, EvaluationAt((Fraction(2),)), ReductionIp(5))
    assert report.poly_p == PoincarePolynomial()
    assert report.poly_q == PoincarePolynomial()
    assert all(t == 0 for t in report.torsion)


def test_prime_comparison_zero_boundary():
    C = FreeChainComplex.build([1, 1], {}, num_vars=1)
    report = prime_comparison(C, EvaluationAt((Fraction(2),)), ReductionIp(5))
    assert report.poly_p == PoincarePolynomial([1, 1])
    assert report.poly_q == PoincarePolynomial([1, 1])
    assert not report.qpoly


def test_prime_comparison_random_t_matrices():
    # a valid pairing needs the point's numerators divisible by p and the
    # denominators coprime to p; then the rank drop is nonnegative
    rng = Random(616)
    for _ in range(100):
        ranks = [rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 2)]
        rows1 = []
        for i in range(ranks[0]):
            row = []
            for _ in range(ranks[1]):
                row.append(
                    MultiPoly(
                        1,
                        {
                            (0,): rng.randint(-2, 2),
                            (1,): rng.randint(-2, 2),
                            (2,): rng.randint(-1, 1),
                        },
                    )
                )
            rows1.append(row)
        d1 = PolyMatrix(ranks[0], ranks[1], 1, rows1)
        # keep d2 = 0 so any d1 gives a complex
        C = FreeChainComplex.build(ranks, {1: d1}, num_vars=1)
        p = rng.choice([2, 3, 5, 7])
        denom = rng.randint(1, 30)
        while denom % p == 0:
            denom = rng.randint(1, 30)
        a = Fraction(p * rng.randint(1, 6), denom)
        report = prime_comparison(C, EvaluationAt((a,)), ReductionIp(p))
        assert all(t >= 0 for t in report.torsion)
        lhs = report.poly_q
        rhs = report.poly_p + PoincarePolynomial([1, 1]).scale_by(report.qpoly)
        assert lhs == rhs


def test_inconsistent_connecting_ranks_reported():
    from novikov_lab.complexes import _connecting_ranks_from_betti

    # betti numbers that no exact triple sequence can produce
    with pytest.raises(ComplexError):
        _connecting_ranks_from_betti([0, 1], [0, 0], [0, 0])
    with pytest.raises(ComplexError):
        _connecting_ranks_from_betti([0, 0], [1, 0], [0, 0])


# -- polynomial division helper --------------------------------------------


def test_divide_by_one_plus_t():
    assert divide_by_one_plus_t([1, 1]) == [1]
    assert divide_by_one_plus_t([1, 2, 1]) == [1, 1]
    assert divide_by_one_plus_t([1, 0, 1]) is None
    assert divide_by_one_plus_t([]) == []
