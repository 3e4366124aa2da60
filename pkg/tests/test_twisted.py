"""Twisted complexes: construction, evaluation, Novikov and torsion numbers."""

from fractions import Fraction
from random import Random

import pytest

from novikov_lab.complexes import homology, verify_complex
from novikov_lab.exact_linalg import field_rank
from novikov_lab.polynomials import MultiPoly
from novikov_lab.twisted import (
    LocalSystem,
    TwistError,
    WeightedCWComplex,
    build_twisted,
    circle_complex,
    evaluated_homology,
    face_terms_from_word,
    novikov_numbers,
    projective_plane_complex,
    reduced_homology_mod_p,
    sphere_complex,
    torsion_numbers,
    torus_complex,
)


def t_minus_one():
    return MultiPoly(1, {(1,): 1, (0,): -1})


# -- construction -----------------------------------------------------------


def test_circle_boundary_matrix_is_t_minus_one():
    D = build_twisted(circle_complex(twisted=True))
    assert D.base.boundary(1)[0, 0] == t_minus_one()
    assert verify_complex(D.base)


def test_torus_boundaries_from_commutator_word():
    D = build_twisted(torus_complex(twisted=True))
    d1 = D.base.boundary(1)
    assert d1[0, 0] == t_minus_one()
    assert d1[0, 1].is_zero()
    d2 = D.base.boundary(2)
    # the e1 terms of the face cancel; the e2 entry survives twisted
    assert d2[0, 0].is_zero()
    assert d2[1, 0] == t_minus_one()
    assert verify_complex(D.base)


def test_zero_weights_reproduce_cellular_complex():
    D = build_twisted(torus_complex(twisted=False))
    for j in (1, 2):
        mat = D.base.boundary(j)
        for i in range(mat.rows):
            for k in range(mat.cols):
                assert mat[i, k].is_constant()
    assert [b for b, _ in homology(D.base, "Z")] == [1, 2, 1]
    assert all(not tor for _, tor in homology(D.base, "Z"))


def test_inconsistent_weights_rejected():
    # torus face expanded with naive equal weights: d1 * d2 != 0
    X = WeightedCWComplex(
        name="bad",
        s=1,
        cells=[["v"], ["e1", "e2"], ["f"]],
        boundary_terms={
            "e1": [("v", 1, (1,)), ("v", -1, (0,))],
            "e2": [("v", 1, (0,)), ("v", -1, (0,))],
            "f": [("e2", 1, (1,)), ("e2", -1, (1,))],
        },
    )
    D = build_twisted(X)  # cancels to zero, still a complex
    assert D.base.boundary(2)[1, 0].is_zero()
    Y = WeightedCWComplex(
        name="worse",
        s=1,
        cells=[["v"], ["e1"], ["f"]],
        boundary_terms={
            "e1": [("v", 1, (1,)), ("v", -1, (0,))],
            "f": [("e1", 1, (0,))],
        },
    )
    with pytest.raises(TwistError):
        build_twisted(Y)


def test_normalization_clears_negative_weights():
    X = WeightedCWComplex(
        name="laurent_circle",
        s=1,
        cells=[["v"], ["e"]],
        boundary_terms={"e": [("v", 1, (-1,)), ("v", -1, (-2,))]},
    )
    D = build_twisted(X)
    mat = D.base.boundary(1)
    assert mat.is_polynomial()
    assert any(m != (0,) for m in D.normalization.values())
    # rescaling is invisible at nonzero evaluation points
    for a in (Fraction(2), Fraction(1, 3), Fraction(5, 7)):
        norm_rank = field_rank(mat.evaluate((a,)))
        raw_rank = field_rank(D.raw_boundaries[0].evaluate((a,)))
        assert norm_rank == raw_rank


# -- evaluation -------------------------------------------------------------


def test_circle_evaluated_homology():
    D = build_twisted(circle_complex(twisted=True))
    assert evaluated_homology(D, (Fraction(2),)) == [0, 0]
    assert evaluated_homology(D, (Fraction(1),)) == [1, 1]


def test_torus_evaluated_homology():
    D = build_twisted(torus_complex(twisted=True))
    assert evaluated_homology(D, (Fraction(3),)) == [0, 0, 0]
    assert evaluated_homology(D, (Fraction(1),)) == [1, 2, 1]


def test_evaluation_rejects_zero_coordinates():
    D = build_twisted(circle_complex(twisted=True))
    with pytest.raises(TwistError):
        evaluated_homology(D, (Fraction(0),))


def test_circle_reduced_mod_p():
    D = build_twisted(circle_complex(twisted=True))
    assert reduced_homology_mod_p(D, 5) == [0, 0]


def test_pure_t_differential_mod_p():
    X = WeightedCWComplex(
        name="t_only",
        s=1,
        cells=[["v"], ["e"]],
        boundary_terms={"e": [("v", 1, (1,))]},
    )
    D = build_twisted(X)
    assert reduced_homology_mod_p(D, 3) == [1, 1]


def test_zero_weights_mod_p_equals_ordinary():
    D = build_twisted(torus_complex(twisted=False))
    assert reduced_homology_mod_p(D, 2) == [
        b for b, _ in homology(D.base, 2)
    ]


# -- Novikov numbers --------------------------------------------------------


def test_circle_novikov_numbers_with_jump():
    D = build_twisted(circle_complex(twisted=True))
    report = novikov_numbers(D, trials=20, seed=7)
    assert report.b == [0, 0]
    ones = (Fraction(1),)
    assert any(a == ones and dim == 1 for a, j, dim in report.jumps)
    jump_dims = sorted(
        (j, dim) for a, j, dim in report.jumps if a == ones
    )
    assert jump_dims == [(0, 1), (1, 1)]


def test_torus_novikov_numbers_vanish():
    D = build_twisted(torus_complex(twisted=True))
    report = novikov_numbers(D, trials=20, seed=3)
    assert report.b == [0, 0, 0]


def test_trivial_class_gives_betti_numbers():
    D = build_twisted(torus_complex(twisted=False))
    report = novikov_numbers(D, trials=5, seed=1)
    assert report.b == [1, 2, 1]
    assert not report.jumps


def test_jump_direction_never_below_minimum():
    rng = Random(12)
    D = build_twisted(torus_complex(twisted=True))
    report = novikov_numbers(D, trials=30, seed=99)
    for a in report.points:
        dims = evaluated_homology(D, a)
        assert all(d >= b for d, b in zip(dims, report.b))


def test_euler_constancy_across_points():
    D = build_twisted(torus_complex(twisted=True))
    rng = Random(4)
    expected = sum((-1) ** j * r for j, r in enumerate(D.base.ranks))
    for _ in range(10):
        a = (Fraction(rng.randint(1, 40), rng.randint(1, 40)),)
        dims = evaluated_homology(D, a)
        assert sum((-1) ** j * d for j, d in enumerate(dims)) == expected


def test_novikov_report_deterministic():
    D = build_twisted(circle_complex(twisted=True))
    r1 = novikov_numbers(D, trials=10, seed=5)
    r2 = novikov_numbers(D, trials=10, seed=5)
    assert r1.points == r2.points and r1.b == r2.b and r1.jumps == r2.jumps


# -- torsion numbers --------------------------------------------------------


def test_torsion_number_of_pure_t():
    X = WeightedCWComplex(
        name="t_only",
        s=1,
        cells=[["v"], ["e"]],
        boundary_terms={"e": [("v", 1, (1,))]},
    )
    D = build_twisted(X)
    q = torsion_numbers(D, (Fraction(2),), 5)
    assert q[0] == 1


def test_torsion_numbers_zero_differential():
    X = WeightedCWComplex(
        name="free",
        s=1,
        cells=[["v"], ["e"]],
        boundary_terms={"e": []},
    )
    D = build_twisted(X)
    assert torsion_numbers(D, (Fraction(2),), 5) == [0, 0]


def test_circle_torsion_numbers_vanish():
    D = build_twisted(circle_complex(twisted=True))
    assert torsion_numbers(D, (Fraction(2),), 7) == [0, 0]


def test_invalid_pairing_reported():
    # rank at a=1 drops below the mod-p rank, exposing the bad pairing
    X = WeightedCWComplex(
        name="bad_pair",
        s=1,
        cells=[["v"], ["e"]],
        boundary_terms={"e": [("v", 1, (1,)), ("v", -1, (0,))]},
    )
    D = build_twisted(X)
    with pytest.raises(TwistError):
        torsion_numbers(D, (Fraction(1),), 5)


# -- words and local systems -------------------------------------------------


def test_face_terms_prefix_rule():
    word = [("e1", 1), ("e2", 1), ("e1", -1), ("e2", -1)]
    terms = face_terms_from_word(word, {"e1": (1,), "e2": (0,)})
    assert [(t, c, w) for t, c, w, _ in terms] == [
        ("e1", 1, (0,)),
        ("e2", 1, (1,)),
        ("e1", -1, (0,)),
        ("e2", -1, (0,)),
    ]


def test_face_terms_reject_unbalanced_word():
    with pytest.raises(TwistError):
        face_terms_from_word([("e1", 1)], {"e1": (1,)})


def test_local_system_swap_on_circle():
    X = circle_complex(twisted=True)
    E = LocalSystem(k=2, monodromy={"e": [[0, 1], [1, 0]]})
    D = build_twisted(X, E)
    assert D.base.ranks == [2, 2]
    # boundary is t*M - I; determinant t^2 - 1 vanishes only at t = +-1
    assert evaluated_homology(D, (Fraction(2),)) == [0, 0]
    assert evaluated_homology(D, (Fraction(1),)) == [1, 1]
    report = novikov_numbers(D, trials=10, seed=2)
    assert report.b == [0, 0]


def test_local_system_word_compatibility_checked():
    X = torus_complex(twisted=True)
    E = LocalSystem(
        k=1,
        monodromy={"e1": [[1]], "e2": [[-1]]},
        attaching_words={"f": [("e1", 1), ("e2", 1), ("e1", -1), ("e2", -1)]},
    )
    D = build_twisted(X, E)  # abelian commutator closes for any +-1 weights
    assert verify_complex(D.base)
    bad = LocalSystem(
        k=1,
        monodromy={"e1": [[1]], "e2": [[-1]]},
        attaching_words={"f": [("e1", 1), ("e1", -1), ("e2", 1)]},
    )
    with pytest.raises(TwistError):
        build_twisted(X, bad)


def test_local_system_requires_unimodular():
    X = circle_complex(twisted=True)
    E = LocalSystem(k=1, monodromy={"e": [[2]]})
    with pytest.raises(TwistError):
        build_twisted(X, E)


# -- builtin sanity ----------------------------------------------------------


def test_sphere_and_projective_plane():
    s2 = build_twisted(sphere_complex())
    assert [b for b, _ in homology(s2.base, "Z")] == [1, 0, 1]
    rp2 = build_twisted(projective_plane_complex())
    assert homology(rp2.base, "Z") == [(1, []), (0, [2]), (0, [])]
