"""Shared synthetic-complex generators for the test suite."""

from fractions import Fraction
from math import lcm
from random import Random

from novikov_lab.complexes import FiltrationSpec, FreeChainComplex
from novikov_lab.exact_linalg import PolyMatrix, kernel_basis


def random_filtered_complex(rng, num_levels=3, max_rank=4):
    """A random integer chain complex in degrees 0..2 with a nested,
    boundary-closed filtration.

    Each basis element gets a depth; boundaries only point to rows of depth
    <= the column's depth, and degree-2 columns are sampled from the exact
    kernel of d1 restricted to the allowed rows, so d o d = 0 holds by
    construction.
    """
    ranks = [rng.randint(1, max_rank), rng.randint(0, max_rank), rng.randint(0, max_rank)]
    depths = [
        [rng.randint(0, num_levels - 1) for _ in range(r)] for r in ranks
    ]

    d1 = [[0] * ranks[1] for _ in range(ranks[0])]
    for col in range(ranks[1]):
        for row in range(ranks[0]):
            if depths[0][row] <= depths[1][col]:
                d1[row][col] = rng.randint(-3, 3)

    d2 = [[0] * ranks[2] for _ in range(ranks[1])]
    for col in range(ranks[2]):
        allowed = [r for r in range(ranks[1]) if depths[1][r] <= depths[2][col]]
        if not allowed:
            continue
        restricted = [[d1[i][j] for j in allowed] for i in range(ranks[0])]
        basis = kernel_basis(restricted)
        if not basis:
            continue
        combo = [Fraction(0)] * len(allowed)
        for vec in basis:
            c = rng.randint(-2, 2)
            if c:
                combo = [a + c * b for a, b in zip(combo, vec)]
        denom = lcm(*(x.denominator for x in combo)) if combo else 1
        for i, r in enumerate(allowed):
            d2[r][col] = int(combo[i] * denom)

    C = FreeChainComplex.build(ranks, {1: d1, 2: d2})
    levels = []
    for k in range(num_levels):
        level = []
        for q in range(3):
            level.append(tuple(i for i in range(ranks[q]) if depths[q][i] <= k))
        levels.append(level)
    # outermost level must be everything
    levels[-1] = [tuple(range(r)) for r in ranks]
    for q in range(3):
        depths[q] = [min(d, num_levels - 1) for d in depths[q]]
    return C, FiltrationSpec(levels=levels), depths


def random_complex_with_subcomplex(rng, max_rank=4):
    """A random integer complex with a basis-aligned subcomplex and the
    inclusion data, built from the depth-0 part of a two-level filtration."""
    C, filtration, depths = random_filtered_complex(rng, num_levels=2, max_rank=max_rank)
    sub_level = filtration.levels[0]
    return C, sub_level, depths


def restrict_complex(C, level):
    """The subcomplex spanned by the given basis indices."""
    kept = [list(level[q]) for q in range(len(C.ranks))]
    ranks = [len(k) for k in kept]
    boundaries = {}
    for q in range(1, len(C.ranks)):
        d = C.boundary(q)
        mat = PolyMatrix(ranks[q - 1], ranks[q], C.num_vars)
        for i, r in enumerate(kept[q - 1]):
            for j, c in enumerate(kept[q]):
                mat[i, j] = d[r, c]
        boundaries[q] = mat
    return FreeChainComplex.build(ranks, boundaries, num_vars=C.num_vars)


def inclusion_matrices(C, level):
    """Degreewise 0/1 matrices of the basis inclusion level -> C."""
    comps = []
    for q in range(len(C.ranks)):
        cols = list(level[q])
        rows = C.ranks[q]
        comps.append(
            [[1 if r == c else 0 for c in cols] for r in range(rows)]
        )
    return comps
