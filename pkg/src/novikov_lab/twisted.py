"""Weighted CW complexes and their twisted chain complexes over Z[t_1..t_s].

Each boundary term of a cell carries an integer coefficient and a Z^s
weight vector; the twisted boundary entry is the sum of coef * t^weight
monomials.  An optional local system of rank k turns every scalar entry
into a k x k integer-matrix block.  Negative exponents coming from the
input weights are cleared by rescaling cells by monomials, recorded per
cell; rescaling is invisible to evaluation at nonzero points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

from .complexes import FreeChainComplex, verify_complex
from .exact_linalg import PolyMatrix, field_rank
from .polynomials import MultiPoly


class TwistError(ValueError):
    pass


# ---------------------------------------------------------------------------
# input data
# ---------------------------------------------------------------------------


@dataclass
class WeightedCWComplex:
    """Finite CW data: per-degree cell ids plus weighted boundary terms.

    boundary_terms maps a cell id to a list of (target id, coef, weight)
    with weight a length-s tuple of ints.  Terms may repeat a target with
    different weights; they are summed as monomials, not combined.
    """

    name: str
    s: int
    cells: list
    boundary_terms: dict

    def __post_init__(self):
        dims = {}
        for dim, ids in enumerate(self.cells):
            for cid in ids:
                if cid in dims:
                    raise TwistError("duplicate cell id %r" % cid)
                dims[cid] = dim
        self._dims = dims
        for cid, terms in self.boundary_terms.items():
            if cid not in dims:
                raise TwistError("boundary for unknown cell %r" % cid)
            for target, _coef, weight in terms:
                if target not in dims:
                    raise TwistError("boundary target %r unknown" % target)
                if dims[target] != dims[cid] - 1:
                    raise TwistError(
                        "boundary of %r hits %r of wrong dimension" % (cid, target)
                    )
                if len(weight) != self.s:
                    raise TwistError(
                        "weight %r on %r has length %d, expected %d"
                        % (weight, cid, len(weight), self.s)
                    )

    def dim(self, cid):
        return self._dims[cid]

    @property
    def dimension(self):
        return len(self.cells) - 1


@dataclass
class LocalSystem:
    """Rank-k local system given by unimodular monodromy matrices on edges.

    2-cells must come with explicit attaching words (lists of
    (edge id, +-1) letters); the ordered product of their monodromies has
    to be the identity and the total weight has to vanish.
    """

    k: int
    monodromy: dict
    attaching_words: dict = field(default_factory=dict)

    def matrix(self, edge):
        mat = self.monodromy.get(edge)
        if mat is None:
            mat = [[1 if i == j else 0 for j in range(self.k)] for i in range(self.k)]
        return mat


def _mat_identity(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def _mat_mul_int(A, B):
    k = len(A)
    return [
        [sum(A[i][t] * B[t][j] for t in range(k)) for j in range(k)] for i in range(k)
    ]


def _mat_inverse_unimodular(M):
    """Exact inverse of an integer matrix with determinant +-1."""
    k = len(M)
    aug = [[Fraction(M[i][j]) for j in range(k)] + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for col in range(k):
        pivot = next((i for i in range(col, k) if aug[i][col]), None)
        if pivot is None:
            raise TwistError("monodromy matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(k):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    out = []
    for i in range(k):
        row = []
        for j in range(k, 2 * k):
            v = aug[i][j]
            if v.denominator != 1:
                raise TwistError("monodromy matrix is not unimodular")
            row.append(int(v))
        out.append(row)
    return out


def validate_local_system(X, E):
    from .exact_linalg import det_sign

    for edge, mat in E.monodromy.items():
        if edge not in X._dims or X.dim(edge) != 1:
            raise TwistError("monodromy on %r which is not a 1-cell" % edge)
        if len(mat) != E.k or any(len(row) != E.k for row in mat):
            raise TwistError("monodromy on %r has wrong size" % edge)
        if abs(det_sign(mat)) != 1:
            raise TwistError("monodromy on %r is not unimodular" % edge)
    for face in X.cells[2] if X.dimension >= 2 else []:
        word = E.attaching_words.get(face)
        if word is None:
            raise TwistError("2-cell %r needs an attaching word" % face)
        total = _mat_identity(E.k)
        for edge, exp in word:
            if edge not in X._dims or X.dim(edge) != 1:
                raise TwistError(
                    "attaching word of %r uses %r which is not a 1-cell"
                    % (face, edge)
                )
            mat = E.matrix(edge)
            total = _mat_mul_int(
                total, mat if exp > 0 else _mat_inverse_unimodular(mat)
            )
        if total != _mat_identity(E.k):
            raise TwistError(
                "monodromies around 2-cell %r do not multiply to the identity" % face
            )


# ---------------------------------------------------------------------------
# attaching words
# ---------------------------------------------------------------------------


def face_terms_from_word(word, edge_weights, local_system=None):
    """Boundary terms of a 2-cell from its attaching word by prefix products.

    Walking the word, each letter contributes the edge translated by the
    group element accumulated so far (the prefix), with the inverse letter
    first undoing its own translation.  Returns (edge, coef, weight, block)
    tuples; block is None without a local system.
    """
    s = None
    for w in edge_weights.values():
        s = len(w)
        break
    if s is None:
        s = 0
    g = (0,) * s
    M = _mat_identity(local_system.k) if local_system else None
    terms = []
    for edge, exp in word:
        w_e = tuple(edge_weights.get(edge, (0,) * s))
        if exp > 0:
            block = [row[:] for row in M] if M is not None else None
            terms.append((edge, 1, g, block))
            g = tuple(a + b for a, b in zip(g, w_e))
            if M is not None:
                M = _mat_mul_int(M, local_system.matrix(edge))
        else:
            g = tuple(a - b for a, b in zip(g, w_e))
            if M is not None:
                M = _mat_mul_int(
                    M, _mat_inverse_unimodular(local_system.matrix(edge))
                )
            block = [row[:] for row in M] if M is not None else None
            terms.append((edge, -1, g, block))
    if any(g):
        raise TwistError("attaching word has nonzero total weight %r" % (g,))
    return terms


# ---------------------------------------------------------------------------
# the twisted complex
# ---------------------------------------------------------------------------


@dataclass
class TwistedComplex:
    name: str
    s: int
    k: int
    cells: list
    base: FreeChainComplex
    normalization: dict
    raw_boundaries: list

    @property
    def cell_counts(self):
        return [len(ids) for ids in self.cells]


def _edge_normal_form(X, edge):
    """Split an edge's terms into (head term, tail term) for local systems."""
    terms = X.boundary_terms.get(edge, [])
    if len(terms) != 2:
        raise TwistError(
            "edge %r must list exactly a head and a tail term for a local system"
            % edge
        )
    plus = [t for t in terms if t[1] == 1]
    minus = [t for t in terms if t[1] == -1]
    if len(plus) != 1 or len(minus) != 1 or any(minus[0][2]):
        raise TwistError(
            "edge %r terms must be (head, +1, w) and (tail, -1, 0)" % edge
        )
    return plus[0], minus[0]


def _raw_term_lists(X, E):
    """Per-cell boundary terms as (target, coef, weight, block) tuples."""
    k = E.k if E else 1
    lists = {}
    for dim, ids in enumerate(X.cells):
        for cid in ids:
            if dim == 0:
                lists[cid] = []
                continue
            if E is None:
                lists[cid] = [
                    (target, coef, tuple(weight), None)
                    for target, coef, weight in X.boundary_terms.get(cid, [])
                ]
                continue
            if dim == 1:
                head, tail = _edge_normal_form(X, cid)
                lists[cid] = [
                    (head[0], head[1], tuple(head[2]), E.matrix(cid)),
                    (tail[0], tail[1], tuple(tail[2]), _mat_identity(k)),
                ]
            elif dim == 2:
                word = E.attaching_words.get(cid)
                if word is None:
                    raise TwistError("2-cell %r needs an attaching word" % cid)
                edge_weights = {}
                for edge in X.cells[1]:
                    head, _tail = _edge_normal_form(X, edge)
                    edge_weights[edge] = tuple(head[2])
                lists[cid] = [
                    (t, c, w, b)
                    for t, c, w, b in face_terms_from_word(word, edge_weights, E)
                ]
            else:
                raise TwistError(
                    "local systems are supported on complexes of dimension <= 2"
                )
    return lists


def build_twisted(X, E=None):
    """The chain complex over Z[t_1..t_s] defined by the cell weights.

    With a local system of rank k every scalar monomial becomes a k x k
    block.  Columns are rescaled by monomials so all exponents end up
    nonnegative; the shifts are recorded in ``normalization``.  The result
    is verified to square to zero.
    """
    if E is not None:
        validate_local_system(X, E)
    k = E.k if E else 1
    s = X.s
    term_lists = _raw_term_lists(X, E)

    # per-cell monomial shifts, chosen top dimension down so that every
    # boundary term exponent  w + m_source - m_target  is nonnegative
    shifts = {}
    for dim in range(X.dimension, 0, -1):
        for cid in X.cells[dim]:
            shifts.setdefault(cid, (0,) * s)
        for cid in X.cells[dim]:
            m_src = shifts[cid]
            for target, _coef, weight, _block in term_lists[cid]:
                bound = tuple(w + m for w, m in zip(weight, m_src))
                old = shifts.get(target)
                shifts[target] = (
                    bound
                    if old is None
                    else tuple(min(a, b) for a, b in zip(old, bound))
                )
        # shifts never need to exceed zero
        for cid in X.cells[dim - 1]:
            old = shifts.get(cid, (0,) * s)
            shifts[cid] = tuple(min(a, 0) for a in old)
    for ids in X.cells:
        for cid in ids:
            shifts.setdefault(cid, (0,) * s)

    index = {}
    for ids in X.cells:
        for pos, cid in enumerate(ids):
            index[cid] = pos

    def assemble(shifted):
        boundaries = {}
        for dim in range(1, X.dimension + 1):
            rows = len(X.cells[dim - 1]) * k
            cols = len(X.cells[dim]) * k
            mat = PolyMatrix(rows, cols, s)
            for cid in X.cells[dim]:
                col0 = index[cid] * k
                for target, coef, weight, block in term_lists[cid]:
                    row0 = index[target] * k
                    if shifted:
                        weight = tuple(
                            w + a - b
                            for w, a, b in zip(weight, shifts[cid], shifts[target])
                        )
                    if block is None:
                        mono = MultiPoly.monomial(s, weight, coef)
                        mat[row0, col0] = mat[row0, col0] + mono
                    else:
                        for i in range(k):
                            for j in range(k):
                                if block[i][j]:
                                    mono = MultiPoly.monomial(
                                        s, weight, coef * block[i][j]
                                    )
                                    mat[row0 + i, col0 + j] = (
                                        mat[row0 + i, col0 + j] + mono
                                    )
            boundaries[dim] = mat
        return boundaries

    raw = assemble(shifted=False)
    normalized = assemble(shifted=True)
    ranks = [len(ids) * k for ids in X.cells]
    base = FreeChainComplex.build(ranks, normalized, num_vars=s)
    if not all(base.boundary(j).is_polynomial() for j in range(1, len(ranks))):
        raise TwistError("normalization failed to clear negative exponents")
    if not verify_complex(base):
        raise TwistError(
            "twisted boundary does not square to zero; weights are inconsistent"
        )
    raw_list = [raw.get(j) for j in range(1, len(ranks))]
    return TwistedComplex(
        name=X.name,
        s=s,
        k=k,
        cells=[list(ids) for ids in X.cells],
        base=base,
        normalization=shifts,
        raw_boundaries=raw_list,
    )


# ---------------------------------------------------------------------------
# homology computations
# ---------------------------------------------------------------------------


def evaluated_homology(D, point):
    """Dimensions over Q of the complex evaluated at a nonzero rational
    point, degree by degree."""
    point = tuple(Fraction(x) for x in point)
    if len(point) != D.s:
        raise TwistError("point has wrong number of coordinates")
    if any(x == 0 for x in point):
        raise TwistError("evaluation point must have nonzero coordinates")
    ranks = []
    for j in range(1, len(D.base.ranks)):
        mat = D.base.boundary(j)
        ranks.append(field_rank(mat.evaluate(point)) if mat.rows and mat.cols else 0)
    ranks = [0] + ranks + [0]
    return [
        D.base.ranks[j] - ranks[j] - ranks[j + 1]
        for j in range(len(D.base.ranks))
    ]


def reduced_homology_mod_p(D, p):
    """Dimensions over Z_p after the reduction t := 0, degree by degree."""
    ranks = []
    for j in range(1, len(D.base.ranks)):
        mat = D.base.boundary(j)
        ranks.append(
            field_rank(mat.reduce_at_origin_mod(p), p=p)
            if mat.rows and mat.cols
            else 0
        )
    ranks = [0] + ranks + [0]
    return [
        D.base.ranks[j] - ranks[j] - ranks[j + 1]
        for j in range(len(D.base.ranks))
    ]


@dataclass
class NovikovReport:
    b: list
    witnesses: list
    jumps: list
    points: list
    trials: int
    seed: int


def random_rational_point(rng, s, bound=10**4):
    return tuple(
        Fraction(rng.randint(1, bound), rng.randint(1, bound)) for _ in range(s)
    )


def novikov_numbers(D, trials=20, seed=0):
    """Generic evaluated dimensions by seeded sampling.

    The all-ones point is always probed besides ``trials`` random points:
    special points can only jump upward, so probing it never lowers the
    minimum, and it is where integral classes degenerate, which makes the
    jump visible in the report.
    """
    if trials < 1:
        raise TwistError("trials must be >= 1")
    rng = Random(seed)
    points = [tuple(Fraction(1) for _ in range(D.s))]
    for _ in range(trials):
        points.append(random_rational_point(rng, D.s))
    dims = [evaluated_homology(D, a) for a in points]
    degrees = len(D.base.ranks)
    b = [min(d[j] for d in dims) for j in range(degrees)]
    witnesses = [a for a, d in zip(points, dims) if d == b]
    jumps = []
    for a, d in zip(points, dims):
        for j in range(degrees):
            if d[j] > b[j]:
                jumps.append((a, j, d[j]))
    return NovikovReport(
        b=b, witnesses=witnesses, jumps=jumps, points=points, trials=trials, seed=seed
    )


def torsion_numbers(D, point, p):
    """Per-degree rank drop between evaluation at the point and reduction
    at <p> + <t>; a negative drop means the (point, p) pairing is invalid."""
    point = tuple(Fraction(x) for x in point)
    out = []
    for j in range(len(D.base.ranks)):
        mat = D.base.boundary(j + 1)
        if mat.rows and mat.cols:
            r_eval = field_rank(mat.evaluate(point))
            r_mod = field_rank(mat.reduce_at_origin_mod(p), p=p)
        else:
            r_eval = r_mod = 0
        q = r_eval - r_mod
        if q < 0:
            raise TwistError(
                "invalid (a, p) pairing: torsion number negative at degree %d" % j
            )
        out.append(q)
    return out


# ---------------------------------------------------------------------------
# built-in complexes
# ---------------------------------------------------------------------------


def circle_complex(twisted=True, name=None):
    """One vertex, one edge; the twisted version carries the degree-1 class."""
    w = 1 if twisted else 0
    return WeightedCWComplex(
        name=name or ("s1_twisted" if twisted else "s1"),
        s=1,
        cells=[["v"], ["e"]],
        boundary_terms={"e": [("v", 1, (w,)), ("v", -1, (0,))]},
    )


def torus_complex(twisted=True, name=None):
    """The standard CW torus; the twisted version weights the class dual to
    the first edge, and the face terms follow the attaching word."""
    e1_w = (1,) if twisted else (0,)
    zero = (0,)
    word = [("e1", 1), ("e2", 1), ("e1", -1), ("e2", -1)]
    face_terms = [
        (t, c, w)
        for t, c, w, _ in face_terms_from_word(word, {"e1": e1_w, "e2": zero})
    ]
    return WeightedCWComplex(
        name=name or ("t2_twisted" if twisted else "t2"),
        s=1,
        cells=[["v"], ["e1", "e2"], ["f"]],
        boundary_terms={
            "e1": [("v", 1, e1_w), ("v", -1, zero)],
            "e2": [("v", 1, zero), ("v", -1, zero)],
            "f": face_terms,
        },
    )


def sphere_complex(name="s2"):
    """One vertex and one 2-cell."""
    return WeightedCWComplex(
        name=name, s=0, cells=[["v"], [], ["f"]], boundary_terms={"f": []}
    )


def projective_plane_complex(name="rp2"):
    """The three-cell model of the projective plane; the face wraps twice."""
    return WeightedCWComplex(
        name=name,
        s=0,
        cells=[["v"], ["e"], ["f"]],
        boundary_terms={
            "e": [("v", 1, ()), ("v", -1, ())],
            "f": [("e", 2, ())],
        },
    )


BUILTIN_COMPLEXES = {
    "s1_twisted": lambda: circle_complex(twisted=True),
    "s1": lambda: circle_complex(twisted=False),
    "t2_twisted": lambda: torus_complex(twisted=True),
    "t2": lambda: torus_complex(twisted=False),
    "s2": sphere_complex,
    "rp2": projective_plane_complex,
}
