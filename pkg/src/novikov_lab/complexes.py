"""Finitely generated free chain complexes and their rank bookkeeping.

A complex stores dense boundary matrices indexed by degree; degree j maps
to degree j-1 and the composite of consecutive boundaries must vanish.
Entries are MultiPoly, so Z-complexes (zero variables) and complexes over
Z[t_1..t_s] share one representation.  Homology over Z goes through Smith
normal form; ranks over residue fields go through rank_at_ideal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact_linalg import (
    PolyMatrix,
    field_rank,
    rank_at_ideal,
    smith_normal_form,
)


class ComplexError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Poincare polynomials
# ---------------------------------------------------------------------------


class PoincarePolynomial:
    """Degree-indexed nonnegative coefficients with trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if any(c < 0 for c in coeffs):
            raise ValueError("negative coefficient in Poincare polynomial")
        self.coeffs = coeffs

    @classmethod
    def monomial(cls, degree, coef=1):
        coeffs = [0] * degree + [coef]
        return cls(coeffs)

    def coefficient(self, j):
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return PoincarePolynomial(
            [self.coefficient(j) + other.coefficient(j) for j in range(n)]
        )

    def __eq__(self, other):
        return isinstance(other, PoincarePolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, t):
        return sum(c * t**j for j, c in enumerate(self.coeffs))

    def shift(self, k):
        """Multiply by t^k (k >= 0)."""
        if not self.coeffs:
            return PoincarePolynomial()
        return PoincarePolynomial([0] * k + self.coeffs)

    def scale_by(self, other):
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PoincarePolynomial(out)

    def __repr__(self):
        return "PoincarePolynomial(%r)" % (self.coeffs,)

    def pretty(self, var="t"):
        if not self.coeffs:
            return "0"
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                parts.append(str(c))
            else:
                power = var if j == 1 else "%s^%d" % (var, j)
                parts.append(power if c == 1 else "%d%s" % (c, power))
        return " + ".join(parts)


def divide_by_one_plus_t(coeffs):
    """Exact quotient of an integer polynomial by (1+t), or None.

    ``coeffs`` may carry negative entries (it is usually a difference of two
    Poincare polynomials).  Returns the quotient coefficient list when the
    division is exact.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return []
    quotient = [0] * len(coeffs)
    rem = 0
    # synthetic division by the root t = -1, highest degree first
    for j in range(len(coeffs) - 1, -1, -1):
        quotient[j] = coeffs[j] - rem
        rem = quotient[j]
    if rem != 0:
        return None
    return quotient[1:]


# ---------------------------------------------------------------------------
# complexes
# ---------------------------------------------------------------------------


@dataclass
class FreeChainComplex:
    """Graded free modules with boundary matrices boundaries[j]: C_j -> C_{j-1}.

    boundaries[0] is kept as an empty 0 x ranks[0] matrix so shapes line up.
    """

    ranks: list
    boundaries: list
    num_vars: int = 0

    @classmethod
    def build(cls, ranks, boundary_map, num_vars=0):
        """boundary_map: dict degree -> matrix (PolyMatrix or int rows)."""
        ranks = list(ranks)
        boundaries = []
        for j in range(len(ranks)):
            prev = ranks[j - 1] if j else 0
            mat = boundary_map.get(j)
            if mat is None:
                mat = PolyMatrix(prev, ranks[j], num_vars)
            elif not isinstance(mat, PolyMatrix):
                mat = PolyMatrix.from_int_rows(mat, num_vars) if mat else PolyMatrix(
                    prev, ranks[j], num_vars
                )
            if mat.rows != prev or mat.cols != ranks[j]:
                raise ComplexError(
                    "boundary %d has shape %dx%d, expected %dx%d"
                    % (j, mat.rows, mat.cols, prev, ranks[j])
                )
            boundaries.append(mat)
        return cls(ranks=ranks, boundaries=boundaries, num_vars=num_vars)

    @property
    def top_degree(self):
        return len(self.ranks) - 1

    def boundary(self, j):
        if 0 <= j < len(self.boundaries):
            return self.boundaries[j]
        # out-of-range boundaries are zero maps with consistent shapes
        rows = self.ranks[j - 1] if 0 < j <= self.top_degree + 1 else 0
        cols = self.ranks[j] if 0 <= j <= self.top_degree else 0
        return PolyMatrix(rows, cols, self.num_vars)

    def euler_characteristic(self):
        return sum((-1) ** j * r for j, r in enumerate(self.ranks))


def verify_complex(C):
    """True iff every composite boundary vanishes identically."""
    for j in range(2, C.top_degree + 1):
        lower = C.boundary(j - 1)
        upper = C.boundary(j)
        if lower.cols != upper.rows:
            raise ComplexError(
                "boundary shapes disagree between degrees %d and %d" % (j - 1, j)
            )
        if lower.rows and upper.cols and not lower.mul(upper).is_zero():
            return False
    return True


def rank_of_boundary(C, j, ideal):
    mat = C.boundary(j)
    if mat.rows == 0 or mat.cols == 0:
        return 0
    return rank_at_ideal(mat, ideal)


def betti_at_ideal(C, ideal):
    """Per-degree dimension over the residue field of the ideal."""
    out = []
    for j in range(len(C.ranks)):
        b = C.ranks[j] - rank_of_boundary(C, j, ideal) - rank_of_boundary(
            C, j + 1, ideal
        )
        out.append(b)
    return out


def poincare_at_ideal(C, ideal):
    return PoincarePolynomial(betti_at_ideal(C, ideal))


def homology(C, coeff="Z"):
    """Per-degree (betti, torsion divisors) over Z, Q, or Z_p.

    ``coeff`` is "Z", "Q", or a prime int p.  Entries must be constants.
    Over Z the torsion divisors are the Smith diagonal entries > 1 of the
    incoming boundary.
    """
    if not verify_complex(C):
        raise ComplexError("not a chain complex: some composite is nonzero")
    mats = {}
    for j in range(len(C.ranks) + 1):
        b = C.boundary(j)
        mats[j] = b.to_int_rows() if b.rows and b.cols else None

    def rk(j):
        mat = mats.get(j)
        if mat is None:
            return 0
        if coeff == "Q" or coeff == "Z":
            return field_rank(mat)
        return field_rank(mat, p=int(coeff))

    out = []
    for j in range(len(C.ranks)):
        betti = C.ranks[j] - rk(j) - rk(j + 1)
        torsion = []
        if coeff == "Z" and mats.get(j + 1) is not None:
            torsion = [
                d for d in smith_normal_form(mats[j + 1]).diagonal if d > 1
            ]
        out.append((betti, torsion))
    return out


# ---------------------------------------------------------------------------
# chain maps and mapping cones
# ---------------------------------------------------------------------------


@dataclass
class ChainMap:
    """Degreewise matrices components[q]: source_q -> target_q."""

    source: FreeChainComplex
    target: FreeChainComplex
    components: list

    def component(self, q):
        if 0 <= q < len(self.components):
            return self.components[q]
        rows = self.target.ranks[q] if 0 <= q < len(self.target.ranks) else 0
        cols = self.source.ranks[q] if 0 <= q < len(self.source.ranks) else 0
        return PolyMatrix(rows, cols, self.source.num_vars)

    def commutes(self):
        top = max(self.source.top_degree, self.target.top_degree) + 1
        for q in range(1, top + 1):
            left = self.target.boundary(q).mul(self.component(q))
            right = self.component(q - 1).mul(self.source.boundary(q))
            if left != right:
                return False
        return True


def identity_chain_map(C):
    comps = []
    for q, r in enumerate(C.ranks):
        comps.append(PolyMatrix.from_int_rows(
            [[1 if i == j else 0 for j in range(r)] for i in range(r)], C.num_vars
        ) if r else PolyMatrix(0, 0, C.num_vars))
    return ChainMap(source=C, target=C, components=comps)


def mapping_cone(f):
    """Algebraic mapping cone of a chain map, degree q = R_{q-1} (+) N_q.

    The differential is the block matrix [[-d_R, 0], [f, d_N]]; the result
    is verified to be a complex.
    """
    if not f.commutes():
        raise ComplexError("mapping cone requires a chain map (f d = d f fails)")
    R, N = f.source, f.target
    nv = R.num_vars
    top = max(R.top_degree + 1, N.top_degree)
    ranks = []
    for q in range(top + 1):
        r_part = R.ranks[q - 1] if 1 <= q <= R.top_degree + 1 else 0
        n_part = N.ranks[q] if q <= N.top_degree else 0
        ranks.append(r_part + n_part)
    boundaries = {}
    for q in range(1, top + 1):
        r_rows = R.ranks[q - 2] if 2 <= q <= R.top_degree + 2 else 0
        n_rows = N.ranks[q - 1] if q - 1 <= N.top_degree else 0
        r_cols = R.ranks[q - 1] if 1 <= q <= R.top_degree + 1 else 0
        n_cols = N.ranks[q] if q <= N.top_degree else 0
        block = PolyMatrix(r_rows + n_rows, r_cols + n_cols, nv)
        dR = R.boundary(q - 1)
        for i in range(min(r_rows, dR.rows)):
            for j in range(min(r_cols, dR.cols)):
                block[i, j] = -dR[i, j]
        fq = f.component(q - 1)
        for i in range(min(n_rows, fq.rows)):
            for j in range(min(r_cols, fq.cols)):
                block[r_rows + i, j] = fq[i, j]
        dN = N.boundary(q)
        for i in range(min(n_rows, dN.rows)):
            for j in range(min(n_cols, dN.cols)):
                block[r_rows + i, r_cols + j] = dN[i, j]
        boundaries[q] = block
    cone = FreeChainComplex.build(ranks, boundaries, num_vars=nv)
    if not verify_complex(cone):
        raise ComplexError("mapping cone failed d*d = 0")
    return cone


# ---------------------------------------------------------------------------
# filtrations
# ---------------------------------------------------------------------------


@dataclass
class FiltrationSpec:
    """Nested basis-index levels, innermost first; the last level is full.

    levels[k][q] is a sorted tuple of degree-q basis indices.  Every level
    must be closed under the boundary.
    """

    levels: list

    def validate(self, C):
        if not self.levels:
            raise ComplexError("empty filtration")
        degrees = len(C.ranks)
        for level in self.levels:
            if len(level) != degrees:
                raise ComplexError("level does not cover all degrees")
        for q in range(degrees):
            full = tuple(range(C.ranks[q]))
            if tuple(self.levels[-1][q]) != full:
                raise ComplexError("outermost level must be the full basis")
            prev = set()
            for level in self.levels:
                cur = set(level[q])
                if not prev <= cur:
                    raise ComplexError("levels are not nested in degree %d" % q)
                prev = cur
        for level in self.levels:
            for q in range(1, degrees):
                d = C.boundary(q)
                allowed = set(level[q - 1])
                for col in level[q]:
                    for row in range(d.rows):
                        if row not in allowed and not d[row, col].is_zero():
                            raise ComplexError(
                                "level not closed under boundary at degree %d" % q
                            )


def skeletal_filtration(C):
    """The filtration by skeleta, starting at the empty level: each
    subsequent level adds the cells of the next dimension."""
    degrees = len(C.ranks)
    levels = []
    for k in range(-1, degrees):
        level = []
        for q in range(degrees):
            level.append(tuple(range(C.ranks[q])) if q <= k else ())
        levels.append(level)
    return FiltrationSpec(levels=levels)


def quotient_complex(C, sub_level, super_level):
    """The complex on basis super minus sub (both levels boundary-closed)."""
    degrees = len(C.ranks)
    kept = []
    for q in range(degrees):
        inner = set(sub_level[q])
        kept.append([i for i in super_level[q] if i not in inner])
    ranks = [len(k) for k in kept]
    boundaries = {}
    for q in range(1, degrees):
        d = C.boundary(q)
        rows = kept[q - 1]
        cols = kept[q]
        mat = PolyMatrix(len(rows), len(cols), C.num_vars)
        for i, r in enumerate(rows):
            for j, c in enumerate(cols):
                mat[i, j] = d[r, c]
        boundaries[q] = mat
    return FreeChainComplex.build(ranks, boundaries, num_vars=C.num_vars)


@dataclass
class FiltrationReport:
    relative: list
    total: PoincarePolynomial
    connecting: list
    connecting_ranks: list

    def identity_holds(self):
        lhs = PoincarePolynomial()
        for p in self.relative:
            lhs = lhs + p
        rhs = self.total
        one_plus_t = PoincarePolynomial([1, 1])
        for q in self.connecting:
            rhs = rhs + one_plus_t.scale_by(q)
        return lhs == rhs


def _connecting_ranks_from_betti(b_inner, b_mid, b_outer):
    """Solve d_j + d_{j-1} = b_j(inner,mid) - b_j(inner,outer) + b_j(mid,outer).

    A negative solution or a nonzero leftover marks an invalid filtration.
    """
    n = max(len(b_inner), len(b_mid), len(b_outer))

    def get(lst, j):
        return lst[j] if j < len(lst) else 0

    ds = []
    prev = 0
    for j in range(n):
        total = get(b_inner, j) - get(b_mid, j) + get(b_outer, j)
        d = total - prev
        if d < 0:
            raise ComplexError(
                "connecting-rank recursion went negative at degree %d "
                "(filtration is not exact)" % j
            )
        ds.append(d)
        prev = d
    if prev != 0:
        raise ComplexError(
            "connecting-rank recursion does not close (filtration is not exact)"
        )
    while ds and ds[-1] == 0:
        ds.pop()
    return ds


def filtration_polynomials(C, F, ideal):
    """Relative Poincare polynomials of consecutive levels, the total
    relative polynomial, and connecting ranks for each inner triple.

    The returned report satisfies
        sum(relative) == total + (1+t) * sum(connecting)
    exactly; violation of the recursion raises ComplexError.
    """
    F.validate(C)
    levels = F.levels
    relative = []
    for k in range(len(levels) - 1):
        quot = quotient_complex(C, levels[k], levels[k + 1])
        relative.append(poincare_at_ideal(quot, ideal))
    total = poincare_at_ideal(
        quotient_complex(C, levels[0], levels[-1]), ideal
    )
    connecting = []
    connecting_ranks = []
    for k in range(1, len(levels) - 1):
        b_inner = betti_at_ideal(quotient_complex(C, levels[k], levels[k + 1]), ideal)
        b_mid = betti_at_ideal(quotient_complex(C, levels[0], levels[k + 1]), ideal)
        b_outer = betti_at_ideal(quotient_complex(C, levels[0], levels[k]), ideal)
        ds = _connecting_ranks_from_betti(b_inner, b_mid, b_outer)
        connecting_ranks.append(ds)
        connecting.append(PoincarePolynomial(ds))
    report = FiltrationReport(
        relative=relative,
        total=total,
        connecting=connecting,
        connecting_ranks=connecting_ranks,
    )
    if not report.identity_holds():
        raise ComplexError("filtration identity failed (input is not exact)")
    return report


# ---------------------------------------------------------------------------
# prime comparison
# ---------------------------------------------------------------------------


@dataclass
class PrimeComparison:
    poly_p: PoincarePolynomial
    poly_q: PoincarePolynomial
    torsion: list
    qpoly: PoincarePolynomial


def prime_comparison(C, P, Q):
    """Poincare polynomials at two prime ideals P inside Q with the torsion
    table T_j = rank im d_{j+1}(P) - rank im d_{j+1}(Q).

    All T_j must be nonnegative; the identity
        poly_q == poly_p + (1+t) * qpoly
    with qpoly = sum T_j t^j then holds by rank counting.
    """
    ranks_p = [rank_of_boundary(C, j, P) for j in range(len(C.ranks) + 1)]
    ranks_q = [rank_of_boundary(C, j, Q) for j in range(len(C.ranks) + 1)]
    torsion = []
    for j in range(len(C.ranks)):
        t_j = ranks_p[j + 1] - ranks_q[j + 1]
        if t_j < 0:
            raise ComplexError(
                "containment violated: torsion number is negative at degree %d" % j
            )
        torsion.append(t_j)
    betti_p = [
        C.ranks[j] - ranks_p[j] - ranks_p[j + 1] for j in range(len(C.ranks))
    ]
    betti_q = [
        C.ranks[j] - ranks_q[j] - ranks_q[j + 1] for j in range(len(C.ranks))
    ]
    report = PrimeComparison(
        poly_p=PoincarePolynomial(betti_p),
        poly_q=PoincarePolynomial(betti_q),
        torsion=torsion,
        qpoly=PoincarePolynomial(torsion),
    )
    lhs = report.poly_q
    rhs = report.poly_p + PoincarePolynomial([1, 1]).scale_by(report.qpoly)
    if lhs != rhs:
        raise ComplexError("prime comparison identity failed")
    return report
