"""Exact matrix reduction: Smith normal form over Z, ranks over Q, Z_p,
and polynomial matrices localized at prime ideals.

Everything here is pure and deterministic.  Matrices are dense lists of
lists; entries are ints, Fractions, or MultiPoly depending on the routine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .polynomials import MultiPoly


# ---------------------------------------------------------------------------
# prime ideal specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvaluationAt:
    """The maximal ideal of polynomials vanishing at a rational point with
    nonzero coordinates; ranks are taken over Q."""

    point: tuple

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(Fraction(x) for x in self.point))
        if any(x == 0 for x in self.point):
            raise ValueError("evaluation point must have nonzero coordinates")


@dataclass(frozen=True)
class ReductionIp:
    """The ideal <p> + <t_1,...,t_s>; ranks are taken over Z_p after t := 0."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError("%d is not prime" % self.p)


@dataclass(frozen=True)
class GenericPoint:
    """Marker for the generic-rank search; no rank is computed directly here."""


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass
class SnfResult:
    """diagonal satisfies d[i] | d[i+1]; left*A*right is the diagonal
    embedding; left and right are unimodular."""

    diagonal: list
    left: list
    right: list


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A):
    """Smith normal form of an integer matrix with unimodular transforms.

    Pivots are chosen as the nonzero entry of minimal absolute value, which
    keeps coefficient growth modest at the sizes used here.  The empty
    matrix yields an empty diagonal.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    B = [[int(x) for x in row] for row in A]
    L = _identity(m)
    R = _identity(n)

    def swap_rows(i, j):
        if i != j:
            B[i], B[j] = B[j], B[i]
            L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        if i != j:
            for row in B:
                row[i], row[j] = row[j], row[i]
            for row in R:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row[dst] += q * row[src]
        Bs, Bd = B[src], B[dst]
        for k in range(n):
            Bd[k] += q * Bs[k]
        Ls, Ld = L[src], L[dst]
        for k in range(m):
            Ld[k] += q * Ls[k]

    def add_col(src, dst, q):
        for row in B:
            row[dst] += q * row[src]
        for row in R:
            row[dst] += q * row[src]

    t = 0
    size = min(m, n)
    while t < size:
        # locate the minimal-magnitude nonzero entry in the trailing block
        pivot = None
        best = None
        for i in range(t, m):
            row = B[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])

        while True:
            # clear column t below the pivot, re-pivoting on remainders
            dirty = False
            for i in range(t + 1, m):
                v = B[i][t]
                if v:
                    q = v // B[t][t]
                    add_row(t, i, -q)
                    if B[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                v = B[t][j]
                if v:
                    q = v // B[t][t]
                    add_col(t, j, -q)
                    if B[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # enforce the divisor chain: pivot must divide the whole block
            offender = None
            d = B[t][t]
            for i in range(t + 1, m):
                row = B[i]
                for j in range(t + 1, n):
                    if row[j] % d:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)
        t += 1

    for i in range(size):
        if B[i][i] < 0:
            for k in range(n):
                B[i][k] = -B[i][k]
            for k in range(m):
                L[i][k] = -L[i][k]

    diagonal = [B[i][i] for i in range(size)]
    return SnfResult(diagonal=diagonal, left=L, right=R)


def snf_rank(A):
    return sum(1 for d in smith_normal_form(A).diagonal if d)


# ---------------------------------------------------------------------------
# field linear algebra (Q and Z_p)
# ---------------------------------------------------------------------------


def field_rank(M, p=None):
    """Row rank by Gaussian elimination; exact over Q (p=None) or Z_p."""
    m = len(M)
    n = len(M[0]) if m else 0
    if p is None:
        rows = [[Fraction(x) for x in row] for row in M]
    else:
        rows = [[int(x) % p for x in row] for row in M]
    rank = 0
    for col in range(n):
        pivot = None
        for i in range(rank, m):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        inv = pow(pr[col], p - 2, p) if p is not None else 1 / pr[col]
        for i in range(rank + 1, m):
            ri = rows[i]
            if ri[col]:
                factor = ri[col] * inv
                if p is None:
                    for k in range(col, n):
                        ri[k] -= factor * pr[k]
                else:
                    for k in range(col, n):
                        ri[k] = (ri[k] - factor * pr[k]) % p
        rank += 1
        if rank == m:
            break
    return rank


def kernel_basis(M):
    """Basis of the rational null space of M (columns as solution vectors)."""
    m = len(M)
    n = len(M[0]) if m else 0
    rows = [[Fraction(x) for x in row] for row in M]
    pivots = []
    rank = 0
    for col in range(n):
        pivot = None
        for i in range(rank, m):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        inv = 1 / pr[col]
        for k in range(col, n):
            pr[k] *= inv
        for i in range(m):
            if i != rank and rows[i][col]:
                factor = rows[i][col]
                for k in range(col, n):
                    rows[i][k] -= factor * pr[k]
        pivots.append(col)
        rank += 1
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for j in free:
        vec = [Fraction(0)] * n
        vec[j] = Fraction(1)
        for r, col in enumerate(pivots):
            vec[col] = -rows[r][j]
        basis.append(vec)
    return basis


def mat_mul(A, B):
    m, k = len(A), len(B)
    n = len(B[0]) if k else 0
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        Ai = A[i]
        Oi = out[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(n):
                    Oi[j] += a * Bt[j]
    return out


def det_sign(A):
    """Determinant of a square integer matrix via fraction-free elimination."""
    n = len(A)
    rows = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for col in range(n):
        pivot = None
        for i in range(col, n):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for i in range(col + 1, n):
            if rows[i][col]:
                f = rows[i][col] * inv
                for k in range(col, n):
                    rows[i][k] -= f * rows[col][k]
    return det


# ---------------------------------------------------------------------------
# polynomial matrices
# ---------------------------------------------------------------------------


@dataclass
class PolyMatrix:
    """Dense matrix of MultiPoly entries sharing one number of variables."""

    rows: int
    cols: int
    num_vars: int
    entries: list = field(default_factory=list)

    def __post_init__(self):
        if not self.entries:
            self.entries = [
                [MultiPoly(self.num_vars) for _ in range(self.cols)]
                for _ in range(self.rows)
            ]
        for row in self.entries:
            for e in row:
                if e.num_vars != self.num_vars:
                    raise ValueError("entry has wrong number of variables")

    @classmethod
    def from_int_rows(cls, rows_of_ints, num_vars=0):
        m = len(rows_of_ints)
        n = len(rows_of_ints[0]) if m else 0
        entries = [
            [MultiPoly.constant(num_vars, v) for v in row] for row in rows_of_ints
        ]
        return cls(rows=m, cols=n, num_vars=num_vars, entries=entries)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __setitem__(self, idx, value):
        i, j = idx
        self.entries[i][j] = value

    def is_zero(self):
        return all(e.is_zero() for row in self.entries for e in row)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError(
                "shape mismatch: %dx%d times %dx%d"
                % (self.rows, self.cols, other.rows, other.cols)
            )
        out = PolyMatrix(self.rows, other.cols, self.num_vars)
        for i in range(self.rows):
            for j in range(other.cols):
                acc = MultiPoly(self.num_vars)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                out.entries[i][j] = acc
        return out

    def evaluate(self, point):
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def reduce_at_origin_mod(self, p):
        return [[e.reduce_at_origin_mod(p) for e in row] for row in self.entries]

    def to_int_rows(self):
        out = []
        for row in self.entries:
            ints = []
            for e in row:
                if not e.is_constant():
                    raise ValueError("matrix entry is not a constant polynomial")
                ints.append(e.constant_term())
            out.append(ints)
        return out

    def is_polynomial(self):
        if self.num_vars == 0:
            return True
        return all(
            min(e.min_exponents()) >= 0 for row in self.entries for e in row
        )


def rank_at_ideal(M, ideal):
    """Rank of a PolyMatrix over the residue field of the given prime ideal."""
    if isinstance(ideal, EvaluationAt):
        if len(ideal.point) != M.num_vars:
            raise ValueError(
                "evaluation point has %d coordinates, matrix has %d variables"
                % (len(ideal.point), M.num_vars)
            )
        return field_rank(M.evaluate(ideal.point))
    if isinstance(ideal, ReductionIp):
        return field_rank(M.reduce_at_origin_mod(ideal.p), p=ideal.p)
    if isinstance(ideal, GenericPoint):
        raise ValueError(
            "generic rank is a sampled search; use twisted.novikov_numbers"
        )
    raise TypeError("unknown ideal spec %r" % (ideal,))
