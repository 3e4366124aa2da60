"""Integer Laurent polynomials in several variables, with exact evaluation.

Coefficients are arbitrary-precision Python ints; exponent vectors are
tuples of signed ints, so both Z[t_1..t_s] and its Laurent extension live
in the same type.  With zero variables a MultiPoly degenerates to a plain
integer, which lets matrix code treat Z-matrices and polynomial matrices
uniformly.
"""

from __future__ import annotations

from fractions import Fraction


class MultiPoly:
    """A polynomial sum(c_e * t^e) stored as a map exponent-vector -> int.

    Zero coefficients are never stored.  Exponents may be negative
    (Laurent terms); helpers that need honest polynomials check
    ``min_exponents`` first.
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars, terms=None):
        self.num_vars = num_vars
        clean = {}
        if terms:
            for exps, coef in terms.items():
                exps = tuple(exps)
                if len(exps) != num_vars:
                    raise ValueError(
                        "exponent vector %r has length %d, expected %d"
                        % (exps, len(exps), num_vars)
                    )
                if coef:
                    clean[exps] = clean.get(exps, 0) + coef
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, num_vars, value):
        if value == 0:
            return cls(num_vars)
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars, index, exponent=1, coef=1):
        exps = [0] * num_vars
        exps[index] = exponent
        return cls(num_vars, {tuple(exps): coef})

    @classmethod
    def monomial(cls, num_vars, exps, coef=1):
        return cls(num_vars, {tuple(exps): coef})

    # -- predicates ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.num_vars, 0)

    def min_exponents(self):
        """Componentwise minimum exponent over all terms (zeros if empty)."""
        mins = [0] * self.num_vars
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e < mins[i]:
                    mins[i] = e
        return tuple(mins)

    # -- arithmetic ---------------------------------------------------

    def _check(self, other):
        if self.num_vars != other.num_vars:
            raise ValueError("mixed numbers of variables")

    def __add__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(self.num_vars, other)
        self._check(other)
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            new = terms.get(exps, 0) + coef
            if new:
                terms[exps] = new
            else:
                terms.pop(exps, None)
        out = MultiPoly.__new__(MultiPoly)
        out.num_vars = self.num_vars
        out.terms = terms
        return out

    def __neg__(self):
        out = MultiPoly.__new__(MultiPoly)
        out.num_vars = self.num_vars
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(self.num_vars, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return MultiPoly(self.num_vars)
            out = MultiPoly.__new__(MultiPoly)
            out.num_vars = self.num_vars
            out.terms = {e: c * other for e, c in self.terms.items()}
            return out
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                new = terms.get(exps, 0) + c1 * c2
                if new:
                    terms[exps] = new
                else:
                    del terms[exps]
        out = MultiPoly.__new__(MultiPoly)
        out.num_vars = self.num_vars
        out.terms = terms
        return out

    __rmul__ = __mul__

    def shift(self, exps):
        """Multiply by the monomial t^exps (exps may be negative)."""
        exps = tuple(exps)
        out = MultiPoly.__new__(MultiPoly)
        out.num_vars = self.num_vars
        out.terms = {
            tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()
        }
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_term() == other
        return (
            isinstance(other, MultiPoly)
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    # -- evaluation ---------------------------------------------------

    def evaluate(self, point):
        """Exact value at a tuple of Fractions (nonzero where exponents dip
        below zero)."""
        if len(point) != self.num_vars:
            raise ValueError(
                "point has %d coordinates, expected %d" % (len(point), self.num_vars)
            )
        point = tuple(Fraction(x) for x in point)
        total = Fraction(0)
        for exps, coef in self.terms.items():
            value = Fraction(coef)
            for x, e in zip(point, exps):
                if e:
                    if x == 0 and e < 0:
                        raise ZeroDivisionError("negative exponent at zero coordinate")
                    value *= x**e
            total += value
        return total

    def reduce_at_origin_mod(self, p):
        """Constant term mod p, i.e. the image under t := 0 followed by Z -> Z_p.

        Only legal for honest polynomials (no negative exponents).
        """
        if any(e < 0 for exps in self.terms for e in exps):
            raise ValueError("Laurent term present; normalize before reducing at t=0")
        return self.constant_term() % p

    # -- display ------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms):
            coef = self.terms[exps]
            factors = []
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append("t%d" % (i + 1))
                elif e:
                    factors.append("t%d^%d" % (i + 1, e))
            body = "*".join(factors)
            if not body:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(body)
            elif coef == -1:
                parts.append("-" + body)
            else:
                parts.append("%d*%s" % (coef, body))
        out = parts[0]
        for part in parts[1:]:
            out += " - " + part[1:] if part.startswith("-") else " + " + part
        return out
