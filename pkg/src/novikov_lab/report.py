"""Assembled identity and inequality verdicts.

The headline check equates the summed index polynomials of the invariant
sets with the evaluated homology polynomial of the twisted complex, up to a
(1+t) multiple with nonnegative coefficients; the inequality checks are the
degreewise and alternating-sum consequences, including the torsion-refined
form.  Every verdict is a plain dataclass so the CLI can serialize it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import PoincarePolynomial, divide_by_one_plus_t
from .conley import sum_index_poincare
from .twisted import evaluated_homology, torsion_numbers


class ReportError(ValueError):
    pass


@dataclass
class MorseVerdict:
    identity_name: str
    lhs: PoincarePolynomial
    rhs: PoincarePolynomial
    q_polys: list
    holds: bool
    witness: object = None
    # hypotheses the caller asserts but no computation certifies
    declared_hypotheses: tuple = ()


def _value(seq, j):
    return seq[j] if 0 <= j < len(seq) else 0


def main_equality_check(descriptors, D, point, p):
    """lhs = sum of Z_p index polynomials, rhs = evaluated homology
    polynomial; holds iff lhs - rhs is (1+t) times a nonnegative polynomial.

    The (point, p) pairing is validated through the torsion numbers first.
    """
    torsion_numbers(D, point, p)  # raises on an invalid pairing
    lhs = sum_index_poincare(descriptors, p)
    rhs = PoincarePolynomial(evaluated_homology(D, point))
    n = max(len(lhs.coeffs), len(rhs.coeffs))
    diff = [lhs.coefficient(j) - rhs.coefficient(j) for j in range(n)]
    quotient = divide_by_one_plus_t(diff)
    hypotheses = ("isolated stable sets exhaust the stable sets (declared, not checked)",)
    if quotient is None:
        return MorseVerdict(
            identity_name="main_equality",
            lhs=lhs,
            rhs=rhs,
            q_polys=[],
            holds=False,
            witness="difference not divisible by (1+t)",
            declared_hypotheses=hypotheses,
        )
    bad = next((j for j, c in enumerate(quotient) if c < 0), None)
    if bad is not None:
        return MorseVerdict(
            identity_name="main_equality",
            lhs=lhs,
            rhs=rhs,
            q_polys=[],
            holds=False,
            witness=bad,
            declared_hypotheses=hypotheses,
        )
    return MorseVerdict(
        identity_name="main_equality",
        lhs=lhs,
        rhs=rhs,
        q_polys=[PoincarePolynomial(quotient)],
        holds=True,
        declared_hypotheses=hypotheses,
    )


def euler_check(descriptors, D):
    """Index polynomials at t = -1 against the cell-count Euler number."""
    lhs = sum_index_poincare(descriptors, "Q")(-1)
    chi = sum((-1) ** j * c for j, c in enumerate(D.cell_counts))
    return lhs == chi


def _betti_of(novikov_report):
    return list(getattr(novikov_report, "b", novikov_report))


def _inequality_verdict(name, counts, betti, extra=()):
    """counts_j >= betti_j (+ extra_j) degreewise, plus the alternating
    partial sums of counts against betti."""
    n = max(len(counts), len(betti), len(extra) if extra else 0)
    witness = None
    for j in range(n):
        need = _value(betti, j) + (_value(extra, j) if extra else 0)
        if _value(counts, j) < need:
            witness = j
            break
    if witness is None:
        for j in range(n):
            alt_c = sum((-1) ** i * _value(counts, j - i) for i in range(j + 1))
            alt_b = sum((-1) ** i * _value(betti, j - i) for i in range(j + 1))
            if alt_c < alt_b:
                witness = j
                break
    return MorseVerdict(
        identity_name=name,
        lhs=PoincarePolynomial(counts),
        rhs=PoincarePolynomial(betti),
        q_polys=[PoincarePolynomial(extra)] if extra else [],
        holds=witness is None,
        witness=witness,
    )


def novikov_inequality_check(zero_counts, novikov_report, torsion=None):
    """c_j >= b_j + q_j + q_{j-1} degreewise plus the alternating-sum chain.

    With all torsion numbers zero this is the classical inequality; with a
    trivial class it reduces to the Morse inequalities.
    """
    betti = _betti_of(novikov_report)
    torsion = list(torsion or [])
    refine = [
        _value(torsion, j) + _value(torsion, j - 1)
        for j in range(max(len(torsion) + 1, 1))
    ]
    return _inequality_verdict(
        "novikov_inequalities", list(zero_counts), betti, refine
    )


def morse_smale_check(zero_counts, orbit_counts, novikov_report):
    """mu_j = c_j + a_j + a_{j+1} >= b_j degreewise plus alternating sums.

    orbit_counts[j] counts orbits whose full unstable manifold (return-map
    index plus the flow direction) has dimension j; an orbit counted in a_j
    contributes t^{j-1} + t^j to the index polynomial, which is what makes
    mu_j the coefficient of t^j.
    """
    betti = _betti_of(novikov_report)
    counts = list(zero_counts)
    orbits = list(orbit_counts)
    n = max(len(counts), len(orbits), len(betti))
    mu = [
        _value(counts, j) + _value(orbits, j) + _value(orbits, j + 1)
        for j in range(n)
    ]
    return _inequality_verdict("morse_smale_inequalities", mu, betti)


@dataclass
class VanishingVerdict:
    holds: bool
    contradiction: bool
    b: list

    def __bool__(self):
        return self.holds


def vanishing_check(cert_report, novikov_report):
    """All generic numbers must vanish for a certified fixed-point-free
    carrier; a certified carrier with a nonzero number is a contradiction
    between the certificate and the complex."""
    if not cert_report.fixed_point_free:
        raise ReportError("vanishing applies to fixed-point-free carriers only")
    betti = _betti_of(novikov_report)
    holds = all(b == 0 for b in betti)
    contradiction = (
        cert_report.verdict == "CERTIFIED_ON_SAMPLES" and not holds
    )
    return VanishingVerdict(holds=holds, contradiction=contradiction, b=betti)
