"""Closed-form index homology polynomials for the basic invariant sets.

Each descriptor yields the Poincare polynomial of its index homology over a
chosen field: a hyperbolic fixed point of index k contributes t^k, an
orientable hyperbolic periodic orbit t^k + t^{k+1}, an unorientable one the
projective-plane factor smashed down by k-1, and a critical manifold its
own homology polynomial shifted by the normal index.  Unions add.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import PoincarePolynomial, homology
from .twisted import build_twisted, projective_plane_complex


class ConleyError(ValueError):
    pass


@dataclass(frozen=True)
class HyperbolicFixedPoint:
    index: int


@dataclass(frozen=True)
class PeriodicOrbit:
    index: int
    orientable: bool = True


@dataclass(frozen=True)
class CriticalManifold:
    index: int
    z_poincare: PoincarePolynomial
    label: str = ""


def _check_index(k):
    if k < 0:
        raise ConleyError("index must be nonnegative")


def _projective_plane_reduced_poly(field):
    """Reduced homology polynomial of the projective plane over the field,
    computed from its three-cell complex rather than hard-coded."""
    base = build_twisted(projective_plane_complex()).base
    coeff = "Q" if field == "Q" else int(field)
    betti = [b for b, _tor in homology(base, coeff)]
    betti[0] -= 1
    return PoincarePolynomial(betti)


def index_poincare(descriptor, field="Q"):
    """Poincare polynomial of one descriptor's index homology over Q or Z_p."""
    if isinstance(descriptor, HyperbolicFixedPoint):
        _check_index(descriptor.index)
        return PoincarePolynomial.monomial(descriptor.index)
    if isinstance(descriptor, PeriodicOrbit):
        _check_index(descriptor.index)
        k = descriptor.index
        if descriptor.orientable:
            return PoincarePolynomial.monomial(k) + PoincarePolynomial.monomial(k + 1)
        if k == 0:
            raise ConleyError(
                "an unorientable orbit needs index >= 1 (the smash shifts by k-1)"
            )
        factor = _projective_plane_reduced_poly(field) + PoincarePolynomial([1])
        return factor.shift(k - 1)
    if isinstance(descriptor, CriticalManifold):
        _check_index(descriptor.index)
        return descriptor.z_poincare.shift(descriptor.index)
    raise ConleyError("unknown descriptor %r" % (descriptor,))


def sum_index_poincare(descriptors, field="Q"):
    """Coefficientwise sum over a descriptor list (disjoint unions add)."""
    total = PoincarePolynomial()
    for d in descriptors:
        total = total + index_poincare(d, field)
    return total
