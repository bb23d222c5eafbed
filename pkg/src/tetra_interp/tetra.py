"""Tetrablock geometry: membership, distinguished boundary, the functionals
Psi_omega and Upsilon_omega, and phasar derivatives of rational functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateOmega,
    NotInClosure,
    NotUnimodularAt,
    PolePoint,
    RoyalPoint,
    ZeroAt,
)
from .polyrat import ComplexPoly, RationalFn, reduce

MEMBERSHIP_TOL = 1e-9
BOUNDARY_TOL = 1e-8
POLE_TOL = 1e-12
ROYAL_TOL = 1e-10
UNIMODULAR_TOL = 1e-8
INNER_AT_TOL = 1e-6


@dataclass(frozen=True)
class TetraPoint:
    x1: complex
    x2: complex
    x3: complex

    @classmethod
    def of(cls, p) -> TetraPoint:
        if isinstance(p, TetraPoint):
            return p
        x1, x2, x3 = p
        return cls(complex(x1), complex(x2), complex(x3))

    def swapped(self) -> TetraPoint:
        """The point with ``x1`` and ``x2`` exchanged."""
        return TetraPoint(self.x2, self.x1, self.x3)


class Membership(NamedTuple):
    inside: bool
    slack: float

    def __bool__(self):
        return self.inside


class BoundaryCheck(NamedTuple):
    on_boundary: bool
    coupling_deviation: float
    modulus_deviation: float
    x2_modulus: float

    def __bool__(self):
        return self.on_boundary


class PhasarValue(NamedTuple):
    """Phasar derivative at a unimodular point.

    ``imag_residual`` is the size of the imaginary part discarded from
    ``z f'(z) / f(z)``; it is small whenever ``f`` is inner near ``z``.
    """

    value: float
    imag_residual: float


class ComposeResult(NamedTuple):
    """Reduced composition, its pre-reduction degree and the unreduced quotient."""

    fn: RationalFn
    degree_before: int
    raw: RationalFn

    @property
    def cancellations(self) -> int:
        return self.degree_before - self.fn.degree


def closure_lhs(p: TetraPoint) -> float:
    x1, x2, x3 = p.x1, p.x2, p.x3
    return abs(x1) ** 2 - abs(x2) ** 2 + abs(x3) ** 2 + 2 * abs(x2 - np.conj(x1) * x3)


def in_tetrablock_closure(p, tol: float = MEMBERSHIP_TOL) -> Membership:
    """Closed-tetrablock test.

    Returns ``Membership(inside, slack)`` where ``slack = 1 - LHS`` of the
    scalar criterion.  The point is inside when ``LHS <= 1 + tol`` and
    ``|x2| <= 1 + tol``.
    """
    p = TetraPoint.of(p)
    lhs = closure_lhs(p)
    inside = lhs <= 1 + tol and abs(p.x2) <= 1 + tol
    return Membership(bool(inside), float(1 - lhs))


def on_distinguished_boundary(p, tol: float = BOUNDARY_TOL) -> BoundaryCheck:
    p = TetraPoint.of(p)
    coupling = abs(p.x1 - np.conj(p.x2) * p.x3)
    modulus = abs(abs(p.x3) - 1)
    ok = coupling < tol and modulus < tol and abs(p.x2) <= 1 + MEMBERSHIP_TOL
    return BoundaryCheck(bool(ok), float(coupling), float(modulus), float(abs(p.x2)))


def psi(omega: complex, p) -> complex:
    """``(x3*omega - x1) / (x2*omega - 1)``."""
    p = TetraPoint.of(p)
    den = p.x2 * omega - 1
    if abs(den) <= POLE_TOL:
        raise PolePoint(f"x2*omega = 1 at omega={omega}")
    return (p.x3 * omega - p.x1) / den


def upsilon(omega: complex, p) -> complex:
    """``(x3*omega - x2) / (x1*omega - 1)``."""
    p = TetraPoint.of(p)
    den = p.x1 * omega - 1
    if abs(den) <= POLE_TOL:
        raise PolePoint(f"x1*omega = 1 at omega={omega}")
    return (p.x3 * omega - p.x2) / den


def psi_unimodularity_check(omega: complex, p) -> bool:
    """Decide ``|psi(omega, p)| = 1`` through the algebraic identity.

    The test compares ``2 omega (x2 - conj(x1) x3)`` against
    ``1 - |x1|^2 + |x2|^2 - |x3|^2``; it needs ``p`` in the closed tetrablock
    and off the royal variety.
    """
    p = TetraPoint.of(p)
    if not in_tetrablock_closure(p):
        raise NotInClosure(f"{p} is not in the closed tetrablock")
    if abs(p.x1 * p.x2 - p.x3) <= ROYAL_TOL:
        raise RoyalPoint(f"{p} lies on the royal variety")
    lhs = 2 * omega * (p.x2 - np.conj(p.x1) * p.x3)
    rhs = 1 - abs(p.x1) ** 2 + abs(p.x2) ** 2 - abs(p.x3) ** 2
    return bool(abs(lhs - rhs) < UNIMODULAR_TOL)


def _shared_parts(x) -> tuple[ComplexPoly, ComplexPoly, ComplexPoly, ComplexPoly]:
    x1, x2, x3 = x
    den = x1.den
    for other in (x2.den, x3.den):
        m = max(len(den.coeffs), len(other.coeffs))
        if not np.allclose(den.padded(m), other.padded(m), rtol=1e-12, atol=1e-14):
            raise ValueError("components must share one denominator")
    return x1.num, x2.num, x3.num, den


def _compose(omega, top, first, mid, den) -> ComposeResult:
    num = omega * top - first
    den_out = omega * mid - den
    if den_out.is_zero:
        raise DegenerateOmega(f"denominator vanishes identically at omega={omega}")
    raw = RationalFn(num, den_out)
    return ComposeResult(reduce(raw), raw.degree, raw)


def psi_compose(omega: complex, x) -> ComposeResult:
    """``Psi_omega`` composed with a triple sharing one denominator.

    Returns the reduced rational function together with the degree of the
    unreduced quotient ``(omega N3 - N1) / (omega N2 - D)``.
    """
    n1, n2, n3, den = _shared_parts(x)
    return _compose(omega, n3, n1, n2, den)


def upsilon_compose(omega: complex, x) -> ComposeResult:
    n1, n2, n3, den = _shared_parts(x)
    return _compose(omega, n3, n2, n1, den)


def phasar(f: RationalFn, z: complex, tol: float = INNER_AT_TOL) -> PhasarValue:
    """Phasar derivative ``Re(z f'(z) / f(z))`` of ``f`` at a unimodular ``z``."""
    if abs(abs(z) - 1) > 1e-9:
        raise NotUnimodularAt(f"|z| = {abs(z)} is not 1")
    fz = f(z)
    if abs(fz) < 1e-14:
        raise ZeroAt(f"f vanishes at z={z}")
    if abs(abs(fz) - 1) > tol:
        raise NotUnimodularAt(f"|f(z)| = {abs(fz)} at z={z}")
    q = z * f.derivative_at(z) / fz
    return PhasarValue(float(q.real), float(abs(q.imag)))
