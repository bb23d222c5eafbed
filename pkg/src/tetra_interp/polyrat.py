"""Complex polynomial and rational-function arithmetic.

Polynomials are stored as ascending coefficient arrays.  All objects are
immutable after construction: the underlying arrays are flagged read-only.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import DegreeExceedsN, ZeroPolynomial

#: Coefficients below this fraction of the largest coefficient modulus are zero.
ZERO_THRESHOLD = 1e-12
#: Roots closer than this are treated as one root of higher multiplicity.
CLUSTER_RADIUS = 1e-6
#: A root counts as lying in the closed disc if its modulus is at most 1 + this.
ROOT_TOLERANCE = 1e-8
#: Roots whose modulus is this close to 1 are moved onto the circle.
CIRCLE_SNAP = 1e-8


def _as_complex_array(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex)).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coefficient")
    return arr


class ComplexPoly:
    """Polynomial with complex coefficients in ascending power order.

    Parameters
    ----------
    coeffs : array_like
        ``coeffs[i]`` multiplies ``lambda**i``.
    nominal_degree : int, optional
        The ``n`` of a "degree at most n" context.  Defaults to
        ``len(coeffs) - 1``.  It may exceed the exact degree but never fall
        below it.
    """

    __slots__ = ("coeffs", "nominal_degree", "__dict__")

    def __init__(self, coeffs, nominal_degree: int | None = None):
        arr = _as_complex_array(coeffs) if len(np.atleast_1d(coeffs)) else np.zeros(1, complex)
        arr = arr.copy()
        arr.flags.writeable = False
        self.coeffs = arr
        if nominal_degree is None:
            nominal_degree = max(len(arr) - 1, 0)
        self.nominal_degree = int(nominal_degree)
        if self.degree > self.nominal_degree:
            raise DegreeExceedsN(
                f"exact degree {self.degree} exceeds nominal degree {self.nominal_degree}"
            )

    @classmethod
    def from_roots(cls, roots, leading=1.0) -> ComplexPoly:
        coeffs = np.array([leading], dtype=complex)
        for r in np.atleast_1d(roots):
            coeffs = np.convolve(coeffs, [-r, 1.0])
        return cls(coeffs)

    @cached_property
    def degree(self) -> int | float:
        """Exact degree; ``-inf`` for the zero polynomial."""
        mags = np.abs(self.coeffs)
        top = mags.max()
        if top == 0.0:
            return -math.inf
        nz = np.nonzero(mags > ZERO_THRESHOLD * top)[0]
        return int(nz[-1])

    @property
    def is_zero(self) -> bool:
        return self.degree == -math.inf

    def trimmed(self) -> ComplexPoly:
        """Copy with coefficients above the exact degree dropped."""
        if self.is_zero:
            return ComplexPoly([0.0], 0)
        d = int(self.degree)
        return ComplexPoly(self.coeffs[: d + 1], d)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.coeffs)), dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __call__(self, lam):
        return evaluate(self, lam)

    def _coerce(self, other) -> ComplexPoly:
        if isinstance(other, ComplexPoly):
            return other
        return ComplexPoly([complex(other)], 0)

    def __add__(self, other):
        other = self._coerce(other)
        m = max(len(self.coeffs), len(other.coeffs))
        return ComplexPoly(
            self.padded(m)[:m] + other.padded(m)[:m],
            max(self.nominal_degree, other.nominal_degree),
        )

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self.coeffs, self.nominal_degree)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return ComplexPoly(
                np.convolve(self.coeffs, other.coeffs),
                self.nominal_degree + other.nominal_degree,
            )
        return ComplexPoly(self.coeffs * complex(other), self.nominal_degree)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ComplexPoly({np.array2string(self.coeffs, precision=6)}, n={self.nominal_degree})"


class RootCluster(NamedTuple):
    root: complex
    multiplicity: int


def evaluate(p: ComplexPoly, lam):
    """Horner evaluation of ``p`` at ``lam`` (scalar or array)."""
    lam_arr = np.asarray(lam, dtype=complex)
    acc = np.zeros_like(lam_arr)
    for c in p.coeffs[::-1]:
        acc = acc * lam_arr + c
    if acc.ndim == 0:
        return complex(acc)
    return acc


def tilde(p: ComplexPoly, n: int) -> ComplexPoly:
    """The involution ``lambda**n * conj(p(1/conj(lambda)))``.

    Coefficients are padded to length ``n + 1``, reversed and conjugated.
    """
    if p.degree > n:
        raise DegreeExceedsN(f"degree {p.degree} > n = {n}")
    coeffs = np.zeros(n + 1, dtype=complex)
    m = min(len(p.coeffs), n + 1)
    coeffs[:m] = p.coeffs[:m]
    return ComplexPoly(np.conj(coeffs[::-1]), n)


def derivative(p: ComplexPoly) -> ComplexPoly:
    if len(p.coeffs) <= 1:
        return ComplexPoly([0.0], 0)
    k = np.arange(1, len(p.coeffs))
    return ComplexPoly(p.coeffs[1:] * k, max(p.nominal_degree - 1, 0))


def _companion_roots(p: ComplexPoly) -> np.ndarray:
    q = p.trimmed()
    d = int(q.degree)
    if d == 0:
        return np.zeros(0, dtype=complex)
    c = q.coeffs / q.coeffs[-1]
    comp = np.zeros((d, d), dtype=complex)
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -c[:-1]
    return np.linalg.eigvals(comp)


def _cluster(points: np.ndarray, radius: float) -> list[RootCluster]:
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) < radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = [
        RootCluster(complex(points[idx].mean()), len(idx)) for idx in groups.values()
    ]
    clusters.sort(key=lambda c: (round(abs(c.root), 12), math.atan2(c.root.imag, c.root.real)))
    return clusters


def all_roots(p: ComplexPoly, cluster_radius: float = CLUSTER_RADIUS) -> list[RootCluster]:
    """Every root of ``p`` in the plane, clustered into multiplicities."""
    if p.is_zero:
        raise ZeroPolynomial("the zero polynomial has no isolated roots")
    return _cluster(_companion_roots(p), cluster_radius)


def roots_in_closed_disc(
    p: ComplexPoly,
    root_tolerance: float = ROOT_TOLERANCE,
    cluster_radius: float = CLUSTER_RADIUS,
) -> list[RootCluster]:
    """Roots of ``p`` with modulus at most ``1 + root_tolerance``.

    Clustering happens before the disc filter, so a double root on the
    circle that splits numerically into one root inside and one root outside
    is still reported once with multiplicity two.
    """
    out = []
    for root, mult in all_roots(p, cluster_radius):
        r = abs(root)
        if abs(r - 1.0) < CIRCLE_SNAP:
            root = root / r
            r = 1.0
        if r <= 1.0 + root_tolerance:
            out.append(RootCluster(root, mult))
    return out


def _deflate(p: ComplexPoly, root: complex) -> ComplexPoly:
    quotient, _ = np.polynomial.polynomial.polydiv(p.coeffs, np.array([-root, 1.0]))
    return ComplexPoly(quotient)


class RationalFn:
    """Quotient ``num / den`` of two complex polynomials."""

    __slots__ = ("num", "den", "__dict__")

    def __init__(self, num: ComplexPoly, den: ComplexPoly):
        if not isinstance(num, ComplexPoly):
            num = ComplexPoly(num)
        if not isinstance(den, ComplexPoly):
            den = ComplexPoly(den)
        if den.is_zero:
            raise ZeroPolynomial("denominator is the zero polynomial")
        self.num = num
        self.den = den

    def __call__(self, lam):
        return evaluate(self.num, lam) / evaluate(self.den, lam)

    def derivative_at(self, lam):
        n0, d0 = evaluate(self.num, lam), evaluate(self.den, lam)
        n1, d1 = evaluate(derivative(self.num), lam), evaluate(derivative(self.den), lam)
        return (n1 * d0 - n0 * d1) / (d0 * d0)

    @property
    def degree(self) -> int:
        """``max(deg num, deg den)`` of the stored (not necessarily reduced) pair."""
        return int(max(self.num.degree, self.den.degree, 0))

    @cached_property
    def disc_regular(self) -> bool:
        """True when the denominator has no root in the closed disc."""
        return not roots_in_closed_disc(self.den)

    def __mul__(self, other: RationalFn) -> RationalFn:
        return RationalFn(self.num * other.num, self.den * other.den)

    def __repr__(self):
        return f"RationalFn(num={self.num!r}, den={self.den!r})"


def reduce(f: RationalFn, cluster_radius: float = CLUSTER_RADIUS) -> RationalFn:
    """Cancel common roots of numerator and denominator.

    Roots of the two polynomials closer than ``cluster_radius`` are treated
    as common; each cancelled pair is divided out at its midpoint.
    """
    num, den = f.num.trimmed(), f.den.trimmed()
    if num.is_zero:
        return RationalFn(ComplexPoly([0.0]), ComplexPoly([1.0]))
    if num.degree == 0 or den.degree == 0:
        return RationalFn(num, den)

    num_roots = [[c.root, c.multiplicity] for c in all_roots(num, cluster_radius)]
    den_roots = [[c.root, c.multiplicity] for c in all_roots(den, cluster_radius)]
    pairs = sorted(
        (abs(a[0] - b[0]), i, j)
        for i, a in enumerate(num_roots)
        for j, b in enumerate(den_roots)
        if abs(a[0] - b[0]) < cluster_radius
    )
    for _, i, j in pairs:
        count = min(num_roots[i][1], den_roots[j][1])
        if count == 0:
            continue
        mid = 0.5 * (num_roots[i][0] + den_roots[j][0])
        for _ in range(count):
            num = _deflate(num, mid)
            den = _deflate(den, mid)
        num_roots[i][1] -= count
        den_roots[j][1] -= count
    return RationalFn(num.trimmed(), den.trimmed())


def reduced_degree(f: RationalFn) -> int:
    return reduce(f).degree
