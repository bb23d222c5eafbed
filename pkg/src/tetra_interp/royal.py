"""The royal tetra-interpolation problem.

Given royal data (nodes ``sigma``, first-coordinate values ``eta``,
second-coordinate values ``eta_tilde`` and circle phasar bounds ``rho``) the
pipeline builds the Blaschke parametrization for ``(sigma, eta, rho)``,
searches for a center point ``(x1c, x2c, x3c)`` on the distinguished boundary
and assembles

    x1 = (x1c a + b) / D,  x2 = (x3c c + x2c d) / D,  x3 = (x2c b + x3c a) / D

with ``D = x1c c + d``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .blaschke import (
    BlaschkeData,
    Parametrization,
    as_complex_vector,
    build_parametrization,
    choose_tau,
    circle_grid,
    validate_data,
    verify_blaschke_solution,
)
from .errors import (
    DenominatorVanishes,
    ExceptionalGeometry,
    InvalidData,
    NotSolvable,
    NotUnimodularAt,
    NumericalDegeneracy,
    PoleOmega,
    RepresentationMismatch,
    RoyalVariety,
    TetraInterpError,
    ZeroAt,
)
from .polyrat import (
    CIRCLE_SNAP,
    CLUSTER_RADIUS,
    ROOT_TOLERANCE,
    ComplexPoly,
    RationalFn,
    RootCluster,
    all_roots,
    derivative,
    reduce,
    roots_in_closed_disc,
    tilde,
)
from .tetra import phasar, psi_compose, upsilon_compose

GOLDEN = (math.sqrt(5) - 1) / 2
#: Window within which two simple zeros may be a split double zero on the circle.
PAIR_WINDOW = 1e-2
#: Random omegas in verification keep this distance from the cancellation angles,
#: near which a zero-pole pair of the composition falls inside the clustering radius.
OMEGA_AVOID = 1e-2


@dataclass(frozen=True)
class Tolerances:
    """Named numerical tolerances; every field may be overridden."""

    residual: float = 1e-8
    interior_margin: float = 1e-10
    preferred_margin: float = 0.1
    tie_floor: float = 1e-12
    theta: float = 1e-12
    geometry: float = 1e-12
    anchor: float = 1e-10
    interpolation: float = 1e-8
    phasar: float = 1e-6
    boundary: float = 1e-8
    membership: float = 1e-9
    node_match: float = 1e-6
    inner: float = 1e-8
    representation: float = 1e-9

    def replace(self, **overrides) -> Tolerances:
        unknown = set(overrides) - set(asdict(self))
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        bad = [k for k, v in overrides.items() if not v > 0]
        if bad:
            raise ValueError(f"tolerances must be positive: {', '.join(bad)}")
        return Tolerances(**{**asdict(self), **{k: float(v) for k, v in overrides.items()}})


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class RoyalData:
    base: BlaschkeData
    eta_tilde: np.ndarray

    def __post_init__(self):
        arr = np.array(self.eta_tilde, dtype=complex)
        arr.flags.writeable = False
        object.__setattr__(self, "eta_tilde", arr)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def k(self) -> int:
        return self.base.k


def validate_royal_data(raw) -> RoyalData:
    """Validate the Blaschke part and the ``eta_tilde`` moduli.

    Raises
    ------
    InvalidData
    """
    if isinstance(raw, RoyalData):
        base, eta_t = validate_data(raw.base), raw.eta_tilde
    elif isinstance(raw, Mapping):
        base = validate_data(raw)
        if "eta_tilde" not in raw:
            raise InvalidData("missing field 'eta_tilde'")
        eta_t = as_complex_vector(raw["eta_tilde"], "eta_tilde")
    else:
        raise InvalidData(f"unsupported data object {type(raw).__name__}")
    if len(eta_t) != base.n:
        raise InvalidData(f"eta_tilde has {len(eta_t)} entries, expected n = {base.n}")
    for j, e in enumerate(np.abs(eta_t)):
        if j < base.k and abs(e - 1) > 1e-12:
            raise InvalidData(f"eta_tilde[{j}]: |eta_tilde| = {e!r} != 1 at a circle node")
        if j >= base.k and e >= 1 - 1e-12:
            raise InvalidData(f"eta_tilde[{j}]: |eta_tilde| = {e!r} not < 1 at a disc node")
    return RoyalData(base, eta_t)


@dataclass(frozen=True)
class CenterPoint:
    x1c: complex
    x2c: complex
    x3c: complex
    omega_angle: float
    residual: float

    @classmethod
    def from_x2(cls, x2c: complex, theta: float, residual: float = 0.0) -> CenterPoint:
        omega = complex(np.exp(1j * theta))
        return cls(complex(np.conj(x2c) * omega), complex(x2c), omega, float(theta), residual)

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.x1c, self.x2c, self.x3c)


class _Candidate(NamedTuple):
    theta: float
    x2c: complex
    residual: float
    margin: float
    min_den: float


class _NodeValues(NamedTuple):
    c: np.ndarray
    d: np.ndarray
    eta_t: np.ndarray


def _lsq_batch(nv: _NodeValues, thetas: np.ndarray):
    """Least-squares ``x2c`` and residual norms for a batch of angles.

    Per node the constraint ``x2c d - conj(x2c) q = eta_t d - omega c`` with
    ``q = eta_t omega c`` is real-linear in ``(Re x2c, Im x2c)``.
    """
    omega = np.exp(1j * thetas)[:, None]
    q = nv.eta_t * omega * nv.c
    d = np.broadcast_to(nv.d, q.shape)
    col_u, col_v = d - q, 1j * (d + q)
    rhs = nv.eta_t * d - omega * nv.c
    A = np.concatenate(
        [np.stack([col_u.real, col_v.real], -1), np.stack([col_u.imag, col_v.imag], -1)], 1
    )
    bvec = np.concatenate([rhs.real, rhs.imag], 1)
    sol = np.einsum("tij,tj->ti", np.linalg.pinv(A, rcond=1e-12), bvec)
    res = np.linalg.norm(np.einsum("tij,tj->ti", A, sol) - bvec, axis=1)
    return sol[:, 0] + 1j * sol[:, 1], res


def _interp_residual(nv: _NodeValues, theta: float, x2c: complex) -> tuple[float, float]:
    """``max_j |x2(sigma_j) - eta_t_j|`` and the smallest node denominator."""
    omega = np.exp(1j * theta)
    x1c = np.conj(x2c) * omega
    den = x1c * nv.c + nv.d
    min_den = float(np.abs(den).min())
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (omega * nv.c + x2c * nv.d) / den
    err = np.abs(vals - nv.eta_t)
    return (float(err.max()) if np.all(np.isfinite(err)) else np.inf), min_den


def _candidate(nv: _NodeValues, theta: float, x2c: complex) -> _Candidate:
    theta = float(np.mod(theta, 2 * np.pi))
    res, min_den = _interp_residual(nv, theta, x2c)
    return _Candidate(theta, complex(x2c), res, 1 - abs(x2c), min_den)


def _golden(f, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _node_values(data: RoyalData, par: Parametrization) -> _NodeValues:
    s = data.base.sigma
    return _NodeValues(par.c(s), par.d(s), np.asarray(data.eta_tilde))


def _grid_scan(nv: _NodeValues, n_omega: int):
    thetas = 2 * np.pi * np.arange(n_omega) / n_omega
    x2, res = _lsq_batch(nv, thetas)
    return thetas, x2, res


def _refine(nv: _NodeValues, thetas, res, n_omega: int, tol: Tolerances, n_minima: int = 8):
    """Golden-section refinement around the lowest local minima of the grid residual."""
    left, right = np.roll(res, 1), np.roll(res, -1)
    minima = np.nonzero((res <= left) & (res <= right))[0]
    minima = minima[np.argsort(res[minima], kind="stable")][:n_minima]
    step = 2 * np.pi / n_omega

    def objective(t):
        return float(_lsq_batch(nv, np.array([t]))[1][0])

    out = []
    for i in minima:
        t = _golden(objective, thetas[i] - 2 * step, thetas[i] + 2 * step, tol.theta)
        x2 = _lsq_batch(nv, np.array([t]))[0][0]
        out.append(_candidate(nv, t, x2))
    return out


def _accepted(cand: _Candidate, tol: Tolerances) -> bool:
    return (
        cand.residual <= tol.residual
        and cand.margin >= tol.interior_margin
        and cand.min_den >= tol.geometry
    )


def solve_center(
    data: RoyalData,
    par: Parametrization,
    n_omega: int = 4096,
    omega: complex | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> CenterPoint:
    """Search for a center point on the distinguished boundary.

    For each angle ``theta`` of a uniform grid, ``x3c = exp(i theta)`` and
    ``x1c = conj(x2c) x3c`` reduce the node conditions to a real least-squares
    problem in ``x2c``.  The lowest grid minima are refined by golden-section
    search.  Among accepted candidates those with interior margin at least
    ``tol.preferred_margin`` are preferred; the winner has the smallest
    residual (values below ``tol.tie_floor`` tie), then the smallest angle.

    Parameters
    ----------
    omega : complex, optional
        Restrict the search to this single value of ``x3c``.

    Raises
    ------
    NotSolvable
        No accepted candidate at this resolution.
    ExceptionalGeometry
        Candidates meeting the residual and margin tests exist but all have a
        vanishing denominator at some node.
    """
    nv = _node_values(data, par)
    if omega is not None:
        theta = float(np.mod(np.angle(omega), 2 * np.pi))
        x2, _ = _lsq_batch(nv, np.array([theta]))
        cands = [_candidate(nv, theta, x2[0])]
    else:
        thetas, x2, res = _grid_scan(nv, n_omega)
        cands = [_candidate(nv, t, z) for t, z in zip(thetas, x2)]
        cands += _refine(nv, thetas, res, n_omega, tol)

    ok = [c for c in cands if _accepted(c, tol)]
    if not ok:
        geometric = [
            c
            for c in cands
            if c.residual <= tol.residual and c.margin >= tol.interior_margin
        ]
        near = [c for c in cands if c.margin >= tol.interior_margin] or cands
        best = min(near, key=lambda c: (c.residual, c.theta))
        if geometric or (best.min_den < tol.geometry and best.margin >= tol.interior_margin):
            raise ExceptionalGeometry(
                f"node denominator {best.min_den:.3e} below {tol.geometry:g} "
                f"at theta={best.theta:.17g}"
            )
        raise NotSolvable(
            f"no center found at resolution n_omega={n_omega}: best residual "
            f"{best.residual:.3e} at theta={best.theta:.17g} (not found at this "
            "resolution; existence is not excluded)",
            best_residual=best.residual,
            best_angle=best.theta,
        )
    preferred = [c for c in ok if c.margin >= tol.preferred_margin] or ok
    best = min(preferred, key=lambda c: (max(c.residual, tol.tie_floor), c.theta))
    return CenterPoint.from_x2(best.x2c, best.theta, best.residual)


def accepted_omega_intervals(
    data: RoyalData,
    par: Parametrization,
    n_omega: int = 4096,
    tol: Tolerances = DEFAULT_TOL,
) -> list[tuple[float, float]]:
    """Maximal runs of grid angles whose least-squares center is accepted.

    Runs are returned as ``(theta_start, theta_end)`` pairs; a run that wraps
    past ``2 pi`` has ``theta_end < theta_start``.
    """
    nv = _node_values(data, par)
    thetas, x2, _ = _grid_scan(nv, n_omega)
    flags = np.array([_accepted(_candidate(nv, t, z), tol) for t, z in zip(thetas, x2)])
    if flags.all():
        return [(0.0, float(thetas[-1]))]
    if not flags.any():
        return []
    start = int(np.argmin(flags))  # rotate so the scan starts on a rejected angle
    order = np.roll(np.arange(n_omega), -start)
    runs, current = [], None
    for i in order:
        if flags[i] and current is None:
            current = [i, i]
        elif flags[i]:
            current[1] = i
        elif current is not None:
            runs.append(current)
            current = None
    if current is not None:
        runs.append(current)
    return [(float(thetas[a]), float(thetas[b])) for a, b in runs]


@dataclass(frozen=True, eq=False)
class TetraInnerFn:
    """Rational map ``(x1, x2, x3)`` with one shared denominator."""

    x1: RationalFn
    x2: RationalFn
    x3: RationalFn
    center: CenterPoint
    par: Parametrization
    degree: int
    anchor_deviation: float = 0.0

    @property
    def components(self) -> tuple[RationalFn, RationalFn, RationalFn]:
        return (self.x1, self.x2, self.x3)

    @property
    def n(self) -> int:
        return self.par.n

    def __call__(self, lam):
        return tuple(f(lam) for f in self.components)


def assemble(par: Parametrization, center: CenterPoint, tol: Tolerances = DEFAULT_TOL) -> TetraInnerFn:
    """Build ``x`` from the parametrization and a center point.

    Raises
    ------
    DenominatorVanishes
        If ``x1c c + d`` has a root in the closed disc.
    """
    x1c, x2c, x3c = center.as_tuple()
    D = x1c * par.c + par.d
    if D.is_zero or roots_in_closed_disc(D):
        raise DenominatorVanishes("x1c c + d vanishes in the closed disc")
    E1 = x1c * par.a + par.b
    E2 = x3c * par.c + x2c * par.d
    N3 = x2c * par.b + x3c * par.a
    x1, x2, x3 = RationalFn(E1, D), RationalFn(E2, D), RationalFn(N3, D)
    anchor = max(abs(f(par.tau) - v) for f, v in zip((x1, x2, x3), center.as_tuple()))
    return TetraInnerFn(x1, x2, x3, center, par, reduce(x3).degree, float(anchor))


def degree_of(x: TetraInnerFn) -> int:
    """Degree of the reduced third component."""
    return reduce(x.x3).degree


def _common_factor_strip(polys: list[ComplexPoly]) -> tuple[list[ComplexPoly], int]:
    """Divide out roots shared by every polynomial in ``polys``."""
    removed = 0
    base = polys[-1].trimmed()
    if base.degree < 1:
        return polys, 0
    for root, mult in all_roots(base):
        for _ in range(mult):
            vals = [abs(p(root)) for p in polys]
            scales = [max(np.abs(p.coeffs).max(), 1e-300) for p in polys]
            if all(v <= CLUSTER_RADIUS * s for v, s in zip(vals, scales)):
                polys = [
                    ComplexPoly(np.polynomial.polynomial.polydiv(p.coeffs, [-root, 1.0])[0])
                    for p in polys
                ]
                removed += 1
    return polys, removed


def royal_polynomial(x: TetraInnerFn, tol: Tolerances = DEFAULT_TOL) -> ComplexPoly:
    """``R = D D~ - E1 E2`` after scaling so that ``x3 = D~ / D`` holds exactly.

    With ``N3 = u D~`` for a unimodular constant ``u``, this equals
    ``conj(u) (D N3 - E1 E2)``.

    Raises
    ------
    RepresentationMismatch
        If the numerator of ``x3`` is not a unimodular multiple of ``D~``,
        even after removing factors common to all four polynomials.
    """
    n = x.par.n
    E1, E2, N3, D = x.x1.num, x.x2.num, x.x3.num, x.x1.den
    for attempt in range(2):
        u = _tilde_ratio(D, N3, n, tol)
        if u is not None:
            break
        if attempt == 0:
            (E1, E2, N3, D), removed = _common_factor_strip([E1, E2, N3, D])
            if removed == 0:
                u = None
                break
            n -= removed
    if u is None:
        raise RepresentationMismatch("numerator of x3 is not a unimodular multiple of tilde(D)")
    R = (D * N3 - E1 * E2) * np.conj(u)
    return ComplexPoly(R.padded(2 * n + 1)[: 2 * n + 1], 2 * n)


def _tilde_ratio(D: ComplexPoly, N3: ComplexPoly, n: int, tol: Tolerances):
    try:
        Dt = tilde(D, n)
    except TetraInterpError:
        return None
    m = n + 1
    dt, n3 = Dt.padded(m), N3.padded(m)
    if len(n3) > m and np.abs(n3[m:]).max() > tol.representation * np.abs(n3).max():
        return None
    n3 = n3[:m]
    u = np.vdot(dt, n3) / np.vdot(dt, dt)
    scale = np.abs(n3).max()
    if abs(abs(u) - 1) > tol.representation * 10 or np.abs(n3 - u * dt).max() > tol.representation * scale:
        return None
    return u / abs(u)


@dataclass(frozen=True)
class RoyalNode:
    location: complex
    value_eta: complex
    value_eta_tilde: complex
    multiplicity: int
    on_circle: bool


class NodeCatalogue(NamedTuple):
    nodes: list
    type: tuple[int, int]


def _is_zero_royal(R: ComplexPoly, x: TetraInnerFn) -> bool:
    scale = (
        np.abs(x.x1.den.coeffs).max() * np.abs(x.x3.num.coeffs).max()
        + np.abs(x.x1.num.coeffs).max() * np.abs(x.x2.num.coeffs).max()
    )
    return R.is_zero or np.abs(R.coeffs).max() <= 1e-10 * scale


def _royal_residual(x: TetraInnerFn, z: complex) -> float:
    """``|D N3 - E1 E2|`` at ``z`` relative to the size of the two products."""
    a = x.x1.den(z) * x.x3.num(z)
    b = x.x1.num(z) * x.x2.num(z)
    return float(abs(a - b) / max(abs(a) + abs(b), 1e-300))


def _circle_double_roots(R: ComplexPoly, clusters: list, relative_residual) -> list:
    """Merge near-mirror pairs ``r, 1/conj(r)`` straddling the circle into double circle roots.

    A double zero on the circle can split numerically into two simple zeros
    further apart than the clustering radius, roughly mirrored in the circle.
    Newton's method on ``R'`` from the pair midpoint recovers the double zero;
    its position is only determined to about the square root of the
    coefficient noise, and the error is mostly radial.  The certificate is
    therefore ``relative_residual(z) <= 1e-10`` at the polished point, which
    a genuine pair of simple zeros at distance ``delta`` from the circle
    fails once ``delta**2`` exceeds that level.  Accepted points are
    projected onto the circle.
    """
    dR = derivative(R)
    d2R = derivative(dR)
    out = list(clusters)
    merged = True
    while merged:
        merged = False
        simple = [i for i, c in enumerate(out) if c.multiplicity == 1 and abs(abs(c.root) - 1) < PAIR_WINDOW]
        for a in simple:
            for b in simple:
                if b <= a:
                    continue
                r1, r2 = out[a].root, out[b].root
                if abs(r1 - r2) > PAIR_WINDOW or abs(r2 - 1 / np.conj(r1)) > PAIR_WINDOW:
                    continue
                z = 0.5 * (r1 + r2)
                for _ in range(20):
                    h = d2R(z)
                    if h == 0:
                        break
                    step = dR(z) / h
                    z -= step
                    if abs(step) < 1e-16:
                        break
                if abs(abs(z) - 1) < PAIR_WINDOW and relative_residual(z) <= 1e-10:
                    out = [c for i, c in enumerate(out) if i not in (a, b)]
                    out.append(RootCluster(complex(z / abs(z)), 2))
                    merged = True
                    break
            if merged:
                break
    return out


def royal_nodes(x: TetraInnerFn, tol: Tolerances = DEFAULT_TOL) -> NodeCatalogue:
    """Zeros of the royal polynomial in the closed disc and the type ``(n, k)``.

    Circle zeros have even order; their node multiplicity is half the order.
    Values are read off ``x1`` and ``x2`` at each node.

    Raises
    ------
    RoyalVariety
        If the royal polynomial vanishes identically.
    NumericalDegeneracy
        If a circle zero has odd order.
    """
    R = royal_polynomial(x, tol)
    if _is_zero_royal(R, x):
        raise RoyalVariety("royal polynomial vanishes identically")
    nodes = []
    for root, order in _circle_double_roots(R, all_roots(R), lambda z: _royal_residual(x, z)):
        r = abs(root)
        on_circle = abs(r - 1) < CIRCLE_SNAP
        if on_circle:
            root = root / r
        elif r > 1 + ROOT_TOLERANCE:
            continue
        if on_circle and order % 2:
            raise NumericalDegeneracy(f"circle zero at {root} has odd order {order}")
        mult = order // 2 if on_circle else order
        nodes.append(RoyalNode(root, complex(x.x1(root)), complex(x.x2(root)), mult, on_circle))
    nodes.sort(key=lambda nd: (not nd.on_circle, np.angle(nd.location), abs(nd.location)))
    total = sum(nd.multiplicity for nd in nodes)
    circle = sum(nd.multiplicity for nd in nodes if nd.on_circle)
    return NodeCatalogue(nodes, (total, circle))


def closed_form_center(eta: complex, eta_t: complex, omega: complex) -> CenterPoint:
    """Explicit degree-one center for one interior node at the origin."""
    num = (omega * np.conj(eta_t) + eta) - (np.conj(omega) * eta_t + np.conj(eta)) * omega * np.conj(eta_t) * eta
    x1c = num / (1 - abs(eta_t * eta) ** 2)
    x2c = omega * np.conj(x1c)
    return CenterPoint(complex(x1c), complex(x2c), complex(omega), float(np.mod(np.angle(omega), 2 * np.pi)), 0.0)


def closed_form_parametrization(eta: complex, tau: complex = 1.0) -> Parametrization:
    """Explicit normalized quadruple for the single node ``sigma = 0``."""
    tb = np.conj(tau)
    s = 1 - abs(eta) ** 2
    a = ComplexPoly([-abs(eta) ** 2 / s, tb / s], 1)
    b = ComplexPoly([eta / s, -eta * tb / s], 1)
    c = ComplexPoly([-np.conj(eta) / s, np.conj(eta) * tb / s], 1)
    d = ComplexPoly([1 / s, -abs(eta) ** 2 * tb / s], 1)
    return Parametrization(a, b, c, d, complex(tau))


def closed_form_degree1(eta: complex, eta_t: complex, omega: complex) -> TetraInnerFn:
    """Degree-one tetra-inner function with ``x(0) = (eta, eta_t, eta eta_t)``.

    Built from closed-form expressions (base point ``tau = 1``), independently
    of the Pick-matrix solver and the center search.
    """
    if not (abs(eta) < 1 and abs(eta_t) < 1 and abs(abs(omega) - 1) < 1e-12):
        raise InvalidData("need |eta| < 1, |eta_tilde| < 1 and |omega| = 1")
    return assemble(closed_form_parametrization(eta), closed_form_center(eta, eta_t, omega))


def zeta_of_omega(center: CenterPoint, omega: complex) -> complex:
    """``(omega x3c - x1c) / (x2c omega - 1)``.

    Raises
    ------
    PoleOmega
    """
    den = center.x2c * omega - 1
    if abs(den) <= 1e-12:
        raise PoleOmega(f"x2c * omega = 1 at omega={omega}")
    return (omega * center.x3c - center.x1c) / den


def solve_royal(
    raw,
    seed: int = 0,
    n_omega: int = 4096,
    tol: Tolerances = DEFAULT_TOL,
    tau: complex | None = None,
    omega: complex | None = None,
) -> TetraInnerFn:
    """Run the whole pipeline: validate, choose ``tau``, parametrize, search, assemble."""
    data = validate_royal_data(raw)
    if tau is None:
        tau = choose_tau(data.base, seed=seed)
    par = build_parametrization(data.base, tau)
    center = solve_center(data, par, n_omega=n_omega, omega=omega, tol=tol)
    return assemble(par, center, tol)


@dataclass
class Clause:
    passed: bool
    value: float
    detail: str = ""


@dataclass
class TetraReport:
    clauses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "clauses": {
                name: {"pass": c.passed, "value": c.value, "detail": c.detail}
                for name, c in self.clauses.items()
            },
        }


def _safe_phasar(f: RationalFn, z: complex) -> float:
    try:
        return phasar(f, z).value
    except (NotUnimodularAt, ZeroAt):
        return np.nan


def _dev(a: float, b: float) -> float:
    d = abs(a - b)
    return float(d) if np.isfinite(d) else np.inf


def verify_tetra_inner(
    x: TetraInnerFn,
    data,
    tol: Tolerances = DEFAULT_TOL,
    circle_points: int = 2048,
    disc_points: int = 64,
    n_random_omega: int = 8,
    seed: int = 0,
) -> TetraReport:
    """Certify every claimed property of ``x`` against royal data.

    Clauses: interpolation, phasar, boundary, membership, nodes, degree,
    psi_consistency and phasar_transfer.  Clauses with nothing to check pass
    vacuously and say so in their detail string.
    """
    data = validate_royal_data(data)
    base = data.base
    sigma, n, k = base.sigma, base.n, base.k
    report = TetraReport()
    cl = report.clauses

    with np.errstate(divide="ignore", invalid="ignore"):
        v1, v2, v3 = x(sigma)
        targets = (base.eta, data.eta_tilde, base.eta * data.eta_tilde)
        dev = max(float(np.nan_to_num(np.abs(v - t), nan=np.inf).max()) for v, t in zip((v1, v2, v3), targets))
    cl["interpolation"] = Clause(dev <= tol.interpolation, dev)

    ax1 = [_safe_phasar(x.x1, sigma[j]) for j in range(k)]
    ph = max((_dev(ax1[j], base.rho[j]) for j in range(k)), default=0.0)
    cl["phasar"] = Clause(ph <= tol.phasar, ph, "" if k else "no circle nodes")

    zs = circle_grid(circle_points)
    with np.errstate(divide="ignore", invalid="ignore"):
        b1, b2, b3 = x(zs)
        mod = float(np.nan_to_num(np.abs(np.abs(b3) - 1), nan=np.inf).max())
        coup = float(np.nan_to_num(np.abs(b1 - np.conj(b2) * b3), nan=np.inf).max())
    cl["boundary"] = Clause(
        mod < tol.boundary and coup < tol.boundary,
        max(mod, coup),
        f"max ||x3|-1| = {mod:.3e}, max |x1 - conj(x2) x3| = {coup:.3e}",
    )

    r = np.linspace(0.0, 1.0, disc_points)
    th = 2 * np.pi * np.arange(disc_points) / disc_points
    pts = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        p1, p2, p3 = x(pts)
        lhs = np.abs(p1) ** 2 - np.abs(p2) ** 2 + np.abs(p3) ** 2 + 2 * np.abs(p2 - np.conj(p1) * p3)
        slack = float(np.nan_to_num(1 - lhs, nan=-np.inf).min())
        x2max = float(np.nan_to_num(np.abs(p2), nan=np.inf).max())
    cl["membership"] = Clause(
        slack >= -tol.membership and x2max <= 1 + tol.membership,
        slack,
        f"min slack {slack:.3e}, max |x2| {x2max:.12g}",
    )

    try:
        cat = royal_nodes(x, tol)
        unmatched = 0
        worst = 0.0
        for j, s in enumerate(sigma):
            dists = [abs(nd.location - s) for nd in cat.nodes if nd.on_circle == (j < k)]
            d_min = min(dists, default=np.inf)
            worst = max(worst, d_min)
            unmatched += d_min > tol.node_match
        ok = unmatched == 0 and cat.type == (n, k)
        cl["nodes"] = Clause(ok, worst, f"type {cat.type}, expected {(n, k)}")
    except TetraInterpError as exc:
        cl["nodes"] = Clause(False, np.inf, f"{type(exc).__name__}: {exc}")

    deg = degree_of(x)
    cl["degree"] = Clause(deg == n, float(deg), f"degree {deg}, expected {n}")

    rng = np.random.default_rng(seed)
    avoid = [np.conj(e) for e in data.eta_tilde[:k]] + [np.conj(e) for e in base.eta[:k]]
    omegas = []
    while len(omegas) < n_random_omega:
        w = complex(np.exp(2j * np.pi * rng.uniform()))
        if all(abs(w - a) > OMEGA_AVOID for a in avoid):
            omegas.append(w)

    worst_psi, psi_ok, worst_transfer, detail = 0.0, True, 0.0, ""
    ax2 = [_safe_phasar(x.x2, sigma[j]) for j in range(k)]
    for w in omegas:
        try:
            # unreduced quotients: near-coincident roots must not be cancelled here
            phi = psi_compose(w, x.components).raw
            rep = verify_blaschke_solution(phi, base, tolerances=(tol.inner, tol.interpolation, tol.phasar))
            worst_psi = max(worst_psi, rep.innerness, *rep.interpolation, *rep.phasar)
            psi_ok &= rep.passed
            ups = upsilon_compose(w, x.components).raw
            for j in range(k):
                if abs(w * data.eta_tilde[j] - 1) > 1e-6:
                    worst_transfer = max(worst_transfer, _dev(_safe_phasar(phi, sigma[j]), ax1[j]))
                if abs(w * base.eta[j] - 1) > 1e-6:
                    worst_transfer = max(worst_transfer, _dev(_safe_phasar(ups, sigma[j]), ax2[j]))
        except TetraInterpError as exc:
            psi_ok, detail = False, f"{type(exc).__name__}: {exc}"
            worst_psi = worst_transfer = np.inf
    cl["psi_consistency"] = Clause(bool(psi_ok), float(worst_psi), detail)
    cl["phasar_transfer"] = Clause(
        worst_transfer < tol.phasar, float(worst_transfer), "" if k else "no circle nodes"
    )
    return report
