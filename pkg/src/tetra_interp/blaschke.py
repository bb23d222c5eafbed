"""The Blaschke interpolation problem.

Data of type ``(n, k)`` prescribe values ``eta_j`` at nodes ``sigma_j`` (the
first ``k`` on the unit circle) and, at the circle nodes, phasar derivatives
``rho_j``.  When the Pick matrix is positive definite every solution of degree
``n`` is a linear-fractional image ``(a zeta + b) / (c zeta + d)`` of a
unimodular parameter ``zeta``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    ExceptionalParameter,
    InvalidData,
    NotHermitian,
    NotPositiveDefinite,
    NotUnimodularAt,
    TauSearchExhausted,
    ZeroAt,
)
from .polyrat import ComplexPoly, RationalFn, all_roots, evaluate, reduce
from .tetra import phasar

MODULUS_TOL = 1e-12
NODE_SEPARATION = 1e-10
HERMITIAN_TOL = 1e-12
PIVOT_FACTOR = 1e-10
TAU_ATTEMPTS = 256
TAU_ARC_MIN = 1e-6
TAU_DEGENERATE = 1e-12
EXCEPTIONAL_DEN = 1e-14
EXCEPTIONAL_TOL = 1e-8
#: Working precision of the parametrization solves.
EXT = np.clongdouble


def as_complex_vector(values, name: str = "value") -> np.ndarray:
    """Convert a sequence of complex numbers or ``[re, im]`` pairs."""
    arr = np.asarray(values)
    if arr.size == 0:
        return np.zeros(0, dtype=complex)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    elif arr.ndim != 1:
        raise InvalidData(f"{name}: expected a flat sequence or [re, im] pairs")
    try:
        arr = arr.astype(complex)
    except (TypeError, ValueError) as exc:
        raise InvalidData(f"{name}: non-numeric entries") from exc
    if not np.all(np.isfinite(arr)):
        raise InvalidData(f"{name}: non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class BlaschkeData:
    """Nodes ``sigma``, values ``eta`` and circle phasar bounds ``rho``."""

    sigma: np.ndarray
    eta: np.ndarray
    rho: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return len(self.sigma)

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen(np.asarray(self.sigma, complex)))
        object.__setattr__(self, "eta", _frozen(np.asarray(self.eta, complex)))
        object.__setattr__(self, "rho", _frozen(np.asarray(self.rho, float)))


def validate_data(raw) -> BlaschkeData:
    """Check every admissibility clause and return a ``BlaschkeData``.

    ``raw`` is either a ``BlaschkeData`` or a mapping with keys ``n``, ``k``,
    ``sigma``, ``eta`` and ``rho``.  Complex entries may be given as numbers or
    as ``[re, im]`` pairs.

    Raises
    ------
    InvalidData
        With a message naming the violated clause.
    """
    if isinstance(raw, BlaschkeData):
        sigma, eta, rho, k, n = raw.sigma, raw.eta, raw.rho, raw.k, raw.n
    elif isinstance(raw, Mapping):
        try:
            sigma = as_complex_vector(raw["sigma"], "sigma")
            eta = as_complex_vector(raw["eta"], "eta")
            k = raw.get("k", 0)
            rho = np.asarray(raw.get("rho", []), dtype=float).ravel()
        except KeyError as exc:
            raise InvalidData(f"missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidData(f"rho: {exc}") from exc
        n = raw.get("n", len(sigma))
    else:
        raise InvalidData(f"unsupported data object {type(raw).__name__}")

    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidData(f"n must be an integer >= 1, got {n!r}")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 0 <= k <= n:
        raise InvalidData(f"k must be an integer with 0 <= k <= n, got {k!r}")
    if len(sigma) != n:
        raise InvalidData(f"sigma has {len(sigma)} entries, expected n = {n}")
    if len(eta) != n:
        raise InvalidData(f"eta has {len(eta)} entries, expected n = {n}")
    if len(rho) != k:
        raise InvalidData(f"rho has {len(rho)} entries, expected k = {k}")
    if not np.all(np.isfinite(rho)):
        raise InvalidData("rho: non-finite entries")

    if n > 1:
        gaps = np.abs(sigma[:, None] - sigma[None, :])[np.triu_indices(n, 1)]
        if gaps.min() <= NODE_SEPARATION:
            raise InvalidData("sigma: repeated node")
    for j in range(n):
        s, e = abs(sigma[j]), abs(eta[j])
        if j < k:
            if abs(s - 1) > MODULUS_TOL:
                raise InvalidData(f"sigma[{j}]: circle node with |sigma| = {s!r} != 1")
            if abs(e - 1) > MODULUS_TOL:
                raise InvalidData(f"eta[{j}]: |eta| = {e!r} != 1 with sigma on the circle")
            if not rho[j] > 0:
                raise InvalidData(f"rho[{j}]: must be positive, got {rho[j]!r}")
        else:
            if s >= 1 - MODULUS_TOL:
                raise InvalidData(f"sigma[{j}]: disc node with |sigma| = {s!r} not < 1")
            if e >= 1 - MODULUS_TOL:
                raise InvalidData(f"eta[{j}]: |eta| = {e!r} not < 1 with sigma in the disc")
    return BlaschkeData(sigma, eta, rho, int(k))


def _pick(data: BlaschkeData, dtype) -> np.ndarray:
    s, e = data.sigma.astype(dtype), data.eta.astype(dtype)
    n, k = data.n, data.k
    M = np.zeros((n, n), dtype=dtype)
    for i in range(n):
        for j in range(i, n):
            if i == j and i < k:
                M[i, i] = data.rho[i]
            elif i == j:
                M[i, i] = (1 - abs(e[i]) ** 2) / (1 - abs(s[i]) ** 2)
            else:
                M[i, j] = (1 - np.conj(e[i]) * e[j]) / (1 - np.conj(s[i]) * s[j])
                M[j, i] = np.conj(M[i, j])
    return M


def build_pick_matrix(data: BlaschkeData) -> np.ndarray:
    """Hermitian Pick matrix of the data.

    The upper triangle is computed and mirrored, so ``M[j, i]`` equals
    ``conj(M[i, j])`` exactly and the diagonal is real.
    """
    return _pick(data, complex)


def _cholesky(M: np.ndarray, threshold: float):
    """Lower Cholesky factor in the dtype of ``M``, or ``None`` on a small pivot.

    Also returns the smallest pivot reached.
    """
    n = M.shape[0]
    L = np.zeros_like(M)
    smallest = np.inf
    for j in range(n):
        pivot = (M[j, j] - np.sum(np.abs(L[j, :j]) ** 2)).real
        smallest = min(smallest, float(pivot))
        if pivot <= threshold:
            return None, smallest
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j].conj()) / L[j, j]
    return L, smallest


class PDResult(NamedTuple):
    """Outcome of the Cholesky positivity test."""

    positive_definite: bool
    rank: int
    smallest_pivot: float
    chol: np.ndarray | None
    note: str = ""

    def __bool__(self):
        return self.positive_definite


def is_positive_definite(M) -> PDResult:
    """Cholesky test with pivot threshold ``1e-10 * trace(M) / n``.

    Raises
    ------
    NotHermitian
        If ``M`` differs from its conjugate transpose by more than ``1e-12``.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise NotHermitian("matrix is not square")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if np.abs(M - M.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise NotHermitian("matrix differs from its conjugate transpose")

    trace = float(np.trace(M).real)
    threshold = PIVOT_FACTOR * abs(trace) / n
    eig = np.linalg.eigvalsh(M)
    rank = int(np.sum(eig > threshold))

    L, smallest = _cholesky(M, threshold)
    ok = trace > 0 and L is not None

    note = ""
    if not ok and eig.min() >= -threshold:
        note = "positive semidefinite and singular; the lower-degree solution is not constructed"
    return PDResult(bool(ok), rank, float(smallest), L if ok else None, note)


def _require_pd(M) -> PDResult:
    res = is_positive_definite(M)
    if not res:
        raise NotPositiveDefinite(
            f"Pick matrix is not positive definite (rank {res.rank}, "
            f"smallest pivot {res.smallest_pivot:.3e})",
            rank=res.rank,
            smallest_pivot=res.smallest_pivot,
        )
    return res


def _chol_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``L L^H v = rhs`` by forward and back substitution in ``L``'s dtype."""
    n = len(rhs)
    y = np.zeros(n, dtype=L.dtype)
    for i in range(n):
        y[i] = (rhs[i] - L[i, :i] @ y[:i]) / L[i, i]
    v = np.zeros(n, dtype=L.dtype)
    U = L.conj().T
    for i in reversed(range(n)):
        v[i] = (y[i] - U[i, i + 1 :] @ v[i + 1 :]) / U[i, i]
    return v


def _extended_solves(data: BlaschkeData, tau: complex) -> tuple[np.ndarray, np.ndarray]:
    """``M^-1 x_tau`` and ``M^-1 y_tau`` in extended precision.

    The polynomials ``a, b, c, d`` inherit the error of these solves amplified
    by the condition number of ``M``; long-double arithmetic keeps that error
    far below double rounding at desk-scale conditioning.
    """
    M = _pick(data, EXT)
    L, _ = _cholesky(M, 0.0)
    if L is None:
        raise NotPositiveDefinite("Pick matrix lost positivity in extended precision")
    x_tau, y_tau = kernel_vectors(data, EXT(tau))
    return _chol_solve(L, x_tau), _chol_solve(L, y_tau)


def kernel_vectors(data: BlaschkeData, lam: complex) -> tuple[np.ndarray, np.ndarray]:
    """The vectors ``x_lam = [1/(1 - conj(sigma_j) lam)]`` and ``y_lam = conj(eta) x_lam``."""
    dtype = np.result_type(complex, np.asarray(lam).dtype)
    sigma, eta = data.sigma.astype(dtype), data.eta.astype(dtype)
    x = 1 / (1 - np.conj(sigma) * lam)
    return x, np.conj(eta) * x


@dataclass(frozen=True, eq=False)
class PickSystem:
    data: BlaschkeData
    M: np.ndarray
    chol: np.ndarray
    tau: complex
    v_x: np.ndarray
    v_y: np.ndarray


def pick_system(data: BlaschkeData, tau: complex) -> PickSystem:
    M = build_pick_matrix(data)
    pd = _require_pd(M)
    v_x, v_y = _extended_solves(data, tau)
    return PickSystem(data, M, pd.chol, complex(tau), v_x.astype(complex), v_y.astype(complex))


def _tau_admissible(data: BlaschkeData, tau: complex, L: np.ndarray) -> bool:
    k = data.k
    if k == 0:
        return True
    circle = data.sigma[:k]
    if np.min(np.abs(np.angle(circle / tau))) <= TAU_ARC_MIN:
        return False
    x_tau, y_tau = kernel_vectors(data, tau)
    vx, vy = _chol_solve(L, x_tau), _chol_solve(L, y_tau)
    degenerate = (np.abs(vx[:k]) < TAU_DEGENERATE) & (np.abs(vy[:k]) < TAU_DEGENERATE)
    return not degenerate.any()


def choose_tau(data: BlaschkeData, M=None, seed: int = 0) -> complex:
    """First admissible unimodular base point among 256 seeded random angles.

    Raises
    ------
    NotPositiveDefinite
        If ``M`` is not positive definite.
    TauSearchExhausted
        If none of the sampled angles is admissible.
    """
    M = build_pick_matrix(data) if M is None else np.asarray(M, complex)
    pd = _require_pd(M)
    angles = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, TAU_ATTEMPTS)
    for theta in angles:
        tau = complex(np.exp(1j * theta))
        if _tau_admissible(data, tau, pd.chol):
            return tau
    raise TauSearchExhausted(f"no admissible base point among {TAU_ATTEMPTS} angles")


def exceptional_set(ps: PickSystem) -> list[complex]:
    """Parameters ``zeta`` for which the linear-fractional formula degenerates.

    At most one candidate per circle node: the ratio of the node's entries
    of ``M^-1 x_tau`` and ``M^-1 y_tau``, kept when it is unimodular.
    """
    out = []
    for j in range(ps.data.k):
        if abs(ps.v_y[j]) > EXCEPTIONAL_DEN:
            zeta = ps.v_x[j] / ps.v_y[j]
            if abs(abs(zeta) - 1) < EXCEPTIONAL_TOL:
                out.append(complex(zeta / abs(zeta)))
    return out


def _weighted_kernel_poly(sigma: np.ndarray, w: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Coefficients of ``sum_j weights_j conj(w_j) prod_{i != j} (1 - conj(sigma_i) lam)``."""
    n = len(sigma)
    factors = [np.array([1, -np.conj(s)], dtype=sigma.dtype) for s in sigma]
    out = np.zeros(n, dtype=sigma.dtype)
    for j in range(n):
        prod = np.ones(1, dtype=sigma.dtype)
        for i in range(n):
            if i != j:
                prod = np.convolve(prod, factors[i])
        out[: len(prod)] += weights[j] * np.conj(w[j]) * prod
    return out


def _pad(p: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=p.dtype)
    out[: len(p)] = p[:length]
    return out


@dataclass(frozen=True, eq=False)
class Parametrization:
    """Normalized quadruple ``(a, b, c, d)`` at base point ``tau``."""

    a: ComplexPoly
    b: ComplexPoly
    c: ComplexPoly
    d: ComplexPoly
    tau: complex
    Z_tau: tuple = field(default=())
    system: PickSystem | None = None

    @property
    def n(self) -> int:
        return self.a.nominal_degree

    def value_matrix(self, lam) -> np.ndarray:
        return np.array(
            [[self.a(lam), self.b(lam)], [self.c(lam), self.d(lam)]], dtype=complex
        )


def build_parametrization(data: BlaschkeData, tau: complex) -> Parametrization:
    """Polynomials ``a, b, c, d`` of degree at most ``n`` for base point ``tau``.

    With ``g(lam) = prod(1 - conj(sigma_j) lam) / prod(1 - conj(sigma_j) tau)``
    and ``<u, w> = sum u_j conj(w_j)``::

        a = g (1 - (1 - conj(tau) lam) <x_lam, M^-1 x_tau>)
        b = g (1 - conj(tau) lam) <x_lam, M^-1 y_tau>
        c = -g (1 - conj(tau) lam) <y_lam, M^-1 x_tau>
        d = g (1 + (1 - conj(tau) lam) <y_lam, M^-1 y_tau>)

    Each product ``g <x_lam, w>`` is expanded exactly as a polynomial.

    Raises
    ------
    NotPositiveDefinite
    """
    tau = complex(tau)
    ps = pick_system(data, tau)
    v_x, v_y = _extended_solves(data, tau)
    n = data.n
    sigma = data.sigma.astype(EXT)
    g_den = np.prod(1 - np.conj(sigma) * EXT(tau))
    g = np.ones(1, dtype=EXT)
    for s in sigma:
        g = np.convolve(g, np.array([1, -np.conj(s)], dtype=EXT))
    g = _pad(g / g_den, n + 1)
    lin = np.array([1, -np.conj(EXT(tau))], dtype=EXT)
    ones = np.ones(n, dtype=EXT)
    eta_bar = np.conj(data.eta.astype(EXT))

    def term(w, weights):
        return _pad(np.convolve(lin, _weighted_kernel_poly(sigma, w, weights) / g_den), n + 1)

    a = g - term(v_x, ones)
    b = term(v_y, ones)
    c = -term(v_x, eta_bar)
    d = g + term(v_y, eta_bar)
    polys = [ComplexPoly(p.astype(complex), n) for p in (a, b, c, d)]
    return Parametrization(*polys, tau=tau, Z_tau=tuple(exceptional_set(ps)), system=ps)


def blaschke_solution(par: Parametrization, zeta: complex) -> RationalFn:
    """The solution ``(a zeta + b) / (c zeta + d)`` taking the value ``zeta`` at ``tau``.

    Raises
    ------
    ExceptionalParameter
        If ``zeta`` lies within ``1e-8`` of the exceptional set.
    """
    zeta = complex(zeta)
    if abs(abs(zeta) - 1) > 1e-9:
        raise InvalidData(f"zeta must be unimodular, |zeta| = {abs(zeta)!r}")
    for z in par.Z_tau:
        if abs(np.angle(zeta / z)) < EXCEPTIONAL_TOL:
            raise ExceptionalParameter(f"zeta={zeta} belongs to the exceptional set")
    return reduce(RationalFn(par.a * zeta + par.b, par.c * zeta + par.d))


@dataclass(frozen=True)
class BlaschkeReport:
    innerness: float
    interpolation: tuple
    phasar: tuple
    degree: int
    expected_degree: int
    tolerances: tuple = (1e-8, 1e-8, 1e-6)

    @property
    def passed(self) -> bool:
        t_inner, t_interp, t_phasar = self.tolerances
        return bool(
            self.innerness <= t_inner
            and all(v <= t_interp for v in self.interpolation)
            and all(v <= t_phasar for v in self.phasar)
            and self.degree == self.expected_degree
        )

    def as_dict(self) -> dict:
        return {
            "innerness": self.innerness,
            "interpolation": list(self.interpolation),
            "phasar": list(self.phasar),
            "degree": self.degree,
            "expected_degree": self.expected_degree,
            "pass": self.passed,
        }


def circle_grid(m: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m) / m)


def verify_blaschke_solution(
    phi: RationalFn,
    data: BlaschkeData,
    grid: int = 512,
    tolerances: tuple = (1e-8, 1e-8, 1e-6),
) -> BlaschkeReport:
    """Certify that ``phi`` is inner of degree ``n`` and meets the data."""
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = phi(circle_grid(grid))
        inner = float(np.nan_to_num(np.abs(np.abs(vals) - 1), nan=np.inf).max())
        at_nodes = phi(data.sigma)
    interp = tuple(
        float(v) if np.isfinite(v) else np.inf for v in np.abs(at_nodes - data.eta)
    )
    ph = []
    for j in range(data.k):
        try:
            ph.append(abs(phasar(phi, data.sigma[j]).value - data.rho[j]))
        except (NotUnimodularAt, ZeroAt, ZeroDivisionError):
            ph.append(np.inf)
    return BlaschkeReport(
        inner, interp, tuple(ph), reduce(phi).degree, data.n, tuple(tolerances)
    )


def common_root_margin(par: Parametrization) -> float:
    """``min`` over roots of ``d`` of ``max(|a|, |b|, |c|)`` at that root.

    Large values certify that ``a, b, c, d`` share no zero; ``inf`` when
    ``d`` is constant.
    """
    if par.d.is_zero:
        return 0.0
    if par.d.degree == 0:
        return np.inf
    margins = [
        max(abs(evaluate(p, r)) for p in (par.a, par.b, par.c))
        for r, _ in all_roots(par.d)
    ]
    return float(min(margins))
