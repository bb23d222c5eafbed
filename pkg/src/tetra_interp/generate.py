"""Forward generation of solvable problem instances.

Values and phasar derivatives are read off a random finite Blaschke product,
so the resulting data are solvable by construction.  Used by the test suite
and the acceptance harness.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .blaschke import BlaschkeData, Parametrization, validate_data
from .polyrat import ComplexPoly, RationalFn
from .tetra import phasar


def random_blaschke(n: int, rng: np.random.Generator, max_zero: float = 0.8) -> RationalFn:
    """Degree-``n`` Blaschke product with zeros of modulus at most ``max_zero``."""
    zeros = rng.uniform(0, max_zero, n) * np.exp(2j * np.pi * rng.uniform(size=n))
    const = np.exp(2j * np.pi * rng.uniform())
    num = ComplexPoly.from_roots(zeros, leading=const)
    den = ComplexPoly([1.0])
    for a in zeros:
        den = den * ComplexPoly([1.0, -np.conj(a)])
    return RationalFn(num, den)


def random_nodes(
    n: int,
    k: int,
    rng: np.random.Generator,
    disc_radius: float = 0.85,
    min_gap: float = 0.15,
) -> np.ndarray:
    """``k`` circle nodes followed by ``n - k`` disc nodes, pairwise separated."""
    for _ in range(1000):
        circle = np.exp(2j * np.pi * rng.uniform(size=k))
        disc = np.sqrt(rng.uniform(0, disc_radius**2, n - k)) * np.exp(
            2j * np.pi * rng.uniform(size=n - k)
        )
        sigma = np.concatenate([circle, disc])
        if n == 1:
            return sigma
        gaps = np.abs(sigma[:, None] - sigma[None, :])[np.triu_indices(n, 1)]
        if gaps.min() > min_gap:
            return sigma
    raise RuntimeError("could not place separated nodes")


class ForwardInstance(NamedTuple):
    data: BlaschkeData
    phi: RationalFn


def forward_data(n: int, k: int, rng: np.random.Generator) -> ForwardInstance:
    """Blaschke data ``eta_j = phi(sigma_j)``, ``rho_j = A phi(sigma_j)``."""
    phi = random_blaschke(n, rng)
    sigma = random_nodes(n, k, rng)
    eta = phi(sigma)
    # values at circle nodes are unimodular up to rounding
    eta[:k] /= np.abs(eta[:k])
    rho = [phasar(phi, s).value for s in sigma[:k]]
    data = validate_data({"n": n, "k": k, "sigma": sigma, "eta": eta, "rho": rho})
    return ForwardInstance(data, phi)


class PlantedCenter(NamedTuple):
    x1c: complex
    x2c: complex
    omega: complex


def random_center(rng: np.random.Generator, max_modulus: float = 0.8) -> PlantedCenter:
    omega = complex(np.exp(2j * np.pi * rng.uniform()))
    x2c = complex(np.sqrt(rng.uniform(0, max_modulus**2)) * np.exp(2j * np.pi * rng.uniform()))
    return PlantedCenter(complex(np.conj(x2c) * omega), x2c, omega)


def eta_tilde_from_center(
    par: Parametrization, data: BlaschkeData, center: PlantedCenter
) -> np.ndarray:
    """Second-coordinate values ``(omega c + x2c d) / (x1c c + d)`` at the nodes."""
    c, d = par.c(data.sigma), par.d(data.sigma)
    eta_t = (center.omega * c + center.x2c * d) / (center.x1c * c + d)
    eta_t[: data.k] /= np.abs(eta_t[: data.k])
    return eta_t
