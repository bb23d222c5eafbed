import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import EX1, EX2, closed_disc_points, round_trip, type_schedule
from tetra_interp.blaschke import Parametrization, build_parametrization, choose_tau, circle_grid, validate_data
from tetra_interp.errors import (
    ExceptionalGeometry,
    InvalidData,
    NotSolvable,
    PoleOmega,
    RoyalVariety,
)
from tetra_interp.generate import eta_tilde_from_center, forward_data, random_blaschke, random_center
from tetra_interp.polyrat import ComplexPoly, RationalFn, roots_in_closed_disc
from tetra_interp.royal import (
    DEFAULT_TOL,
    CenterPoint,
    RoyalData,
    TetraInnerFn,
    accepted_omega_intervals,
    assemble,
    closed_form_center,
    closed_form_degree1,
    closed_form_parametrization,
    degree_of,
    royal_nodes,
    royal_polynomial,
    solve_center,
    solve_royal,
    validate_royal_data,
    verify_tetra_inner,
    zeta_of_omega,
)
from tetra_interp.tetra import in_tetrablock_closure, phasar, psi_compose

ZERO = {"n": 1, "k": 0, "sigma": [[0, 0]], "eta": [[0, 0]], "rho": [], "eta_tilde": [[0, 0]]}


def ex1_closed_forms(lam, center, eta, tau=1.0):
    """Closed-form components of the degree-one example at the origin."""
    x1c, x2c, x3c = center
    t = np.conj(tau) * lam
    e2 = abs(eta) ** 2
    den = -x1c * np.conj(eta) * (1 - t) + 1 - e2 * t
    x1 = (x1c * (t - e2) + eta * (1 - t)) / den
    x2 = (-x3c * np.conj(eta) * (1 - t) + x2c * (1 - e2 * t)) / den
    x3 = (x2c * eta * (1 - t) + x3c * (t - e2)) / den
    return x1, x2, x3


def ex2_closed_forms(lam, center, eta, rho, tau):
    """Closed-form components of the degree-one example with its node at 1."""
    x1c, x2c, x3c = center
    tb = np.conj(tau)
    p = rho * (1 - tb) * (1 - lam)
    q = 1 - tb * lam
    den = x1c * (-np.conj(eta) * q) + p + q
    x1 = (x1c * (p - q) + eta * q) / den
    x2 = (x3c * (-np.conj(eta) * q) + x2c * (p + q)) / den
    x3 = (x2c * eta * q + x3c * (p - q)) / den
    return x1, x2, x3


def identity_map():
    par = build_parametrization(validate_data(ZERO), 1.0)
    return assemble(par, CenterPoint(0, 0, 1, 0.0, 0.0))


def royal_variety_map(rng):
    """``(phi1, phi2, phi1 phi2)`` over a shared denominator."""
    f, g = random_blaschke(1, rng), random_blaschke(1, rng)
    D = f.den * g.den
    x1 = RationalFn(f.num * g.den, D)
    x2 = RationalFn(g.num * f.den, D)
    x3 = RationalFn(f.num * g.num, D)
    base = build_parametrization(validate_data(ZERO), 1.0)
    pad = lambda p: ComplexPoly(p.padded(3), 2)
    par = Parametrization(pad(base.a), pad(base.b), pad(base.c), pad(base.d), base.tau)
    return TetraInnerFn(x1, x2, x3, CenterPoint(0, 0, 1, 0.0, 0.0), par, 2)


class TestRoyalData:
    def test_examples_validate(self):
        assert validate_royal_data(EX1).n == 1
        assert validate_royal_data(EX2).k == 1

    @pytest.mark.parametrize(
        "patch, word",
        [
            ({"eta_tilde": [[0.5, 0]]}, "circle node"),
            ({"eta_tilde": [[1, 0], [0, 0]]}, "expected n"),
        ],
    )
    def test_rejects(self, patch, word):
        with pytest.raises(InvalidData, match=word):
            validate_royal_data({**EX2, **patch})

    def test_disc_value_must_be_interior(self):
        with pytest.raises(InvalidData, match="disc node"):
            validate_royal_data({**EX1, "eta_tilde": [[1, 0]]})

    def test_missing_eta_tilde(self):
        with pytest.raises(InvalidData, match="eta_tilde"):
            validate_royal_data({k: v for k, v in EX1.items() if k != "eta_tilde"})


class TestSolveCenter:
    def test_example_one_restricted(self):
        data = validate_royal_data(EX1)
        par = build_parametrization(data.base, 1.0)
        c = solve_center(data, par, omega=1.0)
        # beta = (s - conj(s) p) / (1 - |p|^2) with s = 1, p = 0.25
        beta = (1 - 0.25) / (1 - 0.0625)
        assert np.allclose(c.as_tuple(), (beta, beta, 1), atol=1e-10)

    def test_example_one_full_search_picks_theta_zero(self):
        data = validate_royal_data(EX1)
        c = solve_center(data, build_parametrization(data.base, 1.0))
        assert c.omega_angle == 0.0
        assert np.allclose(c.as_tuple(), (0.8, 0.8, 1), atol=1e-10)

    def test_zero_data(self):
        data = validate_royal_data(ZERO)
        c = solve_center(data, build_parametrization(data.base, 1.0), omega=1.0)
        assert np.allclose(c.as_tuple(), (0, 0, 1), atol=1e-14)

    def test_boundary_node_solvable(self):
        data = validate_royal_data(EX2)
        c = solve_center(data, build_parametrization(data.base, -1.0))
        eta, eta_t = 1, 1
        assert abs(c.x3c - eta * eta_t) > 1e-6
        # the scalar equation x1 + conj(x1) omega conj(eta_t) eta = omega conj(eta_t) + eta
        w = c.x3c
        assert abs(c.x1c + np.conj(c.x1c) * w * np.conj(eta_t) * eta - (w * np.conj(eta_t) + eta)) < 1e-8

    @pytest.mark.parametrize("seed", range(12))
    def test_center_invariants(self, seed):
        rng = np.random.default_rng(seed)
        n, k = type_schedule(1, rng)[0]
        data, _, _, x = round_trip(n, k, rng)
        c = x.center
        assert abs(abs(c.x3c) - 1) < 1e-10
        assert abs(c.x1c) < 1 and abs(c.x2c) < 1
        assert abs(c.x1c - np.conj(c.x2c) * c.x3c) < 1e-10
        par = x.par
        s = data.base.sigma
        vals = (c.x3c * par.c(s) + c.x2c * par.d(s)) / (c.x1c * par.c(s) + par.d(s))
        assert np.abs(vals - data.eta_tilde).max() <= 1e-8

    def test_not_solvable_when_values_conflict(self):
        # two disc nodes with the same eta but far-apart eta_tilde
        rng = np.random.default_rng(3)
        inst = forward_data(2, 0, rng)
        data = validate_royal_data(RoyalData(inst.data, np.array([0.95, -0.95j])))
        par = build_parametrization(data.base, 1.0)
        with pytest.raises((NotSolvable, ExceptionalGeometry)) as info:
            solve_center(data, par, n_omega=256)
        if isinstance(info.value, NotSolvable):
            assert info.value.best_residual > DEFAULT_TOL.residual
            assert "not found at this resolution" in str(info.value)

    def test_intervals_example_one(self):
        data = validate_royal_data(EX1)
        runs = accepted_omega_intervals(data, build_parametrization(data.base, 1.0), n_omega=256)
        # every omega works for interior degree-one data
        assert runs == [(0.0, pytest.approx(2 * np.pi * 255 / 256))]

    def test_intervals_boundary_node_excludes_eta_eta_tilde(self):
        # eta = eta_tilde = 1: every omega except eta * eta_tilde = 1 is admissible
        data = validate_royal_data(EX2)
        runs = accepted_omega_intervals(data, build_parametrization(data.base, -1.0), n_omega=256)
        assert runs == [(pytest.approx(2 * np.pi / 256), pytest.approx(2 * np.pi * 255 / 256))]

    def test_intervals_empty_for_isolated_centers(self):
        # with several nodes the center is isolated, so grid angles miss it
        rng = np.random.default_rng(7)
        data, _, _, x = round_trip(3, 1, rng)
        assert accepted_omega_intervals(data, x.par) == []
        assert x.center.residual <= DEFAULT_TOL.residual


class TestAssemble:
    def test_zero_center(self):
        x = identity_map()
        for lam in closed_disc_points(20, np.random.default_rng(0)):
            assert np.allclose(x(lam), (0, 0, lam), atol=1e-14)

    def test_matches_closed_forms(self):
        data = validate_royal_data(EX1)
        par = build_parametrization(data.base, 1.0)
        x = assemble(par, solve_center(data, par))
        lam = closed_disc_points(200, np.random.default_rng(1))
        got = x(lam)
        want = ex1_closed_forms(lam, (0.8, 0.8, 1), 0.5)
        assert max(np.abs(g - w).max() for g, w in zip(got, want)) < 1e-10

    @pytest.mark.parametrize("tau", [1.0, np.exp(0.7j), -1j])
    def test_closed_forms_any_tau(self, tau):
        eta, eta_t, w = 0.3 + 0.2j, -0.4j, np.exp(2.1j)
        data = validate_data({"sigma": [0], "eta": [eta]})
        par = build_parametrization(data, tau)
        center = closed_form_center(eta, eta_t, w)
        x = assemble(par, center)
        lam = closed_disc_points(50, np.random.default_rng(2))
        want = ex1_closed_forms(lam, center.as_tuple(), eta, tau)
        assert max(np.abs(g - v).max() for g, v in zip(x(lam), want)) < 1e-10

    def test_example_two_closed_forms(self):
        x = solve_royal(EX2, tau=-1)
        lam = closed_disc_points(100, np.random.default_rng(3))
        want = ex2_closed_forms(lam, x.center.as_tuple(), 1.0, 2.0, -1.0)
        assert max(np.abs(g - v).max() for g, v in zip(x(lam), want)) < 1e-10

    @pytest.mark.parametrize("seed", range(8))
    def test_interpolates_and_anchors(self, seed):
        rng = np.random.default_rng(100 + seed)
        n, k = type_schedule(1, rng)[0]
        data, _, _, x = round_trip(n, k, rng)
        s = data.base.sigma
        v1, v2, v3 = x(s)
        assert np.abs(v1 - data.base.eta).max() < 1e-8
        assert np.abs(v2 - data.eta_tilde).max() < 1e-8
        assert np.abs(v3 - data.base.eta * data.eta_tilde).max() < 1e-8
        assert max(abs(f(x.par.tau) - v) for f, v in zip(x.components, x.center.as_tuple())) < 1e-10
        assert x.anchor_deviation < 1e-10


class TestRoyalPolynomial:
    def test_identity(self):
        R = royal_polynomial(identity_map())
        assert np.allclose(R.coeffs, [0, 1, 0], atol=1e-14)

    def test_royal_variety_vanishes(self):
        x = royal_variety_map(np.random.default_rng(0))
        R = x.x1.den * x.x3.num - x.x1.num * x.x2.num
        assert np.abs(R.coeffs).max() < 1e-14
        with pytest.raises(RoyalVariety):
            royal_nodes(x)

    def test_example_one_single_zero(self):
        R = royal_polynomial(closed_form_degree1(0.5, 0.5, 1))
        roots = roots_in_closed_disc(R)
        assert len(roots) == 1 and abs(roots[0].root) < 1e-10 and roots[0].multiplicity == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_symmetric(self, seed):
        rng = np.random.default_rng(200 + seed)
        n, k = type_schedule(1, rng)[0]
        _, _, _, x = round_trip(n, k, rng)
        R = royal_polynomial(x)
        c = R.padded(2 * n + 1)
        assert np.abs(c - np.conj(c[::-1])).max() < 1e-9 * max(1, np.abs(c).max())


class TestNodes:
    def test_identity(self):
        cat = royal_nodes(identity_map())
        assert cat.type == (1, 0)
        (nd,) = cat.nodes
        assert abs(nd.location) < 1e-14 and nd.multiplicity == 1 and not nd.on_circle
        assert nd.value_eta == 0 and nd.value_eta_tilde == 0

    def test_circle_example(self):
        cat = royal_nodes(solve_royal(EX2, tau=-1))
        assert cat.type == (1, 1)
        (nd,) = cat.nodes
        assert nd.on_circle and nd.multiplicity == 1 and abs(nd.location - 1) < 1e-6
        assert abs(nd.value_eta - 1) < 1e-8 and abs(nd.value_eta_tilde - 1) < 1e-8

    @pytest.mark.parametrize("seed", range(15))
    def test_completeness(self, seed):
        rng = np.random.default_rng(300 + seed)
        n, k = type_schedule(1, rng)[0]
        data, _, _, x = round_trip(n, k, rng)
        cat = royal_nodes(x)
        assert cat.type == (n, k) == (degree_of(x), k)
        for j, s in enumerate(data.base.sigma):
            assert min(abs(nd.location - s) for nd in cat.nodes if nd.on_circle == (j < k)) < 1e-6


class TestDegree:
    def test_examples(self):
        assert degree_of(identity_map()) == 1
        assert degree_of(closed_form_degree1(0.5, 0.5, 1)) == 1

    def test_round_trip_degree_four(self):
        _, _, _, x = round_trip(4, 1, np.random.default_rng(11))
        assert degree_of(x) == 4 == x.degree


class TestClosedForms:
    def test_center(self):
        assert np.allclose(closed_form_center(0.5, 0.5, 1).as_tuple(), (0.8, 0.8, 1))

    def test_zero(self):
        x = closed_form_degree1(0, 0, 1)
        lam = closed_disc_points(10, np.random.default_rng(0))
        assert np.allclose(x(lam), (0 * lam, 0 * lam, lam), atol=1e-14)

    def test_parametrization_matches_solver(self):
        eta = 0.2 - 0.6j
        par = build_parametrization(validate_data({"sigma": [0], "eta": [eta]}), 1.0)
        ref = closed_form_parametrization(eta)
        for p, q in zip((par.a, par.b, par.c, par.d), (ref.a, ref.b, ref.c, ref.d)):
            assert np.allclose(p.padded(2), q.padded(2), atol=1e-12)

    def test_complex_example_verifies(self):
        eta, eta_t = 0.3j, -0.2
        x = closed_form_degree1(eta, eta_t, 1j)
        data = {"sigma": [[0, 0]], "eta": [[0, 0.3]], "eta_tilde": [[-0.2, 0]]}
        assert verify_tetra_inner(x, data).passed

    @settings(max_examples=25, deadline=None)
    @given(
        st.floats(0, 0.95), st.floats(0, 2 * np.pi),
        st.floats(0, 0.95), st.floats(0, 2 * np.pi),
        st.floats(0, 2 * np.pi),
    )
    def test_beta_in_disc(self, r1, t1, r2, t2, t3):
        eta, eta_t, w = r1 * np.exp(1j * t1), r2 * np.exp(1j * t2), np.exp(1j * t3)
        c = closed_form_center(eta, eta_t, w)
        assert abs(c.x1c) < 1
        assert abs(c.x1c + np.conj(c.x1c) * w * np.conj(eta_t) * eta - (w * np.conj(eta_t) + eta)) < 1e-12

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidData):
            closed_form_degree1(1.0, 0, 1)


class TestVerify:
    def test_example_one(self):
        x = solve_royal(EX1, tau=1)
        rep = verify_tetra_inner(x, EX1)
        assert rep.passed, rep.as_dict()

    def test_example_two(self):
        x = solve_royal(EX2, tau=-1)
        rep = verify_tetra_inner(x, EX2)
        assert rep.passed, rep.as_dict()
        assert np.allclose(x(1.0), (1, 1, 1), atol=1e-8)
        assert phasar(x.x1, 1.0).value == pytest.approx(2, abs=1e-6)

    def test_identity_against_zero_data(self):
        assert verify_tetra_inner(identity_map(), ZERO).passed

    def test_identity_against_wrong_data(self):
        rep = verify_tetra_inner(identity_map(), {**ZERO, "eta": [[0.5, 0]]})
        assert not rep.clauses["interpolation"].passed
        assert rep.clauses["interpolation"].value == pytest.approx(0.5)

    def test_report_shape(self):
        d = verify_tetra_inner(identity_map(), ZERO).as_dict()
        assert set(d["clauses"]) == {
            "interpolation", "phasar", "boundary", "membership",
            "nodes", "degree", "psi_consistency", "phasar_transfer",
        }

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip_passes(self, seed):
        rng = np.random.default_rng(400 + seed)
        n, k = type_schedule(1, rng)[0]
        data, _, _, x = round_trip(n, k, rng)
        rep = verify_tetra_inner(x, data)
        assert rep.passed, rep.as_dict()


class TestZeta:
    def test_examples(self):
        assert zeta_of_omega(CenterPoint(0, 0, 1, 0, 0), 1) == pytest.approx(-1)
        assert zeta_of_omega(CenterPoint(0.8, 0.8, 1, 0, 0), 1) == pytest.approx(-1)

    def test_pole(self):
        with pytest.raises(PoleOmega):
            zeta_of_omega(CenterPoint.from_x2(0.5, 0.0), 2.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_unimodular(self, seed):
        rng = np.random.default_rng(seed)
        c = CenterPoint.from_x2(0.9 * rng.uniform() * np.exp(2j * np.pi * rng.uniform()), rng.uniform(0, 2 * np.pi))
        for w in circle_grid(256):
            assert abs(abs(zeta_of_omega(c, w)) - 1) < 1e-12


class TestProperties:
    @pytest.mark.parametrize("seed", range(6))
    def test_factorization_identity(self, seed):
        rng = np.random.default_rng(500 + seed)
        n, k = type_schedule(1, rng)[0]
        _, _, _, x = round_trip(n, k, rng)
        par, worst = x.par, 0.0
        for w, lam in zip(np.exp(2j * np.pi * rng.uniform(size=200)), closed_disc_points(200, rng)):
            z = zeta_of_omega(x.center, w)
            lhs = psi_compose(w, x.components).raw(lam)
            rhs = (par.a(lam) * z + par.b(lam)) / (par.c(lam) * z + par.d(lam))
            worst = max(worst, abs(lhs - rhs))
        assert worst < 1e-10

    @pytest.mark.parametrize("seed", range(8))
    def test_cancellation_locus(self, seed):
        rng = np.random.default_rng(600 + seed)
        n = int(rng.integers(1, 5))
        data, _, _, x = round_trip(n, 1, rng)
        w0 = complex(np.conj(data.eta_tilde[0]))
        assert psi_compose(w0, x.components).cancellations == 1
        for w in np.exp(2j * np.pi * rng.uniform(size=5)):
            if abs(w - w0) > 1e-3:
                assert psi_compose(w, x.components).cancellations == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_x2_bound_iff_c_below_d(self, seed):
        rng = np.random.default_rng(700 + seed)
        n, k = type_schedule(1, rng)[0]
        _, _, _, x = round_trip(n, k, rng)
        zs = circle_grid(1024)
        c_le_d = bool(np.all(np.abs(x.par.c(zs)) <= np.abs(x.par.d(zs)) + 1e-12))
        pts = np.concatenate([closed_disc_points(2000, rng), zs])
        x2_le_1 = bool(np.abs(x.x2(pts)).max() <= 1 + 1e-9)
        assert c_le_d == x2_le_1

    @pytest.mark.parametrize("seed", range(5))
    def test_values_stay_in_closure(self, seed):
        rng = np.random.default_rng(800 + seed)
        _, _, _, x = round_trip(3, 1, rng)
        for lam in closed_disc_points(200, rng):
            assert in_tetrablock_closure(x(lam), tol=1e-8)

    def test_round_trip_recovers_eta_tilde(self):
        rng = np.random.default_rng(900)
        for n, k in type_schedule(10, rng):
            data, _, _, x = round_trip(n, k, rng)
            assert np.abs(x.x2(data.base.sigma) - data.eta_tilde).max() < 1e-7

    def test_example_timing(self):
        t0 = time.perf_counter()
        solve_royal(EX1, tau=1)
        solve_royal(EX2, tau=-1)
        assert time.perf_counter() - t0 < 1.0


def sampled_instance(seed, index):
    """Instance ``index`` of a deterministic stream with n up to 6."""
    rng = np.random.default_rng(seed)
    for _ in range(index + 1):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(0, min(2, n) + 1))
        inst = forward_data(n, k, rng)
        par = build_parametrization(inst.data, choose_tau(inst.data))
        planted = random_center(rng)
    eta_t = eta_tilde_from_center(par, inst.data, planted)
    return validate_royal_data(RoyalData(inst.data, eta_t)), par


class TestRegressions:
    @pytest.mark.parametrize(
        "seed, index",
        [
            (11, 37),  # double circle zero split radially beyond 1e-8
            (99, 108),  # double circle zero split by ~2e-3, not an exact mirror pair
            (11, 274),  # two circle nodes: a family of centers reaching |x2c| -> 1
            (99, 148),  # random omega close to the cancellation angle
        ],
    )
    def test_verify_passes(self, seed, index):
        data, par = sampled_instance(seed, index)
        x = assemble(par, solve_center(data, par))
        rep = verify_tetra_inner(x, data)
        assert rep.passed, rep.as_dict()
