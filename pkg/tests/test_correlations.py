import math

import numpy as np
import pytest
from scipy.optimize import minimize
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from discord_dynamics import correlations as co
from discord_dynamics import qmat
from discord_dynamics import spinmodel as sm
from discord_dynamics.errors import ValidationError

CLASSICAL_MIX = np.diag([0.5, 0, 0, 0.5]).astype(complex)


def brute_force_conditional(rho, n_theta=181, n_phi=72):
    """Minimum measured conditional entropy by explicit projectors."""
    best = math.inf
    for theta in np.linspace(0, math.pi, n_theta):
        for phi in np.linspace(0, 2 * math.pi, n_phi, endpoint=False):
            b = co.MeasurementBasis(theta, phi)
            total = 0.0
            for k in (0, 1):
                out = co.conditional_state(rho, b, k)
                total += out.prob * qmat.vn_entropy(out.state)
            best = min(best, total)
    return best


def projector_entropy(rho, theta, phi):
    b = co.MeasurementBasis.wrapped(theta, phi)
    return sum(
        o.prob * qmat.vn_entropy(o.state) for o in (co.conditional_state(rho, b, k) for k in (0, 1))
    )


def multistart_conditional(rho):
    """Nelder-Mead from a coarse start grid, on the projector route."""
    starts = [(t, p) for t in np.linspace(0.2, 2.9, 4) for p in np.linspace(0, 5.5, 4)]
    return min(
        minimize(
            lambda x: projector_entropy(rho, x[0], x[1]),
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-15},
        ).fun
        for x0 in starts
    )


def random_xstate(rng):
    p = rng.dirichlet(np.ones(4))
    z = math.sqrt(p[1] * p[2]) * rng.uniform() * np.exp(1j * rng.uniform(0, 2 * math.pi))
    return qmat.XStateEntries(*p, z)


class TestMutualInformation:
    def test_product(self, rng):
        rho = np.kron(random_state(rng, 2), random_state(rng, 2))
        assert co.mutual_information(rho) == pytest.approx(0, abs=1e-12)

    def test_bell(self, bell):
        assert co.mutual_information(bell) == pytest.approx(2, abs=1e-12)

    def test_classical_mixture(self):
        assert co.mutual_information(CLASSICAL_MIX) == pytest.approx(1, abs=1e-12)


class TestMeasurement:
    def test_computational(self):
        p0, p1 = co.measurement_projectors(co.MeasurementBasis(0.0, 0.0))
        np.testing.assert_allclose(p0, np.diag([1, 0]), atol=1e-15)
        np.testing.assert_allclose(p1, np.diag([0, 1]), atol=1e-15)

    def test_x_basis(self):
        p0, p1 = co.measurement_projectors(co.MeasurementBasis(math.pi / 2, 0.0))
        plus = np.array([1, 1]) / math.sqrt(2)
        minus = np.array([1, -1]) / math.sqrt(2)
        np.testing.assert_allclose(p0, np.outer(plus, plus), atol=1e-15)
        np.testing.assert_allclose(p1, np.outer(minus, minus), atol=1e-15)

    def test_completeness_and_idempotence(self, rng):
        for _ in range(20):
            b = co.MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            p0, p1 = co.measurement_projectors(b)
            assert np.max(np.abs(p0 + p1 - np.eye(2))) <= 1e-12
            for p in (p0, p1):
                assert np.max(np.abs(p @ p - p)) <= 1e-12

    def test_angle_ranges(self):
        with pytest.raises(ValidationError):
            co.MeasurementBasis(4.0, 0.0)
        with pytest.raises(ValidationError):
            co.MeasurementBasis(1.0, 2 * math.pi)


class TestConditionalState:
    def test_product(self, rng):
        ra = random_state(rng, 2)
        rho = np.kron(ra, random_state(rng, 2))
        for k in (0, 1):
            out = co.conditional_state(rho, co.MeasurementBasis(1.1, 0.4), k)
            np.testing.assert_allclose(out.state, ra, atol=1e-12)

    def test_bell_outcome(self, bell):
        out = co.conditional_state(bell, co.MeasurementBasis(0.0, 0.0), 0)
        assert out.prob == pytest.approx(0.5)
        np.testing.assert_allclose(out.state, np.diag([0, 1]), atol=1e-15)

    def test_null_outcome(self):
        rho = qmat.pure_state([1, 0, 0, 0])
        out = co.conditional_state(rho, co.MeasurementBasis(0.0, 0.0), 1)
        assert out.null and out.prob == 0
        np.testing.assert_allclose(out.state, np.eye(2) / 2)

    def test_probabilities(self, rng):
        for _ in range(20):
            rho = random_state(rng)
            b = co.MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            ps = [co.conditional_state(rho, b, k).prob for k in (0, 1)]
            assert min(ps) >= 0 and sum(ps) == pytest.approx(1, abs=1e-12)

    def test_vectorized_entropy_matches_projectors(self, rng):
        rho = random_state(rng)
        for theta, phi in [(0.3, 1.2), (2.0, 5.5), (math.pi, 0.0)]:
            b = co.MeasurementBasis(theta, phi)
            direct = sum(
                o.prob * qmat.vn_entropy(o.state)
                for o in (co.conditional_state(rho, b, k) for k in (0, 1))
            )
            assert co.conditional_entropy(rho, theta, phi) == pytest.approx(direct, abs=1e-12)


class TestClassicalCorrelation:
    def test_product(self, rng):
        rho = np.kron(random_state(rng, 2), random_state(rng, 2))
        c, _ = co.classical_correlation(rho)
        assert c == pytest.approx(0, abs=1e-12)

    def test_bell(self, bell):
        c, _ = co.classical_correlation(bell)
        assert c == pytest.approx(1, abs=1e-12)
        assert 1 - brute_force_conditional(bell, 19, 8) == pytest.approx(1, abs=1e-12)

    def test_classical_mixture(self):
        c, basis = co.classical_correlation(CLASSICAL_MIX)
        assert c == pytest.approx(1, abs=1e-12)
        assert basis.theta == 0.0
        assert qmat.vn_entropy(np.eye(2) / 2) - brute_force_conditional(CLASSICAL_MIX, 19, 8) == pytest.approx(1)

    @pytest.mark.parametrize("seed", range(4))
    def test_against_brute_force(self, seed):
        rho = random_state(np.random.default_rng(seed))
        c, basis = co.classical_correlation(rho)
        s_a = qmat.vn_entropy(qmat.partial_trace(rho, "A"))
        c_brute = s_a - brute_force_conditional(rho, 31, 24)
        c_oracle = s_a - multistart_conditional(rho)
        # refined optimum is at least as good as the coarse brute force
        assert c >= c_brute - 1e-12
        assert c == pytest.approx(c_oracle, abs=1e-8)
        achieved = co.conditional_entropy(rho, basis.theta, basis.phi)
        assert s_a - achieved == pytest.approx(c, abs=1e-12)

    def test_grid_convergence(self, rng):
        for _ in range(3):
            rho = random_state(rng)
            c1, _ = co.classical_correlation(rho)
            c2, _ = co.classical_correlation(rho, grid=(128, 128))
            assert abs(c1 - c2) < 1e-6

    def test_measure_a(self, rng):
        rho = random_state(rng)
        swap = np.eye(4)[[0, 2, 1, 3]]
        c_a, _ = co.classical_correlation(rho, measured="A")
        c_b, _ = co.classical_correlation(swap @ rho @ swap)
        assert c_a == pytest.approx(c_b, abs=1e-14)

    def test_phi_periodicity(self, rng):
        rho = random_state(rng)
        f1 = co.conditional_entropy(rho, 0.7, 1.3)
        f2 = co.conditional_entropy(rho, 0.7, 1.3 + 2 * math.pi)
        assert f1 == pytest.approx(f2, abs=1e-13)

    def test_theta_reflection(self, rng):
        # theta -> pi - theta, phi -> phi + pi swaps the two outcomes
        rho = random_state(rng)
        f1 = co.conditional_entropy(rho, 0.7, 1.3)
        f2 = co.conditional_entropy(rho, math.pi - 0.7, 1.3 + math.pi)
        assert f1 == pytest.approx(f2, abs=1e-13)

    def test_batch_and_threads_identical(self, rng):
        states = np.array([random_state(rng) for _ in range(300)])
        serial = co.minimize_conditional_entropy(states)
        threaded = co.minimize_conditional_entropy(states, workers=3)
        single = [co.minimize_conditional_entropy(states[i : i + 1]) for i in (0, 150, 299)]
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a, b)
        for i, s in zip((0, 150, 299), single):
            assert s[0][0] == serial[0][i] and s[1][0] == serial[1][i]


class TestDiscordNumeric:
    def test_bell(self, bell):
        assert co.discord_numeric(bell).discord == pytest.approx(1, abs=1e-12)

    def test_product(self, rng):
        rho = np.kron(random_state(rng, 2), random_state(rng, 2))
        assert co.discord_numeric(rho).discord == pytest.approx(0, abs=1e-12)

    def test_classical_mixture(self):
        assert co.discord_numeric(CLASSICAL_MIX).discord == pytest.approx(0, abs=1e-12)


class TestXStateClosedForm:
    def test_bell(self):
        q = co.discord_xstate(qmat.XStateEntries(0, 0.5, 0.5, 0, 0.5))
        assert q.Q == pytest.approx(1)
        assert q.S0 == 0 and q.theta1 == pytest.approx(1) and q.S1 == pytest.approx(0, abs=1e-12)

    def test_maximally_mixed(self):
        q = co.discord_xstate(qmat.XStateEntries(0.25, 0.25, 0.25, 0.25, 0))
        assert (q.Q, q.S0, q.S1, q.theta1) == pytest.approx((0, 1, 1, 0), abs=1e-14)

    def test_rejects_invalid(self):
        with pytest.raises(ValidationError):
            co.discord_xstate(qmat.XStateEntries(0.5, 0.5, 0.5, 0.0, 0))

    def test_entanglement(self):
        assert co.entanglement_xstate(qmat.XStateEntries(0, 0.5, 0.5, 0, 0.5)) == pytest.approx(1)
        assert co.entanglement_xstate(qmat.XStateEntries(0.25, 0.25, 0.25, 0.25, 0)) == 0
        assert co.entanglement_xstate(qmat.XStateEntries(0.25, 0.25, 0.25, 0.25, 0.25)) == 0

    def test_entanglement_is_concurrence(self, rng):
        for _ in range(20):
            e = random_xstate(rng)
            assert co.concurrence(e.to_matrix()) == pytest.approx(co.entanglement_xstate(e), abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_swap_and_phase_invariance(self, seed):
        rng = np.random.default_rng(seed)
        e = random_xstate(rng)
        q, ent = co.discord_xstate(e).Q, co.entanglement_xstate(e)
        rot = qmat.XStateEntries(e.u, e.x, e.y, e.v, e.z * np.exp(1j * rng.uniform(0, 6.3)))
        for other in (e.swapped(), rot):
            assert abs(co.discord_xstate(other).Q - q) <= 1e-12
            assert abs(co.entanglement_xstate(other) - ent) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_closed_form_upper_bounds_numeric(self, seed):
        e = random_xstate(np.random.default_rng(seed))
        r = co.correlation_report(e.to_matrix())
        assert r.closed_form_Q >= r.discord - 1e-9
        assert abs(r.closed_form_Q - r.discord) <= 1e-3 or r.closed_form_Q > r.discord

    def test_general_x_states_residual_small(self, rng):
        resid = [co.correlation_report(random_xstate(rng).to_matrix()).closed_form_residual for _ in range(100)]
        assert min(resid) >= -1e-9
        assert max(resid) <= 1e-2


class TestReport:
    def test_bell(self, bell):
        r = co.correlation_report(bell)
        assert (r.mutual_info, r.classical, r.discord, r.entanglement) == pytest.approx((2, 1, 1, 1), abs=1e-12)
        assert r.closed_form_Q == pytest.approx(1)

    def test_product_thermal(self):
        single = np.diag([2 / 3, 1 / 3])
        r = co.correlation_report(np.kron(single, single))
        for v in (r.mutual_info, r.classical, r.discord, r.entanglement):
            assert abs(v) <= 1e-9

    def test_thermal_cross_check(self):
        r = co.correlation_report(sm.thermal_state(sm.ModelParams(1.0, 0.0, 0.1), 1.0))
        assert abs(r.closed_form_Q - r.discord) <= 1e-3

    def test_non_x_state_has_no_closed_form(self, rng):
        r = co.correlation_report(random_state(rng))
        assert r.closed_form_Q is None and r.theta1 is None
        assert 0 <= r.classical <= r.mutual_info + 1e-9
        assert r.discord == pytest.approx(r.mutual_info - r.classical, abs=1e-12)

    def test_ranges_on_random_states(self, rng):
        for r in co.correlation_reports([random_state(rng, rank=rng.integers(1, 5)) for _ in range(50)]):
            assert 0 <= r.classical <= r.mutual_info + 1e-9
            assert r.discord >= -1e-9
            assert abs(r.discord - (r.mutual_info - r.classical)) <= 1e-12
