"""
Tests for the trapezoidal integrator: amplification factors, the weighted
stability functional and second-order convergence.
"""

import numpy as np
import pytest

from src.advection.model import AdvectionSystem, closed_form_aw, steady_state_aw
from src.diagnostics.sink import DiagnosticsSink
from src.hermite.core import CoefficientVector, HermiteBasis, weighted_norm_sq
from src.integrators.trapezoidal import (
    TrapezoidalIntegrator,
    TrapState,
    chi,
    stability_norm_y,
    stability_weights,
    time_step_heuristic,
    trap_step,
    weighted_stability_sum,
)
from src.models import BasisKind
from src.operators.lenard_bernstein import build_lb

TRIPLES = 50
STEPS = 500


def aw_system(values, nu, k=1):
    N = len(values) - 1  # noqa: N806
    basis = HermiteBasis.build(BasisKind.AW, N)
    return AdvectionSystem.create(
        CoefficientVector(basis, values), lb=build_lb(BasisKind.AW, k, nu, N)
    )


# =============================================================================
# Scalar helpers
# =============================================================================


class TestHelpers:
    """chi, the heuristic and the weights."""

    def test_chi_formula(self):
        assert chi(2, 1.0, 0.5) == pytest.approx((1 - 0.5) / (1 + 0.5))

    def test_chi_invalid(self):
        with pytest.raises(ValueError):
            chi(0, 1.0, 0.1)
        with pytest.raises(ValueError):
            chi(1, 1.0, 0.0)

    def test_heuristic(self):
        """nu N dt = 1/2."""
        assert time_step_heuristic(1.0, 10) == pytest.approx(0.05)
        with pytest.raises(ValueError):
            time_step_heuristic(1.0, 0)

    def test_weight_recursion(self):
        """w_1 = 1, w_{n+1} = nu^2 (n+1)(n-1/2) w_n."""
        weights = stability_weights(2.0, 4)
        assert weights[1] == 1.0
        assert weights[2] == pytest.approx(4.0 * 2 * 0.5)
        assert weights[3] == pytest.approx(4.0 * 3 * 1.5 * weights[2])

    def test_y_parts(self):
        basis = HermiteBasis.build(BasisKind.AW, 2)
        c = CoefficientVector(basis, np.array([1.0, 2.0, 3.0]))
        weights = stability_weights(1.0, 2)
        y = stability_norm_y(c, weights)
        assert y.weighted_sum == pytest.approx(4.0 + 1.0 * 9.0)
        assert y.correction == pytest.approx(2.0)
        assert y.value == pytest.approx(11.0)


# =============================================================================
# Stability
# =============================================================================


class TestStability:
    """Discrete decay of the weighted functionals."""

    def test_random_triples(self):
        """|chi_n| < 1 and sum w_n C_n^2 never grows when C_0 = 0."""
        rng = np.random.default_rng(2024)
        for _ in range(TRIPLES):
            nu = float(rng.uniform(0.1, 3.0))
            dt = float(rng.uniform(1e-3, 1.0))
            N = int(rng.integers(1, 21))  # noqa: N806
            assert all(abs(chi(n, nu, dt)) < 1.0 for n in range(1, N + 1))

            values = rng.standard_normal(N + 1)
            values[0] = 0.0
            system = aw_system(values, nu)
            weights = stability_weights(nu, N)
            state = TrapState.initial(system.initial, dt)
            previous = weighted_stability_sum(state.c, weights)
            for _ in range(STEPS):
                state = trap_step(state, system)
                current = weighted_stability_sum(state.c, weights)
                assert current <= previous * (1.0 + 1e-10)
                previous = current

    @pytest.mark.parametrize("nu,dt", [(0.5, 0.1), (1.0, 0.05), (3.0, 0.4)])
    def test_first_mode_powers_of_chi(self, nu, dt):
        """With C_0 = 0 the first mode is C_1^j = chi_1^j C_1^0; C_2 obeys its row."""
        rng = np.random.default_rng(17)
        values = rng.standard_normal(7)
        values[0] = 0.0
        system = aw_system(values, nu)
        state = TrapState.initial(system.initial, dt)
        factor = chi(1, nu, dt)
        for j in range(1, 41):
            previous = state.c.values
            state = trap_step(state, system)
            current = state.c.values
            assert current[0] == 0.0
            assert current[1] == pytest.approx(factor**j * values[1], rel=1e-12, abs=1e-15)
            lhs = current[2] * (1.0 + nu * dt)
            rhs = previous[2] * (1.0 - nu * dt) - 0.5 * dt * (current[1] + previous[1])
            assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_distance_to_steady_state(self):
        """With C_00 != 0 the weighted distance to the fixed point never grows."""
        nu, dt, N = 0.7, 0.2, 8  # noqa: N806
        rng = np.random.default_rng(5)
        values = rng.standard_normal(N + 1)
        system = aw_system(values, nu)
        steady = steady_state_aw(system.basis, values[0], nu).values
        weights = stability_weights(nu, N)
        state = TrapState.initial(system.initial, dt)
        previous = weighted_stability_sum(state.c.with_values(state.c.values - steady), weights)
        for _ in range(200):
            state = trap_step(state, system)
            distance = state.c.with_values(state.c.values - steady)
            current = weighted_stability_sum(distance, weights)
            assert current <= previous * (1.0 + 1e-10)
            previous = current

    def test_sw_pure_advection_conserves_norm(self):
        """The scheme keeps the SW weighted norm to round-off."""
        rng = np.random.default_rng(11)
        basis = HermiteBasis.build(BasisKind.SW, 10)
        system = AdvectionSystem.create(CoefficientVector(basis, rng.standard_normal(11)))
        state = TrapState.initial(system.initial, 0.1)
        norm0 = weighted_norm_sq(state.c)
        for _ in range(50):
            state = trap_step(state, system)
        assert weighted_norm_sq(state.c) == pytest.approx(norm0, rel=1e-11)

    def test_non_positive_step(self):
        basis = HermiteBasis.build(BasisKind.AW, 2)
        system = AdvectionSystem.create(CoefficientVector(basis, np.ones(3)))
        with pytest.raises(ValueError):
            TrapState.initial(system.initial, 0.0)
        with pytest.raises(ValueError):
            trap_step(TrapState(c=system.initial, t=0.0, dt=-0.1), system)


# =============================================================================
# Accuracy
# =============================================================================


class TestConvergence:
    """Second-order accuracy against the k = 1 closed form."""

    def test_observed_order(self):
        rng = np.random.default_rng(9)
        nu, T, N = 1.0, 1.0, 6  # noqa: N806
        values = rng.standard_normal(N + 1)
        system = aw_system(values, nu)
        exact = closed_form_aw(system.initial, nu, T).values
        errors = []
        for dt in (0.1, 0.05, 0.025, 0.0125):
            integrator = TrapezoidalIntegrator(system, dt)
            final = integrator.run(int(round(T / dt)))
            assert final.t == pytest.approx(T)
            errors.append(np.max(np.abs(final.c.values - exact)))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert 1.8 <= orders[-1] <= 2.2

    def test_unstabilized_first_mode_exact(self):
        """C_1 is linear in t, which the trapezoidal rule integrates exactly."""
        basis = HermiteBasis.build(BasisKind.AW, 3)
        system = AdvectionSystem.create(CoefficientVector(basis, np.array([0.5, 1.0, 0.0, 0.0])))
        final = TrapezoidalIntegrator(system, 0.1).run(20)
        assert final.c.values[1] == pytest.approx(1.0 - 0.5 * 2.0, abs=1e-13)


# =============================================================================
# Driver
# =============================================================================


class TestIntegrator:
    """Records emitted by TrapezoidalIntegrator.run."""

    def test_records(self):
        system = aw_system(np.array([1.0, 0.0, 0.0, 0.0]), 1.0)
        sink = DiagnosticsSink()
        integrator = TrapezoidalIntegrator(system, 0.05)
        integrator.run(10, sink=sink, record_every=5)
        frame = sink.to_frame()
        assert list(frame["step"]) == [0, 5, 10]
        assert np.allclose(frame["mass"], frame["mass"].iloc[0], rtol=0, atol=1e-15)
        assert frame["stability_Y"].notna().all()
        assert {"c0", "c3", "schema_version"} <= set(frame.columns)

    def test_no_y_for_sw(self):
        basis = HermiteBasis.build(BasisKind.SW, 3)
        system = AdvectionSystem.create(CoefficientVector(basis, np.ones(4)))
        record = TrapezoidalIntegrator(system, 0.1).record(
            TrapState.initial(system.initial, 0.1)
        )
        assert record.stability_Y is None
        assert record.mass is None

    def test_step_callback(self):
        system = aw_system(np.array([1.0, 0.0, 0.0]), 1.0)
        seen = []
        TrapezoidalIntegrator(system, 0.1).run(3, on_step=lambda s: seen.append(s.step_index))
        assert seen == [1, 2, 3]
