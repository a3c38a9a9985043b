"""
Tests for the Vlasov-Poisson right-hand side, implicit step and driver.

The right-hand side is checked against an independent collocation evaluation
of the kinetic equation built on numpy's Hermite module and FFT sampling; the
step is checked for conservation on a weak Landau damping run.
"""

import logging
import math

import numpy as np
import pytest
from numpy.polynomial import hermite as nph

from src.diagnostics.moments import moment
from src.diagnostics.records import total_energy
from src.diagnostics.sink import DiagnosticsSink
from src.errors import PicardNonConvergenceError
from src.hermite.core import SQRT_PI, HermiteBasis
from src.models import BasisKind, DealiasMode, FieldTreatment, VPConfig
from src.operators.lenard_bernstein import build_lb
from src.vlasov.field import CoefficientField, ElectricField, gauss_residual, poisson_solve
from src.vlasov.initial import build_initial_state, equilibrium_state, landau_state
from src.vlasov.snapshots import read_snapshot
from src.vlasov.solver import (
    VlasovPoissonOperator,
    VlasovPoissonSolver,
    convolve_modes,
    field_coupling_matrix,
    flatten,
    unflatten,
    vlasov_rhs,
    vp_step,
)

LX = 4.0 * math.pi


def random_state(rng, N, Mx, Lx=LX):  # noqa: N803
    """Neutral, real-valued random state with moderately sized coefficients."""
    basis = HermiteBasis.build(BasisKind.AW, N)
    shape = (2 * Mx + 1, N + 1)
    chat = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * basis.gammas
    chat[Mx, 0] = 1.0 / SQRT_PI
    return CoefficientField(chat, Lx, basis).symmetrized()


def collocation_rhs(state, E, nu, k):  # noqa: N803
    """
    dC/dt by sampling h = f e^{v^2} on an alias-free x grid and Gauss-Hermite
    nodes, applying the equation pointwise and projecting back.
    """
    Mx, N = state.Mx, state.N  # noqa: N806
    points = 4 * Mx + 3
    x = np.arange(points) * state.Lx / points
    phases = np.exp(1j * np.outer(x, state.kappa))
    v, w = nph.hermgauss(N + 10)

    coeffs = (phases @ state.Chat).T  # (N+1, points)
    h = nph.hermval(v, coeffs)  # (points, Q)
    dh_dx = nph.hermval(v, (phases @ (1j * state.kappa[:, None] * state.Chat)).T)
    dh_dv = nph.hermval(v, nph.hermder(coeffs, axis=0))
    e_grid = phases @ E.Ehat

    stream = -v[None, :] * dh_dx
    accel = e_grid[:, None] * (dh_dv - 2.0 * v[None, :] * h)
    lb_values = np.zeros_like(h)
    if k:
        columns = []
        for j in range(points):
            g = coeffs[:, j]
            for _ in range(k):
                g = nph.hermder(g) / 2.0
            for _ in range(k):
                g = nph.hermsub(nph.hermder(g), 2.0 * nph.hermmulx(g))
            columns.append(nph.hermval(v, g))
        lb_values = -nu * (-1) ** k * np.array(columns)
    total = stream + accel + lb_values

    vander = nph.hermvander(v, N)
    norms = np.array([SQRT_PI * 2**n * math.factorial(n) for n in range(N + 1)])
    per_x = total @ (w[:, None] * vander) / norms  # (points, N+1)
    return np.conj(phases).T @ per_x / points


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def landau_cfg():
    return VPConfig(N=32, Mx=8, Lx=LX, amplitude=0.01, k=3, nu=1.0, picard_tol=1e-13)


# =============================================================================
# Pseudo-spectral Product
# =============================================================================


class TestProduct:
    """E * C through the grid and through the coupling matrix."""

    def test_two_thirds_is_exact_convolution(self, rng):
        Mx = 4  # noqa: N806
        ehat = rng.standard_normal(2 * Mx + 1) + 1j * rng.standard_normal(2 * Mx + 1)
        c = rng.standard_normal((2 * Mx + 1, 3)) + 0j
        expected = np.zeros_like(c)
        for m in range(-Mx, Mx + 1):
            for p in range(-Mx, Mx + 1):
                if abs(m - p) <= Mx:
                    expected[m + Mx] += ehat[m - p + Mx] * c[p + Mx]
        got = convolve_modes(ehat, c, DealiasMode.TWO_THIRDS)
        np.testing.assert_allclose(got, expected, atol=1e-12)

    @pytest.mark.parametrize("dealias", list(DealiasMode))
    def test_matrix_matches_grid(self, dealias, rng):
        Mx = 3  # noqa: N806
        ehat = rng.standard_normal(2 * Mx + 1) + 1j * rng.standard_normal(2 * Mx + 1)
        c = rng.standard_normal((2 * Mx + 1, 1)) + 1j * rng.standard_normal((2 * Mx + 1, 1))
        np.testing.assert_allclose(
            field_coupling_matrix(ehat, dealias) @ c[:, 0],
            convolve_modes(ehat, c, dealias)[:, 0],
            atol=1e-12,
        )

    def test_aliasing_differs(self, rng):
        """Without padding the top modes pick up aliased products."""
        Mx = 3  # noqa: N806
        ehat = np.zeros(2 * Mx + 1, dtype=complex)
        ehat[2 * Mx] = 1.0  # E^_3
        c = np.zeros((2 * Mx + 1, 1), dtype=complex)
        c[2 * Mx] = 1.0  # C^_3
        assert np.all(convolve_modes(ehat, c, DealiasMode.TWO_THIRDS) == 0)
        aliased = convolve_modes(ehat, c, DealiasMode.NONE)
        assert abs(aliased[Mx - 1, 0] - 1.0) < 1e-12  # mode 6 folds onto -1


# =============================================================================
# Right-hand Side
# =============================================================================


class TestRightHandSide:
    """vlasov_rhs against collocation and the sparse operator."""

    def test_collocation_agreement(self, rng):
        for _ in range(20):
            N = int(rng.integers(2, 9))  # noqa: N806
            Mx = int(rng.integers(1, 5))  # noqa: N806
            k = int(rng.integers(1, min(N, 3) + 1))
            nu = float(rng.uniform(0.1, 2.0))
            state = random_state(rng, N, Mx)
            E = poisson_solve(state.Chat[:, 0], state.Lx)  # noqa: N806
            lb = build_lb(BasisKind.AW, k, nu, N)
            cfg = VPConfig(N=N, Mx=Mx, k=k, nu=nu)
            spectral = vlasov_rhs(state, E, lb, cfg).Chat
            oracle = collocation_rhs(state, E, nu, k)
            scale = max(1.0, float(np.max(np.abs(oracle))))
            assert np.max(np.abs(spectral - oracle)) < 1e-6 * scale

    def test_streaming_only(self):
        """A single (m=1, n=1) mode streams into n = 0 and n = 2."""
        basis = HermiteBasis.build(BasisKind.AW, 3)
        state = CoefficientField.zeros(basis, 1, LX)
        chat = np.array(state.Chat)
        chat[2, 1] = 1.0
        out = vlasov_rhs(state.with_chat(chat), poisson_solve(np.zeros(3), LX)).Chat
        kappa = 2 * math.pi / LX
        assert out[2, 0] == pytest.approx(-1j * kappa * 1.0)
        assert out[2, 2] == pytest.approx(-1j * kappa * 0.5)

    def test_density_mode_streams_into_first_moment(self):
        basis = HermiteBasis.build(BasisKind.AW, 3)
        chat = np.zeros((3, 4), dtype=complex)
        chat[1, 0] = 1.0 / SQRT_PI
        chat[2, 0] = chat[0, 0] = 1.0
        state = CoefficientField(chat, LX, basis)
        out = vlasov_rhs(state, ElectricField.zeros(1, LX)).Chat
        kappa = 2 * math.pi / LX
        assert out[2, 1] == pytest.approx(-1j * kappa * 0.5)
        assert out[0, 1] == pytest.approx(1j * kappa * 0.5)
        assert np.all(out[:, 0] == 0)

    def test_uniform_state_is_stationary(self, rng):
        basis = HermiteBasis.build(BasisKind.AW, 5)
        chat = np.zeros((5, 6), dtype=complex)
        chat[2] = rng.standard_normal(6)
        state = CoefficientField(chat, LX, basis)
        out = vlasov_rhs(state, ElectricField.zeros(2, LX)).Chat
        assert np.all(out == 0)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_lb_only_decay(self, k, rng):
        basis = HermiteBasis.build(BasisKind.AW, 6)
        chat = np.zeros((3, 7), dtype=complex)
        chat[1] = rng.standard_normal(7)
        state = CoefficientField(chat, LX, basis)
        lb = build_lb(BasisKind.AW, k, 0.3, 6)
        out = vlasov_rhs(state, ElectricField.zeros(1, LX), lb).Chat
        np.testing.assert_allclose(out[1], -lb.decay_rates * chat[1])
        assert np.all(lb.decay_rates >= 0)

    @pytest.mark.parametrize("dealias", list(DealiasMode))
    def test_operator_matches_rhs(self, dealias, rng):
        N, Mx = 5, 3  # noqa: N806
        state = random_state(rng, N, Mx)
        E = poisson_solve(state.Chat[:, 0], LX)  # noqa: N806
        lb = build_lb(BasisKind.AW, 2, 0.7, N)
        cfg = VPConfig(N=N, Mx=Mx, k=2, nu=0.7, dealias=dealias)
        operator = VlasovPoissonOperator(N, Mx, LX, lb, dealias)
        direct = flatten(vlasov_rhs(state, E, lb, cfg).Chat)
        applied = operator.matrix(E.Ehat) @ flatten(state.Chat)
        np.testing.assert_allclose(applied, direct, atol=1e-12)

    def test_flatten_round_trip(self, rng):
        chat = rng.standard_normal((5, 4)) + 0j
        np.testing.assert_array_equal(unflatten(flatten(chat), 2, 3), chat)


# =============================================================================
# Time Step
# =============================================================================


class TestStep:
    """vp_step: fixed points, Picard behaviour, realness."""

    def test_equilibrium_fixed_point(self):
        cfg = VPConfig(N=8, Mx=4, ic="equilibrium", k=2)
        basis = HermiteBasis.build(BasisKind.AW, 8)
        state = equilibrium_state(cfg, basis)
        lb = build_lb(BasisKind.AW, 2, cfg.nu, 8)
        new, E, stats = vp_step(state, cfg, lb)  # noqa: N806
        assert np.max(np.abs(new.Chat - state.Chat)) < 1e-13
        assert stats.iterations == 1
        assert np.max(np.abs(E.Ehat)) < 1e-15

    def test_zero_step_is_identity(self):
        cfg = VPConfig(N=4, Mx=2)
        state = landau_state(cfg, HermiteBasis.build(BasisKind.AW, 4))
        new, _, stats = vp_step(state, cfg, dt=0.0)
        assert new is state
        assert stats.iterations == 0

    def test_negative_step(self):
        cfg = VPConfig(N=4, Mx=2)
        state = landau_state(cfg, HermiteBasis.build(BasisKind.AW, 4))
        with pytest.raises(ValueError):
            vp_step(state, cfg, dt=-0.1)

    def test_realness_and_consistency(self):
        """The accepted state is real and satisfies the scheme at the midpoint field."""
        cfg = VPConfig(N=10, Mx=4, amplitude=0.2, k=2, picard_tol=1e-13)
        basis = HermiteBasis.build(BasisKind.AW, 10)
        lb = build_lb(BasisKind.AW, 2, cfg.nu, 10)
        state = landau_state(cfg, basis)
        E0 = poisson_solve(state.Chat[:, 0], LX)  # noqa: N806
        new, E1, _ = vp_step(state, cfg, lb, E_prev=E0, dt=0.05)  # noqa: N806
        assert new.hermitian_defect() < 1e-15
        mid_field = type(E0)(0.5 * (E0.Ehat + E1.Ehat), LX)
        mid_state = state.with_chat(0.5 * (state.Chat + new.Chat))
        rhs = vlasov_rhs(mid_state, mid_field, lb, cfg).Chat
        np.testing.assert_allclose((new.Chat - state.Chat) / 0.05, rhs, atol=1e-10)

    def test_explicit_field_single_solve(self):
        cfg = VPConfig(N=6, Mx=3, amplitude=0.1, field_treatment=FieldTreatment.EXPLICIT)
        state = landau_state(cfg, HermiteBasis.build(BasisKind.AW, 6))
        _, _, stats = vp_step(state, cfg, build_lb(BasisKind.AW, 1, 1.0, 6), dt=0.05)
        assert stats.iterations == 1

    def test_picard_converges_quickly(self):
        cfg = VPConfig(N=16, Mx=4, amplitude=0.01, k=2, picard_tol=1e-10)
        basis = HermiteBasis.build(BasisKind.AW, 16)
        state = landau_state(cfg, basis)
        _, _, stats = vp_step(state, cfg, build_lb(BasisKind.AW, 2, cfg.nu, 16))
        assert 1 <= stats.iterations <= 10
        assert stats.residual < 1e-10

    def test_picard_tolerance_consistency(self):
        """Halving picard_tol moves the accepted state by less than 10 tol."""
        tol = 1e-8
        cfg = VPConfig(N=10, Mx=4, amplitude=0.2, k=2, picard_tol=tol)
        basis = HermiteBasis.build(BasisKind.AW, 10)
        lb = build_lb(BasisKind.AW, 2, cfg.nu, 10)
        state = landau_state(cfg, basis)
        coarse, _, _ = vp_step(state, cfg, lb, dt=0.05)
        tight_cfg = cfg.model_copy(update={"picard_tol": tol / 2})
        fine, _, _ = vp_step(state, tight_cfg, lb, dt=0.05)
        assert np.max(np.abs(coarse.Chat - fine.Chat)) < 10 * tol

    def test_picard_budget(self):
        cfg = VPConfig(N=6, Mx=3, amplitude=0.3, picard_max=1)
        state = landau_state(cfg, HermiteBasis.build(BasisKind.AW, 6))
        with pytest.raises(PicardNonConvergenceError) as info:
            vp_step(state, cfg, dt=0.1)
        assert info.value.iterations == 1
        assert info.value.residual > cfg.picard_tol


# =============================================================================
# Conservation
# =============================================================================


class TestLandauConservation:
    """Weak Landau damping, 200 steps at the heuristic time step."""

    def run(self, cfg, steps=200, drift=0.0):
        solver = VlasovPoissonSolver(cfg)
        state = solver.initial_state()
        if drift:
            chat = state.Chat.copy()
            chat[:, 1] += drift * chat[:, 0]
            state = state.with_chat(chat)
        E = poisson_solve(state.Chat[:, 0], LX)  # noqa: N806
        history = [(state, E)]
        for _ in range(steps):
            state, E, _ = solver.step(state, E)  # noqa: N806
            history.append((state, E))
        return history

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_conservation(self, landau_cfg, k):
        cfg = landau_cfg.model_copy(update={"k": k})
        history = self.run(cfg)
        mass0 = moment(history[0][0], 0)
        momentum0 = moment(history[0][0], 1)
        energy0 = total_energy(*history[0])
        for state, E in history:  # noqa: N806
            assert abs(moment(state, 0) - mass0) < 1e-12 * abs(mass0)
            assert gauss_residual(state, E) < 1e-10
            if k >= 2:
                assert abs(moment(state, 1) - momentum0) < 1e-10
            if k >= 3:
                assert abs(total_energy(state, E) - energy0) < 1e-10 * abs(energy0)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_drifting_momentum(self, landau_cfg, k):
        """A drifting Maxwellian keeps its momentum for k >= 2 and loses it for k = 1."""
        history = self.run(landau_cfg.model_copy(update={"k": k}), drift=0.3)
        momentum0 = moment(history[0][0], 1)
        assert momentum0 == pytest.approx(0.3 * LX)
        drift = max(abs(moment(state, 1) - momentum0) for state, _ in history)
        if k == 1:
            assert drift > 1.0
        else:
            assert drift < 1e-10

    def test_field_free_second_moment(self):
        """With no field the LB term alone keeps moment 2 for k = 3."""
        cfg = VPConfig(N=8, Mx=2, k=3, nu=2.0)
        basis = HermiteBasis.build(BasisKind.AW, 8)
        rng = np.random.default_rng(3)
        chat = np.zeros((5, 9), dtype=complex)
        chat[2] = rng.standard_normal(9) * basis.gammas
        chat[2, 0] = 1.0 / SQRT_PI
        state = CoefficientField(chat, cfg.Lx, basis)
        lb = build_lb(BasisKind.AW, 3, 2.0, 8)
        m2 = moment(state, 2)
        for _ in range(20):
            state, E, _ = vp_step(state, cfg, lb, dt=0.05)  # noqa: N806
            assert np.max(np.abs(E.Ehat)) < 1e-15
        assert moment(state, 2) == pytest.approx(m2, abs=1e-12)
        assert moment(state, 3) != pytest.approx(moment(state.with_chat(chat), 3))


# =============================================================================
# Driver
# =============================================================================


class TestDriver:
    """VlasovPoissonSolver.run with sink and snapshots."""

    def test_run_records_and_snapshots(self, tmp_path):
        cfg = VPConfig(
            N=6, Mx=3, T=0.25, dt=0.05, snapshot_every=2, snapshot_format="text", amplitude=0.05
        )
        sink = DiagnosticsSink()
        solver = VlasovPoissonSolver(cfg)
        state, _ = solver.run(sink=sink, snapshot_dir=tmp_path)
        frame = sink.to_frame()
        assert list(frame["step"]) == [0, 1, 2, 3, 4, 5]
        assert frame["mass"].max() - frame["mass"].min() < 1e-12
        assert (frame["picard_iterations"].iloc[1:] >= 1).all()
        snapshots = sorted(tmp_path.glob("snapshot_*.txt"))
        assert [p.name for p in snapshots] == [
            "snapshot_000000.txt",
            "snapshot_000002.txt",
            "snapshot_000004.txt",
        ]
        loaded, t = read_snapshot(snapshots[-1])
        assert t == pytest.approx(0.2)
        assert loaded.N == 6 and loaded.Mx == 3

    def test_binary_snapshot(self, tmp_path):
        cfg = VPConfig(N=4, Mx=2, T=0.1, dt=0.05, snapshot_every=1)
        solver = VlasovPoissonSolver(cfg)
        state, _ = solver.run(snapshot_dir=tmp_path)
        loaded, t = read_snapshot(tmp_path / "snapshot_000002.bin")
        np.testing.assert_array_equal(loaded.Chat, state.Chat)
        assert loaded.Lx == cfg.Lx
        assert t == pytest.approx(0.1)

    def test_neutrality_warning_once_per_run(self, caplog):
        """A charged state is reported once, not on every Picard sweep."""
        cfg = VPConfig(N=6, Mx=3, T=0.2, dt=0.05, amplitude=0.05)
        solver = VlasovPoissonSolver(cfg)
        state = solver.initial_state()
        chat = state.Chat.copy()
        chat[cfg.Mx, 0] *= 1.5
        with caplog.at_level(logging.WARNING):
            _, E = solver.run(state=state.with_chat(chat))  # noqa: N806
        warnings = [r for r in caplog.records if "Neutrality" in r.getMessage()]
        assert len(warnings) == 1
        assert E.neutrality_defect == pytest.approx(0.5)

    def test_initial_state_dispatch(self):
        cfg = VPConfig(N=4, Mx=2, amplitude=0.2, mode=2)
        state = build_initial_state(cfg, HermiteBasis.build(BasisKind.AW, 4))
        assert state.mode(2)[0] == pytest.approx(0.1 / SQRT_PI)
        assert state.mode(1)[0] == 0
