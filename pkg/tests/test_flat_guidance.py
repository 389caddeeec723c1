import math

import numpy as np
import pytest

from heolsim.flat_guidance import (
    BrunovskyInputs,
    SingularityError,
    brunovsky_from_physical,
    flat_feedforward,
    flat_heading,
    physical_from_brunovsky,
    unwrap_heading,
)
from heolsim.reference_trajectory import TrajectorySpec, sample
from heolsim.sim_engine import rk4_step
from heolsim.vessel_dynamics import ControlInputs, hovercraft_derivative


class TestFlatHeading:
    def test_motion_along_x(self):
        assert flat_heading((1.0, 0.0), (0.0, 0.0), beta=10.0) == pytest.approx(0.0)

    def test_motion_along_y(self):
        psi = flat_heading((0.0, 0.0), (1.0, 0.0), beta=10.0)
        assert psi == pytest.approx(math.pi / 2)

    def test_singularity_raises(self):
        with pytest.raises(SingularityError):
            flat_heading((0.0, 0.0), (0.0, 0.0), beta=10.0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            xd = tuple(rng.uniform(-3, 3, size=2))
            yd = tuple(rng.uniform(-3, 3, size=2))
            base = flat_heading(xd, yd, beta=4.0)
            k = rng.uniform(0.1, 50.0)
            scaled = flat_heading((k * xd[0], k * xd[1]), (k * yd[0], k * yd[1]),
                                  beta=4.0)
            assert scaled == pytest.approx(base, abs=1e-12)

    def test_recovers_heading_of_simulated_vehicle(self):
        # Drive the plant open loop with smooth positive thrust, then invert
        # the recorded motion.  Inertial accelerations come from finite
        # differences of the recorded velocities, keeping the oracle
        # independent of the model equations.
        beta, gamma = 4.0, 2.0
        dt = 1e-3
        n = 4000
        state = (0.0, 0.0, 0.2, 1.0, 0.0, 0.0)
        states = [state]
        for i in range(n):
            t = i * dt
            ctrl = ControlInputs(Fu=12.0 + 2.0 * math.sin(0.5 * t),
                                 Gamma_r=0.3 * math.cos(0.7 * t))
            state = rk4_step(
                lambda s, _c=ctrl: hovercraft_derivative(s, _c, beta, gamma),
                state, dt,
            )
            states.append(state)
        arr = np.array(states)
        psi_rec = arr[:, 2]
        vx = arr[:, 3] * np.cos(psi_rec) - arr[:, 4] * np.sin(psi_rec)
        vy = arr[:, 3] * np.sin(psi_rec) + arr[:, 4] * np.cos(psi_rec)
        ax = np.gradient(vx, dt)
        ay = np.gradient(vy, dt)
        for i in range(50, n - 50, 97):
            psi = flat_heading((vx[i], ax[i]), (vy[i], ay[i]), beta)
            diff = (psi - psi_rec[i] + math.pi) % (2 * math.pi) - math.pi
            assert abs(diff) < 1e-6


class TestFlatFeedforward:
    def test_line_reference(self):
        ref = sample(TrajectorySpec.line(speed=2.0), 4.0)
        ff = flat_feedforward(ref, beta=10.0, gamma=1.0)
        assert ff.psi == pytest.approx(0.0)
        assert ff.r == pytest.approx(0.0)
        assert ff.Gamma_r == pytest.approx(0.0)
        assert ff.u == pytest.approx(2.0)
        assert ff.v == pytest.approx(0.0)
        assert ff.Fu == pytest.approx(20.0)

    def test_circle_at_zero_is_finite(self):
        ref = sample(TrajectorySpec.circle(radius=1.0, angular_rate=1.0), 0.0)
        ff = flat_feedforward(ref, beta=10.0, gamma=1.0)
        assert ff.psi == pytest.approx(math.atan2(10.0, -1.0))
        assert math.isfinite(ff.Fu) and math.isfinite(ff.Gamma_r)

    def test_heading_rates_match_finite_differences(self):
        spec = TrajectorySpec.circle(radius=2.0, angular_rate=0.8, phase=0.4)
        beta, gamma = 6.0, 1.5
        h = 1e-5
        for t in (0.7, 2.9, 5.3):
            psis = []
            for tt in (t - h, t, t + h):
                psis.append(flat_feedforward(sample(spec, tt), beta, gamma).psi)
            psis = np.unwrap(psis)
            ff = flat_feedforward(sample(spec, t), beta, gamma)
            fd_rate = (psis[2] - psis[0]) / (2 * h)
            fd_acc = (psis[2] - 2 * psis[1] + psis[0]) / h**2
            assert ff.r == pytest.approx(fd_rate, rel=1e-7, abs=1e-8)
            assert ff.Gamma_r - gamma * ff.r == pytest.approx(fd_acc, rel=1e-4, abs=1e-4)

    def test_singular_reference_raises(self):
        ref = sample(TrajectorySpec.line(speed=2.0), 1.0)
        still = type(ref)(t=1.0, x_d=(1.0, 0.0, 0.0, 0.0, 0.0),
                          y_d=(0.0, 0.0, 0.0, 0.0, 0.0))
        with pytest.raises(SingularityError):
            flat_feedforward(still, beta=10.0, gamma=1.0)

    def test_open_loop_inputs_track_the_reference(self):
        # The defining property: feeding the inverted inputs into the exact
        # plant reproduces the flat outputs to integration accuracy.
        spec = TrajectorySpec.circle(radius=1.0, angular_rate=1.0)
        beta, gamma = 10.0, 1.0
        dt = 1e-3
        ff0 = flat_feedforward(sample(spec, 0.0), beta, gamma)
        ref0 = sample(spec, 0.0)
        state = (ref0.x_d[0], ref0.y_d[0], ff0.psi, ff0.u, ff0.v, ff0.r)
        worst = 0.0
        for i in range(5000):
            ff = flat_feedforward(sample(spec, i * dt), beta, gamma)
            ctrl = ControlInputs(Fu=ff.Fu, Gamma_r=ff.Gamma_r)
            state = rk4_step(
                lambda s, _c=ctrl: hovercraft_derivative(s, _c, beta, gamma),
                state, dt,
            )
            ref = sample(spec, (i + 1) * dt)
            worst = max(worst, math.hypot(state[0] - ref.x_d[0],
                                          state[1] - ref.y_d[0]))
        assert worst < 1e-6


class TestBrunovskyMaps:
    def test_steady_cruise_is_origin(self):
        w = brunovsky_from_physical(Fu=20.0, psi=0.0, vx=2.0, vy=0.0, beta=10.0)
        assert w.wx == pytest.approx(0.0)
        assert w.wy == pytest.approx(0.0)

    def test_zero_thrust_zero_speed(self):
        w = brunovsky_from_physical(Fu=0.0, psi=1.234, vx=0.0, vy=0.0, beta=10.0)
        assert (w.wx, w.wy) == (0.0, 0.0)

    def test_reconstruction_examples(self):
        psi, fu = physical_from_brunovsky(BrunovskyInputs(0.0, 0.0), 2.0, 0.0, 10.0)
        assert psi == pytest.approx(0.0)
        assert fu == pytest.approx(20.0)
        psi, fu = physical_from_brunovsky(BrunovskyInputs(0.0, 0.0), 0.0, 1.0, 10.0)
        assert psi == pytest.approx(math.pi / 2)
        assert fu == pytest.approx(10.0)

    def test_roundtrip_is_identity(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            w = BrunovskyInputs(*rng.uniform(-30.0, 30.0, size=2))
            vx, vy = rng.uniform(-3.0, 3.0, size=2)
            beta = rng.uniform(0.5, 20.0)
            try:
                psi, fu = physical_from_brunovsky(w, vx, vy, beta)
            except SingularityError:
                continue
            back = brunovsky_from_physical(fu, psi, vx, vy, beta)
            assert back.wx == pytest.approx(w.wx, abs=1e-12 * max(1, abs(w.wx)))
            assert back.wy == pytest.approx(w.wy, abs=1e-12 * max(1, abs(w.wy)))

    def test_thrust_is_vector_norm_exactly(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            w = BrunovskyInputs(*rng.uniform(-30.0, 30.0, size=2))
            vx, vy = rng.uniform(-3.0, 3.0, size=2)
            beta = rng.uniform(0.5, 20.0)
            _, fu = physical_from_brunovsky(w, vx, vy, beta)
            assert fu == math.hypot(w.wx + beta * vx, w.wy + beta * vy)
            assert fu >= 0.0

    def test_reconstruction_singularity(self):
        with pytest.raises(SingularityError):
            physical_from_brunovsky(BrunovskyInputs(0.0, 0.0), 0.0, 0.0, 10.0)


class TestUnwrapHeading:
    def test_branch_crossing(self):
        out = unwrap_heading(3.1, -3.1)
        assert out == pytest.approx(-3.1 + 2 * math.pi)

    def test_no_shift_needed(self):
        assert unwrap_heading(0.0, 0.1) == 0.1

    def test_random_walk_stays_continuous(self):
        rng = np.random.default_rng(31)
        true = 0.0
        unwrapped = 0.0
        for _ in range(500):
            true += rng.uniform(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6)
            wrapped = math.atan2(math.sin(true), math.cos(true))
            new = unwrap_heading(unwrapped, wrapped)
            assert abs(new - unwrapped) < math.pi / 2
            unwrapped = new
        assert unwrapped == pytest.approx(true, abs=1e-9)
