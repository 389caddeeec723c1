"""Inner-loop heading controller.

The guidance layer outputs a heading reference; this PID (rate feedback on
the measured yaw rate, optional integral action) produces the normalized
yaw moment that makes the vessel track it.  It must run well above the
outer loop's bandwidth for the cascade to behave like the idealized
heading-as-input model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["AutopilotGains", "AutopilotState", "wrap_to_pi", "autopilot_step"]


@dataclass(frozen=True)
class AutopilotGains:
    """Heading loop gains; defaults give roughly 5x outer-loop bandwidth."""

    Kp_psi: float = 25.0
    Kd_psi: float = 10.0
    Ki_psi: float = 0.0

    def __post_init__(self):
        if self.Kp_psi <= 0.0 or self.Kd_psi <= 0.0:
            raise ValueError("heading P and D gains must be positive")
        if self.Ki_psi < 0.0:
            raise ValueError("heading integral gain must be nonnegative")


@dataclass
class AutopilotState:
    """Trapezoidal integrator memory for the heading error."""

    integral: float = 0.0
    prev_error: float = 0.0


def wrap_to_pi(angle: float) -> float:
    """Map an angle to (-pi, pi], preserving its value modulo 2*pi."""
    if not math.isfinite(angle):
        raise ValueError("angle must be finite")
    return -((-angle + math.pi) % (2.0 * math.pi) - math.pi)


def autopilot_step(
    psi_ref: float,
    psi: float,
    r: float,
    gains: AutopilotGains,
    state: AutopilotState,
    dt: float,
) -> float:
    """One heading-loop update; returns the normalized yaw moment.

    The error is wrapped so the commanded rotation never exceeds pi, and
    the damping term feeds back the measured rate instead of a
    differentiated error, avoiding kicks when the reference jumps.
    """
    if dt <= 0.0:
        raise ValueError("autopilot step must be positive")
    e_psi = wrap_to_pi(psi_ref - psi)
    state.integral += 0.5 * dt * (state.prev_error + e_psi)
    state.prev_error = e_psi
    return gains.Kp_psi * e_psi - gains.Kd_psi * r + gains.Ki_psi * state.integral
