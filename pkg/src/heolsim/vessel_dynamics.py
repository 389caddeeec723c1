"""Planar maneuvering dynamics of a thruster-driven surface vessel.

The 6-component state used throughout the package is ``(x, y, psi, u, v, r)``:
inertial position [m], heading [rad], body-frame surge/sway velocity [m/s]
and yaw rate [rad/s].  Heading is kept unwrapped; wrapping is left to
consumers that need a bounded angle.

All forces and moments are normalized by the effective (rigid-body plus
added) mass or inertia, so inputs and disturbances carry acceleration units.
The reduced coefficient set ``(a, b, c, beta_u, beta_v, gamma)`` fully
describes the vessel at this level; :func:`reduce_params` derives it from
physical mass/damping data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalParams",
    "VesselParams",
    "VesselState",
    "ControlInputs",
    "InertialForce",
    "reduce_params",
    "surface_vessel_derivative",
    "hovercraft_derivative",
]

# The sway coupling coefficient equals -1/a exactly when derived from mass
# data; published rounded values (e.g. a=0.58, b=-1.72) must still validate.
_AB_PRODUCT_TOL = 1e-2


@dataclass(frozen=True)
class PhysicalParams:
    """Mass, inertia, added mass and linear damping of a 3-DOF vessel.

    Added masses follow the usual sign convention (typically negative);
    only the differences ``m - Xudot``, ``m - Yvdot`` and ``Iz - Nrdot``
    enter the reduced model and all three must be positive.
    """

    m: float
    Iz: float
    Xudot: float
    Yvdot: float
    Nrdot: float
    du: float
    dv: float
    dr: float

    def __post_init__(self):
        if not (self.m - self.Xudot > 0.0):
            raise ValueError("effective surge mass m - Xudot must be positive")
        if not (self.m - self.Yvdot > 0.0):
            raise ValueError("effective sway mass m - Yvdot must be positive")
        if not (self.Iz - self.Nrdot > 0.0):
            raise ValueError("effective yaw inertia Iz - Nrdot must be positive")


@dataclass(frozen=True)
class VesselParams:
    """Reduced coefficients of the normalized surface-vessel model.

    ``a`` and ``b`` are the dimensionless mass ratios of the surge/sway
    Coriolis-like terms, ``c`` couples ``u*v`` into the yaw equation and
    the betas/gamma are normalized linear damping rates [1/s].
    """

    a: float
    b: float
    c: float
    beta_u: float
    beta_v: float
    gamma: float

    def __post_init__(self):
        if self.beta_u <= 0.0 or self.beta_v <= 0.0:
            raise ValueError("surge/sway damping rates must be positive")
        if self.gamma <= 0.0:
            raise ValueError("yaw damping rate must be positive")
        if abs(self.a * self.b + 1.0) > _AB_PRODUCT_TOL:
            raise ValueError(
                f"mass ratios must satisfy b = -1/a (got a*b = {self.a * self.b:.6f})"
            )

    @classmethod
    def hovercraft(cls, beta: float, gamma: float) -> "VesselParams":
        """Circular-hull special case: a=1, b=-1, c=0 and equal damping."""
        return cls(a=1.0, b=-1.0, c=0.0, beta_u=beta, beta_v=beta, gamma=gamma)


@dataclass
class VesselState:
    """Pose and body-frame velocity ``(x, y, psi, u, v, r)``."""

    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0
    u: float = 0.0
    v: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, self.as_tuple())):
            raise ValueError("vessel state components must be finite")

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.x, self.y, self.psi, self.u, self.v, self.r)

    @classmethod
    def from_sequence(cls, seq) -> "VesselState":
        x, y, psi, u, v, r = seq
        return cls(float(x), float(y), float(psi), float(u), float(v), float(r))


@dataclass(frozen=True)
class ControlInputs:
    """Normalized surge force [m/s^2] and yaw moment [rad/s^2]."""

    Fu: float = 0.0
    Gamma_r: float = 0.0


@dataclass(frozen=True)
class InertialForce:
    """Constant normalized force expressed in the inertial frame [m/s^2]."""

    fx: float = 0.0
    fy: float = 0.0


def reduce_params(p: PhysicalParams) -> VesselParams:
    """Collapse physical mass/damping data into the reduced coefficients."""
    mu = p.m - p.Xudot
    mv = p.m - p.Yvdot
    mr = p.Iz - p.Nrdot
    a = mv / mu
    return VesselParams(
        a=a,
        b=-1.0 / a,
        c=(p.Xudot - p.Yvdot) / mr,
        beta_u=p.du / mu,
        beta_v=p.dv / mv,
        gamma=p.dr / mr,
    )


def _state_derivative(state, fu, gamma_r, a, b, c, beta_u, beta_v, gamma, fx, fy):
    """Scalar-argument core shared by the public derivative functions."""
    _, _, psi, u, v, r = state
    cp = math.cos(psi)
    sp = math.sin(psi)
    # Disturbance force acts in the inertial frame; rotate it into the body
    # frame before adding it to the surge/sway accelerations.
    wind_u = fx * cp + fy * sp
    wind_v = -fx * sp + fy * cp
    return (
        u * cp - v * sp,
        u * sp + v * cp,
        r,
        fu + a * v * r - beta_u * u + wind_u,
        b * u * r - beta_v * v + wind_v,
        gamma_r + c * u * v - gamma * r,
    )


def surface_vessel_derivative(
    state,
    ctrl: ControlInputs,
    params: VesselParams,
    wind: InertialForce = InertialForce(),
) -> tuple[float, float, float, float, float, float]:
    """Time derivative of the 6-component state under the full model.

    ``state`` is any ``(x, y, psi, u, v, r)`` sequence.  Returns the
    derivative in the same component order.
    """
    return _state_derivative(
        state, ctrl.Fu, ctrl.Gamma_r,
        params.a, params.b, params.c,
        params.beta_u, params.beta_v, params.gamma,
        wind.fx, wind.fy,
    )


def hovercraft_derivative(
    state,
    ctrl: ControlInputs,
    beta: float,
    gamma: float,
    wind: InertialForce = InertialForce(),
) -> tuple[float, float, float, float, float, float]:
    """Derivative of the circular-hull simplification (a=1, b=-1, c=0).

    The yaw channel decouples from surge/sway in this model, which is what
    makes the position outputs flat.
    """
    if beta <= 0.0 or gamma <= 0.0:
        raise ValueError("damping rates must be positive")
    return _state_derivative(
        state, ctrl.Fu, ctrl.Gamma_r,
        1.0, -1.0, 0.0, beta, beta, gamma,
        wind.fx, wind.fy,
    )
