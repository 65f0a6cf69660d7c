"""The ZXZXZ decomposition with an ideal or coherently miscalibrated X(pi/2).

The five-gate product ``Z(phi - pi/2) X Z(pi - theta) X Z(lambda - pi/2)``
reproduces ``U(theta, phi, lambda)`` up to the global phase
``exp(-i (lambda + phi) / 2)``. Replacing ``X`` by ``U(theta_x, phi_x,
lambda_x)`` gives the erroneous product; :func:`closed_form_decomposition`
is its analytic form with that global phase removed.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .su2 import (
    DomainError,
    GateParams,
    TWO_PI,
    canonicalize_with_phase,
    mat_from_params,
    wrap_angle,
    wrap_signed,
)

HALF_PI = 0.5 * math.pi
#: Angle tolerance (radians) used to decide whether an error component is zero.
CASE_TOL = 1e-9
# gamma identity is only checked when the off-diagonal phase is well conditioned
_GAMMA_CHECK_MIN = 1e-6


@dataclass(frozen=True)
class XErrorModel:
    """Coherent error of the physical X(pi/2): ``U(theta_x, phi_x, lambda_x)``.

    Angles are stored as given; :meth:`canonical` folds ``theta_x`` into
    ``[0, pi]`` (so ``delta`` lands in ``[-pi/2, pi/2]``) without changing the
    decomposition beyond a global phase.
    """

    theta_x: float = HALF_PI
    phi_x: float = 0.0
    lambda_x: float = 0.0

    @classmethod
    def ideal(cls) -> "XErrorModel":
        return cls()

    @classmethod
    def from_delta(cls, delta: float, phi_x: float = 0.0, lambda_x: float = 0.0) -> "XErrorModel":
        return cls(HALF_PI + delta, phi_x, lambda_x)

    @property
    def delta(self) -> float:
        return self.theta_x - HALF_PI

    @property
    def a_plus(self) -> float:
        return self.lambda_x + self.phi_x

    @property
    def a_minus(self) -> float:
        return self.lambda_x - self.phi_x

    def as_params(self) -> GateParams:
        return GateParams(self.theta_x, self.phi_x, self.lambda_x)

    def canonical(self) -> "XErrorModel":
        p, _ = canonicalize_with_phase(self.theta_x, self.phi_x, self.lambda_x)
        return XErrorModel(p.theta, p.phi, p.lam)


class CaseKind(enum.Enum):
    IDEAL = "ideal"
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"


class EffectiveParams(NamedTuple):
    """Canonical parameters with ``exp(i*global_phase) * U(theta_eff, phi_eff,
    lambda_eff)`` equal to :func:`closed_form_decomposition`."""

    theta_eff: float
    phi_eff: float
    lambda_eff: float
    global_phase: float

    @property
    def params(self) -> GateParams:
        return GateParams(self.theta_eff, self.phi_eff, self.lambda_eff)

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.global_phase) * mat_from_params(self.params)


def z_rotation(angle: float) -> np.ndarray:
    """Virtual Z gate ``diag(exp(-i a/2), exp(i a/2))``."""
    w = cmath.exp(0.5j * angle)
    return np.array([[w.conjugate(), 0.0], [0.0, w]])


X_HALF_PI = mat_from_params((HALF_PI, 0.0, 0.0))


def _five_gate(p: GateParams, x_gate: np.ndarray) -> np.ndarray:
    theta, phi, lam = p
    return (
        z_rotation(phi - HALF_PI)
        @ x_gate
        @ z_rotation(math.pi - theta)
        @ x_gate
        @ z_rotation(lam - HALF_PI)
    )


def ideal_decomposition(p: GateParams) -> np.ndarray:
    return _five_gate(GateParams(*p), X_HALF_PI)


def erroneous_x_gate(e: XErrorModel) -> np.ndarray:
    return mat_from_params(e.as_params())


def erroneous_decomposition(p: GateParams, e: XErrorModel) -> np.ndarray:
    """Five-gate product with the miscalibrated X gate, by matrix multiplication.

    The result carries the decomposition's global phase
    ``exp(-i (lambda + phi) / 2)``.
    """
    return _five_gate(GateParams(*p), erroneous_x_gate(e))


def decomposition_phase(p: GateParams) -> float:
    """Global phase of the five-gate product relative to its closed form."""
    return -0.5 * (p[1] + p[2])


def closed_form_decomposition(p: GateParams, e: XErrorModel) -> np.ndarray:
    """Analytic entries of the erroneous product, global phase removed."""
    theta, phi, lam = p
    tx, px, lx = e.theta_x, e.phi_x, e.lambda_x
    ap = e.a_plus
    c2 = math.cos(tx / 2.0) ** 2
    s2 = math.sin(tx / 2.0) ** 2
    half_sin = math.sin(tx) / 2.0
    e_ = lambda a: np.exp(1j * a)  # noqa: E731
    u11 = e_(theta / 2) * c2 + e_(-theta / 2 + ap) * s2
    u12 = (e_(-theta / 2 + lam + lx + ap) - e_(theta / 2 + lam + lx)) * half_sin
    u21 = (e_(-theta / 2 + phi + px + ap) - e_(theta / 2 + phi + px)) * half_sin
    u22 = e_(theta / 2 + lam + phi + ap) * s2 + e_(-theta / 2 + lam + phi + 2 * ap) * c2
    return np.array([[u11, u12], [u21, u22]], dtype=complex)


def _angle_is_zero(angle: float, tol: float) -> bool:
    return abs(wrap_signed(angle)) < tol


def classify_case(e: XErrorModel, tol: float = CASE_TOL) -> CaseKind:
    if tol <= 0:
        raise DomainError("tol must be positive")
    ec = e.canonical()
    delta_zero = abs(ec.delta) < tol
    phases_zero = _angle_is_zero(ec.phi_x, tol) and _angle_is_zero(ec.lambda_x, tol)
    if delta_zero and phases_zero:
        return CaseKind.IDEAL
    if phases_zero:
        return CaseKind.CASE1
    if delta_zero:
        return CaseKind.CASE2
    return CaseKind.CASE3


def _effective_from_raw(theta: float, phi: float, lam: float, phase: float) -> EffectiveParams:
    p, extra = canonicalize_with_phase(theta, phi, lam)
    return EffectiveParams(p.theta, p.phi, p.lam, wrap_angle(phase + extra))


def effective_params_case2(p: GateParams, e: XErrorModel, tol: float = CASE_TOL) -> EffectiveParams:
    """Case 2 (``theta_x = pi/2``): the phase errors become shifts of the
    target angles, ``theta - a_plus``, ``phi + phi_x``, ``lambda + lambda_x``."""
    if classify_case(e, tol) is not CaseKind.CASE2:
        raise DomainError("effective_params_case2 requires a Case 2 error model")
    ec = e.canonical()
    theta, phi, lam = p
    ap = ec.a_plus
    gamma2 = math.atan2(math.sin(ap / 2.0), math.cos(ap / 2.0))
    return _effective_from_raw(theta - ap, phi + ec.phi_x, lam + ec.lambda_x, gamma2)


class Case3Phases(NamedTuple):
    gamma3: float
    gamma4: float
    gamma5: float
    offdiag: float  # |exp(i t/2) - exp(i(a_plus - t/2))| = 2|sin((t - a_plus)/2)|


def case3_phases(theta: float, e: XErrorModel) -> Case3Phases:
    """Phases of the diagonal and off-diagonal entries of the erroneous product,
    each from a two-argument arctangent of its (sine part, cosine part)."""
    tx = e.theta_x
    c2 = math.cos(tx / 2.0) ** 2
    s2 = math.sin(tx / 2.0) ** 2
    h = theta / 2.0
    g = e.a_plus - h
    g3 = math.atan2(math.sin(h) * c2 + math.sin(g) * s2, math.cos(h) * c2 + math.cos(g) * s2)
    ys = math.sin(h) - math.sin(g)
    xs = math.cos(h) - math.cos(g)
    g4 = math.atan2(ys, xs)
    g5 = math.atan2(math.sin(h) * s2 + math.sin(g) * c2, math.cos(h) * s2 + math.cos(g) * c2)
    return Case3Phases(g3, g4, g5, math.hypot(xs, ys))


def gamma_identity_residual(ph: Case3Phases) -> float:
    """``(2 g4 - 2 g3 - pi) - (g5 - g3)`` reduced to ``[-pi, pi)``."""
    return wrap_signed((2 * ph.gamma4 - 2 * ph.gamma3 - math.pi) - (ph.gamma5 - ph.gamma3))


def effective_params_case3(p: GateParams, e: XErrorModel, tol: float = CASE_TOL) -> EffectiveParams:
    """Cases 1 and 3 (``delta != 0``).

    ``theta_eff = 2 asin(sin(theta_x) |sin((theta - a_plus)/2)|)`` and the phase
    offsets come from ``gamma3`` and ``gamma4``. When the off-diagonal entries
    vanish (``sin(theta_x) = 0`` or ``theta = a_plus mod 2pi``) the product is
    diagonal and the relative phase is reported in ``lambda_eff``.
    """
    case = classify_case(e, tol)
    if case not in (CaseKind.CASE1, CaseKind.CASE3):
        raise DomainError(f"effective_params_case3 requires Case 1 or Case 3, got {case.value}")
    ec = e.canonical()
    theta, phi, lam = p
    ph = case3_phases(theta, ec)
    sin_x = math.sin(ec.theta_x)
    s_half = abs(math.sin((theta - ec.a_plus) / 2.0))
    if sin_x == 0.0 or ph.offdiag == 0.0:
        rel = lam + phi + ec.a_plus + ph.gamma5 - ph.gamma3
        return _effective_from_raw(0.0, 0.0, rel, ph.gamma3)
    if ph.offdiag > _GAMMA_CHECK_MIN:
        resid = gamma_identity_residual(ph)
        if abs(resid) > 1e-9:
            raise ArithmeticError(f"gamma identity violated by {resid:.3e}")
        g4 = ph.gamma4
    else:
        cand = 0.5 * (ph.gamma5 + ph.gamma3 + math.pi)
        g4 = cand + math.pi * math.floor((ph.gamma4 - cand) / math.pi + 0.5)
    theta_eff = 2.0 * math.asin(min(1.0, abs(sin_x) * s_half))
    shift = g4 - HALF_PI - ph.gamma3
    if sin_x < 0.0:  # theta_x is canonical, so this only guards rounding
        shift += math.pi
    return _effective_from_raw(theta_eff, phi + ec.phi_x + shift, lam + ec.lambda_x + shift, ph.gamma3)


def effective_params(p: GateParams, e: XErrorModel, tol: float = CASE_TOL) -> EffectiveParams:
    """Effective parameters for any error model (ideal included)."""
    case = classify_case(e, tol)
    if case is CaseKind.IDEAL:
        return _effective_from_raw(p[0], p[1], p[2], 0.0)
    if case is CaseKind.CASE2:
        return effective_params_case2(p, e, tol)
    return effective_params_case3(p, e, tol)


__all__ = [
    "CASE_TOL",
    "Case3Phases",
    "CaseKind",
    "EffectiveParams",
    "TWO_PI",
    "XErrorModel",
    "X_HALF_PI",
    "case3_phases",
    "classify_case",
    "closed_form_decomposition",
    "decomposition_phase",
    "effective_params",
    "effective_params_case2",
    "effective_params_case3",
    "erroneous_decomposition",
    "erroneous_x_gate",
    "gamma_identity_residual",
    "ideal_decomposition",
    "z_rotation",
]
