"""Process fidelity and the analytic original / best / average fidelities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decomposition import (
    CASE_TOL,
    CaseKind,
    XErrorModel,
    classify_case,
    erroneous_decomposition,
)
from .su2 import GateParams, canonicalize_params, check_unitary, mat_from_params

#: Default number of midpoint nodes for averages without a closed form.
DEFAULT_QUADRATURE_POINTS = 10_000
MIN_QUADRATURE_POINTS = 64
# |sin(theta_x)| below this is treated as a diagonal X gate
_SIN_X_ZERO = 1e-12


@dataclass(frozen=True)
class FidelityReport:
    f_original: float
    f_best: float
    coverable: bool
    case: CaseKind


def process_fidelity(u_tar: np.ndarray, u_imp: np.ndarray) -> float:
    """``(Tr(U_imp^dag U_imp) + |Tr(U_tar^dag U_imp)|^2) / (d (d + 1))`` for d = 2."""
    u_tar = check_unitary(u_tar)
    u_imp = check_unitary(u_imp)
    norm = np.trace(u_imp.conj().T @ u_imp).real
    overlap = abs(np.trace(u_tar.conj().T @ u_imp)) ** 2
    return float((norm + overlap) / 6.0)


def original_fidelity_numeric(p: GateParams, e: XErrorModel) -> float:
    """Fidelity of the erroneous product at the target's own parameters, by
    explicit matrix multiplication."""
    return process_fidelity(mat_from_params(p), erroneous_decomposition(p, e))


def original_overlap(theta, e: XErrorModel):
    """The real amplitude ``f_x`` with ``F_ori = (1 + 2 f_x^2) / 3``.

    Depends on the target only through ``theta``; accepts arrays.
    """
    ap = e.a_plus
    am = e.a_minus
    h = 0.5 * np.asarray(theta, dtype=float)
    return (
        np.cos(h) * np.cos(h - ap / 2) * np.cos(ap / 2)
        + np.cos(h) * np.sin(h - ap / 2) * np.sin(ap / 2) * np.cos(e.theta_x)
        + np.sin(h) * np.sin(h - ap / 2) * np.cos(am / 2) * np.sin(e.theta_x)
    )


def original_fidelity_theta(theta, e: XErrorModel):
    f = original_overlap(theta, e)
    return (1.0 + 2.0 * f * f) / 3.0


def original_fidelity_analytic(p: GateParams, e: XErrorModel) -> float:
    """Closed-form ``F_ori`` for the general error model.

    Valid for any raw ``theta``; ``phi`` and ``lambda`` do not enter.
    """
    return float(original_fidelity_theta(p[0], e))


def original_fidelity_special_case(p: GateParams, e: XErrorModel, tol: float = CASE_TOL) -> float | None:
    """The reduced ``F_ori`` formula for the special error families, or ``None``
    when ``e`` has errors on ``theta_x`` and on a phase at once."""
    theta = p[0]
    case = classify_case(e, tol)
    ec = e.canonical()
    if case is CaseKind.IDEAL:
        return 1.0
    if case is CaseKind.CASE1:
        s = math.sin(ec.delta / 2.0) ** 2 * math.sin(theta / 2.0) ** 2
        return (1.0 + 2.0 * (1.0 - 2.0 * s) ** 2) / 3.0
    if case is CaseKind.CASE2:
        lx, px = ec.lambda_x, ec.phi_x
        if abs(math.sin(px / 2.0)) < tol:
            return (1.0 + 2.0 * math.cos(lx / 2.0) ** 4) / 3.0
        if abs(math.sin(lx / 2.0)) < tol:
            return (1.0 + 2.0 * math.cos(px / 2.0) ** 4) / 3.0
        fy = (
            math.cos((lx + px) / 2.0) * math.cos(lx / 2.0) * math.cos(px / 2.0)
            - math.cos(theta - (lx + px) / 2.0) * math.sin(lx / 2.0) * math.sin(px / 2.0)
        )
        return (1.0 + 2.0 * fy * fy) / 3.0
    return None


def best_fidelity_theta(theta, delta):
    """``F_best`` as a function of canonical ``theta`` and ``delta`` (arrays ok).

    Uses ``sin^2(theta/2) <= cos^2(delta)`` for coverability, which stays
    finite when ``sin(theta_x) = 0``.
    """
    theta = np.asarray(theta, dtype=float)
    d = np.abs(delta)
    coverable = np.sin(theta / 2.0) ** 2 <= np.cos(d) ** 2
    partial = (1.0 + 2.0 * np.sin(theta / 2.0 + d) ** 2) / 3.0
    return np.where(coverable, 1.0, partial)


def best_fidelity_analytic(p: GateParams, e: XErrorModel) -> float:
    """Largest fidelity reachable by retuning the three virtual-Z angles.

    With ``a0 = sin^2(theta/2) / sin^2(theta_x)``: 1 if ``a0 <= 1``, else
    ``(1 + 2 sin^2(theta/2 + |delta|)) / 3``. Targets with ``theta`` outside
    ``[0, pi]`` are canonicalized first. A diagonal X gate
    (``sin(theta_x) = 0``) is handed to the numeric optimizer.
    """
    ec = e.canonical()
    sin_x = math.sin(ec.theta_x)
    if abs(sin_x) < _SIN_X_ZERO:
        from .mitigation import SearchConfig, mitigate_numeric

        return mitigate_numeric(GateParams(*p), e, SearchConfig()).achieved_fidelity
    theta = canonicalize_params(*p).theta
    a0 = math.sin(theta / 2.0) ** 2 / sin_x**2
    if a0 <= 1.0:
        return 1.0
    return (1.0 + 2.0 * math.sin(theta / 2.0 + abs(ec.delta)) ** 2) / 3.0


def _midpoints(n: int) -> np.ndarray:
    if n < MIN_QUADRATURE_POINTS:
        raise ValueError(f"need at least {MIN_QUADRATURE_POINTS} quadrature points, got {n}")
    return (np.arange(n) + 0.5) * (math.pi / n)


def average_original_fidelity_quadrature(
    e: XErrorModel, quadrature_points: int = DEFAULT_QUADRATURE_POINTS
) -> float:
    """Composite midpoint rule for ``(1/pi) int_0^pi F_ori dtheta``."""
    return float(np.mean(original_fidelity_theta(_midpoints(quadrature_points), e)))


def average_original_fidelity(
    e: XErrorModel, quadrature_points: int = DEFAULT_QUADRATURE_POINTS, tol: float = CASE_TOL
) -> float:
    """``F_ori`` averaged over the canonical parameter box.

    Closed forms cover the ideal gate, pure ``theta_x`` errors and pure phase
    errors; mixed errors fall back to quadrature over ``theta`` (the integrand
    does not depend on ``phi`` or ``lambda``).
    """
    if quadrature_points < MIN_QUADRATURE_POINTS:
        raise ValueError(f"need at least {MIN_QUADRATURE_POINTS} quadrature points")
    case = classify_case(e, tol)
    ec = e.canonical()
    if case is CaseKind.IDEAL:
        return 1.0
    if case is CaseKind.CASE1:
        s2 = math.sin(ec.delta / 2.0) ** 2
        return 1.0 - (4.0 * s2 - 3.0 * s2 * s2) / 3.0
    if case is CaseKind.CASE2:
        lx, px = ec.lambda_x, ec.phi_x
        return (
            1.0 / 3.0
            + 2.0 * (math.cos((lx + px) / 2) * math.cos(lx / 2) * math.cos(px / 2)) ** 2 / 3.0
            + (math.sin(lx / 2) * math.sin(px / 2)) ** 2 / 3.0
            - math.sin(lx) * math.sin(px) * math.sin(lx + px) / (3.0 * math.pi)
        )
    return average_original_fidelity_quadrature(e, quadrature_points)


def average_best_fidelity(e: XErrorModel) -> float:
    """``1 - (2|delta| - sin(2|delta|)) / (3 pi)``; phase errors do not enter."""
    d = abs(e.canonical().delta)
    return 1.0 - (2.0 * d - math.sin(2.0 * d)) / (3.0 * math.pi)


def average_best_fidelity_quadrature(
    e: XErrorModel, quadrature_points: int = DEFAULT_QUADRATURE_POINTS
) -> float:
    theta = _midpoints(quadrature_points)
    return float(np.mean(best_fidelity_theta(theta, e.canonical().delta)))


def fidelity_report(p: GateParams, e: XErrorModel) -> FidelityReport:
    from .universality import is_coverable

    return FidelityReport(
        f_original=original_fidelity_analytic(p, e),
        f_best=best_fidelity_analytic(p, e),
        coverable=is_coverable(canonicalize_params(*p), e),
        case=classify_case(e),
    )
