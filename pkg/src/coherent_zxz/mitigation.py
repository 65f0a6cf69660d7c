"""Retuning the virtual-Z angles to undo a coherent X(pi/2) error.

:func:`mitigate_closed_form` inverts the effective-parameter map analytically.
:func:`mitigate_numeric` is an independent oracle: a coarse grid over the
implemented angles followed by Nelder-Mead refinement of the matrix-product
fidelity.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .decomposition import XErrorModel, erroneous_decomposition
from .fidelity import original_fidelity_analytic, process_fidelity
from .su2 import DomainError, GateParams, canonicalize_params, mat_from_params, wrap_angle

UNIT_FIDELITY_TOL = 1e-9
_SIN_X_ZERO = 1e-12
_FOUR_PI = 4.0 * math.pi
_COARSE_XATOL = 1e-6


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC_SEARCH = "numeric_search"


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SearchConfig:
    grid_per_axis: int = 12
    tol: float = 1e-8
    max_iters: int = 4000
    rng_seed: int = 0
    restarts: int = 4

    def __post_init__(self):
        if self.grid_per_axis < 2:
            raise ValueError("grid_per_axis must be at least 2")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be positive")


@dataclass(frozen=True)
class MitigationResult:
    """Retuned angles for a target under a fixed error model.

    ``implemented_raw`` is the triple to feed into the five-gate sequence;
    the erroneous product is not invariant under canonicalization, so
    ``implemented`` (its canonical form) names the same ideal gate but
    generally not the same erroneous one.
    """

    implemented: GateParams
    implemented_raw: GateParams
    achieved_fidelity: float
    coverable: bool
    method: Method
    converged: bool = True


def _validate_target(target) -> GateParams:
    t = GateParams(*(float(v) for v in target))
    if not all(math.isfinite(v) for v in t):
        raise DomainError(f"target angles must be finite, got {tuple(t)}")
    return canonicalize_params(*t)


def _achieved(target: GateParams, raw: GateParams, e: XErrorModel) -> float:
    return process_fidelity(mat_from_params(target), erroneous_decomposition(raw, e))


def mitigate_closed_form(target: GateParams, e: XErrorModel) -> MitigationResult:
    """Solve ``sin^2((theta_i - a_plus)/2) = min(a0, 1)`` for ``theta_i`` and
    match the off-diagonal phases to the target's ``phi`` and ``lambda``.

    The root used is ``theta_i = a_plus + 2 asin(sqrt(a0))`` shifted by the
    multiple of ``2 pi`` closest to the target ``theta`` (ties go to the
    smaller value). Falls through to :func:`mitigate_numeric` when the X gate
    is diagonal.
    """
    tc = _validate_target(target)
    ec = e.canonical()
    if abs(math.sin(ec.theta_x)) < _SIN_X_ZERO:
        return mitigate_numeric(tc, e)
    ti, pi_, li, coverable = kernels.implemented_params(
        tc.theta, tc.phi, tc.lam, ec.theta_x, ec.phi_x, ec.lambda_x
    )
    raw = GateParams(float(ti), float(pi_), float(li))
    return MitigationResult(
        implemented=canonicalize_params(*raw),
        implemented_raw=raw,
        achieved_fidelity=_achieved(tc, raw, ec),
        coverable=bool(coverable),
        method=Method.CLOSED_FORM,
    )


def _normalize_raw(x) -> GateParams:
    # theta has period 4 pi in the product; phi/lambda shifts of 2 pi are a sign
    theta = math.fmod(x[0] + math.pi, _FOUR_PI)
    if theta < 0.0:
        theta += _FOUR_PI
    return GateParams(theta - math.pi, wrap_angle(x[1]), wrap_angle(x[2]))


def mitigate_numeric(
    target: GateParams, e: XErrorModel, cfg: SearchConfig | None = None
) -> MitigationResult:
    """Maximize the product fidelity over ``(theta_i, phi_i, lambda_i)``.

    ``theta_i`` is searched on ``[-pi, 3pi)`` so that shifts by ``a_plus``
    never clip. The best ``cfg.restarts`` grid points (jittered by
    ``cfg.rng_seed``) and the unmitigated target itself seed Nelder-Mead runs;
    the overall best is then polished with a small simplex.
    """
    cfg = cfg or SearchConfig()
    tc = _validate_target(target)
    ec = e.canonical()
    args = (tc.theta, tc.phi, tc.lam, ec.theta_x, ec.phi_x, ec.lambda_x)
    fid = kernels.decomposition_fidelity

    def objective(x):
        return -fid(args[0], args[1], args[2], x[0], x[1], x[2], args[3], args[4], args[5])

    g = cfg.grid_per_axis
    t_axis = np.linspace(-math.pi, 3.0 * math.pi, 2 * g, endpoint=False)
    p_axis = np.linspace(0.0, 2.0 * math.pi, g, endpoint=False)
    T, P, L = np.meshgrid(t_axis, p_axis, p_axis, indexing="ij")
    grid_f = kernels.decomposition_fidelity_batch(
        tc.theta, tc.phi, tc.lam, T, P, L, ec.theta_x, ec.phi_x, ec.lambda_x
    ).ravel()
    order = np.argsort(-grid_f, kind="stable")[: cfg.restarts]
    rng = np.random.default_rng(cfg.rng_seed)
    spacing = np.array([t_axis[1] - t_axis[0], p_axis[1] - p_axis[0], p_axis[1] - p_axis[0]])
    pts = np.stack([T.ravel(), P.ravel(), L.ravel()], axis=1)
    seeds = [np.array(tc, dtype=float)]
    for idx in order:
        seeds.append(pts[idx] + rng.uniform(-0.25, 0.25, size=3) * spacing)

    best_x = np.array(tc, dtype=float)
    best_f = -objective(best_x)
    gi = int(order[0])
    if grid_f[gi] > best_f:
        best_x, best_f = pts[gi].copy(), float(grid_f[gi])
    step = 0.5 * spacing

    def run(x0, scale, xatol):
        simplex = np.vstack([x0, x0 + np.diag(scale)])
        return minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": xatol,
                "fatol": 1e-15,
                "maxiter": cfg.max_iters,
                "maxfev": 2 * cfg.max_iters,
            },
        )

    # coarse runs only pick the basin; the polish run sets the tolerance
    for x0 in seeds:
        res = run(x0, step, _COARSE_XATOL)
        if -res.fun > best_f:
            best_x, best_f = res.x, -float(res.fun)
    res = run(best_x, np.full(3, 1e-3), cfg.tol)
    converged = bool(res.success)
    if -res.fun > best_f:
        best_x, best_f = res.x, -float(res.fun)

    raw = _normalize_raw(best_x)
    achieved = _achieved(tc, raw, ec)
    if not converged:
        warnings.warn(
            f"numeric mitigation did not converge within {cfg.max_iters} iterations; "
            "returning best point found",
            ConvergenceWarning,
            stacklevel=2,
        )
    return MitigationResult(
        implemented=canonicalize_params(*raw),
        implemented_raw=raw,
        achieved_fidelity=achieved,
        coverable=achieved >= 1.0 - UNIT_FIDELITY_TOL,
        method=Method.NUMERIC_SEARCH,
        converged=converged,
    )


def unmitigated_fidelity(target: GateParams, e: XErrorModel) -> float:
    return original_fidelity_analytic(_validate_target(target), e)
