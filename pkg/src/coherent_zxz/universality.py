"""Coverage of the target parameter box under a coherent X(pi/2) error.

The erroneous decomposition reaches exactly the gates with
``|u11| >= |sin(delta)|``, i.e. canonical ``theta <= pi - 2|delta|``. This
module exposes that as a per-gate test, as the analytic fraction UN of the
box ``[0, pi] x [0, 2pi)^2``, as a Monte Carlo estimate of the same fraction,
and in the axis-angle picture of SU(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .decomposition import CASE_TOL, CaseKind, XErrorModel, classify_case
from .mitigation import UNIT_FIDELITY_TOL
from .su2 import GateParams, canonicalize_params, check_unitary, wrap_angle

#: Volume of the canonical parameter box.
V_ALL = 4.0 * math.pi**3
MIN_MC_SAMPLES = 10_000
_CHUNK = 1 << 14
_BOUNDARY_SLACK = 1e-12


class AxisAngle(NamedTuple):
    """Rotation by ``omega`` about ``(sin P cos A, sin P sin A, cos P)`` with
    polar angle ``P`` and azimuth ``A``."""

    polar: float
    azimuth: float
    omega: float


@dataclass(frozen=True)
class UniversalityReport:
    un_analytic: float
    un_monte_carlo: float
    mc_samples: int
    mc_stderr: float
    delta_theta: float

    @property
    def consistent(self) -> bool:
        return abs(self.un_analytic - self.un_monte_carlo) <= 4.0 * self.mc_stderr


def _abs_delta(e: XErrorModel) -> float:
    return abs(e.canonical().delta)


def is_coverable(target: GateParams, e: XErrorModel) -> bool:
    """True iff the canonical ``theta`` satisfies ``theta <= pi - 2|delta|``."""
    theta = canonicalize_params(*target).theta
    return theta <= math.pi - 2.0 * _abs_delta(e) + _BOUNDARY_SLACK


def uncovered_width(e: XErrorModel, tol: float = CASE_TOL) -> float:
    """Width of the unreachable slab along ``theta``."""
    if classify_case(e, tol) in (CaseKind.IDEAL, CaseKind.CASE2):
        return 0.0
    return 2.0 * _abs_delta(e)


def universality_analytic(e: XErrorModel, tol: float = CASE_TOL) -> float:
    """``UN = V / V_all``: 1 without a ``theta_x`` error, else ``1 - 2|delta|/pi``."""
    return 1.0 - uncovered_width(e, tol) / math.pi


def sample_targets(samples: int, seed: int, chunk: int = 0, size: int | None = None):
    """Uniform targets for one chunk of a counter-based stream.

    Chunk ``c`` of seed ``s`` is drawn from Philox keyed by ``s`` with counter
    ``c << 64``, so any chunk can be regenerated on its own.
    """
    n = size if size is not None else samples
    gen = np.random.Generator(np.random.Philox(key=seed, counter=chunk << 64))
    u = gen.random((3, n))
    return math.pi * u[0], 2.0 * math.pi * u[1], 2.0 * math.pi * u[2]


def universality_monte_carlo(e: XErrorModel, samples: int = 100_000, seed: int = 0) -> UniversalityReport:
    """Fraction of uniformly drawn targets that closed-form retuning brings to
    unit fidelity (``>= 1 - 1e-9``), with its binomial standard error."""
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples, got {samples}")
    ec = e.canonical()
    hits = 0
    for c, start in enumerate(range(0, samples, _CHUNK)):
        n = min(_CHUNK, samples - start)
        theta, phi, lam = sample_targets(samples, seed, c, n)
        hits += kernels.count_unit_fidelity(
            theta, phi, lam, ec.theta_x, ec.phi_x, ec.lambda_x, 1.0 - UNIT_FIDELITY_TOL
        )
    frac = hits / samples
    return UniversalityReport(
        un_analytic=universality_analytic(e),
        un_monte_carlo=frac,
        mc_samples=samples,
        mc_stderr=math.sqrt(frac * (1.0 - frac) / samples),
        delta_theta=uncovered_width(e),
    )


def unitary_from_axis_angle(aa: AxisAngle) -> np.ndarray:
    """``I cos(omega/2) - i (sigma . n) sin(omega/2)``."""
    P, A, w = aa
    nx = math.sin(P) * math.cos(A)
    ny = math.sin(P) * math.sin(A)
    nz = math.cos(P)
    c = math.cos(w / 2.0)
    s = math.sin(w / 2.0)
    return np.array(
        [
            [complex(c, -nz * s), complex(-ny * s, -nx * s)],
            [complex(ny * s, -nx * s), complex(c, nz * s)],
        ]
    )


def axis_angle_from_unitary(u: np.ndarray) -> AxisAngle:
    """Rotation axis and angle of ``u`` up to global phase.

    The determinant is normalized to 1 and the sign chosen so that
    ``omega`` lies in ``[0, pi]``. The identity maps to ``(0, 0, 0)``.
    """
    u = check_unitary(u)
    v = u / np.sqrt(np.linalg.det(u))
    if np.trace(v).real < 0.0:
        v = -v
    c = min(1.0, max(-1.0, np.trace(v).real / 2.0))
    # n * sin(omega/2) read off the Pauli components
    nx = -(v[0, 1] + v[1, 0]).imag / 2.0
    ny = (v[1, 0] - v[0, 1]).real / 2.0
    nz = -(v[0, 0] - v[1, 1]).imag / 2.0
    s = math.sqrt(nx * nx + ny * ny + nz * nz)
    omega = 2.0 * math.atan2(s, c)
    if s < 1e-15:
        return AxisAngle(0.0, 0.0, 0.0)
    polar = math.acos(min(1.0, max(-1.0, nz / s)))
    azimuth = wrap_angle(math.atan2(ny, nx)) if math.hypot(nx, ny) > 1e-15 else 0.0
    return AxisAngle(polar, azimuth, omega)


def sphere_u11_magnitude(aa: AxisAngle) -> float:
    return math.sqrt(max(0.0, 1.0 - math.sin(aa.omega / 2.0) ** 2 * math.sin(aa.polar) ** 2))


def uncoverable_in_sphere(e: XErrorModel, aa: AxisAngle) -> bool:
    """True iff ``sqrt(1 - sin^2(omega/2) sin^2(polar)) < |sin(delta)|``."""
    return sphere_u11_magnitude(aa) < abs(math.sin(_abs_delta(e)))
