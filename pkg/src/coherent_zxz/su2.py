"""Single-qubit unitaries in the (theta, phi, lambda) parameterization.

Matrices are plain ``(2, 2)`` complex numpy arrays. Two matrices that differ
by a scalar phase represent the same operation; :func:`phase_invariant_distance`
is the comparison used throughout the package.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

#: Unitarity tolerance for matrices built by this package.
CONSTRUCTOR_TOL = 1e-12
#: Unitarity tolerance for matrices handed in by callers.
INPUT_TOL = 1e-10


class DomainError(ValueError):
    """Raised when an input lies outside an operation's domain."""


class GateParams(NamedTuple):
    """Angles (radians) of ``U(theta, phi, lambda)``.

    Instances are not forced into the canonical box; use
    :func:`canonicalize_params` for that. The erroneous decomposition is
    *not* invariant under canonicalization, so raw triples are meaningful.
    """

    theta: float
    phi: float
    lam: float

    def in_pi(self) -> tuple[float, float, float]:
        return (self.theta / math.pi, self.phi / math.pi, self.lam / math.pi)


def wrap_angle(angle: float) -> float:
    """Reduce an angle into ``[0, 2*pi)``."""
    r = math.fmod(angle, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative value can round up to exactly 2*pi
    if r >= TWO_PI:
        r = 0.0
    return r


def wrap_signed(angle: float) -> float:
    """Reduce an angle into ``[-pi, pi)``."""
    return wrap_angle(angle + math.pi) - math.pi


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"angle must be finite, got {v!r}")


def unitarity_error(u: np.ndarray) -> float:
    """Largest elementwise deviation of ``u^dagger u`` from the identity."""
    (a, b), (c, d) = np.asarray(u, dtype=complex).tolist()
    off = a.conjugate() * b + c.conjugate() * d
    return max(
        abs(abs(a) ** 2 + abs(c) ** 2 - 1.0),
        abs(abs(b) ** 2 + abs(d) ** 2 - 1.0),
        abs(off),
    )


def is_unitary(u: np.ndarray, tol: float = INPUT_TOL) -> bool:
    u = np.asarray(u)
    if u.shape != (2, 2) or not np.isfinite(u).all():
        return False
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    return unitarity_error(u) <= tol and abs(abs(det) - 1.0) <= tol


def check_unitary(u: np.ndarray, tol: float = INPUT_TOL) -> np.ndarray:
    """Return ``u`` as a complex array or raise :class:`DomainError`."""
    arr = np.asarray(u, dtype=complex)
    if not is_unitary(arr, tol):
        raise DomainError("matrix is not a 2x2 unitary within tolerance")
    return arr


def mat_from_params(p: GateParams | tuple[float, float, float]) -> np.ndarray:
    """Matrix of ``U(theta, phi, lambda)``."""
    theta, phi, lam = p
    _check_finite(theta, phi, lam)
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array(
        [
            [c, -1j * np.exp(1j * lam) * s],
            [-1j * np.exp(1j * phi) * s, np.exp(1j * (lam + phi)) * c],
        ],
        dtype=complex,
    )


def canonicalize_with_phase(
    raw_theta: float, raw_phi: float, raw_lambda: float
) -> tuple[GateParams, float]:
    """Canonical parameters plus the phase ``alpha`` with
    ``U(raw) = exp(i*alpha) * U(canonical)``.
    """
    _check_finite(raw_theta, raw_phi, raw_lambda)
    phase = 0.0
    theta = math.fmod(raw_theta, 4.0 * math.pi)
    if theta < 0.0:
        theta += 4.0 * math.pi
    phi, lam = raw_phi, raw_lambda
    # U(theta + 2pi) = -U(theta)
    if theta > TWO_PI:
        theta -= TWO_PI
        phase += math.pi
    if theta > math.pi:
        theta -= TWO_PI
        phase += math.pi
        # U(-theta, phi, lambda) = U(theta, phi + pi, lambda + pi), exactly
        theta = -theta
        phi += math.pi
        lam += math.pi
    theta = min(max(theta, 0.0), math.pi)
    return GateParams(theta, wrap_angle(phi), wrap_angle(lam)), wrap_angle(phase)


def canonicalize_params(raw_theta: float, raw_phi: float, raw_lambda: float) -> GateParams:
    """Map any triple to ``theta in [0, pi]``, ``phi, lambda in [0, 2pi)``
    describing the same gate up to global phase."""
    return canonicalize_with_phase(raw_theta, raw_phi, raw_lambda)[0]


def phase_invariant_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``1 - |Tr(a^dagger b)| / 2``; zero exactly on global-phase orbits."""
    a = check_unitary(a)
    b = check_unitary(b)
    overlap = abs(np.trace(a.conj().T @ b)) / 2.0
    return max(0.0, 1.0 - overlap)


def params_from_matrix(u: np.ndarray) -> GateParams:
    """Canonical parameters of a unitary, global phase discarded.

    At ``theta == 0`` only ``phi + lambda`` is defined; it is reported in
    ``phi`` with ``lambda = 0``. At ``theta == pi`` the off-diagonal phases
    fix ``lambda`` and ``phi`` individually.
    """
    u = check_unitary(u)
    # |u11| = cos(theta/2), |u21| = sin(theta/2)
    theta = 2.0 * math.atan2(abs(u[1, 0]), abs(u[0, 0]))
    eps = 1e-12
    if abs(u[0, 0]) <= eps:
        # theta == pi: read both phases straight from the off-diagonals
        w12 = 1j * u[0, 1]
        w21 = 1j * u[1, 0]
        return canonicalize_params(
            theta, math.atan2(w21.imag, w21.real), math.atan2(w12.imag, w12.real)
        )
    # strip the global phase so that u11 is real and positive
    v = u * np.exp(-1j * np.angle(u[0, 0]))
    if abs(v[1, 0]) <= eps:
        phi = math.atan2(v[1, 1].imag, v[1, 1].real)
        lam = 0.0
    else:
        # -i e^{i lambda} sin(theta/2), times i, leaves e^{i lambda} sin(theta/2)
        w12 = 1j * v[0, 1]
        w21 = 1j * v[1, 0]
        lam = math.atan2(w12.imag, w12.real)
        phi = math.atan2(w21.imag, w21.real)
    return canonicalize_params(theta, phi, lam)
