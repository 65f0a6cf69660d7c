"""Hot numeric kernels with a numba path and a pure-numpy path.

Every public kernel dispatches on :func:`numba_enabled`, which reads the
``COHERENT_ZXZ_NUMBA`` environment variable on each call (``0``, ``false``,
``off`` or ``no`` select the numpy path). When numba is not importable the
numpy path is always used.

Scalar helpers are written against :mod:`math`/:mod:`cmath` only so the same
source is both the interpreted fallback and the input to ``numba.njit``.
"""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

try:
    import numba

    NUMBA_AVAILABLE = True
    # skip an outdated TBB (and its warning) unless the user picked a layer
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    NUMBA_AVAILABLE = False

ENV_FLAG = "COHERENT_ZXZ_NUMBA"
_HALF_PI = 0.5 * math.pi
_TWO_PI = 2.0 * math.pi
# below this |e^{i t/2} - e^{i(a - t/2)}| the off-diagonal phase is noise
_DEGENERATE_OFFDIAG = 1e-6


def numba_enabled() -> bool:
    if not NUMBA_AVAILABLE:
        return False
    return os.environ.get(ENV_FLAG, "1").strip().lower() not in {"0", "false", "off", "no"}


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"


# ---------------------------------------------------------------------------
# scalar sources (interpreted fallback and numba input)


def _fidelity_scalar(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x):
    """Process fidelity of ``U(theta, phi, lam)`` against the five-gate product
    ``Z(phi_i - pi/2) X~ Z(pi - theta_i) X~ Z(lam_i - pi/2)`` with the
    erroneous ``X~ = U(theta_x, phi_x, lambda_x)``."""
    cx = math.cos(0.5 * theta_x)
    sx = math.sin(0.5 * theta_x)
    x00 = complex(cx, 0.0)
    x01 = -1j * cmath.exp(1j * lambda_x) * sx
    x10 = -1j * cmath.exp(1j * phi_x) * sx
    x11 = cmath.exp(1j * (lambda_x + phi_x)) * cx

    a1 = phi_i - _HALF_PI
    a2 = math.pi - theta_i
    a3 = lam_i - _HALF_PI
    z1a = cmath.exp(-0.5j * a1)
    z1b = cmath.exp(0.5j * a1)
    d0 = cmath.exp(-0.5j * a2)
    d1 = cmath.exp(0.5j * a2)
    z3a = cmath.exp(-0.5j * a3)
    z3b = cmath.exp(0.5j * a3)

    # X~ diag(d0, d1) X~
    m00 = x00 * d0 * x00 + x01 * d1 * x10
    m01 = x00 * d0 * x01 + x01 * d1 * x11
    m10 = x10 * d0 * x00 + x11 * d1 * x10
    m11 = x10 * d0 * x01 + x11 * d1 * x11
    m00 = z1a * m00 * z3a
    m01 = z1a * m01 * z3b
    m10 = z1b * m10 * z3a
    m11 = z1b * m11 * z3b

    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    t01 = -1j * cmath.exp(1j * lam) * s
    t10 = -1j * cmath.exp(1j * phi) * s
    t11 = cmath.exp(1j * (lam + phi)) * c
    tr = c * m00 + t01.conjugate() * m01 + t10.conjugate() * m10 + t11.conjugate() * m11
    return (2.0 + (tr.real * tr.real + tr.imag * tr.imag)) / 6.0


def _wrap(angle):
    r = angle - _TWO_PI * math.floor(angle / _TWO_PI)
    if r >= _TWO_PI:
        r = 0.0
    return r


def _phase_shift_scalar(theta_i, a_plus, theta_x):
    """``gamma4 - pi/2 - gamma3`` of the erroneous product at ``theta_i``."""
    c2 = math.cos(0.5 * theta_x) ** 2
    s2 = math.sin(0.5 * theta_x) ** 2
    h = 0.5 * theta_i
    g = a_plus - h
    g3 = math.atan2(math.sin(h) * c2 + math.sin(g) * s2, math.cos(h) * c2 + math.cos(g) * s2)
    ys = math.sin(h) - math.sin(g)
    xs = math.cos(h) - math.cos(g)
    g4 = math.atan2(ys, xs)
    if math.hypot(xs, ys) < _DEGENERATE_OFFDIAG:
        g5 = math.atan2(math.sin(h) * s2 + math.sin(g) * c2, math.cos(h) * s2 + math.cos(g) * c2)
        # 2*g4 = g5 + g3 + pi (mod 2pi); take the branch nearest the raw estimate
        cand = 0.5 * (g5 + g3 + math.pi)
        g4 = cand + math.pi * math.floor((g4 - cand) / math.pi + 0.5)
    return g4 - _HALF_PI - g3


def _implemented_scalar(theta, phi, lam, theta_x, phi_x, lambda_x):
    """Closed-form retuned parameters for one target.

    Returns ``(theta_i, phi_i, lam_i, coverable)``.
    """
    a_plus = lambda_x + phi_x
    st2 = math.sin(0.5 * theta) ** 2
    sx2 = math.sin(theta_x) ** 2
    coverable = st2 <= sx2
    if coverable:
        if sx2 > 0.0:
            half = math.asin(min(1.0, math.sqrt(st2 / sx2)))
        else:
            half = 0.0
    else:
        half = _HALF_PI
    t0 = a_plus + 2.0 * half
    # 2pi shifts only flip the global sign; keep the copy nearest the target
    k = math.ceil((theta - t0) / _TWO_PI - 0.5)
    theta_i = t0 + _TWO_PI * k
    shift = _phase_shift_scalar(theta_i, a_plus, theta_x)
    return theta_i, _wrap(phi - phi_x - shift), _wrap(lam - lambda_x - shift), coverable


# ---------------------------------------------------------------------------
# numpy path


def _fidelity_numpy(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x):
    cx = np.cos(0.5 * theta_x)
    sx = np.sin(0.5 * theta_x)
    x00 = cx + 0j
    x01 = -1j * np.exp(1j * lambda_x) * sx
    x10 = -1j * np.exp(1j * phi_x) * sx
    x11 = np.exp(1j * (lambda_x + phi_x)) * cx

    a1 = phi_i - _HALF_PI
    a2 = np.pi - theta_i
    a3 = lam_i - _HALF_PI
    z1a, z1b = np.exp(-0.5j * a1), np.exp(0.5j * a1)
    d0, d1 = np.exp(-0.5j * a2), np.exp(0.5j * a2)
    z3a, z3b = np.exp(-0.5j * a3), np.exp(0.5j * a3)

    m00 = z1a * (x00 * d0 * x00 + x01 * d1 * x10) * z3a
    m01 = z1a * (x00 * d0 * x01 + x01 * d1 * x11) * z3b
    m10 = z1b * (x10 * d0 * x00 + x11 * d1 * x10) * z3a
    m11 = z1b * (x10 * d0 * x01 + x11 * d1 * x11) * z3b

    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    t01 = -1j * np.exp(1j * lam) * s
    t10 = -1j * np.exp(1j * phi) * s
    t11 = np.exp(1j * (lam + phi)) * c
    tr = c * m00 + np.conj(t01) * m01 + np.conj(t10) * m10 + np.conj(t11) * m11
    return (2.0 + np.abs(tr) ** 2) / 6.0


def _phase_shift_numpy(theta_i, a_plus, theta_x):
    c2 = np.cos(0.5 * theta_x) ** 2
    s2 = np.sin(0.5 * theta_x) ** 2
    h = 0.5 * theta_i
    g = a_plus - h
    g3 = np.arctan2(np.sin(h) * c2 + np.sin(g) * s2, np.cos(h) * c2 + np.cos(g) * s2)
    ys = np.sin(h) - np.sin(g)
    xs = np.cos(h) - np.cos(g)
    g4 = np.arctan2(ys, xs)
    degenerate = np.hypot(xs, ys) < _DEGENERATE_OFFDIAG
    if np.any(degenerate):
        g5 = np.arctan2(np.sin(h) * s2 + np.sin(g) * c2, np.cos(h) * s2 + np.cos(g) * c2)
        cand = 0.5 * (g5 + g3 + np.pi)
        g4 = np.where(degenerate, cand + np.pi * np.floor((g4 - cand) / np.pi + 0.5), g4)
    return g4 - _HALF_PI - g3


def _implemented_numpy(theta, phi, lam, theta_x, phi_x, lambda_x):
    theta, phi, lam, theta_x, phi_x, lambda_x = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (theta, phi, lam, theta_x, phi_x, lambda_x))
    )
    a_plus = lambda_x + phi_x
    st2 = np.sin(0.5 * theta) ** 2
    sx2 = np.sin(theta_x) ** 2
    coverable = st2 <= sx2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sx2 > 0.0, st2 / np.where(sx2 > 0.0, sx2, 1.0), 0.0)
    half = np.where(coverable, np.arcsin(np.minimum(1.0, np.sqrt(ratio))), _HALF_PI)
    t0 = a_plus + 2.0 * half
    k = np.ceil((theta - t0) / _TWO_PI - 0.5)
    theta_i = t0 + _TWO_PI * k
    shift = _phase_shift_numpy(theta_i, a_plus, theta_x)
    return (
        theta_i,
        np.mod(phi - phi_x - shift, _TWO_PI),
        np.mod(lam - lambda_x - shift, _TWO_PI),
        coverable,
    )


def _count_unit_numpy(theta, phi, lam, theta_x, phi_x, lambda_x, threshold):
    ti, pi_, li, _ = _implemented_numpy(theta, phi, lam, theta_x, phi_x, lambda_x)
    f = _fidelity_numpy(theta, phi, lam, ti, pi_, li, theta_x, phi_x, lambda_x)
    return int(np.count_nonzero(f >= threshold))


# ---------------------------------------------------------------------------
# numba path

if NUMBA_AVAILABLE:
    _fidelity_jit = numba.njit(cache=False)(_fidelity_scalar)
    _wrap_jit = numba.njit(cache=False)(_wrap)
    _phase_shift_jit = numba.njit(cache=False)(_phase_shift_scalar)

    @numba.njit(cache=False)
    def _implemented_jit(theta, phi, lam, theta_x, phi_x, lambda_x):
        a_plus = lambda_x + phi_x
        st2 = math.sin(0.5 * theta) ** 2
        sx2 = math.sin(theta_x) ** 2
        coverable = st2 <= sx2
        if coverable:
            if sx2 > 0.0:
                half = math.asin(min(1.0, math.sqrt(st2 / sx2)))
            else:
                half = 0.0
        else:
            half = _HALF_PI
        t0 = a_plus + 2.0 * half
        k = math.ceil((theta - t0) / _TWO_PI - 0.5)
        theta_i = t0 + _TWO_PI * k
        shift = _phase_shift_jit(theta_i, a_plus, theta_x)
        return theta_i, _wrap_jit(phi - phi_x - shift), _wrap_jit(lam - lambda_x - shift), coverable

    @numba.njit(cache=False, parallel=True)
    def _fidelity_batch_jit(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x):
        n = theta.shape[0]
        out = np.empty(n)
        for j in numba.prange(n):
            out[j] = _fidelity_jit(
                theta[j], phi[j], lam[j], theta_i[j], phi_i[j], lam_i[j],
                theta_x[j], phi_x[j], lambda_x[j],
            )
        return out

    @numba.njit(cache=False, parallel=True)
    def _implemented_batch_jit(theta, phi, lam, theta_x, phi_x, lambda_x):
        n = theta.shape[0]
        ti = np.empty(n)
        pi_ = np.empty(n)
        li = np.empty(n)
        cov = np.empty(n, dtype=np.bool_)
        for j in numba.prange(n):
            ti[j], pi_[j], li[j], cov[j] = _implemented_jit(
                theta[j], phi[j], lam[j], theta_x[j], phi_x[j], lambda_x[j]
            )
        return ti, pi_, li, cov

    @numba.njit(cache=False, parallel=True)
    def _count_unit_jit(theta, phi, lam, theta_x, phi_x, lambda_x, threshold):
        # integer reduction: the total does not depend on thread scheduling
        count = 0
        for j in numba.prange(theta.shape[0]):
            ti, pi_, li, _ = _implemented_jit(theta[j], phi[j], lam[j], theta_x, phi_x, lambda_x)
            f = _fidelity_jit(theta[j], phi[j], lam[j], ti, pi_, li, theta_x, phi_x, lambda_x)
            if f >= threshold:
                count += 1
        return count


# ---------------------------------------------------------------------------
# dispatching entry points


def _flat(*arrays):
    b = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in arrays))
    shape = b[0].shape
    return shape, [np.ascontiguousarray(x).ravel() for x in b]


def decomposition_fidelity(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x) -> float:
    """Scalar form of :func:`decomposition_fidelity_batch`; used as the
    optimizer objective."""
    if numba_enabled():
        return _fidelity_jit(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x)
    return _fidelity_scalar(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x)


def decomposition_fidelity_batch(
    theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x
) -> np.ndarray:
    """Process fidelity between targets ``U(theta, phi, lam)`` and the erroneous
    five-gate product evaluated at ``(theta_i, phi_i, lam_i)``.

    All arguments broadcast against each other.
    """
    shape, flat = _flat(theta, phi, lam, theta_i, phi_i, lam_i, theta_x, phi_x, lambda_x)
    if numba_enabled():
        out = _fidelity_batch_jit(*flat)
    else:
        out = _fidelity_numpy(*flat)
    return out.reshape(shape)


def implemented_params_batch(theta, phi, lam, theta_x, phi_x, lambda_x):
    """Vectorized closed-form retuning; returns ``(theta_i, phi_i, lam_i, coverable)``."""
    shape, flat = _flat(theta, phi, lam, theta_x, phi_x, lambda_x)
    if numba_enabled():
        res = _implemented_batch_jit(*flat)
    else:
        res = _implemented_numpy(*flat)
    return tuple(r.reshape(shape) for r in res)


def implemented_params(theta, phi, lam, theta_x, phi_x, lambda_x):
    if numba_enabled():
        return _implemented_jit(theta, phi, lam, theta_x, phi_x, lambda_x)
    return _implemented_scalar(theta, phi, lam, theta_x, phi_x, lambda_x)


def count_unit_fidelity(theta, phi, lam, theta_x, phi_x, lambda_x, threshold: float) -> int:
    """Number of targets whose closed-form retuning reaches ``threshold``."""
    theta = np.ascontiguousarray(theta, dtype=float)
    phi = np.ascontiguousarray(phi, dtype=float)
    lam = np.ascontiguousarray(lam, dtype=float)
    if numba_enabled():
        return int(
            _count_unit_jit(theta, phi, lam, float(theta_x), float(phi_x), float(lambda_x), threshold)
        )
    return _count_unit_numpy(theta, phi, lam, theta_x, phi_x, lambda_x, threshold)
