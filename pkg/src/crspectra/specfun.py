"""
Special functions needed by the closed-form solution.

Everything here accepts numpy arrays where it makes sense and is a pure
function of its arguments.  Complex values are plain Python/numpy complex
numbers.
"""

import math

import numpy as np

from .errors import DomainError, PoleError

# B_{2k} / (2k (2k-1)) for k = 1..10
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_SHIFT_TO = 15.0


def _check_poles(z):
    re, im = z.real, z.imag
    bad = (im == 0.0) & (re <= 0.0) & (re == np.floor(re))
    if np.any(bad):
        raise PoleError(f"log_gamma has a pole at {z[bad].ravel()[0]}")


def log_gamma(z):
    """
    Principal branch of log Gamma(z) for complex z.

    Uses the Stirling series after shifting the argument upward with
    log Gamma(z) = log Gamma(z + N) - sum_k log(z + k), so that the imaginary
    part is continuous along the real axis (same branch as the usual
    ``loggamma``).

    Parameters
    ----------
    z : complex or array_like of complex

    Returns
    -------
    complex or ndarray of complex
    """
    scalar = np.isscalar(z)
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    # for large |Im z| the series is already accurate without shifting
    need = np.where(np.abs(z) >= _SHIFT_TO, 0.0, np.ceil(_SHIFT_TO - z.real))
    need = np.clip(need, 0.0, None).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(need.max()) if need.size else 0):
        m = need > k
        acc[m] += np.log(w[m])
        w[m] += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    out = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series * inv - acc
    return complex(out) if scalar else out


def gamma_phase_ratio(a, rho):
    """Gamma(a + i rho) / Gamma(a - i rho), a unit-modulus number."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise DomainError("gamma_phase_ratio needs a > 0")
    phase = 2.0 * np.imag(log_gamma(a + 1j * np.asarray(rho, dtype=float)))
    out = np.cos(phase) + 1j * np.sin(phase)
    return complex(out) if out.ndim == 0 else out


def laguerre(k, alpha, x):
    """Generalized Laguerre polynomial L_k^alpha(x) by forward recurrence."""
    if k < 0:
        raise DomainError("Laguerre degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for m in range(1, k):
        prev, cur = cur, ((2 * m + 1 + alpha - x) * cur - (m + alpha) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def jacobi(k, alpha, beta, x):
    """Jacobi polynomial P_k^(alpha, beta)(x) by forward recurrence."""
    if k < 0:
        raise DomainError("Jacobi degree must be nonnegative")
    if alpha <= -1 or beta <= -1:
        raise DomainError("Jacobi parameters must exceed -1")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    ab = alpha + beta
    cur = 0.5 * ((ab + 2.0) * x + alpha - beta)
    for m in range(1, k):
        s = 2 * m + ab
        a1 = 2.0 * (m + 1) * (m + ab + 1) * s
        a2 = (s + 1) * (alpha * alpha - beta * beta)
        a3 = (s + 1) * (s + 2) * s
        a4 = 2.0 * (m + alpha) * (m + beta) * (s + 2)
        prev, cur = cur, ((a2 + a3 * x) * cur - a4 * prev) / a1
    return cur if cur.ndim else float(cur)


def legendre(k, x):
    """Legendre polynomial P_k(x) on [-1, 1] (Bonnet recurrence)."""
    if k < 0:
        raise DomainError("Legendre degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise DomainError("legendre is defined on [-1, 1]")
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for m in range(1, k):
        prev, cur = cur, ((2 * m + 1) * x * cur - m * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def sph_harm(kappa, sigma, alpha, beta):
    """
    Orthonormal spherical harmonic Y_kappa^sigma(alpha, beta).

    alpha is the polar angle and beta the azimuth.  The Condon-Shortley
    phase is included, and Y^{-m} = (-1)^m conj(Y^m).
    """
    if kappa < 0 or abs(sigma) > kappa:
        raise DomainError(f"need |sigma| <= kappa, got kappa={kappa}, sigma={sigma}")
    m = abs(sigma)
    ct = np.cos(np.asarray(alpha, dtype=float))
    st = np.sin(np.asarray(alpha, dtype=float))
    pmm = np.full_like(ct, 1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, m + 1):
        pmm = -math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * st * pmm
    if kappa == m:
        plm = pmm
    else:
        prev, cur = pmm, math.sqrt(2.0 * m + 3.0) * ct * pmm
        a_prev = math.sqrt(2.0 * m + 3.0)
        for ell in range(m + 2, kappa + 1):
            a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
            prev, cur = cur, a * (ct * cur - prev / a_prev)
            a_prev = a
        plm = cur
    val = plm * np.exp(1j * m * np.asarray(beta, dtype=float))
    if sigma < 0:
        val = (-1) ** m * np.conj(val)
    return complex(val) if np.ndim(val) == 0 else val


def gauss_legendre(num, a=-1.0, b=1.0):
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    t, w = np.polynomial.legendre.leggauss(num)
    half = 0.5 * (b - a)
    return half * t + 0.5 * (a + b), half * w
