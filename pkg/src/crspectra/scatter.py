"""
Scattering on the positive octant.

Four routes to the amplitude f(p; p') are provided:

* ``partial_wave``: the Abel-regularised sum over A_l and the angular basis,
  extrapolated to zero damping,
* ``closed_k0``: the sign-sum closed form valid when every kappa_i = 0,
* ``coulomb``: the plain n-dimensional Coulomb amplitude (a reference only,
  it is *not* the kappa = 0 limit of the octant problem),
* ``integral``: the n-fold integral representation by tensor quadrature.

Complex powers use the principal branch; every base that appears is real and
strictly positive on the admissible directions.
"""

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .bound import to_polyspherical
from .errors import (DomainError, ForwardSingularityError, InvalidLabelsError, KappaNotZeroError,
                     QuadratureNotConverged, TruncationWarning)
from .qnum import ModelParams, stripped_kappa

METHODS = ("partial_wave", "closed_k0", "coulomb", "integral")
ETA_SCHEDULE = (0.4, 0.2, 0.1, 0.05, 0.025)
FORWARD_LIMIT = 1.0 - 1e-9


def rho_of(params, p):
    """Coulomb parameter rho = gamma / p, from E = p^2/2 = gamma^2/(2 rho^2)."""
    if not p > 0:
        raise DomainError("momentum p must be positive")
    return params.gamma / p


def _unit_octant(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DomainError(f"{name} must have {n} components")
    if np.any(v < 0):
        raise DomainError(f"{name} must lie in the closed positive octant")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise DomainError(f"{name} must be a unit vector (norm {np.linalg.norm(v):.15g})")
    return tuple(float(c) for c in v)


@dataclass(frozen=True)
class ScatterConfig:
    """Momentum, incoming and outgoing directions for one scattering event."""

    params: ModelParams
    p: float
    dir_in: tuple
    dir_out: tuple
    rho: float = None

    def __post_init__(self):
        n = self.params.n
        object.__setattr__(self, "dir_in", _unit_octant(self.dir_in, n, "dir_in"))
        object.__setattr__(self, "dir_out", _unit_octant(self.dir_out, n, "dir_out"))
        rho = rho_of(self.params, self.p)
        if self.rho is not None and abs(self.rho * self.p - self.params.gamma) > 1e-12 * self.params.gamma:
            raise DomainError("rho * p must equal gamma")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def normalized(cls, params, p, dir_in, dir_out):
        """Build a config after scaling both directions to unit length."""
        a = np.asarray(dir_in, dtype=float)
        b = np.asarray(dir_out, dtype=float)
        return cls(params, p, a / np.linalg.norm(a), b / np.linalg.norm(b))

    @property
    def cos_angle(self):
        return float(np.dot(self.dir_in, self.dir_out))


@dataclass(frozen=True)
class AmplitudeResult:
    value: complex
    method: str
    err_estimate: float = 0.0
    trace: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if not self.err_estimate >= 0:
            raise DomainError("err_estimate must be nonnegative")


def _check_not_forward(config):
    if config.cos_angle > FORWARD_LIMIT:
        raise ForwardSingularityError(f"dir_in . dir_out = {config.cos_angle:.12g} is too close to forward")


def partial_wave_Al(params, rho, l):
    """
    A_l = Gamma((3n-1)/2 + i rho + l) / Gamma((3n-1)/2 - i rho + l).

    ``l`` may be an integer array; every entry must satisfy
    l - sum(kappa) even and >= 0.
    """
    if not rho > 0:
        raise DomainError("rho must be positive")
    ls = np.asarray(l)
    d = ls - params.kappa_sum
    if np.any(d < 0) or np.any(d % 2):
        raise InvalidLabelsError([f"l - sum(kappa) must be even and >= 0 (sum(kappa) = {params.kappa_sum})"])
    return specfun.gamma_phase_ratio(ls + 0.5 * (3 * params.n - 1), rho)


def _gamma_ratio(a, b):
    return complex(np.exp(specfun.log_gamma(a) - specfun.log_gamma(b)))


def _prefactor(config, shift):
    # 2^{i rho} Gamma(shift + i rho) / Gamma(-i rho) / (i p^{(n-1)/2})
    rho = config.rho
    g = _gamma_ratio(shift + 1j * rho, -1j * rho)
    return np.exp(1j * rho * math.log(2.0)) * g / (1j * config.p ** (0.5 * (config.params.n - 1)))


# -- angular sums ---------------------------------------------------------

def _factor_table(kmax, a, b, ps, pc, t):
    """
    Orthonormal factors sqrt(N_k) sin^ps(t) cos^pc(t) P_k^(a,b)(cos 2t).

    ``a`` and ``ps`` are arrays over a family index, ``t`` is an array over
    directions.  Returns shape (kmax + 1, len(a), len(t)).  The recurrence
    runs on rescaled values with a separate log offset so that neither the
    polynomial (large) nor the trigonometric prefactor (tiny) over- or
    underflows.
    """
    a = np.asarray(a, dtype=float)[:, None]
    ps = np.asarray(ps, dtype=float)[:, None]
    t = np.asarray(t, dtype=float)[None, :]
    x = np.cos(2.0 * t)
    ab = a + b
    with np.errstate(divide="ignore"):
        offset = (0.5 * (math.log(2.0) + _lgamma(ab + 2.0) - _lgamma(a + 1.0) - math.lgamma(b + 1.0))
                  + ps * np.log(np.sin(t)) + pc * np.log(np.cos(t)))
    offset = np.broadcast_to(offset, np.broadcast_shapes(a.shape, t.shape)).copy()
    out = np.empty((kmax + 1,) + offset.shape)
    prev = np.zeros_like(offset)
    cur = np.ones_like(offset)
    out[0] = np.exp(offset)

    def coef(k):
        # off-diagonal a_k and diagonal b_k of the orthonormal Jacobi recurrence in x
        s = 2 * k + ab
        ak = np.sqrt(4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))) if k else 0.0
        bk = (b - a) / (ab + 2.0) if k == 0 else (b * b - a * a) / (s * (s + 2.0))
        return ak, bk

    a_k, b_k = coef(0)
    for k in range(kmax):
        a_next, b_next = coef(k + 1)
        prev, cur = cur, ((x - b_k) * cur - a_k * prev) / a_next
        big = np.abs(cur) > 1e100
        if np.any(big):
            scale = np.where(big, 1e-100, 1.0)
            cur = cur * scale
            prev = prev * scale
            offset = offset + np.where(big, 100.0 * math.log(10.0), 0.0)
        with np.errstate(under="ignore"):
            out[k + 1] = cur * np.exp(offset)
        a_k, b_k = a_next, b_next
    return out


def _lgamma(v):
    return np.vectorize(math.lgamma, otypes=[float])(v)


def angular_pair_sums(params, l_max, theta_a, theta_b):
    """
    S_l = sum_M Y_lM(theta_a) Y_lM(theta_b) for every l <= l_max.

    The sum over the intermediate labels is a chain of matrix products, one
    per polyspherical angle, so its cost grows like l_max^2 per level rather
    than with the number of states.

    Returns
    -------
    ls : ndarray of int
        l = sum(kappa), sum(kappa) + 2, ..., <= l_max.
    sums : ndarray of float
    """
    n = params.n
    if n < 2:
        raise DomainError("angular sums need n >= 2")
    theta = np.stack([np.asarray(theta_a, dtype=float), np.asarray(theta_b, dtype=float)])
    k1, k2 = params.kappa[0], params.kappa[1]
    size = l_max + 1
    # innermost angle: the states are labelled by m_{n-2} directly
    w = np.zeros(size)
    reach = np.zeros(size, dtype=bool)
    base = k1 + k2
    reach[base::2] = True
    if base <= l_max:
        kmax = (l_max - base) // 2
        tab = _factor_table(kmax, [k1 + 0.5], k2 + 0.5, [k1 + 1], k2 + 1, theta[:, 0])[:, 0, :]
        w[base::2][: kmax + 1] = tab[:, 0] * tab[:, 1]
    # remaining angles, innermost to outermost
    for i in range(n - 2, 0, -1):
        kap = stripped_kappa(params, i)
        lo = np.flatnonzero(reach)
        new = np.zeros(size)
        reach = np.zeros(size, dtype=bool)
        if lo.size and lo[0] + kap <= l_max:
            lo = lo[lo + kap <= l_max]
            kmax = (l_max - lo[0] - kap) // 2
            tab = _factor_table(kmax, lo + 1.5 * (n - i) - 1.0, kap + 0.5, lo + n - i, kap + 1,
                                theta[:, n - i - 1])
            prod = tab[..., 0] * tab[..., 1] * w[lo][None, :]
            for k in range(kmax + 1):
                up = lo + kap + 2 * k
                keep = up <= l_max
                np.add.at(new, up[keep], prod[k, keep])
                reach[up[keep]] = True
        w = new
    ls = np.arange(params.kappa_sum, l_max + 1, 2)
    return ls, w[ls]


# -- amplitudes -------------------------------------------------------------

def default_l_max(n):
    return {2: 2000, 3: 2000, 4: 400}.get(n, 120)


def _neville_diagonal(etas, values):
    """Successive polynomial extrapolants to eta = 0 (the diagonal of the tableau)."""
    table = [complex(v) for v in values]
    diag = [table[0]]
    cols = [table]
    for j in range(1, len(values)):
        prev = cols[-1]
        nxt = []
        for k in range(len(prev) - 1):
            e_far, e_near = etas[k], etas[k + j]
            nxt.append(prev[k + 1] + (prev[k + 1] - prev[k]) * e_near / (e_far - e_near))
        cols.append(nxt)
        diag.append(nxt[-1])
    return diag


def amplitude_pw(config, l_max=None, eta_schedule=ETA_SCHEDULE, rtol=1e-3):
    """
    Partial-wave amplitude with Abel damping exp(-eta l), extrapolated to eta -> 0.

    Parameters
    ----------
    config : ScatterConfig
    l_max : int, optional
        Highest l kept (default depends on n).
    eta_schedule : sequence of float
        Strictly decreasing damping parameters.
    rtol : float
        A TruncationWarning is issued when the error estimate exceeds
        ``rtol * |f|``.

    Returns
    -------
    AmplitudeResult
        ``err_estimate`` is the difference of the last two extrapolants plus
        a bound on the truncated tail.  ``trace`` holds the successive
        extrapolation differences.
    """
    params = config.params
    n = params.n
    _check_not_forward(config)
    if n == 1:
        raise ForwardSingularityError("for n = 1 every octant direction is forward")
    l_max = default_l_max(n) if l_max is None else int(l_max)
    if l_max < params.kappa_sum:
        raise DomainError("l_max must be >= sum(kappa)")
    etas = [float(e) for e in eta_schedule]
    if len(etas) < 2 or any(e <= 0 for e in etas) or any(b >= a for a, b in zip(etas, etas[1:])):
        raise DomainError("eta_schedule must be positive and strictly decreasing with >= 2 entries")
    _, th_in = to_polyspherical(np.array(config.dir_in))
    _, th_out = to_polyspherical(np.array(config.dir_out))
    ls, sums = angular_pair_sums(params, l_max, th_in, th_out)
    terms = partial_wave_Al(params, config.rho, ls) * sums
    pref = -1j * (2.0 * math.pi / config.p) ** (0.5 * (n - 1))
    values = [pref * np.sum(terms * np.exp(-e * ls)) for e in etas]
    diag = _neville_diagonal(etas, values)
    trace = tuple(abs(b - a) for a, b in zip(diag, diag[1:]))
    # the tail after l_max is bounded by the partial sums' size times the damping
    tail = abs(pref) * np.max(np.abs(sums[-10:])) * math.exp(-etas[-1] * l_max) / (1.0 - math.exp(-2 * etas[-1]))
    err = trace[-1] + tail
    value = diag[-1]
    if err > rtol * abs(value) or (len(trace) > 1 and trace[-1] > trace[-2]):
        warnings.warn(f"partial-wave extrapolation not converged (err ~ {err:.2e})", TruncationWarning, stacklevel=2)
    return AmplitudeResult(complex(value), "partial_wave", float(err), trace)


def _sign_patterns(n):
    grids = np.array(np.meshgrid(*([[1.0, -1.0]] * n), indexing="ij")).reshape(n, -1).T
    return grids, np.prod(grids, axis=1)


def amplitude_closed_k0(config):
    """Closed form for kappa = 0: a signed sum over the 2^n reflections of dir_out."""
    params = config.params
    if any(params.kappa):
        raise KappaNotZeroError("the closed form needs every kappa_i = 0")
    _check_not_forward(config)
    n = params.n
    prod = np.array(config.dir_in) * np.array(config.dir_out)
    eps, sigma = _sign_patterns(n)
    bases = 1.0 - eps @ prod
    expo = -0.5 * (n - 1) - 1j * config.rho
    total = np.sum(sigma * np.exp(expo * np.log(bases)))
    return AmplitudeResult(complex(_prefactor(config, 0.5 * (n - 1)) * total), "closed_k0", 0.0)


def amplitude_coulomb(config):
    """Free-space n-dimensional Coulomb amplitude with the same prefactor."""
    _check_not_forward(config)
    n = config.params.n
    base = 1.0 - config.cos_angle
    val = _prefactor(config, 0.5 * (n - 1)) * np.exp((-0.5 * (n - 1) - 1j * config.rho) * math.log(base))
    return AmplitudeResult(complex(val), "coulomb", 0.0)


def kernel_block_integral(a=2.0, b=1.0, s=2.0, nodes=64):
    """
    int_0^pi (a - b cos t)^(-s) sin t dt by Gauss-Legendre in cos t.

    The one-dimensional building block of the integral representation.
    """
    t, w = specfun.gauss_legendre(nodes)
    val = np.sum(w * np.exp(-s * np.log(a - b * t)))
    return complex(val) if isinstance(s, complex) else float(val.real)


def kernel_block_exact(a=2.0, b=1.0, s=2.0):
    """Antiderivative value [(a - b t)^(1-s) / (b (s - 1))] over t in [-1, 1]."""
    return ((a - b) ** (1 - s) - (a + b) ** (1 - s)) / (b * (s - 1))


def _tensor_integral(coeffs, kappa, s, nodes, threads):
    """int over [-1,1]^n of prod P_kappa_i(t_i) (1 - sum a_i t_i)^(-s)."""
    n = len(coeffs)
    t, w = specfun.gauss_legendre(nodes)
    axis_w = [w * specfun.legendre(k, t) for k in kappa]
    # all axes but the first on one tensor grid, looped over the first axis
    if n == 1:
        rest_dot, rest_w = np.zeros(1), np.ones(1)
    else:
        grids = np.meshgrid(*([t] * (n - 1)), indexing="ij")
        rest_dot = sum(c * g for c, g in zip(coeffs[1:], grids)).ravel()
        wg = np.meshgrid(*axis_w[1:], indexing="ij")
        rest_w = np.prod(np.stack(wg), axis=0).ravel()

    def slab(i):
        base = 1.0 - coeffs[0] * t[i] - rest_dot
        return axis_w[0][i] * np.sum(rest_w * np.exp(-s * np.log(base)))

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(slab, range(nodes)))
    else:
        parts = [slab(i) for i in range(nodes)]
    # fixed-order pairwise reduction
    return complex(np.sum(np.array(parts)))


def _max_nodes(n):
    return {1: 4096, 2: 1024, 3: 256, 4: 128}.get(n, 64)


def amplitude_integral(config, nodes_per_axis=64, tol=1e-10, threads=None):
    """
    Integral representation of the amplitude by tensor Gauss-Legendre
    quadrature in t_i = cos(alpha_i).

    The node count is doubled until two successive results agree to ``tol``
    (relative); the last difference is the error estimate.
    """
    params = config.params
    _check_not_forward(config)
    n = params.n
    if threads is None:
        threads = int(os.environ.get("CRSPECTRA_THREADS", "1") or 1)
    a_in, a_out = np.array(config.dir_in), np.array(config.dir_out)
    coeffs = a_in * a_out
    s = 0.5 * (3 * n - 1) + 1j * config.rho
    pref = _prefactor(config, 0.5 * (3 * n - 1)) * np.prod(a_in) * np.prod(a_out)
    nodes = int(nodes_per_axis)
    prev = _tensor_integral(coeffs, params.kappa, s, nodes, threads)
    limit = max(_max_nodes(n), nodes)
    while True:
        nodes *= 2
        cur = _tensor_integral(coeffs, params.kappa, s, nodes, threads)
        diff = abs(cur - prev)
        if diff <= tol * abs(cur):
            return AmplitudeResult(complex(pref * cur), "integral", float(abs(pref) * diff))
        if nodes >= limit:
            raise QuadratureNotConverged(f"relative change {diff / abs(cur):.2e} at {nodes} nodes per axis")
        prev = cur


AMPLITUDES = {
    "partial_wave": amplitude_pw,
    "closed_k0": amplitude_closed_k0,
    "coulomb": amplitude_coulomb,
    "integral": amplitude_integral,
}


def amplitude(config, method="closed_k0", **kw):
    if method not in AMPLITUDES:
        raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return AMPLITUDES[method](config, **kw)


def cross_section(config, method="closed_k0", **kw):
    """Differential cross-section |f|^2."""
    return abs(amplitude(config, method, **kw).value) ** 2
