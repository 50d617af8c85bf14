"""
Closed-form bound states on the positive octant.

psi(x) = R_jl(r) Y_lM(x_hat), normalised so that

    int_0^inf R^2 r^(n-1) dr = 1
    int_octant Y^2 prod_k sin^(k-1)(t_k) dt_k = 1

and therefore int_octant psi^2 dx = 1.  The printed normalisation constants
are kept alongside (``radial_constant_printed``, ``chi_printed``) so the
audit in :func:`normalization_audit` can report how far they are off.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import EmptySpectrumError, InvalidLabelsError, NotApplicableError
from .qnum import BoundLabels, ModelParams, stripped_kappa, validate


def principal(params, j):
    """nu = j + (3n - 1)/2, the effective principal quantum number."""
    return j + 0.5 * (3 * params.n - 1)


def energy(params, j):
    if j < params.kappa_sum:
        raise EmptySpectrumError(f"j = {j} is below sum(kappa) = {params.kappa_sum}")
    return -params.gamma ** 2 / (2.0 * principal(params, j) ** 2)


def scaled_u(params, j, r):
    return 4.0 * params.gamma * np.asarray(r, dtype=float) / (2 * j + 3 * params.n - 1)


def _require_valid(params, labels):
    bad = validate(params, labels)
    if bad:
        raise InvalidLabelsError(bad)


def _log_c_core(params, j, l):
    # log of [Gamma(j-l+1) / (2 Gamma(j+l+3n-1))]^(1/2) nu^(-(n+1)/2)
    n = params.n
    return (0.5 * (math.lgamma(j - l + 1) - math.log(2.0) - math.lgamma(j + l + 3 * n - 1))
            - 0.5 * (n + 1) * math.log(principal(params, j)))


def radial_constant(params, j, l):
    """Radial normalisation c giving int R^2 r^(n-1) dr = 1."""
    return math.exp(0.5 * params.n * math.log(2.0 * params.gamma) + _log_c_core(params, j, l))


def radial_constant_printed(params, j, l):
    """The published constant, with (2 gamma)^(-n/2) in front."""
    return math.exp(-0.5 * params.n * math.log(2.0 * params.gamma) + _log_c_core(params, j, l))


def radial_R(params, j, l, r, c=None):
    """R_jl(r) = c u^(l+n) exp(-u/2) L_{j-l}^{2l+3n-2}(u)."""
    if j < l or l < 0:
        raise InvalidLabelsError([f"need 0 <= l <= j, got j={j}, l={l}"])
    n = params.n
    u = scaled_u(params, j, r)
    if c is None:
        c = radial_constant(params, j, l)
    out = c * u ** (l + n) * np.exp(-0.5 * u) * specfun.laguerre(j - l, 2 * l + 3 * n - 2, u)
    return out if np.ndim(out) else float(out)


def _angular_factors(params, labels):
    """
    One (angle index, sin power, cos power, degree, alpha, beta, m_upper,
    m_lower, kappa) tuple per Jacobi factor, outermost angle first.
    """
    n = params.n
    chain = labels.chain()
    out = []
    for i in range(1, n - 1):
        kap = stripped_kappa(params, i)
        up, lo = chain[i - 1], chain[i]
        out.append((n - i, lo + n - i, kap + 1, (up - lo - kap) // 2,
                    lo + 1.5 * (n - i) - 1.0, kap + 0.5, up, lo, kap))
    k1, k2 = params.kappa[0], params.kappa[1]
    top = chain[-1]
    out.append((1, k1 + 1, k2 + 1, (top - k1 - k2) // 2, k1 + 0.5, k2 + 0.5, top, None, None))
    return out


def _log_jacobi_norm(deg, a, b):
    # log of 1 / int_0^{pi/2} sin^{2a+1} cos^{2b+1} P_deg^{(a,b)}(cos 2t)^2 dt
    return (math.log(2.0 * (2 * deg + a + b + 1)) + math.lgamma(deg + 1) + math.lgamma(deg + a + b + 1)
            - math.lgamma(deg + a + 1) - math.lgamma(deg + b + 1))


def chi(params, labels):
    """Angular normalisation constant (product of Jacobi norms)."""
    if params.n == 1:
        return 1.0
    return math.exp(0.5 * sum(_log_jacobi_norm(f[3], f[4], f[5]) for f in _angular_factors(params, labels)))


def _log_gamma_or_pole(v):
    # 1/Gamma vanishes at the poles
    if v <= 0 and v == int(v):
        return math.inf
    return math.lgamma(v)


def chi_printed(params, labels):
    """The published angular constant, transcribed term by term."""
    if params.n == 1:
        return 1.0
    n = params.n
    log_sq = 0.0
    for (_, _, _, _, _, _, up, lo, kap), i in zip(_angular_factors(params, labels), range(1, n - 1)):
        log_sq += (math.lgamma(0.5 * (up + lo + kap + 3 * n - 3 * i + 1))
                   + math.lgamma(0.5 * (up - lo - kap + 2))
                   + math.log(2 * lo + 3 * n - 3 * i + 1)
                   - _log_gamma_or_pole(0.5 * (up + lo - kap))
                   - math.lgamma(0.5 * (up - lo + kap + 3)))
    k1, k2 = params.kappa[0], params.kappa[1]
    m = labels.chain()[-1]
    log_sq += (math.lgamma(0.5 * (m + k1 + k2 + 4)) + math.lgamma(0.5 * (m - k1 - k2 + 2))
               + math.log(2 * m + 4) - math.lgamma(0.5 * (m + k1 - k2 + 3))
               - math.lgamma(0.5 * (m - k1 + k2 + 3)))
    return math.exp(0.5 * log_sq)


def angular_Y(params, labels, theta, norm=None):
    """
    Real angular factor Y_lM at polyspherical angles.

    Parameters
    ----------
    theta : array_like, shape (..., n-1)
        (t_1, ..., t_{n-1}), each in [0, pi/2].
    norm : float, optional
        Override for the normalisation constant (defaults to :func:`chi`).
    """
    if params.n == 1:
        raise NotApplicableError("the angular factor is the constant 1 for n = 1")
    theta = np.asarray(theta, dtype=float)
    out = np.full(theta.shape[:-1], chi(params, labels) if norm is None else norm)
    for idx, ps, pc, deg, a, b, *_ in _angular_factors(params, labels):
        t = theta[..., idx - 1]
        s, c = np.sin(t), np.cos(t)
        out = out * s ** ps * c ** pc * specfun.jacobi(deg, a, b, np.cos(2.0 * t))
    return out if out.ndim else float(out)


def to_polyspherical(x):
    """Cartesian octant points (..., n) -> (r, theta) with theta shaped (..., n-1)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    sq = np.cumsum(x * x, axis=-1)
    r = np.sqrt(sq[..., -1])
    theta = np.empty(x.shape[:-1] + (max(n - 1, 0),))
    for k in range(2, n + 1):
        theta[..., k - 2] = np.arctan2(np.sqrt(sq[..., k - 2]), x[..., k - 1])
    return r, theta


def from_polyspherical(r, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[-1] + 1
    x = np.empty(theta.shape[:-1] + (n,))
    run = r * np.ones(theta.shape[:-1])
    for k in range(n, 1, -1):
        t = theta[..., k - 2]
        x[..., k - 1] = run * np.cos(t)
        run = run * np.sin(t)
    x[..., 0] = run
    return x


def psi(params, labels, x):
    """Normalised bound-state wavefunction at octant points x (..., n)."""
    _require_valid(params, labels)
    x = np.asarray(x, dtype=float)
    r, theta = to_polyspherical(x)
    out = radial_R(params, labels.j, labels.l, r)
    if params.n > 1:
        out = out * angular_Y(params, labels, theta)
    return out


@dataclass(frozen=True)
class BoundState:
    """One normalised bound basis state |j; l M K>."""

    params: ModelParams
    labels: BoundLabels

    def __post_init__(self):
        _require_valid(self.params, self.labels)

    @property
    def energy(self):
        return energy(self.params, self.labels.j)

    @property
    def c(self):
        return radial_constant(self.params, self.labels.j, self.labels.l)

    @property
    def chi(self):
        return chi(self.params, self.labels)

    def __call__(self, x):
        return psi(self.params, self.labels, x)

    def casimir_eigenvalues(self):
        """Eigenvalues of I_0..I_{n-2}: m_p (m_p + 3n - 3p - 2) + 2 (n-p)(n-p-1)."""
        n = self.params.n
        return [m * (m + 3 * n - 3 * p - 2) + 2 * (n - p) * (n - p - 1)
                for p, m in enumerate(self.labels.chain()[: n - 1])]


def normalization_audit(params, labels, nodes=200):
    """
    Measure the norm of the state built with the printed constants.

    Returns a dict with the radial and angular norms obtained when c and chi
    are taken from the published formulas, plus the ratios
    printed / corrected of the constants themselves.
    """
    from scipy import integrate

    j, l = labels.j, labels.l
    cp = radial_constant_printed(params, j, l)
    cc = radial_constant(params, j, l)
    rad, _ = integrate.quad(lambda r: radial_R(params, j, l, r, c=cp) ** 2 * r ** (params.n - 1),
                            0.0, np.inf, limit=400, epsabs=0.0, epsrel=1e-12)
    out = {"radial_norm_printed": rad, "c_ratio": cp / cc}
    if params.n > 1:
        chp, chc = chi_printed(params, labels), chi(params, labels)
        ang = angular_gram(params, [labels], nodes=nodes, norms=[chp])[0, 0]
        out.update({"angular_norm_printed": ang, "chi_ratio": chp / chc})
    return out


def angular_gram(params, states, nodes=64, norms=None):
    """
    Gram matrix of angular factors under the weight prod sin^(k-1)(t_k),
    by tensor Gauss-Legendre quadrature on [0, pi/2]^(n-1).
    """
    n = params.n
    t, w = specfun.gauss_legendre(nodes, 0.0, 0.5 * math.pi)
    grids = np.meshgrid(*([t] * (n - 1)), indexing="ij")
    theta = np.stack(grids, axis=-1)
    weight = np.ones(theta.shape[:-1])
    for k, g in enumerate(np.meshgrid(*([w] * (n - 1)), indexing="ij"), start=1):
        weight = weight * g * np.sin(theta[..., k - 1]) ** (k - 1)
    vals = [angular_Y(params, s, theta, norm=None if norms is None else norms[i]) for i, s in enumerate(states)]
    m = len(states)
    gram = np.empty((m, m))
    for a in range(m):
        for b in range(a, m):
            gram[a, b] = gram[b, a] = np.sum(weight * vals[a] * vals[b])
    return gram
