"""
Brute-force reference solutions, independent of the closed forms.

* ``bound_energy``: Numerov shooting on a logarithmic grid for the mapped
  radial problem  -u''/2 + [L(L+1)/(2r^2) - gamma/r] u = E u.
* ``phase_shift``: Numerov on a uniform grid, matched to the asymptotic
  Coulomb expansion (without the Coulomb phase itself) at two points a
  quarter wavelength apart.
* ``grid_eigen_2d``: 5-point finite differences for n = 2 on a Dirichlet box
  in the positive quadrant, with Richardson extrapolation in h^2.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy import linalg, optimize
from scipy.sparse.linalg import eigsh

from .errors import AsymptoticRegionTooSmall, DomainError, NoConvergence


@dataclass(frozen=True)
class RadialProblem:
    """
    Mapped radial problem with effective angular momentum L.

    For the n-dimensional system L = l + (3n - 3)/2.  ``mode`` is
    ``"bound"`` (uses ``n_r``) or ``"scatter"`` (uses ``p``).
    """

    L: float
    gamma: float
    mode: str = "bound"
    n_r: int = 0
    p: float = None
    r_max: float = None
    steps: int = None

    @classmethod
    def for_state(cls, n, l, gamma, n_r):
        return cls(L=l + 1.5 * (n - 1), gamma=gamma, mode="bound", n_r=n_r)

    @classmethod
    def for_scattering(cls, n, l, gamma, p, **kw):
        return cls(L=l + 1.5 * (n - 1), gamma=gamma, mode="scatter", p=p, **kw)


def _numerov_log(L, gamma, E, x0, dx, num):
    """Outward Numerov for y = u / sqrt(r) on x = ln r; returns (node count, last y)."""
    c = (L + 0.5) ** 2
    k = dx * dx / 12.0
    r = math.exp(x0)
    ex = math.exp(dx)
    # regular solution y ~ r^(L+1/2) (1 - gamma r / (L+1))
    y0 = 1.0 - gamma * r / (L + 1.0)
    r1 = r * ex
    y1 = math.exp((L + 0.5) * dx) * (1.0 - gamma * r1 / (L + 1.0))
    w0 = 1.0 - k * (c - 2.0 * gamma * r - 2.0 * E * r * r)
    w1 = 1.0 - k * (c - 2.0 * gamma * r1 - 2.0 * E * r1 * r1)
    nodes = 0
    r = r1
    for _ in range(num - 2):
        r *= ex
        w2 = 1.0 - k * (c - 2.0 * gamma * r - 2.0 * E * r * r)
        y2 = ((12.0 - 10.0 * w1) * y1 - w0 * y0) / w2
        if (y2 < 0.0) != (y1 < 0.0):
            nodes += 1
        if abs(y2) > 1e250:
            y1 *= 1e-250
            y2 *= 1e-250
        y0, y1, w0, w1 = y1, y2, w1, w2
    return nodes, y1


def bound_energy(problem, dx=0.004, tol=1e-13):
    """
    Bound-state energy of the mapped radial problem by shooting.

    Node counting brackets the level, then Brent's method zeroes the
    outward solution at the far end of the box.
    """
    if problem.mode != "bound":
        raise DomainError("bound_energy needs a bound-mode problem")
    L, g, nr = problem.L, problem.gamma, problem.n_r
    if nr < 0 or L < 0 or g <= 0:
        raise DomainError("need n_r >= 0, L >= 0, gamma > 0")
    # well depth bound: min_r [L(L+1)/(2r^2) - g/r]
    lo = -g * g / (2.0 * L * (L + 1.0)) if L > 0.5 else -g * g
    lo *= 1.01
    # generous box: nu_max^2 / g covers the turning point of level nr
    nu_max = nr + L + 1.0
    r_max = problem.r_max or (2.0 * nu_max ** 2 + 40.0 * nu_max) / g
    x0 = math.log(1e-6 / g)
    num = problem.steps or int((math.log(r_max) - x0) / dx) + 1
    dx = (math.log(r_max) - x0) / (num - 1)

    def shoot(E):
        return _numerov_log(L, g, E, x0, dx, num)

    hi = -1e-14
    n_hi, n_lo = shoot(hi)[0], shoot(lo)[0]
    if n_hi <= nr:
        raise NoConvergence("box too small to hold the requested level")
    if n_lo > nr:
        raise NoConvergence("lower energy bound already has too many nodes")
    while n_hi != nr + 1 or n_lo != nr:
        mid = 0.5 * (lo + hi)
        if hi - lo < tol * abs(mid):
            raise NoConvergence("could not isolate the level by node counting")
        nodes = shoot(mid)[0]
        if nodes <= nr:
            lo, n_lo = mid, nodes
        else:
            hi, n_hi = mid, nodes
    try:
        return optimize.brentq(lambda E: shoot(E)[1], lo, hi, xtol=tol * abs(lo), rtol=1e-15, maxiter=200)
    except (ValueError, RuntimeError) as exc:
        raise NoConvergence(str(exc)) from exc


def _coulomb_asymptotic(L, eta, rho_r, terms=40):
    """(S1, S2) with F = C (cos d S1 + sin d S2) for the regular Coulomb wave."""
    f, g = 1.0, 0.0
    fs, gs = 1.0, 0.0
    last = math.inf
    for k in range(terms):
        a = (2 * k + 1) * eta / ((2 * k + 2) * rho_r)
        b = (L * (L + 1) - k * (k + 1) + eta * eta) / ((2 * k + 2) * rho_r)
        f, g = a * f - b * g, a * g + b * f
        size = abs(f) + abs(g)
        if size > last or size < 1e-17:
            break
        fs += f
        gs += g
        last = size
    th = rho_r - eta * math.log(2.0 * rho_r) - 0.5 * L * math.pi
    return gs * math.cos(th) + fs * math.sin(th), fs * math.cos(th) - gs * math.sin(th)


def _numerov_uniform(L, gamma, p, h, num):
    k = h * h / 12.0
    u = np.empty(num)
    r = h * np.arange(1, num + 1)
    q = L * (L + 1.0) / r ** 2 - 2.0 * gamma / r - p * p
    w = 1.0 - k * q
    u[0] = r[0] ** (L + 1) * (1.0 - gamma * r[0] / (L + 1.0))
    u[1] = r[1] ** (L + 1) * (1.0 - gamma * r[1] / (L + 1.0))
    wl = w.tolist()
    ul = u.tolist()
    for i in range(1, num - 1):
        ul[i + 1] = ((12.0 - 10.0 * wl[i]) * ul[i] - wl[i - 1] * ul[i - 1]) / wl[i + 1]
        if abs(ul[i + 1]) > 1e200:
            ul = [v * 1e-200 for v in ul]
    return r, np.array(ul)


def phase_shift(problem, points_per_wavelength=600, wavelengths=40, fit_tol=1e-6):
    """
    Phase shift delta (mod pi) of the mapped radial problem.

    The regular solution is integrated outward and matched at two points a
    quarter wavelength apart to sin(p r + rho ln 2pr - L pi/2 + delta)
    including its asymptotic 1/r corrections.  A third point checks the fit.
    """
    if problem.mode != "scatter" or not problem.p or problem.p <= 0:
        raise DomainError("phase_shift needs a scatter-mode problem with p > 0")
    L, g, p = problem.L, problem.gamma, problem.p
    lam = 2.0 * math.pi / p
    h = lam / points_per_wavelength
    # the match has to sit past the centrifugal turning point
    r_max = problem.r_max or max(wavelengths * lam, 20.0 * (L + 1.0) / p)
    num = problem.steps or int(r_max / h)
    r, u = _numerov_uniform(L, g, p, h, num)
    eta = -g / p
    quarter = points_per_wavelength // 4
    i2 = num - 1
    i1 = i2 - quarter
    i0 = i1 - quarter // 2
    s = [_coulomb_asymptotic(L, eta, p * r[i]) for i in (i0, i1, i2)]
    a_mat = np.array([s[1], s[2]])
    coef = np.linalg.solve(a_mat, [u[i1], u[i2]])
    amp = math.hypot(*coef)
    check = abs(coef @ np.array(s[0]) - u[i0]) / amp
    if check > fit_tol:
        raise AsymptoticRegionTooSmall(f"asymptotic fit residual {check:.2e} exceeds {fit_tol:.0e}")
    return math.atan2(coef[1], coef[0]) % math.pi


def _fd_hamiltonian(params, box, num):
    h = box / (num + 1)
    x = h * np.arange(1, num + 1)
    lap1 = sp.diags([np.ones(num - 1), -2.0 * np.ones(num), np.ones(num - 1)], [-1, 0, 1]) / h ** 2
    eye = sp.identity(num)
    kin = -0.5 * (sp.kron(lap1, eye) + sp.kron(eye, lap1))
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    b1, b2 = params.beta
    pot = -params.gamma / np.hypot(X1, X2) + b1 / (2 * X1 ** 2) + b2 / (2 * X2 ** 2)
    return (kin + sp.diags(pot.ravel())).tocsc(), float(pot.min()), h


def grid_eigenvalues(params, box, num, count):
    """Lowest ``count`` eigenvalues of the 5-point Hamiltonian at one resolution."""
    mat, vmin, h = _fd_hamiltonian(params, box, num)
    if num <= 64:
        vals = linalg.eigh(mat.toarray(), eigvals_only=True, subset_by_index=[0, count - 1])
    else:
        try:
            vals = eigsh(mat, k=count, sigma=vmin - 1.0, which="LM", return_eigenvectors=False, tol=1e-12)
        except Exception as exc:  # ArpackNoConvergence and friends
            raise NoConvergence(str(exc)) from exc
    return np.sort(vals), h


def grid_eigen_2d(params, box=40.0, resolutions=(120, 170, 240), count=4, detail=False):
    """
    Richardson-extrapolated lowest eigenvalues for n = 2.

    The three resolutions are fitted to E(h) = E0 + a h^2 + b h^4.
    """
    if params.n != 2:
        raise DomainError("grid_eigen_2d is for n = 2")
    if len(resolutions) < 3:
        raise DomainError("Richardson extrapolation needs at least 3 resolutions")
    rows, hs = [], []
    for num in resolutions:
        vals, h = grid_eigenvalues(params, box, num, count)
        rows.append(vals)
        hs.append(h)
    hs = np.array(hs)
    design = np.stack([np.ones_like(hs), hs ** 2, hs ** 4], axis=1)
    coef, *_ = np.linalg.lstsq(design, np.array(rows), rcond=None)
    out = coef[0]
    if detail:
        return out, {"h": hs.tolist(), "raw": np.array(rows).tolist()}
    return out
