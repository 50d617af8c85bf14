import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import polynomial as Pnp

from crspectra import specfun
from crspectra.errors import DomainError, PoleError

# principal-branch values from a 30-digit mpmath run
LOG_GAMMA_REF = [
    (1 + 1j, -0.65092319930185633889, -0.30164032046753319789),
    (0.5, 0.57236494292470008707, 0.0),
    (3.7 - 12.2j, -10.205061424817610947, -22.932275457292757588),
    (150 + 190j, 500.08496500423466485, 987.88106022603037384),
    (0.5 + 200j, -313.2403268257746511, 859.66368164324449067),
    (20 + 0.1j, 39.339627834207198826, 0.29705283724116485232),
]


@pytest.mark.parametrize("z, re, im", LOG_GAMMA_REF)
def test_log_gamma_reference(z, re, im):
    v = specfun.log_gamma(z)
    assert abs(v - complex(re, im)) <= 1e-13 * max(1.0, abs(complex(re, im)))


def test_log_gamma_trivial():
    # absolute: the upward shift cancels log(15!) against log Gamma(16)
    assert abs(specfun.log_gamma(1.0)) < 1e-14
    assert abs(specfun.log_gamma(2.0)) < 1e-14
    assert abs(specfun.log_gamma(0.5) - math.log(math.sqrt(math.pi))) < 1e-14


@pytest.mark.parametrize("z", [0, -1, -7, 0.0 + 0j])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError):
        specfun.log_gamma(z)


def test_log_gamma_array_matches_scalar():
    zs = np.array([0.3 + 0.2j, 5 - 3j, 40 + 70j])
    out = specfun.log_gamma(zs)
    assert out.shape == (3,)
    for z, v in zip(zs, out):
        assert abs(v - specfun.log_gamma(complex(z))) <= 1e-14 * abs(v)


def test_log_gamma_against_scipy_grid():
    from scipy.special import loggamma

    re, im = np.meshgrid(np.linspace(0.5, 200, 41), np.linspace(-200, 200, 41))
    z = (re + 1j * im).ravel()
    mine, ref = specfun.log_gamma(z), loggamma(z)
    assert np.max(np.abs(mine - ref) / np.maximum(1.0, np.abs(ref))) < 1e-13


@given(st.floats(-30, 30), st.floats(-40, 40))
def test_log_gamma_recurrence(x, y):
    z = complex(x, y)
    if abs(z) < 0.05 or (abs(y) < 1e-9 and x <= 0 and x == int(x)):
        return
    if abs(y) < 1e-9 and x < 0:
        return  # the real negative axis is a branch cut
    lhs = specfun.log_gamma(z + 1)
    rhs = specfun.log_gamma(z) + np.log(z)
    # equal modulo 2 pi i on the principal branch
    d = lhs - rhs
    d = complex(d.real, (d.imag + math.pi) % (2 * math.pi) - math.pi)
    assert abs(d) <= 1e-12 * max(1.0, abs(lhs))


def test_gamma_phase_ratio_reference():
    v = specfun.gamma_phase_ratio(1.0, 1.0)
    assert abs(v - complex(0.82347878764393348014, -0.56734705983240761685)) < 1e-14
    assert abs(np.angle(v) + 0.6032806409) < 1e-9
    assert specfun.gamma_phase_ratio(2.5, 0.0) == 1.0


def test_gamma_phase_ratio_domain():
    with pytest.raises(DomainError):
        specfun.gamma_phase_ratio(0.0, 1.0)


def test_gamma_phase_ratio_unit_modulus_table():
    a = np.arange(0.5, 61.0, 1.0)[:, None]
    rho = np.array([1e-3, 0.1, 1.0, 10.0, 50.0])[None, :]
    v = specfun.gamma_phase_ratio(a + 0 * rho, rho + 0 * a)
    assert np.max(np.abs(np.abs(v) - 1.0)) <= 1e-14


@given(st.floats(0.01, 500), st.floats(-500, 500))
def test_gamma_phase_ratio_unit_modulus(a, rho):
    assert abs(abs(specfun.gamma_phase_ratio(a, rho)) - 1.0) <= 1e-14


# -- polynomials ----------------------------------------------------------------

def _laguerre_coeffs(k, a):
    return [(-1) ** i * math.comb(k, i) * 0 + (-1) ** i * _binom(k + a, k - i) / math.factorial(i) for i in range(k + 1)]


def _binom(x, m):
    return math.gamma(x + 1) / (math.gamma(m + 1) * math.gamma(x - m + 1))


def _jacobi_value(k, a, b, x):
    # explicit sum in powers of (x-1)/2 and (x+1)/2
    return sum(_binom(k + a, k - s) * _binom(k + b, s) * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (k - s)
               for s in range(k + 1))


def test_laguerre_examples():
    assert specfun.laguerre(0, 3.3, 7.0) == 1.0
    assert specfun.laguerre(1, 2.0, 0.5) == pytest.approx(2.5, abs=1e-15)
    assert specfun.laguerre(2, 0.0, 2.0) == pytest.approx(-1.0, abs=1e-15)
    # mpmath references
    assert specfun.laguerre(5, 2.5, 3.3) == pytest.approx(0.41718599999999920893, rel=1e-13)
    assert specfun.laguerre(7, 0.5, 10.0) == pytest.approx(-22.993357824900793651, rel=1e-13)
    assert specfun.laguerre(12, 11.0, 4.0) == pytest.approx(-4315.1762236117791673, rel=1e-13)


@pytest.mark.parametrize("k", range(9))
def test_laguerre_explicit_coefficients(k):
    x = np.linspace(0, 12, 17)
    for a in (0.0, 0.5, 3.0):
        ref = Pnp.polyval(x, _laguerre_coeffs(k, a))
        assert np.allclose(specfun.laguerre(k, a, x), ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))


def test_jacobi_examples():
    assert specfun.jacobi(0, 0.3, 0.7, 0.2) == 1.0
    assert specfun.jacobi(1, 1.0, 1.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert specfun.jacobi(1, 0.5, 2.0, 0.3) == pytest.approx(((4.5) * 0.3 + 0.5 - 2.0) / 2, abs=1e-15)
    assert specfun.jacobi(5, 0.5, 1.5, 0.3) == pytest.approx(0.5180174999999999875, rel=1e-13)
    assert specfun.jacobi(9, 2.5, 0.5, -0.7) == pytest.approx(-0.35544321769531221947, rel=1e-12)
    assert specfun.jacobi(4, 10.5, 3.5, 0.9) == pytest.approx(829.16478125000006694, rel=1e-13)
    with pytest.raises(DomainError):
        specfun.jacobi(2, -1.0, 0.0, 0.1)


@pytest.mark.parametrize("k", range(9))
def test_jacobi_explicit_sum(k):
    x = np.linspace(-1, 1, 15)
    for a, b in ((0.5, 0.5), (1.5, 0.5), (3.5, 2.5)):
        ref = np.array([_jacobi_value(k, a, b, t) for t in x])
        assert np.allclose(specfun.jacobi(k, a, b, x), ref, rtol=1e-12, atol=1e-12)


def test_legendre_examples():
    assert specfun.legendre(0, 0.3) == 1.0
    assert specfun.legendre(1, -0.4) == -0.4
    assert specfun.legendre(2, 0.5) == pytest.approx(-0.125, abs=1e-16)
    assert specfun.legendre(7, 0.37) == pytest.approx(-0.087036466699964385307, rel=1e-13)
    with pytest.raises(DomainError):
        specfun.legendre(2, 1.5)


@pytest.mark.parametrize("k", range(9))
def test_legendre_is_jacobi_zero_zero(k):
    x = np.linspace(-1, 1, 11)
    assert np.allclose(specfun.legendre(k, x), [_jacobi_value(k, 0, 0, t) for t in x], atol=1e-12)


# -- spherical harmonics ---------------------------------------------------------

def test_sph_harm_low_orders():
    assert specfun.sph_harm(0, 0, 0.4, 1.0) == pytest.approx(1 / math.sqrt(4 * math.pi))
    assert specfun.sph_harm(1, 0, 0.4, 2.0) == pytest.approx(math.sqrt(3 / (4 * math.pi)) * math.cos(0.4))
    with pytest.raises(DomainError):
        specfun.sph_harm(1, 2, 0.1, 0.1)


def test_sph_harm_against_scipy():
    from scipy import special

    alpha, beta = 0.77, 2.1
    for k in range(6):
        for s in range(-k, k + 1):
            ref = special.sph_harm_y(k, s, alpha, beta)
            assert abs(specfun.sph_harm(k, s, alpha, beta) - ref) < 1e-13


def _sphere_grid(num=24):
    t, wt = specfun.gauss_legendre(num, -1.0, 1.0)
    ph = 2 * math.pi * np.arange(2 * num) / (2 * num)
    A, B = np.meshgrid(np.arccos(t), ph, indexing="ij")
    W = np.repeat(wt[:, None], 2 * num, axis=1) * (2 * math.pi / (2 * num))
    return A, B, W


def test_sph_harm_norm_y21():
    A, B, W = _sphere_grid()
    assert abs(np.sum(W * np.abs(specfun.sph_harm(2, 1, A, B)) ** 2) - 1.0) < 1e-10


def test_sph_harm_orthonormal_up_to_4():
    A, B, W = _sphere_grid()
    labels = [(k, s) for k in range(5) for s in range(-k, k + 1)]
    vals = [specfun.sph_harm(k, s, A, B) for k, s in labels]
    gram = np.array([[np.sum(W * np.conj(u) * v) for v in vals] for u in vals])
    assert np.max(np.abs(gram - np.eye(len(labels)))) <= 1e-9


def test_gauss_legendre_interval():
    x, w = specfun.gauss_legendre(10, 0.0, 2.0)
    assert np.sum(w) == pytest.approx(2.0)
    assert np.sum(w * x ** 5) == pytest.approx(2.0 ** 6 / 6)
