import numpy as np
import pytest
from scipy.special import sph_harm_y

from desktwin.splats import SplatGaussian, eval_color
from desktwin.splats.sh import sh_basis, sh_basis_grad, sh_dim

Y00 = 0.28209479


def oracle_basis(degree: int, direction: np.ndarray) -> np.ndarray:
    """Independent real-SH table via scipy's complex harmonics.

    Mapping: m > 0 -> sqrt(2) Re(Y_l^m), m < 0 -> sqrt(2) Im(Y_l^|m|),
    m = 0 -> Y_l^0 (Condon-Shortley phase retained).
    """
    x, y, z = direction / np.linalg.norm(direction)
    theta = np.arccos(np.clip(z, -1, 1))
    phi = np.arctan2(y, x)
    out = []
    for l in range(degree + 1):
        for m in range(-l, l + 1):
            ylm = sph_harm_y(l, abs(m), theta, phi)
            if m > 0:
                out.append(np.sqrt(2) * ylm.real)
            elif m < 0:
                out.append(np.sqrt(2) * ylm.imag)
            else:
                out.append(ylm.real)
    return np.array(out)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def make_splat(degree, coeffs):
    return SplatGaussian(opacity=0.5, position=[0, 0, 0], orientation=[1, 0, 0, 0],
                         scale=[1, 1, 1], sh_coeffs=coeffs)


def test_dc_only_color():
    k = 0.7
    g = make_splat(0, np.full((3, 1), k))
    c = eval_color(g, unit([0, 0, 1]))
    assert np.allclose(c, np.clip(k * Y00 + 0.5, 0, 1), atol=1e-7)


def test_zero_coeffs_gives_mid_gray():
    g = make_splat(2, np.zeros((3, 9)))
    assert np.allclose(eval_color(g, unit([1, 2, 3])), 0.5)


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_basis_matches_independent_table(degree, rng):
    for _ in range(20):
        d = unit(rng.normal(size=3))
        assert np.allclose(sh_basis(degree, d), oracle_basis(degree, d), atol=1e-12)


def test_degree1_at_axis_directions(rng):
    coeffs = rng.uniform(-0.5, 0.5, size=(3, 4))
    g = make_splat(1, coeffs)
    for sign in (1.0, -1.0):
        d = np.array([0.0, 0.0, sign])
        expected = np.clip(coeffs @ oracle_basis(1, d) + 0.5, 0, 1)
        assert np.allclose(eval_color(g, d), expected, atol=1e-12)


def test_rejects_non_unit_direction():
    g = make_splat(0, np.zeros((3, 1)))
    with pytest.raises(ValueError):
        eval_color(g, np.array([0.0, 0.0, 2.0]))


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_basis_gradients_match_finite_differences(degree, rng):
    h = 1e-6
    for _ in range(10):
        d = unit(rng.normal(size=3))
        grad = sh_basis_grad(degree, d)
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            # raw partials: basis polynomials evaluated off the sphere
            fd = (sh_basis(degree, d + e) - sh_basis(degree, d - e)) / (2 * h)
            assert np.allclose(grad[:, axis], fd, atol=1e-6)
        assert grad.shape == (sh_dim(degree), 3)
