import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lutcgh.field import InvalidFieldError, as_image, dft2, idft2, intensity, total_energy

from conftest import direct_dft2


def random_field(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_dft_of_delta_is_constant():
    f = np.zeros((4, 4), complex)
    f[0, 0] = 1
    np.testing.assert_allclose(dft2(f), np.full((4, 4), 0.25), atol=1e-15)


def test_dft_of_constant_is_delta():
    F = dft2(np.ones((2, 2)))
    expected = np.zeros((2, 2))
    expected[0, 0] = 2
    np.testing.assert_allclose(F, expected, atol=1e-15)


def test_idft_of_delta_is_constant():
    F = np.zeros((4, 4), complex)
    F[0, 0] = 1
    np.testing.assert_allclose(idft2(F), np.full((4, 4), 0.25), atol=1e-15)


def test_parseval_64(rng):
    f = random_field(rng, (64, 64))
    assert abs(total_energy(dft2(f)) - total_energy(f)) <= 1e-10 * total_energy(f)


def test_round_trip_32(rng):
    f = random_field(rng, (32, 32))
    np.testing.assert_allclose(idft2(dft2(f)), f, rtol=0, atol=1e-10)


@pytest.mark.parametrize("shape", [(1, 1), (1, 5), (3, 2), (4, 4), (7, 5), (8, 16), (16, 16)])
def test_matches_direct_summation(rng, shape):
    f = random_field(rng, shape)
    np.testing.assert_allclose(dft2(f), direct_dft2(f, -1), rtol=0, atol=1e-9)
    np.testing.assert_allclose(idft2(f), direct_dft2(f, +1), rtol=0, atol=1e-9)


def test_round_trip_1024(rng):
    f = random_field(rng, (1024, 1024))
    err = np.max(np.abs(idft2(dft2(f)) - f))
    assert err <= 1e-10 * np.max(np.abs(f))


def test_hermitian_symmetry_for_real_input(rng):
    f = rng.standard_normal((12, 10))
    F = dft2(f)
    mirrored = np.conj(np.roll(np.flip(F, (0, 1)), 1, axis=(0, 1)))
    np.testing.assert_allclose(F, mirrored, atol=1e-12)


def test_batched_transform_matches_per_frame(rng):
    stack = random_field(rng, (3, 8, 8))
    F = dft2(stack)
    for n in range(3):
        np.testing.assert_allclose(F[n], dft2(stack[n]), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 24), st.integers(1, 24), st.integers(0, 2**32 - 1),
    st.floats(1e-3, 1e3),
)
def test_unitarity_property(n_y, n_x, seed, scale):
    f = scale * random_field(np.random.default_rng(seed), (n_y, n_x))
    e = total_energy(f)
    assert abs(total_energy(dft2(f)) - e) <= 1e-10 * e
    np.testing.assert_allclose(idft2(dft2(f)), f, rtol=0, atol=1e-10 * np.max(np.abs(f)))


def test_intensity_examples():
    assert intensity(np.array([[3 + 4j]]))[0, 0] == 25
    assert not intensity(np.zeros((3, 3), complex)).any()
    phases = np.exp(1j * np.linspace(0, 6, 9)).reshape(3, 3)
    np.testing.assert_allclose(intensity(phases), 1.0, atol=1e-15)


def test_total_energy_examples():
    delta = np.zeros((3, 3))
    delta[1, 1] = 1
    assert total_energy(delta) == 1
    assert total_energy(np.ones((2, 2))) == 4
    f = np.array([[1 + 1j, 2]])
    assert total_energy((2 - 1j) * f) == pytest.approx(5 * total_energy(f))


@pytest.mark.parametrize("bad", [np.zeros((0, 4)), np.zeros(5), np.array([[np.nan, 1]]), np.array([[np.inf]])])
def test_invalid_fields_rejected(bad):
    with pytest.raises(InvalidFieldError):
        dft2(bad)


def test_image_range_enforced():
    as_image(np.array([[0.0, 1.0]]))
    with pytest.raises(InvalidFieldError):
        as_image(np.array([[1.5]]))
    with pytest.raises(InvalidFieldError):
        as_image(np.array([[-0.1]]))
