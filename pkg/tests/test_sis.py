import numpy as np
import pytest

from gabinv.lattice import diagonal_lattice
from gabinv.sis import (
    FiniteSISModel,
    dft,
    sis_brute_force,
    sis_condition_d,
    sis_full_translation,
    sis_membership,
    sis_span_matrix,
)
from oracles import dense_projector


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _rand(rng, L):
    return rng.standard_normal(L) + 1j * rng.standard_normal(L)


def _random_support_hat(rng, L):
    support = rng.random(L) < rng.uniform(0.05, 0.6)
    return support * _rand(rng, L)


def test_dft_is_unitary_and_matches_definition(rng):
    f = _rand(rng, 12)
    k = np.arange(12)
    naive = np.array([np.sum(f * np.exp(-2j * np.pi * k * kk / 12)) for kk in k]) / np.sqrt(12)
    assert np.allclose(dft(f), naive, atol=1e-12)
    assert abs(np.linalg.norm(dft(f)) - np.linalg.norm(f)) < 1e-12


def test_model_validation_and_annihilator():
    m = FiniteSISModel(12, 3, np.ones(12))
    assert m.q == 4
    assert m.annihilator == diagonal_lattice(4)
    with pytest.raises(ValueError):
        FiniteSISModel(12, 5, np.ones(12))
    with pytest.raises(ValueError):
        FiniteSISModel(12, 3, np.ones(5))


def test_membership_of_translate(rng):
    L, p = 24, 4
    phi = _rand(rng, L)
    model = FiniteSISModel(L, p, phi)
    ok, m = sis_membership(np.roll(phi, p), model)
    assert ok
    xi = np.arange(L)
    assert np.allclose(m, np.exp(-2j * np.pi * p * xi / L), atol=1e-10)


def test_membership_rejections_and_constant_classes(rng):
    L, p = 24, 4
    phi = _rand(rng, L)
    model = FiniteSISModel(L, p, phi)
    P = dense_projector(sis_span_matrix(model))
    g = _rand(rng, L)
    perp = g - P @ g
    assert sis_membership(perp, model) == (False, None)
    flat = FiniteSISModel(L, p, np.fft.ifft(np.ones(L), norm="ortho"))
    m = np.tile(_rand(rng, L // p), p)
    ok, got = sis_membership(np.fft.ifft(m, norm="ortho"), flat)
    assert ok and np.allclose(got, m)


@pytest.mark.parametrize("L", [8, 12, 32, 64])
def test_membership_agrees_with_dense_projection(rng, L):
    for p in _divisors(L):
        model = FiniteSISModel(L, p, np.fft.ifft(_random_support_hat(rng, L), norm="ortho"))
        P = dense_projector(sis_span_matrix(model))
        inside = P @ _rand(rng, L)
        outside = _rand(rng, L)
        for f in (inside, outside):
            expect = np.linalg.norm(f - P @ f) <= 1e-9 * np.linalg.norm(f)
            assert sis_membership(f, model)[0] == expect


def test_condition_d_examples():
    L, p, pt = 24, 6, 2
    q, n_cos = L // p, p // pt
    band = np.zeros(L, dtype=complex)
    # band of class 0: bins r with r/q = 0 mod n_cos, one fundamental slot each
    for j in range(0, p, n_cos):
        band[j * q: j * q + q] = 1
    assert sis_condition_d(band, p, pt).holds
    res = sis_condition_d(np.ones(L), p, pt)
    assert not res.holds and res.max_active == n_cos and res.witnesses[0][0] == 0
    assert sis_condition_d(np.zeros(L), p, pt).holds
    with pytest.raises(ValueError, match="resolution mismatch"):
        sis_condition_d(np.ones(L), 5, 1)


def test_full_translation_examples():
    L, p = 32, 4
    pw = np.zeros(L)
    pw[3: 3 + L // p] = 1  # q consecutive bins: one per class
    assert sis_full_translation(pw, p)
    two = np.zeros(L)
    two[[1, 1 + L // p]] = 1
    assert not sis_full_translation(two, p)
    assert sis_full_translation(np.zeros(L), p)


def test_condition_d_matches_span_oracle_for_small_l(rng):
    count = 0
    for L in range(1, 17):
        for p in _divisors(L):
            for pt in _divisors(p):
                for _ in range(2):
                    ph = _random_support_hat(rng, L)
                    model = FiniteSISModel(L, p, np.fft.ifft(ph, norm="ortho"))
                    assert sis_condition_d(ph, p, pt).holds == sis_brute_force(model, pt), (L, p, pt)
                    count += 1
    assert count > 200
