import math

import numpy as np
import pytest

from freedev.entries import TailLaw, estimate_tail_exponents, symmetric_real
from freedev.matrix import (band_thresholds, bennett_bound, decompose, eigenvalues,
                            gaussian_wigner, in_compact_set, load_matrix, sample_wigner,
                            save_matrix, schatten_bound, second_moment, spectral_measure)
from freedev.measures import RealMeasure

from conftest import random_hermitian


def test_wigner_hermitian(rng):
    law = TailLaw(1.2, 1.0, ((1, 0.5), (1j, 0.5)), standardize=True)
    diag = symmetric_real(1.2, standardize=True)
    for _ in range(5):
        x = sample_wigner(law, diag, 30, rng)
        assert np.array_equal(x, x.conj().T)
        assert np.all(np.diag(x).imag == 0)


def test_wigner_entry_variance(rng):
    law = symmetric_real(1.5, standardize=True)
    x = sample_wigner(law, law, 1415, rng)
    off = x[np.triu_indices(1415, 1)]
    assert off.size >= 1_000_000
    assert off.var() == pytest.approx(1.0, rel=0.015)


def test_wigner_tail_regression(rng):
    law = TailLaw(1.5, 1.0, ((1, 0.5), (-1, 0.5)))
    x = sample_wigner(law, law, 1415, rng)
    alpha_hat, _ = estimate_tail_exponents(x[np.triu_indices(1415, 1)])
    assert alpha_hat == pytest.approx(1.5, rel=0.1)


def test_real_diagonal_required(rng):
    law = TailLaw(1.0, 1.0, ((1j, 1.0),))
    with pytest.raises(ValueError):
        sample_wigner(law, law, 4, rng)


def test_decompose_all_small():
    x = np.full((50, 50), 0.5)
    dec = decompose(x, 1.0)
    assert np.array_equal(dec.A, x / math.sqrt(50))
    assert not (dec.B.any() or dec.C.any() or dec.D.any())


def test_decompose_tie_goes_to_b(monkeypatch):
    # thresholds of n = 10^4 (not inverted) applied to a small matrix
    from freedev import matrix
    big = band_thresholds(10_000, 1.9)
    assert big[1][0] < big[1][1]
    monkeypatch.setattr(matrix, "band_thresholds", lambda n, alpha: big)
    t2 = big[1][1]
    x = np.zeros((3, 3))
    x[0, 1] = x[1, 0] = t2
    dec = decompose(x, 1.9)
    assert dec.B[0, 1] != 0 and dec.C[0, 1] == 0


def test_decompose_reconstruction_exact(rng):
    law = symmetric_real(0.8, standardize=True)
    for n in (50, 200):
        x = sample_wigner(law, law, n, rng)
        dec = decompose(x, 0.8)
        assert np.array_equal(dec.A + dec.B + dec.C + dec.D, x / math.sqrt(n))
        masks = [m != 0 for m in (dec.A, dec.B, dec.C, dec.D)]
        assert np.max(sum(m.astype(int) for m in masks)) <= 1


def test_inverted_thresholds_reported():
    dec = decompose(np.eye(100), 1.0)
    assert dec.inverted and dec.counts()["B"] == 0


def test_spectral_measure_examples(rng):
    mu = spectral_measure(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(mu.x, [1, 2, 3]) and np.allclose(mu.w, 1 / 3)
    z = 1.5 - 2j
    mu = spectral_measure(np.array([[0, z], [np.conj(z), 0]]))
    assert np.allclose(mu.x, [-abs(z), abs(z)])
    h = random_hermitian(rng, 12)
    assert mu_mean(spectral_measure(h)) == pytest.approx(np.trace(h).real / 12, abs=1e-10)


def mu_mean(mu):
    return float(np.dot(mu.x, mu.w))


def test_second_moment(rng):
    assert second_moment(RealMeasure.dirac(0.0)) == 0
    assert second_moment(RealMeasure.atoms([-2, 2], [0.5, 0.5])) == pytest.approx(4)
    c = random_hermitian(rng, 9)
    assert second_moment(spectral_measure(c)) == pytest.approx(np.trace(c @ c).real / 9, abs=1e-10)
    assert in_compact_set(RealMeasure.dirac(1.0), 1.0)
    assert not in_compact_set(RealMeasure.dirac(1.1), 1.0)


def test_bennett_examples():
    assert bennett_bound(1, 1) == pytest.approx(math.exp(-(2 * math.log(2) - 1)))
    assert bennett_bound(1, 1) == pytest.approx(0.6796, abs=1e-4)
    assert bennett_bound(3, 0) == 1.0
    h = 1.5 * math.log(1.5) - 0.5
    assert bennett_bound(4, 2) == pytest.approx(math.exp(-4 * h))
    assert bennett_bound(4, 2) == pytest.approx(0.6487, abs=1e-4)


def test_schatten_bound_simple():
    h = np.array([[0.0, 2.0], [2.0, 0.0]])
    assert schatten_bound(h, 2) == pytest.approx(4.0)


def test_eigenvalues_reject_non_hermitian():
    with pytest.raises(ValueError):
        eigenvalues(np.array([[0, 1], [2, 0]], dtype=float))


def test_matrix_io(tmp_path, rng):
    h = random_hermitian(rng, 6)
    save_matrix(tmp_path / "m.bin", h, alpha=1.5, seed=3)
    back, header = load_matrix(tmp_path / "m.bin")
    assert np.array_equal(back, h) and header == {"n": 6, "alpha": 1.5, "seed": 3}
    g = gaussian_wigner(5, rng)
    save_matrix(tmp_path / "g.bin", g)
    back, _ = load_matrix(tmp_path / "g.bin")
    assert np.isrealobj(back) and np.array_equal(back, g)
