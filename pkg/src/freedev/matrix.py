"""Wigner matrices, the four-band truncation, spectra and concentration bounds."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .entries import TailLaw, sample_entries
from .measures import RealMeasure


def as_hermitian(h, atol: float = 0.0) -> np.ndarray:
    """Validate a square Hermitian array and return it unchanged."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    if np.iscomplexobj(h):
        if np.max(np.abs(h - h.conj().T), initial=0.0) > atol:
            raise ValueError("matrix is not Hermitian")
    elif np.max(np.abs(h - h.T), initial=0.0) > atol:
        raise ValueError("matrix is not symmetric")
    return h


def sample_wigner(offdiag: TailLaw, diag: TailLaw, n: int, rng: np.random.Generator,
                  allow_placeholder: bool = False) -> np.ndarray:
    """Hermitian X with i.i.d. upper triangle from ``offdiag`` and real diagonal from ``diag``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not diag.is_real:
        raise ValueError("diagonal law must be real")
    iu = np.triu_indices(n, k=1)
    upper = sample_entries(offdiag, rng, iu[0].size, allow_placeholder)
    d = sample_entries(diag, rng, n, allow_placeholder)
    dtype = float if offdiag.is_real else complex
    x = np.zeros((n, n), dtype=dtype)
    x[iu] = upper
    x = x + x.conj().T
    x[np.diag_indices(n)] = np.real(d)
    return x


def gaussian_wigner(n: int, rng: np.random.Generator, diag_var: float = 1.0) -> np.ndarray:
    """Real symmetric Wigner matrix with N(0,1) off-diagonal entries."""
    g = rng.standard_normal((n, n))
    x = np.triu(g, 1)
    x = x + x.T
    x[np.diag_indices(n)] = math.sqrt(diag_var) * rng.standard_normal(n)
    return x


@dataclass(frozen=True)
class BandDecomposition:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    epsilon: float
    thresholds: tuple

    @property
    def inverted(self) -> bool:
        """True when (log n)^(2/alpha) exceeds eps sqrt(n), which empties band B."""
        return self.thresholds[0] > self.thresholds[1]

    def counts(self) -> dict:
        return {k: int(np.count_nonzero(getattr(self, k))) for k in "ABCD"}


def band_thresholds(n: int, alpha: float) -> tuple[float, tuple]:
    if n < 3:
        raise ValueError("band decomposition needs n >= 3")
    ln = math.log(n)
    eps = 1.0 / ln
    root = math.sqrt(n)
    return eps, (ln ** (2.0 / alpha), eps * root, root / eps)


def decompose(x, alpha: float) -> BandDecomposition:
    """Split X / sqrt(n) by entry magnitude into four bands.

    A: |X| < t1;  B: t1 <= |X| <= t2;  C: t2 < |X| < t3;  D: t3 <= |X|,
    with t1 = (log n)^(2/alpha), t2 = eps sqrt(n), t3 = sqrt(n) / eps.
    When t1 > t2 the first matching band wins, so C only holds entries >= t1.
    """
    x = as_hermitian(x)
    n = x.shape[0]
    eps, (t1, t2, t3) = band_thresholds(n, alpha)
    s = x / math.sqrt(n)
    mag = np.abs(x)
    in_a = mag < t1
    in_b = ~in_a & (mag <= t2)
    in_c = ~in_a & ~in_b & (mag < t3)
    in_d = ~in_a & ~in_b & ~in_c
    zero = np.zeros_like(s)
    parts = [np.where(m, s, zero) for m in (in_a, in_b, in_c, in_d)]
    return BandDecomposition(*parts, epsilon=eps, thresholds=(t1, t2, t3))


def eigenvalues(h) -> np.ndarray:
    h = as_hermitian(h, atol=1e-12 * max(1.0, float(np.max(np.abs(h), initial=0.0))))
    try:
        return np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc


def spectral_measure(h) -> RealMeasure:
    lam = eigenvalues(h)
    return RealMeasure.atoms(lam, np.full(lam.size, 1.0 / lam.size))


def second_moment(mu: RealMeasure) -> float:
    return mu.moment(2)


def in_compact_set(mu: RealMeasure, s: float) -> bool:
    """Membership in K_s = {mu : int x^2 dmu <= s}."""
    return second_moment(mu) <= s


def bennett_bound(sigma2: float, t: float) -> float:
    """exp(-sigma2 h(t / sigma2)) with h(x) = (x + 1) log(x + 1) - x."""
    if sigma2 <= 0 or t < 0:
        raise ValueError("need sigma2 > 0 and t >= 0")
    x = t / sigma2
    h = (x + 1) * math.log1p(x) - x
    return math.exp(-sigma2 * h)


def schatten_bound(h, p: float) -> float:
    """(1/n) sum_k (sum_j |H_kj|^2)^(p/2), which dominates int |x|^p dmu_H for p in (0, 2]."""
    h = np.asarray(h)
    rows = np.sum(np.abs(h) ** 2, axis=1)
    return float(np.mean(rows ** (p / 2)))


def save_matrix(path, h, alpha: float | None = None, seed: int | None = None) -> None:
    """Write a JSON header line followed by row-major little-endian complex128 pairs."""
    h = np.ascontiguousarray(np.asarray(h, dtype="<c16"))
    header = {"n": int(h.shape[0]), "alpha": alpha, "seed": seed}
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode() + b"\n")
        fh.write(h.tobytes(order="C"))


def load_matrix(path) -> tuple[np.ndarray, dict]:
    raw = Path(path).read_bytes()
    cut = raw.index(b"\n")
    header = json.loads(raw[:cut])
    n = header["n"]
    data = np.frombuffer(raw[cut + 1:], dtype="<c16")
    if data.size != n * n:
        raise ValueError("matrix payload does not match header size")
    h = data.reshape(n, n).copy()
    if np.all(h.imag == 0):
        h = h.real.copy()
    return h, header
