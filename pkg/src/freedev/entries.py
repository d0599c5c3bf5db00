"""Heavy-tailed entry laws with stretched-exponential (Weibull) magnitudes.

A law has magnitude M with P(M >= t) = exp(-a t**alpha) and a direction drawn
from a finite measure on the unit circle, independently of M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

UNIT_TOL = 1e-9


class TailEstimationError(ValueError):
    pass


@dataclass(frozen=True)
class TailLaw:
    """Entry law in the stretched-exponential class.

    Parameters
    ----------
    alpha : float
        Tail exponent, in (0, 2).
    a : float
        Tail constant of the raw magnitude. ``math.inf`` tags the
        subgaussian (bounded) placeholder class.
    theta : tuple of (complex, float)
        Direction atoms on the unit circle with probability weights.
    standardize : bool
        If set, samples are centred and rescaled to unit variance.
    """

    alpha: float
    a: float
    theta: tuple = ((1.0 + 0.0j, 1.0),)
    standardize: bool = False
    t0: float = field(default=0.0, init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not (self.a > 0.0):
            raise ValueError(f"a must be positive or inf, got {self.a}")
        atoms = tuple((complex(d), float(w)) for d, w in self.theta)
        if not atoms:
            raise ValueError("theta needs at least one atom")
        for d, w in atoms:
            if w < 0.0:
                raise ValueError("theta weights must be nonnegative")
            if abs(abs(d) - 1.0) > UNIT_TOL:
                raise ValueError(f"direction {d} is not on the unit circle")
        total = sum(w for _, w in atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"theta weights sum to {total}, not 1")
        object.__setattr__(self, "theta", atoms)

    @property
    def is_real(self) -> bool:
        return all(abs(d.imag) <= UNIT_TOL for d, _ in self.theta)

    @property
    def directions(self) -> np.ndarray:
        return np.array([d for d, _ in self.theta], dtype=complex)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.theta], dtype=float)

    def mean_direction(self) -> complex:
        return complex(np.dot(self.weights, self.directions))

    def raw_moment(self, k: float) -> float:
        """E M**k of the raw Weibull magnitude."""
        return self.a ** (-k / self.alpha) * float(gamma_fn(1.0 + k / self.alpha))

    def raw_mean(self) -> complex:
        return self.raw_moment(1.0) * self.mean_direction()

    def raw_variance(self) -> float:
        return self.raw_moment(2.0) - abs(self.raw_mean()) ** 2

    def scale(self) -> float:
        """Multiplier m applied to raw samples (1 unless standardized)."""
        if not self.standardize:
            return 1.0
        v = self.raw_variance()
        if v <= 0.0:
            raise ValueError("degenerate law: zero variance")
        return v ** -0.5

    def tail_constant(self) -> float:
        """Tail constant of the magnitude actually produced by the sampler."""
        if math.isinf(self.a):
            return math.inf
        return self.a * self.scale() ** (-self.alpha)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "a": "inf" if math.isinf(self.a) else self.a,
            "theta": [[d.real, d.imag, w] for d, w in self.theta],
            "standardize": self.standardize,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TailLaw":
        a = obj["a"]
        a = math.inf if a in ("inf", "Infinity", None) else float(a)
        theta = tuple((complex(re, im), w) for re, im, w in obj["theta"])
        return cls(float(obj["alpha"]), a, theta, bool(obj.get("standardize", False)))


def symmetric_real(alpha: float, a: float = 1.0, standardize: bool = False) -> TailLaw:
    return TailLaw(alpha, a, ((-1.0, 0.5), (1.0, 0.5)), standardize)


def effective_tail_constant(alpha: float, theta) -> float:
    """Tail constant after standardization.

    The raw variance scales like a**(-2/alpha), so a * m**(-alpha) does not
    depend on the raw constant: it is fixed by alpha and theta alone.
    """
    return TailLaw(alpha, 1.0, theta, standardize=True).tail_constant()


def standardized_with_tail(alpha: float, a_eff: float, theta, rtol: float = 1e-9) -> TailLaw:
    """Standardized law whose sampled magnitude has tail constant ``a_eff``.

    The raw constant is found by bisection on ``a -> a * m(a)**(-alpha)``.
    That map is constant in ``a``, so the search succeeds only when
    ``a_eff`` equals :func:`effective_tail_constant`; otherwise a
    ``ValueError`` reports the attainable value.
    """
    def effective(a_raw):
        return TailLaw(alpha, a_raw, theta, standardize=True).tail_constant()

    lo, hi = 1e-6, 1e6
    f_lo, f_hi = effective(lo) - a_eff, effective(hi) - a_eff
    if abs(f_lo) <= rtol * a_eff:
        return TailLaw(alpha, lo, theta, standardize=True)
    if f_lo * f_hi > 0.0:
        raise ValueError(
            f"tail constant {a_eff} is not attainable after standardization; "
            f"the only attainable value is {effective(1.0):.12g}"
        )
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        f_mid = effective(mid) - a_eff
        if abs(f_mid) <= rtol * a_eff:
            return TailLaw(alpha, mid, theta, standardize=True)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return TailLaw(alpha, math.sqrt(lo * hi), theta, standardize=True)


def _draw_directions(law: TailLaw, rng: np.random.Generator, size) -> np.ndarray:
    if len(law.theta) == 1:
        return np.full(size, law.directions[0])
    idx = rng.choice(len(law.theta), size=size, p=law.weights)
    return law.directions[idx]


def sample_entries(law: TailLaw, rng: np.random.Generator, size,
                   allow_placeholder: bool = False) -> np.ndarray:
    """Draw an array of i.i.d. entries (complex dtype, real dtype for real laws)."""
    if math.isinf(law.a):
        if not allow_placeholder:
            raise ValueError("a = inf has no stretched-exponential sampler")
        # bounded placeholder: uniform magnitude on [0, sqrt(3)], unit second moment
        mags = rng.uniform(0.0, math.sqrt(3.0), size=size)
        out = mags * _draw_directions(law, rng, size)
        mean = math.sqrt(3.0) / 2.0 * law.mean_direction()
        if law.standardize:
            out = (out - mean) / math.sqrt(1.0 - abs(mean) ** 2)
        return out.real.copy() if law.is_real else out
    e = rng.standard_exponential(size=size)
    mags = (e / law.a) ** (1.0 / law.alpha)
    out = mags * _draw_directions(law, rng, size)
    if law.standardize:
        out = law.scale() * (out - law.raw_mean())
    return out.real.copy() if law.is_real else out


def sample_entry(law: TailLaw, rng: np.random.Generator) -> complex:
    return complex(sample_entries(law, rng, 1)[0])


def log_tail(law: TailLaw, t: float) -> float:
    """-log P(|Y| >= t) for the sampled magnitude (recentring ignored)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return 0.0
    return law.tail_constant() * t ** law.alpha


def estimate_tail_exponents(samples, top_fraction: float = 0.1) -> tuple[float, float]:
    """Fit log(-log P(|Y| >= t)) = log a + alpha log t over the top decile."""
    mags = np.sort(np.abs(np.asarray(samples)))
    n = mags.size
    if n < 10_000:
        raise TailEstimationError(f"need at least 1e4 samples, got {n}")
    if mags[0] == mags[-1]:
        raise TailEstimationError("degenerate sample: all magnitudes equal")
    start = int(np.floor((1.0 - top_fraction) * n))
    # survival at the k-th order statistic is (n - k) / n; drop the last few points
    ks = np.arange(start, n - 10)
    t = mags[ks]
    surv = (n - ks) / n
    keep = t > 0
    t, surv = t[keep], surv[keep]
    if t.size < 10 or t[0] == t[-1]:
        raise TailEstimationError("not enough distinct tail points")
    x = np.log(t)
    y = np.log(-np.log(surv))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(np.exp(intercept))
