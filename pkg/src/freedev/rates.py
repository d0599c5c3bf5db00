"""Closed-form rate bounds, the free-deconvolution rate and a restricted variational LP."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .measures import RealMeasure, free_deconvolve_semicircle, moment_alpha, reflect

ATOM_SYM_TOL = 1e-10
GRID_SYM_TOL = 1e-6


@dataclass(frozen=True)
class RateParams:
    alpha: float
    a: float
    b: float
    supp_a: tuple = (1 + 0j,)
    supp_b: frozenset = frozenset({-1, 1})

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")
        if not (self.a > 0 and self.b > 0):
            raise ValueError("a and b must be positive (possibly inf)")
        supp_b = frozenset(int(s) for s in self.supp_b)
        if not supp_b or not supp_b <= {-1, 1}:
            raise ValueError("supp_b must be a nonempty subset of {-1, +1}")
        object.__setattr__(self, "supp_b", supp_b)
        object.__setattr__(self, "supp_a", tuple(complex(d) for d in self.supp_a))

    def to_json(self) -> dict:
        def num(v):
            return "inf" if math.isinf(v) else v
        return {"alpha": self.alpha, "a": num(self.a), "b": num(self.b),
                "supp_a": [[d.real, d.imag] for d in self.supp_a],
                "supp_b": sorted(self.supp_b)}

    @classmethod
    def from_json(cls, obj: dict) -> "RateParams":
        def num(v):
            return math.inf if v in ("inf", "Infinity", None) else float(v)
        supp_a = tuple(complex(re, im) for re, im in obj.get("supp_a", [[1.0, 0.0]]))
        return cls(float(obj["alpha"]), num(obj["a"]), num(obj["b"]), supp_a,
                   frozenset(obj.get("supp_b", [-1, 1])))


@dataclass
class RateAnswer:
    lower: float
    upper: float
    exact: float | None = None
    provenance: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        if self.exact is not None and not (self.lower <= self.exact <= self.upper):
            raise ValueError("exact value outside its bounds")

    def to_json(self) -> dict:
        def num(v):
            if v is None:
                return None
            return "inf" if math.isinf(v) else v
        return {"lower": num(self.lower), "upper": num(self.upper), "exact": num(self.exact),
                "provenance": list(self.provenance), "diagnostics": self.diagnostics}


def _times(c: float, m: float) -> float:
    """c * m with inf * 0 = 0."""
    return 0.0 if m == 0 else c * m


def is_symmetric(nu: RealMeasure) -> bool:
    if nu.is_atomic:
        other = reflect(nu)
        if other.x.size != nu.x.size:
            return False
        return bool(np.all(np.abs(other.x - nu.x) <= ATOM_SYM_TOL)
                    and np.all(np.abs(other.w - nu.w) <= ATOM_SYM_TOL))
    flipped = np.interp(-nu.x, nu.x, nu.w, left=0.0, right=0.0)
    gap = 0.5 * nu.dx * np.sum(np.abs(nu.w - flipped))
    return bool(gap < GRID_SYM_TOL)


def _supported_in(nu: RealMeasure, sign: int) -> bool:
    lo, hi = nu.support()
    if nu.is_atomic:
        return lo >= 0 if sign > 0 else hi <= 0
    nz = nu.x[nu.w > 0]
    return bool(np.all(nz * sign >= 0))


def phi_bounds(nu: RealMeasure, p: RateParams) -> RateAnswer:
    """Bounds and proven exact values for Phi(nu)."""
    m = moment_alpha(nu, p.alpha)
    low_coef = min(p.a / 2, p.b)
    lower = _times(low_coef, m)
    prov = ["lower: (a/2 ^ b) m_alpha"]
    upper = math.inf
    both = p.supp_b == {-1, 1}
    one_sided = len(p.supp_b) == 1
    sign = next(iter(p.supp_b)) if one_sided else 0
    if both:
        upper = _times(p.b, m)
        prov.append("upper: b m_alpha (loop directions on both signs)")
    elif _supported_in(nu, sign):
        upper = _times(p.b, m)
        prov.append("upper: b m_alpha (nu supported on the loop sign)")
    exact = None
    heavy = 1 < p.alpha < 2
    symmetric = is_symmetric(nu)
    if both and symmetric:
        exact = lower
        prov.append("exact: (a/2 ^ b) m_alpha for symmetric nu")
    elif one_sided and heavy and symmetric:
        exact = _times(p.a / 2, m)
        prov.append("exact: (a/2) m_alpha for symmetric nu, one loop sign, alpha in (1,2)")
    elif one_sided and heavy and sign * nu.mean() < 0:
        exact = math.inf
        prov.append("exact: inf for mean opposite to the loop sign, alpha in (1,2)")
    if exact is None and lower == upper:
        exact = lower
        prov.append("exact: bounds coincide")
    if exact is not None and math.isinf(exact):
        lower = math.inf
    return RateAnswer(lower, upper, exact, prov, {"m_alpha": m})


def rate_J(mu: RealMeasure, p: RateParams, eta: float | None = None, dx: float = 0.01,
           tolerance: float | None = None) -> RateAnswer:
    """J(mu) = Phi(nu) if mu = mu_sc boxplus nu, inf otherwise.

    Membership in the image of the free convolution is decided numerically:
    a failed round trip is reported as the infinite branch, flagged heuristic.
    A symmetric ``mu`` forces a symmetric ``nu``, so the recovered measure is
    symmetrized in that case.
    """
    symmetric = is_symmetric(mu)
    dec = free_deconvolve_semicircle(mu, eta=eta, dx=dx, tolerance=tolerance, symmetric=symmetric)
    diag = {"roundtrip": dec.roundtrip, "tolerance": dec.tolerance, "misfit": dec.misfit,
            **dec.diagnostics}
    if not dec.ok:
        diag["reason"] = dec.reason
        return RateAnswer(math.inf, math.inf, math.inf,
                          ["inf: mu not recognized as mu_sc boxplus nu (numerical heuristic)"], diag)
    ans = phi_bounds(dec.nu, p)
    ans.provenance.insert(0, "J(mu) = Phi(nu) with nu recovered by free deconvolution")
    ans.diagnostics.update(diag)
    ans.diagnostics["nu"] = dec.nu.to_json()
    return ans


def variational_phi_restricted(nu: RealMeasure, p: RateParams) -> float:
    """Minimum of I over mixtures of loop laws and paired-edge laws with spectral measure nu.

    A loop at x costs b |x|^alpha per unit mass and is allowed when sign(x)
    lies in supp_b (x = 0 is free). A paired edge of magnitude t puts half
    its mass at t and half at -t and costs (a/2) t^alpha per unit mass.
    """
    if not nu.is_atomic:
        raise ValueError("restricted variational problem needs an atomic measure")
    x, w = nu.x, nu.w
    k = x.size
    loc = {float(v): i for i, v in enumerate(x)}
    cost, cols = [], []
    # loop variables
    for i, v in enumerate(x):
        if v == 0 or int(np.sign(v)) in p.supp_b:
            cost.append(0.0 if v == 0 else _times(p.b, abs(v) ** p.alpha))
            cols.append({i: 1.0})
    # paired-edge variables, one per magnitude with both signs present
    if p.supp_a and not math.isinf(p.a):
        for i, v in enumerate(x):
            j = loc.get(float(-v))
            if v > 0 and j is not None:
                cost.append(p.a / 2 * v**p.alpha)
                cols.append({i: 0.5, j: 0.5})
    if not cols:
        return math.inf
    a_eq = np.zeros((k, len(cols)))
    for c, col in enumerate(cols):
        for i, coef in col.items():
            a_eq[i, c] = coef
    cost = np.array(cost)
    if np.any(np.isinf(cost)):
        # an infinite coefficient forbids that server outright
        keep = np.isfinite(cost)
        a_eq, cost = a_eq[:, keep], cost[keep]
        if cost.size == 0:
            return math.inf
    res = linprog(cost, A_eq=a_eq, b_eq=w, bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status == 2:
        return math.inf
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return float(cost @ res.x)
