import math

import numpy as np
import pytest

from freedev.measures import Grid, RealMeasure, free_convolve_semicircle, moment_alpha, semicircle
from freedev.rates import (RateAnswer, RateParams, is_symmetric, phi_bounds, rate_J,
                           variational_phi_restricted)

from conftest import random_atomic

BOTH = frozenset({-1, 1})


def symmetric_atomic(rng, k=None, hi=3.0):
    k = k or int(rng.integers(1, 5))
    t = rng.uniform(0.05, hi, k)
    w = rng.dirichlet(np.ones(k)) / 2
    return RealMeasure.atoms(np.concatenate([-t, t]), np.concatenate([w, w]))


def test_params_validation():
    with pytest.raises(ValueError):
        RateParams(2.0, 1, 1)
    with pytest.raises(ValueError):
        RateParams(1.0, 1, 1, supp_b={0})
    p = RateParams(1.2, math.inf, 2.0, supp_b=[1])
    assert RateParams.from_json(p.to_json()) == p


def test_answer_ordering():
    with pytest.raises(ValueError):
        RateAnswer(2.0, 1.0)
    with pytest.raises(ValueError):
        RateAnswer(0.0, 1.0, exact=3.0)


def test_phi_symmetric_two_point():
    ans = phi_bounds(RealMeasure.atoms([-1, 1], [0.5, 0.5]), RateParams(1.0, 2.0, 0.5))
    assert ans.exact == pytest.approx(0.5)
    assert ans.lower == ans.upper == ans.exact
    assert any("symmetric" in s for s in ans.provenance)


@pytest.mark.parametrize("alpha", [0.7, 1.5])
@pytest.mark.parametrize("supp_b", [{-1}, {1}, {-1, 1}])
def test_phi_dirac_zero(alpha, supp_b):
    ans = phi_bounds(RealMeasure.dirac(0.0), RateParams(alpha, 1.0, 2.0, supp_b=supp_b))
    assert ans.exact == 0 and ans.lower == 0 and ans.upper == 0


def test_phi_infinite_branch():
    nu = RealMeasure.atoms([-1.0, 0.4], [0.5, 0.5])
    assert nu.mean() == pytest.approx(-0.3)
    ans = phi_bounds(nu, RateParams(1.5, 1.0, 1.0, supp_b={1}))
    assert ans.exact == math.inf and ans.lower == math.inf


def test_phi_mirror_infinite_branch():
    nu = RealMeasure.atoms([1.0, -0.4], [0.5, 0.5])
    ans = phi_bounds(nu, RateParams(1.5, 1.0, 1.0, supp_b={-1}))
    assert ans.exact == math.inf


def test_phi_alpha_outside_range_gives_bounds():
    nu = RealMeasure.atoms([-1.0, 0.4], [0.5, 0.5])
    ans = phi_bounds(nu, RateParams(0.8, 1.0, 1.0, supp_b={1}))
    assert ans.exact is None and ans.lower < ans.upper == math.inf


def test_phi_infinite_coefficients():
    nu = RealMeasure.dirac(0.0)
    ans = phi_bounds(nu, RateParams(1.0, math.inf, math.inf))
    assert ans.exact == 0
    ans = phi_bounds(RealMeasure.atoms([-1, 1], [0.5, 0.5]), RateParams(1.0, math.inf, 1.0))
    assert ans.exact == 1.0


def test_phi_scaling(rng):
    p = RateParams(1.3, 1.0, 0.8)
    for _ in range(20):
        nu = symmetric_atomic(rng)
        s = rng.uniform(0.2, 3)
        dil = RealMeasure.atoms(s * nu.x, nu.w)
        assert phi_bounds(dil, p).exact == pytest.approx(s**1.3 * phi_bounds(nu, p).exact, rel=1e-12)


def test_symmetry_detection():
    assert is_symmetric(RealMeasure.atoms([-1, 1], [0.5, 0.5]))
    assert not is_symmetric(RealMeasure.atoms([-1, 1.1], [0.5, 0.5]))
    assert is_symmetric(semicircle())
    assert not is_symmetric(RealMeasure.grid(-1.9, 0.001, semicircle(Grid.span(-2, 2, 4001)).pdf))


def test_rate_J_semicircle():
    ans = rate_J(semicircle(), RateParams(1.5, 2.0, 0.5))
    assert ans.exact == 0


def test_rate_J_shifted_semicircle():
    c = 0.7
    sc = semicircle(Grid.span(-2, 2, 4001))
    mu = RealMeasure.grid(-2 + c, sc.dx, sc.pdf)
    p = RateParams(1.5, 2.0, 0.5)
    ans, ref = rate_J(mu, p), phi_bounds(RealMeasure.dirac(c), p)
    assert ans.lower == pytest.approx(ref.lower, rel=1e-3)
    assert ans.upper == pytest.approx(ref.upper, rel=1e-3)


def test_rate_J_point_mass_is_infinite():
    ans = rate_J(RealMeasure.dirac(0.0), RateParams(1.5, 1.0, 1.0))
    assert ans.exact == math.inf
    assert any("heuristic" in s for s in ans.provenance)
    assert ans.diagnostics["reason"]


def test_rate_J_matches_phi(rng):
    p = RateParams(1.5, 1.0, 1.0)
    for _ in range(3):
        nu = symmetric_atomic(rng, 2, hi=2.0)
        ans = rate_J(free_convolve_semicircle(nu), p)
        assert ans.exact == pytest.approx(phi_bounds(nu, p).exact, rel=0.02, abs=1e-3)


def test_variational_examples():
    p = RateParams(1.0, 3.0, 2.0, supp_b={1})
    assert variational_phi_restricted(RealMeasure.dirac(1.0), p) == pytest.approx(2.0)
    assert variational_phi_restricted(RealMeasure.dirac(-1.0), p) == math.inf


def test_variational_symmetric_matches_formula(rng):
    for _ in range(20):
        p = RateParams(rng.uniform(0.3, 1.9), rng.uniform(0.1, 3), rng.uniform(0.1, 3))
        nu = symmetric_atomic(rng)
        expected = min(p.a / 2, p.b) * moment_alpha(nu, p.alpha)
        assert variational_phi_restricted(nu, p) == pytest.approx(expected, abs=1e-9)


def test_variational_dominates_lower_bound(rng):
    for _ in range(50):
        p = RateParams(rng.uniform(0.3, 1.9), rng.uniform(0.1, 3), rng.uniform(0.1, 3),
                       supp_b=[(-1, 1), (1,), (-1,)][int(rng.integers(3))])
        nu = random_atomic(rng)
        assert phi_bounds(nu, p).lower <= variational_phi_restricted(nu, p) + 1e-12


def test_variational_needs_atoms():
    with pytest.raises(ValueError):
        variational_phi_restricted(semicircle(), RateParams(1.0, 1.0, 1.0))
