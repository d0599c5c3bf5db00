import math
import warnings

import numpy as np
import pytest

from freedev.measures import RealMeasure, ks_distance, wasserstein
from freedev.network import (InadmissibleError, Interval, Network, RootedNetwork, RootLaw,
                             admissible, ball, canonical_key, chi, chi_tilde, compnorm_gamma,
                             degree, empirical_root_law, extract_network, finite_matrix_law,
                             isomorphic, law_spectral_measure, local_distance, paired_edge_law,
                             path_distance, phi, projective_distance, psi, rate_I,
                             root_spectral_measure, single_vertex_law, truncate, xi)

from conftest import random_network

EMPTY = RootedNetwork.empty()


def star(leaves, w=1.0):
    return RootedNetwork.at(Network(leaves + 1, {(0, v): w for v in range(1, leaves + 1)}), 0)


def path(k, w=1.0):
    return Network(k, {(i, i + 1): w for i in range(k - 1)})


def test_degree():
    net = Network(3, {(0, 1): 2.0}, {2: 0.5})
    assert degree(net, 0) == 4 and degree(net, 1) == 4
    assert degree(Network(1), 0) == 0
    assert degree(net, 2) == pytest.approx(0.25)


def test_path_distance():
    w = 2 - 1j
    assert path_distance(Network(2, {(0, 1): w}), 0, 1) == pytest.approx(1 / abs(w))
    assert path_distance(path(3, w), 0, 2) == pytest.approx(math.sqrt(2) / abs(w))
    assert path_distance(Network(2), 0, 1) == math.inf


def test_ball():
    g = RootedNetwork.at(Network(3, {(0, 1): 1.0, (1, 2): 1.0}, {0: 0.3}), 0)
    b0 = ball(g, 0)
    assert b0.size == 1 and b0.W[0, 0] == 0.3
    assert ball(g, 10).size == 3
    assert ball(star(4), 0.5).size == 1


def test_chi_shapes():
    th = 0.25
    assert chi(np.array([0.1, 0.25, 0.375, 0.5, 3]), th).tolist() == [0, 0, 0.5, 1, 1]
    top = th ** -2
    assert chi_tilde(np.array([0, top - 1, top - 0.5, top, top + 1]), th).tolist() == [1, 1, 0.5, 0, 0]


def test_truncate_examples():
    out = truncate(Network(2, {(0, 1): 0.5}), 0.3)
    assert out.weight(0, 1) == pytest.approx(0.5 * (0.5 - 0.3) / 0.3)
    assert out.weight(0, 1) == pytest.approx(1 / 3)
    net = Network(3, {(0, 1): 1.0 + 0.2j, (1, 2): 0.1})
    out = truncate(net, 0.3)
    assert out.weight(0, 1) == net.weight(0, 1)
    assert out.weight(1, 2) == 0


def test_truncate_kills_high_degree():
    out = truncate(Network.from_matrix(star(16).W), 0.25)
    assert not any(True for _ in out.edges())


def test_local_distance_examples():
    g = RootedNetwork.at(random_network(np.random.default_rng(1), 6), 0)
    assert local_distance(g, g) == 0.0
    x, y = 0.4, 1.1
    gamma = abs(x - y)
    assert local_distance(RootedNetwork.loop(x), RootedNetwork.loop(y)) == pytest.approx(gamma / (1 + gamma))
    assert local_distance(EMPTY, RootedNetwork.edge(1.0)) == pytest.approx(0.5)


def test_local_distance_relabel_invariant(rng):
    for _ in range(30):
        net = random_network(rng, 6)
        other = random_network(rng, 6)
        perm = rng.permutation(6)
        relabeled = Network.from_matrix(net.to_matrix()[np.ix_(perm, perm)])
        root = int(np.flatnonzero(perm == 0)[0])
        g, h = RootedNetwork.at(net, 0), RootedNetwork.at(other, 0)
        gp = RootedNetwork.at(relabeled, root)
        assert local_distance(g, gp) == 0.0
        assert local_distance(g, h) == local_distance(gp, h)


def test_local_distance_pseudometric(rng):
    for _ in range(40):
        gs = [RootedNetwork.at(random_network(rng, 5), 0) for _ in range(3)]
        b = lambda g, h: _bounds(local_distance(g, h))
        assert b(gs[0], gs[1]) == b(gs[1], gs[0])
        assert b(gs[0], gs[2])[0] <= b(gs[0], gs[1])[1] + b(gs[1], gs[2])[1] + 1e-12


def _bounds(d):
    return (d.lower, d.upper) if isinstance(d, Interval) else (d, d)


def test_local_distance_interval_beyond_cap():
    g, h = star(14, 1.0), star(14, 1.0 + 1e-3)
    d = local_distance(g, h, size_cap=4)
    lo, hi = _bounds(d)
    assert lo <= local_distance(g, h, size_cap=20) <= hi


def test_projective_examples():
    g = RootedNetwork.at(random_network(np.random.default_rng(2), 5), 0)
    d = projective_distance(g, g)
    assert d.lower == 0 and d.upper <= 2.0 ** -20
    d = projective_distance(star(16), EMPTY)
    assert d.lower <= 1 / 8 <= d.upper
    assert d.upper - d.lower <= 2e-6


def test_canonical_key_and_isomorphism(rng):
    net = random_network(rng, 6, p=0.7)
    perm = np.concatenate([[0], 1 + rng.permutation(5)])
    g = RootedNetwork.at(net, 0)
    h = RootedNetwork(net.to_matrix()[np.ix_(perm, perm)])
    assert canonical_key(g) == canonical_key(h)
    assert isomorphic(g, h)
    assert not isomorphic(RootedNetwork.edge(1 + 1j), RootedNetwork.edge(1 - 1j))


def test_empirical_root_law_examples():
    law = empirical_root_law(Network(2, loops={0: 0.7, 1: 0.7}))
    assert len(law) == 1 and law.weight_of(RootedNetwork.loop(0.7)) == pytest.approx(1)
    z = 0.5 + 2j
    law = empirical_root_law(Network(4, {(1, 2): z}))
    assert law.weight_of(RootedNetwork.edge(z)) == pytest.approx(0.25)
    assert law.weight_of(RootedNetwork.edge(np.conj(z))) == pytest.approx(0.25)
    assert law.weight_of(EMPTY) == pytest.approx(0.5)


def test_block_replication_law(rng):
    h = random_network(rng, 3, p=1.0).to_matrix()
    base = empirical_root_law(Network.from_matrix(h))
    k, r = 5, 2
    big = np.zeros((3 * k + r, 3 * k + r), dtype=complex)
    for i in range(k):
        big[3 * i:3 * i + 3, 3 * i:3 * i + 3] = h
    rep = empirical_root_law(Network.from_matrix(big))
    scale = 3 * k / (3 * k + r)
    for g, w in base:
        assert rep.weight_of(g) == pytest.approx(w * scale)
    assert rep.weight_of(EMPTY) == pytest.approx(r / (3 * k + r) + scale * base.weight_of(EMPTY))


def test_functionals():
    x, z, a = -1.5, 0.6 + 0.8j, 1.3
    gx, gz = RootedNetwork.loop(x), RootedNetwork.edge(z)
    assert psi(gx, a) == pytest.approx(abs(x) ** a) and phi(gx, a) == 0
    assert xi(gx, 0.7) == pytest.approx(abs(x) ** 0.7)
    assert psi(gz, a) == 0 and phi(gz, a) == pytest.approx(abs(z) ** a / 2)
    assert xi(gz, a) == pytest.approx(abs(z) ** a)
    g = RootedNetwork.at(random_network(np.random.default_rng(3), 5, p=0.8), 0)
    assert xi(g, 2) == pytest.approx(degree(g, 0))


def test_rate_I_examples():
    a, b, alpha = 3.0, 0.7, 1.4
    assert rate_I(RootLaw([(RootedNetwork.loop(2.0), 1.0)]), a, b, alpha) == pytest.approx(b * 2 ** alpha)
    t = 1.7
    law = paired_edge_law(RealMeasure.dirac(t))
    assert rate_I(law, a, b, alpha) == pytest.approx(a * t**alpha / 2)
    assert rate_I(RootLaw([(EMPTY, 1.0)]), math.inf, math.inf, alpha) == 0


def test_rate_I_directions():
    law = paired_edge_law(RealMeasure.dirac(1.0), phase=math.pi / 2)
    assert rate_I(law, 1, 1, 1.5, supp_a=[1j]) < math.inf
    assert rate_I(law, 1, 1, 1.5, supp_a=[1]) == math.inf
    loops = RootLaw([(RootedNetwork.loop(-1.0), 1.0)])
    assert rate_I(loops, 1, 1, 1.5, supp_b=[1]) == math.inf
    assert admissible(RootedNetwork.loop(2.0), supp_b=[1])


def test_root_spectral_examples():
    assert root_spectral_measure(RootedNetwork.loop(0.3)).x.tolist() == [0.3]
    mu = root_spectral_measure(RootedNetwork.edge(3 + 4j))
    assert np.allclose(mu.x, [-5, 5]) and np.allclose(mu.w, [0.5, 0.5])
    mu = root_spectral_measure(RootedNetwork.at(path(3), 0))
    assert np.allclose(mu.x, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-12)
    assert np.allclose(mu.w, [0.25, 0.5, 0.25])


def test_law_spectral_examples():
    nu = RealMeasure.atoms([-1, 0.5, 2], [0.2, 0.3, 0.5])
    mu = law_spectral_measure(single_vertex_law(nu))
    assert wasserstein(mu, nu, 1) < 1e-12
    plus = RealMeasure.atoms([0.5, 2.0], [0.4, 0.6])
    mu = law_spectral_measure(paired_edge_law(plus, phase=0.3))
    sym = RealMeasure.atoms([-2, -0.5, 0.5, 2], [0.3, 0.2, 0.2, 0.3])
    assert wasserstein(mu, sym, 1) < 1e-12
    mu = law_spectral_measure(RootLaw([(EMPTY, 1.0)]))
    assert ks_distance(mu, RealMeasure.dirac(0)) == 0


def test_extract_network():
    net = extract_network(np.zeros((4, 4)))
    assert net.n == 4 and not list(net.edges())
    c = np.zeros((5, 5), dtype=complex)
    c[1, 3], c[3, 1] = 2j, -2j
    net = extract_network(c)
    assert list(net.edges()) == [(1, 3, 2j)]


def test_extracted_law_matches_spectrum(rng):
    from freedev.matrix import spectral_measure
    c = random_network(rng, 9, p=0.25).to_matrix()
    mu = law_spectral_measure(empirical_root_law(extract_network(c)))
    assert wasserstein(mu, spectral_measure(c), 1) < 1e-10


def test_sofic_constructors():
    law = single_vertex_law(RealMeasure.dirac(1.5))
    assert law.weight_of(RootedNetwork.loop(1.5)) == 1
    t, ph = 1.2, 0.4
    law = paired_edge_law(RealMeasure.dirac(t), phase=ph)
    z = t * np.exp(1j * ph)
    assert law.weight_of(RootedNetwork.edge(z)) == pytest.approx(0.5)
    assert law.weight_of(RootedNetwork.edge(np.conj(z))) == pytest.approx(0.5)
    with pytest.raises(InadmissibleError):
        paired_edge_law(RealMeasure.dirac(t), phase=ph, supp_a=[1])
    law = finite_matrix_law(np.diag([1.0, 2.0]))
    assert law.weight_of(RootedNetwork.loop(1.0)) == pytest.approx(0.5)
    assert law.weight_of(RootedNetwork.loop(2.0)) == pytest.approx(0.5)


def test_compnorm_gamma():
    assert compnorm_gamma(2, 0.5) == pytest.approx(0.5**19 / 16, rel=1e-12)
    assert compnorm_gamma(2, 0.5) < compnorm_gamma(3, 0.5)
    assert compnorm_gamma(2, 0.5) < compnorm_gamma(2, 0.6)
    with pytest.warns(RuntimeWarning):
        assert compnorm_gamma(0.01, 0.1) == 0.0


def test_json_round_trips(rng):
    net = random_network(rng, 5)
    assert Network.from_json(net.to_json()).allclose(net)
    law = RootLaw([(RootedNetwork.edge(1 + 1j), 0.5), (EMPTY, 0.5)])
    back = RootLaw.from_json(law.to_json())
    assert back.weight_of(RootedNetwork.edge(1 + 1j)) == pytest.approx(0.5)


def test_loops_must_be_real():
    with pytest.raises(ValueError):
        Network(1, loops={0: 1j})
    with pytest.raises(ValueError):
        RootedNetwork([[0, 1], [0, 0]])


def test_truncation_can_leave_weights_below_theta():
    # the ramp of chi maps 0.35 to 0.35 * (0.05 / 0.3); a second pass removes it
    once = truncate(Network(2, {(0, 1): 0.35}), 0.3)
    assert once.weight(0, 1) == pytest.approx(0.35 / 6)
    assert truncate(once, 0.3).weight(0, 1) == 0


def test_truncation_tower_depends_on_intermediate_degrees():
    # the 0.2 edge vanishes at theta = 1/4, which lowers deg(0) seen by the degree cutoff at 1/2
    net = Network(3, {(0, 1): 1.9, (0, 2): 0.2})
    direct = truncate(net, 0.5).weight(0, 1)
    tower = truncate(truncate(net, 0.25), 0.5).weight(0, 1)
    assert direct == pytest.approx(1.9 * 0.35 * (1.9 * 0.35 - 0.5) / 0.5)
    assert tower == pytest.approx(1.9 * 0.39 * (1.9 * 0.39 - 0.5) / 0.5)
