import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_atomic(rng, k=None, lo=-3.0, hi=3.0):
    from freedev.measures import RealMeasure
    k = k or int(rng.integers(1, 7))
    return RealMeasure.atoms(rng.uniform(lo, hi, k), rng.dirichlet(np.ones(k)))


def random_hermitian(rng, n, complex_=True):
    a = rng.standard_normal((n, n))
    if complex_:
        a = a + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_network(rng, n=None, p=0.4, scale=1.0, loops=0.5, complex_=True):
    from freedev.network import Network
    n = n or int(rng.integers(1, 9))
    edges, lps = {}, {}
    for u in range(n):
        if rng.random() < loops:
            lps[u] = scale * rng.standard_normal()
        for v in range(u + 1, n):
            if rng.random() < p:
                w = scale * rng.standard_normal()
                if complex_:
                    w = w + 1j * scale * rng.standard_normal()
                edges[(u, v)] = w
    return Network(n, edges, lps)


def random_root_law(rng, classes=None):
    from freedev.network import RootedNetwork, RootLaw
    classes = classes or int(rng.integers(1, 5))
    law = RootLaw()
    for w in rng.dirichlet(np.ones(classes)):
        net = random_network(rng, int(rng.integers(1, 7)), p=0.6)
        law.add(RootedNetwork.at(net, 0), float(w))
    return law


def random_theta_network(rng, theta, n=None):
    """Network whose nonzero weights are >= theta in modulus and degrees <= theta^-2."""
    from freedev.network import Network
    n = n or int(rng.integers(2, 8))
    cap = theta ** -2
    net = Network(n)
    order = [(u, v) for u in range(n) for v in range(u, n)]
    for k in rng.permutation(len(order)):
        u, v = order[k]
        if rng.random() > 0.5:
            continue
        mag = rng.uniform(theta, 1.5)
        deg = net.degrees()
        if max(deg[u], deg[v]) + mag**2 > cap:
            continue
        if u == v:
            net._adj[u][u] = float(mag * rng.choice([-1, 1]))
        else:
            net._set(u, v, complex(mag * np.exp(1j * rng.uniform(0, 2 * np.pi))))
    return net


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """record(label, ok, detail): log one acceptance line, then assert."""
    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {label}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
