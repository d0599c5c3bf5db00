"""Rooted Hermitian networks: truncation, local topology, root laws and spectra.

A :class:`Network` is a finite weighted graph with Hermitian weights
(w(v, u) = conj w(u, v), real loops). A :class:`RootedNetwork` is a connected
component stored densely with the root at index 0.
"""

from __future__ import annotations

import heapq
import math
import warnings
from collections import deque
from typing import NamedTuple

import numpy as np

from .measures import RealMeasure, mixture

WEIGHT_TOL = 1e-12
KEY_RES = 1e-9


class Interval(NamedTuple):
    lower: float
    upper: float

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


class InadmissibleError(ValueError):
    pass


class Network:
    """Finite Hermitian network on vertices 0..n-1."""

    def __init__(self, n: int, edges=None, loops=None):
        self.n = int(n)
        self._adj = [dict() for _ in range(self.n)]
        for (u, v), w in (edges or {}).items():
            self._set(u, v, complex(w))
        for v, x in (loops or {}).items():
            x = complex(x)
            if abs(x.imag) > WEIGHT_TOL:
                raise ValueError(f"loop at {v} is not real")
            if x.real != 0.0:
                self._adj[v][v] = x.real

    def _set(self, u, v, w):
        if u == v:
            raise ValueError("use loops for diagonal weights")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError("vertex out of range")
        if w == 0:
            self._adj[u].pop(v, None)
            self._adj[v].pop(u, None)
            return
        self._adj[u][v] = w
        self._adj[v][u] = w.conjugate()

    @classmethod
    def from_matrix(cls, h) -> "Network":
        h = np.asarray(h)
        n = h.shape[0]
        net = cls(n)
        rows, cols = np.nonzero(h)
        for u, v in zip(rows.tolist(), cols.tolist()):
            if u < v:
                net._set(u, v, complex(h[u, v]))
            elif u == v:
                net._adj[u][u] = float(np.real(h[u, u]))
        return net

    def to_matrix(self) -> np.ndarray:
        h = np.zeros((self.n, self.n), dtype=complex)
        for u, nb in enumerate(self._adj):
            for v, w in nb.items():
                h[u, v] = w
        return h

    def weight(self, u, v) -> complex:
        return self._adj[u].get(v, 0.0)

    def loop(self, v) -> float:
        return float(np.real(self._adj[v].get(v, 0.0)))

    def neighbors(self, v) -> dict:
        return {u: w for u, w in self._adj[v].items() if u != v}

    def edges(self):
        for u, nb in enumerate(self._adj):
            for v, w in nb.items():
                if u < v:
                    yield u, v, w

    def loops(self):
        for v, nb in enumerate(self._adj):
            if v in nb:
                yield v, nb[v]

    def degrees(self) -> np.ndarray:
        return np.array([sum(abs(w) ** 2 for w in nb.values()) for nb in self._adj])

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            order, queue = [], deque([s])
            while queue:
                u = queue.popleft()
                order.append(u)
                for v in self._adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        queue.append(v)
            comps.append(order)
        return comps

    def __eq__(self, other):
        if not isinstance(other, Network) or other.n != self.n:
            return NotImplemented
        return self._adj == other._adj

    def allclose(self, other, tol: float = WEIGHT_TOL) -> bool:
        if other.n != self.n:
            return False
        for u in range(self.n):
            keys = set(self._adj[u]) | set(other._adj[u])
            for v in keys:
                if abs(self._adj[u].get(v, 0.0) - other._adj[u].get(v, 0.0)) > tol:
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "edges": [[u, v, w.real, w.imag] for u, v, w in self.edges()],
            "loops": [[v, x] for v, x in self.loops()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Network":
        edges = {(int(u), int(v)): complex(re, im) for u, v, re, im in obj.get("edges", [])}
        loops = {int(v): float(x) for v, x in obj.get("loops", [])}
        return cls(obj["n"], edges, loops)


class RootedNetwork:
    """Connected network with root 0, stored as a dense Hermitian matrix."""

    __slots__ = ("W", "_key")

    def __init__(self, w):
        w = np.array(w, dtype=complex)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
            raise ValueError("weight matrix must be square and nonempty")
        if np.max(np.abs(w - w.conj().T)) > WEIGHT_TOL:
            raise ValueError("weights are not Hermitian")
        self.W = w
        self._key = None
        if w.shape[0] > 1 and len(_bfs_order(w)) != w.shape[0]:
            raise ValueError("rooted network must be connected")

    @classmethod
    def at(cls, net: Network, root: int) -> "RootedNetwork":
        order = [root]
        seen = {root}
        i = 0
        while i < len(order):
            for v in net._adj[order[i]]:
                if v not in seen:
                    seen.add(v)
                    order.append(v)
            i += 1
        pos = {v: k for k, v in enumerate(order)}
        w = np.zeros((len(order), len(order)), dtype=complex)
        for u in order:
            for v, x in net._adj[u].items():
                w[pos[u], pos[v]] = x
        return cls(w)

    @classmethod
    def empty(cls) -> "RootedNetwork":
        return cls([[0.0]])

    @classmethod
    def loop(cls, x: float) -> "RootedNetwork":
        return cls([[x]])

    @classmethod
    def edge(cls, z: complex) -> "RootedNetwork":
        if z == 0:
            return cls.empty()
        return cls([[0.0, z], [np.conj(z), 0.0]])

    @property
    def size(self) -> int:
        return self.W.shape[0]

    def to_network(self) -> Network:
        return Network.from_matrix(self.W)

    def __repr__(self):
        return f"RootedNetwork(size={self.size})"


def _bfs_order(w) -> list[int]:
    k = w.shape[0]
    seen = np.zeros(k, dtype=bool)
    seen[0] = True
    order = [0]
    i = 0
    while i < len(order):
        nb = np.flatnonzero(w[order[i]] != 0)
        for v in nb:
            if not seen[v]:
                seen[v] = True
                order.append(int(v))
        i += 1
    return order


# --------------------------------------------------------------- basic calculus

def degree(g, v: int = 0) -> float:
    if isinstance(g, RootedNetwork):
        return float(np.sum(np.abs(g.W[v]) ** 2))
    return float(sum(abs(w) ** 2 for w in g._adj[v].values()))


def _dijkstra(neighbors, source, n) -> np.ndarray:
    """Squared path lengths with edge cost |w|^-2."""
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in neighbors(u):
            if v == u:
                continue
            nd = d + 1.0 / abs(w) ** 2
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def path_distance(g: Network, u: int, v: int) -> float:
    sq = _dijkstra(lambda x: g._adj[x].items(), u, g.n)
    return math.sqrt(sq[v])


def root_distances(g: RootedNetwork) -> np.ndarray:
    w = g.W

    def nbrs(u):
        idx = np.flatnonzero(w[u])
        return zip(idx.tolist(), w[u, idx])

    return np.sqrt(_dijkstra(nbrs, 0, g.size))


def ball(g: RootedNetwork, t: float) -> RootedNetwork:
    if t < 0:
        raise ValueError("t must be nonnegative")
    keep = np.flatnonzero(root_distances(g) <= t)
    return RootedNetwork(g.W[np.ix_(keep, keep)])


def chi(x, theta: float):
    """0 on [0, theta), (x - theta) / theta on [theta, 2 theta), 1 beyond."""
    x = np.asarray(x, dtype=float)
    return np.where(x < theta, 0.0, np.where(x < 2 * theta, (x - theta) / theta, 1.0))


def chi_tilde(x, theta: float):
    """1 on [0, theta^-2 - 1), theta^-2 - x on [theta^-2 - 1, theta^-2), 0 beyond."""
    x = np.asarray(x, dtype=float)
    top = theta ** -2
    return np.where(x < top - 1, 1.0, np.where(x < top, top - x, 0.0))


def truncate(g: Network, theta: float) -> Network:
    """Two-stage truncation: degree cutoff first, then weight cutoff."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    deg = g.degrees()
    out = Network(g.n)
    for u, nb in enumerate(g._adj):
        for v, w in nb.items():
            if v < u:
                continue
            wt = w * float(chi_tilde(max(deg[u], deg[v]), theta))
            wt = wt * float(chi(abs(wt), theta))
            if wt == 0:
                continue
            if u == v:
                out._adj[u][u] = float(np.real(wt))
            else:
                out._set(u, v, complex(wt))
    return out


def truncate_rooted(g: RootedNetwork, theta: float) -> RootedNetwork:
    return RootedNetwork.at(truncate(g.to_network(), theta), 0)


# ------------------------------------------------------------ local distance

def _greedy_bottleneck(w1, w2) -> float:
    k = w1.shape[0]
    assign = [0]
    used = {0}
    worst = abs(w1[0, 0] - w2[0, 0])
    for i in range(1, k):
        best_v, best_err = None, math.inf
        cols = np.array(assign)
        for v in range(k):
            if v in used:
                continue
            err = max(abs(w1[i, i] - w2[v, v]), float(np.max(np.abs(w1[i, :i] - w2[v, cols]))))
            if err < best_err:
                best_v, best_err = v, err
        assign.append(best_v)
        used.add(best_v)
        worst = max(worst, best_err)
    return float(worst)


def _relaxed_bottleneck(w1, w2) -> float:
    """Lower bound on the optimal bottleneck: root loop, loop and root-row magnitude profiles."""
    lb = abs(w1[0, 0] - w2[0, 0])
    if w1.shape[0] > 1:
        l1 = np.sort(np.real(np.diag(w1))[1:])
        l2 = np.sort(np.real(np.diag(w2))[1:])
        lb = max(lb, float(np.max(np.abs(l1 - l2))))
        r1 = np.sort(np.abs(w1[0, 1:]))
        r2 = np.sort(np.abs(w2[0, 1:]))
        lb = max(lb, float(np.max(np.abs(r1 - r2))))
    return float(lb)


def _exact_bottleneck(w1, w2, best: float, floor: float = 0.0, allowed=None) -> float:
    """min over root-preserving bijections of max |w1 - w2 o sigma|, below ``best``.

    Returns ``best`` unchanged if nothing strictly better exists. ``allowed``
    optionally restricts candidate images per vertex.
    """
    k = w1.shape[0]
    cur0 = abs(w1[0, 0] - w2[0, 0])
    if cur0 >= best:
        return best
    if k == 1:
        return cur0
    assign = np.zeros(k, dtype=int)
    used = np.zeros(k, dtype=bool)
    used[0] = True
    diag2 = np.real(np.diag(w2))
    state = {"best": best}

    def rec(i, cur):
        if i == k:
            state["best"] = cur
            return
        cands = np.flatnonzero(~used) if allowed is None else [v for v in allowed[i] if not used[v]]
        loop_err = np.abs(w1[i, i] - diag2[cands])
        for j in np.argsort(loop_err, kind="stable"):
            v = cands[j]
            err = loop_err[j]
            if err >= state["best"]:
                break
            if i > 1:
                err = max(err, float(np.max(np.abs(w1[i, 1:i] - w2[v, assign[1:i]]))))
            err = max(err, abs(w1[i, 0] - w2[v, 0]))
            new = max(cur, err)
            if new < state["best"]:
                assign[i] = v
                used[v] = True
                rec(i + 1, new)
                used[v] = False
                if state["best"] <= floor:
                    return

    rec(1, cur0)
    return state["best"]


def _bottleneck_bounds(w1, w2, size_cap):
    greedy = _greedy_bottleneck(w1, w2)
    lower = _relaxed_bottleneck(w1, w2)
    if greedy <= lower:
        return greedy, greedy
    if w1.shape[0] > size_cap:
        return lower, greedy
    val = _exact_bottleneck(w1, w2, greedy, floor=lower)
    return val, val


def _interval_sup(start, end, delta):
    """sup of {t in [start, end) : t > 0, t <= 1/delta}, or None if empty."""
    if delta == 0:
        return end
    reach = 1.0 / delta
    if reach < start or (start == 0 and reach <= 0):
        return None
    return min(end, reach)


def local_distance(g1: RootedNetwork, g2: RootedNetwork, size_cap: int = 12):
    """d_loc = 1 / (1 + T) with T the largest matching radius.

    Returns a float when exact, otherwise an :class:`Interval` certified to
    contain the true value.
    """
    bounds = local_distance_bounds(g1, g2, size_cap)
    return bounds.lower if bounds.exact else bounds


def local_distance_bounds(g1: RootedNetwork, g2: RootedNetwork, size_cap: int = 12) -> Interval:
    d1, d2 = root_distances(g1), root_distances(g2)
    o1, o2 = np.argsort(d1, kind="stable"), np.argsort(d2, kind="stable")
    d1s, d2s = d1[o1], d2[o2]
    w1 = g1.W[np.ix_(o1, o1)]
    w2 = g2.W[np.ix_(o2, o2)]
    bps = np.unique(np.concatenate([d1s[1:], d2s[1:]]))
    starts = np.concatenate([[0.0], bps])
    ends = np.concatenate([bps, [np.inf]])
    t_low = t_high = None
    for k in range(starts.size - 1, -1, -1):
        s, e = starts[k], ends[k]
        n1 = int(np.searchsorted(d1s, s, side="right"))
        n2 = int(np.searchsorted(d2s, s, side="right"))
        if n1 != n2:
            continue
        lo, hi = _bottleneck_bounds(w1[:n1, :n1], w2[:n2, :n2], size_cap)
        if t_high is None:
            t_high = _interval_sup(s, e, lo)
        if t_low is None:
            t_low = _interval_sup(s, e, hi)
        if t_low is not None and t_high is not None:
            break
    def to_d(t):
        return 0.0 if t == np.inf else 1.0 / (1.0 + t)
    return Interval(to_d(t_high), to_d(t_low))


def projective_distance(g1: RootedNetwork, g2: RootedNetwork, j_max: int = 20,
                        size_cap: int = 12) -> Interval:
    """sum_j 2^-j d_loc(g1_theta_j, g2_theta_j), theta_j = 2^-j, as a certified interval.

    The partial sum runs over j <= j_max; the tail adds at most 2^-j_max.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    lo = hi = 0.0
    for j in range(1, j_max + 1):
        theta = 2.0 ** -j
        b = local_distance_bounds(truncate_rooted(g1, theta), truncate_rooted(g2, theta), size_cap)
        lo += 2.0 ** -j * b.lower
        hi += 2.0 ** -j * b.upper
    return Interval(lo, hi + 2.0 ** -j_max)


# ---------------------------------------------------- canonical classes, laws

def _bucket(z: complex) -> tuple:
    return (round(z.real / KEY_RES), round(z.imag / KEY_RES))


def refine_colors(g: RootedNetwork) -> list[int]:
    """Stable color refinement seeded by (root flag, loop, degree)."""
    w = g.W
    k = g.size
    deg = np.sum(np.abs(w) ** 2, axis=1)
    nbrs = [[v for v in np.flatnonzero(w[u]).tolist() if v != u] for u in range(k)]
    colors = [hash((u == 0, _bucket(complex(w[u, u])), round(deg[u] / KEY_RES))) for u in range(k)]
    classes = len(set(colors))
    for _ in range(k):
        new = [hash((colors[u], tuple(sorted((colors[v], _bucket(complex(w[u, v]))) for v in nbrs[u]))))
               for u in range(k)]
        n_new = len(set(new))
        colors = new
        if n_new == classes:
            break
        classes = n_new
    return colors


def canonical_key(g: RootedNetwork) -> tuple:
    if g._key is None:
        colors = refine_colors(g)
        g._key = (g.size, colors[0], tuple(sorted(colors)))
    return g._key


def isomorphic(g1: RootedNetwork, g2: RootedNetwork, tol: float = WEIGHT_TOL) -> bool:
    """Exact root-preserving isomorphism up to ``tol`` on every weight."""
    if g1.size != g2.size:
        return False
    if canonical_key(g1) != canonical_key(g2):
        return False
    c1, c2 = refine_colors(g1), refine_colors(g2)
    o1 = _bfs_order(g1.W)
    w1 = g1.W[np.ix_(o1, o1)]
    c1 = [c1[i] for i in o1]
    allowed = [[v for v in range(g2.size) if c2[v] == c1[i]] for i in range(g1.size)]
    val = _exact_bottleneck(w1, g2.W, best=2 * tol + 1e-300, floor=tol, allowed=allowed)
    return val <= tol


class RootLaw:
    """Finitely supported law on rooted-network classes."""

    def __init__(self, items=()):
        self.classes: list[list] = []
        self._index: dict = {}
        for g, w in items:
            self.add(g, w)

    def add(self, g: RootedNetwork, weight: float) -> None:
        if weight < 0:
            raise ValueError("negative weight")
        if weight == 0:
            return
        key = canonical_key(g)
        for idx in self._index.get(key, []):
            if isomorphic(self.classes[idx][0], g):
                self.classes[idx][1] += weight
                return
        self._index.setdefault(key, []).append(len(self.classes))
        self.classes.append([g, float(weight)])

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        for g, w in self.classes:
            yield g, w

    def total(self) -> float:
        return float(sum(w for _, w in self.classes))

    def weight_of(self, g: RootedNetwork) -> float:
        for idx in self._index.get(canonical_key(g), []):
            if isomorphic(self.classes[idx][0], g):
                return self.classes[idx][1]
        return 0.0

    def expect(self, fn) -> float:
        return float(sum(w * fn(g) for g, w in self.classes))

    def to_json(self) -> dict:
        return {"classes": [{"network": g.to_network().to_json(), "root": 0, "weight": w}
                            for g, w in self.classes]}

    @classmethod
    def from_json(cls, obj: dict) -> "RootLaw":
        law = cls()
        for c in obj["classes"]:
            law.add(RootedNetwork.at(Network.from_json(c["network"]), int(c["root"])), float(c["weight"]))
        if abs(law.total() - 1.0) > 1e-9:
            raise ValueError("class weights must sum to 1")
        return law


def empirical_root_law(g: Network) -> RootLaw:
    """U(G): the root chosen uniformly among the vertices."""
    law = RootLaw()
    share = 1.0 / g.n
    for comp in g.components():
        for v in comp:
            law.add(RootedNetwork.at(g, v), share)
    return law


def truncate_law(rho: RootLaw, theta: float) -> RootLaw:
    return RootLaw((truncate_rooted(g, theta), w) for g, w in rho)


def psi(g: RootedNetwork, alpha: float) -> float:
    return abs(g.W[0, 0]) ** alpha if g.W[0, 0] != 0 else 0.0


def phi(g: RootedNetwork, alpha: float) -> float:
    row = np.abs(g.W[0, 1:])
    return 0.5 * float(np.sum(row[row > 0] ** alpha))


def xi(g: RootedNetwork, beta: float) -> float:
    row = np.abs(g.W[0])
    return float(np.sum(row[row > 0] ** beta))


def _in_support(d: complex, supp, tol: float = 1e-9) -> bool:
    return any(abs(d - s) <= tol for s in supp)


def admissible(g: RootedNetwork, supp_a=None, supp_b=None) -> bool:
    """Necessary direction constraints: loop signs in supp_b, edge directions in supp_a."""
    w = g.W
    if supp_b is not None:
        for x in np.real(np.diag(w)):
            if x != 0 and not _in_support(complex(np.sign(x)), supp_b):
                return False
    if supp_a is not None:
        rows, cols = np.nonzero(np.triu(w, 1))
        for u, v in zip(rows, cols):
            d = w[u, v] / abs(w[u, v])
            if not (_in_support(d, supp_a) or _in_support(d.conjugate(), supp_a)):
                return False
    return True


def _times(c: float, e: float) -> float:
    return 0.0 if e == 0 else c * e


def rate_I(rho: RootLaw, a: float, b: float, alpha: float, supp_a=None, supp_b=None) -> float:
    """b E psi + a E phi, with inf * 0 = 0 and inf outside the direction supports."""
    if any(not admissible(g, supp_a, supp_b) for g, _ in rho):
        return math.inf
    e_psi = rho.expect(lambda g: psi(g, alpha))
    e_phi = rho.expect(lambda g: phi(g, alpha))
    return _times(b, e_psi) + _times(a, e_phi)


# ------------------------------------------------------------------- spectra

def root_spectral_measure(g: RootedNetwork) -> RealMeasure:
    vals, vecs = np.linalg.eigh(g.W)
    w = np.abs(vecs[0]) ** 2
    return RealMeasure.atoms(vals, w / w.sum())


def law_spectral_measure(rho: RootLaw) -> RealMeasure:
    total = rho.total()
    return mixture([root_spectral_measure(g) for g, _ in rho], [w / total for _, w in rho])


def law_spectral_sequence(rho: RootLaw, thetas) -> list[RealMeasure]:
    return [law_spectral_measure(truncate_law(rho, th)) for th in thetas]


def cauchy_bound(rho: RootLaw, theta: float, beta: float) -> float:
    """4 theta^beta E xi_beta + 2 theta^(1 - beta/2) (E xi_beta)^(1/2)."""
    m = rho.expect(lambda g: xi(g, beta))
    return 4 * theta**beta * m + 2 * theta ** (1 - beta / 2) * math.sqrt(m)


def extract_network(c) -> Network:
    return Network.from_matrix(c)


# --------------------------------------------------------- sofic constructors

def single_vertex_law(nu: RealMeasure) -> RootLaw:
    if not nu.is_atomic:
        raise ValueError("single_vertex_law needs an atomic measure")
    return RootLaw((RootedNetwork.loop(x), w) for x, w in zip(nu.x, nu.w))


def paired_edge_law(mu_plus: RealMeasure, phase: float = 0.0, supp_a=None) -> RootLaw:
    """1/2 (delta of edge z + delta of edge conj z), z = t e^{i phase}, t ~ mu_plus."""
    if not mu_plus.is_atomic:
        raise ValueError("paired_edge_law needs an atomic magnitude law")
    if np.any(mu_plus.x < 0):
        raise ValueError("magnitudes must be nonnegative")
    direction = complex(math.cos(phase), math.sin(phase))
    if supp_a is not None and not _in_support(direction, supp_a):
        raise InadmissibleError(f"direction {direction} outside the declared support")
    law = RootLaw()
    for t, w in zip(mu_plus.x, mu_plus.w):
        z = t * direction
        law.add(RootedNetwork.edge(z), w / 2)
        law.add(RootedNetwork.edge(np.conj(z)), w / 2)
    return law


def finite_matrix_law(h) -> RootLaw:
    return empirical_root_law(Network.from_matrix(h))


def compnorm_gamma(delta: float, theta: float) -> float:
    """theta^(3 + 16 / (delta^2 theta^2)) / 16; warns when it underflows to 0."""
    if not 0 < theta < 1 or delta <= 0:
        raise ValueError("need 0 < theta < 1 and delta > 0")
    log_g = (3 + 16 / (delta**2 * theta**2)) * math.log(theta) - math.log(16)
    val = math.exp(log_g) if log_g > -745 else 0.0
    if val == 0.0:
        warnings.warn(f"compnorm gamma underflows (log value {log_g:.1f})", RuntimeWarning)
    return val
