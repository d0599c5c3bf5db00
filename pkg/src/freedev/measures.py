"""Probability measures on the real line, Stieltjes transforms and metrics.

Measures are either atomic or a piecewise-linear density on a uniform grid.
All transforms of grid measures are computed in closed form for the
piecewise-linear interpolant, so they are exact for the stored object.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar, nnls

CHUNK = 2_000_000
MASS_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Uniform evaluation grid x0 + k*dx, k = 0..n-1."""

    x0: float
    dx: float
    n: int

    @classmethod
    def span(cls, lo: float, hi: float, n: int) -> "Grid":
        if n < 2 or not hi > lo:
            raise ValueError("grid needs n >= 2 and hi > lo")
        return cls(float(lo), (hi - lo) / (n - 1), int(n))

    @classmethod
    def spacing(cls, lo: float, hi: float, dx: float) -> "Grid":
        n = int(math.ceil((hi - lo) / dx - 1e-9)) + 1
        return cls(float(lo), float(dx), max(n, 2))

    @property
    def points(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)


class RealMeasure:
    """Probability measure on R, atomic or gridded.

    Use :meth:`atoms` or :meth:`grid` to construct.
    """

    __slots__ = ("kind", "x", "w", "x0", "dx")

    def __init__(self, kind, x, w, x0=None, dx=None):
        self.kind = kind
        self.x = x
        self.w = w
        self.x0 = x0
        self.dx = dx

    @classmethod
    def atoms(cls, x, w=None) -> "RealMeasure":
        x = np.asarray(x, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("atomic measure needs at least one atom")
        if w is None:
            w = np.full(x.size, 1.0 / x.size)
        w = np.asarray(w, dtype=float).ravel()
        if w.shape != x.shape:
            raise ValueError("locations and weights differ in length")
        if not np.all(np.isfinite(x)):
            raise ValueError("atom locations must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"weights sum to {total}, not 1")
        loc, inv = np.unique(x, return_inverse=True)
        merged = np.bincount(inv, weights=w, minlength=loc.size)
        keep = merged > 0
        loc, merged = loc[keep], merged[keep]
        return cls("atoms", loc, merged / merged.sum())

    @classmethod
    def grid(cls, x0: float, dx: float, pdf) -> "RealMeasure":
        pdf = np.asarray(pdf, dtype=float).ravel()
        if pdf.size < 2 or dx <= 0:
            raise ValueError("grid measure needs >= 2 nodes and dx > 0")
        if np.any(pdf < 0) or not np.all(np.isfinite(pdf)):
            raise ValueError("density must be finite and nonnegative")
        total = dx * (pdf.sum() - 0.5 * (pdf[0] + pdf[-1]))
        if total <= 0:
            raise ValueError("density has zero mass")
        x = float(x0) + float(dx) * np.arange(pdf.size)
        return cls("grid", x, pdf / total, float(x0), float(dx))

    @classmethod
    def dirac(cls, c: float = 0.0) -> "RealMeasure":
        return cls.atoms([c], [1.0])

    @property
    def is_atomic(self) -> bool:
        return self.kind == "atoms"

    @property
    def pdf(self) -> np.ndarray:
        if self.is_atomic:
            raise AttributeError("atomic measure has no density")
        return self.w

    def __repr__(self):
        if self.is_atomic:
            return f"RealMeasure.atoms(<{self.x.size} atoms>)"
        return f"RealMeasure.grid(x0={self.x0}, dx={self.dx}, n={self.x.size})"

    def support(self) -> tuple[float, float]:
        if self.is_atomic:
            return float(self.x[0]), float(self.x[-1])
        nz = np.flatnonzero(self.w > 0)
        lo = max(nz[0] - 1, 0)
        hi = min(nz[-1] + 1, self.x.size - 1)
        return float(self.x[lo]), float(self.x[hi])

    def radius(self) -> float:
        lo, hi = self.support()
        return max(abs(lo), abs(hi))

    # piecewise-linear helpers: on segment k the density is c0 + c1 * x
    def _segments(self):
        f0, f1 = self.w[:-1], self.w[1:]
        c1 = (f1 - f0) / self.dx
        c0 = f0 - c1 * self.x[:-1]
        return self.x[:-1], self.x[1:], c0, c1

    def abs_moment(self, p: float) -> float:
        if p < 0:
            raise ValueError("moment order must be nonnegative")
        if self.is_atomic:
            return float(np.dot(self.w, np.abs(self.x) ** p))
        a, b, c0, c1 = self._segments()

        def g1(x):
            return np.sign(x) * np.abs(x) ** (p + 1) / (p + 1)

        def g2(x):
            return np.abs(x) ** (p + 2) / (p + 2)

        val = np.sum(c0 * (g1(b) - g1(a)) + c1 * (g2(b) - g2(a)))
        return float(val)

    def mean(self) -> float:
        if self.is_atomic:
            return float(np.dot(self.w, self.x))
        a, b, c0, c1 = self._segments()
        return float(np.sum(c0 * (b**2 - a**2) / 2 + c1 * (b**3 - a**3) / 3))

    def moment(self, k: int) -> float:
        if self.is_atomic:
            return float(np.dot(self.w, self.x**k))
        a, b, c0, c1 = self._segments()
        return float(np.sum(c0 * (b ** (k + 1) - a ** (k + 1)) / (k + 1)
                            + c1 * (b ** (k + 2) - a ** (k + 2)) / (k + 2)))

    def _node_cdf(self):
        seg = 0.5 * self.dx * (self.w[:-1] + self.w[1:])
        return np.concatenate([[0.0], np.cumsum(seg)])

    def cdf(self, t, left: bool = False) -> np.ndarray:
        """F(t) = mu((-inf, t]); with ``left`` the limit mu((-inf, t))."""
        t = np.asarray(t, dtype=float)
        if self.is_atomic:
            cw = np.concatenate([[0.0], np.cumsum(self.w)])
            side = "left" if left else "right"
            return np.minimum(cw[np.searchsorted(self.x, t, side=side)], 1.0)
        c = self._node_cdf()
        k = np.clip(np.floor((t - self.x0) / self.dx).astype(int), 0, self.x.size - 2)
        s = np.clip(t - self.x[k], 0.0, self.dx)
        f0, f1 = self.w[k], self.w[k + 1]
        val = c[k] + f0 * s + (f1 - f0) * s**2 / (2 * self.dx)
        val = np.where(t < self.x[0], 0.0, val)
        return np.clip(np.where(t >= self.x[-1], 1.0, val), 0.0, 1.0)

    def quantile(self, u) -> np.ndarray:
        """Left-continuous quantile Q(u) = inf{x : F(x) >= u}."""
        u = np.asarray(u, dtype=float)
        if self.is_atomic:
            cw = np.cumsum(self.w)
            cw[-1] = 1.0
            return self.x[np.minimum(np.searchsorted(cw, u, side="left"), self.x.size - 1)]
        c = self._node_cdf()
        c[-1] = 1.0
        k = np.clip(np.searchsorted(c, u, side="left") - 1, 0, self.x.size - 2)
        r = np.maximum(u - c[k], 0.0)
        f0, f1 = self.w[k], self.w[k + 1]
        qa = (f1 - f0) / (2 * self.dx)
        disc = np.sqrt(np.maximum(f0**2 + 4 * qa * r, 0.0))
        den = f0 + disc
        s = np.where(den > 0, 2 * r / np.where(den > 0, den, 1.0), 0.0)
        return self.x[k] + np.clip(s, 0.0, self.dx)

    def to_json(self) -> dict:
        if self.is_atomic:
            return {"atoms": [[float(a), float(b)] for a, b in zip(self.x, self.w)]}
        return {"grid": {"x0": self.x0, "dx": self.dx, "pdf": [float(v) for v in self.w]}}

    @classmethod
    def from_json(cls, obj: dict) -> "RealMeasure":
        if "atoms" in obj:
            arr = np.asarray(obj["atoms"], dtype=float).reshape(-1, 2)
            return cls.atoms(arr[:, 0], arr[:, 1])
        g = obj["grid"]
        return cls.grid(g["x0"], g["dx"], g["pdf"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "weight" if self.is_atomic else "pdf"])
        for a, b in zip(self.x, self.w):
            writer.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()


def mixture(measures, weights=None) -> RealMeasure:
    """Convex combination of atomic measures."""
    measures = list(measures)
    if weights is None:
        weights = np.full(len(measures), 1.0 / len(measures))
    if any(not m.is_atomic for m in measures):
        raise ValueError("mixture supports atomic measures only")
    x = np.concatenate([m.x for m in measures])
    w = np.concatenate([m.w * q for m, q in zip(measures, weights)])
    return RealMeasure.atoms(x, w / w.sum())


def reflect(mu: RealMeasure) -> RealMeasure:
    if mu.is_atomic:
        return RealMeasure.atoms(-mu.x, mu.w)
    return RealMeasure.grid(-mu.x[-1], mu.dx, mu.w[::-1])


# ---------------------------------------------------------------- transforms

def _chunks(nz: int, width: int):
    step = max(1, CHUNK // max(width, 1))
    for s in range(0, nz, step):
        yield slice(s, min(s + step, nz))


def stieltjes(mu: RealMeasure, z, derivative: bool = False):
    """g(z) = int dmu(x) / (x - z) for Im z > 0 (vectorized over z).

    With ``derivative`` also returns g'(z).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zf = z.reshape(-1)
    if np.any(zf.imag <= 0):
        raise ValueError("Stieltjes transform needs Im z > 0")
    g = np.empty(zf.shape, dtype=complex)
    dg = np.empty(zf.shape, dtype=complex) if derivative else None
    if mu.is_atomic:
        for sl in _chunks(zf.size, mu.x.size):
            r = 1.0 / (mu.x[None, :] - zf[sl, None])
            g[sl] = r @ mu.w
            if derivative:
                dg[sl] = (r * r) @ mu.w
    else:
        a, b, c0, c1 = mu._segments()
        for sl in _chunks(zf.size, mu.x.size):
            zz = zf[sl, None]
            logs = np.log(mu.x[None, :] - zz)
            lk = logs[:, 1:] - logs[:, :-1]
            amp = c0[None, :] + c1[None, :] * zz
            g[sl] = np.sum(amp * lk, axis=1) + mu.dx * c1.sum()
            if derivative:
                inv = 1.0 / (mu.x[None, :] - zz)
                dg[sl] = np.sum(amp * (inv[:, :-1] - inv[:, 1:]) + c1[None, :] * lk, axis=1)
    if scalar:
        return (g[0], dg[0]) if derivative else g[0]
    g = g.reshape(z.shape)
    return (g, dg.reshape(z.shape)) if derivative else g


def semicircle_stieltjes(z):
    """Closed form (-z + sqrt(z^2 - 4)) / 2 on the branch with Im g > 0."""
    z = np.asarray(z, dtype=complex)
    root = np.sqrt(z - 2) * np.sqrt(z + 2)
    return (-z + root) / 2


def semicircle(grid: Grid | None = None) -> RealMeasure:
    if grid is None:
        grid = Grid.span(-2.0, 2.0, 4001)
    x = grid.points
    pdf = np.sqrt(np.clip(4.0 - x**2, 0.0, None)) / (2 * np.pi)
    return RealMeasure.grid(grid.x0, grid.dx, pdf)


# ------------------------------------------------------------------- metrics

def sup_distance(g1, g2, radius: float, abs_mean: float, height: float = 2.0,
                 tail_tol: float = 1e-10) -> float:
    """sup over x of |g1(x + i h) - g2(x + i h)| for two transforms.

    ``radius`` bounds both supports and ``abs_mean`` bounds the sum of the
    first absolute moments; together they give the tail bound
    abs_mean / (|x| (|x| - radius)) used to cut the search window.
    """
    inner = radius + 4 * height
    xs_in = np.arange(-inner, inner + 1e-12, 0.025 * height)
    big_r = radius / 2 + math.sqrt(radius**2 / 4 + max(abs_mean, 1e-300) / tail_tol)
    if big_r > inner:
        k = int(math.ceil(math.log(big_r / inner) / math.log(1.04)))
        outer = inner * 1.04 ** np.arange(1, k + 1)
        xs = np.concatenate([-outer[::-1], xs_in, outer])
    else:
        xs = xs_in

    def f(x):
        z = np.asarray(x, dtype=float) + 1j * height
        return np.abs(g1(z) - g2(z))

    vals = f(xs)
    if not np.any(vals > 0):
        return 0.0
    inner_idx = np.arange(1, xs.size - 1)
    peaks = inner_idx[(vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])]
    peaks = peaks[np.argsort(vals[peaks])[::-1][:6]]
    best = float(vals.max())
    for i in peaks:
        res = minimize_scalar(lambda t: -float(f(t)), bounds=(xs[i - 1], xs[i + 1]),
                              method="bounded", options={"xatol": 1e-10})
        best = max(best, -float(res.fun))
    return best


def distance_d(mu: RealMeasure, nu: RealMeasure) -> float:
    """sup over Im z >= 2 of |g_mu(z) - g_nu(z)|, taken on the line Im z = 2."""
    radius = max(mu.radius(), nu.radius())
    m1 = mu.abs_moment(1.0) + nu.abs_moment(1.0)
    return sup_distance(lambda z: stieltjes(mu, z), lambda z: stieltjes(nu, z), radius, m1)


def _breakpoints(mu: RealMeasure) -> np.ndarray:
    if mu.is_atomic:
        return mu.x
    return np.concatenate([mu.x, mu.x[:-1] + 0.5 * mu.dx])


def ks_distance(mu: RealMeasure, nu: RealMeasure) -> float:
    t = np.unique(np.concatenate([_breakpoints(mu), _breakpoints(nu)]))
    right = np.abs(mu.cdf(t) - nu.cdf(t))
    left = np.abs(mu.cdf(t, left=True) - nu.cdf(t, left=True))
    return float(max(right.max(), left.max()))


def wasserstein(mu: RealMeasure, nu: RealMeasure, p: float = 1.0) -> float:
    """W_p through the monotone coupling; exact when both inputs are atomic."""
    if p < 1:
        raise ValueError("order p must be >= 1")
    for m in (mu, nu):
        if not math.isfinite(m.abs_moment(p)):
            raise ValueError("measure has infinite p-th moment")
    if mu.is_atomic and nu.is_atomic:
        u = np.unique(np.concatenate([np.cumsum(mu.w), np.cumsum(nu.w), [0.0]]))
        u = u[u <= 1.0]
        if u[-1] < 1.0:
            u = np.append(u, 1.0)
    else:
        extra = [np.cumsum(m.w) for m in (mu, nu) if m.is_atomic]
        u = np.unique(np.concatenate([np.linspace(0.0, 1.0, 40001)] + extra))
        u = np.clip(u, 0.0, 1.0)
    du = np.diff(u)
    mid = 0.5 * (u[1:] + u[:-1])
    keep = du > 0
    diff = np.abs(mu.quantile(mid[keep]) - nu.quantile(mid[keep]))
    return float(np.dot(du[keep], diff**p) ** (1.0 / p))


def moment_alpha(nu: RealMeasure, alpha: float) -> float:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    val = nu.abs_moment(alpha)
    return val if math.isfinite(val) else math.inf


# ------------------------------------------------------ subordination solver

class SubordinationError(RuntimeError):
    def __init__(self, z, message="subordination iteration did not converge"):
        super().__init__(f"{message} at z={z}")
        self.z = z


def _residual(nu, z, g):
    return np.abs(g - stieltjes(nu, z + g))


def _solve_level(nu, z, g, tol, max_iter, newton_after):
    """Fixed-point solve of g = g_nu(z + g) on a batch of points.

    Plain iteration with damping (halved whenever the residual rises twice in
    a row); points still active after ``newton_after`` sweeps get Newton steps.
    """
    g = g.copy()
    iters = np.zeros(z.shape, dtype=int)
    beta = np.ones(z.shape)
    prev = np.full(z.shape, np.inf)
    rises = np.zeros(z.shape, dtype=int)
    active = np.arange(z.size)
    for it in range(max_iter):
        if active.size == 0:
            break
        za, ga = z[active], g[active]
        use_newton = it >= newton_after
        phi, dphi = stieltjes(nu, za + ga, derivative=True)
        res = np.abs(phi - ga)
        done = res <= tol
        iters[active] = it
        up = res > prev[active]
        rises[active] = np.where(up, rises[active] + 1, 0)
        damp = rises[active] >= 2
        beta[active] = np.where(damp, np.maximum(beta[active] * 0.5, 1.0 / 64), beta[active])
        rises[active] = np.where(damp, 0, rises[active])
        prev[active] = res
        step = beta[active] * (phi - ga)
        if use_newton:
            newton = (phi - ga) / (1.0 - dphi)
            cand = ga + newton
            ok = (cand.imag > 0) & np.isfinite(cand)
            ok_idx = np.flatnonzero(ok & ~done)
            if ok_idx.size:
                new_res = _residual(nu, za[ok_idx], cand[ok_idx])
                better = new_res < res[ok_idx]
                step[ok_idx[better]] = newton[ok_idx[better]]
        ga = np.where(done, ga, ga + step)
        g[active] = ga
        active = active[~done]
    if active.size:
        raise SubordinationError(complex(z[active[0]]))
    return g, iters


def subordination(nu: RealMeasure, z, tol: float = 1e-12, max_iter: int = 2000,
                  newton_after: int = 40, return_iterations: bool = False):
    """Stieltjes transform of mu_sc boxplus nu at points z with Im z > 0.

    Points with Im z >= 2 are solved by plain iteration from g = -1/z; lower
    points are reached by continuation in Im z (factor 0.8 per level).
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.reshape(-1)
    if np.any(z.imag <= 0):
        raise ValueError("need Im z > 0")
    height = np.maximum(z.imag, 2.0)
    zz = z.real + 1j * height
    g, iters = _solve_level(nu, zz, -1.0 / zz, tol, max_iter, max_iter)
    total = iters.copy()
    while np.any(height > z.imag):
        height = np.maximum(0.8 * height, z.imag)
        zz = z.real + 1j * height
        g, it = _solve_level(nu, zz, g, tol, max_iter, newton_after)
        total += it
    g = g.reshape(shape)
    if return_iterations:
        return g, iters.reshape(shape), total.reshape(shape)
    return g


def default_grid(nu: RealMeasure, dx: float = 0.005, pad: float = 2.5) -> Grid:
    """Grid centered on the middle of supp nu, so symmetric inputs get symmetric nodes."""
    lo, hi = nu.support()
    mid = (lo + hi) / 2
    half = int(math.ceil(((hi - lo) / 2 + pad) / dx - 1e-9))
    return Grid(mid - half * dx, dx, 2 * half + 1)


@dataclass
class ConvolutionInfo:
    eta: float
    discarded_mass: float
    max_iterations: int


def free_convolve_semicircle(nu: RealMeasure, grid: Grid | None = None, eta: float | None = None,
                             tol: float = 1e-12, return_info: bool = False):
    """Density of mu_sc boxplus nu by Stieltjes inversion at height ``eta``."""
    if grid is None:
        grid = default_grid(nu)
    if eta is None:
        eta = grid.dx / 2
    if eta <= 0:
        raise ValueError("eta must be positive")
    x = grid.points
    g, _, total = subordination(nu, x + 1j * eta, tol=tol, return_iterations=True)
    pdf = np.maximum(g.imag, 0.0) / np.pi
    mass = grid.dx * (pdf.sum() - 0.5 * (pdf[0] + pdf[-1]))
    mu = RealMeasure.grid(grid.x0, grid.dx, pdf)
    if return_info:
        return mu, ConvolutionInfo(eta, float(1.0 - mass), int(total.max()))
    return mu


def convolution_distance(mu: RealMeasure, nu: RealMeasure) -> float:
    """distance_d(mu, mu_sc boxplus nu) with the exact subordination transform."""
    radius = max(mu.radius(), nu.radius() + 2.0)
    m1 = mu.abs_moment(1.0) + nu.abs_moment(1.0) + 1.0
    return sup_distance(lambda z: stieltjes(mu, z), lambda z: subordination(nu, z), radius, m1)


# --------------------------------------------------------------- deconvolution

@dataclass
class Deconvolution:
    """Outcome of a free deconvolution. ``ok`` False is the infinite-rate signal."""

    nu: RealMeasure | None
    ok: bool
    roundtrip: float
    tolerance: float
    misfit: float
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)


def _merge_pairs(x, w):
    """Collapse runs of at most two adjacent nonzero nodes into one atom."""
    nz = np.flatnonzero(w > 0)
    out_x, out_w = [], []
    i = 0
    while i < nz.size:
        j = i
        while j + 1 < nz.size and nz[j + 1] == nz[j] + 1:
            j += 1
        run = nz[i:j + 1]
        if run.size <= 2:
            mass = w[run].sum()
            out_x.append(float(np.dot(x[run], w[run]) / mass))
            out_w.append(mass)
        else:
            out_x.extend(x[run])
            out_w.extend(w[run])
        i = j + 1
    return np.asarray(out_x), np.asarray(out_w)


def _symmetrize(nu: RealMeasure, tol: float = 1e-9) -> RealMeasure:
    """Fold onto |x| (merging magnitudes closer than tol) and split each mass evenly over +-x."""
    mag, w = np.abs(nu.x), nu.w
    order = np.argsort(mag, kind="stable")
    mag, w = mag[order], w[order]
    groups = np.concatenate([[0], np.cumsum(np.diff(mag) > tol)])
    tm = np.bincount(groups, weights=w * mag) / np.bincount(groups, weights=w)
    tw = np.bincount(groups, weights=w)
    tm[tm <= tol] = 0.0
    return RealMeasure.atoms(np.concatenate([-tm, tm]), np.concatenate([tw, tw]) / 2)


def free_deconvolve_semicircle(mu: RealMeasure, eta: float | None = None, dx: float = 0.01,
                               heights=(0.25, 0.5, 1.0, 2.0), tolerance: float | None = None,
                               symmetric: bool = False) -> Deconvolution:
    """Recover nu with mu = mu_sc boxplus nu, or report that none fits.

    On each contour point z, w = z + g(z) satisfies g_nu(w) = g(z), where g
    is the transform of mu_sc boxplus nu. A grid ``mu`` is taken to come from
    Stieltjes inversion at height ``eta`` (default: half its spacing), so
    g(z) is read as g_mu(z - i eta); atomic inputs use eta = 0. nu is fitted
    as nonnegative weights on a node grid spanning the support of mu
    (nonnegative least squares on those identities) and then checked by a
    round trip on the line Im z = 2.
    """
    if eta is None:
        eta = 0.0 if mu.is_atomic else mu.dx / 2
    if eta < 0 or eta >= min(heights):
        raise ValueError("eta must lie in [0, min(heights))")
    if tolerance is None:
        tolerance = max(eta, dx) / 4
    lo, hi = mu.support()
    nodes = Grid.spacing(lo, hi, dx).points if hi > lo else np.array([lo])
    xs = np.arange(lo - 2.0, hi + 2.0 + 1e-12, 2 * dx)
    z = np.concatenate([xs + 1j * h for h in heights])
    gm = stieltjes(mu, z - 1j * eta)
    w = z + gm
    scale = np.concatenate([np.full(xs.size, h) for h in heights])
    kern = scale[:, None] / (nodes[None, :] - w[:, None])
    rhs = scale * gm
    big = 1e3
    a = np.vstack([kern.real, kern.imag, big * np.ones((1, nodes.size))])
    b = np.concatenate([rhs.real, rhs.imag, [big]])
    p, _ = nnls(a, b, maxiter=50 * nodes.size)
    misfit = float(np.linalg.norm(kern @ p - rhs) / np.linalg.norm(rhs))
    if p.sum() <= 0:
        return Deconvolution(None, False, math.inf, tolerance, misfit, "empty fit")
    p = np.where(p > 1e-9 * p.max(), p, 0.0)
    p /= p.sum()
    ax, aw = _merge_pairs(nodes, p)
    nu = RealMeasure.atoms(ax, aw)
    if symmetric:
        nu = _symmetrize(nu, tol=dx / 4)
    radius = max(mu.radius(), nu.radius() + 2.0)
    m1 = mu.abs_moment(1.0) + nu.abs_moment(1.0) + 1.0
    roundtrip = sup_distance(lambda s: stieltjes(mu, s),
                             lambda s: subordination(nu, s + 1j * eta), radius, m1)
    ok = roundtrip <= 5 * tolerance
    reason = "" if ok else f"round trip {roundtrip:.3g} exceeds 5 x tolerance {tolerance:.3g}"
    diag = {"nodes": int(nodes.size), "atoms": int(nu.x.size), "eta": eta, "dx": dx}
    return Deconvolution(nu if ok else None, ok, roundtrip, tolerance, misfit, reason, diag)
