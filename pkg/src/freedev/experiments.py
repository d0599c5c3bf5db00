"""Seeded Monte Carlo experiments, tilted rare-event estimates and report files.

Random streams: replicate ``r`` at size ``n`` uses
``numpy.random.default_rng(SeedSequence([seed, n, r]))``, so results do not
depend on the number of workers or on scheduling order.
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .entries import TailLaw, symmetric_real
from .matrix import band_thresholds, decompose, gaussian_wigner, sample_wigner, spectral_measure
from .measures import (RealMeasure, convolution_distance, distance_d,
                       free_convolve_semicircle, semicircle)
from .rates import RateParams

SCHEMA = "1"
KINDS = ("semicircle", "uaf", "expeq", "freeconv", "decomposition", "ldp")
COLUMNS = ("n", "replicate", "statistic", "value")

DEFAULT_TOLERANCES = {
    "semicircle_final": 0.05,
    "freeconv": 0.05,
    "uaf_slope_low": -0.8,
    "uaf_slope_high": -0.35,
    "ldp_relative": 0.25,
    "ess_floor": 100.0,
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    n_schedule: list
    replicates: int = 1
    offdiag: TailLaw | None = None
    diag: TailLaw | None = None
    rate_params: RateParams | None = None
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in KINDS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {KINDS}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        ns = list(self.n_schedule)
        if not ns or any(not isinstance(n, int) or n < 3 for n in ns):
            raise ConfigError("n_schedule must be a nonempty list of integers >= 3")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("n_schedule must be strictly increasing")
        self.n_schedule = ns
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError("replicates must be a positive integer")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        if str(obj.get("schema")) != SCHEMA:
            raise ConfigError(f"config schema must be {SCHEMA!r}")
        if "seed" not in obj:
            raise ConfigError("seed is mandatory")
        try:
            def law(key):
                v = obj.get(key)
                return None if v in (None, "gaussian") else TailLaw.from_json(v)
            rp = obj.get("rate_params")
            return cls(
                experiment=obj.get("experiment", ""),
                seed=obj["seed"],
                n_schedule=obj.get("n_schedule", []),
                replicates=obj.get("replicates", 1),
                offdiag=law("offdiag"),
                diag=law("diag"),
                rate_params=None if rp is None else RateParams.from_json(rp),
                tolerances=dict(obj.get("tolerances", {})),
                options=dict(obj.get("options", {})),
                out=obj.get("out"),
                workers=int(obj.get("workers", 1)),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "experiment": self.experiment,
            "seed": self.seed,
            "n_schedule": self.n_schedule,
            "replicates": self.replicates,
            "offdiag": None if self.offdiag is None else self.offdiag.to_json(),
            "diag": None if self.diag is None else self.diag.to_json(),
            "rate_params": None if self.rate_params is None else self.rate_params.to_json(),
            "tolerances": self.tolerances,
            "options": self.options,
        }


@dataclass
class Verdict:
    name: str
    status: str
    value: float | None
    threshold: str
    provenance: str

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass
class Report:
    experiment: str
    rows: list
    verdicts: list
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def replicate_rng(seed: int, n: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n, rep]))


def _heavy_law(cfg: ExperimentConfig) -> tuple[TailLaw, TailLaw]:
    off = cfg.offdiag or symmetric_real(1.5, standardize=True)
    dg = cfg.diag or off
    return off, dg


def _diag_pattern(n: int, nu: RealMeasure) -> np.ndarray:
    """Deterministic diagonal whose empirical law is nu rounded to multiples of 1/n."""
    counts = np.floor(nu.w * n).astype(int)
    counts[-1] += n - counts.sum()
    return np.repeat(nu.x, counts)


def _matrix(cfg: ExperimentConfig, n: int, rng) -> np.ndarray:
    if cfg.offdiag is None:
        return gaussian_wigner(n, rng)
    return sample_wigner(cfg.offdiag, cfg.diag or cfg.offdiag, n, rng)


# ------------------------------------------------------- per-replicate tasks

def _task(args):
    kind, cfg, n, rep = args
    rng = replicate_rng(cfg.seed, n, rep)
    if kind == "semicircle":
        off, dg = _heavy_law(cfg)
        x = sample_wigner(off, dg, n, rng)
        mu = spectral_measure(x / math.sqrt(n))
        return [("d_sc", distance_d(mu, semicircle()))]
    if kind == "expeq":
        off, dg = _heavy_law(cfg)
        x = sample_wigner(off, dg, n, rng)
        dec = decompose(x, off.alpha)
        mu = spectral_measure(x / math.sqrt(n))
        mu_c = spectral_measure(dec.C)
        counts = dec.counts()
        return [("d_sc", distance_d(mu, semicircle())),
                ("d_conv_C", convolution_distance(mu, mu_c)),
                ("count_C", float(counts["C"])),
                ("count_D", float(counts["D"]))]
    if kind in ("uaf", "freeconv"):
        nu = _target_measure(cfg)
        y = _matrix(cfg, n, rng)
        h = y / math.sqrt(n) + np.diag(_diag_pattern(n, nu))
        return np.linalg.eigvalsh(h)
    if kind == "decomposition":
        off, dg = _heavy_law(cfg)
        x = sample_wigner(off, dg, n, rng)
        dec = decompose(x, off.alpha)
        s = x / math.sqrt(n)
        exact = bool(np.array_equal(dec.A + dec.B + dec.C + dec.D, s))
        out = [(f"count_{k}", float(v)) for k, v in dec.counts().items()]
        out += [("trace_B2_over_n", float(np.sum(np.abs(dec.B) ** 2) / n)),
                ("trace_C2_over_n", float(np.sum(np.abs(dec.C) ** 2) / n)),
                ("rank_D", float(np.linalg.matrix_rank(dec.D)) if np.any(dec.D) else 0.0),
                ("reconstruction_exact", float(exact))]
        return out
    raise ConfigError(f"no replicate task for {kind}")


def _target_measure(cfg: ExperimentConfig) -> RealMeasure:
    spec = cfg.options.get("nu")
    if spec is None:
        return RealMeasure.atoms([-1.0, 1.0], [0.5, 0.5])
    return RealMeasure.from_json(spec)


def _guarded(args):
    try:
        return _task(args)
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        return ReplicateFailure(args[2], args[3], f"{type(exc).__name__}: {exc}")


@dataclass
class ReplicateFailure:
    n: int
    replicate: int
    message: str


def _run_tasks(cfg: ExperimentConfig, kind: str, jobs, failures: list):
    """Run replicate tasks; failures are collected and dropped from the result list."""
    args = [(kind, cfg, n, r) for n, r in jobs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_guarded, args, chunksize=1))
    else:
        results = [_guarded(a) for a in args]
    kept = []
    for job, res in zip(jobs, results):
        if isinstance(res, ReplicateFailure):
            failures.append(res.__dict__)
        else:
            kept.append((job, res))
    return kept


def _median_by_n(rows, stat):
    out = {}
    for n, _, s, v in rows:
        if s == stat:
            out.setdefault(n, []).append(v)
    return defaultdict(lambda: math.nan, {n: float(np.median(v)) for n, v in out.items()})


def _threshold_table(ns, alpha) -> dict:
    table = {}
    for n in ns:
        _, (t1, t2, t3) = band_thresholds(n, alpha)
        table[str(n)] = {"t1": t1, "t2": t2, "t3": t3, "band_B_empty": t1 > t2}
    return table


def _verdict(name, ok, value, threshold, provenance):
    return Verdict(name, "pass" if ok else "fail", value, threshold, provenance)


# ------------------------------------------------------------- experiments

def _run_replicated(cfg: ExperimentConfig, failures: list) -> list:
    jobs = [(n, r) for n in cfg.n_schedule for r in range(cfg.replicates)]
    rows = []
    for (n, r), res in _run_tasks(cfg, cfg.experiment, jobs, failures):
        for stat, val in res:
            rows.append((n, r, stat, float(val)))
    return rows


def _semicircle(cfg: ExperimentConfig, failures: list) -> Report:
    rows = _run_replicated(cfg, failures)
    med = _median_by_n(rows, "d_sc")
    seq = [med[n] for n in cfg.n_schedule]
    dec = all(b < a for a, b in zip(seq, seq[1:]))
    final = seq[-1]
    thr = cfg.tol("semicircle_final")
    prov = "semicircle law: mu_{X/sqrt(n)} converges weakly to mu_sc"
    verdicts = [
        _verdict("median_strictly_decreasing", dec, None, "strict decrease across n_schedule", prov),
        _verdict("final_median_d", final <= thr, final, f"<= {thr}", prov),
    ]
    return Report(cfg.experiment, rows, verdicts, {"medians": {str(n): med[n] for n in cfg.n_schedule}})


def _expeq(cfg: ExperimentConfig, failures: list) -> Report:
    rows = _run_replicated(cfg, failures)
    d_conv = _median_by_n(rows, "d_conv_C")
    d_sc = _median_by_n(rows, "d_sc")
    n_lo, n_hi = cfg.n_schedule[0], cfg.n_schedule[-1]
    ok = d_conv[n_hi] < d_sc[n_lo]
    off, _ = _heavy_law(cfg)
    thresholds = _threshold_table(cfg.n_schedule, off.alpha)
    prov = "exponential equivalence of mu_{X/sqrt(n)} and mu_sc boxplus mu_C"
    verdicts = [_verdict("conv_C_below_small_n_semicircle", ok, d_conv[n_hi],
                         f"< median d_sc at n={n_lo} ({d_sc[n_lo]:.6g})", prov)]
    return Report(cfg.experiment, rows, verdicts, {"thresholds": thresholds})


def _pooled(cfg: ExperimentConfig, failures: list):
    jobs = [(n, r) for n in cfg.n_schedule for r in range(cfg.replicates)]
    pooled = {}
    for (n, _), lam in _run_tasks(cfg, cfg.experiment, jobs, failures):
        pooled.setdefault(n, []).append(lam)
    return {n: RealMeasure.atoms(np.concatenate(v)) for n, v in pooled.items()}


def _uaf(cfg: ExperimentConfig, failures: list) -> Report:
    nu = _target_measure(cfg)
    pooled = _pooled(cfg, failures)
    rows = []
    ds = []
    ns = [n for n in cfg.n_schedule if n in pooled]
    for n in ns:
        m_n = RealMeasure.atoms(_diag_pattern(n, nu))
        d = convolution_distance(pooled[n], m_n)
        ds.append(d)
        rows.append((n, "mean", "d_mean_measure", d))
    slope = float(np.polyfit(np.log(ns), np.log(ds), 1)[0]) if len(ds) > 1 else math.nan
    lo, hi = cfg.tol("uaf_slope_low"), cfg.tol("uaf_slope_high")
    ok = lo <= slope <= hi
    prov = "mean spectral measure of Y/sqrt(n)+M approaches mu_sc boxplus mu_M at rate c/sqrt(n)"
    verdicts = [_verdict("loglog_slope", ok, slope, f"in [{lo}, {hi}]", prov)]
    return Report(cfg.experiment, rows, verdicts, {"slope": slope})


def _freeconv(cfg: ExperimentConfig, failures: list) -> Report:
    nu = _target_measure(cfg)
    pooled = _pooled(cfg, failures)
    solved, info = free_convolve_semicircle(nu, return_info=True)
    rows = []
    verdicts = []
    thr = cfg.tol("freeconv")
    prov = "subordination solution of mu_sc boxplus nu against Wigner plus diagonal spectra"
    for n in cfg.n_schedule:
        if n not in pooled:
            continue
        d = distance_d(solved, pooled[n])
        rows.append((n, "mean", "d_solver_vs_mc", d))
        verdicts.append(_verdict(f"d_solver_vs_mc_n{n}", d <= thr, d, f"<= {thr}", prov))
    return Report(cfg.experiment, rows, verdicts, {"discarded_mass": info.discarded_mass, "eta": info.eta})


def _decomposition(cfg: ExperimentConfig, failures: list) -> Report:
    rows = _run_replicated(cfg, failures)
    exact = all(v == 1.0 for _, _, s, v in rows if s == "reconstruction_exact")
    off, _ = _heavy_law(cfg)
    thresholds = _threshold_table(cfg.n_schedule, off.alpha)
    verdicts = [_verdict("reconstruction_exact", exact, None, "A+B+C+D == X/sqrt(n) bitwise",
                         "four-band decomposition of X/sqrt(n)")]
    return Report(cfg.experiment, rows, verdicts, {"thresholds": thresholds})


def _ldp(cfg: ExperimentConfig, failures: list) -> Report:
    p = cfg.rate_params or RateParams(1.0, 1.0, 1.0)
    opts = cfg.options
    ensemble = opts.get("ensemble", "diagonal")
    t = float(opts.get("t", 0.5))
    ests = estimate_ldp_exponent(ensemble, t, p, cfg.n_schedule, tilt=opts.get("tilt"),
                                 replicates=cfg.replicates, seed=cfg.seed,
                                 band=bool(opts.get("band", False)),
                                 ess_floor=cfg.tol("ess_floor"))
    rows = []
    for e in ests:
        rows += [(e.n, "all", "estimate", e.estimate), (e.n, "all", "ci_low", e.ci_low),
                 (e.n, "all", "ci_high", e.ci_high), (e.n, "all", "theory", e.theory),
                 (e.n, "all", "ess", e.ess)]
    last = ests[-1]
    rel = cfg.tol("ldp_relative")
    if last.theory == 0:
        ok = last.estimate == 0
    else:
        ok = abs(last.estimate - last.theory) <= rel * last.theory
    prov = ("diagonal ensemble rate b m_alpha" if ensemble == "diagonal"
            else "paired-block ensemble rate (a/2) m_alpha")
    verdicts = [_verdict(f"exponent_n{last.n}", ok, last.estimate,
                         f"within {rel:.0%} of {last.theory:.6g}", prov)]
    if not last.reliable:
        verdicts.append(Verdict("effective_sample_size", "fail", last.ess,
                                f">= {cfg.tol('ess_floor')}", "importance sampling diagnostics"))
    return Report(cfg.experiment, rows, verdicts,
                  {"estimates": [e.__dict__ for e in ests], "ensemble": ensemble, "t": t})


RUNNERS = {
    "semicircle": _semicircle,
    "uaf": _uaf,
    "expeq": _expeq,
    "freeconv": _freeconv,
    "decomposition": _decomposition,
    "ldp": _ldp,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Run the configured experiment; failed replicates are listed under meta["failures"]."""
    failures = []
    report = RUNNERS[cfg.experiment](cfg, failures)
    report.meta["failures"] = failures
    if not report.rows:
        report.verdicts = [_no_data()]
    return report


def _no_data() -> Verdict:
    return Verdict("data", "no-data", None, "rows present", "no rows produced")


# ------------------------------------------------------ tilted rare events

@dataclass
class LdpEstimate:
    n: int
    estimate: float
    ci_low: float
    ci_high: float
    theory: float
    log_prob: float
    ess: float
    reliable: bool
    tilt: float


class _TruncatedExp:
    """Law of V * 1{lo <= V <= hi} with V ~ Exp(rate), tilted by exp(lam * value)."""

    def __init__(self, rate, lo=0.0, hi=math.inf):
        self.rate, self.lo, self.hi = rate, lo, hi
        out = -math.expm1(-rate * lo) + (0.0 if math.isinf(hi) else math.exp(-rate * hi))
        self._log_out = math.log(out) if out > 0 else -math.inf

    def _log_band(self, r):
        # log int_lo^hi rate exp(-r v) dv
        lo, hi, base = self.lo, self.hi, math.log(self.rate)
        if math.isinf(hi):
            return base - r * lo - math.log(r) if r > 0 else math.inf
        width = hi - lo
        if abs(r) * width < 1e-12:
            return base + math.log(width) - r * lo
        if r > 0:
            return base - r * lo + math.log(-math.expm1(-r * width)) - math.log(r)
        return base - r * hi + math.log(-math.expm1(r * width)) - math.log(-r)

    def log_mgf(self, lam):
        return float(np.logaddexp(self._log_out, self._log_band(self.rate - lam)))

    def tilted_mean(self, lam, h=1e-6):
        return (self.log_mgf(lam + h) - self.log_mgf(lam - h)) / (2 * h)

    def sample_tilted(self, lam, rng, size):
        r = self.rate - lam
        p_in = math.exp(self._log_band(r) - self.log_mgf(lam))
        u = rng.random(size)
        hit = rng.random(size) < p_in
        lo, hi = self.lo, self.hi
        width = hi - lo
        # inverse CDF of the density proportional to exp(-r v) on [lo, hi]
        if math.isinf(hi):
            v = lo - np.log1p(-u) / r
        elif abs(r) * width < 1e-12:
            v = lo + u * width
        elif r > 0:
            v = lo - np.log1p(u * math.expm1(-r * width)) / r
        else:
            v = hi + np.log1p((1 - u) * math.expm1(r * width)) / -r
        return np.where(hit, v, 0.0)


def _scalar_law(ensemble, p, n, band):
    """Per-coordinate law of |entry|^alpha and the number of coordinates."""
    if ensemble == "diagonal":
        rate, count = p.b, n
    elif ensemble == "paired-block":
        if n % 2:
            raise ValueError("paired-block ensemble needs even n")
        rate, count = p.a, n // 2
    else:
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if band:
        eps = 1 / math.log(n)
        lo, hi = (eps * math.sqrt(n)) ** p.alpha, (math.sqrt(n) / eps) ** p.alpha
        return _TruncatedExp(rate, lo, hi), count, rate
    return _TruncatedExp(rate), count, rate


def estimate_ldp_exponent(ensemble: str, t: float, p: RateParams, n_schedule, tilt=None,
                          replicates: int = 20000, seed: int = 0, band: bool = False,
                          ess_floor: float = 100.0, level: float = 0.95) -> list[LdpEstimate]:
    """Estimate -n^-(1+alpha/2) log P(functional >= t) by exponential tilting.

    For ``diagonal`` the functional is n^-(1+alpha/2) sum_i |X_ii|^alpha with
    X_ii in the class with constant b; for ``paired-block`` it is the same
    sum over the n/2 block entries with constant a. Each |entry|^alpha is
    exponential, so tilting is exact and the likelihood ratio is closed form.
    The tilt defaults to the saddle point where the tilted mean hits the
    threshold. With ``band`` only entries between eps sqrt(n) and sqrt(n)/eps
    contribute.
    """
    out = []
    zq = float(np.sqrt(2) * _erfinv(level))
    for n in n_schedule:
        law, count, rate = _scalar_law(ensemble, p, n, band)
        speed = n ** (1 + p.alpha / 2)
        theory = rate * t
        if t <= 0:
            out.append(LdpEstimate(n, 0.0, 0.0, 0.0, theory, 0.0, float(replicates), True, 0.0))
            continue
        x = t * speed
        if x > count * law.hi:
            # the band caps every coordinate, so the event is empty
            out.append(LdpEstimate(n, math.inf, math.inf, math.inf, theory, -math.inf, 0.0, True, 0.0))
            continue
        if tilt is None:
            target = x / count
            if math.isinf(law.hi):
                lam = rate - 1.0 / target
            else:
                lam = brentq(lambda l: law.tilted_mean(l) - target, -50.0 * rate, rate + 50.0)
        else:
            lam = float(tilt)
        rng = replicate_rng(seed, n, 0)
        logm = law.log_mgf(lam)
        ss = np.zeros(replicates)
        for _ in range(count):
            ss += law.sample_tilted(lam, rng, replicates)
        logw = count * logm - lam * ss
        hit = ss >= x
        if not np.any(hit):
            out.append(LdpEstimate(n, math.inf, math.nan, math.inf, theory, -math.inf, 0.0, False, lam))
            continue
        lw = logw[hit]
        log_p = logsumexp(lw) - math.log(replicates)
        # moments relative to exp(log_p) keep everything in range
        rel = np.zeros(replicates)
        rel[hit] = np.exp(lw - log_p)
        se = rel.std(ddof=1) / math.sqrt(replicates)
        lo_p = log_p + math.log(max(1 - zq * se, 1e-300))
        hi_p = log_p + math.log1p(zq * se)
        ess = float(rel.sum() ** 2 / np.sum(rel**2))
        out.append(LdpEstimate(n, float(-log_p / speed), float(-hi_p / speed), float(-lo_p / speed),
                               theory, float(log_p), ess, ess >= ess_floor, float(lam)))
    return out


def _erfinv(y):
    from scipy.special import erfinv
    return float(erfinv(y))


def tilted_binomial_tail(n: int, p: float, k: int, replicates: int, rng) -> float:
    """Importance-sampling estimate of P(Bin(n, p) >= k) with success rate tilted to k/n."""
    if k <= 0:
        return 1.0
    q = min(max(k / n, p), 1 - 1e-12)
    s = rng.binomial(n, q, size=replicates)
    logw = s * math.log(p / q) + (n - s) * math.log((1 - p) / (1 - q))
    w = np.where(s >= k, np.exp(logw), 0.0)
    return float(w.mean())


def exact_binomial_tail(n: int, p: float, k: int) -> float:
    return float(sum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(max(k, 0), n + 1)))


# ------------------------------------------------------------------ reports

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit_report(report: Report, out_dir, config: ExperimentConfig | None = None) -> dict:
    """Write <experiment>.csv, <experiment>_verdicts.json and <experiment>.svg."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = report.experiment
    csv_path = out / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in report.rows:
            writer.writerow([_fmt(v) for v in row])
    verdicts = report.verdicts if report.rows else [_no_data()]
    payload = {
        "experiment": name,
        "passed": all(v.passed for v in verdicts),
        "verdicts": [v.__dict__ for v in verdicts],
        "meta": report.meta,
    }
    if config is not None:
        payload["config"] = config.to_json()
    json_path = out / f"{name}_verdicts.json"
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    svg_path = out / f"{name}.svg"
    _plot(report, svg_path)
    return {"csv": csv_path, "json": json_path, "svg": svg_path}


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialize {type(o)}")


def _plot(report: Report, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "freedev"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    series = {}
    for n, _, stat, val in report.rows:
        if isinstance(val, float) and math.isfinite(val):
            series.setdefault(stat, {}).setdefault(n, []).append(val)
    for stat, by_n in sorted(series.items()):
        ns = sorted(by_n)
        ax.plot(ns, [float(np.median(by_n[k])) for k in ns], marker="o", label=stat)
    if series:
        ax.set_xscale("log")
        ax.legend(fontsize=7)
    ax.set_xlabel("n")
    ax.set_title(report.experiment)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
