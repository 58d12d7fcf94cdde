"""Monte-Carlo validation of bound coverage on synthetic problems.

A campaign draws fresh samples, evaluates a bound family for every member
of a fixed hypothesis pool, and counts trials where any member's true risk
exceeds its bound (the uniform event a uniform-convergence guarantee
protects against).  Complexity inputs are estimated once per family from
their own substreams, so trials stay cheap and the whole report is
reproducible bit-for-bit at any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta as beta_dist

from . import __version__ as _pkg_version
from .bounds import BoundParams, cov_alpha2_value, rad_budget, rad_value, solve_relative
from .errors import InputError
from .estimates import ComplexityEstimate
from .fatdim import FatDimParams, cover_log_bound_from_fat, fat_dim_formula
from .hypotheses import LinearHypothesis, truncate
from .kernels import active_backend
from .lossmatrix import LossMatrix, outputs_matrix, transform_matrix
from .covers import covering_number_linf
from .rademacher import peeling_complexity
from .rng import child_seed, substream
from .samples import LabeledSample, make_distribution
from .training import train
from .transforms import step

__all__ = ["ExperimentConfig", "ValidityReport", "validate_bounds", "exact_binomial_ci"]

SUPPORTED_FAMILIES = ("cov-alpha", "cov-alpha2", "cov-fat", "rad")

_DEFAULT_COMPLEXITY = {
    "cover_draws": 64,
    "peel_draws": 64,
    "n_sigma": 1024,
    "exact_cap": 25,
    "cover_mode": "exact",
}


@dataclass(frozen=True)
class ExperimentConfig:
    distribution: dict
    pool: dict
    params: BoundParams
    families: tuple
    trials: int
    seed: int
    mode: str = "uniform-pool"
    trainer: dict | None = None
    complexity: dict = field(default_factory=dict)
    risk: dict = field(default_factory=lambda: {"mode": "analytic"})

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if self.mode not in ("uniform-pool", "trained"):
            raise InputError("mode must be 'uniform-pool' or 'trained'")
        if self.mode == "trained" and not self.trainer:
            raise InputError("trained mode needs a trainer spec")
        fams = tuple(self.families)
        unknown = [f for f in fams if f not in SUPPORTED_FAMILIES]
        if unknown:
            raise InputError(f"unsupported families {unknown}; supported: {SUPPORTED_FAMILIES}")
        if not fams:
            raise InputError("at least one bound family is required")
        object.__setattr__(self, "families", fams)
        merged = dict(_DEFAULT_COMPLEXITY)
        unknown_keys = set(self.complexity) - set(merged)
        if unknown_keys:
            raise InputError(f"unknown complexity options {sorted(unknown_keys)}")
        merged.update(self.complexity)
        object.__setattr__(self, "complexity", merged)
        if self.pool.get("kind", "linear") != "linear":
            raise InputError("only linear hypothesis pools are supported")
        if int(self.pool.get("size", 0)) < 1:
            raise InputError("pool size must be at least 1")

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = {
            "distribution",
            "pool",
            "params",
            "families",
            "trials",
            "seed",
            "mode",
            "trainer",
            "complexity",
            "risk",
        }
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        missing = {"distribution", "pool", "params", "families", "trials", "seed"} - set(data)
        if missing:
            raise InputError(f"missing config keys {sorted(missing)}")
        params = data["params"]
        if not isinstance(params, BoundParams):
            allowed = {"m", "delta", "alpha", "rho", "tau", "r"}
            bad = set(params) - allowed
            if bad:
                raise InputError(f"unknown params keys {sorted(bad)}")
            params = BoundParams(**params)
        return cls(
            distribution=dict(data["distribution"]),
            pool=dict(data["pool"]),
            params=params,
            families=tuple(data["families"]),
            trials=int(data["trials"]),
            seed=int(data["seed"]),
            mode=data.get("mode", "uniform-pool"),
            trainer=data.get("trainer"),
            complexity=dict(data.get("complexity", {})),
            risk=dict(data.get("risk", {"mode": "analytic"})),
        )


@dataclass(frozen=True)
class ValidityReport:
    families: dict
    rows: tuple
    environment: dict

    def to_json(self) -> dict:
        return {
            "schema": "relmargin/validity-report/v1",
            "families": dict(self.families),
            "rows": [list(r) for r in self.rows],
            "environment": dict(self.environment),
        }

    @staticmethod
    def csv_header() -> list:
        return ["family", "trial", "emp", "complexity", "bound", "true_risk", "violated"]


def exact_binomial_ci(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval for a binomial proportion."""
    if not (0 <= k <= n) or n < 1:
        raise InputError("need 0 <= k <= n with n >= 1")
    a = 1.0 - confidence
    lo = 0.0 if k == 0 else float(beta_dist.ppf(a / 2.0, k, n - k + 1))
    hi = 1.0 if k == n else float(beta_dist.ppf(1.0 - a / 2.0, k + 1, n - k))
    return lo, hi


def _build_pool(cfg: ExperimentConfig):
    rng = substream(cfg.seed, "pool")
    size = int(cfg.pool.get("size"))
    dim = int(cfg.distribution.get("dim", 2))
    ws = rng.standard_normal((size, dim))
    ws /= np.maximum(np.linalg.norm(ws, axis=1, keepdims=True), 1e-12)
    return [LinearHypothesis(w) for w in ws]


def _pool_true_risks(cfg, dist, pool) -> np.ndarray:
    mode = cfg.risk.get("mode", "analytic")
    if mode == "analytic":
        return np.array([dist.analytic_risk(h) for h in pool])
    if mode == "holdout":
        n = int(cfg.risk.get("n", 10**6))
        rng = substream(cfg.seed, "risk")
        w_stack = np.stack([h.w for h in pool], axis=0)
        errors = np.zeros(len(pool))
        remaining = n
        while remaining > 0:  # chunked: n * pool predictions can be large
            block = min(remaining, 100_000)
            x, y = dist.sample(block, rng)
            errors += ((y[:, None] * (x @ w_stack.T)) <= 0.0).sum(axis=0)
            remaining -= block
        return errors / n
    raise InputError(f"unknown risk mode {mode!r}")


def _estimate_log_cover(cfg, dist, pool) -> ComplexityEstimate:
    """log of the Monte-Carlo mean sup-distance cover of the truncated pool
    at radius rho/2 over fresh double samples."""
    p = cfg.params
    draws = int(cfg.complexity["cover_draws"])
    cap = int(cfg.complexity["exact_cap"])
    mode = cfg.complexity["cover_mode"]
    truncated = [truncate(h, p.rho) for h in pool]
    counts = np.empty(draws)
    for t in range(draws):
        rng = substream(cfg.seed, "cover", t)
        x, _ = dist.sample(2 * p.m, rng)
        mat = outputs_matrix(truncated, x)
        counts[t] = covering_number_linf(mat, p.rho / 2.0, mode=mode, exact_cap=cap).value
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / (mean * math.sqrt(draws))) if draws > 1 else 0.0
    return ComplexityEstimate(
        value=float(math.log(mean)),
        method="monte-carlo",
        trials=(draws,),
        seed=cfg.seed,
        stderr=stderr,
        details={"mean_cover": mean, "radius": p.rho / 2.0, "metric": "linf", "mode": mode},
    )


def _estimate_peeling(cfg, dist, pool) -> ComplexityEstimate:
    p = cfg.params
    transform = step(p.rho)

    def sampler(sample_seed: int) -> LossMatrix:
        rng = substream(sample_seed, "peel-sample")
        x, y = dist.sample(p.m, rng)
        sample = LabeledSample(points=x, labels=y, seed=sample_seed, generator_id=dist.generator_id)
        return transform_matrix(pool, sample, transform)

    return peeling_complexity(
        sampler,
        outer_trials=int(cfg.complexity["peel_draws"]),
        n_sigma=int(cfg.complexity["n_sigma"]),
        seed=child_seed(cfg.seed, "peel"),
    )


def _family_complexity(cfg, dist, pool, family: str) -> ComplexityEstimate:
    if family in ("cov-alpha", "cov-alpha2"):
        return _estimate_log_cover(cfg, dist, pool)
    if family == "cov-fat":
        radius = float(getattr(dist, "radius"))
        d = max(1.0, fat_dim_formula(FatDimParams(kind="linear", radius=radius, rho=cfg.params.rho)))
        return ComplexityEstimate(value=d, method="formula", details={"class": "linear", "radius": radius})
    if family == "rad":
        return _estimate_peeling(cfg, dist, pool)
    raise InputError(f"unsupported family {family!r}")


def family_bound_values(family: str, emp: np.ndarray, complexity_value: float, p: BoundParams) -> np.ndarray:
    """Vectorized bound values for a family; identical to the per-report
    formulas (asserted by tests) and clamped at 1 like the reports."""
    emp = np.asarray(emp, dtype=np.float64)
    if family == "cov-alpha2":
        c = (complexity_value + math.log(1.0 / p.delta)) / p.m
        raw = cov_alpha2_value(emp, c)
    elif family == "cov-alpha":
        a = p.alpha
        coeff = 2.0 ** ((a + 2.0) / (2.0 * a)) * math.sqrt(
            (complexity_value + math.log(1.0 / p.delta)) / p.m ** (2.0 * (a - 1.0) / a)
        )
        raw = np.array([solve_relative(float(e), coeff, a) for e in np.atleast_1d(emp)])
        raw = raw.reshape(emp.shape)
    elif family == "cov-fat":
        term = (cover_log_bound_from_fat(complexity_value, p.m) + math.log(1.0 / p.delta)) / p.m
        raw = emp + 2.0 * np.sqrt(emp * term) + term
    elif family == "rad":
        raw = rad_value(emp, rad_budget(complexity_value, p), p.alpha)
    else:
        raise InputError(f"unsupported family {family!r}")
    return np.minimum(raw, 1.0)


def validate_bounds(cfg: ExperimentConfig, threads: int = 1) -> ValidityReport:
    """Run the campaign and report per-family uniform violation rates with
    exact binomial 95% confidence intervals."""
    dist = make_distribution(cfg.distribution)
    pool = _build_pool(cfg)
    p = cfg.params
    complexities = {fam: _family_complexity(cfg, dist, pool, fam) for fam in cfg.families}

    if cfg.mode == "uniform-pool":
        true_risks = _pool_true_risks(cfg, dist, pool)
        w_stack = np.stack([h.w for h in pool], axis=0)

        def run_trial(t: int):
            rng = substream(cfg.seed, "trial", t)
            x, y = dist.sample(p.m, rng)
            margins = y[:, None] * (x @ w_stack.T)
            emp = (margins < p.rho).mean(axis=0)
            out = {}
            for fam in cfg.families:
                bounds = family_bound_values(fam, emp, complexities[fam].value, p)
                gaps = true_risks - bounds
                j = int(np.argmax(gaps))
                out[fam] = (bool(np.any(gaps > 0)), float(gaps.max()), float(emp[j]), float(bounds[j]), float(true_risks[j]))
            return out

    else:
        trainer_cfg = dict(cfg.trainer)
        method = trainer_cfg.pop("method", "hinge-subgradient-linear")
        holdout_n = int(cfg.risk.get("n", 10**5))

        def run_trial(t: int):
            rng = substream(cfg.seed, "trial", t)
            x, y = dist.sample(p.m, rng)
            sample = LabeledSample(points=x, labels=y, seed=t, generator_id=dist.generator_id)
            local = dict(trainer_cfg)
            local["seed"] = child_seed(cfg.seed, "train", t)
            h = train(method, sample, local)
            emp = float((y * h.predict(x) < p.rho).mean())
            if cfg.risk.get("mode", "analytic") == "analytic":
                risk = dist.analytic_risk(h)
            else:
                hx, hy = dist.sample(holdout_n, substream(cfg.seed, "trial-risk", t))
                risk = float(((hy * h.predict(hx)) <= 0.0).mean())
            out = {}
            for fam in cfg.families:
                bound = float(
                    family_bound_values(fam, np.array([emp]), complexities[fam].value, p)[0]
                )
                out[fam] = (bool(risk > bound), float(risk - bound), emp, bound, float(risk))
            return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool_exec:
            results = list(pool_exec.map(run_trial, range(cfg.trials)))
    else:
        results = [run_trial(t) for t in range(cfg.trials)]

    families_out = {}
    rows = []
    event = "uniform-over-pool" if cfg.mode == "uniform-pool" else "trained-single-hypothesis"
    for fam in cfg.families:
        violations = sum(int(results[t][fam][0]) for t in range(cfg.trials))
        worst = max(results[t][fam][1] for t in range(cfg.trials))
        ci = exact_binomial_ci(violations, cfg.trials)
        families_out[fam] = {
            "trials": cfg.trials,
            "violations": violations,
            "violation_rate": violations / cfg.trials,
            "ci95": [ci[0], ci[1]],
            "worst_violation_margin": worst,
            "event": event,
            "complexity": complexities[fam].to_json(),
        }
        for t in range(cfg.trials):
            v, _, emp, bound, risk = results[t][fam]
            rows.append((fam, t, emp, complexities[fam].value, bound, risk, int(v)))
    environment = {
        "seed": cfg.seed,
        "package_version": _pkg_version,
        "backend": active_backend(),
        "delta": p.delta,
    }
    return ValidityReport(families=families_out, rows=tuple(rows), environment=environment)
