"""Rademacher complexity: exact enumeration, Monte Carlo, and the
peeling-based complexity with its upper bounds.

The central quantity for a pool matrix is ``E_sigma max_j (1/m) sum_i
sigma_i values[i, j]``.  The peeling-based complexity of a class sampled
from a distribution is

    sup_k log E_z [ exp( m^2 * Rhat(shell_k(z))^2 / 2^{k+5} ) ],

estimated by an outer Monte-Carlo over fresh samples with a stable
log-mean-exp, and an inner Rademacher value per shell (exact enumeration
when m <= 20, Monte Carlo otherwise).  Empty shells contribute zero.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .errors import CapabilityError, DomainError, InputError
from .estimates import ComplexityEstimate
from .lossmatrix import LossMatrix, count_dichotomies, peel
from .covers import DEFAULT_EXACT_CAP, covering_number_l2
from .rng import child_seed, substream

__all__ = [
    "rademacher_exact",
    "rademacher_mc",
    "peeling_complexity",
    "peeling_complexity_for_matrices",
    "peeling_exponents",
    "rm_upper_dichotomy",
    "rm_upper_dudley",
    "rm_upper_smooth",
    "worst_case_rademacher",
]

EXACT_ENUMERATION_MAX_M = 20


def rademacher_exact(matrix: LossMatrix) -> ComplexityEstimate:
    """Exact E over all 2^m sign vectors of the max column correlation / m."""
    if matrix.m > EXACT_ENUMERATION_MAX_M:
        raise CapabilityError(
            f"exact enumeration is capped at m = {EXACT_ENUMERATION_MAX_M} (got {matrix.m})"
        )
    value = kernels.exact_mean_sup_signed_sum(matrix.values) / matrix.m
    return ComplexityEstimate(value=value, method="exact-enumeration", details={"m": matrix.m})


def rademacher_mc(matrix: LossMatrix, n_sigma: int, seed: int) -> ComplexityEstimate:
    """Monte-Carlo estimate with standard error over n_sigma sign draws."""
    if n_sigma < 2:
        raise InputError("rademacher_mc needs n_sigma >= 2")
    rng = substream(seed, "sigma")
    signs = rng.integers(0, 2, size=(int(n_sigma), matrix.m)) * 2.0 - 1.0
    sups = kernels.sup_signed_sums(matrix.values, signs) / matrix.m
    value = float(sups.mean())
    stderr = float(sups.std(ddof=1) / math.sqrt(n_sigma))
    return ComplexityEstimate(
        value=value,
        method="monte-carlo",
        trials=(int(n_sigma),),
        seed=int(seed),
        stderr=stderr,
        details={"m": matrix.m},
    )


def _shell_count(m: int) -> int:
    # column sums lie in [0, m], so k ranges over 0 .. floor(log2(m + 1))
    return int(math.floor(math.log2(m + 1))) + 1


def _shell_rademacher_values(matrix: LossMatrix, inner: str, n_sigma: int, rng) -> np.ndarray:
    """Rhat for every shell k of one sample matrix (0 for empty shells)."""
    partition = peel(matrix)
    m = matrix.m
    n_shells = _shell_count(m)
    out = np.zeros(n_shells)
    signs = None
    if inner == "mc":
        signs = rng.integers(0, 2, size=(int(n_sigma), m)) * 2.0 - 1.0
    for k in range(n_shells):
        cols = partition.columns(k)
        if not cols:
            continue
        sub = matrix.values[:, list(cols)]
        if inner == "exact":
            out[k] = kernels.exact_mean_sup_signed_sum(sub) / m
        else:
            out[k] = float(kernels.sup_signed_sums(sub, signs).mean()) / m
    return out


def peeling_exponents(matrix: LossMatrix, inner: str = "auto", n_sigma: int = 1024, rng=None) -> np.ndarray:
    """Per-shell exponents m^2 * Rhat_k^2 / 2^{k+5} for one sample matrix."""
    if matrix.values.min() < 0.0 or matrix.values.max() > 1.0:
        raise InputError("peeling requires entries in [0, 1]")
    if inner == "auto":
        inner = "exact" if matrix.m <= EXACT_ENUMERATION_MAX_M else "mc"
    if inner == "exact" and matrix.m > EXACT_ENUMERATION_MAX_M:
        raise CapabilityError(
            f"exact inner enumeration is capped at m = {EXACT_ENUMERATION_MAX_M}"
        )
    if inner == "mc" and rng is None:
        raise InputError("monte-carlo inner estimation needs a generator")
    rhat = _shell_rademacher_values(matrix, inner, n_sigma, rng)
    ks = np.arange(rhat.shape[0])
    return (matrix.m**2) * rhat**2 / np.exp2(ks + 5)


def peeling_complexity_for_matrices(
    matrices, inner: str = "auto", n_sigma: int = 1024, seed: int = 0
) -> ComplexityEstimate:
    """Peeling complexity treating the given matrices as the outer sample set."""
    matrices = list(matrices)
    if len(matrices) < 1:
        raise InputError("need at least one sample matrix")
    m = matrices[0].m
    if any(mat.m != m for mat in matrices):
        raise InputError("all sample matrices must share the same m")
    rows = []
    for t, mat in enumerate(matrices):
        rng = substream(seed, "inner", t)
        rows.append(peeling_exponents(mat, inner=inner, n_sigma=n_sigma, rng=rng))
    exponents = np.stack(rows, axis=0)  # (trials, shells)
    n = exponents.shape[0]
    per_k = logsumexp(exponents, axis=0) - math.log(n)
    k_star = int(np.argmax(per_k))
    value = float(per_k[k_star])
    # delta-method stderr of log-mean-exp at the reported shell
    e = exponents[:, k_star]
    w = np.exp(e - e.max())
    wbar = float(w.mean())
    stderr = float(w.std(ddof=1) / (wbar * math.sqrt(n))) if n > 1 else 0.0
    used_inner = (
        "exact" if (inner == "exact" or (inner == "auto" and m <= EXACT_ENUMERATION_MAX_M)) else "mc"
    )
    trial_counts = (n, int(n_sigma)) if used_inner == "mc" else (n,)
    return ComplexityEstimate(
        value=value,
        method="monte-carlo",
        trials=trial_counts,
        seed=int(seed),
        stderr=stderr,
        details={
            "per_shell": {int(k): float(v) for k, v in enumerate(per_k)},
            "arg_shell": k_star,
            "inner": used_inner,
            "m": m,
        },
    )


def peeling_complexity(
    class_sampler,
    outer_trials: int,
    n_sigma: int = 1024,
    seed: int = 0,
    inner: str = "auto",
) -> ComplexityEstimate:
    """Estimate the peeling-based complexity by outer Monte Carlo over samples.

    ``class_sampler(sample_seed)`` must return the pool's LossMatrix on a
    fresh size-m sample.  The result is a plug-in estimate and is always
    flagged monte-carlo, never certified.
    """
    if outer_trials < 2:
        raise InputError("peeling_complexity needs outer_trials >= 2")
    matrices = [class_sampler(child_seed(seed, "outer", t)) for t in range(int(outer_trials))]
    return peeling_complexity_for_matrices(matrices, inner=inner, n_sigma=n_sigma, seed=seed)


def rm_upper_dichotomy(class_sampler, trials: int, seed: int = 0) -> ComplexityEstimate:
    """(1/8) log of the Monte-Carlo mean dichotomy count of a binary class."""
    if trials < 1:
        raise InputError("rm_upper_dichotomy needs trials >= 1")
    counts = []
    for t in range(int(trials)):
        mat = class_sampler(child_seed(seed, "outer", t))
        if mat.range_tag != "binary":
            raise InputError("dichotomy bound requires binary-valued classes")
        counts.append(count_dichotomies(mat))
    counts = np.asarray(counts, dtype=np.float64)
    mean = float(counts.mean())
    value = math.log(mean) / 8.0
    stderr = float(counts.std(ddof=1) / (mean * math.sqrt(len(counts))) / 8.0) if len(counts) > 1 else 0.0
    return ComplexityEstimate(
        value=value,
        method="monte-carlo",
        trials=(int(trials),),
        seed=int(seed),
        stderr=stderr,
        details={"mean_dichotomies": mean},
    )


def rm_upper_dudley(
    matrix: LossMatrix,
    k: int,
    eps_grid,
    cover_mode: str = "auto",
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> float:
    """Entropy-integral cap on one shell's exponent term:
    (1/16) (1 + integral of log N2(shell, sqrt(2^k/m) * eps) d eps).

    The integral is a trapezoid over the supplied grid, which must be
    increasing inside [1/sqrt(m), 1].  An empty shell contributes 1/16.
    """
    grid = np.asarray(eps_grid, dtype=np.float64)
    m = matrix.m
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise InputError("eps_grid must be increasing with at least two points")
    lo = 1.0 / math.sqrt(m)
    if grid[0] < lo - 1e-12 or grid[-1] > 1.0 + 1e-12:
        raise InputError("eps_grid must lie within [1/sqrt(m), 1]")
    cols = peel(matrix).columns(int(k))
    if not cols:
        return 1.0 / 16.0
    sub = LossMatrix(matrix.values[:, list(cols)], "real")
    if cover_mode == "auto":
        cover_mode = "exact" if sub.pool_size <= exact_cap else "greedy"
    scale = math.sqrt((2.0**k) / m)
    log_n = np.array(
        [
            math.log(covering_number_l2(sub, scale * float(e), mode=cover_mode, exact_cap=exact_cap).value)
            for e in grid
        ]
    )
    integral = float(np.trapezoid(log_n, grid))
    return (1.0 + integral) / 16.0


def rm_upper_smooth(rho: float, m: int, rmax: float) -> float:
    """Smoothed-loss cap on the peeling complexity:
    (16 pi^2 m / rho^2) * rmax^2 * (2 log^{3/2}(m/rmax) - log^{3/2}(2 pi m / (rho rmax)))^2.
    """
    if not (0 < rmax < m):
        raise InputError("requires 0 < rmax < m")
    if not (rho > 0):
        raise InputError("rho must be positive")
    a = m / rmax
    b = 2.0 * math.pi * m / (rho * rmax)
    if a <= 1.0 or b <= 1.0:
        raise DomainError("smoothed-loss cap needs both log arguments above 1")
    bracket = 2.0 * math.log(a) ** 1.5 - math.log(b) ** 1.5
    return (16.0 * math.pi**2 * m / rho**2) * rmax**2 * bracket**2


def worst_case_rademacher(params, m: int) -> float:
    """Closed-form cap on the worst-case (sup over samples) Rademacher value.

    Supported kinds: linear (radius R) -> R / sqrt(m); ffnn-spectral ->
    depth^{3/2} R R21 (R L)^depth / (rho^depth sqrt(m)), with all suppressed
    constants set to one.
    """
    if m < 1:
        raise InputError("m must be at least 1")
    kind = getattr(params, "kind", None)
    if kind == "linear":
        if not (params.radius and params.radius > 0):
            raise InputError("linear class needs a positive radius")
        return params.radius / math.sqrt(m)
    if kind == "ffnn-spectral":
        d = params.depth
        if not (d and d >= 1 and params.radius > 0 and params.r21 > 0 and params.rho > 0 and params.lipschitz > 0):
            raise InputError("ffnn-spectral needs depth >= 1 and positive radius, r21, rho, lipschitz")
        return (
            d**1.5
            * params.radius
            * params.r21
            * (params.radius * params.lipschitz) ** d
            / (params.rho**d * math.sqrt(m))
        )
    raise CapabilityError(f"no worst-case Rademacher formula for kind {kind!r}")
