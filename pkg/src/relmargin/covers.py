"""Empirical covering numbers over a finite pool.

Covers are proper (internal): centers are drawn from the pool columns
themselves, and a column is covered when its distance to a chosen center
is <= eps (ties included).  Two metrics are supported: the sup distance
``max_i |a_i - b_i|`` and the normalized euclidean distance
``sqrt(mean_i (a_i - b_i)^2)``.

The exact solver is a branch-and-bound set-cover search seeded with the
greedy solution; it is capped at ``exact_cap`` pool columns (default 25)
and rejects larger instances with a CapabilityError.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import CapabilityError, InputError
from .estimates import ComplexityEstimate
from .lossmatrix import LossMatrix

__all__ = ["covering_number_linf", "covering_number_l2", "covering_number"]

DEFAULT_EXACT_CAP = 25


def _distance_matrix(values: np.ndarray, metric: str) -> np.ndarray:
    if metric == "linf":
        return kernels.pairwise_linf(values)
    if metric == "l2":
        return kernels.pairwise_l2n(values)
    raise InputError(f"unknown metric {metric!r}")


def _coverage_masks(dist: np.ndarray, eps: float) -> list[int]:
    p = dist.shape[0]
    masks = []
    for j in range(p):
        mask = 0
        for i in range(p):
            if dist[j, i] <= eps:
                mask |= 1 << i
        masks.append(mask)
    return masks


def _greedy_cover(masks: list[int], full: int) -> int:
    uncovered = full
    count = 0
    while uncovered:
        best_gain = -1
        best_mask = 0
        for mask in masks:
            gain = (mask & uncovered).bit_count()
            if gain > best_gain:
                best_gain = gain
                best_mask = mask
        uncovered &= ~best_mask
        count += 1
    return count


def _exact_cover(masks: list[int], full: int) -> int:
    best = _greedy_cover(masks, full)

    def dfs(uncovered: int, used: int):
        nonlocal best
        if uncovered == 0:
            if used < best:
                best = used
            return
        max_gain = 0
        for mask in masks:
            gain = (mask & uncovered).bit_count()
            if gain > max_gain:
                max_gain = gain
        if used + math.ceil(uncovered.bit_count() / max_gain) >= best:
            return
        # branch on the uncovered element with the fewest candidate centers
        pick = -1
        pick_count = len(masks) + 1
        u = uncovered
        while u:
            bit = u & -u
            cnt = sum(1 for mask in masks if mask & bit)
            if cnt < pick_count:
                pick_count = cnt
                pick = bit
            u &= u - 1
        cands = sorted(
            (mask for mask in masks if mask & pick),
            key=lambda mk: -(mk & uncovered).bit_count(),
        )
        for mask in cands:
            dfs(uncovered & ~mask, used + 1)

    dfs(full, 0)
    return best


def covering_number(
    matrix: LossMatrix,
    eps: float,
    metric: str = "linf",
    mode: str = "exact",
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> ComplexityEstimate:
    """Minimum (exact) or greedily found (greedy) number of pool columns
    covering every column within eps."""
    if not (eps >= 0):
        raise InputError("eps must be nonnegative")
    if mode not in ("exact", "greedy"):
        raise InputError(f"unknown cover mode {mode!r}")
    p = matrix.pool_size
    if mode == "exact" and p > exact_cap:
        raise CapabilityError(
            f"exact cover search is capped at {exact_cap} pool columns (got {p})"
        )
    # identical columns cover each other at distance zero; deduplicating
    # changes neither the exact nor the greedy value
    distinct, inverse = np.unique(matrix.values.T, axis=0, return_inverse=True)
    dist = _distance_matrix(distinct.T, metric)
    q = dist.shape[0]
    masks = _coverage_masks(dist, eps)
    full = (1 << q) - 1
    if mode == "exact":
        value = _exact_cover(masks, full)
        method = "exact-enumeration"
    else:
        value = _greedy_cover(masks, full)
        method = "greedy-upper"
    return ComplexityEstimate(
        value=float(value),
        method=method,
        details={"metric": metric, "eps": float(eps), "pool": p, "distinct": q},
    )


def covering_number_linf(matrix, eps, mode="exact", exact_cap=DEFAULT_EXACT_CAP):
    """Empirical sup-distance covering number of the pool."""
    return covering_number(matrix, eps, "linf", mode, exact_cap)


def covering_number_l2(matrix, eps, mode="exact", exact_cap=DEFAULT_EXACT_CAP):
    """Empirical normalized-euclidean covering number of the pool."""
    return covering_number(matrix, eps, "l2", mode, exact_cap)
