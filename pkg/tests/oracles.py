"""Independent brute-force oracles used to freeze expected values.

Everything here enumerates or derives directly from definitions, without
touching the package's own computation paths.
"""

from itertools import combinations, product
import math


def brute_rademacher(columns) -> float:
    """E over all 2^m sign vectors of max-column correlation, divided by m.

    ``columns`` is a list of per-hypothesis value lists, each of length m.
    """
    m = len(columns[0])
    total = 0.0
    for signs in product((-1.0, 1.0), repeat=m):
        total += max(sum(s * v for s, v in zip(signs, col)) for col in columns)
    return total / (2**m) / m


def brute_min_cover(dist_rows, eps: float) -> int:
    """Exhaustive minimum internal cover: try all center subsets by size."""
    p = len(dist_rows)
    cover_sets = [
        {i for i in range(p) if dist_rows[j][i] <= eps} for j in range(p)
    ]
    everything = set(range(p))
    for size in range(1, p + 1):
        for centers in combinations(range(p), size):
            covered = set()
            for j in centers:
                covered |= cover_sets[j]
            if covered == everything:
                return size
    return p


def brute_peeling_value(matrices) -> float:
    """Peeling complexity for a fixed outer sample set, everything enumerated."""
    m = len(matrices[0])
    n_shells = int(math.floor(math.log2(m + 1))) + 1
    per_trial = []
    for mat in matrices:  # mat: list of rows, each of length pool
        pool = len(mat[0])
        colsums = [sum(mat[i][j] for i in range(m)) for j in range(pool)]
        exps = [0.0] * n_shells
        for k in range(n_shells):
            cols = [
                [mat[i][j] for i in range(m)]
                for j in range(pool)
                if 2**k <= colsums[j] + 1 < 2 ** (k + 1)
            ]
            if cols:
                r = brute_rademacher(cols)
                exps[k] = m * m * r * r / 2 ** (k + 5)
        per_trial.append(exps)
    n = len(per_trial)
    best = -math.inf
    for k in range(n_shells):
        mean_exp = sum(math.exp(row[k]) for row in per_trial) / n
        best = max(best, math.log(mean_exp))
    return best


def packing_lower_bound(dist_rows, eps: float) -> int:
    """Greedy count of columns pairwise farther than 2*eps (covers need >= this)."""
    chosen = []
    for j in range(len(dist_rows)):
        if all(dist_rows[j][i] > 2 * eps for i in chosen):
            chosen.append(j)
    return len(chosen)
