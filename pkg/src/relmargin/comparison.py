"""Tightness comparison between the loss-factored bound shape and the
classical square-root shape.

New form:  emp + 2 sqrt(emp * beta) + beta
Old form:  c' * sqrt(beta')

With emp = 0, beta = beta' <= 1 and c' = 1 the new form wins everywhere
(beta <= sqrt(beta)); the old form can win when the empirical term
dominates.  The old-form constant c' is unspecified in the literature and
defaults to 1, the value most favorable to the old form.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .bounds import BoundParams
from .errors import InputError
from .fatdim import FatDimParams, cover_log_bound_from_fat, fat_dim_formula

__all__ = ["tightness_row", "compare_tightness_direct", "compare_tightness", "crossover_check"]


def tightness_row(emp: float, beta: float, beta_prime: float | None = None, c_prime: float = 1.0) -> dict:
    if beta < 0 or emp < 0:
        raise InputError("emp and beta must be nonnegative")
    bp = beta if beta_prime is None else beta_prime
    new_bound = emp + 2.0 * math.sqrt(emp * beta) + beta
    old_bound = c_prime * math.sqrt(bp)
    return {
        "emp": emp,
        "beta": beta,
        "beta_prime": bp,
        "new_bound": new_bound,
        "old_bound": old_bound,
        "new_smaller": bool(new_bound < old_bound),
    }


def compare_tightness_direct(emp_grid, beta_grid, c_prime: float = 1.0) -> dict:
    """Tabulate both forms on explicit (emp, beta) grids with beta' = beta."""
    rows = [
        tightness_row(float(e), float(b), c_prime=c_prime)
        for e in emp_grid
        for b in beta_grid
    ]
    return {
        "mode": "direct",
        "c_prime": c_prime,
        "rows": rows,
        "new_wins": int(sum(r["new_smaller"] for r in rows)),
        "total": len(rows),
    }


def compare_tightness(
    class_params: FatDimParams,
    m_grid,
    rho_grid,
    emp_grid,
    delta: float = 0.05,
    c_prime: float = 1.0,
) -> dict:
    """Tabulate both forms over (m, rho, emp), with beta the fat-shattering
    cover term (1 + d log2(2 c^2 m) log2(2 c e m / d) + log(1/delta)) / m and
    beta' = beta."""
    rows = []
    for m in m_grid:
        for rho in rho_grid:
            params = replace(class_params, rho=float(rho))
            d = max(1.0, fat_dim_formula(params))
            BoundParams(m=int(m), delta=delta, rho=float(rho))  # validates m, delta
            beta = (cover_log_bound_from_fat(d, int(m)) + math.log(1.0 / delta)) / int(m)
            for emp in emp_grid:
                row = tightness_row(float(emp), beta, c_prime=c_prime)
                row.update({"m": int(m), "rho": float(rho), "fat_dimension": d})
                rows.append(row)
    return {
        "mode": "class",
        "class_kind": class_params.kind,
        "delta": delta,
        "c_prime": c_prime,
        "rows": rows,
        "new_wins": int(sum(r["new_smaller"] for r in rows)),
        "total": len(rows),
    }


def crossover_check(rows) -> bool:
    """Re-derive every row's winner from the closed forms; True when the
    table is exactly reproducible."""
    for r in rows:
        new = r["emp"] + 2.0 * math.sqrt(r["emp"] * r["beta"]) + r["beta"]
        old = r["old_bound"]
        if not np.isclose(new, r["new_bound"], rtol=0, atol=0):
            return False
        if r["new_smaller"] != (new < old):
            return False
    return True
