"""Desk-scale trainers producing norm-capped hypotheses.

All trainers are deterministic given (sample, config, seed), take explicit
step counts (non-convergence is not an error), and return hypotheses whose
class constraints hold by construction.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import InputError
from .hypotheses import DecisionStump, EnsembleHypothesis, FFNNHypothesis, LinearHypothesis
from .rng import substream
from .samples import LabeledSample

__all__ = [
    "train",
    "train_hinge_linear",
    "train_boost_stumps",
    "train_tiny_mlp",
    "train_bound_min",
    "ramp_objective",
]


def _signed_points(sample: LabeledSample) -> np.ndarray:
    return sample.labels[:, None] * sample.points


def train_hinge_linear(
    sample: LabeledSample, steps: int = 2000, seed: int = 0, step0: float = 1.0
) -> LinearHypothesis:
    """Projected subgradient descent on the mean hinge loss, ||w|| <= 1."""
    signed = _signed_points(sample)
    m, n = signed.shape
    rng = substream(seed, "hinge-init")
    w = rng.standard_normal(n)
    w /= max(np.linalg.norm(w), 1e-12)
    best_w = w.copy()
    best_err = float(np.mean(signed @ w <= 0.0))
    for t in range(1, int(steps) + 1):
        margins = signed @ w
        active = margins < 1.0
        grad = -signed[active].sum(axis=0) / m
        w = w - (step0 / np.sqrt(t)) * grad
        nrm = np.linalg.norm(w)
        if nrm > 1.0:
            w = w / nrm
        err = float(np.mean(signed @ w <= 0.0))
        if err < best_err:
            best_err = err
            best_w = w.copy()
    return LinearHypothesis(best_w)


def _best_stump(points: np.ndarray, labels: np.ndarray, weights: np.ndarray):
    """Minimum weighted-error stump over all features, thresholds, polarities."""
    m, n = points.shape
    total = float(weights.sum())
    best = (None, np.inf)
    for f in range(n):
        order = np.argsort(points[:, f], kind="stable")
        v = points[order, f]
        wy_pos = np.where(labels[order] > 0, weights[order], 0.0)
        wy_neg = np.where(labels[order] < 0, weights[order], 0.0)
        # threshold below all points, then between consecutive distinct values
        cuts = [v[0] - 1.0]
        cuts.extend((v[i] + v[i + 1]) / 2.0 for i in range(m - 1) if v[i] < v[i + 1])
        pos_below = np.concatenate([[0.0], np.cumsum(wy_pos)])
        neg_below = np.concatenate([[0.0], np.cumsum(wy_neg)])
        idx = 0
        for t in cuts:
            while idx < m and v[idx] < t:
                idx += 1
            # polarity +1 predicts +1 on x >= t: errors are negatives above + positives below
            err_plus = (neg_below[m] - neg_below[idx]) + pos_below[idx]
            for polarity, err in ((1, err_plus), (-1, total - err_plus)):
                if err < best[1]:
                    best = (DecisionStump(f, float(t), polarity), float(err))
    return best


def train_boost_stumps(sample: LabeledSample, rounds: int, seed: int = 0) -> EnsembleHypothesis:
    """AdaBoost over decision stumps; the returned ensemble's weights are the
    round coefficients renormalized to sum to one."""
    if rounds < 1:
        raise InputError("boosting needs at least one round")
    x, y = sample.points, sample.labels
    m = sample.m
    weights = np.full(m, 1.0 / m)
    stumps = []
    alphas = []
    for _ in range(int(rounds)):
        stump, err = _best_stump(x, y, weights)
        err = min(max(err, 1e-12), 1.0 - 1e-12)
        if err >= 0.5:
            break
        alpha = 0.5 * np.log((1.0 - err) / err)
        stumps.append(stump)
        alphas.append(alpha)
        weights = weights * np.exp(-alpha * y * stump.predict(x))
        weights /= weights.sum()
    if not stumps:
        stump, _ = _best_stump(x, y, np.full(m, 1.0 / m))
        stumps, alphas = [stump], [1.0]
    return EnsembleHypothesis(np.asarray(alphas), tuple(stumps))


def train_tiny_mlp(
    sample: LabeledSample,
    width: int = 4,
    steps: int = 10000,
    seed: int = 0,
    lr: float = 0.5,
    row_cap: float = 100.0,
) -> FFNNHypothesis:
    """Two-layer tanh net on the logistic loss with hand-derived gradients.

    Forward pass matches FFNNHypothesis: inputs are bias-augmented at every
    layer and the activation is applied at every layer including the last.
    """
    x, y = sample.points, sample.labels
    m, n = x.shape
    rng = substream(seed, "mlp-init")
    w1 = rng.standard_normal((width, n + 1))
    w2 = rng.standard_normal((1, width + 1))
    xb = np.hstack([x, np.ones((m, 1))])
    for _ in range(int(steps)):
        z1 = xb @ w1.T
        a1 = np.tanh(z1)
        a1b = np.hstack([a1, np.ones((m, 1))])
        v = a1b @ w2.T
        f = np.tanh(v)[:, 0]
        # logistic loss: dL/df = -y * sigmoid(-y f)
        df = -y / (1.0 + np.exp(y * f))
        dv = (df * (1.0 - f**2))[:, None] / m
        g2 = dv.T @ a1b
        da1 = dv @ w2[:, :width]
        dz1 = da1 * (1.0 - a1**2)
        g1 = dz1.T @ xb
        w2 -= lr * g2
        w1 -= lr * g1
    return FFNNHypothesis((w1, w2), activation="tanh", row_cap=row_cap)


def ramp_objective(sample: LabeledSample, w, rho: float, lam: float) -> float:
    """Ramp margin loss plus the lambda/rho-scaled square root of itself."""
    return kernels.ramp_objective(_signed_points(sample), w, rho, lam)


def train_bound_min(
    sample: LabeledSample,
    lam: float,
    rho_grid,
    restarts: int = 4,
    seed: int = 0,
    steps: int = 1500,
    step0: float = 1.0,
    warm_start: bool = True,
):
    """Minimize the margin-loss-plus-deviation objective over ||w|| <= 1 and a
    margin grid.

    For each grid rho, projected subgradient descent runs from ``restarts``
    initializations (the first is a hinge-trained warm start when
    ``warm_start`` is set, the rest are random unit vectors) with the fixed
    1/sqrt(t) step schedule.  Returns the best (hypothesis, rho) pair and a
    record of initial/final objectives per restart.
    """
    grid = [float(r) for r in rho_grid]
    if not grid:
        raise InputError("rho grid must be nonempty")
    if not (lam >= 0):
        raise InputError("lambda must be nonnegative")
    if restarts < 1:
        raise InputError("need at least one restart")
    signed = _signed_points(sample)
    n = signed.shape[1]
    warm = train_hinge_linear(sample, steps=min(steps, 800), seed=seed).w if warm_start else None
    best = None
    record = []
    for ri, rho in enumerate(grid):
        for s in range(int(restarts)):
            if s == 0 and warm is not None:
                w0 = warm.copy()
            else:
                rng = substream(seed, "restart", ri, s)
                w0 = rng.standard_normal(n)
                w0 /= max(np.linalg.norm(w0), 1e-12)
            init_obj = ramp_objective(sample, w0, rho, lam)
            w_best, obj_best = kernels.ramp_descent(signed, w0, rho, lam, steps, step0)
            record.append(
                {"rho": rho, "restart": s, "initial_objective": init_obj, "objective": obj_best}
            )
            if best is None or obj_best < best[0]:
                best = (obj_best, w_best, rho)
    objective, w, rho = best
    info = {
        "objective": objective,
        "rho": rho,
        "restarts": record,
        "norm": float(np.linalg.norm(w)),
    }
    return LinearHypothesis(w), rho, info


_METHODS = {
    "hinge-subgradient-linear": lambda s, cfg: train_hinge_linear(
        s, steps=cfg.get("steps", 2000), seed=cfg.get("seed", 0), step0=cfg.get("step0", 1.0)
    ),
    "boost-stumps": lambda s, cfg: train_boost_stumps(
        s, rounds=cfg.get("rounds", 10), seed=cfg.get("seed", 0)
    ),
    "tiny-mlp": lambda s, cfg: train_tiny_mlp(
        s,
        width=cfg.get("width", 4),
        steps=cfg.get("steps", 10000),
        seed=cfg.get("seed", 0),
        lr=cfg.get("lr", 0.5),
    ),
}


def train(method: str, sample: LabeledSample, config: dict | None = None):
    """Dispatch to a trainer by method name."""
    cfg = dict(config or {})
    if method not in _METHODS:
        raise InputError(f"unknown training method {method!r}; choose from {sorted(_METHODS)}")
    return _METHODS[method](sample, cfg)
