"""Hypothesis representations and margin evaluation.

Four evaluable predictor kinds are supported: linear functions with a
euclidean norm cap, convex-combination ensembles of decision stumps,
small feed-forward nets with per-row l1 caps, and explicit lookup tables
indexed by point id.  Norm constraints are enforced by projection at
construction so downstream formula code may assume them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "Hypothesis",
    "LinearHypothesis",
    "DecisionStump",
    "EnsembleHypothesis",
    "FFNNHypothesis",
    "TableHypothesis",
    "TruncatedHypothesis",
    "TruncationSpec",
    "truncate",
    "margin",
    "margins",
    "hypothesis_from_json",
]


def _vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError("expected a 1-d vector")
    return arr


def _as_batch(x, dim: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InputError(f"point dimension {arr.shape[-1]} does not match hypothesis dimension {dim}")
    return arr


class Hypothesis:
    """Common surface: ``predict`` on a batch of points, plus JSON round-trip."""

    kind: str = "abstract"

    def predict(self, x) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearHypothesis(Hypothesis):
    """x -> w . x with ||w||_2 projected to at most ``norm_cap``."""

    w: np.ndarray
    norm_cap: float = 1.0

    kind = "linear"

    def __post_init__(self):
        w = _vector(self.w)
        if not (self.norm_cap > 0):
            raise InputError("norm_cap must be positive")
        nrm = float(np.linalg.norm(w))
        if nrm > self.norm_cap:
            w = w * (self.norm_cap / nrm)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def predict(self, x) -> np.ndarray:
        return _as_batch(x, self.dim) @ self.w

    def to_json(self) -> dict:
        return {"kind": self.kind, "w": self.w.tolist(), "norm_cap": self.norm_cap}


@dataclass(frozen=True)
class DecisionStump(Hypothesis):
    """x -> polarity * sign(x[feature] - threshold), sign(0) taken as +1."""

    feature: int
    threshold: float
    polarity: int = 1

    kind = "stump"

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise InputError("stump polarity must be -1 or +1")
        if self.feature < 0:
            raise InputError("stump feature index must be nonnegative")

    def predict(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if self.feature >= arr.shape[1]:
            raise InputError("stump feature index out of range for these points")
        raw = arr[:, self.feature] - self.threshold
        return self.polarity * np.where(raw >= 0.0, 1.0, -1.0)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "feature": self.feature,
            "threshold": self.threshold,
            "polarity": self.polarity,
        }


@dataclass(frozen=True)
class EnsembleHypothesis(Hypothesis):
    """Convex combination of stumps: weights are clipped at zero and renormalized."""

    weights: np.ndarray
    stumps: tuple

    kind = "ensemble"

    def __post_init__(self):
        w = np.clip(_vector(self.weights), 0.0, None)
        if len(self.stumps) != w.shape[0]:
            raise InputError("ensemble needs one weight per base stump")
        total = float(w.sum())
        if total <= 0:
            raise InputError("ensemble weights must have positive sum")
        w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "stumps", tuple(self.stumps))

    def predict(self, x) -> np.ndarray:
        preds = np.stack([s.predict(x) for s in self.stumps], axis=1)
        return preds @ self.weights

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "weights": self.weights.tolist(),
            "stumps": [s.to_json() for s in self.stumps],
        }


def _project_rows_l1(mat: np.ndarray, cap: float) -> np.ndarray:
    norms = np.abs(mat).sum(axis=1)
    scale = np.where(norms > cap, cap / np.maximum(norms, 1e-300), 1.0)
    return mat * scale[:, None]


@dataclass(frozen=True)
class FFNNHypothesis(Hypothesis):
    """Small feed-forward net; every layer input is augmented with a constant 1.

    ``layers[i]`` has shape (units_i, prev_units + 1); each row's l1 norm is
    projected to at most ``row_cap``.  The activation is applied at every
    layer including the last, whose single unit provides the real-valued
    output.
    """

    layers: tuple
    activation: str = "tanh"
    row_cap: float = 10.0

    kind = "ffnn"

    def __post_init__(self):
        if self.activation not in ("tanh", "relu"):
            raise InputError("activation must be 'tanh' or 'relu'")
        if not (self.row_cap > 0):
            raise InputError("row_cap must be positive")
        mats = []
        prev = None
        for mat in self.layers:
            arr = np.asarray(mat, dtype=np.float64)
            if arr.ndim != 2:
                raise InputError("each layer must be a 2-d weight matrix")
            if prev is not None and arr.shape[1] != prev + 1:
                raise InputError("layer input width must equal previous units + 1 (bias)")
            arr = _project_rows_l1(arr, self.row_cap)
            arr.flags.writeable = False
            mats.append(arr)
            prev = arr.shape[0]
        if not mats:
            raise InputError("at least one layer is required")
        if mats[-1].shape[0] != 1:
            raise InputError("final layer must have a single output unit")
        object.__setattr__(self, "layers", tuple(mats))

    @property
    def dim(self) -> int:
        return self.layers[0].shape[1] - 1

    @property
    def depth(self) -> int:
        return len(self.layers)

    def _act(self, a: np.ndarray) -> np.ndarray:
        if self.activation == "tanh":
            return np.tanh(a)
        return np.maximum(a, 0.0)

    def predict(self, x) -> np.ndarray:
        a = _as_batch(x, self.dim)
        for mat in self.layers:
            a = np.hstack([a, np.ones((a.shape[0], 1))])
            a = self._act(a @ mat.T)
        return a[:, 0]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "layers": [m.tolist() for m in self.layers],
            "activation": self.activation,
            "row_cap": self.row_cap,
        }


@dataclass(frozen=True)
class TableHypothesis(Hypothesis):
    """Explicit finite table; points carry their index in coordinate 0."""

    values: dict = field(default_factory=dict)

    kind = "table"

    def __post_init__(self):
        object.__setattr__(
            self, "values", {int(k): float(v) for k, v in dict(self.values).items()}
        )

    def predict(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        out = np.empty(arr.shape[0])
        for i, idx in enumerate(arr[:, 0]):
            key = int(round(idx))
            if key not in self.values:
                raise InputError(f"table hypothesis queried at undefined index {key}")
            out[i] = self.values[key]
        return out

    def to_json(self) -> dict:
        return {"kind": self.kind, "values": {str(k): v for k, v in self.values.items()}}


@dataclass(frozen=True)
class TruncationSpec:
    """Output clamp to [-rho, +rho]; identity on that interval."""

    rho: float

    def __post_init__(self):
        if not (self.rho > 0):
            raise InputError("truncation requires rho > 0")

    def __call__(self, u):
        return np.clip(u, -self.rho, self.rho)


@dataclass(frozen=True)
class TruncatedHypothesis(Hypothesis):
    base: Hypothesis
    rho: float

    kind = "truncated"

    def predict(self, x) -> np.ndarray:
        return np.clip(self.base.predict(x), -self.rho, self.rho)

    def to_json(self) -> dict:
        return {"kind": self.kind, "rho": self.rho, "base": self.base.to_json()}


def truncate(h: Hypothesis, spec) -> TruncatedHypothesis:
    """Clamp a hypothesis's outputs to [-rho, rho].

    The clamp equals max(u, -rho) on u <= 0 and min(u, rho) on u >= 0, so it
    changes neither the binary loss 1[yh(x) <= 0] nor the margin loss
    1[yh(x) < rho].
    """
    if not isinstance(spec, TruncationSpec):
        spec = TruncationSpec(float(spec))
    return TruncatedHypothesis(base=h, rho=spec.rho)


def margin(h: Hypothesis, point, label) -> float:
    """Confidence margin y * h(x) for a single labeled point."""
    if label not in (-1, 1):
        raise InputError("label must be -1 or +1")
    return float(label * h.predict(np.asarray(point, dtype=np.float64))[0])


def margins(h: Hypothesis, sample) -> np.ndarray:
    """Vector of confidence margins y_i * h(x_i) over a sample."""
    return sample.labels * h.predict(sample.points)


_KINDS = {
    "linear": lambda d: LinearHypothesis(np.asarray(d["w"]), d.get("norm_cap", 1.0)),
    "stump": lambda d: DecisionStump(d["feature"], d["threshold"], d.get("polarity", 1)),
    "table": lambda d: TableHypothesis({int(k): v for k, v in d["values"].items()}),
}


def hypothesis_from_json(data: dict) -> Hypothesis:
    kind = data.get("kind")
    if kind == "ensemble":
        stumps = tuple(hypothesis_from_json(s) for s in data["stumps"])
        return EnsembleHypothesis(np.asarray(data["weights"]), stumps)
    if kind == "ffnn":
        return FFNNHypothesis(
            tuple(np.asarray(m) for m in data["layers"]),
            data.get("activation", "tanh"),
            data.get("row_cap", 10.0),
        )
    if kind == "truncated":
        return TruncatedHypothesis(hypothesis_from_json(data["base"]), data["rho"])
    if kind in _KINDS:
        return _KINDS[kind](data)
    raise InputError(f"unknown hypothesis kind {kind!r}")
