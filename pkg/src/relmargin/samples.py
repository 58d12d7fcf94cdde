"""Labeled samples and the synthetic distributions that generate them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import CapabilityError, InputError
from .hypotheses import LinearHypothesis
from .rng import substream

__all__ = [
    "LabeledSample",
    "TwoGaussianMixture",
    "MarginSeparable",
    "make_distribution",
    "generate",
]


@dataclass(frozen=True)
class LabeledSample:
    """m feature vectors with labels in {-1, +1} and generation provenance."""

    points: np.ndarray
    labels: np.ndarray
    seed: int = 0
    generator_id: str = "unspecified"

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        labs = np.ascontiguousarray(self.labels, dtype=np.float64)
        if pts.ndim != 2 or labs.ndim != 1 or pts.shape[0] != labs.shape[0]:
            raise InputError("points and labels must have matching length")
        if pts.shape[0] < 1:
            raise InputError("a sample needs at least one point")
        if not np.all(np.isin(labs, (-1.0, 1.0))):
            raise InputError("labels must be -1 or +1")
        pts.flags.writeable = False
        labs.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labs)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_json(self) -> dict:
        return {
            "schema": "relmargin/sample/v1",
            "points": self.points.tolist(),
            "labels": self.labels.astype(int).tolist(),
            "seed": self.seed,
            "generator_id": self.generator_id,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LabeledSample":
        return cls(
            points=np.asarray(data["points"], dtype=np.float64),
            labels=np.asarray(data["labels"], dtype=np.float64),
            seed=int(data.get("seed", 0)),
            generator_id=str(data.get("generator_id", "unspecified")),
        )


def _clip_to_ball(x: np.ndarray, radius: float) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    scale = np.where(norms > radius, radius / np.maximum(norms, 1e-300), 1.0)
    return x * scale[:, None]


@dataclass(frozen=True)
class TwoGaussianMixture:
    """y uniform in {-1, +1}; x ~ N(y * separation * e1, sigma^2 I), clipped to the radius.

    The default radius keeps the clipping probability below ~exp(-32), so the
    closed-form risk for linear hypotheses (which ignores clipping) agrees
    with Monte-Carlo estimates far inside their standard errors.
    """

    dim: int = 2
    separation: float = 1.0
    sigma: float = 1.0
    radius: float | None = None

    kind = "two-gaussian-mixture"
    analytic_risk_available = True

    def __post_init__(self):
        if self.dim < 1 or self.sigma <= 0 or self.separation < 0:
            raise InputError("two-gaussian mixture needs dim >= 1, sigma > 0, separation >= 0")
        if self.radius is None:
            object.__setattr__(
                self,
                "radius",
                float(self.separation + self.sigma * (np.sqrt(self.dim) + 8.0)),
            )

    @property
    def generator_id(self) -> str:
        return (
            f"{self.kind}(dim={self.dim},separation={self.separation},"
            f"sigma={self.sigma},radius={self.radius})"
        )

    def sample(self, m: int, rng: np.random.Generator):
        y = rng.integers(0, 2, size=m) * 2.0 - 1.0
        x = rng.standard_normal((m, self.dim)) * self.sigma
        x[:, 0] += y * self.separation
        return _clip_to_ball(x, self.radius), y

    def analytic_risk(self, h: LinearHypothesis) -> float:
        """P(y * w.x <= 0); the margin w.x is N(w1 * separation, sigma^2 ||w||^2)."""
        w = np.asarray(h.w, dtype=np.float64)
        if w.shape[0] != self.dim:
            raise InputError("hypothesis dimension does not match distribution")
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 1.0  # margin identically zero; ties count as errors
        return float(norm.cdf(-(w[0] * self.separation) / (self.sigma * nrm)))


@dataclass(frozen=True)
class MarginSeparable:
    """Points drawn from N(0, sigma^2 I) conditioned on |x1| >= gap, labeled by
    sign(x1), with labels flipped independently at ``noise_rate``."""

    dim: int = 2
    gap: float = 0.3
    noise_rate: float = 0.0
    sigma: float = 1.0
    radius: float | None = None

    kind = "margin-separable-with-noise"
    analytic_risk_available = False

    def __post_init__(self):
        if not (0 <= self.noise_rate <= 1):
            raise InputError("noise_rate must lie in [0, 1]")
        if self.gap < 0 or self.sigma <= 0 or self.dim < 1:
            raise InputError("margin-separable needs gap >= 0, sigma > 0, dim >= 1")
        if self.radius is None:
            object.__setattr__(
                self, "radius", float(self.sigma * (np.sqrt(self.dim) + 8.0) + self.gap)
            )
        if self.radius <= self.gap:
            raise InputError("radius must exceed the gap or no point can be accepted")

    @property
    def generator_id(self) -> str:
        return (
            f"{self.kind}(dim={self.dim},gap={self.gap},noise={self.noise_rate},"
            f"sigma={self.sigma},radius={self.radius})"
        )

    @property
    def planted(self) -> LinearHypothesis:
        w = np.zeros(self.dim)
        w[0] = 1.0
        return LinearHypothesis(w)

    def sample(self, m: int, rng: np.random.Generator):
        rows = []
        got = 0
        while got < m:
            batch = rng.standard_normal((max(2 * (m - got), 16), self.dim)) * self.sigma
            # clip before the acceptance test so the planted margin survives
            batch = _clip_to_ball(batch, self.radius)
            keep = np.abs(batch[:, 0]) >= self.gap
            batch = batch[keep]
            rows.append(batch)
            got += batch.shape[0]
        x = np.concatenate(rows, axis=0)[:m]
        y = np.where(x[:, 0] >= 0, 1.0, -1.0)
        if self.noise_rate > 0:
            flips = rng.random(m) < self.noise_rate
            y = np.where(flips, -y, y)
        return x, y


_DIST_KINDS = {
    TwoGaussianMixture.kind: TwoGaussianMixture,
    MarginSeparable.kind: MarginSeparable,
}


def make_distribution(spec: dict):
    """Build a distribution from a config mapping with a ``kind`` tag."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _DIST_KINDS:
        raise InputError(f"unknown distribution kind {kind!r}")
    try:
        return _DIST_KINDS[kind](**spec)
    except TypeError as exc:
        raise InputError(f"bad parameters for {kind}: {exc}") from exc


def generate(dist, m: int, seed: int) -> LabeledSample:
    """Draw m i.i.d. labeled points; reproducible per (distribution, m, seed)."""
    if m < 1:
        raise InputError("m must be at least 1")
    rng = substream(seed, "sample")
    x, y = dist.sample(int(m), rng)
    return LabeledSample(points=x, labels=y, seed=int(seed), generator_id=dist.generator_id)


def analytic_risk(h, dist) -> float:
    """Closed-form zero-one risk; only linear hypotheses on analytic distributions."""
    if not getattr(dist, "analytic_risk_available", False):
        raise CapabilityError("distribution has no closed-form risk")
    if not isinstance(h, LinearHypothesis):
        raise CapabilityError("closed-form risk is derived for linear hypotheses only")
    return dist.analytic_risk(h)
