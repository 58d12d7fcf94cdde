"""Loss matrices over finite hypothesis pools, and the peeling partition.

A LossMatrix holds per-example values for a pool of hypotheses (rows =
sample points, columns = pool members).  It is the substrate for covers,
dichotomy counts, Rademacher estimation, and peeling: column j lands in
shell k exactly when 2^k <= (sum_i values[i, j]) + 1 < 2^{k+1}.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .hypotheses import margins

__all__ = [
    "LossMatrix",
    "PeelingPartition",
    "peel",
    "shell_index",
    "count_dichotomies",
    "transform_matrix",
    "outputs_matrix",
]

RANGE_TAGS = ("binary", "unit-interval", "real")


@dataclass(frozen=True)
class LossMatrix:
    values: np.ndarray
    range_tag: str = "real"

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] < 1 or vals.shape[1] < 1:
            raise InputError("loss matrix must be 2-d with at least one row and column")
        if self.range_tag not in RANGE_TAGS:
            raise InputError(f"unknown range tag {self.range_tag!r}")
        if self.range_tag == "binary" and not np.all(np.isin(vals, (0.0, 1.0))):
            raise InputError("binary matrix has entries outside {0, 1}")
        if self.range_tag == "unit-interval" and (vals.min() < 0.0 or vals.max() > 1.0):
            raise InputError("unit-interval matrix has entries outside [0, 1]")
        if not np.all(np.isfinite(vals)):
            raise InputError("loss matrix entries must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def pool_size(self) -> int:
        return self.values.shape[1]

    def to_json(self) -> dict:
        return {
            "schema": "relmargin/loss-matrix/v1",
            "range_tag": self.range_tag,
            "values": self.values.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LossMatrix":
        return cls(np.asarray(data["values"], dtype=np.float64), data.get("range_tag", "real"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index"] + [f"c{j}" for j in range(self.pool_size)])
        for i in range(self.m):
            writer.writerow([i] + [repr(float(v)) for v in self.values[i]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, range_tag: str = "real") -> "LossMatrix":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if not header or header[0] != "index":
            raise InputError("loss matrix CSV must start with an 'index' header column")
        rows = [[float(v) for v in row[1:]] for row in reader if row]
        if not rows:
            raise InputError("loss matrix CSV has no data rows")
        return cls(np.asarray(rows, dtype=np.float64), range_tag)


def transform_matrix(pool, sample, transform) -> LossMatrix:
    """phi(y_i h_j(x_i)) over the pool; binary-tagged for step transforms."""
    cols = [transform(margins(h, sample)) for h in pool]
    tag = "binary" if transform.kind in ("step", "half-step") else "unit-interval"
    return LossMatrix(np.stack(cols, axis=1), tag)


def outputs_matrix(pool, points) -> LossMatrix:
    """Raw outputs h_j(x_i) over the pool (used for covers of the class itself)."""
    pts = np.asarray(points, dtype=np.float64)
    cols = [h.predict(pts) for h in pool]
    return LossMatrix(np.stack(cols, axis=1), "real")


def shell_index(column_sum: float) -> int:
    """The unique k with 2^k <= column_sum + 1 < 2^{k+1}."""
    return int(math.floor(math.log2(column_sum + 1.0)))


@dataclass(frozen=True)
class PeelingPartition:
    """Disjoint shells of pool columns keyed by their loss-magnitude scale k."""

    buckets: dict
    m: int

    def __post_init__(self):
        object.__setattr__(
            self,
            "buckets",
            {int(k): tuple(int(j) for j in cols) for k, cols in self.buckets.items()},
        )

    @property
    def max_k(self) -> int:
        return max(self.buckets) if self.buckets else 0

    def columns(self, k: int) -> tuple:
        return self.buckets.get(int(k), ())


def peel(matrix: LossMatrix) -> PeelingPartition:
    """Partition pool columns into shells by empirical loss magnitude."""
    vals = matrix.values
    if vals.min() < 0.0 or vals.max() > 1.0:
        raise InputError("peeling requires entries in [0, 1]")
    sums = vals.sum(axis=0)
    buckets: dict = {}
    for j, s in enumerate(sums):
        buckets.setdefault(shell_index(float(s)), []).append(j)
    return PeelingPartition(buckets=buckets, m=matrix.m)


def count_dichotomies(matrix: LossMatrix) -> int:
    """Number of distinct column vectors of a binary matrix."""
    if matrix.range_tag != "binary":
        raise InputError("dichotomy counting requires a binary matrix")
    return int(np.unique(matrix.values.T, axis=0).shape[0])
