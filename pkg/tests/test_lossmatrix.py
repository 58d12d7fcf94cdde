import json

import numpy as np
import pytest

from relmargin import (
    InputError,
    LabeledSample,
    LossMatrix,
    TableHypothesis,
    count_dichotomies,
    peel,
    step,
    transform_matrix,
)
from relmargin.lossmatrix import shell_index


def test_range_tag_validation():
    with pytest.raises(InputError):
        LossMatrix(np.array([[0.5]]), "binary")
    with pytest.raises(InputError):
        LossMatrix(np.array([[1.5]]), "unit-interval")
    with pytest.raises(InputError):
        LossMatrix(np.array([[np.nan]]), "real")


def test_shell_index_examples():
    # m = 8: sum 3 -> k=2, sum 0 -> k=0, sum 8 -> k=3
    assert shell_index(3) == 2
    assert shell_index(0) == 0
    assert shell_index(8) == 3


def test_peel_partition_invariants():
    rng = np.random.default_rng(0)
    for _ in range(25):
        m = int(rng.integers(1, 30))
        p = int(rng.integers(1, 12))
        mat = LossMatrix(rng.random((m, p)), "unit-interval")
        part = peel(mat)
        seen = []
        for k, cols in part.buckets.items():
            for j in cols:
                s = mat.values[:, j].sum()
                assert 2**k <= s + 1 < 2 ** (k + 1)
            seen.extend(cols)
        assert sorted(seen) == list(range(p))


def test_peel_rejects_out_of_range():
    with pytest.raises(InputError):
        peel(LossMatrix(np.array([[1.5]]), "real"))


def test_count_dichotomies_examples():
    ident = LossMatrix(np.tile(np.array([[1.0], [0.0]]), (1, 5)), "binary")
    assert count_dichotomies(ident) == 1
    # thresholds 1_{x <= t} over 3 distinct points: enumerate threshold pool
    points = np.array([1.0, 2.0, 3.0])
    thresholds = [0.5, 1.5, 2.5, 3.5, 1.7, 2.9]  # includes redundant behaviors
    cols = np.stack([(points <= t).astype(float) for t in thresholds], axis=1)
    expected = len({tuple(col) for col in cols.T})
    assert expected == 4
    assert count_dichotomies(LossMatrix(cols, "binary")) == 4
    full = LossMatrix(np.array([[b >> i & 1 for b in range(8)] for i in range(3)], dtype=float), "binary")
    assert count_dichotomies(full) == 8


def test_count_dichotomies_column_permutation_invariant():
    rng = np.random.default_rng(5)
    vals = rng.integers(0, 2, size=(6, 9)).astype(float)
    mat = LossMatrix(vals, "binary")
    perm = LossMatrix(vals[:, rng.permutation(9)], "binary")
    assert count_dichotomies(mat) == count_dichotomies(perm)
    assert count_dichotomies(mat) <= min(2**6, 9)


def test_count_dichotomies_requires_binary():
    with pytest.raises(InputError):
        count_dichotomies(LossMatrix(np.array([[0.5]]), "unit-interval"))


def test_transform_matrix_tags_and_values():
    sample = LabeledSample(points=np.arange(3, dtype=float)[:, None], labels=np.ones(3))
    pool = [TableHypothesis({0: 0.9, 1: 0.1, 2: 0.4}), TableHypothesis({0: -1.0, 1: 1.0, 2: 0.0})]
    mat = transform_matrix(pool, sample, step(0.5))
    assert mat.range_tag == "binary"
    assert mat.values[:, 0] == pytest.approx([0.0, 1.0, 1.0])
    assert mat.values[:, 1] == pytest.approx([1.0, 0.0, 1.0])


def test_csv_and_json_round_trip():
    vals = np.array([[0.125, 1.0], [0.5, 0.25]])
    mat = LossMatrix(vals, "unit-interval")
    text = mat.to_csv()
    assert text.splitlines()[0] == "index,c0,c1"
    back = LossMatrix.from_csv(text, "unit-interval")
    assert np.array_equal(back.values, vals)
    back2 = LossMatrix.from_json(json.loads(json.dumps(mat.to_json())))
    assert np.array_equal(back2.values, vals)
    assert back2.range_tag == "unit-interval"
