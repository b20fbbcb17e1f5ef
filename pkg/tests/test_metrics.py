import numpy as np
import pytest

from bimine.metrics import LabeledRanking, auc, best_f1, f1_at

from oracles import pair_auc, sweep_best_f1


def test_auc_examples():
    assert auc([3, 2, 1], [1, 1, 0]) == 1.0
    assert auc([1, 1, 1, 1], [1, 0, 1, 0]) == 0.5
    assert auc([3, 2, 1], [1, 0, 1]) == pair_auc([3, 2, 1], [1, 0, 1]) == 0.5


def test_auc_single_class():
    with pytest.raises(ValueError):
        auc([1, 2], [1, 1])
    with pytest.raises(ValueError):
        auc([1, 2], [0, 0])


def test_best_f1_examples():
    assert best_f1([0.9, 0.8, 0.1], [1, 0, 1]) == pytest.approx(0.8)
    assert best_f1([3, 2, 1], [1, 1, 0]) == 1.0
    assert best_f1([0.2, 0.5], [1, 1]) == 1.0
    with pytest.raises(ValueError):
        best_f1([1, 2], [0, 0])


def test_label_validation():
    with pytest.raises(ValueError):
        LabeledRanking([1.0], [2])
    with pytest.raises(ValueError):
        LabeledRanking([1.0, 2.0], [1])


@pytest.mark.parametrize("seed", range(20))
def test_against_oracles(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    scores = rng.integers(0, 6, size=n).astype(float)  # plenty of ties
    labels = rng.integers(0, 2, size=n)
    labels[0], labels[1] = 0, 1
    assert auc(scores, labels) == pytest.approx(pair_auc(scores.tolist(), labels.tolist()))
    assert best_f1(scores, labels) == pytest.approx(sweep_best_f1(scores.tolist(), labels.tolist()))
    for th in np.unique(scores):
        assert best_f1(scores, labels) >= f1_at(scores, th, labels) - 1e-12
