import numpy as np
import pytest

from radclass.corpus import SplitSpec, split
from radclass.eval import MetricSummary, format_cv, kfold_cv, stratified_folds
from radclass.pipeline import TextClassifier


def test_fold_sizes_binary_750():
    labels = ["CXR"] * 81 + ["non"] * 669
    folds = stratified_folds(labels, 10, seed=3)
    assert np.bincount(folds).tolist() == [75] * 10
    per_fold_pos = np.bincount(folds[:81], minlength=10)
    assert per_fold_pos.max() - per_fold_pos.min() <= 1


def test_folds_deterministic_and_unstratified():
    labels = list("aabbbcccc") * 3
    assert np.array_equal(stratified_folds(labels, 3, 1), stratified_folds(labels, 3, 1))
    f = stratified_folds(labels, 4, 1, stratified=False)
    sizes = np.bincount(f)
    assert sizes.max() - sizes.min() <= 1


def test_fold_errors():
    with pytest.raises(ValueError, match="exceeds"):
        stratified_folds(["a"] * 10 + ["b"] * 2, 5, 0)
    with pytest.raises(ValueError):
        stratified_folds(["a", "b"], 1, 0)


def test_interval_display():
    s = MetricSummary((0.9, 1.0), 0.96, 0.0714)
    assert s.display() == "0.96 ± 0.14"
    lo, hi = s.ci95
    assert hi > 1.0
    d = s.to_dict()
    assert d["ci95_display"][1] == 1.0


def test_summary_of_values():
    s = MetricSummary.of([0.8, 0.9, 1.0])
    assert s.mean == pytest.approx(0.9)
    assert s.std == pytest.approx(0.1)
    assert s.se_ci95[1] - s.mean == pytest.approx(1.96 * 0.1 / np.sqrt(3))


def test_kfold_end_to_end(binary_corpus):
    train, _ = split(binary_corpus, SplitSpec("0.75", seed=0))
    rep = kfold_cv(train, 10, lambda c: TextClassifier.fit(c, "logreg"), seed=4)
    assert rep.fold_sizes == (75,) * 10
    assert rep.average == "binary"
    assert rep.f1.mean >= 0.9
    table = format_cv({"Logistic Regression": rep})
    assert "Logistic Regression" in table and "±" in table
    assert "10-fold" in table
