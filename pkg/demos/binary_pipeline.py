"""
Chest X-ray vs everything else
==============================

A binary modality classifier on a synthetic corpus where one report in ten
is positive. We split 75/25, train three model families on word counts,
score the held-out quarter and run 10-fold cross validation on the
training part.
"""

import numpy as np

from radclass import SplitSpec, TextClassifier, class_distribution, split, synthesize_corpus, to_binary
from radclass.eval import binary_metrics, confusion, format_cv, kfold_cv, roc_auc

corpus = synthesize_corpus(2, [100, 900], vocab_per_class=40, overlap_fraction=0.3, seed=5,
                           class_names=["CXR", "other"])
corpus = to_binary(corpus, "CXR")
print(len(corpus), "reports;", class_distribution(corpus))
print(corpus.reports[0].text[:80], "...")

train, test = split(corpus, SplitSpec("0.75", seed=1))
print("train", len(train), "test", len(test))

# %%
# Held-out scores. Logistic regression and trees carry probabilities, the
# SVM only a margin; either works as a ROC score.
for family in ("logreg", "svm", "tree"):
    clf = TextClassifier.fit(train, family, "count")
    cm = confusion(test.label_list(), clf.predict(test.texts), corpus.schema.classes)
    p, r, f = binary_metrics(cm, "CXR")
    auc = roc_auc(clf.positive_scores(test.texts), np.array(test.label_list()) == "CXR").auc
    print(f"{family:7s} P {p:.3f}  R {r:.3f}  F1 {f:.3f}  AUC {auc:.3f}")

# %%
# Cross validation: intervals are mean +/- 1.96 std over folds.
reports = {
    "Logistic Regression": kfold_cv(train, 10, lambda c: TextClassifier.fit(c, "logreg"), seed=3),
    "Linear SVM": kfold_cv(train, 10, lambda c: TextClassifier.fit(c, "svm"), seed=3),
    "Decision Tree": kfold_cv(train, 10, lambda c: TextClassifier.fit(c, "tree"), seed=3),
}
print(format_cv(reports))
