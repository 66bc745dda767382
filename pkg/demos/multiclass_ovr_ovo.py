"""
Twenty-one exam types, one-vs-rest against one-vs-one
=====================================================

Twenty named classes plus "other". OvR trains 21 members, OvO 210. Both
reach the same answers on separable data; OvR also gives usable per-class
scores for micro/macro ROC.
"""

import time

import numpy as np

from radclass import SplitSpec, TextClassifier, split, synthesize_corpus
from radclass.eval import confusion, format_metrics, micro_macro, multiclass_roc

corpus = synthesize_corpus(21, 50, vocab_per_class=40, overlap_fraction=0.3, seed=11)
train, test = split(corpus, SplitSpec("0.7", seed=2))
print(len(train), "train /", len(test), "test;", len(corpus.schema.classes), "classes")

models = {}
for strategy in ("ovr", "ovo"):
    t0 = time.perf_counter()
    models[strategy] = TextClassifier.fit(train, "logreg", "tfidf", strategy=strategy)
    print(f"{strategy}: {len(models[strategy].model.members)} members in {time.perf_counter() - t0:.2f}s")

preds = {s: m.predict(test.texts) for s, m in models.items()}
agree = np.mean([a == b for a, b in zip(preds["ovr"], preds["ovo"])])
print(f"OvR/OvO agreement on test documents: {agree:.3f}")

rep = micro_macro(confusion(test.label_list(), preds["ovr"], corpus.schema.classes))
print(format_metrics(rep).splitlines()[-4])   # the micro row
print(f"macro F1 {rep.macro_f1:.4f}")

# %%
# ROC from OvR log-odds; micro pools every (document, class) decision.
ovr = models["ovr"]
_, scores, _ = ovr.decision_scores(test.texts)
truth = np.array([ovr.classes.index(c) for c in test.label_list()])
micro, macro = multiclass_roc(scores, truth)
print(f"micro AUC {micro.auc:.4f}, macro AUC {macro.auc:.4f}")
