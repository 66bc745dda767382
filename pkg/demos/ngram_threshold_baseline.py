"""
A term-list n-gram threshold as a baseline
==========================================

Chest X-ray reports reuse a small set of phrases ("two views", "lungs are
clear"). Trigrams built from positive reports and filtered by a term list
give each report a fraction of matching trigrams; one threshold on that
fraction separates the classes. A Welch t-test confirms the class means
differ.
"""

import numpy as np

from radclass import preprocess
from radclass.eval import welch_ttest
from radclass.ngram_baseline import classify, fit_baseline, load_terms

rng = np.random.default_rng(0)
CXR_PHRASES = ["chest two views", "lungs are clear", "no pleural effusion", "no pneumothorax",
               "cardiomediastinal silhouette is normal", "pa and lateral views of the chest",
               "heart size is normal", "no focal consolidation"]
OTHER_PHRASES = ["ct of the abdomen with contrast", "ct of the chest with contrast", "no pleural fluid", "mri of the lumbar spine", "no acute fracture",
                 "ultrasound of the right upper quadrant", "gallbladder is unremarkable",
                 "no intracranial hemorrhage", "dexa scan of the hip", "mild degenerative change"]
FILLER = ["comparison", "none", "history", "pain", "indication", "findings", "impression", "stable"]


def report(phrases, n_phrases):
    parts = list(rng.choice(phrases, n_phrases)) + list(rng.choice(FILLER, 3))
    rng.shuffle(parts)
    return ". ".join(parts) + "."


texts = [report(CXR_PHRASES, 4) for _ in range(120)] + [report(OTHER_PHRASES, 4) for _ in range(880)]
flags = [True] * 120 + [False] * 880
streams = [preprocess(t) for t in texts]
print(texts[0])

model = fit_baseline(streams, flags, load_terms(), order=3)
s = model.stats
print(f"{len(model.sets.trigrams)} CXR trigrams")
print(f"CXR fraction     mean {s.positive.mean:.4f}  std {s.positive.std:.4f}  n {s.positive.n}")
print(f"non-CXR fraction mean {s.negative.mean:.4f}  std {s.negative.std:.4f}  n {s.negative.n}")
print(f"gap midpoint {model.midpoint:.5f} -> threshold {model.threshold}")

t = welch_ttest(s.positive.mean, s.positive.std, s.positive.n, s.negative.mean, s.negative.std, s.negative.n)
print(f"Welch t = {t.t_statistic:.2f}, df = {t.degrees_of_freedom:.1f}, p = {t.p_value_two_tailed:.3g}")

hits = sum(classify(r, model) == f for r, f in zip(streams, flags))
print(f"training accuracy {hits / len(flags):.4f}")
