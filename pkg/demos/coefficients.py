"""
Which words drive the linear models
===================================

Largest and smallest coefficients of logistic regression and the linear
SVM for the positive class. On synthetic data the top words are the
class's exclusive pseudo-words and the bottom words belong to the
negative class.
"""

from radclass import TextClassifier, synthesize_corpus, to_binary
from radclass.preprocess import CleanConfig

corpus = to_binary(synthesize_corpus(2, [100, 900], 40, 0.3, seed=5, class_names=["CXR", "other"]), "CXR")

for family in ("logreg", "svm"):
    clf = TextClassifier.fit(corpus, family, "tfidf", clean_config=CleanConfig())
    top, bottom = clf.coefficients(9)
    print(f"{family}\n  highest: {', '.join(top)}\n  lowest:  {', '.join(bottom)}")

# %%
# Saving and loading replays cleaning, vocabulary and idf exactly.
clf.save("/tmp/cxr_svm.json")
same = TextClassifier.load("/tmp/cxr_svm.json").predict(corpus.texts) == clf.predict(corpus.texts)
print("round trip identical:", same)
