"""Radiology report classification: preprocessing, features, classifiers,
an n-gram threshold baseline, and evaluation."""

from .corpus import (LabeledCorpus, LabelSchema, Report, SplitSpec, class_distribution, load_corpus,
                     split, synthesize_corpus, to_binary)
from .features import DocTermMatrix, TfidfModel, apply_tfidf, count_vectorize, fit_tfidf
from .pipeline import TextClassifier
from .preprocess import CleanConfig, Vocabulary, build_vocabulary, clean_text, preprocess, tokenize

__version__ = "0.1.0"

__all__ = [
    "CleanConfig", "DocTermMatrix", "LabelSchema", "LabeledCorpus", "Report", "SplitSpec", "TextClassifier",
    "TfidfModel", "Vocabulary", "apply_tfidf", "build_vocabulary", "class_distribution", "clean_text",
    "count_vectorize", "fit_tfidf", "load_corpus", "preprocess", "split", "synthesize_corpus", "to_binary",
    "tokenize",
]
