"""Sparse document-term matrices with count and TFIDF weighting."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .preprocess import Vocabulary


@dataclass(frozen=True)
class DocTermMatrix:
    """CSR matrix of documents x vocabulary plus its weighting tag.

    ``n_oov`` counts tokens dropped because they were not in the vocabulary.
    """

    matrix: sp.csr_matrix
    weighting: str = "count"
    n_oov: int = 0

    def __post_init__(self):
        if self.weighting not in ("count", "tfidf"):
            raise ValueError(f"unknown weighting {self.weighting!r}")

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_features(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def row(self, d: int) -> list[tuple[int, float]]:
        m = self.matrix
        lo, hi = m.indptr[d], m.indptr[d + 1]
        return [(int(i), v.item()) for i, v in zip(m.indices[lo:hi], m.data[lo:hi])]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def count_vectorize(streams: Iterable[Sequence[str]], vocab: Vocabulary) -> DocTermMatrix:
    """Term counts per document; out-of-vocabulary tokens are dropped and tallied."""
    if vocab.size == 0:
        raise ValueError("empty vocabulary")
    lookup = vocab.token_to_index
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    n_oov = 0
    for tokens in streams:
        row: dict[int, int] = {}
        for t in tokens:
            j = lookup.get(t)
            if j is None:
                n_oov += 1
            else:
                row[j] = row.get(j, 0) + 1
        for j in sorted(row):
            indices.append(j)
            data.append(row[j])
        indptr.append(len(indices))
    m = sp.csr_matrix(
        (np.asarray(data, dtype=np.int32), np.asarray(indices, dtype=np.int32),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, vocab.size),
    )
    return DocTermMatrix(m, "count", n_oov)


@dataclass(frozen=True)
class TfidfModel:
    idf: np.ndarray
    document_count: int

    @property
    def n_features(self) -> int:
        return self.idf.shape[0]


def fit_tfidf(counts: DocTermMatrix) -> TfidfModel:
    """Smoothed idf: ``ln((1 + N) / (1 + df)) + 1``."""
    if counts.weighting != "count":
        raise ValueError("fit_tfidf expects a count-weighted matrix")
    n = counts.n_docs
    if n < 1:
        raise ValueError("need at least one document")
    m = counts.matrix
    df = np.bincount(m.indices[m.data != 0], minlength=m.shape[1]).astype(np.float64)
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return TfidfModel(idf, n)


def apply_tfidf(model: TfidfModel, counts: DocTermMatrix) -> DocTermMatrix:
    """Scale counts by idf and L2-normalize every nonzero row."""
    if counts.weighting != "count":
        raise ValueError("apply_tfidf expects a count-weighted matrix")
    if counts.n_features != model.n_features:
        raise ValueError(f"feature dimension {counts.n_features} != tfidf model {model.n_features}")
    m = counts.matrix
    data = m.data.astype(np.float64) * model.idf[m.indices]
    row_nnz = np.diff(m.indptr)
    sq = sp.csr_matrix((data * data, m.indices, m.indptr), shape=m.shape).sum(axis=1)
    norms = np.sqrt(np.asarray(sq).ravel())
    scale = np.repeat(np.where(norms > 0, norms, 1.0), row_nnz)
    out = sp.csr_matrix((data / scale, m.indices.copy(), m.indptr.copy()), shape=m.shape)
    return DocTermMatrix(out, "tfidf", counts.n_oov)


def write_coordinates(matrix: DocTermMatrix, path) -> None:
    """Coordinate text export, one ``doc feature value`` triple per line."""
    coo = matrix.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"# {matrix.n_docs} {matrix.n_features} {matrix.weighting}\n")
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k].item()!r}\n")


def read_coordinates(path) -> DocTermMatrix:
    with Path(path).open(encoding="utf-8") as fh:
        n_docs, n_features, weighting = fh.readline()[1:].split()
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    dtype = np.int32 if weighting == "count" else np.float64
    m = sp.csr_matrix((np.asarray(vals, dtype=dtype), (rows, cols)),
                      shape=(int(n_docs), int(n_features)))
    return DocTermMatrix(m, weighting)


def as_csr(X) -> sp.csr_matrix:
    """Accept a DocTermMatrix, sparse matrix or dense array as CSR float64."""
    if isinstance(X, DocTermMatrix):
        X = X.matrix
    if sp.issparse(X):
        return sp.csr_matrix(X, dtype=np.float64)
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    return sp.csr_matrix(arr)
