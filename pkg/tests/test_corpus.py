from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from radclass.corpus import (CorpusError, LabeledCorpus, LabelSchema, Report, SplitSpec, class_distribution,
                             corpus_stats, load_corpus, load_text_dir, split, synthesize_corpus, to_binary,
                             write_manifest)
from radclass.preprocess import preprocess

BINARY = LabelSchema.binary("CXR", "nonCXR")


def test_load_three_line_manifest(jsonl):
    path = jsonl([{"id": "a", "text": "chest", "label": "CXR"},
                  {"id": "b", "text": "ct abdomen", "label": "nonCXR"},
                  {"id": "c", "text": "two views", "label": "CXR"}])
    c = load_corpus(path, BINARY)
    assert len(c) == 3
    assert c.class_counts() == {"CXR": 2, "nonCXR": 1}


def test_unknown_label_names_offending_id(jsonl):
    path = jsonl([{"id": "a", "text": "x", "label": "CXR"}, {"id": "foot7", "text": "y", "label": "MRIfoot"}])
    with pytest.raises(CorpusError, match="foot7") as exc:
        load_corpus(path, BINARY)
    assert ":2:" in str(exc.value)


def test_duplicate_id_and_malformed_line(jsonl, tmp_path):
    path = jsonl([{"id": "a", "text": "x"}, {"id": "a", "text": "y"}])
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(path, BINARY)
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "text": "x"}\n{not json\n')
    with pytest.raises(CorpusError, match=":2:"):
        load_corpus(bad, BINARY)
    missing = jsonl([{"id": "a"}], name="missing.jsonl")
    with pytest.raises(CorpusError, match=":1:"):
        load_corpus(missing, BINARY)


def test_unlabeled_records_allowed(jsonl):
    c = load_corpus(jsonl([{"id": "a", "text": "x", "label": "CXR"}, {"id": "b", "text": "y"}]), BINARY)
    assert c.unlabeled_count == 1
    assert class_distribution(c) == {"CXR": 1.0, "nonCXR": 0.0}
    with pytest.raises(CorpusError, match="unlabeled"):
        split(c, SplitSpec("0.5"))


def test_synthetic_manifest_exact_prevalence(tmp_path):
    c = to_binary(synthesize_corpus(2, [100, 900], 20, 0.0, 3, class_names=["CXR", "other"]), "CXR")
    write_manifest(c, tmp_path / "m.jsonl")
    loaded = load_corpus(tmp_path / "m.jsonl", c.schema)
    assert class_distribution(loaded)["CXR"] == 0.10


def test_text_dir_ingest(tmp_path):
    d = tmp_path / "reports"
    d.mkdir()
    (d / "r1.txt").write_text("Chest two views.")
    (d / "r2.txt").write_text("CT head.")
    (tmp_path / "labels.csv").write_text("id,label\nr1,CXR\nr2,nonCXR\n")
    c = load_text_dir(d, BINARY, tmp_path / "labels.csv")
    assert c.ids == ["r1", "r2"]
    assert dict(c.labels) == {"r1": "CXR", "r2": "nonCXR"}


def test_schema_invariants():
    with pytest.raises(CorpusError):
        LabelSchema("binary", ("a", "b", "c"), "a")
    with pytest.raises(CorpusError):
        LabelSchema("multiclass", ("a", "b"))
    with pytest.raises(CorpusError):
        LabelSchema("multiclass", ("a", "a", "other"))
    assert LabelSchema.multiclass(["a", "b"]).classes == ("a", "b", "other")


class TestClassDistribution:
    def test_balanced(self):
        reports = tuple(Report(str(i), "") for i in range(4))
        c = LabeledCorpus(reports, dict(zip("0123", "AABB")), LabelSchema.multiclass(["A", "B"]))
        assert class_distribution(c) == {"A": 0.5, "B": 0.5, "other": 0.0}

    def test_training_set_cxr_fraction(self):
        # 81 CXR among 750 training reports
        reports = tuple(Report(str(i), "") for i in range(750))
        labels = {str(i): "CXR" if i < 81 else "nonCXR" for i in range(750)}
        d = class_distribution(LabeledCorpus(reports, labels, BINARY))
        assert d["CXR"] == pytest.approx(0.108, abs=1e-12)

    def test_single_class(self):
        c = LabeledCorpus((Report("x", ""),), {"x": "C"}, LabelSchema.multiclass(["C"]))
        assert class_distribution(c)["C"] == 1.0

    def test_empty(self):
        with pytest.raises(CorpusError):
            class_distribution(LabeledCorpus((), {}, BINARY))

    def test_stats_json_shape(self, binary_corpus):
        s = corpus_stats(binary_corpus)
        assert set(s) == {"per_class_counts", "fractions", "unlabeled_count"}
        assert sum(s["fractions"].values()) == pytest.approx(1.0, abs=1e-12)


class TestToBinary:
    def test_counts_conserved(self, multiclass_corpus):
        b = to_binary(multiclass_corpus, "class03")
        assert b.schema.classes == ("class03", "non-class03")
        counts = b.class_counts()
        assert counts["class03"] == 50
        assert counts["non-class03"] == len(multiclass_corpus) - 50

    def test_idempotent(self, multiclass_corpus):
        b = to_binary(multiclass_corpus, "class03")
        assert to_binary(b, "class03") == b

    def test_absent_positive_warns(self):
        c = LabeledCorpus((Report("a", ""),), {"a": "x"}, LabelSchema.multiclass(["x", "y"]))
        with pytest.warns(UserWarning, match="absent"):
            b = to_binary(c, "y")
        assert b.class_counts() == {"y": 0, "non-y": 1}

    def test_unknown_positive(self, multiclass_corpus):
        with pytest.raises(CorpusError):
            to_binary(multiclass_corpus, "MRIfoot")


class TestSplit:
    def test_binary_750_250(self, binary_corpus):
        train, test = split(binary_corpus, SplitSpec("0.75", seed=1))
        assert (len(train), len(test)) == (750, 250)
        assert class_distribution(train)["CXR"] == pytest.approx(0.10, abs=0.002)
        assert class_distribution(test)["CXR"] == pytest.approx(0.10, abs=0.004)

    def test_70_30(self):
        c = synthesize_corpus(21, [47] * 20 + [60], 10, 0.0, 2)
        assert len(c) == 1000
        train, test = split(c, SplitSpec(Fraction(7, 10), seed=5))
        assert abs(len(train) - 700) <= 1 and len(train) + len(test) == 1000

    def test_deterministic(self, multiclass_corpus):
        a = split(multiclass_corpus, SplitSpec("0.7", seed=9))
        b = split(multiclass_corpus, SplitSpec("0.7", seed=9))
        assert [x.ids for x in a] == [x.ids for x in b]
        assert split(multiclass_corpus, SplitSpec("0.7", seed=10))[0].ids != a[0].ids

    def test_class_with_one_member_rejected(self):
        reports = tuple(Report(str(i), "") for i in range(3))
        c = LabeledCorpus(reports, {"0": "A", "1": "A", "2": "B"}, LabelSchema.multiclass(["A", "B"]))
        with pytest.raises(CorpusError, match="B"):
            split(c, SplitSpec("0.5"))
        train, test = split(c, SplitSpec("0.5", stratified=False))
        assert len(train) == 2 and len(test) == 1

    @settings(max_examples=60, deadline=None)
    @given(sizes=st.lists(st.integers(2, 30), min_size=2, max_size=6),
           frac=st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20)),
           seed=st.integers(0, 2 ** 32))
    def test_partition_properties(self, sizes, frac, seed):
        if not 0 < frac < 1:
            return
        reports, labels = [], {}
        for c, n in enumerate(sizes):
            for j in range(n):
                rid = f"{c}-{j}"
                reports.append(Report(rid, ""))
                labels[rid] = f"c{c}"
        corpus = LabeledCorpus(tuple(reports), labels, LabelSchema.multiclass([f"c{c}" for c in range(len(sizes))]))
        train, test = split(corpus, SplitSpec(frac, seed))
        assert set(train.ids).isdisjoint(test.ids)
        assert set(train.ids) | set(test.ids) == set(corpus.ids)
        assert len(train) > 0 and len(test) > 0
        tc = train.class_counts()
        for c, n in enumerate(sizes):
            assert abs(tc[f"c{c}"] - float(frac) * n) <= 1


class TestSynthesize:
    def test_counts(self):
        c = synthesize_corpus(21, 50, 40, 0.3, 11)
        assert len(c) == 1050
        assert len(c.schema.classes) == 21
        assert set(c.class_counts().values()) == {50}

    def test_exclusive_token_separates(self):
        c = synthesize_corpus(2, 50, 30, 0.0, 7, class_names=["pos", "neg"])
        streams = {r.id: set(preprocess(r.text)) for r in c.reports}
        pos_vocab = set().union(*(streams[i] for i in c.ids if c.labels[i] == "pos"))
        neg_vocab = set().union(*(streams[i] for i in c.ids if c.labels[i] == "neg"))
        assert pos_vocab.isdisjoint(neg_vocab)
        # a depth-1 rule on a present exclusive token: docs holding it are all positive
        token = Counter(t for i in c.ids if c.labels[i] == "pos" for t in streams[i]).most_common(1)[0][0]
        assert all(c.labels[i] == "pos" for i in c.ids if token in streams[i])
        assert len(c) == 100

    def test_deterministic(self):
        assert synthesize_corpus(3, 5, 10, 0.5, 1) == synthesize_corpus(3, 5, 10, 0.5, 1)
        assert synthesize_corpus(3, 5, 10, 0.5, 1) != synthesize_corpus(3, 5, 10, 0.5, 2)

    @pytest.mark.parametrize("args", [(1, 5, 5, 0.0), (2, 0, 5, 0.0), (2, 5, 5, 1.0), (2, 5, 0, 0.0)])
    def test_invalid(self, args):
        with pytest.raises(CorpusError):
            synthesize_corpus(*args, seed=0)
