import json
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from smudge.corpus import (
    Dataset,
    Document,
    SplitSpec,
    build_synthetic,
    content_hash,
    ingest_newsgroups,
    load_dataset,
    save_dataset,
    split_train_test,
    subsample,
    summarize,
)

from conftest import make_corpus


def _write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


class TestLoad:
    def test_label_set_in_first_occurrence_order(self, tmp_path):
        path = tmp_path / "d.jsonl"
        _write_jsonl(
            path,
            [
                {"id": "1", "text": "x", "label": "a"},
                {"id": "2", "text": "y", "label": "a"},
                {"id": "3", "text": "z", "label": "b"},
            ],
        )
        d = load_dataset(path)
        assert len(d) == 3
        assert d.label_set == ("a", "b")
        assert all(doc.provenance == frozenset({"original"}) for doc in d)

    def test_missing_label_names_the_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        _write_jsonl(path, [{"id": "1", "text": "x", "label": "a"}, {"id": "2", "text": "y"}])
        with pytest.raises(ValueError, match="line 2.*label"):
            load_dataset(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        _write_jsonl(
            path,
            [{"id": "1", "text": "x", "label": "a"}, {"id": "1", "text": "y", "label": "b"}],
        )
        with pytest.raises(ValueError, match="duplicate"):
            load_dataset(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValueError, match="no records"):
            load_dataset(path)

    def test_empty_text_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        _write_jsonl(path, [{"id": "1", "text": "", "label": "a"}])
        with pytest.raises(ValueError, match="line 1.*empty"):
            load_dataset(path)

    def test_ids_default_to_record_index(self, tmp_path):
        path = tmp_path / "d.jsonl"
        _write_jsonl(path, [{"text": "x", "label": "a"}, {"text": "y", "label": "a"}])
        assert load_dataset(path).ids() == ["0", "1"]

    def test_delimited_with_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,text,label\nr1,hello there,a\nr2,more text,b\n", encoding="utf-8")
        d = load_dataset(path, "delimited")
        assert d.ids() == ["r1", "r2"]
        assert d.label_set == ("a", "b")

    def test_delimited_missing_column(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("id,body\n1,abc\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header lacks"):
            load_dataset(path, "delimited")

    def test_identical_loads_identical_order(self, tmp_path):
        path = tmp_path / "d.jsonl"
        _write_jsonl(path, [{"id": str(i), "text": f"t{i}", "label": "a"} for i in range(20)])
        assert load_dataset(path).ids() == load_dataset(path).ids()

    def test_save_load_round_trip_with_provenance(self, tmp_path):
        docs = (
            Document("a", "some text", "x"),
            Document("b", "other words", "y", frozenset({"original", "truncated"})),
            Document("b::replica", "other words", "x", frozenset({"replica", "label_flipped"})),
        )
        d = Dataset(docs, name="rt")
        path = tmp_path / "rt.jsonl"
        save_dataset(d, path)
        loaded = load_dataset(path, name="rt")
        assert loaded.documents == d.documents
        assert content_hash(loaded) == content_hash(d)

    def test_fully_truncated_documents_round_trip(self, tmp_path):
        # truncation at p=1 empties the text; the flag makes that loadable
        d = Dataset((Document("a", "", "x", frozenset({"original", "truncated"})),), name="rt")
        path = tmp_path / "rt.jsonl"
        save_dataset(d, path)
        assert load_dataset(path).documents == d.documents


class TestDatasetInvariants:
    def test_original_xor_replica(self):
        with pytest.raises(ValueError, match="original.*replica"):
            Dataset((Document("a", "t", "x", frozenset({"original", "replica"})),))

    def test_empty_text_requires_truncation_flag(self):
        with pytest.raises(ValueError, match="empty text"):
            Dataset((Document("a", "", "x"),))
        # fine once the truncation flag is present
        Dataset((Document("a", "", "x", frozenset({"original", "truncated"})),))

    def test_declared_label_set_must_match_usage(self):
        docs = (Document("a", "t", "x"),)
        with pytest.raises(ValueError, match="label_set"):
            Dataset(docs, label_set=("x", "unused"))


class TestSplit:
    def test_sizes_and_disjointness(self):
        d = make_corpus(100, 2, seed=3)
        train, test = split_train_test(d, SplitSpec(test_fraction=0.3, seed=1))
        assert len(train) == 70 and len(test) == 30
        assert set(train.ids()).isdisjoint(test.ids())
        assert set(train.ids()) | set(test.ids()) == set(d.ids())

    def test_stratified_counts(self):
        d = make_corpus(40, 4, seed=3)  # 10 docs per label
        _, test = split_train_test(d, SplitSpec(test_fraction=0.3, seed=1))
        assert all(count == 3 for count in Counter(doc.label for doc in test).values())

    def test_same_seed_same_membership(self):
        d = make_corpus(100, 3, seed=4)
        spec = SplitSpec(test_fraction=0.3, seed=9)
        first = split_train_test(d, spec)
        second = split_train_test(d, spec)
        assert first[1].ids() == second[1].ids()
        assert first[0].ids() == second[0].ids()

    def test_single_doc_label_rejected_when_stratified(self):
        docs = (Document("a", "t", "x"), Document("b", "u", "x"), Document("c", "v", "y"))
        with pytest.raises(ValueError, match="'y'"):
            split_train_test(Dataset(docs), SplitSpec(test_fraction=0.3, seed=1))

    def test_unstratified_mode(self):
        d = make_corpus(100, 2, seed=3)
        train, test = split_train_test(d, SplitSpec(test_fraction=0.3, seed=1, stratified=False))
        assert len(test) == 30
        assert set(train.ids()).isdisjoint(test.ids())

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(8, 60), frac=st.sampled_from([0.2, 0.3, 0.5]), seed=st.integers(0, 5))
    def test_partition_property(self, n, frac, seed):
        d = make_corpus(n * 2, 2, seed=17)
        train, test = split_train_test(d, SplitSpec(test_fraction=frac, seed=seed))
        assert len(train) + len(test) == len(d)
        assert set(train.ids()).isdisjoint(test.ids())


class TestSynthetic:
    def test_labels_are_source_names(self):
        sources = [(f"src{i}", make_corpus(6, 2, seed=i)) for i in range(5)]
        d = build_synthetic(sources)
        assert d.label_set == tuple(f"src{i}" for i in range(5))
        assert len(d) == 30

    def test_sizes_add_up(self):
        a = make_corpus(3, 3, seed=1)
        b = make_corpus(4, 2, seed=2)
        assert len(build_synthetic([("a", a), ("b", b)])) == 7

    def test_duplicate_ids_across_sources_are_prefixed(self):
        a = make_corpus(4, 2, seed=1)
        d = build_synthetic([("left", a), ("right", a)])
        assert len(d) == 8
        assert sorted(d.ids())[:2] == ["left/d0", "left/d1"]

    def test_fewer_than_two_sources_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_synthetic([("only", make_corpus(4, 2, seed=1))])

    def test_duplicate_source_names_rejected(self):
        a = make_corpus(4, 2, seed=1)
        with pytest.raises(ValueError, match="distinct"):
            build_synthetic([("s", a), ("s", a)])


class TestSubsample:
    def test_identity_when_n_is_full_size(self):
        d = make_corpus(50, 2, seed=5)
        assert subsample(d, 50, seed=1) is d

    def test_label_proportions_preserved(self):
        d = make_corpus(1000, 2, seed=5)  # 500/500
        sample = subsample(d, 100, seed=1)
        assert Counter(doc.label for doc in sample) == {"L0": 50, "L1": 50}

    def test_deterministic(self):
        d = make_corpus(300, 3, seed=5)
        assert subsample(d, 60, seed=2).ids() == subsample(d, 60, seed=2).ids()
        assert subsample(d, 60, seed=2).ids() != subsample(d, 60, seed=3).ids()

    def test_oversized_request_rejected(self):
        d = make_corpus(10, 2, seed=5)
        with pytest.raises(ValueError, match="cannot sample"):
            subsample(d, 11, seed=1)

    def test_exact_size_with_awkward_proportions(self):
        d = make_corpus(31, 3, seed=5)  # 11/10/10
        assert len(subsample(d, 10, seed=1)) == 10


class TestNewsgroupsLayout:
    def test_directory_ingestion(self, tmp_path):
        for group, n in (("alt.one", 3), ("rec.two", 2)):
            gdir = tmp_path / group
            gdir.mkdir()
            for i in range(n):
                (gdir / f"{10000 + i}").write_text(f"Message body {group} {i}", encoding="utf-8")
        d = ingest_newsgroups(tmp_path)
        assert len(d) == 5
        assert d.label_set == ("alt.one", "rec.two")
        assert d.ids()[0] == "alt.one/10000"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ValueError, match="not a directory"):
            ingest_newsgroups(tmp_path / "nope")


def test_summarize_reports_counts_and_median():
    docs = (
        Document("a", "one two three", "x"),
        Document("b", "one two", "x"),
        Document("c", "one two three four five", "y"),
    )
    summary = summarize(Dataset(docs, name="s"))
    assert summary["documents"] == 3
    assert summary["labels"] == 2
    assert summary["label_histogram"] == {"x": 2, "y": 1}
    assert summary["median_tokens"] == 3
