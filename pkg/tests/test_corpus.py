import json
import random

import pytest

from wordassoc import CorpusIndex, DataFormatError, build_index, read_corpus, tokenize
from wordassoc.corpus import read_corpus_blankline, read_corpus_dir

from conftest import random_documents


class TestTokenize:
    def test_case_fold_and_punctuation(self):
        assert tokenize("The cat, the CAT!") == ["the", "cat", "the", "cat"]

    def test_empty(self):
        assert tokenize("") == []

    def test_alnum_runs(self):
        assert tokenize("x2 y-z") == ["x2", "y", "z"]

    def test_underscore_is_a_separator(self):
        # Underscore is not alphanumeric; it must split tokens.
        assert tokenize("a_b") == ["a", "b"]

    def test_unicode_letters_kept(self):
        assert tokenize("Café naïve") == ["café", "naïve"]

    def test_deterministic(self):
        text = "Some; text! with 42 numbers?"
        assert tokenize(text) == tokenize(text)


class TestBuildIndex:
    def test_two_doc_counts(self):
        index = build_index([["a", "b", "a"], ["b", "c"]])
        assert index.totals() == (5, 2)
        assert index.unigram_stats("a") == (2, 1)
        assert index.unigram_stats("b") == (2, 2)
        assert index.unigram_stats("c") == (1, 1)

    def test_empty_stream(self):
        index = build_index([])
        assert index.totals() == (0, 0)
        assert index.postings == []

    def test_repeated_token_positions(self):
        index = build_index([["a", "a", "a"]])
        assert index.unigram_stats("a") == (3, 1)
        assert index.postings_for("a") == [(0, [0, 1, 2])]

    def test_unknown_word(self):
        index = build_index([["a"]])
        assert index.unigram_stats("zzz") == (0, 0)
        assert index.postings_for("zzz") == []

    def test_empty_documents_count_toward_d(self):
        index = build_index([[], ["a"], []])
        assert index.totals() == (1, 3)

    def test_io_failure_names_document_ordinal(self):
        def stream():
            yield ["a", "b"]
            raise OSError("disk gone")

        with pytest.raises(DataFormatError, match="document 1"):
            build_index(stream())

    def test_invariants_on_random_corpora(self):
        rng = random.Random(7)
        for _ in range(50):
            docs = random_documents(rng, rng.randint(0, 8))
            index = build_index(docs)
            w, d = index.totals()
            assert d == len(docs)
            assert w == sum(len(doc) for doc in docs)
            assert sum(index.unigram_freq) == w
            for tid, plist in enumerate(index.postings):
                assert 1 <= index.doc_freq[tid] <= min(index.unigram_freq[tid], d)
                for doc_id, positions in plist:
                    assert positions == sorted(set(positions))
                    assert all(p < index.doc_lengths[doc_id] for p in positions)

    def test_positions_roundtrip_documents(self):
        rng = random.Random(11)
        docs = random_documents(rng, 20)
        index = build_index(docs)
        for doc_id, doc in enumerate(docs):
            rebuilt = [None] * len(doc)
            for tid, plist in enumerate(index.postings):
                for did, positions in plist:
                    if did == doc_id:
                        for pos in positions:
                            rebuilt[pos] = index.vocab.token_of(tid)
            assert rebuilt == doc


class TestSerialization:
    def test_roundtrip(self, tmp_path, toy_index):
        path = tmp_path / "idx.bin"
        toy_index.save(path)
        loaded = CorpusIndex.load(path)
        assert loaded.totals() == toy_index.totals()
        assert loaded.vocab.tokens == toy_index.vocab.tokens
        assert loaded.doc_lengths == toy_index.doc_lengths
        assert loaded.postings == toy_index.postings

    def test_rebuild_is_byte_identical(self, tmp_path):
        rng = random.Random(3)
        docs = random_documents(rng, 10)
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        build_index(docs).save(a)
        build_index(docs).save(b)
        assert a.read_bytes() == b.read_bytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(DataFormatError, match="magic"):
            CorpusIndex.load(path)

    def test_bad_version(self, tmp_path, toy_index):
        path = tmp_path / "idx.bin"
        toy_index.save(path)
        data = bytearray(path.read_bytes())
        data[4] = 99
        path.write_bytes(bytes(data))
        with pytest.raises(DataFormatError, match="version"):
            CorpusIndex.load(path)

    def test_truncated(self, tmp_path, toy_index):
        path = tmp_path / "idx.bin"
        toy_index.save(path)
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(DataFormatError):
            CorpusIndex.load(path)

    def test_json_export(self, tmp_path, toy_index):
        path = tmp_path / "idx.json"
        toy_index.save_json(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["W"] == toy_index.W
        assert data["D"] == toy_index.D
        assert len(data["vocabulary"]) == len(toy_index.vocab)


class TestCorpusReaders:
    def test_dir_reader_orders_by_filename(self, tmp_path):
        root = tmp_path / "c"
        root.mkdir()
        (root / "b.txt").write_text("second doc", encoding="utf-8")
        (root / "a.txt").write_text("first doc", encoding="utf-8")
        docs = list(read_corpus_dir(root))
        assert docs == [["first", "doc"], ["second", "doc"]]

    def test_dir_reader_rejects_file(self, tmp_path):
        target = tmp_path / "f.txt"
        target.write_text("x", encoding="utf-8")
        with pytest.raises(DataFormatError, match="not a directory"):
            list(read_corpus_dir(target))

    def test_blankline_reader(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("one two\nthree\n\n\nfour five\n", encoding="utf-8")
        docs = list(read_corpus_blankline(path))
        assert docs == [["one", "two", "three"], ["four", "five"]]

    def test_read_corpus_dispatch(self, corpus_dir):
        docs = list(read_corpus(corpus_dir, "dir"))
        assert len(docs) == 3
        with pytest.raises(ValueError, match="format"):
            read_corpus(corpus_dir, "parquet")
