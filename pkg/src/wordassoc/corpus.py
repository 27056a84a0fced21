"""Tokenization, corpus reading, and the positional inverted index.

The index records, for every word, the sorted list of (doc_id, positions)
postings plus the aggregate counts that association measures consume:
total token count W, document count D, per-word token frequency f(w), and
per-word document frequency d(w).

Tokenization rule (fixed so results are reproducible): text is lowercased
and split into maximal runs of alphanumeric characters; everything else is
a separator. No stemming, no stop-word removal.
"""

from __future__ import annotations

import io
import json
import re
import struct
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import DataFormatError

INDEX_MAGIC = b"ASCX"
INDEX_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Split text into lowercase alphanumeric tokens (deterministic)."""
    return _TOKEN_RE.findall(text.lower())


class Vocabulary:
    """Bijective token-string <-> token-id map; ids assigned in first-seen order."""

    def __init__(self) -> None:
        self._id_by_token: dict[str, int] = {}
        self._tokens: list[str] = []

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._id_by_token

    def intern(self, token: str) -> int:
        tid = self._id_by_token.get(token)
        if tid is None:
            tid = len(self._tokens)
            self._id_by_token[token] = tid
            self._tokens.append(token)
        return tid

    def id_of(self, token: str) -> int | None:
        return self._id_by_token.get(token)

    def token_of(self, tid: int) -> str:
        return self._tokens[tid]

    @property
    def tokens(self) -> list[str]:
        return list(self._tokens)


class CorpusIndex:
    """Immutable positional index over a document collection.

    Attributes:
        vocab: the Vocabulary used to intern tokens.
        doc_lengths: token count per document, indexed by doc_id.
        postings: per token-id, list of (doc_id, positions) with doc_ids and
            positions strictly increasing.
        unigram_freq: f(w) per token-id (total occurrences).
        doc_freq: d(w) per token-id (documents containing the word).
    """

    def __init__(
        self,
        vocab: Vocabulary,
        doc_lengths: list[int],
        postings: list[list[tuple[int, list[int]]]],
    ) -> None:
        self.vocab = vocab
        self.doc_lengths = doc_lengths
        self.postings = postings
        self.unigram_freq = [sum(len(p) for _, p in plist) for plist in postings]
        self.doc_freq = [len(plist) for plist in postings]
        self.D = len(doc_lengths)
        self.W = sum(doc_lengths)

    # ------------------------------ queries ---------------------------------

    def totals(self) -> tuple[int, int]:
        """Return (W, D): total tokens and total documents."""
        return self.W, self.D

    def unigram_stats(self, word: str) -> tuple[int, int]:
        """Return (f(word), d(word)); (0, 0) for unknown words."""
        tid = self.vocab.id_of(word)
        if tid is None:
            return 0, 0
        return self.unigram_freq[tid], self.doc_freq[tid]

    def postings_for(self, word: str) -> list[tuple[int, list[int]]]:
        """Sorted (doc_id, positions) postings; empty for unknown words."""
        tid = self.vocab.id_of(word)
        if tid is None:
            return []
        return self.postings[tid]

    # --------------------------- serialization ------------------------------

    def save(self, path: str | Path) -> None:
        """Write the versioned binary index format (deterministic bytes)."""
        buf = io.BytesIO()
        buf.write(INDEX_MAGIC)
        buf.write(struct.pack("<I", INDEX_VERSION))
        _write_varint(buf, self.D)
        _write_varint(buf, self.W)
        _write_varint(buf, len(self.vocab))
        for token in self.vocab.tokens:
            raw = token.encode("utf-8")
            _write_varint(buf, len(raw))
            buf.write(raw)
        for length in self.doc_lengths:
            _write_varint(buf, length)
        for plist in self.postings:
            _write_varint(buf, len(plist))
            prev_doc = 0
            for i, (doc_id, positions) in enumerate(plist):
                _write_varint(buf, doc_id if i == 0 else doc_id - prev_doc)
                prev_doc = doc_id
                _write_varint(buf, len(positions))
                prev_pos = 0
                for j, pos in enumerate(positions):
                    _write_varint(buf, pos if j == 0 else pos - prev_pos)
                    prev_pos = pos
        Path(path).write_bytes(buf.getvalue())

    @classmethod
    def load(cls, path: str | Path) -> "CorpusIndex":
        data = Path(path).read_bytes()
        buf = io.BytesIO(data)
        magic = buf.read(4)
        if magic != INDEX_MAGIC:
            raise DataFormatError(f"{path}: bad magic {magic!r}, expected {INDEX_MAGIC!r}")
        raw_version = buf.read(4)
        if len(raw_version) < 4:
            raise DataFormatError(f"{path}: truncated header")
        (version,) = struct.unpack("<I", raw_version)
        if version != INDEX_VERSION:
            raise DataFormatError(f"{path}: unsupported index version {version}")
        try:
            d = _read_varint(buf)
            w = _read_varint(buf)
            vsize = _read_varint(buf)
            vocab = Vocabulary()
            for _ in range(vsize):
                nbytes = _read_varint(buf)
                raw = buf.read(nbytes)
                if len(raw) < nbytes:
                    raise DataFormatError("truncated vocabulary block")
                vocab.intern(raw.decode("utf-8"))
            doc_lengths = [_read_varint(buf) for _ in range(d)]
            postings: list[list[tuple[int, list[int]]]] = []
            for _ in range(vsize):
                ndocs = _read_varint(buf)
                plist: list[tuple[int, list[int]]] = []
                doc_id = 0
                for i in range(ndocs):
                    doc_id = _read_varint(buf) if i == 0 else doc_id + _read_varint(buf)
                    npos = _read_varint(buf)
                    positions: list[int] = []
                    pos = 0
                    for j in range(npos):
                        pos = _read_varint(buf) if j == 0 else pos + _read_varint(buf)
                        positions.append(pos)
                    plist.append((doc_id, positions))
                postings.append(plist)
        except DataFormatError as err:
            raise DataFormatError(f"{path}: {err}") from None
        index = cls(vocab, doc_lengths, postings)
        if index.W != w or index.D != d:
            raise DataFormatError(f"{path}: stored totals disagree with postings")
        return index

    def to_json_dict(self) -> dict:
        """Plain-dict export of the full index, for debugging."""
        return {
            "W": self.W,
            "D": self.D,
            "doc_lengths": list(self.doc_lengths),
            "vocabulary": self.vocab.tokens,
            "postings": {
                self.vocab.token_of(tid): [[doc_id, list(positions)] for doc_id, positions in plist]
                for tid, plist in enumerate(self.postings)
            },
        }

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )


def build_index(documents: Iterable[Sequence[str]]) -> CorpusIndex:
    """Build a CorpusIndex from a stream of token sequences.

    doc_ids are assigned by input order, so identical input yields a
    bit-identical index. Empty documents count toward D but contribute
    nothing else. I/O failures while iterating are reported with the
    ordinal of the offending document.
    """
    vocab = Vocabulary()
    doc_lengths: list[int] = []
    postings: list[list[tuple[int, list[int]]]] = []
    iterator = iter(documents)
    doc_id = 0
    while True:
        try:
            tokens = next(iterator)
        except StopIteration:
            break
        except (OSError, UnicodeDecodeError) as err:
            raise DataFormatError(f"failed reading document {doc_id}: {err}") from err
        doc_lengths.append(len(tokens))
        per_doc: dict[int, list[int]] = {}
        for pos, token in enumerate(tokens):
            tid = vocab.intern(token)
            if tid == len(postings):
                postings.append([])
            per_doc.setdefault(tid, []).append(pos)
        for tid, positions in per_doc.items():
            postings[tid].append((doc_id, positions))
        doc_id += 1
    return CorpusIndex(vocab, doc_lengths, postings)


# ------------------------------ corpus readers ------------------------------


def read_corpus_dir(path: str | Path) -> Iterator[list[str]]:
    """Yield one tokenized document per file, ordered by filename."""
    root = Path(path)
    if not root.is_dir():
        raise DataFormatError(f"{path}: not a directory")
    for entry in sorted(p for p in root.iterdir() if p.is_file()):
        yield tokenize(entry.read_text(encoding="utf-8"))


def read_corpus_blankline(path: str | Path) -> Iterator[list[str]]:
    """Yield tokenized documents from a single file, split on blank lines."""
    chunk: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                chunk.append(line)
            elif chunk:
                yield tokenize("".join(chunk))
                chunk = []
    if chunk:
        yield tokenize("".join(chunk))


def read_corpus(path: str | Path, fmt: str) -> Iterator[list[str]]:
    if fmt == "dir":
        return read_corpus_dir(path)
    if fmt == "blankline":
        return read_corpus_blankline(path)
    raise ValueError(f"unknown corpus format {fmt!r}")


# --------------------------------- varints ----------------------------------


def _write_varint(buf: io.BytesIO, value: int) -> None:
    if value < 0:
        raise ValueError("varints are unsigned")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.write(bytes((byte | 0x80,)))
        else:
            buf.write(bytes((byte,)))
            return


def _read_varint(buf: io.BytesIO) -> int:
    result = 0
    shift = 0
    while True:
        raw = buf.read(1)
        if not raw:
            raise DataFormatError("truncated varint")
        byte = raw[0]
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result
        shift += 7
