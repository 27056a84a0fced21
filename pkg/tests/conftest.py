import random

import pytest

from wordassoc import build_index, tokenize


@pytest.fixture
def toy_index():
    """Small fixed corpus with hand-checkable counts.

    doc 0: the cat sat near the dog and the cat barked at a dog  (13 tokens)
    doc 1: a dog and a cat lived here                            (7 tokens)
    doc 2: nothing relevant here at all                          (5 tokens)
    """
    docs = [
        tokenize("The cat sat near the dog, and the cat barked at a dog."),
        tokenize("A dog and a cat lived here."),
        tokenize("Nothing relevant here at all."),
    ]
    return build_index(docs)


@pytest.fixture
def corpus_dir(tmp_path):
    """Write a three-file corpus directory and return its path."""
    root = tmp_path / "corpus"
    root.mkdir()
    (root / "a.txt").write_text(
        "The cat sat near the dog, and the cat barked at a dog.", encoding="utf-8"
    )
    (root / "b.txt").write_text("A dog and a cat lived here.", encoding="utf-8")
    (root / "c.txt").write_text("Nothing relevant here at all.", encoding="utf-8")
    return root


def random_documents(rng: random.Random, count: int, max_len: int = 12, alphabet: str = "abcd"):
    """Random token lists for property tests."""
    docs = []
    for _ in range(count):
        length = rng.randint(0, max_len)
        docs.append([rng.choice(alphabet) for _ in range(length)])
    return docs
