"""Whitespace vocabulary with reserved special tokens."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

from littlebird.exceptions import ArtifactIOError, InputError
from littlebird.model import PAD_TOKEN_ID

PAD, CLS, SEP, MASK, QUESTION = "[PAD]", "[CLS]", "[SEP]", "[MASK]", "[QUESTION]"
SPECIAL_TOKENS = (PAD, CLS, SEP, MASK, QUESTION)
PAD_ID, CLS_ID, SEP_ID, MASK_ID, QUESTION_ID = range(PAD_TOKEN_ID, PAD_TOKEN_ID + len(SPECIAL_TOKENS))
SENTENCE_ENDERS = (".", "?", "!")
VOCAB_FILE = "vocab.txt"


class Vocabulary:
    """
    Token <-> id mapping.

    Special tokens occupy ids 0-4 in the order [PAD], [CLS], [SEP], [MASK],
    [QUESTION]; the sentence enders follow, then words in first-seen order.
    """

    def __init__(self, words: Iterable[str] = ()) -> None:
        self._tokens: list[str] = []
        self._ids: dict[str, int] = {}
        for token in (*SPECIAL_TOKENS, *SENTENCE_ENDERS, *words):
            self.add(token)

    @classmethod
    def load(cls, path: Path) -> Vocabulary:
        """
        Read a vocabulary written by `save`, one token per line in id order.

        Raises:
            ArtifactIOError: If the file cannot be read or does not start with
                the reserved tokens.
        """
        try:
            tokens = path.read_text(encoding="utf-8").splitlines()
        except (OSError, UnicodeDecodeError) as exc:
            raise ArtifactIOError(f"Cannot read vocabulary: {exc}", path=str(path)) from exc
        reserved = len(SPECIAL_TOKENS) + len(SENTENCE_ENDERS)
        if tuple(tokens[:reserved]) != (*SPECIAL_TOKENS, *SENTENCE_ENDERS):
            raise ArtifactIOError("Vocabulary does not start with the reserved tokens", path=str(path))
        if len(set(tokens)) != len(tokens):
            raise ArtifactIOError("Vocabulary lists a token twice", path=str(path))
        return cls(tokens[reserved:])

    @classmethod
    def from_documents(cls, documents: Iterable[str]) -> Vocabulary:
        vocab = cls()
        for document in documents:
            for word in document.split():
                vocab.add(word)
        return vocab

    def add(self, token: str) -> int:
        if token not in self._ids:
            self._ids[token] = len(self._tokens)
            self._tokens.append(token)
        return self._ids[token]

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._ids

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise InputError(f"Unknown token {token!r}") from None

    def token_of(self, token_id: int) -> str:
        if not 0 <= token_id < len(self._tokens):
            raise InputError(f"Unknown token id {token_id}")
        return self._tokens[token_id]

    def encode(self, text: str) -> list[int]:
        """Whitespace-split `text` into ids; every word must be known."""
        return [self.id_of(word) for word in text.split()]

    def decode(self, ids: Sequence[int]) -> str:
        return " ".join(self.token_of(int(i)) for i in ids)

    def save(self, path: Path) -> Path:
        """Write one token per line in id order."""
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n".join(self._tokens) + "\n", encoding="utf-8")
        except OSError as exc:
            raise ArtifactIOError(f"Cannot write vocabulary: {exc}", path=str(path)) from exc
        return path

    def covers(self, text: str) -> bool:
        return all(word in self._ids for word in text.split())

    @property
    def ender_ids(self) -> frozenset[int]:
        return frozenset(self._ids[e] for e in SENTENCE_ENDERS)

    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset(range(len(SPECIAL_TOKENS)))
