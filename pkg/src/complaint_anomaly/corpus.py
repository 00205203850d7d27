"""Narrative cleaning and tokenisation."""

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from .ingest import DOLLAR_PATTERN

PUNCTUATION_TOKENS = frozenset({"!", "?"})
NEGATIONS = frozenset({"not", "no", "never", "nor", "cannot"})

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")
_GRATITUDE = re.compile(r"^[^\w]*(thanks\b|thank\s+you\b)", re.IGNORECASE)
_APOSTROPHES = re.compile(r"['’‘`]")
_NON_TOKEN = re.compile(r"[^\w\s!?]|_")
_MARKS = re.compile(r"([!?])")
_REDACTION = re.compile(r"^x{2,}$")


@dataclass(frozen=True)
class CleanedNarrative:
    id: str
    tokens: tuple

    @property
    def word_count(self):
        return word_count_ti(self)

    @property
    def text(self):
        return " ".join(self.tokens)


def load_word_list(path):
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def _bundled_words(name):
    text = resources.files(__package__).joinpath(f"data/{name}").read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def default_stop_words():
    words = _bundled_words("stopwords.txt")
    # negations carry sentiment and must survive cleaning
    return words - NEGATIONS


def default_frequent_words():
    return _bundled_words("frequent_words.txt")


def drop_gratitude_sentences(text):
    sentences = _SENTENCE_BREAK.split(text.strip())
    return " ".join(s for s in sentences if not _GRATITUDE.match(s))


def tokenize(text):
    """Lowercase, drop dollar amounts and punctuation, split marks into tokens."""
    text = text.lower()
    text = DOLLAR_PATTERN.sub(" ", text)
    text = _APOSTROPHES.sub("", text)
    text = _NON_TOKEN.sub(" ", text)
    text = _MARKS.sub(r" \1 ", text)
    return text.split()


def clean(raw_narrative, stop_words=None, frequent_words=None, id=""):
    """Clean one narrative.

    Sentences opening with "thanks" or "thank you" are removed first, using the
    original punctuation for sentence boundaries. The rest is lowercased,
    stripped of dollar amounts and of punctuation other than "!" and "?", and
    filtered against the stop-word list, the frequent-word list and redaction
    masks such as ``XXXX``.
    """
    stop_words = default_stop_words() if stop_words is None else stop_words
    frequent_words = default_frequent_words() if frequent_words is None else frequent_words
    kept = [
        tok
        for tok in tokenize(drop_gratitude_sentences(raw_narrative))
        if tok not in stop_words
        and tok not in frequent_words
        and not _REDACTION.match(tok)
    ]
    return CleanedNarrative(id=id, tokens=tuple(kept))


def is_word(token):
    return token not in PUNCTUATION_TOKENS


def word_count_ti(c, count_punctuation=False):
    """Number of word tokens; "!" and "?" only count when asked to."""
    if count_punctuation:
        return len(c.tokens)
    return sum(1 for tok in c.tokens if is_word(tok))


class NarrativeCleaner(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping raw narratives to token tuples."""

    def __init__(self, stop_words=None, frequent_words=None):
        self.stop_words = stop_words
        self.frequent_words = frequent_words

    def fit(self, X, y=None):
        self.stop_words_ = (
            default_stop_words() if self.stop_words is None else frozenset(self.stop_words)
        )
        self.frequent_words_ = (
            default_frequent_words()
            if self.frequent_words is None
            else frozenset(self.frequent_words)
        )
        return self

    def transform(self, X):
        if not hasattr(self, "stop_words_"):
            self.fit(X)
        return [clean(text, self.stop_words_, self.frequent_words_).tokens for text in X]


def clean_records(records, stop_words=None, frequent_words=None):
    stop_words = default_stop_words() if stop_words is None else stop_words
    frequent_words = default_frequent_words() if frequent_words is None else frequent_words
    return [clean(r.narrative, stop_words, frequent_words, id=r.id) for r in records]


def write_cleaned(cleaned, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in cleaned:
            fh.write(f"{c.id}\t{c.text}\n")


def read_cleaned(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            cid, _, text = line.partition("\t")
            out.append(CleanedNarrative(id=cid, tokens=tuple(text.split())))
    return out
