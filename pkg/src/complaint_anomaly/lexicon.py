"""Word-level VADER sentiment intensities.

Only the per-word mean intensities are used; VADER's sentence-level rules
(boosters, negation flipping, compound score) are deliberately absent.
"""

import math
from collections.abc import Mapping
from importlib import resources

from .exceptions import LexiconLoadError

INTENSITY_BOUND = 4.0


class SentimentLexicon(Mapping):
    """Immutable word -> intensity map; unknown words have intensity 0."""

    def __init__(self, intensities=None):
        self._intensities = dict(intensities or {})
        for word, value in self._intensities.items():
            if not -INTENSITY_BOUND <= value <= INTENSITY_BOUND:
                raise ValueError(f"intensity of {word!r} outside [-4, 4]: {value}")

    def __getitem__(self, word):
        return self._intensities[word]

    def __iter__(self):
        return iter(self._intensities)

    def __len__(self):
        return len(self._intensities)

    def __repr__(self):
        return f"SentimentLexicon({len(self)} words)"

    def intensity(self, word):
        return self._intensities.get(word, 0.0)

    def with_overrides(self, overrides):
        """Copy with some intensities replaced, e.g. for "!" and "?"."""
        merged = dict(self._intensities)
        merged.update({w: float(v) for w, v in overrides.items() if v is not None})
        return SentimentLexicon(merged)


def _parse_lines(lines, source):
    intensities = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise LexiconLoadError(f"{source}: expected token<TAB>intensity", line=lineno)
        token, raw = parts[0], parts[1]
        try:
            value = float(raw)
        except ValueError:
            raise LexiconLoadError(
                f"{source}: non-numeric intensity {raw!r}", line=lineno
            ) from None
        if not math.isfinite(value):
            raise LexiconLoadError(f"{source}: non-finite intensity {raw!r}", line=lineno)
        if abs(value) > INTENSITY_BOUND:
            raise LexiconLoadError(f"{source}: intensity {value} outside [-4, 4]", line=lineno)
        intensities[token] = value
    return intensities


def load_lexicon(path=None):
    """Load a tab-separated lexicon (token, mean intensity, ignored extras).

    With no path the lexicon distributed with the ``vaderSentiment`` package
    is used.
    """
    if path is None:
        ref = resources.files("vaderSentiment").joinpath("vader_lexicon.txt")
        return SentimentLexicon(_parse_lines(ref.read_text(encoding="utf-8").splitlines(), ref.name))
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise LexiconLoadError(f"cannot read {path}: {exc}") from exc
    return SentimentLexicon(_parse_lines(lines, str(path)))


def negative_subset(lex):
    return frozenset(w for w, v in lex.items() if v < 0)
