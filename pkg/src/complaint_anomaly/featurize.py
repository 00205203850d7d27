"""TF-IDF and TF-IDF-VADER document-term matrices.

Raw counts times natural-log IDF, with no smoothing or row normalisation.
The VADER variant keeps only negative-intensity words and scales each
column by the word's absolute intensity.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import UndefinedWordError
from .lexicon import negative_subset

TI = "TI"
TIV = "TIV"
TAGS = (TI, TIV)
# CLI spelling -> internal tag
FEATURIZATION_NAMES = {"tfidf": TI, "tfidf-vader": TIV}


def _tokens(doc):
    return doc.tokens if hasattr(doc, "tokens") else tuple(doc)


def check_tag(tag):
    tag = FEATURIZATION_NAMES.get(tag, tag)
    if tag not in TAGS:
        raise ValueError(f"unknown featurization {tag!r}; expected one of {TAGS}")
    return tag


@dataclass(frozen=True)
class Vocabulary:
    words: tuple
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.words)) != len(self.words):
            raise ValueError("vocabulary contains duplicate words")
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index


@dataclass(frozen=True)
class FeatureMatrix:
    matrix: sp.csr_matrix
    vocabulary: Vocabulary
    tag: str

    @property
    def n_rows(self):
        return self.matrix.shape[0]

    def entries(self):
        """Stored (row, col, value) triplets in row-major order."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in order]


def term_frequency(doc, w):
    return sum(1 for tok in _tokens(doc) if tok == w)


def document_frequencies(corpus):
    df = Counter()
    for doc in corpus:
        df.update(set(_tokens(doc)))
    return df


def inverse_document_frequency(corpus, w):
    docs = [set(_tokens(d)) for d in corpus]
    n_j = sum(1 for d in docs if w in d)
    if n_j == 0:
        raise UndefinedWordError(f"{w!r} does not occur in the corpus")
    return math.log(len(docs) / n_j)


class TfidfFeaturizer(TransformerMixin, BaseEstimator):
    """Fit vocabulary and IDF on one corpus, then featurize any corpus.

    Parameters
    ----------
    featurization : {"TI", "TIV"}
        Plain TF-IDF, or TF-IDF-VADER restricted to negative words.
    lexicon : SentimentLexicon, optional
        Required for ``"TIV"``.
    """

    def __init__(self, featurization=TI, lexicon=None):
        self.featurization = featurization
        self.lexicon = lexicon

    def fit(self, X, y=None):
        tag = check_tag(self.featurization)
        docs = [_tokens(d) for d in X]
        if not docs:
            raise ValueError("cannot featurize an empty corpus")
        df = document_frequencies(docs)
        words = sorted(df)
        weights = {}
        if tag == TIV:
            if self.lexicon is None:
                raise ValueError("TF-IDF-VADER needs a sentiment lexicon")
            neg = negative_subset(self.lexicon)
            words = [w for w in words if w in neg]
            weights = {w: abs(self.lexicon.intensity(w)) for w in words}
        n = len(docs)
        self.tag_ = tag
        self.vocabulary_ = Vocabulary(tuple(words))
        self.n_documents_ = n
        self.idf_ = np.array([math.log(n / df[w]) for w in words], dtype=float)
        self.sentiment_weights_ = np.array([weights.get(w, 1.0) for w in words], dtype=float)
        return self

    def transform(self, X):
        check_is_fitted(self, "vocabulary_")
        index = self.vocabulary_.index
        rows, cols, vals = [], [], []
        n_rows = 0
        for i, doc in enumerate(X):
            n_rows = i + 1
            counts = Counter(tok for tok in _tokens(doc) if tok in index)
            for word in sorted(counts):
                j = index[word]
                rows.append(i)
                cols.append(j)
                # (TF * IDF) * |VADER| so TIV entries equal TI entries times |VADER| exactly
                vals.append(counts[word] * self.idf_[j] * self.sentiment_weights_[j])
        matrix = sp.csr_matrix(
            (np.array(vals, dtype=float), (np.array(rows, dtype=int), np.array(cols, dtype=int))),
            shape=(n_rows, len(self.vocabulary_)),
        )
        matrix.eliminate_zeros()
        return matrix

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.array(self.vocabulary_.words, dtype=object)


def build_matrix(corpus, lex=None, tag=TI):
    """Featurize a whole corpus with vocabulary and IDF taken from itself."""
    corpus = list(corpus)
    if not corpus:
        raise ValueError("cannot featurize an empty corpus")
    featurizer = TfidfFeaturizer(tag, lex).fit(corpus)
    return FeatureMatrix(featurizer.transform(corpus), featurizer.vocabulary_, featurizer.tag_)


def write_matrix(fm, path):
    """Write ``row,col,value`` triplets plus a ``.vocab`` sidecar; returns its path."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# tag={fm.tag} rows={fm.n_rows} cols={len(fm.vocabulary)}\n")
        for r, c, v in fm.entries():
            fh.write(f"{r},{c},{v!r}\n")
    vocab_path = path.with_suffix(path.suffix + ".vocab")
    vocab_path.write_text("".join(w + "\n" for w in fm.vocabulary.words), encoding="utf-8")
    return vocab_path


def read_matrix(path):
    path = Path(path)
    words = tuple(
        path.with_suffix(path.suffix + ".vocab").read_text(encoding="utf-8").splitlines()
    )
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().lstrip("# ").split()
        meta = dict(item.split("=", 1) for item in header)
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, v = line.strip().split(",")
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    shape = (int(meta["rows"]), int(meta["cols"]))
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=shape)
    return FeatureMatrix(matrix, Vocabulary(words), meta["tag"])

