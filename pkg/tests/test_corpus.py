import pytest
from hypothesis import given
from hypothesis import strategies as st

from complaint_anomaly.corpus import (
    CleanedNarrative,
    NarrativeCleaner,
    clean,
    default_stop_words,
    drop_gratitude_sentences,
    read_cleaned,
    tokenize,
    word_count_ti,
    write_cleaned,
)
from complaint_anomaly.ingest import DOLLAR_PATTERN

CLEANING_TABLE = [
    ("Macys did not reverse out my $230.00  dispute Similar to cfpg XXXX",
     "macys not reverse dispute similar cfpg"),
    ("Inquired about $300.00 increase and did not receive a response to the request",
     "inquired increase not receive response request"),
    ("Order cancelled and never delivered. still charged full amount of $7000.00 on my credit card",
     "order cancelled never delivered still charged full amount credit card"),
    ("A charge of $170.00 was made to my card I did not make or authorize charge.",
     "charge made card not make authorize charge"),
    ("Someone fraudulently charged $750.00 from XXXX on our card and Citi will not take it off!!!!!!!!!!",
     "someone fraudulently charged card citi not take " + " ".join("!" * 10)),
]


@pytest.mark.parametrize("raw, expected", CLEANING_TABLE)
def test_cleaning_table(raw, expected):
    assert clean(raw).tokens == tuple(expected.split())


def test_gratitude_sentence_is_dropped():
    assert clean("Thank you for your help.").tokens == ()
    assert clean("The fee was wrong. Thanks for nothing! Please refund.").tokens == (
        "fee", "wrong", "please", "refund",
    )


def test_gratitude_only_at_sentence_start():
    assert "thanks" in clean("I got no thanks at all.").tokens


def test_drop_gratitude_sentences_keeps_others():
    assert drop_gratitude_sentences("Bad fee. thank you. Fix it") == "Bad fee. Fix it"


def test_marks_become_single_tokens():
    assert tokenize("why?! ok") == ["why", "?", "!", "ok"]


def test_negations_survive():
    assert clean("I will never pay, no, not ever").tokens[:3] == ("never", "pay", "no")
    assert not default_stop_words() & {"not", "no", "never"}


def test_redaction_masks_removed():
    assert clean("call XX/XX/XXXX about xxxxxxxx").tokens == ("call",)


@pytest.mark.parametrize(
    "tokens, expected",
    [
        (("macys", "not", "reverse", "dispute", "similar", "cfpg"), 6),
        ((), 0),
        (("!", "!", "!"), 0),
        (("why", "?", "bad", "!"), 2),
    ],
)
def test_word_count_ti(tokens, expected):
    assert word_count_ti(CleanedNarrative("x", tokens)) == expected


def test_word_count_of_bang_only_narrative():
    assert word_count_ti(clean("!!!")) == 0
    assert word_count_ti(clean("!!!"), count_punctuation=True) == 3


text_pieces = st.lists(
    st.sampled_from(
        ["card", "fee", "not", "the", "my", "did", "$40.00", "XXXX", "refund", "!", "?",
         "late.", "charge,", "Bank's", "{$1,200}", "never", "and", "Unfair"]
    ),
    max_size=25,
)


@given(text_pieces)
def test_clean_is_idempotent(pieces):
    first = clean(" ".join(pieces))
    assert clean(first.text).tokens == first.tokens


@given(text_pieces)
def test_no_dollar_amounts_survive(pieces):
    for tok in clean(" ".join(pieces)).tokens:
        assert not DOLLAR_PATTERN.search(tok)


@given(text_pieces, st.sampled_from(sorted(default_stop_words())), st.integers(0, 25))
def test_inserting_stop_word_is_invisible(pieces, stop, pos):
    base = clean(" ".join(pieces)).tokens
    with_stop = pieces[:pos] + [stop] + pieces[pos:]
    assert clean(" ".join(with_stop)).tokens == base


def test_cleaner_transformer(sample_records):
    narratives = [r.narrative for r in sample_records[:5]]
    out = NarrativeCleaner().fit_transform(narratives)
    assert out == [clean(n).tokens for n in narratives]
    assert NarrativeCleaner().get_params() == {"frequent_words": None, "stop_words": None}


def test_cleaned_round_trip(tmp_path, sample_cleaned):
    path = tmp_path / "cleaned.tsv"
    write_cleaned(sample_cleaned, path)
    assert read_cleaned(path) == sample_cleaned
