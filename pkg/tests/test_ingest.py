import datetime as dt
import io
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from complaint_anomaly.exceptions import ConfigurationError, IngestionError, ParseError
from complaint_anomaly.ingest import (
    CpiTable,
    RawComplaint,
    SelectionFilters,
    derive_merit,
    extract_dollar_amounts,
    load_cpi,
    parse_complaints,
    read_complaints,
    read_records,
    select_records,
    write_records,
)

HEADER = ("Date received,Product,Company,Consumer complaint narrative,"
          "Company response to consumer,Complaint ID\n")


def raw(narrative, date=dt.date(2015, 6, 1), product="Credit card", company="Bank",
        response="Closed with explanation", id="1"):
    return RawComplaint(id, date, product, company, narrative, response)


def test_parse_skips_blank_narratives():
    text = HEADER + (
        "2016-11-10,Credit card,Bank,charged $5.00,Closed with explanation,1\n"
        "2016-11-11,Credit card,Bank,   ,Closed with explanation,2\n"
        "11/12/2016,Credit card,Bank,\"paid $7, twice\",Closed with monetary relief,3\n"
    )
    result = parse_complaints(io.StringIO(text))
    assert len(result) == 2
    assert result.skipped == 1
    assert [c.id for c in result] == ["1", "3"]
    assert result.complaints[1].date_received == dt.date(2016, 11, 12)


def test_missing_response_column_is_configuration_error():
    text = "Date received,Product,Company,Consumer complaint narrative\n2016-01-01,a,b,c\n"
    with pytest.raises(ConfigurationError, match="Company response to consumer"):
        parse_complaints(io.StringIO(text))


def test_ragged_row_reports_row_number():
    text = HEADER + "2016-11-10,Credit card,Bank,x,Closed with explanation,1\n2016-11-10,only\n"
    with pytest.raises(ParseError) as err:
        parse_complaints(io.StringIO(text))
    assert err.value.row == 3


def test_bad_date_is_parse_error():
    text = HEADER + "yesterday,Credit card,Bank,x,Closed with explanation,1\n"
    with pytest.raises(ParseError, match="row 2"):
        parse_complaints(io.StringIO(text))


def test_custom_column_map():
    text = "d,p,c,n,r\n2016-01-01,Credit card,B,hello,Closed\n"
    cols = {"date": "d", "product": "p", "company": "c", "narrative": "n", "response": "r"}
    result = parse_complaints(io.StringIO(text), cols)
    assert result.complaints[0].id == "1"


def test_bundled_sample_has_fifty_rows(sample_csv):
    assert len(read_complaints(sample_csv)) == 50


@pytest.mark.parametrize(
    "response, expected",
    [
        ("Closed with monetary relief", True),
        ("Closed with explanation", False),
        ("  closed with NON-MONETARY relief ", True),
        ("Closed", False),
        ("In progress", False),
        ("", False),
    ],
)
def test_derive_merit(response, expected):
    assert derive_merit(response) is expected


@pytest.mark.parametrize(
    "text, expected",
    [
        ("charged {$170.00} was made", [Decimal("170.00")]),
        ("no amounts here", []),
        ("paid $1,200.50 then $1,200.50 again", [Decimal("1200.50")]),
        ("$230.00 and {$230}", [Decimal("230")]),
        ("refund of $0.00 only", []),
        ("$12,345.6 and $7", [Decimal("12345.6"), Decimal("7")]),
    ],
)
def test_extract_dollar_amounts(text, expected):
    assert extract_dollar_amounts(text) == expected


def test_cpi_requires_base_year():
    with pytest.raises(ConfigurationError):
        CpiTable({2016: 240.0})
    with pytest.raises(ConfigurationError):
        CpiTable({2015: 237.0, 2016: -1.0})


def test_bundled_cpi_covers_study_window():
    cpi = load_cpi()
    assert set(range(2011, 2024)) <= set(cpi.values)
    assert cpi.ratio(2015) == 1.0


def test_select_excludes_two_amounts_and_large_amounts():
    cpi = load_cpi()
    raws = [
        raw("paid $10.00 and $20.00", id="a"),
        raw("paid $10,500.00", id="b"),
        raw("paid $10,000.00", id="c"),
        raw("no money", id="d"),
        raw("paid $5.00", id="e", product="Mortgage"),
        raw("paid $5.00", id="f", date=dt.date(2011, 11, 30)),
    ]
    assert [r.id for r in select_records(raws, cpi)] == ["c"]


def test_base_year_amount_is_unchanged():
    cpi = load_cpi()
    (rec,) = select_records([raw("paid {$227.53}", date=dt.date(2015, 3, 2))], cpi)
    assert rec.adjusted_amount == rec.dollar_amount == 227.53


def test_adjustment_follows_cpi_ratio():
    cpi = CpiTable({2015: 200.0, 2020: 250.0})
    (rec,) = select_records([raw("paid $100", date=dt.date(2020, 1, 1))], cpi)
    assert rec.adjusted_amount == pytest.approx(80.0)


def test_missing_cpi_year_lists_years():
    cpi = CpiTable({2015: 237.0})
    raws = [raw("paid $1", date=dt.date(2016, 1, 1)), raw("paid $2", date=dt.date(2019, 1, 1))]
    with pytest.raises(IngestionError, match="2016, 2019"):
        select_records(raws, cpi)


def test_company_filter_is_case_insensitive():
    raws = [raw("paid $1", company="Big Bank"), raw("paid $1", company="Other", id="2")]
    kept = select_records(raws, load_cpi(), SelectionFilters(company="big bank"))
    assert [r.id for r in kept] == ["1"]


def test_selection_is_idempotent(sample_records):
    again = select_records([r.to_raw() for r in sample_records], load_cpi())
    assert again == sample_records


def test_sample_records_invariants(sample_records):
    for r in sample_records:
        assert 0 < r.dollar_amount <= 10000
        assert r.adjusted_amount > 0
        assert len(extract_dollar_amounts(r.narrative)) == 1


@given(st.decimals(min_value=1, max_value=4999, places=2), st.integers(2012, 2023))
def test_adjustment_proportional_within_year(amount, year):
    cpi = load_cpi()
    date = dt.date(year, 6, 1)
    (a,) = select_records([raw(f"paid ${amount}", date=date)], cpi)
    (b,) = select_records([raw(f"paid ${amount * 2}", date=date)], cpi)
    assert b.adjusted_amount == pytest.approx(2 * a.adjusted_amount, rel=1e-12)


def test_records_round_trip(tmp_path, sample_records):
    path = tmp_path / "records.jsonl"
    write_records(sample_records, path)
    back = read_records(path)
    assert [(r.id, r.merit, r.adjusted_amount, r.narrative) for r in back] == [
        (r.id, r.merit, r.adjusted_amount, r.narrative) for r in sample_records
    ]
    assert len(path.read_text().splitlines()) == len(sample_records)
