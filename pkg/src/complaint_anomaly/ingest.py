"""Reading CFPB-style complaint exports and turning them into labelled records.

The selection mirrors the study design: credit/prepaid card complaints of one
company inside a date window, with exactly one distinct positive dollar
amount no larger than $10,000, discounted to a base date with annual CPI.
"""

import csv
import datetime as dt
import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path

from .exceptions import ConfigurationError, IngestionError, ParseError

DEFAULT_COLUMNS = {
    "id": "Complaint ID",
    "narrative": "Consumer complaint narrative",
    "date": "Date received",
    "product": "Product",
    "company": "Company",
    "response": "Company response to consumer",
}
# id falls back to the row number when absent
REQUIRED_COLUMNS = ("narrative", "date", "product", "company", "response")

MERITORIOUS_RESPONSES = frozenset(
    {"closed with monetary relief", "closed with non-monetary relief"}
)

# `$230.00`, `{$230.00}`, `$1,200.50`, `$ 75`
DOLLAR_PATTERN = re.compile(
    r"\{?\$\s?((?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d{1,2})?)\}?"
)

_DATE_FORMATS = ("%Y-%m-%d", "%m/%d/%Y", "%m/%d/%y", "%Y-%m-%dT%H:%M:%S")


@dataclass(frozen=True)
class RawComplaint:
    id: str
    date_received: dt.date
    product: str
    company: str
    narrative: str
    company_response: str


@dataclass(frozen=True)
class ComplaintRecord:
    id: str
    date_received: dt.date
    narrative: str
    merit: bool
    dollar_amount: float
    adjusted_amount: float
    product: str = ""
    company: str = ""
    company_response: str = ""

    def to_raw(self):
        return RawComplaint(
            id=self.id,
            date_received=self.date_received,
            product=self.product,
            company=self.company,
            narrative=self.narrative,
            company_response=self.company_response,
        )


@dataclass
class ParseResult:
    complaints: list
    skipped: int = 0

    def __iter__(self):
        return iter(self.complaints)

    def __len__(self):
        return len(self.complaints)


@dataclass(frozen=True)
class CpiTable:
    """Annual CPI values keyed by year, plus the date amounts are discounted to."""

    values: dict
    base_date: dt.date = dt.date(2015, 1, 1)

    def __post_init__(self):
        bad = {y: v for y, v in self.values.items() if not v > 0}
        if bad:
            raise ConfigurationError(f"CPI values must be positive: {bad}")
        if self.base_date.year not in self.values:
            raise ConfigurationError(
                f"CPI table has no entry for base year {self.base_date.year}"
            )

    def ratio(self, year):
        """Multiplier taking a price from ``year`` to the base year."""
        return self.values[self.base_date.year] / self.values[year]


@dataclass(frozen=True)
class SelectionFilters:
    products: tuple = ("credit card", "prepaid card")
    company: str | None = None
    start: dt.date = dt.date(2011, 12, 1)
    end: dt.date = dt.date(2023, 6, 29)
    max_amount: float = 10000.0
    exclude_ids: frozenset = field(default_factory=frozenset)


def parse_date(text):
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unrecognised date {text!r}")


def parse_complaints(stream, column_map=None):
    """Parse a header-bearing CSV stream into :class:`RawComplaint` rows.

    Rows whose narrative is blank are skipped and counted in the result's
    ``skipped`` attribute.
    """
    columns = dict(DEFAULT_COLUMNS)
    if column_map:
        columns.update(column_map)

    reader = csv.DictReader(stream)
    try:
        header = reader.fieldnames
    except csv.Error as exc:
        raise ParseError(str(exc), row=1) from exc
    if header is None:
        raise ParseError("empty input, no header row", row=1)
    missing = [columns[key] for key in REQUIRED_COLUMNS if columns[key] not in header]
    if missing:
        raise ConfigurationError(f"missing column(s): {', '.join(missing)}")
    has_id = columns["id"] in header

    complaints = []
    skipped = 0
    row_number = 1
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as exc:
            raise ParseError(str(exc), row=row_number + 1) from exc
        row_number += 1
        if None in row or any(v is None for v in row.values()):
            raise ParseError("field count does not match header", row=row_number)

        narrative = row[columns["narrative"]]
        if not narrative.strip():
            skipped += 1
            continue
        try:
            date = parse_date(row[columns["date"]])
        except ValueError as exc:
            raise ParseError(str(exc), row=row_number) from exc
        complaint_id = row[columns["id"]].strip() if has_id else ""
        complaints.append(
            RawComplaint(
                id=complaint_id or str(row_number - 1),
                date_received=date,
                product=row[columns["product"]].strip(),
                company=row[columns["company"]].strip(),
                narrative=narrative,
                company_response=row[columns["response"]].strip(),
            )
        )
    return ParseResult(complaints, skipped)


def read_complaints(path, column_map=None):
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_complaints(fh, column_map)


def derive_merit(company_response):
    return " ".join(company_response.split()).lower() in MERITORIOUS_RESPONSES


def extract_dollar_amounts(narrative):
    """Distinct positive dollar amounts in order of first appearance."""
    amounts = []
    for match in DOLLAR_PATTERN.finditer(narrative):
        try:
            value = Decimal(match.group(1).replace(",", ""))
        except InvalidOperation:
            continue
        if value > 0 and value not in amounts:
            amounts.append(value)
    return amounts


def load_cpi(path=None, base_date=dt.date(2015, 1, 1)):
    """Read a ``year,cpi`` CSV; the bundled CPI-U annual averages by default."""
    if path is None:
        text = resources.files(__package__).joinpath("data/cpi_u_annual.csv").read_text()
    else:
        text = Path(path).read_text(encoding="utf-8")
    values = {}
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or not {"year", "cpi"} <= set(reader.fieldnames):
        raise ConfigurationError("CPI file must have a 'year,cpi' header")
    for lineno, row in enumerate(reader, start=2):
        try:
            values[int(row["year"])] = float(row["cpi"])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad CPI entry {row}", row=lineno) from exc
    return CpiTable(values, base_date)


def _matches(raw, filters):
    product = raw.product.lower()
    if filters.products and not any(p.lower() in product for p in filters.products):
        return False
    if filters.company is not None and raw.company.lower() != filters.company.lower():
        return False
    if not filters.start <= raw.date_received <= filters.end:
        return False
    return raw.id not in filters.exclude_ids


def select_records(raws, cpi, filters=None):
    """Apply the selection rules and attach merit labels and adjusted amounts."""
    filters = filters or SelectionFilters()
    candidates = []
    for raw in raws:
        if not _matches(raw, filters):
            continue
        amounts = extract_dollar_amounts(raw.narrative)
        if len(amounts) != 1 or amounts[0] > Decimal(str(filters.max_amount)):
            continue
        candidates.append((raw, float(amounts[0])))

    missing = sorted({raw.date_received.year for raw, _ in candidates} - set(cpi.values))
    if missing:
        raise IngestionError(f"CPI table lacks year(s): {', '.join(map(str, missing))}")

    return [
        ComplaintRecord(
            id=raw.id,
            date_received=raw.date_received,
            narrative=raw.narrative,
            merit=derive_merit(raw.company_response),
            dollar_amount=amount,
            adjusted_amount=amount * cpi.ratio(raw.date_received.year),
            product=raw.product,
            company=raw.company,
            company_response=raw.company_response,
        )
        for raw, amount in candidates
    ]


def write_records(records, path):
    """Write records as JSON lines with a fixed field order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "id": rec.id,
                        "date": rec.date_received.isoformat(),
                        "merit": rec.merit,
                        "amount": rec.dollar_amount,
                        "adjusted_amount": rec.adjusted_amount,
                        "narrative": rec.narrative,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_records(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(
                    ComplaintRecord(
                        id=str(obj["id"]),
                        date_received=dt.date.fromisoformat(obj["date"]),
                        narrative=obj["narrative"],
                        merit=bool(obj["merit"]),
                        dollar_amount=float(obj["amount"]),
                        adjusted_amount=float(obj["adjusted_amount"]),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"bad record: {exc}", row=lineno) from exc
    return records
