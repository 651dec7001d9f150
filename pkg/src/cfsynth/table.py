"""Typed tabular input and user formatting examples.

Raw delimited text is parsed into typed columns (numeric, datetime, or
text); the user's formatted example cells become an :class:`Annotation`,
which induces a per-row :class:`PositionalLabeling` under the top-down
annotation assumption: rows above (or between) examples were seen and left
unformatted on purpose, rows below the last example are genuinely
unlabeled.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Context, Decimal, InvalidOperation

from .errors import EmptyTable, InvalidAnnotation, MalformedInput, SchemaError

# Numbers are held at 15 significant digits; comparisons are exact on that
# representation so execution masks are reproducible across platforms.
_DECIMAL_CTX = Context(prec=15)

_THOUSANDS_RE = re.compile(r"^[+-]?\d{1,3}(,\d{3})+(\.\d*)?$")

_DATETIME_FORMATS = (
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
    "%Y-%m-%d",
    "%m/%d/%Y",
)


class ColumnType(enum.IntEnum):
    NUMERIC = 0
    DATETIME = 1
    TEXT = 2


def parse_number(raw: str) -> Decimal | None:
    """Parse a cell string as a finite decimal, or return None.

    Accepts an optional sign, decimal point, comma thousands separators
    (only in well-formed groups of three), and a percent suffix (value is
    divided by 100), mirroring spreadsheet cell coercion.
    """
    text = raw.strip()
    if not text or "_" in text or "e" in text or "E" in text:
        return None
    percent = text.endswith("%")
    if percent:
        text = text[:-1].strip()
        if not text:
            return None
    if "," in text:
        if not _THOUSANDS_RE.match(text):
            return None
        text = text.replace(",", "")
    try:
        value = _DECIMAL_CTX.plus(Decimal(text))
    except InvalidOperation:
        return None
    if not value.is_finite():
        return None
    if percent:
        value = _DECIMAL_CTX.divide(value, Decimal(100))
    return value


def parse_timestamp(raw: str) -> datetime | None:
    """Parse a cell string as a timestamp, or return None.

    Accepted formats: ISO-8601 date (2021-03-01), ISO-8601 date-time with
    'T' or space separator at minute or second resolution, and M/D/YYYY.
    """
    text = raw.strip()
    if not text:
        return None
    for fmt in _DATETIME_FORMATS:
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    return None


@dataclass(frozen=True)
class CellValue:
    """One cell: the raw string plus its parsed value, if any.

    A cell is empty iff its raw string is empty. ``number`` and
    ``timestamp`` are populated according to the owning column's type, so a
    numeric column holds Decimal values and a text column views every cell
    through its raw string.
    """

    raw: str
    number: Decimal | None = None
    timestamp: datetime | None = None

    @property
    def is_empty(self) -> bool:
        return self.raw == ""


@dataclass(frozen=True)
class SourceRef:
    """Spreadsheet coordinates of a column: letter plus first data row."""

    column_letter: str = "A"
    first_row: int = 2

    def cell(self) -> str:
        return f"{self.column_letter}{self.first_row}"


@dataclass(frozen=True)
class TypedColumn:
    name: str
    column_type: ColumnType
    cells: tuple[CellValue, ...]
    source_ref: SourceRef = field(default_factory=SourceRef)

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def non_empty_count(self) -> int:
        return sum(1 for c in self.cells if not c.is_empty)


def infer_type(raw_cells: list[str] | tuple[str, ...]) -> ColumnType:
    """Assign a column type: numeric or datetime only when every non-empty
    cell parses as such; anything mixed (and all-empty) is text."""
    non_empty = [c for c in raw_cells if c != ""]
    if not non_empty:
        return ColumnType.TEXT
    if all(parse_number(c) is not None for c in non_empty):
        return ColumnType.NUMERIC
    if all(parse_timestamp(c) is not None for c in non_empty):
        return ColumnType.DATETIME
    return ColumnType.TEXT


def build_column(
    name: str,
    raw_cells: list[str] | tuple[str, ...],
    source_ref: SourceRef | None = None,
) -> TypedColumn:
    """Type a list of raw cell strings and wrap them as a TypedColumn."""
    ctype = infer_type(raw_cells)
    cells = []
    for raw in raw_cells:
        if raw == "":
            cells.append(CellValue(raw))
        elif ctype == ColumnType.NUMERIC:
            cells.append(CellValue(raw, number=parse_number(raw)))
        elif ctype == ColumnType.DATETIME:
            cells.append(CellValue(raw, timestamp=parse_timestamp(raw)))
        else:
            cells.append(CellValue(raw))
    return TypedColumn(
        name=name,
        column_type=ctype,
        cells=tuple(cells),
        source_ref=source_ref or SourceRef(),
    )


def lowercase_column(column: TypedColumn) -> TypedColumn:
    """Rebuild a column with every raw cell lower-cased (type is
    re-inferred, though case never changes a cell's parsed type)."""
    return build_column(
        column.name,
        [cell.raw.lower() for cell in column.cells],
        source_ref=column.source_ref,
    )


def _column_letter(index: int) -> str:
    letters = ""
    index += 1
    while index > 0:
        index, rem = divmod(index - 1, 26)
        letters = chr(ord("A") + rem) + letters
    return letters


def parse_table(
    raw: str,
    *,
    delimiter: str = ",",
    header: bool = True,
) -> list[TypedColumn]:
    """Parse RFC-4180-style delimited text into typed columns.

    Raises MalformedInput on ragged rows and EmptyTable when no data rows
    remain after the (optional) header.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from exc
    try:
        rows = [row for row in csv.reader(io.StringIO(raw), delimiter=delimiter) if row]
    except csv.Error as exc:
        raise MalformedInput(f"cannot parse delimited text: {exc}") from exc
    if not rows:
        raise EmptyTable("input contains no rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MalformedInput(
                f"ragged row {i}: expected {width} fields, got {len(row)}"
            )
    names: list[str]
    if header:
        names = rows[0]
        data = rows[1:]
    else:
        names = [_column_letter(i) for i in range(width)]
        data = rows
    if not data:
        raise EmptyTable("input contains a header but no data rows")
    first_row = 2 if header else 1
    columns = []
    for i, name in enumerate(names):
        raw_cells = [row[i] for row in data]
        ref = SourceRef(column_letter=_column_letter(i), first_row=first_row)
        columns.append(build_column(name, raw_cells, source_ref=ref))
    return columns


@dataclass(frozen=True)
class Annotation:
    """The user's formatted example cells, in the order they were given.

    ``examples`` pairs a 0-based data-row index with the format painted on
    that row. Rows must be distinct and in range for the column.
    """

    examples: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        if not self.examples:
            raise InvalidAnnotation("at least one example is required")
        for row, fmt in self.examples:
            if not fmt:
                raise InvalidAnnotation(f"empty format id on row {row}")
        rows = [row for row, _ in self.examples]
        if len(set(rows)) != len(rows):
            raise InvalidAnnotation("duplicate example rows")

    @property
    def format_ids(self) -> tuple[str, ...]:
        """Distinct format ids in first-appearance order, scanning rows
        in ascending row order."""
        seen: dict[str, None] = {}
        for _, fmt in sorted(self.examples, key=lambda e: e[0]):
            if fmt not in seen:
                seen[fmt] = None
        return tuple(seen)

    @property
    def max_row(self) -> int:
        return max(row for row, _ in self.examples)


class LabelKind(enum.Enum):
    FORMAT = "format"
    INTENTIONALLY_UNFORMATTED = "intentionally_unformatted"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class RowLabel:
    kind: LabelKind
    format_id: str | None = None


@dataclass(frozen=True)
class PositionalLabeling:
    """Per-row labels induced by the top-down annotation assumption."""

    labels: tuple[RowLabel, ...]

    def rows_with(self, kind: LabelKind) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab.kind == kind]


def positional_labels(column: TypedColumn, ann: Annotation) -> PositionalLabeling:
    """Label every row: example rows keep their format, rows above/between
    examples are intentionally unformatted, rows below the last example are
    unassigned."""
    n = len(column)
    for row, _ in ann.examples:
        if not (0 <= row < n):
            raise InvalidAnnotation(f"example row {row} outside column of {n} rows")
    by_row = {row: fmt for row, fmt in ann.examples}
    last = ann.max_row
    labels = []
    for i in range(n):
        if i in by_row:
            labels.append(RowLabel(LabelKind.FORMAT, by_row[i]))
        elif i < last:
            labels.append(RowLabel(LabelKind.INTENTIONALLY_UNFORMATTED))
        else:
            labels.append(RowLabel(LabelKind.UNASSIGNED))
    return PositionalLabeling(tuple(labels))


def annotation_from_json(obj: object) -> tuple[str | int, Annotation]:
    """Validate the annotation JSON shape and return (column selector,
    Annotation). The selector is a column name or 0-based index; resolution
    against a parsed table happens at the call site."""
    if not isinstance(obj, dict):
        raise SchemaError("/", "expected an object")
    if "column" not in obj:
        raise SchemaError("/column", "missing required key")
    selector = obj["column"]
    if not isinstance(selector, (str, int)) or isinstance(selector, bool):
        raise SchemaError("/column", "expected a column name or 0-based index")
    if "examples" not in obj:
        raise SchemaError("/examples", "missing required key")
    raw_examples = obj["examples"]
    if not isinstance(raw_examples, list) or not raw_examples:
        raise SchemaError("/examples", "expected a non-empty array")
    examples = []
    for i, entry in enumerate(raw_examples):
        if not isinstance(entry, dict):
            raise SchemaError(f"/examples/{i}", "expected an object")
        if "row" not in entry:
            raise SchemaError(f"/examples/{i}/row", "missing required key")
        row = entry["row"]
        if not isinstance(row, int) or isinstance(row, bool) or row < 0:
            raise SchemaError(f"/examples/{i}/row", "expected a 0-based row index")
        if "format" not in entry:
            raise SchemaError(f"/examples/{i}/format", "missing required key")
        fmt = entry["format"]
        if not isinstance(fmt, str) or not fmt:
            raise SchemaError(f"/examples/{i}/format", "expected a non-empty string")
        examples.append((row, fmt))
    try:
        ann = Annotation(tuple(examples))
    except InvalidAnnotation as exc:
        raise SchemaError("/examples", str(exc)) from exc
    return selector, ann


def resolve_column(columns: list[TypedColumn], selector: str | int) -> TypedColumn:
    """Find a column by name or 0-based index."""
    if isinstance(selector, bool):
        raise SchemaError("/column", "expected a column name or 0-based index")
    if isinstance(selector, int):
        if not (0 <= selector < len(columns)):
            raise SchemaError(
                "/column", f"index {selector} outside table of {len(columns)} columns"
            )
        return columns[selector]
    for col in columns:
        if col.name == selector:
            return col
    raise SchemaError("/column", f"no column named {selector!r}")
