"""Typed cell predicates: generation, evaluation, signatures.

A predicate is a boolean test over a single cell with bound constant
arguments (e.g. ``Less(5)``, ``StartsWith("GW")``). Generation instantiates
the vocabulary against one column's data so that every kept predicate holds
on a strict subset of the column's non-empty cells — anything weaker
(always true / always false) carries no information for rule learning.

Per-cell *signatures* (the set of predicates a cell satisfies) and per-
predicate *column masks* are both represented as Python int bitmasks, which
keeps set algebra (symmetric difference, intersection) down to single
machine-word operations per 64 rows/predicates.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Context, Decimal

from .errors import NoPredicates, SchemaError
from .table import CellValue, ColumnType, TypedColumn, parse_number, parse_timestamp

MAX_POOL_SIZE = 512
MAX_TOKEN_LENGTH = 64
MAX_SUFFIX_LENGTH = 4
POPULAR_CONSTANTS = (Decimal(0), Decimal(1), Decimal(100))


class PredicateKind(enum.IntEnum):
    """Comparison kinds; the ordinal order is the canonical sort order."""

    GREATER = 0
    GREATER_EQUALS = 1
    LESS = 2
    LESS_EQUALS = 3
    BETWEEN = 4
    EQUALS = 5
    CONTAINS = 6
    STARTS_WITH = 7
    ENDS_WITH = 8


_KIND_JSON = {
    PredicateKind.GREATER: "greater",
    PredicateKind.GREATER_EQUALS: "greaterEquals",
    PredicateKind.LESS: "less",
    PredicateKind.LESS_EQUALS: "lessEquals",
    PredicateKind.BETWEEN: "between",
    PredicateKind.EQUALS: "equals",
    PredicateKind.CONTAINS: "contains",
    PredicateKind.STARTS_WITH: "startsWith",
    PredicateKind.ENDS_WITH: "endsWith",
}
_KIND_FROM_JSON = {v: k for k, v in _KIND_JSON.items()}

_TYPE_JSON = {
    ColumnType.NUMERIC: "numeric",
    ColumnType.DATETIME: "datetime",
    ColumnType.TEXT: "text",
}
_TYPE_FROM_JSON = {v: k for k, v in _TYPE_JSON.items()}

_COMPARISON_KINDS = (
    PredicateKind.GREATER,
    PredicateKind.GREATER_EQUALS,
    PredicateKind.LESS,
    PredicateKind.LESS_EQUALS,
)
_TEXT_KINDS = (
    PredicateKind.EQUALS,
    PredicateKind.CONTAINS,
    PredicateKind.STARTS_WITH,
    PredicateKind.ENDS_WITH,
)


class Provenance(enum.IntEnum):
    """Where a predicate's constant came from.

    The ordinal order is the pool-truncation priority: lower values are
    dropped first when the pool exceeds its size cap.
    """

    POPULAR_CONSTANT = 0
    COLUMN_STAT = 1
    PREFIX_TRIE_TOKEN = 2
    DELIMITER_TOKEN = 3
    CELL_VALUE = 4


@dataclass(frozen=True)
class Predicate:
    """A typed boolean test with bound constant arguments.

    Identity (equality/hashing) is by (kind, type, args) only; provenance
    is bookkeeping for ranking and pool truncation, not part of identity.
    """

    kind: PredicateKind
    type: ColumnType
    args: tuple
    provenance: Provenance = field(compare=False, default=Provenance.CELL_VALUE)

    def __post_init__(self) -> None:
        if self.type == ColumnType.TEXT:
            if self.kind not in _TEXT_KINDS:
                raise ValueError(f"{self.kind.name} is not a text predicate")
            if len(self.args) != 1 or not isinstance(self.args[0], str):
                raise ValueError("text predicates take one string argument")
            if self.args[0] == "":
                raise ValueError("text predicate argument must be non-empty")
        else:
            if self.kind in _TEXT_KINDS and self.kind != PredicateKind.EQUALS:
                raise ValueError(f"{self.kind.name} is not valid for {self.type.name}")
            if self.kind == PredicateKind.EQUALS and self.type != ColumnType.TEXT:
                raise ValueError("EQUALS is a text predicate")
            expected = 2 if self.kind == PredicateKind.BETWEEN else 1
            if len(self.args) != expected:
                raise ValueError(
                    f"{self.kind.name} takes {expected} argument(s), got {len(self.args)}"
                )
            want = Decimal if self.type == ColumnType.NUMERIC else datetime
            for a in self.args:
                if not isinstance(a, want):
                    raise ValueError(
                        f"{self.type.name} predicate argument must be {want.__name__}"
                    )
            if self.kind == PredicateKind.BETWEEN and not self.args[0] < self.args[1]:
                raise ValueError("BETWEEN requires args[0] < args[1]")

    @property
    def arg_strings(self) -> tuple[str, ...]:
        return tuple(format_arg(a) for a in self.args)

    def sort_key(self) -> tuple:
        return (int(self.kind), int(self.type), self.arg_strings)


def format_arg(arg: object) -> str:
    """Canonical string form of a predicate argument (used for sort order
    and JSON serialization)."""
    if isinstance(arg, Decimal):
        text = format(arg, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        if text in ("-0", ""):
            text = "0"
        return text
    if isinstance(arg, datetime):
        if (arg.hour, arg.minute, arg.second) == (0, 0, 0):
            return arg.strftime("%Y-%m-%d")
        return arg.strftime("%Y-%m-%dT%H:%M:%S")
    return str(arg)


def evaluate(pred: Predicate, cell: CellValue) -> bool:
    """Total, never raises: empty cells and type-mismatched cells are false."""
    if cell.is_empty:
        return False
    if pred.type == ColumnType.NUMERIC:
        value = cell.number
        if value is None:
            return False
    elif pred.type == ColumnType.DATETIME:
        value = cell.timestamp
        if value is None:
            return False
    else:
        value = cell.raw

    kind = pred.kind
    if kind == PredicateKind.GREATER:
        return value > pred.args[0]
    if kind == PredicateKind.GREATER_EQUALS:
        return value >= pred.args[0]
    if kind == PredicateKind.LESS:
        return value < pred.args[0]
    if kind == PredicateKind.LESS_EQUALS:
        return value <= pred.args[0]
    if kind == PredicateKind.BETWEEN:
        return pred.args[0] <= value <= pred.args[1]
    if kind == PredicateKind.EQUALS:
        return value == pred.args[0]
    if kind == PredicateKind.CONTAINS:
        return pred.args[0] in value
    if kind == PredicateKind.STARTS_WITH:
        return value.startswith(pred.args[0])
    return value.endswith(pred.args[0])


_ALNUM_RUN = re.compile(r"[0-9A-Za-z]+")
_ALPHA_OR_DIGIT_RUN = re.compile(r"[0-9]+|[A-Za-z]+")


def delimiter_tokens(raw: str) -> set[str]:
    """Tokens from splitting on non-alphanumeric delimiters.

    Besides maximal alphanumeric runs, runs are further split at
    letter<->digit boundaries so that ids like "AN47603" also yield their
    alphabetic ("AN") and numeric ("47603") parts.
    """
    tokens: set[str] = set()
    for match in _ALNUM_RUN.finditer(raw):
        run = match.group()
        tokens.add(run)
        for sub in _ALPHA_OR_DIGIT_RUN.findall(run):
            tokens.add(sub)
    return {t for t in tokens if len(t) <= MAX_TOKEN_LENGTH}


def suffix_tokens(raw: str) -> set[str]:
    """Delimiter-attached suffixes: the tail of the string starting at a
    non-alphanumeric character, kept when the whole suffix is short
    (e.g. "-F" from "AN47603-F")."""
    tokens: set[str] = set()
    for i, ch in enumerate(raw):
        if not ch.isalnum():
            suffix = raw[i:]
            if 0 < len(suffix) <= MAX_SUFFIX_LENGTH:
                tokens.add(suffix)
    return tokens


def prefix_trie_tokens(values: list[str]) -> set[str]:
    """All prefixes of length >= 2 shared by at least two distinct values."""
    distinct = sorted(set(values))
    shared: set[str] = set()
    for i in range(len(distinct) - 1):
        a, b = distinct[i], distinct[i + 1]
        common = 0
        for ca, cb in zip(a, b):
            if ca != cb:
                break
            common += 1
        for length in range(2, common + 1):
            shared.add(a[:length])
    return {t for t in shared if len(t) <= MAX_TOKEN_LENGTH}


def _percentile_nearest_rank(sorted_values: list, fraction: float):
    """Nearest-rank percentile: smallest value with cumulative rank >=
    fraction of the list."""
    n = len(sorted_values)
    rank = max(1, math.ceil(fraction * n))
    return sorted_values[rank - 1]


def _ordered_constants(column: TypedColumn) -> list[tuple[object, Provenance]]:
    """Constant pool for numeric/datetime columns: distinct cell values,
    column statistics, popular constants. Deduplicated keeping the
    highest-priority provenance."""
    values = [
        c.number if column.column_type == ColumnType.NUMERIC else c.timestamp
        for c in column.cells
        if not c.is_empty
    ]
    values = [v for v in values if v is not None]
    if not values:
        return []
    constants: dict[object, Provenance] = {}

    def add(value: object, prov: Provenance) -> None:
        if value not in constants or constants[value] < prov:
            constants[value] = prov

    for v in values:
        add(v, Provenance.CELL_VALUE)
    sorted_vals = sorted(values)
    add(sorted_vals[0], Provenance.COLUMN_STAT)
    add(sorted_vals[-1], Provenance.COLUMN_STAT)
    for frac in (0.25, 0.50, 0.75):
        add(_percentile_nearest_rank(sorted_vals, frac), Provenance.COLUMN_STAT)
    if column.column_type == ColumnType.NUMERIC:
        mean = Context(prec=15).divide(sum(values, Decimal(0)), Decimal(len(values)))
        add(mean, Provenance.COLUMN_STAT)
        for popular in POPULAR_CONSTANTS:
            add(popular, Provenance.POPULAR_CONSTANT)
    return sorted(constants.items(), key=lambda item: item[0])


def _text_candidates(column: TypedColumn) -> list[Predicate]:
    raw_values = [c.raw for c in column.cells if not c.is_empty]
    candidates: dict[tuple, Predicate] = {}

    def add(kind: PredicateKind, arg: str, prov: Provenance) -> None:
        if not arg or len(arg) > MAX_TOKEN_LENGTH:
            return
        key = (kind, arg)
        existing = candidates.get(key)
        if existing is None or existing.provenance < prov:
            candidates[key] = Predicate(kind, ColumnType.TEXT, (arg,), prov)

    for raw in raw_values:
        add(PredicateKind.EQUALS, raw, Provenance.CELL_VALUE)
    delim_tokens: set[str] = set()
    suffixes: set[str] = set()
    for raw in raw_values:
        delim_tokens |= delimiter_tokens(raw)
        suffixes |= suffix_tokens(raw)
    for token in delim_tokens:
        add(PredicateKind.CONTAINS, token, Provenance.DELIMITER_TOKEN)
        add(PredicateKind.STARTS_WITH, token, Provenance.DELIMITER_TOKEN)
        add(PredicateKind.ENDS_WITH, token, Provenance.DELIMITER_TOKEN)
    for suffix in suffixes:
        add(PredicateKind.ENDS_WITH, suffix, Provenance.DELIMITER_TOKEN)
    for token in prefix_trie_tokens(raw_values):
        add(PredicateKind.CONTAINS, token, Provenance.PREFIX_TRIE_TOKEN)
        add(PredicateKind.STARTS_WITH, token, Provenance.PREFIX_TRIE_TOKEN)
        add(PredicateKind.ENDS_WITH, token, Provenance.PREFIX_TRIE_TOKEN)
    return list(candidates.values())


def _ordered_candidates(column: TypedColumn) -> list[Predicate]:
    constants = _ordered_constants(column)
    candidates: list[Predicate] = []
    for value, prov in constants:
        for kind in _COMPARISON_KINDS:
            candidates.append(Predicate(kind, column.column_type, (value,), prov))
    for (lo, lo_prov), (hi, hi_prov) in zip(constants, constants[1:]):
        candidates.append(
            Predicate(
                PredicateKind.BETWEEN,
                column.column_type,
                (lo, hi),
                min(lo_prov, hi_prov),
            )
        )
    return candidates


def column_mask(pred: Predicate, column: TypedColumn) -> int:
    """Bitmask over rows: bit i set iff the predicate holds on cell i."""
    mask = 0
    kind, args, ptype = pred.kind, pred.args, pred.type
    if ptype == ColumnType.NUMERIC:
        values = [None if c.is_empty else c.number for c in column.cells]
    elif ptype == ColumnType.DATETIME:
        values = [None if c.is_empty else c.timestamp for c in column.cells]
    else:
        values = [None if c.is_empty else c.raw for c in column.cells]
    if kind == PredicateKind.GREATER:
        bits = (v is not None and v > args[0] for v in values)
    elif kind == PredicateKind.GREATER_EQUALS:
        bits = (v is not None and v >= args[0] for v in values)
    elif kind == PredicateKind.LESS:
        bits = (v is not None and v < args[0] for v in values)
    elif kind == PredicateKind.LESS_EQUALS:
        bits = (v is not None and v <= args[0] for v in values)
    elif kind == PredicateKind.BETWEEN:
        bits = (v is not None and args[0] <= v <= args[1] for v in values)
    elif kind == PredicateKind.EQUALS:
        bits = (v == args[0] for v in values)
    elif kind == PredicateKind.CONTAINS:
        bits = (v is not None and args[0] in v for v in values)
    elif kind == PredicateKind.STARTS_WITH:
        bits = (v is not None and v.startswith(args[0]) for v in values)
    else:
        bits = (v is not None and v.endswith(args[0]) for v in values)
    for i, hit in enumerate(bits):
        if hit:
            mask |= 1 << i
    return mask


def generate_predicates(column: TypedColumn) -> list[Predicate]:
    """Instantiate the predicate vocabulary against one column.

    Keeps only predicates true on a strict subset of the non-empty cells,
    deduplicates by (kind, args), sorts canonically, and truncates to the
    pool cap dropping lowest-priority provenance first.
    """
    if len(column) == 0:
        raise NoPredicates("column has no rows")
    if column.column_type == ColumnType.TEXT:
        candidates = _text_candidates(column)
    else:
        candidates = _ordered_candidates(column)
    non_empty = column.non_empty_count
    kept = []
    for pred in candidates:
        matches = column_mask(pred, column).bit_count()
        if 0 < matches < non_empty:
            kept.append(pred)
    if not kept:
        raise NoPredicates(
            "no predicate separates a strict subset of the column's cells"
        )
    kept.sort(key=Predicate.sort_key)
    if len(kept) > MAX_POOL_SIZE:
        # Drop lowest-priority provenance first; within equal priority keep
        # canonical-order-first for determinism.
        by_priority = sorted(
            range(len(kept)), key=lambda i: (-int(kept[i].provenance), i)
        )
        keep_indices = sorted(by_priority[:MAX_POOL_SIZE])
        kept = [kept[i] for i in keep_indices]
    return kept


def signatures(column: TypedColumn, pool: list[Predicate]) -> list[int]:
    """Per-row predicate signature as a bitmask over pool indices.

    Empty cells get the empty signature.
    """
    sigs = [0] * len(column)
    for j, pred in enumerate(pool):
        bit = 1 << j
        mask = column_mask(pred, column)
        i = 0
        while mask:
            if mask & 1:
                sigs[i] |= bit
            mask >>= 1
            i += 1
    return sigs


def predicate_to_json(pred: Predicate) -> dict:
    return {
        "kind": _KIND_JSON[pred.kind],
        "type": _TYPE_JSON[pred.type],
        "args": list(pred.arg_strings),
    }


def predicate_from_json(obj: object, path: str = "/") -> Predicate:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected a predicate object")
    for key in ("kind", "type", "args"):
        if key not in obj:
            raise SchemaError(f"{path}/{key}".replace("//", "/"), "missing required key")
    kind_name = obj["kind"]
    if kind_name not in _KIND_FROM_JSON:
        raise SchemaError(
            f"{path}/kind".replace("//", "/"),
            f"unknown kind {kind_name!r}; expected one of {sorted(_KIND_FROM_JSON)}",
        )
    type_name = obj["type"]
    if type_name not in _TYPE_FROM_JSON:
        raise SchemaError(
            f"{path}/type".replace("//", "/"),
            f"unknown type {type_name!r}; expected one of {sorted(_TYPE_FROM_JSON)}",
        )
    kind = _KIND_FROM_JSON[kind_name]
    ctype = _TYPE_FROM_JSON[type_name]
    if kind in _COMPARISON_KINDS and ctype == ColumnType.TEXT:
        raise SchemaError(
            f"{path}/type".replace("//", "/"),
            f"kind {kind_name!r} requires a numeric or datetime type",
        )
    if kind in _TEXT_KINDS and ctype != ColumnType.TEXT:
        raise SchemaError(
            f"{path}/type".replace("//", "/"),
            f"kind {kind_name!r} requires the text type",
        )
    raw_args = obj["args"]
    if not isinstance(raw_args, list):
        raise SchemaError(f"{path}/args".replace("//", "/"), "expected an array")
    arity = 2 if kind == PredicateKind.BETWEEN else 1
    if len(raw_args) != arity:
        raise SchemaError(
            f"{path}/args".replace("//", "/"),
            f"kind {kind_name!r} takes exactly {arity} argument(s)",
        )
    args: list = []
    for i, raw in enumerate(raw_args):
        arg_path = f"{path}/args/{i}".replace("//", "/")
        if ctype == ColumnType.TEXT:
            if not isinstance(raw, str):
                raise SchemaError(arg_path, "expected a string")
            args.append(raw)
        elif ctype == ColumnType.NUMERIC:
            if not isinstance(raw, (str, int, float)) or isinstance(raw, bool):
                raise SchemaError(arg_path, "expected a decimal string or number")
            value = parse_number(str(raw))
            if value is None:
                raise SchemaError(arg_path, f"not a finite number: {raw!r}")
            args.append(value)
        else:
            if not isinstance(raw, str):
                raise SchemaError(arg_path, "expected an ISO-8601 timestamp string")
            value = parse_timestamp(raw)
            if value is None:
                raise SchemaError(arg_path, f"not a recognized timestamp: {raw!r}")
            args.append(value)
    try:
        return Predicate(kind, ctype, tuple(args))
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc
