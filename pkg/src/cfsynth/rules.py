"""The rule language: DNF rules over predicates, execution, simplification,
JSON round-tripping, and spreadsheet-formula emission.

A rule is an OR of ANDs of possibly-negated predicates, tied to one format
id. Execution produces a per-row boolean mask (as an int bitmask); emission
produces an Excel-style formula over the column's reference cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal

from .errors import SchemaError, TypeMismatch, Unsatisfiable
from .predicates import (
    Predicate,
    PredicateKind,
    column_mask,
    evaluate,
    format_arg,
    predicate_from_json,
    predicate_to_json,
)
from .table import CellValue, ColumnType, SourceRef, TypedColumn


@dataclass(frozen=True)
class Literal:
    predicate: Predicate
    negated: bool = False

    def sort_key(self) -> tuple:
        return (*self.predicate.sort_key(), self.negated)


@dataclass(frozen=True)
class Rule:
    """DNF rule: non-empty disjunction of non-empty conjunctions."""

    disjuncts: tuple[tuple[Literal, ...], ...]
    format: str

    def __post_init__(self) -> None:
        if not self.disjuncts:
            raise ValueError("a rule needs at least one conjunction")
        for conj in self.disjuncts:
            if not conj:
                raise ValueError("conjunctions must be non-empty")

    @property
    def num_literals(self) -> int:
        return sum(len(conj) for conj in self.disjuncts)

    @property
    def num_negations(self) -> int:
        return sum(lit.negated for conj in self.disjuncts for lit in conj)

    def sort_key(self) -> tuple:
        return tuple(tuple(lit.sort_key() for lit in conj) for conj in self.disjuncts)


def rule_type(rule: Rule) -> ColumnType:
    """The single column type a rule's predicates evaluate against."""
    types = {lit.predicate.type for conj in rule.disjuncts for lit in conj}
    if len(types) != 1:
        raise TypeMismatch(f"rule mixes predicate types: {sorted(t.name for t in types)}")
    return next(iter(types))


def evaluate_literal(lit: Literal, cell: CellValue) -> bool:
    return evaluate(lit.predicate, cell) != lit.negated


def execute(rule: Rule, column: TypedColumn) -> int:
    """Row bitmask of the rule on the column. Empty cells never match,
    even under negated literals."""
    rtype = rule_type(rule)
    if rtype != column.column_type:
        raise TypeMismatch(
            f"rule over {rtype.name} cannot run on a {column.column_type.name} column"
        )
    n = len(column)
    all_rows = (1 << n) - 1
    non_empty = 0
    for i, cell in enumerate(column.cells):
        if not cell.is_empty:
            non_empty |= 1 << i
    result = 0
    for conj in rule.disjuncts:
        conj_mask = all_rows
        for lit in conj:
            mask = column_mask(lit.predicate, column)
            if lit.negated:
                mask = ~mask & all_rows
            conj_mask &= mask
            if not conj_mask:
                break
        result |= conj_mask
    return result & non_empty


def mask_to_bools(mask: int, n: int) -> list[bool]:
    return [bool(mask >> i & 1) for i in range(n)]


def canonicalize(rule: Rule) -> Rule:
    """Equal-semantics normal form: duplicate literals removed,
    contradictory conjunctions dropped, subsumed conjunctions removed,
    deterministic ordering applied."""
    conjunctions: list[tuple[Literal, ...]] = []
    for conj in rule.disjuncts:
        seen = dict.fromkeys(conj)
        predicates = {}
        contradictory = False
        for lit in seen:
            if lit.predicate in predicates and predicates[lit.predicate] != lit.negated:
                contradictory = True
                break
            predicates[lit.predicate] = lit.negated
        if contradictory:
            continue
        conjunctions.append(tuple(sorted(seen, key=Literal.sort_key)))
    if not conjunctions:
        raise Unsatisfiable("every conjunction is contradictory")
    unique = list(dict.fromkeys(conjunctions))
    kept = []
    sets = [frozenset(conj) for conj in unique]
    for i, conj in enumerate(unique):
        subsumed = any(j != i and sets[j] < sets[i] for j in range(len(unique)))
        if not subsumed:
            kept.append(conj)
    kept.sort(key=lambda conj: tuple(lit.sort_key() for lit in conj))
    return Rule(tuple(kept), rule.format)


# --- formula emission ------------------------------------------------------

def _emit_string(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def _emit_scalar(arg: object) -> str:
    if isinstance(arg, Decimal):
        return format_arg(arg)
    if isinstance(arg, datetime):
        date = f"DATE({arg.year},{arg.month},{arg.day})"
        if (arg.hour, arg.minute, arg.second) == (0, 0, 0):
            return date
        return f"{date}+TIME({arg.hour},{arg.minute},{arg.second})"
    return _emit_string(str(arg))


def _emit_atom(pred: Predicate, ref: str) -> str:
    kind = pred.kind
    if kind == PredicateKind.GREATER:
        return f"{ref}>{_emit_scalar(pred.args[0])}"
    if kind == PredicateKind.GREATER_EQUALS:
        return f"{ref}>={_emit_scalar(pred.args[0])}"
    if kind == PredicateKind.LESS:
        return f"{ref}<{_emit_scalar(pred.args[0])}"
    if kind == PredicateKind.LESS_EQUALS:
        return f"{ref}<={_emit_scalar(pred.args[0])}"
    if kind == PredicateKind.BETWEEN:
        lo, hi = pred.args
        return f"AND({ref}>={_emit_scalar(lo)},{ref}<={_emit_scalar(hi)})"
    if kind == PredicateKind.EQUALS:
        return f"{ref}={_emit_string(pred.args[0])}"
    if kind == PredicateKind.CONTAINS:
        return f"ISNUMBER(SEARCH({_emit_string(pred.args[0])},{ref}))"
    if kind == PredicateKind.STARTS_WITH:
        s = pred.args[0]
        return f"LEFT({ref},{len(s)})={_emit_string(s)}"
    s = pred.args[0]
    return f"RIGHT({ref},{len(s)})={_emit_string(s)}"


def _emit_literal_group(literals: tuple[Literal, ...], ref: str, fold: bool) -> list[str]:
    """Render a conjunction's literals: positives first; with fold on,
    two or more negations collapse into one NOT(OR(...))."""
    positives = [lit for lit in literals if not lit.negated]
    negatives = [lit for lit in literals if lit.negated]
    parts = [_emit_atom(lit.predicate, ref) for lit in positives]
    if fold and len(negatives) >= 2:
        inner = ",".join(_emit_atom(lit.predicate, ref) for lit in negatives)
        parts.append(f"NOT(OR({inner}))")
    else:
        parts.extend(f"NOT({_emit_atom(lit.predicate, ref)})" for lit in negatives)
    return parts


def _combine(op: str, parts: list[str]) -> str:
    if len(parts) == 1:
        return parts[0]
    return f"{op}({','.join(parts)})"


def emit_formula(rule: Rule, ref: SourceRef | str | None = None, *, fold: bool = False) -> str:
    """Spreadsheet formula over the column's reference cell.

    When every disjunct shares common literals, the shared part is factored
    out: (a∧s)∨(b∧s) emits as AND(OR(a,b),s). With ``fold`` on, runs of
    negated literals collapse to NOT(OR(...)).
    """
    if ref is None:
        ref = SourceRef()
    cell = ref.cell() if isinstance(ref, SourceRef) else str(ref)

    disjuncts = rule.disjuncts
    if len(disjuncts) >= 2:
        shared = frozenset(disjuncts[0])
        for conj in disjuncts[1:]:
            shared &= frozenset(conj)
        if shared:
            residuals = [
                tuple(lit for lit in conj if lit not in shared) for conj in disjuncts
            ]
            shared_sorted = tuple(sorted(shared, key=Literal.sort_key))
            or_parts = [
                _combine("AND", _emit_literal_group(res, cell, fold))
                for res in residuals
            ]
            and_parts = [_combine("OR", or_parts)]
            and_parts.extend(_emit_literal_group(shared_sorted, cell, fold))
            return _combine("AND", and_parts)
    conj_strings = [
        _combine("AND", _emit_literal_group(conj, cell, fold)) for conj in disjuncts
    ]
    return _combine("OR", conj_strings)


# --- JSON wire format ------------------------------------------------------

def rule_to_json(rule: Rule) -> dict:
    return {
        "format": rule.format,
        "disjuncts": [
            [
                {"predicate": predicate_to_json(lit.predicate), "negated": lit.negated}
                for lit in conj
            ]
            for conj in rule.disjuncts
        ],
    }


def parse_rule(obj: object) -> Rule:
    """Parse and validate canonical rule JSON; SchemaError carries the
    JSON-pointer path of the offending element."""
    if not isinstance(obj, dict):
        raise SchemaError("/", "expected a rule object")
    if "format" not in obj:
        raise SchemaError("/format", "missing required key")
    fmt = obj["format"]
    if not isinstance(fmt, str) or not fmt:
        raise SchemaError("/format", "expected a non-empty string")
    if "disjuncts" not in obj:
        raise SchemaError("/disjuncts", "missing required key")
    raw_disjuncts = obj["disjuncts"]
    if not isinstance(raw_disjuncts, list) or not raw_disjuncts:
        raise SchemaError("/disjuncts", "expected a non-empty array")
    disjuncts = []
    for i, raw_conj in enumerate(raw_disjuncts):
        if not isinstance(raw_conj, list) or not raw_conj:
            raise SchemaError(f"/disjuncts/{i}", "expected a non-empty array")
        literals = []
        for j, raw_lit in enumerate(raw_conj):
            path = f"/disjuncts/{i}/{j}"
            if not isinstance(raw_lit, dict):
                raise SchemaError(path, "expected a literal object")
            if "predicate" not in raw_lit:
                raise SchemaError(f"{path}/predicate", "missing required key")
            negated = raw_lit.get("negated", False)
            if not isinstance(negated, bool):
                raise SchemaError(f"{path}/negated", "expected a boolean")
            pred = predicate_from_json(raw_lit["predicate"], f"{path}/predicate")
            literals.append(Literal(pred, negated))
        disjuncts.append(tuple(literals))
    try:
        return canonicalize(Rule(tuple(disjuncts), fmt))
    except Unsatisfiable as exc:
        raise SchemaError("/disjuncts", str(exc)) from exc
