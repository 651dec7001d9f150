"""End-to-end pipeline: labeled column in, ranked rule suggestions out.

``suggest`` composes positional labeling, predicate generation, signature
computation, clustering, per-format candidate enumeration, and ranking.
``apply`` executes one rule and emits its formula. ``oracle_search`` is an
independent brute-force reference used by tests to validate synthesized
rules against ground truth.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field

from .clustering import Clustering, cluster
from .errors import NoCandidates, PoolTooLarge
from .predicates import Predicate, column_mask, generate_predicates, signatures
from .ranking import RankedSuggestion, RankerWeights, default_weights, rank
from .rules import Literal, Rule, canonicalize, emit_formula, execute, mask_to_bools, rule_to_json
from .synthesis import SynthesisConfig, enumerate_candidates
from .table import Annotation, TypedColumn, positional_labels


@dataclass(frozen=True)
class SuggestRequest:
    column: TypedColumn
    annotation: Annotation
    config: SynthesisConfig = field(default_factory=SynthesisConfig)
    top_k: int = 3
    weights: RankerWeights | None = None
    fold: bool = False

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass(frozen=True)
class Diagnostics:
    """Structured run report; ``failures`` maps a format id to a machine-
    readable reason code when that format produced no candidates."""

    pool_size: int
    cluster_rounds: int
    candidates: dict[str, int]
    failures: dict[str, str]
    elapsed_ms: float

    def to_json(self) -> dict:
        return {
            "pool_size": self.pool_size,
            "cluster_rounds": self.cluster_rounds,
            "candidates": dict(self.candidates),
            "failures": dict(self.failures),
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass(frozen=True)
class SuggestResponse:
    suggestions: dict[str, list[RankedSuggestion]]
    diagnostics: Diagnostics
    clustering: Clustering

    def to_json(self, column_length: int | None = None) -> dict:
        n = column_length
        return {
            "suggestions": {
                fmt: [suggestion_to_json(s, n) for s in items]
                for fmt, items in self.suggestions.items()
            },
            "diagnostics": self.diagnostics.to_json(),
        }


def suggestion_to_json(s: RankedSuggestion, column_length: int | None = None) -> dict:
    n = column_length if column_length is not None else s.mask.bit_length()
    return {
        "rule": rule_to_json(s.rule),
        "formula": s.formula,
        "mask": mask_to_bools(s.mask, n),
        "score": s.score,
        "features": s.features.as_dict(),
    }


def suggest(req: SuggestRequest) -> SuggestResponse:
    """Run the full pipeline. Raises NoPredicates when the column yields no
    usable predicates, NoCandidates when every requested format fails."""
    start = time.perf_counter()
    labeling = positional_labels(req.column, req.annotation)
    pool = generate_predicates(req.column)
    sigs = signatures(req.column, pool)
    clustering = cluster(labeling, sigs, len(pool))
    weights = req.weights if req.weights is not None else default_weights()

    suggestions: dict[str, list[RankedSuggestion]] = {}
    candidate_counts: dict[str, int] = {}
    failures: dict[str, str] = {}
    for fmt in req.annotation.format_ids:
        try:
            candidate_set = enumerate_candidates(
                clustering, sigs, fmt, pool, req.config
            )
        except NoCandidates:
            failures[fmt] = "no_candidates"
            candidate_counts[fmt] = 0
            continue
        candidate_counts[fmt] = len(candidate_set.candidates)
        ranked = rank(
            candidate_set,
            req.column,
            clustering,
            weights,
            req.config.labeled_weight,
            fold=req.fold,
        )
        suggestions[fmt] = ranked[: req.top_k]
    if not suggestions:
        raise NoCandidates(
            "no rule candidate found for any format; more examples needed"
        )
    elapsed_ms = (time.perf_counter() - start) * 1000
    diagnostics = Diagnostics(
        pool_size=len(pool),
        cluster_rounds=len(clustering.rounds),
        candidates=candidate_counts,
        failures=failures,
        elapsed_ms=elapsed_ms,
    )
    return SuggestResponse(suggestions, diagnostics, clustering)


@dataclass(frozen=True)
class ApplyResult:
    mask: int
    formula: str
    warnings: tuple[str, ...] = ()

    def to_json(self, column_length: int) -> dict:
        return {
            "mask": mask_to_bools(self.mask, column_length),
            "formula": self.formula,
            "warnings": list(self.warnings),
        }


def apply(rule: Rule, column: TypedColumn, *, fold: bool = False) -> ApplyResult:
    """Execute a rule and emit its formula; an all-false mask is legal but
    flagged so callers can warn."""
    mask = execute(rule, column)
    formula = emit_formula(rule, column.source_ref, fold=fold)
    warnings = ("empty_mask",) if mask == 0 else ()
    return ApplyResult(mask, formula, warnings)


DEFAULT_ORACLE_POOL_LIMIT = 40


def oracle_search(
    column: TypedColumn,
    truth_mask: int,
    pool: list[Predicate],
    max_disjuncts: int = 2,
    max_literals_per: int = 3,
    format_id: str = "oracle",
    pool_limit: int = DEFAULT_ORACLE_POOL_LIMIT,
) -> Rule | None:
    """Exhaustive DNF search for the smallest rule matching ``truth_mask``.

    Enumeration order: total literal count ascending, then disjunct count,
    then canonical serialization; the first exact match wins. Intended for
    tests; refuses pools above ``pool_limit``.
    """
    if len(pool) > pool_limit:
        raise PoolTooLarge(
            f"oracle search capped at {pool_limit} predicates, got {len(pool)}"
        )
    n = len(column)
    all_rows = (1 << n) - 1
    non_empty = 0
    for i, cell in enumerate(column.cells):
        if not cell.is_empty:
            non_empty |= 1 << i
    if truth_mask & ~non_empty:
        return None  # no rule can ever match an empty cell

    positive_masks = [column_mask(p, column) & non_empty for p in pool]

    # All conjunctions up to the size bound whose mask is consistent
    # (a disjunct matching outside the truth can never participate).
    conjunctions: list[tuple[tuple[tuple[int, bool], ...], int]] = []
    order = sorted(range(len(pool)), key=lambda i: pool[i].sort_key())
    for size in range(1, max_literals_per + 1):
        for combo in itertools.combinations(order, size):
            for polarity in itertools.product((False, True), repeat=size):
                mask = non_empty
                for pid, negated in zip(combo, polarity):
                    pm = positive_masks[pid]
                    mask &= (~pm & all_rows) if negated else pm
                    if not mask:
                        break
                if mask and mask & ~truth_mask == 0:
                    literals = tuple(zip(combo, polarity))
                    conjunctions.append((literals, mask))

    def to_rule(parts: tuple[tuple[tuple[int, bool], ...], ...]) -> Rule:
        disjuncts = tuple(
            tuple(Literal(pool[pid], neg) for pid, neg in literals)
            for literals, _ in parts
        )
        return canonicalize(Rule(disjuncts, format_id))

    def serial(parts) -> str:
        return json.dumps(rule_to_json(to_rule(parts)), separators=(",", ":"))

    by_size: dict[int, list[tuple[tuple[tuple[int, bool], ...], int]]] = {}
    for conj in conjunctions:
        by_size.setdefault(len(conj[0]), []).append(conj)

    max_total = max_disjuncts * max_literals_per
    for total in range(1, max_total + 1):
        for d in range(1, max_disjuncts + 1):
            if d == 1:
                group = by_size.get(total, [])
                hits = [(c,) for c in group if c[1] == truth_mask]
            elif d == 2:
                hits = []
                for size_a in range(1, max_literals_per + 1):
                    size_b = total - size_a
                    if size_b < size_a or size_b > max_literals_per:
                        continue
                    group_a = by_size.get(size_a, [])
                    group_b = by_size.get(size_b, [])
                    if size_a == size_b:
                        pairs = itertools.combinations(group_a, 2)
                    else:
                        pairs = itertools.product(group_a, group_b)
                    for a, b in pairs:
                        if a[1] | b[1] == truth_mask:
                            hits.append((a, b))
            else:
                hits = []
                for sizes in itertools.combinations_with_replacement(
                    range(1, max_literals_per + 1), d
                ):
                    if sum(sizes) != total:
                        continue
                    groups = [by_size.get(s, []) for s in sizes]
                    for parts in itertools.product(*groups):
                        if len(set(p[0] for p in parts)) < d:
                            continue
                        union = 0
                        for _, m in parts:
                            union |= m
                        if union == truth_mask:
                            hits.append(tuple(parts))
            if hits:
                return to_rule(min(hits, key=serial))
    return None
