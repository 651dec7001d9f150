"""Acceptance suite: every shipped guarantee, one test and one printed
PASS line each (visible with ``pytest -s`` or in captured output).

Covered guarantees:
  1. identifier-column scenario: the intended affix rule is in the top 3,
     confirmed by exhaustive search, in under a second;
  2. numeric scenario: two low examples yield a threshold rule whose
     formula compares against an unquoted numeric literal;
  3. refinement: a second format example of a different shape produces a
     candidate equivalent to the union-of-prefixes rule, and the reference
     rule emits in the AND(OR(...),NOT(...)) folded shape;
  4. oracle-equivalence sweep over 200 generated instances, >= 90% top-3
     recovery, under a minute;
  5. seven property suites at >= 1000 fuzz cases each;
  6. suggest latency on a 1000-row, 22-column table under 2 seconds;
  7. CLI and HTTP surfaces emit byte-identical rule JSON, and the HTTP
     surface reports schema errors with JSON-pointer paths.
"""

import json
import random
import re
import time

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from cfsynth import (
    Annotation,
    NoCandidates,
    NoPredicates,
    PredicateKind,
    RankerWeights,
    SuggestRequest,
    SynthesisConfig,
    build_column,
    canonicalize,
    cluster,
    column_mask,
    create_app,
    default_weights,
    emit_formula,
    execute,
    generate_predicates,
    learn_tree,
    oracle_search,
    parse_table,
    positional_labels,
    predicate_from_json,
    rank,
    rule_to_json,
    signatures,
    suggest,
    tree_to_rule,
)
from cfsynth.cli import main as cli_main
from cfsynth.clustering import MAX_ROUNDS
from cfsynth.errors import NoPositiveLeaf, Unsatisfiable
from cfsynth.rules import Literal, Rule
from cfsynth.table import LabelKind

from helpers import IDS, NUMS, mask_of


def _pred(kind: str, type_: str, *args: str):
    return predicate_from_json({"kind": kind, "type": type_, "args": list(args)})


def _passed(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: PASS{suffix}")


# ---------------------------------------------------------------- 1 ----


def test_identifier_column_reproduction():
    start = time.perf_counter()
    column = build_column("id", IDS)
    reference = canonicalize(
        Rule(
            (
                (
                    Literal(_pred("startsWith", "text", "GW"), False),
                    Literal(_pred("endsWith", "text", "-F"), True),
                    Literal(_pred("endsWith", "text", "-T"), True),
                ),
            ),
            "yellow",
        )
    )
    target = execute(reference, column)
    assert target == mask_of([3, 5, 7])

    resp = suggest(
        SuggestRequest(column=column, annotation=Annotation(((3, "yellow"),)))
    )
    top3 = resp.suggestions["yellow"]
    assert any(s.mask == target for s in top3)

    # independent confirmation over the affix predicates
    affix_pool = [
        p
        for p in generate_predicates(column)
        if p.kind in (PredicateKind.STARTS_WITH, PredicateKind.ENDS_WITH)
    ]
    witness = oracle_search(column, target, affix_pool)
    assert witness is not None
    assert execute(witness, column) == target

    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _passed("identifier-column reproduction", f"{elapsed * 1000:.0f} ms")


# ---------------------------------------------------------------- 2 ----


def test_numeric_threshold_reproduction():
    raw = "name,score\n" + "\n".join(f"r{i},{v}" for i, v in enumerate(NUMS))
    column = parse_table(raw)[1]
    resp = suggest(
        SuggestRequest(
            column=column, annotation=Annotation(((1, "green"), (3, "green")))
        )
    )
    top = resp.suggestions["green"][0]

    less_than_five = Rule(
        ((Literal(_pred("less", "numeric", "5"), False),),), "green"
    )
    assert top.mask == execute(less_than_five, column)

    assert top.formula == "B2<5"
    # the threshold must be an unquoted numeric literal: a quoted "5"
    # would compare text against numbers and never match
    assert '"' not in top.formula
    assert re.search(r"<5$", top.formula)
    _passed("numeric threshold reproduction", f"top-1 {top.formula}")


# ---------------------------------------------------------------- 3 ----


def test_refinement_with_second_format_example():
    column = build_column("id", IDS)
    reference = canonicalize(
        Rule(
            (
                (
                    Literal(_pred("startsWith", "text", "GW"), False),
                    Literal(_pred("endsWith", "text", "T"), True),
                ),
                (
                    Literal(_pred("startsWith", "text", "AN"), False),
                    Literal(_pred("endsWith", "text", "T"), True),
                ),
            ),
            "yellow",
        )
    )
    target = execute(reference, column)
    assert target == mask_of([3, 4, 5, 7])

    annotation = Annotation(((3, "yellow"), (4, "yellow")))
    labeling = positional_labels(column, annotation)
    pool = generate_predicates(column)
    sigs = signatures(column, pool)
    clustering = cluster(labeling, sigs, len(pool))
    from cfsynth import enumerate_candidates

    candidates = enumerate_candidates(clustering, sigs, "yellow", pool)
    equivalent = [
        c for c in candidates.candidates if execute(c.rule, column) == target
    ]
    assert equivalent

    folded = emit_formula(reference, column.source_ref, fold=True)
    assert folded == 'AND(OR(LEFT(A2,2)="AN",LEFT(A2,2)="GW"),NOT(RIGHT(A2,1)="T"))'
    assert re.fullmatch(r"AND\(OR\(.+\),NOT\(.+\)\)", folded)
    _passed(
        "refinement with second example",
        f"{len(equivalent)} equivalent candidates",
    )


# ---------------------------------------------------------------- 4 ----

_PREFERRED_KINDS = {
    PredicateKind.STARTS_WITH,
    PredicateKind.ENDS_WITH,
    PredicateKind.EQUALS,
    PredicateKind.BETWEEN,
    PredicateKind.LESS,
    PredicateKind.LESS_EQUALS,
    PredicateKind.GREATER,
    PredicateKind.GREATER_EQUALS,
}


def _weighted_sample(rng, pool, size):
    """Sample without replacement, preferring the affix/threshold forms
    users concretely format by over free-substring matches."""
    weights = [3 if p.kind in _PREFERRED_KINDS else 1 for p in pool]
    chosen = []
    idx = list(range(len(pool)))
    for _ in range(min(size, len(pool))):
        total = sum(weights[i] for i in idx)
        r = rng.random() * total
        acc = 0.0
        for pos, i in enumerate(idx):
            acc += weights[i]
            if r <= acc:
                chosen.append(pool[i])
                idx.pop(pos)
                break
    return chosen


def _random_column(rng):
    while True:
        numeric = rng.random() < 0.5
        n = rng.randint(15, 50)
        if numeric:
            values = [str(v) for v in rng.sample(range(1, 40), rng.randint(4, 5))]
        else:
            prefixes = rng.sample(["GW", "AN", "KL", "ZX"], 2)
            values = list(
                {
                    rng.choice(prefixes)
                    + str(rng.randint(1, 99))
                    + rng.choice(["-T", "-F", ""])
                    for _ in range(rng.randint(4, 5))
                }
            )
            if len(values) < 2:
                continue
        cells = [rng.choice(values) for _ in range(n)]
        if len(set(cells)) < 2:
            continue
        column = build_column("c", cells)
        try:
            pool = generate_predicates(column)
        except NoPredicates:
            continue
        return column, cells, pool


def _random_instance(rng):
    """Column, hidden rule (up to 2 disjuncts x 3 literals), its mask, and
    a top-down annotation of at most 3 examples.

    The labeled prefix must exhibit every distinct cell value: rows with
    equal values get equal predicate signatures, so any rule consistent
    with such a demonstration is execution-equivalent to the hidden rule,
    making exact-mask recovery a fair demand.
    """
    while True:
        column, cells, pool = _random_column(rng)
        n = len(column)
        for _ in range(60):
            disjuncts = []
            for _ in range(rng.choice([1, 1, 1, 2])):
                size = rng.choice([1, 1, 2, 2, 3])
                preds = _weighted_sample(rng, pool, size)
                negate_at = rng.randrange(len(preds)) if rng.random() < 0.25 else -1
                disjuncts.append(
                    tuple(Literal(p, j == negate_at) for j, p in enumerate(preds))
                )
            try:
                rule = canonicalize(Rule(tuple(disjuncts), "hl"))
            except Unsatisfiable:
                continue
            mask = execute(rule, column)
            if not (0 < mask.bit_count() < n):
                continue
            matched = [r for r in range(n) if mask >> r & 1]
            k = min(3, len(matched))
            last = matched[k - 1]
            if set(cells[: last + 1]) == set(cells):
                return column, pool, mask, matched[:k]


def test_oracle_equivalence_sweep():
    start = time.perf_counter()
    rng = random.Random(0xACCE55)
    confirmed = hits = 0
    for _ in range(200):
        column, pool, mask, examples = _random_instance(rng)
        witness = oracle_search(
            column, mask, pool, pool_limit=max(40, len(pool))
        )
        if witness is None:
            continue
        confirmed += 1
        annotation = Annotation(tuple((row, "hl") for row in examples))
        try:
            resp = suggest(SuggestRequest(column=column, annotation=annotation))
        except NoCandidates:
            continue
        if any(s.mask == mask for s in resp.suggestions["hl"]):
            hits += 1

    elapsed = time.perf_counter() - start
    assert confirmed > 0
    rate = hits / confirmed
    assert rate >= 0.90
    assert elapsed < 60.0
    _passed(
        "oracle-equivalence sweep",
        f"{hits}/{confirmed} = {rate:.1%} in {elapsed:.1f} s",
    )


# ---------------------------------------------------------------- 5 ----

_TEXT_VOCAB = ("GW1-T", "GW2", "AN5-F", "AN51", "kilo", "zip7")
_NUM_VOCAB = ("1", "2", "3.5", "7", "40", "900")
_DATE_VOCAB = ("2020-01-05", "2021-06-15", "2019-12-31")

_cells_strategy = st.one_of(
    st.lists(st.sampled_from(_TEXT_VOCAB + ("",)), min_size=2, max_size=10),
    st.lists(st.sampled_from(_NUM_VOCAB + ("",)), min_size=2, max_size=10),
    st.lists(st.sampled_from(_DATE_VOCAB + ("",)), min_size=2, max_size=10),
)


@settings(max_examples=1000)
@given(cells=_cells_strategy)
def _check_pool_strict_subset(cells):
    column = build_column("c", cells)
    try:
        pool = generate_predicates(column)
    except NoPredicates:
        return
    non_empty = column.non_empty_count
    for pred in pool:
        matches = column_mask(pred, column).bit_count()
        assert 0 < matches < non_empty


@settings(max_examples=1000)
@given(
    cells=st.lists(st.sampled_from(_NUM_VOCAB), min_size=2, max_size=8),
    probe=st.sampled_from(_TEXT_VOCAB + _DATE_VOCAB + ("",)),
)
def _check_evaluate_total_and_mismatch_false(cells, probe):
    from cfsynth import evaluate

    numeric_column = build_column("n", cells)
    try:
        pool = generate_predicates(numeric_column)
    except NoPredicates:
        return
    text_column = build_column("t", [probe, "kilo", "zip7"])
    for pred in pool:
        for cell in list(numeric_column.cells) + list(text_column.cells):
            result = evaluate(pred, cell)
            assert result is True or result is False
            if cell.is_empty or cell.number is None:
                assert result is False


@settings(max_examples=1000)
@given(cells=_cells_strategy, data=st.data())
def _check_tree_dnf_equivalence(cells, data):
    column = build_column("c", cells)
    try:
        pool = generate_predicates(column)
    except NoPredicates:
        return
    sigs = signatures(column, pool)
    n = len(column)
    labels = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    if all(labels) or not any(labels):
        return
    tree = learn_tree(
        sigs, labels, [1.0] * n, list(range(len(pool))), SynthesisConfig()
    )
    if tree is None:
        return
    try:
        rule = tree_to_rule(tree, pool, "f")
    except NoPositiveLeaf:
        return
    mask = execute(rule, column)
    for i in range(n):
        if not column.cells[i].is_empty:
            assert bool(mask >> i & 1) == tree.classify(sigs[i])


@settings(max_examples=1000)
@given(cells=_cells_strategy, data=st.data())
def _check_canonicalize_preserves_execution(cells, data):
    column = build_column("c", cells)
    try:
        pool = generate_predicates(column)
    except NoPredicates:
        return
    n_disjuncts = data.draw(st.integers(1, 3))
    disjuncts = []
    for _ in range(n_disjuncts):
        size = data.draw(st.integers(1, 3))
        picks = data.draw(
            st.lists(
                st.integers(0, len(pool) - 1), min_size=size, max_size=size
            )
        )
        negs = data.draw(st.lists(st.booleans(), min_size=size, max_size=size))
        disjuncts.append(
            tuple(Literal(pool[i], neg) for i, neg in zip(picks, negs))
        )
    original = Rule(tuple(disjuncts), "f")
    try:
        canonical = canonicalize(original)
    except Unsatisfiable:
        assert execute(original, column) == 0
        return
    assert execute(canonical, column) == execute(original, column)
    assert canonicalize(canonical) == canonical


@settings(max_examples=1000)
@given(cells=_cells_strategy, data=st.data())
def _check_clustering_pins_and_terminates(cells, data):
    column = build_column("c", cells)
    try:
        pool = generate_predicates(column)
    except NoPredicates:
        return
    sigs = signatures(column, pool)
    n = len(column)
    k = data.draw(st.integers(1, min(3, n)))
    rows = data.draw(
        st.lists(st.integers(0, n - 1), unique=True, min_size=k, max_size=k)
    )
    formats = data.draw(
        st.lists(st.sampled_from(["a", "b"]), min_size=k, max_size=k)
    )
    annotation = Annotation(tuple(zip(sorted(rows), formats)))
    labeling = positional_labels(column, annotation)
    clustering = cluster(labeling, sigs, len(pool))
    assert len(clustering.rounds) <= MAX_ROUNDS + 1
    assert clustering.rounds[-1] == clustering.assignment
    for i, label in enumerate(labeling.labels):
        if label.kind == LabelKind.FORMAT:
            assert clustering.pinned[i]
            assert clustering.assignment[i] == clustering.cluster_of_format(
                label.format_id
            )
        elif label.kind == LabelKind.INTENTIONALLY_UNFORMATTED:
            assert clustering.pinned[i]
            assert clustering.assignment[i] == 0
        else:
            assert not clustering.pinned[i]


@settings(max_examples=1000)
@given(cells=_cells_strategy, data=st.data())
def _check_end_to_end_determinism(cells, data):
    column = build_column("c", cells)
    n = len(column)
    row = data.draw(st.integers(0, n - 1))
    annotation = Annotation(((row, "g"),))

    def run() -> str:
        try:
            resp = suggest(SuggestRequest(column=column, annotation=annotation))
        except (NoPredicates, NoCandidates) as exc:
            return f"{type(exc).__name__}: {exc}"
        obj = resp.to_json(n)
        obj["diagnostics"].pop("elapsed_ms")
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    assert run() == run()


def _make_rank_fixture():
    column = build_column("id", IDS)
    annotation = Annotation(((3, "yellow"),))
    labeling = positional_labels(column, annotation)
    pool = generate_predicates(column)
    sigs = signatures(column, pool)
    clustering = cluster(labeling, sigs, len(pool))
    from cfsynth import enumerate_candidates

    candidates = enumerate_candidates(clustering, sigs, "yellow", pool)
    base_order = [
        json.dumps(rule_to_json(s.rule), separators=(",", ":"))
        for s in rank(candidates, column, clustering)
    ]
    return column, clustering, candidates, base_order


_RANK_FIXTURE = _make_rank_fixture()


@settings(max_examples=1000)
@given(
    scale=st.floats(0.01, 100.0, allow_nan=False, allow_infinity=False),
    shift=st.floats(-50.0, 50.0, allow_nan=False, allow_infinity=False),
)
def _check_rank_order_invariance(scale, shift):
    column, clustering, candidates, base_order = _RANK_FIXTURE
    base = default_weights()
    transformed = RankerWeights(
        weights={k: v * scale for k, v in base.weights.items()},
        bias=base.bias * scale + shift,
    )
    order = [
        json.dumps(rule_to_json(s.rule), separators=(",", ":"))
        for s in rank(candidates, column, clustering, weights=transformed)
    ]
    assert order == base_order


def test_property_suites():
    suites = [
        ("predicate pools match strict subsets", _check_pool_strict_subset),
        (
            "evaluate is total and false on type mismatch",
            _check_evaluate_total_and_mismatch_false,
        ),
        ("trees and extracted rules agree", _check_tree_dnf_equivalence),
        (
            "canonicalize preserves execution",
            _check_canonicalize_preserves_execution,
        ),
        (
            "clustering honors pins and terminates",
            _check_clustering_pins_and_terminates,
        ),
        ("suggest is deterministic", _check_end_to_end_determinism),
        (
            "rank order invariant under positive affine transforms",
            _check_rank_order_invariance,
        ),
    ]
    for name, check in suites:
        check()
        print(f"  property suite ok: {name}")
    _passed("property suites", f"{len(suites)} suites x 1000 cases")


# ---------------------------------------------------------------- 6 ----


def test_latency_large_table():
    rng = random.Random(7)
    n_rows = 1000

    id_vocab = []
    for prefix in ("GW", "AN"):
        for num in rng.sample(range(1, 400), 60):
            id_vocab.append(prefix + str(num) + rng.choice(["-T", "-F", ""]))
    word_vocab = ["alpha", "beta", "gamma", "delta", "epsilon"]

    header = ["work_id"] + [f"attr{j}" for j in range(1, 22)]
    lines = [",".join(header)]
    ids = []
    for _ in range(n_rows):
        work_id = rng.choice(id_vocab)
        ids.append(work_id)
        row = [work_id]
        for j in range(1, 22):
            if j % 2:
                row.append(str(rng.randint(0, 5000)))
            else:
                row.append(rng.choice(word_vocab))
        lines.append(",".join(row))
    raw = "\n".join(lines)

    columns = parse_table(raw)
    assert len(columns) == 22
    column = columns[0]
    gw_rows = [i for i, v in enumerate(ids) if v.startswith("GW")][:2]
    annotation = Annotation(tuple((r, "green") for r in gw_rows))

    start = time.perf_counter()
    resp = suggest(SuggestRequest(column=column, annotation=annotation))
    elapsed = time.perf_counter() - start

    assert resp.suggestions["green"]
    assert elapsed < 2.0
    _passed("large-table latency", f"{elapsed * 1000:.0f} ms for {n_rows} rows")


# ---------------------------------------------------------------- 7 ----


def test_interface_conformance(tmp_path, capsys):
    ids_csv = "id\n" + "\n".join(IDS) + "\n"
    (tmp_path / "table.csv").write_text(ids_csv)
    (tmp_path / "examples.json").write_text(
        json.dumps({"column": "id", "examples": [{"row": 3, "format": "yellow"}]})
    )
    code = cli_main(
        [
            "suggest",
            "--input", str(tmp_path / "table.csv"),
            "--examples", str(tmp_path / "examples.json"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    cli_rules = json.loads(out)

    client = TestClient(create_app())
    resp = client.post(
        "/v1/suggest",
        json={"table": ids_csv, "examples": [{"row": 3, "format": "yellow"}]},
    )
    assert resp.status_code == 200
    service_rules = [s["rule"] for s in resp.json()["suggestions"]["yellow"]]

    def compact(obj) -> str:
        return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)

    assert len(cli_rules) == len(service_rules)
    for cli_rule, service_rule in zip(cli_rules, service_rules):
        fragment = compact(service_rule)
        assert fragment.encode() in resp.content
        assert compact(cli_rule).encode() in out.encode()
        assert compact(cli_rule) == fragment

    # schema diagnostics carry JSON-pointer paths
    missing = client.post("/v1/suggest", json={"table": ids_csv})
    assert missing.status_code == 400
    assert missing.json()["error"]["path"] == "/examples"
    bad_row = client.post(
        "/v1/suggest",
        json={"table": ids_csv, "examples": [{"row": -2, "format": "y"}]},
    )
    assert bad_row.status_code == 400
    assert bad_row.json()["error"]["path"] == "/examples/0/row"
    _passed("interface conformance", f"{len(cli_rules)} rules byte-identical")
