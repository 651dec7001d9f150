"""Command-line interface: ``cfsynth suggest|apply|serve``.

Exit codes: 0 on success, 2 when the engine finds no usable predicates or
no candidate rules (diagnostic JSON on stderr), and 1 for every input or
usage problem (bad files, schema violations, unknown flags).

Rule JSON printed by ``--emit json`` uses the same canonical serialization
as the HTTP service, so both surfaces produce byte-identical rule objects
for identical inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .clustering import cluster
from .engine import SuggestRequest, apply, suggest
from .errors import (
    CfSynthError,
    NoCandidates,
    NoPredicates,
    SchemaError,
)
from .predicates import generate_predicates, signatures
from .ranking import RankerWeights
from .rules import Rule, mask_to_bools, parse_rule, rule_to_json
from .service import ServiceConfig, resolve_weights, serve
from .synthesis import SynthesisConfig, enumerate_candidates
from .table import (
    Annotation,
    TypedColumn,
    annotation_from_json,
    lowercase_column,
    parse_table,
    positional_labels,
    resolve_column,
)

_CONFIG_FIELDS = ("max_tree_nodes", "accuracy_floor", "labeled_weight", "max_candidates")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the engine reserves 2
    for no-result outcomes, so usage problems are remapped to exit 1."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise _UsageError(message)


def _dump_json(obj: object) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_json(path: str, what: str) -> object:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{what} file {path!r} is not valid JSON: {exc}") from exc


def _column_selector(text: str) -> str | int:
    """A numeric --column value addresses by 0-based index, otherwise by
    header name."""
    if text.isdigit():
        return int(text)
    return text


def _load_column(args: argparse.Namespace, selector: str | int) -> TypedColumn:
    raw = _read_text(args.input)
    columns = parse_table(raw, delimiter=args.delimiter, header=not args.no_header)
    column = resolve_column(columns, selector)
    if args.case_insensitive:
        column = lowercase_column(column)
    return column


def _load_synthesis_config(path: str | None) -> SynthesisConfig:
    if path is None:
        return SynthesisConfig()
    obj = _read_json(path, "config")
    if not isinstance(obj, dict):
        raise _UsageError(f"config file {path!r} must hold a JSON object")
    unknown = sorted(set(obj) - set(_CONFIG_FIELDS))
    if unknown:
        raise _UsageError(f"config file {path!r} has unknown keys: {', '.join(unknown)}")
    try:
        return SynthesisConfig(**obj)
    except (TypeError, ValueError) as exc:
        raise _UsageError(f"config file {path!r}: {exc}") from exc


def _load_weights(path: str | None) -> RankerWeights:
    try:
        return resolve_weights(path)
    except (OSError, ValueError) as exc:
        raise _UsageError(f"weights: {exc}") from exc


def _mask_csv(header: list[str], rows: list[list[str]]) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _debug_dump(
    column: TypedColumn, annotation: Annotation, config: SynthesisConfig
) -> None:
    """Re-derive the intermediate pipeline state (deterministic) and write
    it to stderr as JSON lines."""
    pool = generate_predicates(column)
    sigs = signatures(column, pool)
    labeling = positional_labels(column, annotation)
    clustering = cluster(labeling, sigs, len(pool))
    print(_dump_json({"debug": "pool", "size": len(pool)}), file=sys.stderr)
    for i, assignment in enumerate(clustering.rounds):
        print(
            _dump_json(
                {"debug": "cluster_round", "round": i, "assignment": list(assignment)}
            ),
            file=sys.stderr,
        )
    for fid in clustering.format_order:
        try:
            cset = enumerate_candidates(clustering, sigs, fid, pool, config)
        except CfSynthError as exc:
            print(
                _dump_json(
                    {"debug": "failure", "format": fid, "error": type(exc).__name__}
                ),
                file=sys.stderr,
            )
            continue
        for j, cand in enumerate(cset.candidates):
            print(
                _dump_json(
                    {
                        "debug": "tree",
                        "format": fid,
                        "index": j,
                        "train_accuracy": cand.train_accuracy,
                        "tree": cand.tree.to_json(pool),
                    }
                ),
                file=sys.stderr,
            )


def _cmd_suggest(args: argparse.Namespace) -> int:
    examples_obj = _read_json(args.examples, "examples")
    if args.column is not None:
        if not isinstance(examples_obj, dict):
            raise SchemaError("/", "expected a JSON object")
        examples_obj = {**examples_obj, "column": _column_selector(args.column)}
    selector, annotation = annotation_from_json(examples_obj)
    column = _load_column(args, selector)
    config = _load_synthesis_config(args.config)
    weights = _load_weights(args.weights)
    if args.debug:
        _debug_dump(column, annotation, config)
    response = suggest(
        SuggestRequest(
            column=column,
            annotation=annotation,
            config=config,
            top_k=args.top,
            weights=weights,
            fold=args.not_folding,
        )
    )
    ordered = [
        (fid, s) for fid in response.suggestions for s in response.suggestions[fid]
    ]
    if args.emit == "json":
        print(_dump_json([rule_to_json(s.rule) for _, s in ordered]))
    elif args.emit == "formula":
        for _, s in ordered:
            print(s.formula)
    else:  # mask: one true/false column per format, from its top suggestion
        format_ids = list(response.suggestions)
        top = {fid: response.suggestions[fid][0] for fid in format_ids}
        rows = []
        for i in range(len(column)):
            row = [str(i)]
            for fid in format_ids:
                row.append("true" if top[fid].mask >> i & 1 else "false")
            rows.append(row)
        sys.stdout.write(_mask_csv(["row", *format_ids], rows))
    return 0


def _cmd_apply(args: argparse.Namespace) -> int:
    rule_obj = _read_json(args.rule, "rule")
    rule = parse_rule(rule_obj)
    selector = _column_selector(args.column) if args.column is not None else 0
    column = _load_column(args, selector)
    result = apply(rule, column, fold=args.not_folding)
    if args.emit == "json":
        print(_dump_json(result.to_json(len(column))))
    elif args.emit == "formula":
        print(result.formula)
    else:
        bools = mask_to_bools(result.mask, len(column))
        rows = [[str(i), "true" if b else "false"] for i, b in enumerate(bools)]
        sys.stdout.write(_mask_csv(["row", "match"], rows))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = ServiceConfig(
            host=args.host,
            port=args.port,
            weights_path=args.weights,
            max_request_bytes=args.max_bytes,
            log_level=args.log_level,
            handraise_threshold=args.handraise_threshold,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    serve(config)
    return 0


def _add_table_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="table CSV file, or - for stdin")
    sub.add_argument("--column", help="column name or 0-based index")
    sub.add_argument("--delimiter", default=",", help="CSV field delimiter")
    sub.add_argument(
        "--no-header", action="store_true", help="table has no header row"
    )
    sub.add_argument(
        "--case-insensitive",
        action="store_true",
        help="lower-case cell text before matching",
    )
    sub.add_argument(
        "--not-folding",
        action="store_true",
        help="group negated conditions under a single NOT(OR(...)) in formulas",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfsynth", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    p_suggest = commands.add_parser(
        "suggest", help="learn formatting rules from example cells"
    )
    _add_table_flags(p_suggest)
    p_suggest.add_argument(
        "--examples", required=True, help="annotation JSON file ({column, examples})"
    )
    p_suggest.add_argument("--top", type=int, default=3, help="suggestions per format")
    p_suggest.add_argument(
        "--emit", choices=("json", "formula", "mask"), default="json"
    )
    p_suggest.add_argument("--config", help="synthesis parameters JSON file")
    p_suggest.add_argument("--weights", help="ranker weights JSON file")
    p_suggest.add_argument(
        "--debug",
        action="store_true",
        help="dump cluster rounds and decision trees to stderr as JSON lines",
    )

    p_apply = commands.add_parser("apply", help="evaluate a stored rule on a table")
    _add_table_flags(p_apply)
    p_apply.add_argument("--rule", required=True, help="rule JSON file, or - for stdin")
    p_apply.add_argument(
        "--emit", choices=("json", "formula", "mask"), default="json"
    )

    p_serve = commands.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8731)
    p_serve.add_argument("--weights", help="ranker weights JSON file")
    p_serve.add_argument(
        "--max-bytes", type=int, default=5 * 1024 * 1024, help="request size limit"
    )
    p_serve.add_argument("--log-level", default="info")
    p_serve.add_argument("--handraise-threshold", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "suggest":
            if args.top < 1:
                raise _UsageError("--top must be >= 1")
            return _cmd_suggest(args)
        if args.command == "apply":
            return _cmd_apply(args)
        return _cmd_serve(args)
    except _UsageError as exc:
        print(f"cfsynth: error: {exc}", file=sys.stderr)
        return 1
    except (NoPredicates, NoCandidates) as exc:
        code = "no_predicates" if isinstance(exc, NoPredicates) else "no_candidates"
        print(_dump_json({"error": code, "message": str(exc)}), file=sys.stderr)
        return 2
    except CfSynthError as exc:
        print(f"cfsynth: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cfsynth: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
