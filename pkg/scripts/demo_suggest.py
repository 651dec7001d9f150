#!/usr/bin/env python3
"""Walk through a suggestion session on a small identifier column.

Formats one cell yellow, prints the ranked suggestions with their
formulas and highlight masks, then refines with a second example of a
different shape and prints how the top suggestion changes.
"""

import json

from cfsynth import (
    Annotation,
    SuggestRequest,
    apply,
    build_column,
    rule_to_json,
    suggest,
)

IDS = [
    "GW2-T",
    "AN51-T",
    "GW105-T",
    "GW18",
    "AN47603-F",
    "GW19",
    "GW50-T",
    "GW12",
]


def show(title: str, response, column) -> None:
    print(f"\n== {title} ==")
    for fmt, ranked in response.suggestions.items():
        for i, s in enumerate(ranked, 1):
            rows = [r for r in range(len(column)) if s.mask >> r & 1]
            print(f"  [{fmt} #{i}] score={s.score:.2f}  {s.formula}")
            print(f"           matches rows {rows}")
    diag = response.diagnostics
    print(
        f"  ({diag.pool_size} predicates, {diag.cluster_rounds} cluster"
        f" rounds, {diag.elapsed_ms:.1f} ms)"
    )


def main() -> None:
    column = build_column("id", IDS)
    print("column:", ", ".join(IDS))

    first = suggest(
        SuggestRequest(
            column=column, annotation=Annotation(((3, "yellow"),)), top_k=3
        )
    )
    show('after formatting row 3 ("GW18")', first, column)

    refined = suggest(
        SuggestRequest(
            column=column,
            annotation=Annotation(((3, "yellow"), (4, "yellow"))),
            top_k=3,
        )
    )
    show('after also formatting row 4 ("AN47603-F")', refined, column)

    top = refined.suggestions["yellow"][0]
    applied = apply(top.rule, column)
    print("\n== applying the top suggestion ==")
    print("rule JSON:", json.dumps(rule_to_json(top.rule)))
    print("formula:  ", applied.formula)
    rows = [r for r in range(len(column)) if applied.mask >> r & 1]
    print("rows highlighted:", rows)


if __name__ == "__main__":
    main()
