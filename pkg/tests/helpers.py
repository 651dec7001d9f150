"""Shared test data and pipeline helpers.

The two reference columns below are exercised throughout the suite; the
expected artifacts (pool sizes, cluster assignments, rules) were derived
by hand before the implementation existed and are frozen in the tests.
"""

from types import SimpleNamespace

from cfsynth import (
    Annotation,
    build_column,
    cluster,
    enumerate_candidates,
    generate_predicates,
    positional_labels,
    signatures,
)

# Work-order style identifiers: GW/AN prefixes, -F/-T suffixes.
IDS = ["GW2-T", "AN51-T", "GW105-T", "GW18", "AN47603-F", "GW19", "GW50-T", "GW12"]

# Single-digit scores; two cells below 5 get formatted.
NUMS = ["7", "3", "5", "2", "9", "4", "8", "1"]


def mask_of(rows) -> int:
    return sum(1 << r for r in rows)


def rows_of(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def pipeline(values, examples, *, name="c", config=None) -> SimpleNamespace:
    """Run column typing through clustering (and optionally candidate
    enumeration) and expose every intermediate product."""
    column = build_column(name, values)
    annotation = Annotation(tuple(examples))
    labeling = positional_labels(column, annotation)
    pool = generate_predicates(column)
    sigs = signatures(column, pool)
    clustering = cluster(labeling, sigs, len(pool))
    return SimpleNamespace(
        column=column,
        annotation=annotation,
        labeling=labeling,
        pool=pool,
        sigs=sigs,
        clustering=clustering,
    )


def candidates_for(values, examples, *, config=None):
    """Pipeline plus candidate enumeration for the first example's format."""
    p = pipeline(values, examples)
    p.candidates = enumerate_candidates(
        p.clustering, p.sigs, examples[0][1], p.pool, config
    )
    return p
