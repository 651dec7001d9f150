#!/usr/bin/env python3
"""Measure suggest() latency on a generated wide table.

Builds a CSV with one identifier column plus alternating numeric/word
attribute columns, annotates two identifier cells, and times the full
pipeline (parse excluded / included reported separately).
"""

import argparse
import random
import statistics
import time

from cfsynth import Annotation, SuggestRequest, parse_table, suggest


def build_csv(rows: int, cols: int, seed: int) -> tuple[str, list[str]]:
    rng = random.Random(seed)
    id_vocab = []
    for prefix in ("GW", "AN"):
        for num in rng.sample(range(1, 400), 60):
            id_vocab.append(prefix + str(num) + rng.choice(["-T", "-F", ""]))
    words = ["alpha", "beta", "gamma", "delta", "epsilon"]

    header = ["work_id"] + [f"attr{j}" for j in range(1, cols)]
    lines = [",".join(header)]
    ids = []
    for _ in range(rows):
        work_id = rng.choice(id_vocab)
        ids.append(work_id)
        row = [work_id]
        for j in range(1, cols):
            row.append(str(rng.randint(0, 5000)) if j % 2 else rng.choice(words))
        lines.append(",".join(row))
    return "\n".join(lines), ids


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=1000)
    ap.add_argument("--cols", type=int, default=22)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    raw, ids = build_csv(args.rows, args.cols, args.seed)

    t0 = time.perf_counter()
    columns = parse_table(raw)
    parse_ms = (time.perf_counter() - t0) * 1000

    column = columns[0]
    gw_rows = [i for i, v in enumerate(ids) if v.startswith("GW")][:2]
    annotation = Annotation(tuple((r, "green") for r in gw_rows))
    request = SuggestRequest(column=column, annotation=annotation)

    timings = []
    for _ in range(args.repeats):
        t0 = time.perf_counter()
        response = suggest(request)
        timings.append((time.perf_counter() - t0) * 1000)

    diag = response.diagnostics
    print(f"table: {args.rows} rows x {args.cols} columns (seed {args.seed})")
    print(f"parse: {parse_ms:.1f} ms")
    print(
        f"suggest: median {statistics.median(timings):.1f} ms over"
        f" {args.repeats} runs (min {min(timings):.1f}, max {max(timings):.1f})"
    )
    print(
        f"pipeline: {diag.pool_size} predicates, {diag.cluster_rounds} cluster"
        f" rounds, {sum(diag.candidates.values())} candidates"
    )
    print("top formula:", response.suggestions["green"][0].formula)


if __name__ == "__main__":
    main()
