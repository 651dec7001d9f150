"""Semi-supervised clustering of rows by predicate-signature similarity.

Rows the user labeled (examples, and rows above/between them that were
intentionally left unformatted) are pinned to their clusters; remaining
rows are assigned iteratively to the nearest cluster, where nearness is
the sum of the minimum and maximum symmetric-difference distance to the
cluster's current members. The result hypothesizes a format label for
every row, which rule learning then treats as training data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptyCluster, NoExamples
from .table import LabelKind, PositionalLabeling

MAX_ROUNDS = 20


@dataclass(frozen=True)
class Clustering:
    """Result: cluster 0 is the no-format cluster; clusters 1..k-1
    correspond to format ids in first-appearance (row-ascending) order."""

    k: int
    assignment: tuple[int, ...]
    pinned: tuple[bool, ...]
    format_order: tuple[str, ...]
    rounds: tuple[tuple[int, ...], ...]

    def cluster_of_format(self, format_id: str) -> int:
        return 1 + self.format_order.index(format_id)

    def rows_in(self, cluster_id: int) -> list[int]:
        return [i for i, c in enumerate(self.assignment) if c == cluster_id]


def distance(a: int, b: int) -> int:
    """Size of the symmetric difference of two predicate signatures."""
    return (a ^ b).bit_count()


def assignment_score(row_sig: int, cluster_member_sigs: list[int]) -> int:
    """Min plus max distance from the row to the cluster's members."""
    if not cluster_member_sigs:
        raise EmptyCluster("cannot score against an empty cluster")
    lo = hi = distance(row_sig, cluster_member_sigs[0])
    for sig in cluster_member_sigs[1:]:
        d = distance(row_sig, sig)
        if d < lo:
            lo = d
        elif d > hi:
            hi = d
    return lo + hi


def _score(row_sig: int, member_sigs: list[int], own: bool) -> float:
    """Score with the conventions the iteration needs: an empty foreign
    cluster is unreachable (+inf); a cluster whose only member is the row
    itself anchors it (score 0)."""
    if not member_sigs:
        return 0.0 if own else math.inf
    return float(assignment_score(row_sig, member_sigs))


def cluster(
    labeling: PositionalLabeling,
    sigs: list[int],
    pool_size: int,
    max_rounds: int = MAX_ROUNDS,
) -> Clustering:
    """Assign every row a cluster, keeping labeled rows pinned.

    Unassigned rows are seeded from the pinned members only, then
    reassigned in synchronous rounds (scores computed against the previous
    round's memberships, excluding the row itself) until a fixed point or
    ``max_rounds``. Ties go to the lower cluster id, favoring no-format.

    When no row is pinned to the no-format cluster (the sole example sits
    on the first row), the cluster starts empty: the unassigned row
    farthest from its closest format cluster seeds it, provided that score
    exceeds half the predicate pool size.
    """
    n = len(sigs)
    if len(labeling.labels) != n:
        raise ValueError("labeling and signatures disagree on row count")
    format_order: list[str] = []
    for lab in labeling.labels:
        if lab.kind == LabelKind.FORMAT and lab.format_id not in format_order:
            format_order.append(lab.format_id)
    if not format_order:
        raise NoExamples("clustering needs at least one formatted example row")
    k = len(format_order) + 1
    format_cluster = {fid: i + 1 for i, fid in enumerate(format_order)}

    assignment = [0] * n
    pinned = [False] * n
    unassigned: list[int] = []
    for i, lab in enumerate(labeling.labels):
        if lab.kind == LabelKind.FORMAT:
            assignment[i] = format_cluster[lab.format_id]
            pinned[i] = True
        elif lab.kind == LabelKind.INTENTIONALLY_UNFORMATTED:
            pinned[i] = True
        else:
            unassigned.append(i)

    members: list[list[int]] = [[] for _ in range(k)]
    for i in range(n):
        if pinned[i]:
            members[assignment[i]].append(sigs[i])

    # Degenerate seeding: give the empty no-format cluster one member when
    # some unassigned row is far enough from every format cluster.
    if not members[0] and unassigned:
        farthest_row = -1
        farthest_score = -1.0
        for i in unassigned:
            score = min(_score(sigs[i], members[c], False) for c in range(1, k))
            if score > farthest_score:
                farthest_score = score
                farthest_row = i
        if farthest_score > pool_size / 2:
            assignment[farthest_row] = 0
            members[0].append(sigs[farthest_row])
            unassigned_init = [i for i in unassigned if i != farthest_row]
        else:
            unassigned_init = list(unassigned)
    else:
        unassigned_init = list(unassigned)

    # Initialization: place each unassigned row by score against the pinned
    # (plus seeded) members only.
    for i in unassigned_init:
        scores = [_score(sigs[i], members[c], False) for c in range(k)]
        assignment[i] = min(range(k), key=lambda c: (scores[c], c))

    rounds: list[tuple[int, ...]] = [tuple(assignment)]
    for _ in range(max_rounds):
        prev = assignment
        prev_rows: list[list[int]] = [[] for _ in range(k)]
        for i in range(n):
            prev_rows[prev[i]].append(i)
        nxt = list(prev)
        for i in unassigned:
            scores = []
            for c in range(k):
                member_sigs = [sigs[j] for j in prev_rows[c] if j != i]
                scores.append(_score(sigs[i], member_sigs, own=prev[i] == c))
            nxt[i] = min(range(k), key=lambda c: (scores[c], c))
        rounds.append(tuple(nxt))
        if nxt == prev:
            assignment = nxt
            break
        assignment = nxt

    return Clustering(
        k=k,
        assignment=tuple(assignment),
        pinned=tuple(pinned),
        format_order=tuple(format_order),
        rounds=tuple(rounds),
    )
