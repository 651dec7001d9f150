"""Candidate rule enumeration by iterative decision-tree learning.

Rows labeled by clustering (pinned rows doubly weighted) train a greedy
binary decision tree over the predicate pool; each tree converts to a DNF
rule. Removing the learned tree's root predicate and relearning yields
structurally diverse alternatives until accuracy drops below the floor,
the pool runs out, or the candidate cap is reached.

All split scoring is exact integer/rational arithmetic so tie-breaking is
reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .clustering import Clustering
from .errors import Degenerate, NoCandidates, NoPositiveLeaf
from .predicates import Predicate, predicate_to_json
from .rules import Literal, Rule, canonicalize


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs of the enumeration loop.

    max_tree_nodes bounds every learned tree's total node count (internal
    plus leaves); accuracy_floor stops enumeration once a just-learned
    tree's weighted accuracy drops below it; labeled_weight is the training
    weight of user-labeled (pinned) rows relative to hypothesized ones.
    """

    max_tree_nodes: int = 10
    accuracy_floor: float = 0.8
    labeled_weight: float = 2.0
    max_candidates: int = 16

    def __post_init__(self) -> None:
        if self.max_tree_nodes < 3:
            raise ValueError("max_tree_nodes must be at least 3")
        if not (0 < self.accuracy_floor <= 1):
            raise ValueError("accuracy_floor must be in (0, 1]")
        if self.labeled_weight < 1:
            raise ValueError("labeled_weight must be >= 1")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")


@dataclass(frozen=True)
class TreeNode:
    """Binary decision tree node: internal (tests one predicate id) or
    leaf (carries the positive/negative class)."""

    predicate_id: int | None = None
    positive: bool = False
    true_branch: "TreeNode | None" = None
    false_branch: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.predicate_id is None

    @property
    def node_count(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + self.true_branch.node_count + self.false_branch.node_count

    def classify(self, sig: int) -> bool:
        node = self
        while not node.is_leaf:
            node = node.true_branch if sig >> node.predicate_id & 1 else node.false_branch
        return node.positive

    def to_json(self, pool: list[Predicate] | None = None) -> dict:
        if self.is_leaf:
            return {"leaf": self.positive}
        test: object = self.predicate_id
        if pool is not None:
            test = predicate_to_json(pool[self.predicate_id])
        return {
            "test": test,
            "true": self.true_branch.to_json(pool),
            "false": self.false_branch.to_json(pool),
        }


@dataclass(frozen=True)
class Candidate:
    rule: Rule
    train_accuracy: float
    tree: TreeNode


@dataclass(frozen=True)
class CandidateSet:
    candidates: tuple[Candidate, ...]
    target: str


def _integer_weights(weights: list[float]) -> list[int]:
    """Scale per-row weights to exact integers (Gini ordering and accuracy
    ratios are invariant under positive scaling)."""
    fracs = [Fraction(str(w)) for w in weights]
    scale = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    return [int(f * scale) for f in fracs]


class _Leaf:
    """Mutable leaf record used during induction."""

    __slots__ = ("mask", "path", "wp", "wn", "best", "node_index")

    def __init__(self, mask: int, path: frozenset[int], wp: int, wn: int):
        self.mask = mask
        self.path = path
        self.wp = wp
        self.wn = wn
        self.best: tuple[int, int, int] | None = None  # (num, den, predicate id)


def _grow_tree(
    pred_masks: dict[int, int],
    pool_ids: list[int],
    pos_mask: int,
    weight_groups: list[tuple[int, int]],
    n_rows: int,
    max_nodes: int,
) -> TreeNode | None:
    """Greedy best-first induction; returns None when no split has positive
    gain (a constant tree carries no executable rule)."""
    all_rows = (1 << n_rows) - 1

    def class_weights(mask: int) -> tuple[int, int]:
        wp = wn = 0
        for weight, group_mask in weight_groups:
            overlap = group_mask & mask
            wp += weight * (overlap & pos_mask).bit_count()
            wn += weight * (overlap & ~pos_mask).bit_count()
        return wp, wn

    def best_split(leaf: _Leaf) -> tuple[int, int, int] | None:
        w_node = leaf.wp + leaf.wn
        s_node = leaf.wp * leaf.wp + leaf.wn * leaf.wn
        best: tuple[int, int, int] | None = None
        for pid in pool_ids:
            if pid in leaf.path:
                continue
            true_mask = pred_masks[pid] & leaf.mask
            if true_mask == 0 or true_mask == leaf.mask:
                continue
            wp_t, wn_t = class_weights(true_mask)
            wp_f, wn_f = leaf.wp - wp_t, leaf.wn - wn_t
            w_left = wp_t + wn_t
            w_right = wp_f + wn_f
            s_left = wp_t * wp_t + wn_t * wn_t
            s_right = wp_f * wp_f + wn_f * wn_f
            num = s_left * w_right * w_node + s_right * w_left * w_node - s_node * w_left * w_right
            if num <= 0:
                continue
            den = w_left * w_right * w_node
            if best is None or num * best[1] > best[0] * den:
                best = (num, den, pid)
        return best

    root_wp, root_wn = class_weights(all_rows)
    root = _Leaf(all_rows, frozenset(), root_wp, root_wn)
    root.best = best_split(root)
    leaves: list[_Leaf] = [root]
    # Structure is held as parallel dicts until finalized: each leaf either
    # stays a leaf or becomes an internal node with two child leaves.
    children: dict[int, tuple[int, int, int]] = {}  # leaf idx -> (pred, true idx, false idx)
    node_count = 1
    while node_count + 2 <= max_nodes:
        chosen = -1
        chosen_gain: tuple[int, int] | None = None
        for idx, leaf in enumerate(leaves):
            if idx in children or leaf.best is None:
                continue
            num, den, _ = leaf.best
            if chosen_gain is None or num * chosen_gain[1] > chosen_gain[0] * den:
                chosen = idx
                chosen_gain = (num, den)
        if chosen < 0:
            break
        leaf = leaves[chosen]
        _, _, pid = leaf.best
        path = leaf.path | {pid}
        true_mask = pred_masks[pid] & leaf.mask
        false_mask = leaf.mask & ~true_mask
        wp_t, wn_t = class_weights(true_mask)
        true_leaf = _Leaf(true_mask, path, wp_t, wn_t)
        false_leaf = _Leaf(false_mask, path, leaf.wp - wp_t, leaf.wn - wn_t)
        for child in (true_leaf, false_leaf):
            if child.wp and child.wn:
                child.best = best_split(child)
        children[chosen] = (pid, len(leaves), len(leaves) + 1)
        leaves.append(true_leaf)
        leaves.append(false_leaf)
        node_count += 2

    if not children:
        return None

    def finalize(idx: int) -> TreeNode:
        if idx in children:
            pid, t_idx, f_idx = children[idx]
            return TreeNode(
                predicate_id=pid,
                true_branch=finalize(t_idx),
                false_branch=finalize(f_idx),
            )
        leaf = leaves[idx]
        return TreeNode(positive=leaf.wp > leaf.wn)

    return finalize(0)


def _leaf_classes(tree: TreeNode) -> set[bool]:
    if tree.is_leaf:
        return {tree.positive}
    return _leaf_classes(tree.true_branch) | _leaf_classes(tree.false_branch)


def learn_tree(
    sigs: list[int],
    labels: list[bool],
    weights: list[float],
    pool_ids: list[int],
    config: SynthesisConfig,
    enforced_rows: tuple[int, ...] = (),
) -> TreeNode | None:
    """Learn one decision tree over the available predicates.

    Returns None (failure) when no within-budget tree classifies every
    enforced row correctly — after one retry with enforced rows' weights
    boosted tenfold — when no split has positive gain, or when the learned
    tree is a constant classifier (every leaf the same class).
    """
    n = len(sigs)
    if not (len(labels) == len(weights) == n):
        raise ValueError("sigs, labels, and weights must align")
    positives = sum(map(bool, labels))
    if positives == 0 or positives == n:
        raise Degenerate("labels are single-class; nothing to separate")

    pred_masks: dict[int, int] = {pid: 0 for pid in pool_ids}
    for i, sig in enumerate(sigs):
        bit = 1 << i
        remaining = sig
        while remaining:
            low = remaining & -remaining
            pid = low.bit_length() - 1
            if pid in pred_masks:
                pred_masks[pid] |= bit
            remaining ^= low
    pos_mask = 0
    for i, lab in enumerate(labels):
        if lab:
            pos_mask |= 1 << i

    int_weights = _integer_weights(list(weights))
    ordered_ids = sorted(pool_ids)

    def groups_of(row_weights: list[int]) -> list[tuple[int, int]]:
        masks: dict[int, int] = {}
        for i, w in enumerate(row_weights):
            masks[w] = masks.get(w, 0) | 1 << i
        return sorted(masks.items())

    def acceptable(tree: TreeNode | None) -> bool:
        if tree is None or _leaf_classes(tree) != {True, False}:
            return False
        return all(tree.classify(sigs[i]) == bool(labels[i]) for i in enforced_rows)

    tree = _grow_tree(
        pred_masks, ordered_ids, pos_mask, groups_of(int_weights), n, config.max_tree_nodes
    )
    if acceptable(tree):
        return tree
    if enforced_rows:
        boosted = list(int_weights)
        for i in enforced_rows:
            boosted[i] *= 10
        retry = _grow_tree(
            pred_masks, ordered_ids, pos_mask, groups_of(boosted), n, config.max_tree_nodes
        )
        if acceptable(retry):
            return retry
    return None


def tree_to_rule(tree: TreeNode, pool: list[Predicate], format_id: str) -> Rule:
    """Read the DNF off the tree: one conjunction per root-to-positive-leaf
    path, literals negated along false branches."""
    conjunctions: list[tuple[Literal, ...]] = []

    def walk(node: TreeNode, path: list[Literal]) -> None:
        if node.is_leaf:
            if node.positive:
                if not path:
                    raise NoPositiveLeaf("tree is constant-positive; no rule to read")
                conjunctions.append(tuple(path))
            return
        pred = pool[node.predicate_id]
        walk(node.true_branch, path + [Literal(pred, False)])
        walk(node.false_branch, path + [Literal(pred, True)])

    walk(tree, [])
    if not conjunctions:
        raise NoPositiveLeaf("tree has no positive leaf")
    return canonicalize(Rule(tuple(conjunctions), format_id))


def weighted_accuracy(
    tree: TreeNode, sigs: list[int], labels: list[bool], weights: list[float]
) -> Fraction:
    int_weights = _integer_weights(list(weights))
    total = sum(int_weights)
    correct = sum(
        w
        for sig, lab, w in zip(sigs, labels, int_weights)
        if tree.classify(sig) == bool(lab)
    )
    return Fraction(correct, total)


def enumerate_candidates(
    clustering: Clustering,
    sigs: list[int],
    target_format: str,
    pool: list[Predicate],
    config: SynthesisConfig | None = None,
) -> CandidateSet:
    """Iterate learn-tree / record-rule / drop-root until a stop condition.

    Raises NoCandidates when not a single acceptable rule is found — the
    caller should ask the user for more examples.
    """
    if config is None:
        config = SynthesisConfig()
    target_cluster = clustering.cluster_of_format(target_format)
    labels = [c == target_cluster for c in clustering.assignment]
    weights = [
        config.labeled_weight if pinned else 1.0 for pinned in clustering.pinned
    ]
    enforced = tuple(i for i, pinned in enumerate(clustering.pinned) if pinned)
    floor = Fraction(str(config.accuracy_floor))

    available = list(range(len(pool)))
    candidates: list[Candidate] = []
    while available and len(candidates) < config.max_candidates:
        try:
            tree = learn_tree(sigs, labels, weights, available, config, enforced)
        except Degenerate:
            break
        if tree is None:
            break
        accuracy = weighted_accuracy(tree, sigs, labels, weights)
        if accuracy < floor:
            break
        root_id = tree.predicate_id
        try:
            rule = tree_to_rule(tree, pool, target_format)
        except NoPositiveLeaf:
            rule = None
        if rule is not None and all(
            tree.classify(sigs[i]) == labels[i] for i in enforced
        ):
            candidates.append(Candidate(rule, float(accuracy), tree))
        available.remove(root_id)
    if not candidates:
        raise NoCandidates(
            f"no rule candidate found for format {target_format!r}; more examples needed"
        )
    return CandidateSet(tuple(candidates), target_format)
