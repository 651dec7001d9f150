"""Linear feature-based ranking of candidate rules.

Each candidate gets a handpicked feature vector mixing execution evidence
(agreement with the hypothesized clustering, training accuracy, match
fractions) and intrinsic shape (size, negations, where its constants came
from). A configurable linear weight vector reduces the features to one
score; ties break toward simpler rules, then canonical serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .clustering import Clustering
from .predicates import Provenance
from .rules import Rule, emit_formula, execute, rule_to_json
from .synthesis import CandidateSet
from .table import TypedColumn

FEATURES = (
    "num_disjuncts",
    "num_literals",
    "num_negations",
    "frac_column_matched",
    "frac_unassigned_matched",
    "agreement_with_clustering",
    "train_weighted_accuracy",
    "constant_provenance_score",
    "predicate_type_diversity",
)

PROVENANCE_SCORES = {
    Provenance.CELL_VALUE: 1.0,
    Provenance.DELIMITER_TOKEN: 0.9,
    Provenance.PREFIX_TRIE_TOKEN: 0.9,
    Provenance.COLUMN_STAT: 0.6,
    Provenance.POPULAR_CONSTANT: 0.8,
}


@dataclass(frozen=True)
class FeatureVector:
    num_disjuncts: float
    num_literals: float
    num_negations: float
    frac_column_matched: float
    frac_unassigned_matched: float
    agreement_with_clustering: float
    train_weighted_accuracy: float
    constant_provenance_score: float
    predicate_type_diversity: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURES}


@dataclass(frozen=True)
class RankerWeights:
    weights: dict[str, float]
    bias: float = 0.0

    def __post_init__(self) -> None:
        missing = [name for name in FEATURES if name not in self.weights]
        if missing:
            raise ValueError(
                "ranker weights missing features: " + ", ".join(missing)
            )
        unknown = [name for name in self.weights if name not in FEATURES]
        if unknown:
            raise ValueError(
                "ranker weights name unknown features: " + ", ".join(sorted(unknown))
            )

    def score(self, features: FeatureVector) -> float:
        return self.bias + sum(
            self.weights[name] * getattr(features, name) for name in FEATURES
        )

    @classmethod
    def from_json(cls, obj: object) -> "RankerWeights":
        if not isinstance(obj, dict):
            raise ValueError("weights file must hold a JSON object")
        bad = [k for k, v in obj.items() if isinstance(v, bool) or not isinstance(v, (int, float))]
        if bad:
            raise ValueError("weights must be numbers: " + ", ".join(sorted(bad)))
        weights = {k: float(v) for k, v in obj.items() if k != "bias"}
        return cls(weights=weights, bias=float(obj.get("bias", 0.0)))


def default_weights() -> RankerWeights:
    from importlib.resources import files

    text = files("cfsynth.data").joinpath("default_weights.json").read_text()
    return RankerWeights.from_json(json.loads(text))


def load_weights(path: str) -> RankerWeights:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"weights file {path} is not valid JSON: {exc}") from exc
    return RankerWeights.from_json(obj)


def featurize(
    rule: Rule,
    column: TypedColumn,
    clustering: Clustering,
    labeled_weight: float = 2.0,
) -> FeatureVector:
    n = len(column)
    mask = execute(rule, column)
    target_cluster = clustering.cluster_of_format(rule.format)
    labels = [c == target_cluster for c in clustering.assignment]
    matched = [bool(mask >> i & 1) for i in range(n)]

    unassigned = [i for i, pinned in enumerate(clustering.pinned) if not pinned]
    if unassigned:
        frac_unassigned = sum(matched[i] for i in unassigned) / len(unassigned)
    else:
        frac_unassigned = 0.0

    agreement = sum(m == l for m, l in zip(matched, labels)) / n

    total_weight = 0.0
    correct_weight = 0.0
    for i in range(n):
        w = labeled_weight if clustering.pinned[i] else 1.0
        total_weight += w
        if matched[i] == labels[i]:
            correct_weight += w
    train_acc = correct_weight / total_weight

    literals = [lit for conj in rule.disjuncts for lit in conj]
    provenance = sum(PROVENANCE_SCORES[lit.predicate.provenance] for lit in literals)
    kinds = {lit.predicate.kind for lit in literals}

    return FeatureVector(
        num_disjuncts=float(len(rule.disjuncts)),
        num_literals=float(len(literals)),
        num_negations=float(rule.num_negations),
        frac_column_matched=sum(matched) / n,
        frac_unassigned_matched=frac_unassigned,
        agreement_with_clustering=agreement,
        train_weighted_accuracy=train_acc,
        constant_provenance_score=provenance / len(literals),
        predicate_type_diversity=len(kinds) / len(literals),
    )


@dataclass(frozen=True)
class RankedSuggestion:
    rule: Rule
    score: float
    features: FeatureVector
    mask: int
    formula: str


def rank(
    candidates: CandidateSet,
    column: TypedColumn,
    clustering: Clustering,
    weights: RankerWeights | None = None,
    labeled_weight: float = 2.0,
    *,
    fold: bool = False,
) -> list[RankedSuggestion]:
    """Score and order candidates best-first; deterministic under candidate
    permutation and positive affine transforms of the weights."""
    if weights is None:
        weights = default_weights()
    ranked = []
    for cand in candidates.candidates:
        features = featurize(cand.rule, column, clustering, labeled_weight)
        ranked.append(
            RankedSuggestion(
                rule=cand.rule,
                score=weights.score(features),
                features=features,
                mask=execute(cand.rule, column),
                formula=emit_formula(cand.rule, column.source_ref, fold=fold),
            )
        )
    ranked.sort(
        key=lambda s: (
            -s.score,
            s.rule.num_literals,
            json.dumps(rule_to_json(s.rule), separators=(",", ":")),
        )
    )
    return ranked