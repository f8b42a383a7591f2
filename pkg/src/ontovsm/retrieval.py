"""Two-stage retrieval: Boolean document filtering, then cosine ranking.

Eight model variants share the machinery:

* ``kw``          cosine over the full-text keyword space,
* ``ne-o``        weighted per-space cosines, overlapped query terms,
* ``ne-n``        the same with non-overlapped (most specific) query terms,
* ``kw-and-ne-*`` keyword filter AND entity filter, blended score,
* ``kw-or-ne-*``  keyword filter OR entity filter, blended score,
* ``kw-plus-ne``  single cosine over the unified space.

The entity score is sum_s w_s * cos(d_s, q_s) over the four entity spaces;
blended models score alpha * entity + (1 - alpha) * cos over the partitioned
keyword space. A filter side the query does not populate imposes no
constraint on an intersection and contributes nothing to a union.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping

from .corpus import Query
from .errors import ConfigError, EmptyQueryError
from .index import InvertedIndex
from .termspace import ENTITY_SPACES, Term, query_terms

WEIGHT_TOLERANCE = 1e-9


class ModelKind(enum.Enum):
    """The retrieval model family, named as on the command line."""

    KW = "kw"
    NE_O = "ne-o"
    NE_N = "ne-n"
    KW_AND_NE_O = "kw-and-ne-o"
    KW_AND_NE_N = "kw-and-ne-n"
    KW_OR_NE_O = "kw-or-ne-o"
    KW_OR_NE_N = "kw-or-ne-n"
    KW_PLUS_NE = "kw-plus-ne"

    @property
    def overlapped(self) -> bool:
        """Whether query annotations expand to all their feature levels."""
        return self in (ModelKind.NE_O, ModelKind.KW_AND_NE_O, ModelKind.KW_OR_NE_O)

    @property
    def combines_keywords(self) -> bool:
        return self in (
            ModelKind.KW_AND_NE_O,
            ModelKind.KW_AND_NE_N,
            ModelKind.KW_OR_NE_O,
            ModelKind.KW_OR_NE_N,
        )

    @property
    def conjunctive(self) -> bool:
        return self in (ModelKind.KW_AND_NE_O, ModelKind.KW_AND_NE_N)


ALL_MODELS = (
    ModelKind.KW,
    ModelKind.NE_O,
    ModelKind.NE_N,
    ModelKind.KW_PLUS_NE,
    ModelKind.KW_AND_NE_O,
    ModelKind.KW_OR_NE_O,
    ModelKind.KW_AND_NE_N,
    ModelKind.KW_OR_NE_N,
)


@dataclass(frozen=True)
class ModelConfig:
    """Entity-space weights and the keyword blend factor."""

    w_n: float = 0.25
    w_c: float = 0.25
    w_nc: float = 0.25
    w_i: float = 0.25
    alpha: float = 0.5

    def __post_init__(self):
        weights = (self.w_n, self.w_c, self.w_nc, self.w_i)
        if any(w < 0 for w in weights):
            raise ConfigError(f"entity weights must be non-negative, got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
            raise ConfigError(f"entity weights must sum to 1, got {sum(weights)!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha!r}")

    @property
    def space_weights(self) -> dict[str, float]:
        return {"N": self.w_n, "C": self.w_c, "NC": self.w_nc, "I": self.w_i}


@dataclass(frozen=True)
class RankedResult:
    doc_id: str
    score: float


def _cosine(a: Mapping[Term, float], b: Mapping[Term, float]) -> float:
    """Cosine of two sparse vectors; 0 when either is empty or all-zero."""
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    if dot == 0.0:
        return 0.0
    norm_a = math.sqrt(sum(w * w for w in a.values()))
    norm_b = math.sqrt(sum(w * w for w in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    # Identical vectors can land a float ulp above 1.
    return min(dot / (norm_a * norm_b), 1.0)


def _query_vector(index: InvertedIndex, terms: Iterable[Term], space: str) -> dict[Term, float]:
    """tf=1 query weights in one vector space; terms the index never saw drop out."""
    if space == "UNIFIED":
        chosen = sorted(terms)
    elif space == "KW_FULL":
        chosen = sorted(t for t in terms if t.space == "KW")
    else:
        chosen = sorted(t for t in terms if t.space == space)
    vec = {t: index.idf(t, space) for t in chosen}
    return {t: w for t, w in vec.items() if w > 0.0}


def _model_terms(query: Query, index: InvertedIndex, model: ModelKind) -> set[Term]:
    terms = query_terms(query, index.kb, overlapped=model.overlapped)
    keyword = {t for t in terms if t.space == "KW"}
    entity = terms - keyword
    if model is ModelKind.KW and not keyword:
        raise EmptyQueryError(f"query {query.query_id!r} has no keyword terms")
    if model in (ModelKind.NE_O, ModelKind.NE_N) and not entity:
        raise EmptyQueryError(f"query {query.query_id!r} has no entity annotations")
    if not terms:
        raise EmptyQueryError(f"query {query.query_id!r} contributes no terms")
    return terms


def _postings_union(index: InvertedIndex, terms: Iterable[Term], space: str | None) -> set[str]:
    docs: set[str] = set()
    for term in terms:
        docs.update(index.posting_docs(term, space))
    return docs


def _entity_filter(index: InvertedIndex, terms: set[Term], conjunctive: bool) -> set[str] | None:
    """Per-space posting sets, intersected or unioned; None when no entity terms.

    A space the query does not touch is skipped: an absent feature expresses
    no constraint, so it must not empty the intersection.
    """
    per_space = []
    for space in ENTITY_SPACES:
        space_terms = [t for t in terms if t.space == space]
        if space_terms:
            per_space.append(_postings_union(index, space_terms, space))
    if not per_space:
        return None
    if conjunctive:
        return set.intersection(*per_space)
    return set.union(*per_space)


def filter_documents(index: InvertedIndex, query: Query, model: ModelKind) -> set[str]:
    """Boolean first stage: the candidate set the model is allowed to rank."""
    terms = _model_terms(query, index, model)
    keyword = {t for t in terms if t.space == "KW"}

    if model is ModelKind.KW:
        return _postings_union(index, keyword, "KW_FULL")
    if model is ModelKind.KW_PLUS_NE:
        return _postings_union(index, terms, None)

    ne_set = _entity_filter(index, terms - keyword, conjunctive=model.overlapped)
    if model in (ModelKind.NE_O, ModelKind.NE_N):
        return ne_set if ne_set is not None else set()

    # Combined models: either side may be unpopulated and then drops out.
    sides = []
    if keyword:
        sides.append(_postings_union(index, keyword, "KW"))
    if ne_set is not None:
        sides.append(ne_set)
    if model.conjunctive:
        return set.intersection(*sides)
    return set.union(*sides)


def _entity_score(
    index: InvertedIndex, doc_id: str, terms: set[Term], config: ModelConfig
) -> float:
    total = 0.0
    for space, weight in config.space_weights.items():
        qv = _query_vector(index, terms, space)
        total += weight * _cosine(index.doc_vector(doc_id, space), qv)
    return total


def score(
    index: InvertedIndex,
    query: Query,
    doc_id: str,
    model: ModelKind,
    config: ModelConfig | None = None,
) -> float:
    """Similarity of one document to the query under one model, in [0, 1]."""
    config = config or ModelConfig()
    terms = query_terms(query, index.kb, overlapped=model.overlapped)

    if model is ModelKind.KW:
        qv = _query_vector(index, terms, "KW_FULL")
        return _cosine(index.doc_vector(doc_id, "KW_FULL"), qv)
    if model is ModelKind.KW_PLUS_NE:
        qv = _query_vector(index, terms, "UNIFIED")
        return _cosine(index.doc_vector(doc_id, "UNIFIED"), qv)

    entity = _entity_score(index, doc_id, terms, config)
    if model in (ModelKind.NE_O, ModelKind.NE_N):
        return entity
    kw_cos = _cosine(
        index.doc_vector(doc_id, "KW"), _query_vector(index, terms, "KW")
    )
    return config.alpha * entity + (1.0 - config.alpha) * kw_cos


def search(
    index: InvertedIndex,
    query: Query,
    model: ModelKind,
    config: ModelConfig | None = None,
    top_k: int = 1000,
) -> list[RankedResult]:
    """Filter, score, and rank; ties break by ascending document id."""
    if top_k < 0:
        raise ValueError(f"top_k must be non-negative, got {top_k}")
    config = config or ModelConfig()
    candidates = filter_documents(index, query, model)
    results = [
        RankedResult(doc_id, score(index, query, doc_id, model, config))
        for doc_id in sorted(candidates)
    ]
    results.sort(key=lambda r: (-r.score, r.doc_id))
    return results[:top_k]


def write_run_file(
    runs: Mapping[str, list[RankedResult]], model_tag: str, out: IO[str] | str | Path
) -> None:
    """TREC run lines: ``<query_id> Q0 <doc_id> <rank> <score> <tag>``."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_run_file(runs, model_tag, fh)
        return
    for query_id, results in runs.items():
        for rank, result in enumerate(results, start=1):
            out.write(
                f"{query_id} Q0 {result.doc_id} {rank} {result.score:.6f} {model_tag}\n"
            )
