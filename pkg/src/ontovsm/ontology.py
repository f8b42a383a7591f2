"""Class taxonomy and entity knowledge base.

Both structures are validated at load time and immutable afterwards, so they
are safe for unrestricted concurrent reads.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import KnowledgeBaseError, TaxonomyError


class ClassTaxonomy:
    """Subclass DAG over opaque class identifiers.

    A class may declare several parents; the parent relation must be acyclic.
    ``ancestors`` is reflexive: every class is an ancestor of itself.
    """

    def __init__(self, classes: Iterable[str], parent_edges: Mapping[str, Iterable[str]]):
        self.classes = frozenset(classes)
        self.parents: dict[str, frozenset[str]] = {
            c: frozenset(parent_edges.get(c, ())) for c in sorted(self.classes)
        }
        for child, parents in self.parents.items():
            for p in parents:
                if p not in self.classes:
                    raise TaxonomyError(f"class {child!r} names undeclared parent {p!r}")
        self._ancestors = self._closure()

    @property
    def edge_count(self) -> int:
        return sum(len(p) for p in self.parents.values())

    def _closure(self) -> dict[str, frozenset[str]]:
        # Kahn's algorithm: process parents before children so each ancestor
        # set is the union of the parents' sets. Leftover nodes mean a cycle.
        children: dict[str, list[str]] = {c: [] for c in self.classes}
        pending = {c: len(self.parents[c]) for c in self.classes}
        for child, parents in self.parents.items():
            for p in parents:
                children[p].append(child)

        closed: dict[str, frozenset[str]] = {}
        queue = deque(sorted(c for c, n in pending.items() if n == 0))
        while queue:
            c = queue.popleft()
            anc = {c}
            for p in self.parents[c]:
                anc.update(closed[p])
            closed[c] = frozenset(anc)
            for child in children[c]:
                pending[child] -= 1
                if pending[child] == 0:
                    queue.append(child)

        if len(closed) != len(self.classes):
            stuck = sorted(c for c in self.classes if c not in closed)
            raise TaxonomyError(f"cycle detected in class taxonomy involving {stuck[0]!r}")
        return closed

    def __contains__(self, class_id: str) -> bool:
        return class_id in self.classes

    def ancestors(self, class_id: str) -> frozenset[str]:
        """The class itself plus every class reachable via parent edges."""
        try:
            return self._ancestors[class_id]
        except KeyError:
            raise KeyError(f"unknown class: {class_id!r}") from None

    def is_subclass(self, sub: str, sup: str) -> bool:
        """True iff ``sup`` is an ancestor of ``sub`` (reflexive)."""
        if sup not in self.classes:
            raise KeyError(f"unknown class: {sup!r}")
        return sup in self.ancestors(sub)


@dataclass(frozen=True)
class EntityRecord:
    """One entity: unique identifier, class, and ordered alias names.

    The first name is the canonical one.
    """

    identifier: str
    class_id: str
    names: tuple[str, ...]

    @property
    def canonical_name(self) -> str:
        return self.names[0]

    @property
    def folded_names(self) -> frozenset[str]:
        return frozenset(n.casefold() for n in self.names)


class KnowledgeBase:
    """Entity records plus the inverse alias index.

    Name lookup is case-insensitive (case-folded at load and at query time).
    """

    def __init__(self, records: Iterable[EntityRecord], taxonomy: ClassTaxonomy):
        self.taxonomy = taxonomy
        self.entities: dict[str, EntityRecord] = {}
        name_index: dict[str, set[str]] = {}
        for rec in records:
            if rec.identifier in self.entities:
                raise KnowledgeBaseError(f"duplicate entity identifier {rec.identifier!r}")
            if rec.class_id not in taxonomy:
                raise KnowledgeBaseError(
                    f"entity {rec.identifier!r} has unknown class {rec.class_id!r}"
                )
            if not rec.names:
                raise KnowledgeBaseError(f"entity {rec.identifier!r} has no names")
            folded = [n.casefold() for n in rec.names]
            if len(set(folded)) != len(folded):
                raise KnowledgeBaseError(f"entity {rec.identifier!r} repeats an alias")
            self.entities[rec.identifier] = rec
            for n in folded:
                name_index.setdefault(n, set()).add(rec.identifier)
        self.name_index: dict[str, frozenset[str]] = {
            n: frozenset(ids) for n, ids in name_index.items()
        }

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, identifier: str) -> bool:
        return identifier in self.entities

    def resolve(self, identifier: str) -> EntityRecord:
        """Return the record for ``identifier`` or raise ``KeyError``."""
        try:
            return self.entities[identifier]
        except KeyError:
            raise KeyError(f"unknown entity identifier: {identifier!r}") from None

    def entities_by_name(self, name: str) -> frozenset[str]:
        """All entity identifiers carrying ``name`` as an alias (case-insensitive)."""
        return self.name_index.get(name.casefold(), frozenset())


def load_taxonomy(records: Iterable[Mapping]) -> ClassTaxonomy:
    """Build a taxonomy from ``{"class": ..., "parents": [...]}`` records."""
    classes: list[str] = []
    edges: dict[str, list[str]] = {}
    for rec in records:
        cid = rec.get("class")
        if not isinstance(cid, str) or not cid:
            raise TaxonomyError(f"taxonomy record without a class id: {rec!r}")
        if cid in edges:
            raise TaxonomyError(f"duplicate class id {cid!r}")
        parents = rec.get("parents", [])
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            raise TaxonomyError(f"class {cid!r} has a malformed parents list")
        classes.append(cid)
        edges[cid] = parents
    return ClassTaxonomy(classes, edges)


def load_knowledge_base(records: Iterable[Mapping], taxonomy: ClassTaxonomy) -> KnowledgeBase:
    """Build a knowledge base from ``{"id", "class", "names"}`` records."""
    entities = []
    for rec in records:
        ident = rec.get("id")
        cls = rec.get("class")
        names = rec.get("names")
        if not isinstance(ident, str) or not ident:
            raise KnowledgeBaseError(f"entity record without an id: {rec!r}")
        if not isinstance(cls, str) or not cls:
            raise KnowledgeBaseError(f"entity {ident!r} has no class")
        if not isinstance(names, list) or not all(isinstance(n, str) and n for n in names):
            raise KnowledgeBaseError(f"entity {ident!r} has a malformed names list")
        entities.append(EntityRecord(ident, cls, tuple(names)))
    return KnowledgeBase(entities, taxonomy)


def read_jsonl(path: str | Path, error_cls: type[Exception]) -> list[dict]:
    """Read one JSON object per non-blank line, raising ``error_cls`` with context."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise error_cls(f"{path}, line {lineno}: {exc}") from None
            if not isinstance(rec, dict):
                raise error_cls(f"{path}, line {lineno}: expected a JSON object")
            records.append(rec)
    return records


def read_taxonomy_file(path: str | Path) -> ClassTaxonomy:
    """Load a line-delimited JSON taxonomy file."""
    return load_taxonomy(read_jsonl(path, TaxonomyError))


def read_kb_file(path: str | Path, taxonomy: ClassTaxonomy) -> KnowledgeBase:
    """Load a line-delimited JSON knowledge-base file."""
    return load_knowledge_base(read_jsonl(path, KnowledgeBaseError), taxonomy)
