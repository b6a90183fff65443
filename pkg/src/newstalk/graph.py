"""In-memory news knowledge graph.

Four node kinds (articles, categories, entities, entity classes) and three
edge kinds: MENTIONS (article -> entity), PART_OF (article -> category,
exactly one per article) and INSTANCE_OF (entity -> class). Secondary
indexes keep entity/category article lookups and alias resolution O(1).

The graph is built once by the ingestion pipeline and then queried
read-only by any number of concurrent sessions; mutation after the build
barrier is the caller's responsibility to avoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from newstalk.textnorm import normalize


class UnknownNodeError(KeyError):
    """A referenced node id does not exist in the graph."""


@dataclass(frozen=True)
class EntityClass:
    class_id: str
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("entity class label must be non-empty")


@dataclass(frozen=True)
class Entity:
    entity_id: str  # language-agnostic knowledge-base id, e.g. "Q142"
    label: str
    aliases: frozenset[str] = frozenset()
    class_ids: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Category:
    category_id: str
    name: str
    name_aliases: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.name:
            raise ValueError("category name must be non-empty")


@dataclass(frozen=True)
class Article:
    article_id: str
    title: str
    body: str
    published_at: float  # UTC epoch seconds
    category_id: str

    def __post_init__(self):
        if not self.title:
            raise ValueError("article title must be non-empty")
        if not math.isfinite(self.published_at):
            raise ValueError("published_at must be finite")


@dataclass
class GraphStats:
    articles: int = 0
    categories: int = 0
    entities: int = 0
    entity_classes: int = 0
    mentions_edges: int = 0
    part_of_edges: int = 0
    instance_of_edges: int = 0

    def as_dict(self) -> dict:
        return {
            "nodes": {
                "articles": self.articles,
                "categories": self.categories,
                "entities": self.entities,
                "entity_classes": self.entity_classes,
            },
            "edges": {
                "mentions": self.mentions_edges,
                "part_of": self.part_of_edges,
                "instance_of": self.instance_of_edges,
            },
        }


def _article_sort_key(article: Article) -> tuple:
    # newest first, stable tie-break on id
    return (-article.published_at, article.article_id)


class KnowledgeGraph:
    """Typed property graph with deterministic query ordering."""

    def __init__(self):
        self._articles: dict[str, Article] = {}
        self._categories: dict[str, Category] = {}
        self._entities: dict[str, Entity] = {}
        self._classes: dict[str, EntityClass] = {}
        # edge sets
        self._mentions: dict[str, set[str]] = {}  # article_id -> entity_ids
        self._part_of: dict[str, str] = {}  # article_id -> category_id
        self._instance_of: dict[str, set[str]] = {}  # entity_id -> class_ids
        # secondary indexes
        self._articles_by_entity: dict[str, set[str]] = {}
        self._articles_by_category: dict[str, set[str]] = {}
        self._alias_to_entities: dict[str, set[str]] = {}  # normalized alias
        # exact stage is case-insensitive but keeps punctuation/diacritics
        self._exact_alias_to_entities: dict[str, set[str]] = {}

    # ------------------------------------------------------------------
    # node insertion

    def add_entity_class(self, entity_class: EntityClass) -> None:
        self._classes[entity_class.class_id] = entity_class

    def add_entity(self, entity: Entity) -> None:
        """Insert an entity node; its label always doubles as an alias."""
        for class_id in entity.class_ids:
            if class_id not in self._classes:
                raise UnknownNodeError(f"unknown entity class: {class_id}")
        aliases = frozenset(entity.aliases) | {entity.label}
        entity = Entity(entity.entity_id, entity.label, aliases, frozenset(entity.class_ids))
        self._entities[entity.entity_id] = entity
        self._instance_of[entity.entity_id] = set(entity.class_ids)
        self._articles_by_entity.setdefault(entity.entity_id, set())
        for alias in aliases:
            norm = normalize(alias)
            if norm:
                self._alias_to_entities.setdefault(norm, set()).add(entity.entity_id)
            self._raw_alias_to_entities.setdefault(alias, set()).add(entity.entity_id)

    def add_category(self, category: Category) -> None:
        self._categories[category.category_id] = category
        self._articles_by_category.setdefault(category.category_id, set())

    def upsert_article(self, article: Article, mentioned_entity_ids: list[str]) -> None:
        """Insert or replace an article and set its MENTIONS edges.

        Rejects the whole operation (graph unchanged) when the category or
        any mentioned entity is unknown. Re-upserting replaces the previous
        mention set; duplicate ids collapse to a single edge.
        """
        if article.category_id not in self._categories:
            raise UnknownNodeError(f"unknown category: {article.category_id}")
        mentioned = set(mentioned_entity_ids)
        for entity_id in mentioned:
            if entity_id not in self._entities:
                raise UnknownNodeError(f"unknown entity: {entity_id}")
        self._detach_article(article.article_id)
        self._articles[article.article_id] = article
        self._part_of[article.article_id] = article.category_id
        self._mentions[article.article_id] = mentioned
        self._articles_by_category[article.category_id].add(article.article_id)
        for entity_id in mentioned:
            self._articles_by_entity[entity_id].add(article.article_id)

    def _detach_article(self, article_id: str) -> None:
        old = self._articles.pop(article_id, None)
        if old is None:
            return
        old_category = self._part_of.pop(article_id)
        self._articles_by_category[old_category].discard(article_id)
        for entity_id in self._mentions.pop(article_id, set()):
            self._articles_by_entity[entity_id].discard(article_id)

    # ------------------------------------------------------------------
    # lookups

    def article(self, article_id: str) -> Article:
        try:
            return self._articles[article_id]
        except KeyError:
            raise UnknownNodeError(f"unknown article: {article_id}") from None

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownNodeError(f"unknown entity: {entity_id}") from None

    def category(self, category_id: str) -> Category:
        try:
            return self._categories[category_id]
        except KeyError:
            raise UnknownNodeError(f"unknown category: {category_id}") from None

    def has_article(self, article_id: str) -> bool:
        return article_id in self._articles

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def has_category(self, category_id: str) -> bool:
        return category_id in self._categories

    def entities_for_alias(self, alias_norm: str) -> set[str]:
        return set(self._alias_to_entities.get(alias_norm, ()))

    def entities_for_raw_alias(self, alias: str) -> set[str]:
        return set(self._raw_alias_to_entities.get(alias, ()))

    def iter_alias_index(self):
        """(normalized alias, entity id set) pairs, for the fuzzy matcher."""
        return self._alias_to_entities.items()

    def resolve_category(self, surface: str) -> str | None:
        """Match a surface form against category names and aliases."""
        wanted = normalize(surface)
        if not wanted:
            return None
        for category in self._categories.values():
            names = {category.name, *category.name_aliases}
            if any(normalize(name) == wanted for name in names):
                return category.category_id
        return None

    # ------------------------------------------------------------------
    # search operations

    def articles_by_entity(self, entity_id: str, limit: int | None = None, offset: int = 0) -> list[Article]:
        if entity_id not in self._entities:
            raise UnknownNodeError(f"unknown entity: {entity_id}")
        ids = self._articles_by_entity.get(entity_id, set())
        return self._paginate(ids, limit, offset)

    def articles_by_category(self, category_id: str, limit: int | None = None, offset: int = 0) -> list[Article]:
        if category_id not in self._categories:
            raise UnknownNodeError(f"unknown category: {category_id}")
        ids = self._articles_by_category.get(category_id, set())
        return self._paginate(ids, limit, offset)

    def _paginate(self, ids, limit: int | None, offset: int) -> list[Article]:
        ordered = sorted((self._articles[a] for a in ids), key=_article_sort_key)
        if limit is None:
            return ordered[offset:]
        return ordered[offset : offset + limit]

    def overview_articles(self, limit: int | None = None, offset: int = 0) -> list[Article]:
        """All articles, newest first; same-time articles rank by how many
        entities they mention (the recency-first popularity proxy)."""
        ordered = sorted(
            self._articles.values(),
            key=lambda a: (-a.published_at, -len(self._mentions.get(a.article_id, ())), a.article_id),
        )
        if limit is None:
            return ordered[offset:]
        return ordered[offset : offset + limit]

    def get_article_entities(self, article_id: str) -> list[Entity]:
        if article_id not in self._articles:
            raise UnknownNodeError(f"unknown article: {article_id}")
        ids = sorted(self._mentions.get(article_id, ()))
        return [self._entities[e] for e in ids]

    def article_count(self, entity_id: str) -> int:
        if entity_id not in self._entities:
            raise UnknownNodeError(f"unknown entity: {entity_id}")
        return len(self._articles_by_entity.get(entity_id, ()))

    def suggest_entities(self, article_id: str, n: int = 3, exclude: set[str] | frozenset[str] = frozenset()) -> list[Entity]:
        """Count-ranked related entities for an article.

        Takes the article's linked entities minus `exclude`, ranks them by
        how many articles mention each (most first, ties by entity id) and
        returns the top n.
        """
        if article_id not in self._articles:
            raise UnknownNodeError(f"unknown article: {article_id}")
        if n < 0:
            raise ValueError("n must be >= 0")
        linked = self._mentions.get(article_id, set()) - set(exclude)
        ranked = sorted(linked, key=lambda e: (-len(self._articles_by_entity.get(e, ())), e))
        return [self._entities[e] for e in ranked[:n]]

    def graph_stats(self) -> GraphStats:
        return GraphStats(
            articles=len(self._articles),
            categories=len(self._categories),
            entities=len(self._entities),
            entity_classes=len(self._classes),
            mentions_edges=sum(len(v) for v in self._mentions.values()),
            part_of_edges=len(self._part_of),
            instance_of_edges=sum(len(v) for v in self._instance_of.values()),
        )

    # ------------------------------------------------------------------
    # integrity

    def rebuild_indexes(self) -> None:
        """Recompute all secondary indexes from the edge sets."""
        self._articles_by_entity = {e: set() for e in self._entities}
        self._articles_by_category = {c: set() for c in self._categories}
        for article_id, entity_ids in self._mentions.items():
            for entity_id in entity_ids:
                self._articles_by_entity[entity_id].add(article_id)
        for article_id, category_id in self._part_of.items():
            self._articles_by_category[category_id].add(article_id)
        self._alias_to_entities = {}
        self._raw_alias_to_entities = {}
        for entity in self._entities.values():
            for alias in entity.aliases:
                norm = normalize(alias)
                if norm:
                    self._alias_to_entities.setdefault(norm, set()).add(entity.entity_id)
                self._raw_alias_to_entities.setdefault(alias, set()).add(entity.entity_id)

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        for article_id, entity_ids in self._mentions.items():
            if article_id not in self._articles:
                raise ValueError(f"dangling MENTIONS source: {article_id}")
            for entity_id in entity_ids:
                if entity_id not in self._entities:
                    raise ValueError(f"dangling MENTIONS target: {entity_id}")
        for article_id in self._articles:
            category_id = self._part_of.get(article_id)
            if category_id is None:
                raise ValueError(f"article without category: {article_id}")
            if category_id not in self._categories:
                raise ValueError(f"dangling PART_OF target: {category_id}")
        for entity_id, class_ids in self._instance_of.items():
            if entity_id not in self._entities:
                raise ValueError(f"dangling INSTANCE_OF source: {entity_id}")
            for class_id in class_ids:
                if class_id not in self._classes:
                    raise ValueError(f"dangling INSTANCE_OF target: {class_id}")
        for entity_id, article_ids in self._articles_by_entity.items():
            for article_id in article_ids:
                if entity_id not in self._mentions.get(article_id, ()):
                    raise ValueError("entity index inconsistent with MENTIONS edges")
        for category_id, article_ids in self._articles_by_category.items():
            for article_id in article_ids:
                if self._part_of.get(article_id) != category_id:
                    raise ValueError("category index inconsistent with PART_OF edges")
