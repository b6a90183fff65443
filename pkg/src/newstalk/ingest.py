"""Corpus ingestion: load articles and a gazetteer, annotate entity
mentions and build the knowledge graph.

The corpus is UTF-8 JSON Lines (one article object per line); the
gazetteer is a single UTF-8 JSON document holding the entry list. The
annotator is a deterministic longest-match gazetteer scanner; records may
instead ship pre-annotated entity ids, which bypass it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from newstalk.graph import Article, Category, Entity, EntityClass, KnowledgeGraph
from newstalk.textnorm import normalize, tokenize


class CorpusFormatError(ValueError):
    """A corpus or gazetteer file failed to parse; message carries position."""


@dataclass(frozen=True)
class CorpusRecord:
    article_id: str
    title: str
    body: str
    category_name: str
    published_at: str  # ISO-8601
    entity_ids: tuple[str, ...] | None = None  # pre-annotated, optional


@dataclass(frozen=True)
class GazetteerEntry:
    entity_id: str
    label: str
    aliases: tuple[str, ...]
    class_id: str
    class_label: str


@dataclass(frozen=True)
class Mention:
    surface: str
    start: int
    end: int
    entity_id: str


@dataclass
class IngestReport:
    articles: int = 0
    categories: int = 0
    entities: int = 0
    entity_classes: int = 0
    mention_edges: int = 0
    skipped: list[dict] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)
    mentions_per_article: dict[str, int] = field(default_factory=dict)
    ambiguous_aliases: dict[str, list[str]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "articles": self.articles,
            "categories": self.categories,
            "entities": self.entities,
            "entity_classes": self.entity_classes,
            "mention_edges": self.mention_edges,
            "skipped": self.skipped,
            "warnings": self.warnings,
            "mentions_per_article": self.mentions_per_article,
            "ambiguous_aliases": self.ambiguous_aliases,
        }


class Gazetteer:
    """Validated entity inventory with a normalized alias lookup table."""

    def __init__(self, entries: list[GazetteerEntry]):
        seen: set[str] = set()
        for entry in entries:
            if entry.entity_id in seen:
                raise CorpusFormatError(f"duplicate gazetteer entity_id: {entry.entity_id}")
            seen.add(entry.entity_id)
            for alias in entry.aliases:
                if not alias:
                    raise CorpusFormatError(f"empty alias for entity {entry.entity_id}")
        self.entries = list(entries)
        # normalized alias -> entity ids sharing it (ambiguity is allowed)
        self.alias_index: dict[str, list[str]] = {}
        for entry in entries:
            for alias in {entry.label, *entry.aliases}:
                norm = normalize(alias)
                if not norm:
                    continue
                ids = self.alias_index.setdefault(norm, [])
                if entry.entity_id not in ids:
                    ids.append(entry.entity_id)
        for ids in self.alias_index.values():
            ids.sort()
        self.max_alias_tokens = max((len(a.split()) for a in self.alias_index), default=0)

    def ambiguous(self) -> dict[str, list[str]]:
        return {a: ids for a, ids in self.alias_index.items() if len(ids) > 1}


def load_gazetteer(path) -> Gazetteer:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(raw, list):
        raise CorpusFormatError(f"{path}: expected a top-level list of entries")
    entries = []
    for i, item in enumerate(raw):
        try:
            entries.append(
                GazetteerEntry(
                    entity_id=item["entity_id"],
                    label=item["label"],
                    aliases=tuple(item.get("aliases", ())),
                    class_id=item["class_id"],
                    class_label=item.get("class_label", item["class_id"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise CorpusFormatError(f"{path}: bad gazetteer entry at index {i}: {exc}") from exc
    return Gazetteer(entries)


def iter_corpus(path):
    """Yield (line_number, CorpusRecord); fails fast on malformed lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            try:
                record = CorpusRecord(
                    article_id=raw["article_id"],
                    title=raw["title"],
                    body=raw.get("body", ""),
                    category_name=raw["category_name"],
                    published_at=raw["published_at"],
                    entity_ids=tuple(raw["entity_ids"]) if "entity_ids" in raw else None,
                )
            except (KeyError, TypeError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: bad record: {exc}") from exc
            yield lineno, record


def parse_timestamp(value: str) -> float:
    """ISO-8601 string to UTC epoch seconds; naive times are taken as UTC."""
    text = value.replace("Z", "+00:00") if value.endswith("Z") else value
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise CorpusFormatError(f"unparseable timestamp: {value!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def annotate(body: str, gazetteer: Gazetteer) -> list[Mention]:
    """Longest-match left-to-right scan of the text against the gazetteer.

    Matching runs over the normalized token sequence; a multi-token alias
    must match consecutive tokens. Overlaps resolve in favor of the longer,
    then earlier, match, so the scan simply consumes matched tokens. An
    ambiguous alias links to its lowest entity id (deterministic).
    """
    tokens = tokenize(body)
    mentions: list[Mention] = []
    i = 0
    while i < len(tokens):
        matched = None
        upper = min(gazetteer.max_alias_tokens, len(tokens) - i)
        for width in range(upper, 0, -1):
            candidate = " ".join(t[0] for t in tokens[i : i + width])
            ids = gazetteer.alias_index.get(candidate)
            if ids:
                start = tokens[i][1]
                end = tokens[i + width - 1][2]
                matched = Mention(body[start:end], start, end, ids[0])
                i += width
                break
        if matched is not None:
            mentions.append(matched)
        else:
            i += 1
    return mentions


def build_graph(corpus_path, gazetteer_path) -> tuple[KnowledgeGraph, IngestReport]:
    """Build the knowledge graph from a corpus file and a gazetteer.

    Categories are auto-created from distinct category names (matched
    case-insensitively); duplicate article ids are skipped and reported.
    Deterministic: identical inputs produce an identical graph.
    """
    gazetteer = load_gazetteer(gazetteer_path)
    graph = KnowledgeGraph()
    report = IngestReport()

    for entry in gazetteer.entries:
        graph.add_entity_class(EntityClass(entry.class_id, entry.class_label))
    for entry in gazetteer.entries:
        graph.add_entity(
            Entity(
                entity_id=entry.entity_id,
                label=entry.label,
                aliases=frozenset(entry.aliases),
                class_ids=frozenset({entry.class_id}),
            )
        )
    report.ambiguous_aliases = gazetteer.ambiguous()

    category_ids: dict[str, str] = {}  # normalized name -> category_id
    seen_articles: set[str] = set()
    for lineno, record in iter_corpus(corpus_path):
        if record.article_id in seen_articles:
            report.skipped.append(
                {"line": lineno, "article_id": record.article_id, "reason": "duplicate article_id"}
            )
            continue
        try:
            published = parse_timestamp(record.published_at)
        except CorpusFormatError as exc:
            report.skipped.append({"line": lineno, "article_id": record.article_id, "reason": str(exc)})
            continue
        norm_name = normalize(record.category_name)
        if not norm_name:
            report.skipped.append(
                {"line": lineno, "article_id": record.article_id, "reason": "empty category name"}
            )
            continue
        if norm_name not in category_ids:
            category_ids[norm_name] = norm_name
            graph.add_category(Category(category_id=norm_name, name=record.category_name))
        if record.entity_ids is not None:
            entity_ids = [e for e in record.entity_ids if graph.has_entity(e)]
            unknown = [e for e in record.entity_ids if not graph.has_entity(e)]
            if unknown:
                report.warnings.append(
                    {
                        "line": lineno,
                        "article_id": record.article_id,
                        "reason": f"dropped unknown pre-annotated entities: {unknown}",
                    }
                )
        else:
            # titles are annotated along with bodies
            text = record.title + "\n" + record.body
            entity_ids = [m.entity_id for m in annotate(text, gazetteer)]
        article = Article(
            article_id=record.article_id,
            title=record.title,
            body=record.body,
            published_at=published,
            category_id=category_ids[norm_name],
        )
        graph.upsert_article(article, entity_ids)
        seen_articles.add(record.article_id)
        report.mentions_per_article[record.article_id] = len(set(entity_ids))

    stats = graph.graph_stats()
    report.articles = stats.articles
    report.categories = stats.categories
    report.entities = stats.entities
    report.entity_classes = stats.entity_classes
    report.mention_edges = stats.mentions_edges
    return graph, report
