"""Pattern-based natural language understanding.

Turns an utterance into a semantic frame: intent classification against a
priority-ordered pattern inventory, slot extraction, and entity linking
with exact -> normalized -> fuzzy stages against the graph's alias index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

import yaml

from newstalk.editdist import levenshtein_within
from newstalk.graph import KnowledgeGraph
from newstalk.textnorm import normalize


class Intent(str, Enum):
    GREETING = "Greeting"
    HELP = "Help"
    OVERVIEW_SEARCH = "OverviewSearch"
    CATEGORY_SEARCH = "CategorySearch"
    ENTITY_SEARCH = "EntitySearch"
    SELECT_ARTICLE = "SelectArticle"
    MORE_RESULTS = "MoreResults"
    SKIP = "Skip"
    STOP = "Stop"
    REPEAT = "Repeat"
    UNKNOWN = "Unknown"


_ORDINAL_WORDS = {
    "first": 1,
    "second": 2,
    "third": 3,
    "fourth": 4,
    "fifth": 5,
    "sixth": 6,
    "seventh": 7,
    "eighth": 8,
    "ninth": 9,
    "tenth": 10,
}
_ORDINAL_RE = r"(?:\d{1,2}|" + "|".join(_ORDINAL_WORDS) + ")"

_SLOT_RES = {
    "entity": r"(?P<entity>.+)",
    "category": r"(?P<category>.+)",
    "ordinal": rf"(?P<ordinal>{_ORDINAL_RE})",
}


def parse_ordinal(token: str) -> int | None:
    token = token.strip()
    if token.isdigit():
        return int(token)
    return _ORDINAL_WORDS.get(token)


@dataclass(frozen=True)
class IntentPattern:
    intent: Intent
    template: str  # normalized phrase with {entity}/{category}/{ordinal} slots
    priority: int
    regex: re.Pattern = field(compare=False, repr=False, default=None)

    @staticmethod
    def compile(intent: Intent, template: str, priority: int) -> "IntentPattern":
        if not template:
            raise ValueError("empty pattern template")
        parts = re.split(r"(\{entity\}|\{category\}|\{ordinal\})", template)
        pieces = []
        for part in parts:
            if part.startswith("{") and part.endswith("}"):
                pieces.append(_SLOT_RES[part[1:-1]])
            elif part:
                pieces.append(re.escape(normalize(part)).replace(r"\ ", r"\s+"))
        regex = re.compile(r"\s*".join(p for p in pieces if p) + "$")
        return IntentPattern(intent, template, priority, regex)


@dataclass(frozen=True)
class LinkResult:
    entity_id: str
    match_kind: str  # exact | normalized | fuzzy
    edit_distance: int
    score: float


@dataclass
class SemanticFrame:
    intent: Intent
    linked_entities: list[LinkResult] = field(default_factory=list)
    unlinked_mentions: list[str] = field(default_factory=list)
    category_id: str | None = None
    category_surface: str | None = None
    ordinal: int | None = None
    confidence: float = 0.0
    text: str = ""


@dataclass
class NluConfig:
    fuzzy_score_threshold: float = 0.75
    # None keeps the length-scaled rule max(1, len // 5); an int caps it,
    # so 0 disables fuzzy matching entirely.
    fuzzy_distance_cap: int | None = None


_KIND_RANK = {"exact": 0, "normalized": 1, "fuzzy": 2}


def load_patterns(path=None) -> list[IntentPattern]:
    """Load the intent pattern inventory (shipped default when path=None)."""
    if path is None:
        text = resources.files("newstalk.data").joinpath("intents.yaml").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    raw = yaml.safe_load(text)
    patterns = []
    for block in raw["intents"]:
        intent = Intent(block["intent"])
        priority = int(block.get("priority", 0))
        for template in block["phrases"]:
            patterns.append(IntentPattern.compile(intent, template, priority))
    # highest priority first; stable sort keeps inventory order within ties
    return sorted(patterns, key=lambda p: -p.priority)


class Parser:
    """Stateless given (utterance, session_state, graph); safe to share."""

    def __init__(self, patterns: list[IntentPattern] | None = None, config: NluConfig | None = None):
        self.patterns = patterns if patterns is not None else load_patterns()
        self.config = config or NluConfig()

    # ------------------------------------------------------------------

    def classify_intent(self, utterance: str, session_state=None) -> tuple[Intent, dict, float]:
        """Highest-priority matching pattern wins; Unknown when none match.

        In the entity-suggestion state a bare phrase is read as an entity
        search, so users can answer a suggestion with just the name.
        """
        norm = normalize(utterance)
        if not norm:
            return Intent.UNKNOWN, {}, 0.0
        for pattern in self.patterns:
            m = pattern.regex.fullmatch(norm)
            if not m:
                continue
            slots: dict = {}
            groups = m.groupdict()
            if groups.get("entity"):
                slots["entity"] = groups["entity"].strip()
            if groups.get("category"):
                slots["category"] = groups["category"].strip()
            if groups.get("ordinal"):
                ordinal = parse_ordinal(groups["ordinal"])
                if ordinal is None:
                    continue
                slots["ordinal"] = ordinal
            return pattern.intent, slots, 1.0
        state_name = getattr(session_state, "name", session_state)
        if state_name == "S8":
            return Intent.ENTITY_SEARCH, {"entity": norm}, 0.6
        return Intent.UNKNOWN, {}, 0.0

    # ------------------------------------------------------------------

    def link_entity(self, surface: str, graph: KnowledgeGraph) -> list[LinkResult]:
        """Three-stage linker: exact alias, normalized alias, then fuzzy.

        Fuzzy matches accept distance <= max(1, len // 5) (len of the longer
        normalized string, optionally capped by config) and score >= the
        configured threshold. Candidates order by match kind, then by how
        many articles mention the entity, then entity id.
        """
        if not surface or not surface.strip():
            return []
        results: dict[str, LinkResult] = {}

        for entity_id in graph.entities_for_raw_alias(surface.strip()):
            results[entity_id] = LinkResult(entity_id, "exact", 0, 1.0)

        norm = normalize(surface)
        if norm:
            for entity_id in graph.entities_for_alias(norm):
                if entity_id not in results:
                    results[entity_id] = LinkResult(entity_id, "normalized", 0, 1.0)

            best_fuzzy: dict[str, tuple[int, float]] = {}
            for alias, entity_ids in graph.iter_alias_index():
                longest = max(len(norm), len(alias))
                limit = max(1, longest // 5)
                if self.config.fuzzy_distance_cap is not None:
                    limit = min(limit, self.config.fuzzy_distance_cap)
                if limit <= 0:
                    continue
                dist = levenshtein_within(norm, alias, limit)
                if dist > limit:
                    continue
                score = 1.0 - dist / longest if longest else 1.0
                if score < self.config.fuzzy_score_threshold:
                    continue
                for entity_id in entity_ids:
                    prev = best_fuzzy.get(entity_id)
                    if prev is None or (dist, -score) < (prev[0], -prev[1]):
                        best_fuzzy[entity_id] = (dist, score)
            for entity_id, (dist, score) in best_fuzzy.items():
                if entity_id not in results:
                    results[entity_id] = LinkResult(entity_id, "fuzzy", dist, score)

        return sorted(
            results.values(),
            key=lambda r: (_KIND_RANK[r.match_kind], -graph.article_count(r.entity_id), r.entity_id),
        )

    # ------------------------------------------------------------------

    def parse(self, utterance: str, session_state, graph: KnowledgeGraph) -> SemanticFrame:
        """Compose intent classification and linking into a semantic frame.

        Never raises on arbitrary input; an empty or unmatchable utterance
        yields an Unknown frame with confidence 0.
        """
        text = utterance if isinstance(utterance, str) else ""
        intent, slots, confidence = self.classify_intent(text, session_state)
        frame = SemanticFrame(intent=intent, confidence=confidence, text=text)

        if intent is Intent.ENTITY_SEARCH:
            surface = slots.get("entity", "")
            self._link_mentions(frame, surface, graph)
            # a search phrase naming a category rather than an entity is
            # reinterpreted, so "news about sports" behaves sensibly
            if not frame.linked_entities:
                category_id = graph.resolve_category(surface)
                if category_id is not None:
                    frame.intent = Intent.CATEGORY_SEARCH
                    frame.category_id = category_id
                    frame.category_surface = surface
                    frame.unlinked_mentions = []
            if (
                frame.intent is Intent.ENTITY_SEARCH
                and not frame.linked_entities
                and not frame.unlinked_mentions
            ):
                frame.unlinked_mentions.append(surface or text.strip())
        elif intent is Intent.CATEGORY_SEARCH:
            surface = slots.get("category", "")
            frame.category_surface = surface
            frame.category_id = graph.resolve_category(surface)
            if frame.category_id is None:
                # symmetric fallback: "france news" names an entity
                self._link_mentions(frame, surface, graph)
                if frame.linked_entities:
                    frame.intent = Intent.ENTITY_SEARCH
                    frame.category_surface = None
        elif intent is Intent.SELECT_ARTICLE:
            frame.ordinal = slots.get("ordinal")

        return frame

    def _link_mentions(self, frame: SemanticFrame, surface: str, graph: KnowledgeGraph) -> None:
        """Link one slot surface; conjunction phrases link every part.

        The whole surface is tried first (exact/normalized only) so names
        containing "and" stay intact; otherwise each conjunct is linked in
        order of appearance and every result is retained.
        """
        surface = surface.strip()
        if not surface:
            return
        parts = re.split(r"\s+and\s+", surface)
        if len(parts) > 1:
            whole = [
                r
                for r in self.link_entity(surface, graph)
                if r.match_kind in ("exact", "normalized")
            ]
            if whole:
                frame.linked_entities.append(whole[0])
                return
            for part in parts:
                results = self.link_entity(part, graph)
                if results:
                    frame.linked_entities.append(results[0])
                else:
                    frame.unlinked_mentions.append(part)
            return
        results = self.link_entity(surface, graph)
        if results:
            frame.linked_entities.append(results[0])
        else:
            frame.unlinked_mentions.append(surface)
