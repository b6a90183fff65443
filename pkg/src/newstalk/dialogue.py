"""Finite-state dialogue engine.

Eight states govern the conversation: greeting (S1), help (S2), search
introduction (S3), the three result-list states for overview, category and
entity search (S4-S6), list navigation (S7) and entity suggestion (S8).
`DialogueEngine.step` maps (session, semantic frame) to a new session state
plus the agent actions for the turn; it is total over state x intent.

Article reading is chunked text standing in for voice playback: selecting
an article emits the first chunk, "more/continue" advances chunks while a
read is active, and skip/stop/repeat act on the chunk stream. When the
final chunk has been read the engine suggests related entities, excluding
the entity that produced the current result list and anything already
visited this session.
"""

from __future__ import annotations

import random
import re
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum

from newstalk.graph import KnowledgeGraph
from newstalk.nlu import Intent, SemanticFrame

MAX_CHUNK_CHARS = 400


class DialogueState(Enum):
    S1 = "greeting"
    S2 = "help"
    S3 = "search_intro"
    S4 = "overview_results"
    S5 = "category_results"
    S6 = "entity_results"
    S7 = "navigation"
    S8 = "entity_suggestion"


class ActionKind(str, Enum):
    WELCOME = "Welcome"
    HELP_TEXT = "HelpText"
    INTRODUCE_SEARCH = "IntroduceSearch"
    LIST_ARTICLES = "ListArticles"
    NO_RESULTS = "NoResults"
    READ_CHUNK = "ReadChunk"
    SUGGEST_ENTITIES = "SuggestEntities"
    CLARIFY = "Clarify"
    GOODBYE = "Goodbye"
    REPEAT_NOTICE = "RepeatNotice"


@dataclass(frozen=True)
class AgentAction:
    kind: ActionKind
    payload: dict = field(default_factory=dict)


class ReadingError(RuntimeError):
    """read_next_chunk called with no active read."""


@dataclass
class EngineConfig:
    page_size: int = 3
    suggestions: int = 3
    # excluding already-visited entities prevents suggestion loops
    exclude_visited: bool = True


@dataclass
class DialogueSession:
    session_id: str
    seed: int
    state: DialogueState = DialogueState.S1
    result_list: list[str] = field(default_factory=list)
    page_cursor: int = 0
    selected_article: str | None = None
    reading_chunks: list[str] = field(default_factory=list)
    reading_chunk: int = 0  # chunks emitted so far
    reading_active: bool = False
    suggestions: list[str] = field(default_factory=list)
    search_origin: str | None = None
    visited_entities: set[str] = field(default_factory=set)
    visited_states: set[DialogueState] = field(default_factory=set)
    last_actions: list[AgentAction] = field(default_factory=list)
    rng: random.Random = None
    created_at: float = 0.0
    updated_at: float = 0.0

    def check_invariants(self, page_size: int) -> None:
        if self.page_cursor * page_size > len(self.result_list):
            raise AssertionError("page cursor past result list")
        if self.suggestions and self.state is not DialogueState.S8:
            raise AssertionError("suggestions outside S8")
        if self.reading_active and self.selected_article is None:
            raise AssertionError("reading without a selected article")
        if self.reading_chunk > len(self.reading_chunks):
            raise AssertionError("chunk cursor past chunk list")


def split_chunks(body: str, max_chars: int = MAX_CHUNK_CHARS) -> list[str]:
    """Split text at sentence boundaries into chunks of <= max_chars.

    Sentence pieces keep their trailing whitespace so the chunks
    concatenate back to the exact body; a single oversized sentence is
    hard-split at the limit.
    """
    if not body:
        return []
    pieces = []
    last = 0
    for m in re.finditer(r"[.!?]+[)\"']*\s+", body):
        pieces.append(body[last : m.end()])
        last = m.end()
    if last < len(body):
        pieces.append(body[last:])
    split_pieces: list[str] = []
    for piece in pieces:
        while len(piece) > max_chars:
            split_pieces.append(piece[:max_chars])
            piece = piece[max_chars:]
        split_pieces.append(piece)
    chunks: list[str] = []
    current = ""
    for piece in split_pieces:
        if current and len(current) + len(piece) > max_chars:
            chunks.append(current)
            current = piece
        else:
            current += piece
    if current:
        chunks.append(current)
    return chunks


class DialogueEngine:
    """Session steps are serial per session; the graph is shared read-only."""

    def __init__(self, graph: KnowledgeGraph, config: EngineConfig | None = None):
        self.graph = graph
        self.config = config or EngineConfig()

    # ------------------------------------------------------------------

    def new_session(self, seed: int) -> DialogueSession:
        now = time.time()
        session = DialogueSession(
            session_id=uuid.uuid4().hex,
            seed=seed,
            rng=random.Random(seed),
            created_at=now,
            updated_at=now,
        )
        session.visited_states.add(DialogueState.S1)
        return session

    # ------------------------------------------------------------------

    def step(self, session: DialogueSession, frame: SemanticFrame) -> tuple[DialogueSession, list[AgentAction]]:
        intent = frame.intent
        handler = {
            Intent.GREETING: self._on_greeting,
            Intent.HELP: self._on_help,
            Intent.OVERVIEW_SEARCH: self._on_overview,
            Intent.CATEGORY_SEARCH: self._on_category,
            Intent.ENTITY_SEARCH: self._on_entity,
            Intent.MORE_RESULTS: self._on_more,
            Intent.SELECT_ARTICLE: self._on_select,
            Intent.SKIP: self._on_skip,
            Intent.STOP: self._on_stop,
            Intent.REPEAT: self._on_repeat,
            Intent.UNKNOWN: self._on_unknown,
        }[intent]
        actions = handler(session, frame)
        session.visited_states.add(session.state)
        if intent is not Intent.REPEAT:
            # repeats must stay replayable against the original turn
            session.last_actions = list(actions)
        session.updated_at = time.time()
        return session, actions

    # ------------------------------------------------------------------
    # intent handlers

    def _on_greeting(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        self._visit(session, DialogueState.S1)
        session.state = DialogueState.S3
        return [AgentAction(ActionKind.WELCOME), AgentAction(ActionKind.INTRODUCE_SEARCH)]

    def _on_help(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        # help is available everywhere; mid-dialogue it returns to the
        # prior state instead of restarting the search introduction
        self._visit(session, DialogueState.S2)
        actions = [AgentAction(ActionKind.HELP_TEXT)]
        if session.state in (DialogueState.S1, DialogueState.S2, DialogueState.S3):
            session.state = DialogueState.S3
            actions.append(AgentAction(ActionKind.INTRODUCE_SEARCH))
        return actions

    def _on_overview(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        articles = self.graph.overview_articles()
        if not articles:
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "overview_empty", "subject": "recent news"})]
        self._start_results(session, [a.article_id for a in articles], DialogueState.S4, origin=None)
        return [self._list_page(session, subject="the latest news")]

    def _on_category(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        if frame.category_id is None or not self.graph.has_category(frame.category_id):
            surface = frame.category_surface or frame.text or "that category"
            return [
                AgentAction(ActionKind.NO_RESULTS, {"reason": "category_unknown", "subject": surface}),
                AgentAction(ActionKind.CLARIFY, {"reason": "category_unknown", "detail": ""}),
            ]
        category = self.graph.category(frame.category_id)
        articles = self.graph.articles_by_category(frame.category_id)
        if not articles:
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "category_empty", "subject": category.name})]
        self._start_results(session, [a.article_id for a in articles], DialogueState.S5, origin=frame.category_id)
        return [self._list_page(session, subject=f"{category.name} news")]

    def _on_entity(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        linked = [r for r in frame.linked_entities if self.graph.has_entity(r.entity_id)]
        if not linked:
            subject = frame.unlinked_mentions[0] if frame.unlinked_mentions else (frame.text or "that")
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "entity_unknown", "subject": subject})]
        # several linked mentions: the first drives the search (the rest
        # stay in the frame for logging)
        entity = self.graph.entity(linked[0].entity_id)
        articles = self.graph.articles_by_entity(entity.entity_id)
        if not articles:
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "entity_empty", "subject": entity.label})]
        self._start_results(session, [a.article_id for a in articles], DialogueState.S6, origin=entity.entity_id)
        session.visited_entities.add(entity.entity_id)
        return [self._list_page(session, subject=entity.label)]

    def _on_more(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        if session.reading_active:
            action = self.read_next_chunk(session)
            actions = [action]
            if action.payload["is_final"]:
                actions.extend(self._finish_reading(session))
            return actions
        if not session.result_list:
            return [AgentAction(ActionKind.CLARIFY, {"reason": "no_page_context", "detail": ""})]
        next_start = (session.page_cursor + 1) * self.config.page_size
        if next_start >= len(session.result_list):
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "end_of_results", "subject": ""})]
        session.page_cursor += 1
        if session.state is DialogueState.S8:
            session.state = DialogueState.S7
            session.suggestions = []
        return [self._list_page(session)]

    def _on_select(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        page = self._current_page(session)
        if not page or session.state in (DialogueState.S1, DialogueState.S2, DialogueState.S3):
            return [AgentAction(ActionKind.CLARIFY, {"reason": "no_selection_context", "detail": ""})]
        ordinal = frame.ordinal
        if ordinal is None or not 1 <= ordinal <= len(page):
            detail = f"1 to {len(page)}"
            return [AgentAction(ActionKind.CLARIFY, {"reason": "ordinal_range", "detail": detail})]
        article = self.graph.article(page[ordinal - 1])
        session.selected_article = article.article_id
        session.reading_chunks = split_chunks(article.body) or [article.title]
        session.reading_chunk = 0
        session.reading_active = True
        if session.state is DialogueState.S8:
            session.suggestions = []
        session.state = DialogueState.S7
        action = self.read_next_chunk(session)
        actions = [action]
        if action.payload["is_final"]:
            actions.extend(self._finish_reading(session))
        return actions

    def _on_skip(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        if not session.reading_active:
            return [AgentAction(ActionKind.CLARIFY, {"reason": "not_reading", "detail": ""})]
        session.reading_active = False
        session.selected_article = None
        session.reading_chunks = []
        session.reading_chunk = 0
        session.state = DialogueState.S7
        return [self._list_page(session)]

    def _on_stop(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        if session.reading_active:
            session.reading_active = False
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "reading_stopped", "subject": ""})]
        return [AgentAction(ActionKind.GOODBYE)]

    def _on_repeat(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        if not session.last_actions:
            return [AgentAction(ActionKind.REPEAT_NOTICE, {"has_content": False})]
        return [AgentAction(ActionKind.REPEAT_NOTICE, {"has_content": True}), *session.last_actions]

    def _on_unknown(self, session: DialogueSession, frame: SemanticFrame) -> list[AgentAction]:
        # fallback clarification; the state never changes
        return [AgentAction(ActionKind.CLARIFY, {"reason": "unknown", "detail": ""})]

    # ------------------------------------------------------------------
    # reading

    def read_next_chunk(self, session: DialogueSession) -> AgentAction:
        if not session.reading_active or session.selected_article is None:
            raise ReadingError("no article is being read")
        if session.reading_chunk >= len(session.reading_chunks):
            raise ReadingError("article already finished")
        text = session.reading_chunks[session.reading_chunk]
        session.reading_chunk += 1
        is_final = session.reading_chunk == len(session.reading_chunks)
        title = self.graph.article(session.selected_article).title
        return AgentAction(
            ActionKind.READ_CHUNK,
            {"text": text, "is_final": is_final, "title": title, "index": session.reading_chunk - 1},
        )

    def _finish_reading(self, session: DialogueSession) -> list[AgentAction]:
        session.reading_active = False
        exclude = set()
        if session.search_origin is not None:
            exclude.add(session.search_origin)
        if self.config.exclude_visited:
            exclude |= session.visited_entities
        suggested = self.graph.suggest_entities(session.selected_article, self.config.suggestions, exclude)
        if not suggested:
            session.state = DialogueState.S7
            session.suggestions = []
            return [AgentAction(ActionKind.NO_RESULTS, {"reason": "no_suggestions", "subject": ""})]
        session.state = DialogueState.S8
        session.suggestions = [e.entity_id for e in suggested]
        return [
            AgentAction(
                ActionKind.SUGGEST_ENTITIES,
                {
                    "entity_ids": [e.entity_id for e in suggested],
                    "labels": [e.label for e in suggested],
                },
            )
        ]

    # ------------------------------------------------------------------
    # result-list helpers

    def _start_results(self, session: DialogueSession, article_ids: list[str], state: DialogueState, origin: str | None) -> None:
        session.result_list = article_ids
        session.page_cursor = 0
        session.state = state
        session.search_origin = origin
        session.selected_article = None
        session.reading_active = False
        session.reading_chunks = []
        session.reading_chunk = 0
        session.suggestions = []

    def _current_page(self, session: DialogueSession) -> list[str]:
        start = session.page_cursor * self.config.page_size
        return session.result_list[start : start + self.config.page_size]

    def _list_page(self, session: DialogueSession, subject: str | None = None) -> AgentAction:
        page = self._current_page(session)
        titles = [self.graph.article(a).title for a in page]
        return AgentAction(
            ActionKind.LIST_ARTICLES,
            {
                "article_ids": list(page),
                "titles": titles,
                "subject": subject or "these topics",
                "page": session.page_cursor + 1,
            },
        )

    def _visit(self, session: DialogueSession, state: DialogueState) -> None:
        session.visited_states.add(state)


__all__ = [
    "ActionKind",
    "AgentAction",
    "DialogueEngine",
    "DialogueSession",
    "DialogueState",
    "EngineConfig",
    "MAX_CHUNK_CHARS",
    "ReadingError",
    "split_chunks",
]
