"""HTTP facade: session lifecycle, message exchange and conversation logs.

Messages to one session are serialized behind a per-session lock; distinct
sessions run concurrently over the shared read-only graph. Every turn is
appended to an in-memory transcript and, when configured, to an append-only
JSON Lines log flushed per turn.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from newstalk.dialogue import ActionKind, DialogueEngine, DialogueSession, EngineConfig
from newstalk.graph import KnowledgeGraph
from newstalk.nlg import TemplateInventory
from newstalk.nlu import NluConfig, Parser, SemanticFrame


class MessageRequest(BaseModel):
    text: str


class ArticleRef(BaseModel):
    article_id: str
    title: str


class EntityRef(BaseModel):
    entity_id: str
    label: str


class MessageReply(BaseModel):
    reply: str
    state: str
    articles: list[ArticleRef] = []
    suggestions: list[EntityRef] = []
    is_reading: bool = False


@dataclass
class _SessionEntry:
    session: DialogueSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    transcript: list[dict] = field(default_factory=list)
    last_ts: float = 0.0


class ChatService:
    """Wires parser, dialogue engine and renderer behind the HTTP surface."""

    def __init__(
        self,
        graph: KnowledgeGraph,
        seed: int = 0,
        engine_config: EngineConfig | None = None,
        nlu_config: NluConfig | None = None,
        templates: TemplateInventory | None = None,
        parser: Parser | None = None,
        log_path=None,
    ):
        self.graph = graph
        self.seed = seed
        self.engine = DialogueEngine(graph, engine_config)
        self.parser = parser or Parser(config=nlu_config)
        self.templates = templates or TemplateInventory.load()
        self._entries: dict[str, _SessionEntry] = {}
        self._registry_lock = threading.Lock()
        self._log_lock = threading.Lock()
        self._log_fh = open(log_path, "a", encoding="utf-8") if log_path else None

    # ------------------------------------------------------------------

    def create_session(self) -> str:
        session = self.engine.new_session(self.seed)
        with self._registry_lock:
            self._entries[session.session_id] = _SessionEntry(session=session)
        return session.session_id

    def get_entry(self, session_id: str) -> _SessionEntry:
        with self._registry_lock:
            entry = self._entries.get(session_id)
        if entry is None:
            raise KeyError(session_id)
        return entry

    def message(self, session_id: str, text: str) -> MessageReply:
        entry = self.get_entry(session_id)
        with entry.lock:
            session = entry.session
            frame = self.parser.parse(text, session.state, self.graph)
            session, actions = self.engine.step(session, frame)
            texts = [self.templates.render(action, session.rng) for action in actions]
            reply = "\n".join(texts)
            self._log_turn(entry, self._user_record(session, text, frame))
            self._log_turn(entry, self._agent_record(session, reply, actions))
            return self._build_reply(session, reply, actions)

    def transcript(self, session_id: str) -> list[dict]:
        entry = self.get_entry(session_id)
        with entry.lock:
            return list(entry.transcript)

    def close(self) -> None:
        if self._log_fh:
            self._log_fh.close()
            self._log_fh = None

    # ------------------------------------------------------------------

    def _user_record(self, session: DialogueSession, text: str, frame: SemanticFrame) -> dict:
        linked = []
        for result in frame.linked_entities:
            class_ids = []
            if self.graph.has_entity(result.entity_id):
                class_ids = sorted(self.graph.entity(result.entity_id).class_ids)
            linked.append(
                {
                    "entity_id": result.entity_id,
                    "match_kind": result.match_kind,
                    "class_id": class_ids[0] if class_ids else None,
                }
            )
        return {
            "session_id": session.session_id,
            "speaker": "user",
            "text": text,
            "intent": frame.intent.value,
            "linked_entities": linked,
            "unlinked_mentions": list(frame.unlinked_mentions),
            "state": session.state.name,
        }

    def _agent_record(self, session: DialogueSession, reply: str, actions) -> dict:
        return {
            "session_id": session.session_id,
            "speaker": "agent",
            "text": reply,
            "action_kinds": [action.kind.value for action in actions],
            "state": session.state.name,
        }

    def _log_turn(self, entry: _SessionEntry, record: dict) -> None:
        # per-session monotone timestamps survive clock hiccups
        ts = max(time.time(), entry.last_ts)
        entry.last_ts = ts
        record = {"timestamp": ts, **record}
        entry.transcript.append(record)
        if self._log_fh:
            with self._log_lock:
                self._log_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                self._log_fh.flush()

    def _build_reply(self, session: DialogueSession, reply: str, actions) -> MessageReply:
        articles: list[ArticleRef] = []
        suggestions: list[EntityRef] = []
        for action in actions:
            if action.kind is ActionKind.LIST_ARTICLES:
                articles = [
                    ArticleRef(article_id=a, title=t)
                    for a, t in zip(action.payload["article_ids"], action.payload["titles"])
                ]
            elif action.kind is ActionKind.SUGGEST_ENTITIES:
                suggestions = [
                    EntityRef(entity_id=e, label=l)
                    for e, l in zip(action.payload["entity_ids"], action.payload["labels"])
                ]
        return MessageReply(
            reply=reply,
            state=session.state.name,
            articles=articles,
            suggestions=suggestions,
            is_reading=session.reading_active,
        )


def build_app(service: ChatService | None) -> FastAPI:
    """Routes are thin wrappers; a missing service means the graph is not
    loaded yet and session endpoints answer 503."""
    app = FastAPI(title="newstalk", version="0.1.0")
    app.state.service = service

    def _service() -> ChatService:
        if app.state.service is None:
            raise HTTPException(status_code=503, detail="knowledge graph not loaded")
        return app.state.service

    @app.post("/sessions", status_code=201)
    def create_session():
        return {"session_id": _service().create_session()}

    @app.post("/sessions/{session_id}/message", response_model=MessageReply)
    def message(session_id: str, request: MessageRequest):
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        try:
            return _service().message(session_id, request.text)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session") from None

    @app.get("/sessions/{session_id}")
    def transcript(session_id: str):
        try:
            return _service().transcript(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session") from None

    @app.get("/graph/stats")
    def graph_stats():
        return _service().graph.graph_stats().as_dict()

    return app
