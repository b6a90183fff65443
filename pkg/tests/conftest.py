import pathlib

import pytest

from newstalk.dialogue import DialogueEngine, EngineConfig
from newstalk.ingest import build_graph
from newstalk.nlg import TemplateInventory
from newstalk.nlu import Parser

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def corpus_path():
    return DATA_DIR / "corpus.jsonl"


@pytest.fixture(scope="session")
def gazetteer_path():
    return DATA_DIR / "gazetteer.json"


@pytest.fixture(scope="session")
def news_graph(corpus_path, gazetteer_path):
    """The 15-article fixture graph; shared read-only across tests."""
    graph, _ = build_graph(corpus_path, gazetteer_path)
    graph.validate()
    return graph


@pytest.fixture(scope="session")
def parser():
    return Parser()


@pytest.fixture(scope="session")
def templates():
    return TemplateInventory.load()


@pytest.fixture
def engine(news_graph):
    return DialogueEngine(news_graph, EngineConfig())


def drive(engine, parser, graph, session, text):
    """One user turn through parse + step; returns the actions."""
    frame = parser.parse(text, session.state, graph)
    _, actions = engine.step(session, frame)
    return actions


def random_graph(rng, max_articles=200, max_entities=50):
    """Random fixture graph plus the raw construction data.

    Returns (graph, mentions) where mentions maps article_id -> entity id
    set, recorded independently of the graph so oracles never consult the
    code under test.
    """
    from newstalk.graph import Article, Category, Entity, EntityClass, KnowledgeGraph

    graph = KnowledgeGraph()
    graph.add_entity_class(EntityClass("C1", "thing"))
    graph.add_category(Category("cat", "general"))
    entity_ids = [f"E{i:03d}" for i in range(rng.randint(1, max_entities))]
    for entity_id in entity_ids:
        graph.add_entity(Entity(entity_id, f"label {entity_id}", frozenset(), frozenset({"C1"})))
    mentions: dict[str, set[str]] = {}
    for i in range(rng.randint(0, max_articles)):
        article_id = f"A{i:04d}"
        linked = set(rng.sample(entity_ids, k=rng.randint(0, min(len(entity_ids), 8))))
        graph.upsert_article(
            Article(article_id, f"title {i}", "body.", float(rng.randint(0, 10**6)), "cat"),
            sorted(linked),
        )
        mentions[article_id] = linked
    return graph, mentions


def suggest_oracle(mentions, article_id, n, exclude):
    """Brute-force reference for entity suggestion, from raw fixture data."""
    counts = {}
    for linked in mentions.values():
        for entity_id in linked:
            counts[entity_id] = counts.get(entity_id, 0) + 1
    candidates = mentions[article_id] - set(exclude)
    ranked = sorted(candidates, key=lambda e: (-counts.get(e, 0), e))
    return ranked[:n]
