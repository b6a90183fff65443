import random

import pytest

from newstalk.graph import (
    Article,
    Category,
    Entity,
    EntityClass,
    KnowledgeGraph,
    UnknownNodeError,
)

from conftest import random_graph, suggest_oracle


def seeded_graph():
    """Empty-but-seeded graph: classes, categories and entities, no articles."""
    g = KnowledgeGraph()
    g.add_entity_class(EntityClass("Q6256", "country"))
    g.add_category(Category("politics", "politics"))
    g.add_category(Category("sports", "sports"))
    for entity_id, label in [("Q142", "France"), ("Q159", "Russia"), ("Q212", "Ukraine"), ("Q458", "EU")]:
        g.add_entity(Entity(entity_id, label, frozenset(), frozenset({"Q6256"})))
    return g


def art(article_id, ts, category="politics", title=None):
    return Article(article_id, title or f"title {article_id}", "Body text.", float(ts), category)


# ----------------------------------------------------------------------
# upsert


def test_upsert_single_insertion():
    g = seeded_graph()
    g.upsert_article(art("a1", 100), ["Q142"])
    stats = g.graph_stats()
    assert stats.articles == 1
    assert stats.mentions_edges == 1


def test_upsert_is_idempotent_and_replaces_mentions():
    g = seeded_graph()
    g.upsert_article(art("a1", 100), ["Q142"])
    g.upsert_article(art("a1", 100), ["Q142", "Q159", "Q159"])
    stats = g.graph_stats()
    assert stats.articles == 1
    assert stats.mentions_edges == 2
    assert {e.entity_id for e in g.get_article_entities("a1")} == {"Q142", "Q159"}


def test_upsert_unknown_category_rejected():
    g = seeded_graph()
    before = g.graph_stats()
    with pytest.raises(UnknownNodeError):
        g.upsert_article(art("a1", 100, category="x"), [])
    assert g.graph_stats() == before


def test_upsert_unknown_entity_rejected_whole():
    g = seeded_graph()
    with pytest.raises(UnknownNodeError):
        g.upsert_article(art("a1", 100), ["Q142", "nope"])
    assert g.graph_stats().articles == 0
    assert g.graph_stats().mentions_edges == 0


# ----------------------------------------------------------------------
# entity search


def test_articles_by_entity_newest_first():
    g = seeded_graph()
    g.upsert_article(art("a1", 100), ["Q142"])
    g.upsert_article(art("a2", 300), ["Q142"])
    g.upsert_article(art("a3", 200), ["Q142"])
    got = [a.article_id for a in g.articles_by_entity("Q142", limit=3, offset=0)]
    assert got == ["a2", "a3", "a1"]  # hand-sorted by timestamp desc


def test_articles_by_entity_offset_past_end():
    g = seeded_graph()
    g.upsert_article(art("a1", 100), ["Q142"])
    assert g.articles_by_entity("Q142", limit=5, offset=10) == []


def test_articles_by_entity_tie_break_by_id():
    g = seeded_graph()
    g.upsert_article(art("b", 100), ["Q142"])
    g.upsert_article(art("a", 100), ["Q142"])
    got = [a.article_id for a in g.articles_by_entity("Q142")]
    assert got == ["a", "b"]


def test_articles_by_entity_unknown():
    with pytest.raises(UnknownNodeError):
        seeded_graph().articles_by_entity("nope")


# ----------------------------------------------------------------------
# category search


def test_articles_by_category_limit():
    g = seeded_graph()
    for i, ts in enumerate([100, 400, 200, 300]):
        g.upsert_article(art(f"a{i}", ts), [])
    got = [a.article_id for a in g.articles_by_category("politics", limit=3)]
    assert got == ["a1", "a3", "a2"]  # 400, 300, 200


def test_articles_by_category_empty():
    assert seeded_graph().articles_by_category("sports") == []


def test_articles_by_category_unknown():
    with pytest.raises(UnknownNodeError):
        seeded_graph().articles_by_category("nope")


# ----------------------------------------------------------------------
# overview


def test_overview_empty_graph():
    assert KnowledgeGraph().overview_articles() == []


def test_overview_newest_first():
    g = seeded_graph()
    for i, ts in enumerate([10, 50, 30, 20, 40]):
        g.upsert_article(art(f"a{i}", ts), [])
    got = [a.article_id for a in g.overview_articles(limit=3)]
    assert got == ["a1", "a4", "a2"]  # 50, 40, 30


def test_overview_mention_degree_tie_break():
    g = seeded_graph()
    g.upsert_article(art("few", 100), ["Q142", "Q159"])
    g.upsert_article(art("many", 100), ["Q142", "Q159", "Q212", "Q458"])
    got = [a.article_id for a in g.overview_articles()]
    assert got == ["many", "few"]


# ----------------------------------------------------------------------
# article entities / counts


def test_get_article_entities_empty():
    g = seeded_graph()
    g.upsert_article(art("a1", 100), [])
    assert g.get_article_entities("a1") == []


def test_get_article_entities_sorted_by_id():
    g = seeded_graph()
    g.upsert_article(art("a1", 100), ["Q212", "Q159", "Q458"])
    assert [e.entity_id for e in g.get_article_entities("a1")] == ["Q159", "Q212", "Q458"]


def test_get_article_entities_unknown():
    with pytest.raises(UnknownNodeError):
        seeded_graph().get_article_entities("nope")


def test_article_count():
    g = seeded_graph()
    assert g.article_count("Q159") == 0
    for i in range(7):
        g.upsert_article(art(f"a{i}", 100 + i), ["Q159"])
    assert g.article_count("Q159") == 7
    g.upsert_article(art("extra", 999), ["Q159"])
    assert g.article_count("Q159") == 8


# ----------------------------------------------------------------------
# suggestions


def fixture_with_counts():
    """E2 mentioned by 9 articles, E1 by 5, E3 by 2; target links all three."""
    g = KnowledgeGraph()
    g.add_entity_class(EntityClass("C", "thing"))
    g.add_category(Category("c", "general"))
    for entity_id in ["E1", "E2", "E3"]:
        g.add_entity(Entity(entity_id, entity_id, frozenset(), frozenset({"C"})))
    g.upsert_article(art("target", 0, category="c"), ["E1", "E2", "E3"])
    for i in range(4):
        g.upsert_article(art(f"e1_{i}", i + 1, category="c"), ["E1"])
    for i in range(8):
        g.upsert_article(art(f"e2_{i}", i + 1, category="c"), ["E2"])
    for i in range(1):
        g.upsert_article(art(f"e3_{i}", i + 1, category="c"), ["E3"])
    return g


def test_suggest_n_zero():
    g = fixture_with_counts()
    assert g.suggest_entities("target", 0) == []


def test_suggest_ranked_by_count():
    g = fixture_with_counts()
    # counts: E1=5, E2=9, E3=2 -> E2, E1, E3
    assert [e.entity_id for e in g.suggest_entities("target", 3)] == ["E2", "E1", "E3"]


def test_suggest_with_exclusion():
    g = fixture_with_counts()
    assert [e.entity_id for e in g.suggest_entities("target", 3, {"E2"})] == ["E1", "E3"]


def test_suggest_unknown_article():
    with pytest.raises(UnknownNodeError):
        fixture_with_counts().suggest_entities("nope", 3)


def test_suggest_matches_oracle_on_random_graphs():
    rng = random.Random(7)
    for _ in range(50):
        graph, mentions = random_graph(rng, max_articles=40, max_entities=12)
        for article_id in mentions:
            n = rng.randint(0, 5)
            exclude = set(rng.sample(sorted(mentions[article_id]), k=min(1, len(mentions[article_id]))))
            got = [e.entity_id for e in graph.suggest_entities(article_id, n, exclude)]
            assert got == suggest_oracle(mentions, article_id, n, exclude)


def test_suggest_output_shape():
    rng = random.Random(11)
    graph, mentions = random_graph(rng, max_articles=60, max_entities=15)
    for article_id, linked in mentions.items():
        got = graph.suggest_entities(article_id, 3, set())
        ids = [e.entity_id for e in got]
        assert len(ids) == min(3, len(linked))
        assert len(set(ids)) == len(ids)
        assert set(ids) <= linked


# ----------------------------------------------------------------------
# stats and integrity


def test_graph_stats_empty():
    stats = KnowledgeGraph().graph_stats()
    assert stats.articles == stats.categories == stats.entities == stats.entity_classes == 0
    assert stats.mentions_edges == stats.part_of_edges == stats.instance_of_edges == 0


def test_graph_stats_counts_fixture():
    # 12 articles, 4 categories, 10 entities, 3 classes, built by hand
    g = KnowledgeGraph()
    for i in range(3):
        g.add_entity_class(EntityClass(f"C{i}", f"class {i}"))
    for i in range(4):
        g.add_category(Category(f"cat{i}", f"category {i}"))
    for i in range(10):
        g.add_entity(Entity(f"E{i}", f"entity {i}", frozenset(), frozenset({f"C{i % 3}"})))
    for i in range(12):
        g.upsert_article(art(f"a{i}", i, category=f"cat{i % 4}"), [f"E{i % 10}"])
    stats = g.graph_stats()
    assert (stats.articles, stats.categories, stats.entities, stats.entity_classes) == (12, 4, 10, 3)
    assert stats.part_of_edges == 12
    assert stats.instance_of_edges == 10
    assert stats.mentions_edges == 12


def test_article_count_partition_identity(news_graph):
    per_category = sum(
        len(news_graph.articles_by_category(c))
        for c in ["politics", "world", "economy", "sports"]
    )
    assert per_category == news_graph.graph_stats().articles


def test_pagination_reproduces_full_ordering(news_graph):
    full = [a.article_id for a in news_graph.articles_by_entity("Q142")]
    for k in [1, 2, 3, 5]:
        pages = []
        offset = 0
        while True:
            page = news_graph.articles_by_entity("Q142", limit=k, offset=offset)
            if not page:
                break
            pages.extend(a.article_id for a in page)
            offset += k
        assert pages == full


def test_index_rebuild_preserves_queries(news_graph):
    probes = [
        [a.article_id for a in news_graph.articles_by_entity("Q142")],
        [a.article_id for a in news_graph.articles_by_category("politics")],
        [a.article_id for a in news_graph.overview_articles()],
    ]
    news_graph.rebuild_indexes()
    news_graph.validate()
    assert probes == [
        [a.article_id for a in news_graph.articles_by_entity("Q142")],
        [a.article_id for a in news_graph.articles_by_category("politics")],
        [a.article_id for a in news_graph.overview_articles()],
    ]
