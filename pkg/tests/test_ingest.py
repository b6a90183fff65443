import json

import pytest

from newstalk.ingest import (
    CorpusFormatError,
    Gazetteer,
    GazetteerEntry,
    annotate,
    build_graph,
    parse_timestamp,
)


def gaz(*entries):
    return Gazetteer([GazetteerEntry(*e) for e in entries])


SMALL = gaz(
    ("Q142", "France", (), "Q6256", "country"),
    ("Q159", "Russia", ("Russian Federation",), "Q6256", "country"),
)


def test_annotate_no_matches():
    assert annotate("nothing to see here", SMALL) == []


def test_annotate_finds_mentions_in_order():
    text = "President of France visits Russia"
    mentions = annotate(text, SMALL)
    assert [m.entity_id for m in mentions] == ["Q142", "Q159"]
    for m in mentions:
        assert text[m.start : m.end] == m.surface


def test_annotate_longest_match_wins():
    g = gaz(
        ("Q60", "New York", (), "Q515", "city"),
        ("QX", "York", (), "Q515", "city"),
    )
    mentions = annotate("in New York today", g)
    assert [m.entity_id for m in mentions] == ["Q60"]
    assert mentions[0].surface == "New York"


def test_annotate_normalized_matching():
    mentions = annotate("news from FRANCE!", SMALL)
    assert [m.entity_id for m in mentions] == ["Q142"]
    assert mentions[0].surface == "FRANCE"


def test_annotate_never_overlaps():
    g = gaz(
        ("Q60", "New York", (), "Q515", "city"),
        ("QX", "York", (), "Q515", "city"),
        ("QY", "New", (), "Q515", "city"),
    )
    text = "New York and York and New places in New York"
    mentions = annotate(text, g)
    spans = [(m.start, m.end) for m in mentions]
    assert spans == sorted(spans)
    for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
        assert e1 <= s2


def test_ambiguous_alias_links_lowest_id():
    g = gaz(
        ("Q2", "Wolf", (), "Q5", "person"),
        ("Q1", "Wolf", (), "A1", "animal"),
    )
    mentions = annotate("a wolf appeared", g)
    assert [m.entity_id for m in mentions] == ["Q1"]
    assert g.ambiguous() == {"wolf": ["Q1", "Q2"]}


def test_parse_timestamp_variants():
    assert parse_timestamp("2023-04-28T10:00:00Z") == parse_timestamp("2023-04-28T10:00:00+00:00")
    assert parse_timestamp("2023-04-28T12:00:00+02:00") == parse_timestamp("2023-04-28T10:00:00Z")
    with pytest.raises(CorpusFormatError):
        parse_timestamp("not a time")


# ----------------------------------------------------------------------
# build_graph


def test_build_empty_corpus(tmp_path, gazetteer_path):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("")
    graph, report = build_graph(corpus, gazetteer_path)
    stats = graph.graph_stats()
    assert stats.articles == 0
    assert stats.categories == 0
    assert report.articles == 0


def test_build_fixture_counts(news_graph):
    # hand count of tests/data/corpus.jsonl + gazetteer.json
    stats = news_graph.graph_stats()
    assert stats.articles == 15
    assert stats.categories == 4
    assert stats.entities == 10
    assert stats.entity_classes == 4
    assert stats.part_of_edges == 15
    assert stats.instance_of_edges == 10
    assert stats.mentions_edges == 26


def test_build_fixture_mentions_hand_checked(news_graph):
    expected = {
        "a15": {"Q159", "Q56577519", "Q458", "Q212"},
        "a12": {"Q142"},
        "a10": {"Q142", "Q212", "Q159", "Q458"},
        "a08": {"Q212", "Q159", "Q7747"},
        "a02": set(),
    }
    for article_id, want in expected.items():
        got = {e.entity_id for e in news_graph.get_article_entities(article_id)}
        assert got == want, article_id


def test_preannotated_records_bypass_annotator(tmp_path, gazetteer_path):
    corpus = tmp_path / "pre.jsonl"
    record = {
        "article_id": "p1",
        "title": "France on the move",  # would annotate Q142
        "body": "More about France and Russia.",
        "category_name": "politics",
        "published_at": "2023-01-01T00:00:00Z",
        "entity_ids": ["Q212"],
    }
    corpus.write_text(json.dumps(record) + "\n")
    graph, _ = build_graph(corpus, gazetteer_path)
    assert [e.entity_id for e in graph.get_article_entities("p1")] == ["Q212"]


def test_duplicate_article_id_skipped(tmp_path, gazetteer_path):
    base = {
        "title": "t",
        "body": "b",
        "category_name": "politics",
        "published_at": "2023-01-01T00:00:00Z",
    }
    lines = [
        json.dumps({"article_id": "d1", **base}),
        json.dumps({"article_id": "d1", **base, "title": "second copy"}),
    ]
    corpus = tmp_path / "dup.jsonl"
    corpus.write_text("\n".join(lines) + "\n")
    graph, report = build_graph(corpus, gazetteer_path)
    assert graph.graph_stats().articles == 1
    assert graph.article("d1").title == "t"
    assert len(report.skipped) == 1
    assert report.skipped[0]["reason"] == "duplicate article_id"


def test_unparseable_corpus_fails_fast_with_position(tmp_path, gazetteer_path):
    good = json.dumps(
        {
            "article_id": "x",
            "title": "t",
            "body": "b",
            "category_name": "politics",
            "published_at": "2023-01-01T00:00:00Z",
        }
    )
    corpus = tmp_path / "bad.jsonl"
    corpus.write_text(good + "\nnot json\n")
    with pytest.raises(CorpusFormatError) as exc:
        build_graph(corpus, gazetteer_path)
    assert ":2:" in str(exc.value)


def test_bad_gazetteer_reports_position(tmp_path, corpus_path):
    path = tmp_path / "bad.json"
    path.write_text("[{}]")
    with pytest.raises(CorpusFormatError) as exc:
        build_graph(corpus_path, path)
    assert "index 0" in str(exc.value)


def test_build_is_deterministic(corpus_path, gazetteer_path):
    g1, r1 = build_graph(corpus_path, gazetteer_path)
    g2, r2 = build_graph(corpus_path, gazetteer_path)
    assert g1.graph_stats() == g2.graph_stats()
    assert r1.mentions_per_article == r2.mentions_per_article
    for entity_id in ["Q142", "Q212", "Q159"]:
        assert [a.article_id for a in g1.articles_by_entity(entity_id)] == [
            a.article_id for a in g2.articles_by_entity(entity_id)
        ]
    assert [a.article_id for a in g1.overview_articles()] == [
        a.article_id for a in g2.overview_articles()
    ]


def test_every_article_has_one_category(news_graph):
    news_graph.validate()  # PART_OF totality is part of validate()
    stats = news_graph.graph_stats()
    assert stats.part_of_edges == stats.articles
