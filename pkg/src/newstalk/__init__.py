"""Conversational exploratory search over a news knowledge graph."""

__version__ = "0.1.0"

from newstalk.graph import Article, Category, Entity, EntityClass, KnowledgeGraph

__all__ = [
    "Article",
    "Category",
    "Entity",
    "EntityClass",
    "KnowledgeGraph",
    "__version__",
]
