"""Template-based response generation.

Each agent action kind owns a list of weighted text variants; rendering
draws one with the session's PRNG and fills the {slot} markers from the
action payload. The inventory is validated up front so rendering can never
fail mid-conversation.
"""

from __future__ import annotations

import random
import string
from importlib import resources

import yaml

from newstalk.dialogue import ActionKind, AgentAction


class TemplateError(ValueError):
    """Inventory is missing a kind or references an unknown slot."""


# slots the renderer can derive from each action kind's payload
_SLOTS_BY_KIND: dict[ActionKind, set[str]] = {
    ActionKind.WELCOME: set(),
    ActionKind.HELP_TEXT: set(),
    ActionKind.INTRODUCE_SEARCH: set(),
    ActionKind.LIST_ARTICLES: {"titles", "count", "subject", "page"},
    ActionKind.NO_RESULTS: {"subject", "reason"},
    ActionKind.READ_CHUNK: {"text", "title"},
    ActionKind.SUGGEST_ENTITIES: {"labels", "count"},
    ActionKind.CLARIFY: {"detail", "reason"},
    ActionKind.GOODBYE: set(),
    ActionKind.REPEAT_NOTICE: set(),
}


def _slots_for(action: AgentAction) -> dict[str, str]:
    payload = action.payload
    kind = action.kind
    if kind is ActionKind.LIST_ARTICLES:
        titles = payload.get("titles", [])
        return {
            "titles": "\n".join(f"{i}. {t}" for i, t in enumerate(titles, start=1)),
            "count": str(len(titles)),
            "subject": str(payload.get("subject", "")),
            "page": str(payload.get("page", 1)),
        }
    if kind is ActionKind.SUGGEST_ENTITIES:
        labels = list(payload.get("labels", []))
        if len(labels) > 1:
            joined = ", ".join(labels[:-1]) + " and " + labels[-1]
        else:
            joined = labels[0] if labels else ""
        return {"labels": joined, "count": str(len(labels))}
    if kind is ActionKind.READ_CHUNK:
        return {"text": str(payload.get("text", "")), "title": str(payload.get("title", ""))}
    if kind is ActionKind.NO_RESULTS:
        return {"subject": str(payload.get("subject", "")), "reason": str(payload.get("reason", ""))}
    if kind is ActionKind.CLARIFY:
        return {"detail": str(payload.get("detail", "")), "reason": str(payload.get("reason", ""))}
    return {}


def _variant_key(action: AgentAction) -> str | None:
    """Optional refined template key, e.g. NoResults:end_of_results."""
    if action.kind in (ActionKind.NO_RESULTS, ActionKind.CLARIFY) and action.payload.get("reason"):
        return f"{action.kind.value}:{action.payload['reason']}"
    if action.kind is ActionKind.REPEAT_NOTICE and not action.payload.get("has_content", True):
        return "RepeatNotice:empty"
    if action.kind is ActionKind.READ_CHUNK and action.payload.get("is_final"):
        return "ReadChunk:final"
    return None


def _template_slots(template: str) -> set[str]:
    names = set()
    for _, name, _, _ in string.Formatter().parse(template):
        if name is not None:
            if not name:
                raise TemplateError(f"positional slot in template: {template!r}")
            names.add(name)
    return names


class TemplateInventory:
    """Weighted response variants keyed by action kind."""

    def __init__(self, variants: dict[str, list[tuple[str, float]]]):
        self.variants = variants
        self.validate()

    @classmethod
    def load(cls, path=None) -> "TemplateInventory":
        if path is None:
            text = resources.files("newstalk.data").joinpath("templates.yaml").read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        raw = yaml.safe_load(text)
        variants: dict[str, list[tuple[str, float]]] = {}
        for key, entries in raw["templates"].items():
            parsed = []
            for entry in entries:
                if isinstance(entry, str):
                    parsed.append((entry, 1.0))
                else:
                    parsed.append((entry["text"], float(entry.get("weight", 1.0))))
            variants[key] = parsed
        return cls(variants)

    def validate(self) -> None:
        """Every action kind must be renderable before the service starts."""
        for kind in ActionKind:
            if kind.value not in self.variants:
                raise TemplateError(f"no templates for action kind {kind.value}")
        for key, entries in self.variants.items():
            base = key.split(":", 1)[0]
            try:
                kind = ActionKind(base)
            except ValueError:
                raise TemplateError(f"unknown action kind in template key: {key}") from None
            if not entries:
                raise TemplateError(f"empty variant list for {key}")
            allowed = _SLOTS_BY_KIND[kind]
            for template, weight in entries:
                if weight <= 0:
                    raise TemplateError(f"non-positive weight in {key}")
                unknown = _template_slots(template) - allowed
                if unknown:
                    raise TemplateError(f"unresolvable slots {sorted(unknown)} in {key}: {template!r}")

    def variants_for(self, action: AgentAction) -> list[tuple[str, float]]:
        refined = _variant_key(action)
        if refined is not None and refined in self.variants:
            return self.variants[refined]
        return self.variants[action.kind.value]

    def render(self, action: AgentAction, rng: random.Random) -> str:
        """Weighted variant draw + slot substitution; advances the PRNG."""
        entries = self.variants_for(action)
        texts = [t for t, _ in entries]
        weights = [w for _, w in entries]
        template = rng.choices(texts, weights=weights, k=1)[0]
        return template.format(**_slots_for(action))


def render_actions(inventory: TemplateInventory, actions: list[AgentAction], rng: random.Random) -> list[str]:
    return [inventory.render(action, rng) for action in actions]
