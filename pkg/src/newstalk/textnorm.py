"""Text normalization shared by the ingestion annotator and the NLU linker.

Both sides must agree on one canonical form, otherwise surface forms seen at
query time would not line up with the alias index built at ingest time.
"""

from __future__ import annotations

import unicodedata

# Keep letters and digits; everything else is punctuation or whitespace.
_KEEP = {"Ll", "Lu", "Lt", "Lm", "Lo", "Nd", "Nl", "No"}


def normalize(text: str) -> str:
    """Canonical form: lower-case, diacritics folded, punctuation stripped,
    whitespace collapsed to single spaces. Idempotent."""
    decomposed = unicodedata.normalize("NFKD", text)
    out: list[str] = []
    for ch in decomposed:
        cat = unicodedata.category(ch)
        if cat in _KEEP:
            out.append(ch.lower())
        elif ch.isspace():
            out.append(" ")
        # combining marks (diacritics) and punctuation are dropped
    return " ".join("".join(out).split())


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split into (normalized_token, start, end) triples.

    Tokens are whitespace-delimited runs; spans are trimmed to the token's
    alphanumeric core so mention spans never carry leading or trailing
    punctuation. Tokens that normalize to nothing are dropped.
    """
    tokens: list[tuple[str, int, int]] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        norm = normalize(text[i:j])
        if norm:
            start, end = i, j
            while start < end and not text[start].isalnum():
                start += 1
            while end > start and not text[end - 1].isalnum():
                end -= 1
            if start < end:
                tokens.append((norm, start, end))
        i = j
    return tokens
