"""Edit distances and name normalization shared by search and features."""

from __future__ import annotations

import re
import unicodedata

_WS = re.compile(r"\s+")
_WORD = re.compile(r"[^\W_]+", re.UNICODE)


def normalize_name(text):
    """Unicode case folding plus whitespace collapsing."""
    return _WS.sub(" ", text.casefold()).strip()


def _is_cjk(ch):
    return "㐀" <= ch <= "鿿" or "豈" <= ch <= "﫿"


def index_tokens(text):
    """Terms for the inverted indexes.

    Alphanumeric runs are single terms except CJK characters, which are
    indexed individually; a string with no word characters falls back to
    itself so pure-punctuation names stay searchable.
    """
    tokens = []
    for run in _WORD.findall(text):
        chunk = ""
        for ch in run:
            if _is_cjk(ch):
                if chunk:
                    tokens.append(chunk)
                    chunk = ""
                tokens.append(ch)
            else:
                chunk += ch
        if chunk:
            tokens.append(chunk)
    if not tokens and text:
        tokens.append(text)
    return tokens


def levenshtein(a, b):
    """Edit distance over two sequences (strings or token lists)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, item_a in enumerate(a, start=1):
        current = [i]
        for j, item_b in enumerate(b, start=1):
            cost = 0 if item_a == item_b else 1
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + cost))
        previous = current
    return previous[-1]


def word_edit_distance(a, b, language="ENG"):
    """Word-level Levenshtein: whitespace words, or characters for CMN.

    Case-insensitive, e.g. distance("George Bush", "George W. Bush") == 1.
    """
    if language == "CMN":
        return levenshtein(normalize_name(a).replace(" ", ""),
                           normalize_name(b).replace(" ", ""))
    return levenshtein(normalize_name(a).split(), normalize_name(b).split())
