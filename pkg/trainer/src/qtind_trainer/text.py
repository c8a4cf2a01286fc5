"""Tokenization matching the engine's file contract.

Exported score-table terms must coincide with the tokens the engine
produces from the same collection file, so the rule is identical:
lowercase, split on every character that is not a letter or digit.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())
