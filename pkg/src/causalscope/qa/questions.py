"""Natural-language question templates.

Questions are matched against a fixed registry of regular expressions, one
per template.  Matching is case-insensitive for the surrounding phrasing
while variable names are captured verbatim (sensor names are case
sensitive).  Anything that matches no template parses as unsupported
rather than raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CATEGORY_STRUCTURE = "structure"
CATEGORY_REASONING = "reasoning"
CATEGORY_RCA = "rca"
CATEGORY_DISCOVERY = "discovery"

_VAR = r"[A-Za-z_][A-Za-z0-9_]*"
_NUM = r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"
_ARROW = r"(?:->|-->|→)"

_COUNT_WORDS = {
    "one": 1,
    "two": 2,
    "three": 3,
    "four": 4,
    "five": 5,
    "six": 6,
    "seven": 7,
    "eight": 8,
    "nine": 9,
    "ten": 10,
}


def parse_count(token: str) -> int:
    token = token.strip().lower()
    if token in _COUNT_WORDS:
        return _COUNT_WORDS[token]
    return int(token)


@dataclass(frozen=True)
class ParsedQuestion:
    text: str
    supported: bool
    template_id: str | None = None
    category: str | None = None
    slots: dict = field(default_factory=dict)


# (template_id, category, compiled pattern, slot names in group order)
_TEMPLATES: list[tuple[str, str, re.Pattern, tuple[str, ...]]] = []


def _register(template_id: str, category: str, pattern: str, slots: tuple[str, ...]) -> None:
    _TEMPLATES.append((template_id, category, re.compile(pattern, re.IGNORECASE), slots))


_COUNT = r"\d+|" + "|".join(_COUNT_WORDS)

_register(
    "structure.does_cause",
    CATEGORY_STRUCTURE,
    rf"^\s*does\s+({_VAR})\s+cause\s+({_VAR})\s*\?*\s*$",
    ("source", "target"),
)
_register(
    "structure.causal_relation",
    CATEGORY_STRUCTURE,
    rf"^\s*is\s+there\s+a\s+causal\s+relation(?:ship)?\s+between\s+({_VAR})\s+and\s+({_VAR})"
    rf"\s*(?:\([^)]*\))?\s*\?*\s*$",
    ("first", "second"),
)
_register(
    "structure.parents",
    CATEGORY_STRUCTURE,
    rf"^\s*what\s+(?:variables\s+have\s+a\s+direct\s+causal\s+effect\s+on"
    rf"|are\s+the\s+(?:causal\s+parents|direct\s+causes)\s+of)\s+({_VAR})"
    rf"\s*(?:\([^)]*\))?\s*\?*\s*$",
    ("target",),
)
_register(
    "reasoning.strength",
    CATEGORY_REASONING,
    rf"^\s*what\s+is\s+the\s+strength\s+of\s+the\s+causal\s+relation(?:ship)?\s+between"
    rf"\s+({_VAR})\s+and\s+({_VAR})\s*\?*\s*$",
    ("source", "target"),
)
_register(
    "reasoning.strongest_cause",
    CATEGORY_REASONING,
    rf"^\s*which\s+variable\s+has\s+the\s+strongest\s+causal\s+effect\s+on\s+({_VAR})\s*\?*\s*$",
    ("target",),
)
_register(
    "reasoning.intervention",
    CATEGORY_REASONING,
    rf"^\s*if\s+(?:the\s+value\s+of\s+)?({_VAR})\s+(?:were|was|is)\s+set\s+to\s+(?:value\s+)?({_NUM})"
    rf"\s*,?\s+what\s+would\s+be\s+(?:the|its)\s+effect\s+on\s+({_VAR})\s*\?*\s*$",
    ("source", "value", "target"),
)
_register(
    "rca.most_likely",
    CATEGORY_RCA,
    rf"^\s*what\s+is\s+the\s+(?:most\s+likely\s+root\s+cause|strongest\s+cause)\s+of\s+the"
    rf"\s+anomal(?:ous\s+value|y)\s+(?:of|in)\s+(?:variable\s+)?({_VAR})\s*\?*\s*$",
    ("target",),
)
_register(
    "rca.top_k",
    CATEGORY_RCA,
    rf"^\s*what\s+are\s+the\s+({_COUNT})\s+most\s+likely\s+root\s+causes\s+of\s+the"
    rf"\s+anomal(?:ous\s+value|y)\s+(?:of|in)\s+(?:variable\s+)?({_VAR})"
    rf"\s*(?:,?\s+ranked\s+in\s+descending\s+order)?\s*\?*\s*$",
    ("count", "target"),
)
_register(
    "rca.is_likely",
    CATEGORY_RCA,
    rf"^\s*is\s+({_VAR})\s+a\s+likely\s+root\s+cause\s+of\s+the\s+anomal(?:ous\s+value|y)"
    rf"\s+(?:of|in)\s+(?:variable\s+)?({_VAR})\s*\?*\s*$",
    ("candidate", "target"),
)
_register(
    "rca.compare",
    CATEGORY_RCA,
    rf"^\s*which\s+is\s+more\s+likely\s+to\s+be\s+the\s+root\s+cause\s*[:,]?\s+({_VAR})\s+or"
    rf"\s+({_VAR})\s*\?*\s*$",
    ("first", "second"),
)
_register(
    "rca.why_not",
    CATEGORY_RCA,
    rf"^\s*why\s+is\s+({_VAR})\s+not\s+considered\s+a\s+likely\s+root\s+cause"
    rf"(?:\s+of\s+the\s+anomal(?:ous\s+value|y)\s+(?:of|in)\s+(?:variable\s+)?({_VAR}))?\s*\?*\s*$",
    ("candidate", "target"),
)
_register(
    "discovery.algorithm",
    CATEGORY_DISCOVERY,
    r"^\s*(?:what|which)\s+algorithm\s+was\s+used\s+to\s+(?:learn|discover)\s+the\s+causal"
    r"\s+graph\s*\?*\s*$",
    (),
)
_register(
    "discovery.edge_stability",
    CATEGORY_DISCOVERY,
    rf"^\s*what\s+is\s+the\s+stability\s+(?:score\s+)?of\s+the\s+edge\s+({_VAR})\s*{_ARROW}"
    rf"\s*({_VAR})\s*\?*\s*$",
    ("source", "target"),
)
_register(
    "discovery.least_reliable",
    CATEGORY_DISCOVERY,
    r"^\s*which\s+edges\s+(?:in\s+the\s+graph\s+)?are\s+(?:considered\s+)?the\s+least"
    r"\s+reliable\s*\?*\s*$",
    (),
)
_register(
    "discovery.bootstrap_count",
    CATEGORY_DISCOVERY,
    r"^\s*how\s+many\s+bootstrap\s+(?:iterations|samples|replicates)\s+were\s+used"
    r"(?:\s+during\s+causal\s+discovery)?\s*\?*\s*$",
    (),
)


def template_ids() -> tuple[str, ...]:
    return tuple(t[0] for t in _TEMPLATES)


def parse_question(text: str) -> ParsedQuestion:
    """Match a question against the template registry.

    Returns the first matching template with its captured slots; templates
    are mutually exclusive in practice since each requires distinct anchor
    phrasing.  Unmatched text yields supported=False.
    """
    for template_id, category, pattern, slot_names in _TEMPLATES:
        m = pattern.match(text)
        if m is None:
            continue
        slots = {}
        for name, value in zip(slot_names, m.groups()):
            if value is None:
                continue
            if name == "count":
                slots[name] = parse_count(value)
            elif name == "value":
                slots[name] = float(value)
            else:
                slots[name] = value
        return ParsedQuestion(
            text=text,
            supported=True,
            template_id=template_id,
            category=category,
            slots=slots,
        )
    return ParsedQuestion(text=text, supported=False)
