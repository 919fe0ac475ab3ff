"""Singleton conformance checking, prompting protocols and McNemar statistics."""

import json as _json

from . import _core
from ._core import (
    ROLE_PROMPT,
    STRATEGIES,
    Error,
    extract_code,
    feedback_prompt,
    initial_prompt,
    render_report,
    significance_stars,
    singleton_score,
)

__all__ = [
    "ROLE_PROMPT",
    "STRATEGIES",
    "Error",
    "check_source",
    "extract_code",
    "feedback_prompt",
    "initial_prompt",
    "mcnemar",
    "parse_classes",
    "render_report",
    "significance_stars",
    "singleton_score",
]


def parse_classes(source):
    """Class models extracted from Java source, plus parser warnings."""
    return _json.loads(_core.parse_classes(source))


def check_source(source, expected_class=""):
    """Predicate report and Singleton Score for the primary class of `source`."""
    return _json.loads(_core.check_source(source, expected_class))


def mcnemar(b, c):
    """McNemar test on discordant counts b (baseline-only passes) and c (strategy-only passes)."""
    return _json.loads(_core.mcnemar(b, c))
