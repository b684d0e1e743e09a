"""
Curriculum task tags: a family letter, optionally primed for a revisit.
"""

import re
from typing import Tuple

from .errors import MalformedTagError

TAG_PATTERN = re.compile(r"^([A-E])(')?$")


def parse_tag(tag: str) -> Tuple[str, bool]:
    """
    Split a tag into its base family and revisit flag.

    Raises:
        MalformedTagError: If the tag is not ``A``-``E`` with an optional prime
    """
    match = TAG_PATTERN.match(str(tag))
    if not match:
        raise MalformedTagError(f"Malformed task tag {tag!r}; expected A-E with an optional prime")
    return match.group(1), match.group(2) is not None


def base_tag(tag: str) -> str:
    return parse_tag(tag)[0]


def is_revisit(tag: str) -> bool:
    return parse_tag(tag)[1]
