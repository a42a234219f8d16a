"""
Small parsing and normalisation helpers shared by services and the CLI
"""

import re
from typing import List, Tuple

_WHITESPACE = re.compile(r"\s+")


def normalize_whitespace(text: str) -> str:
    """Collapse every whitespace run to one space and trim"""
    if not text:
        return ""
    return _WHITESPACE.sub(" ", text).strip()


def normalized_lines(text: str) -> List[str]:
    """
    Split source text into whitespace-normalised, non-empty lines

    Args:
        text: Source text

    Returns:
        Normalised lines in original order, duplicates kept
    """
    lines = []
    for line in text.splitlines():
        norm = normalize_whitespace(line)
        if norm:
            lines.append(norm)
    return lines


def parse_int_list(value: str) -> List[int]:
    """
    Parse a comma-separated list of integers ("1,3,5")

    Raises:
        ValueError: if any item is not an integer
    """
    items = [item.strip() for item in value.split(",")]
    if not value.strip() or any(not item for item in items):
        raise ValueError(f"expected a comma-separated list of integers, got {value!r}")
    try:
        return [int(item) for item in items]
    except ValueError:
        raise ValueError(f"expected a comma-separated list of integers, got {value!r}")


def parse_int_range(value: str) -> Tuple[int, int]:
    """
    Parse "N" or "A-B" into an inclusive (low, high) pair

    Raises:
        ValueError: if the text is not a number or a range of numbers
    """
    match = re.fullmatch(r"\s*(-?\d+)\s*(?:-\s*(-?\d+)\s*)?", value)
    if not match:
        raise ValueError(f"expected N or A-B, got {value!r}")
    low = int(match.group(1))
    high = int(match.group(2)) if match.group(2) is not None else low
    return low, high
