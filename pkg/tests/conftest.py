"""Shared test helpers: independent oracles kept deliberately naive."""

from __future__ import annotations

import itertools

from binorms.groups import FreeWord


def reduces_to_identity(codes) -> bool:
    stack = []
    for c in codes:
        if stack and stack[-1] == -c:
            stack.pop()
        else:
            stack.append(c)
    return not stack


def deletion_oracle(word: FreeWord) -> int:
    """Exhaustive minimum over all deletion subsets, smallest first."""
    codes = word.codes()
    length = len(codes)
    for deletions in range(length + 1):
        keep = length - deletions
        for kept in itertools.combinations(range(length), keep):
            if reduces_to_identity([codes[i] for i in kept]):
                return deletions
    return length
