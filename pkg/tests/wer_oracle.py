"""Exhaustive minimal-alignment reference for word error counts.

Explores every minimal-cost alignment and returns the full set of
(substitutions, deletions, insertions) decompositions, so tests can
assert the library picks one of them. Independent of the library DP.
"""

from functools import lru_cache


def minimal_triples(ref_words, hyp_words):
    """(min_cost, frozenset of (S, D, I) triples achieving it)."""
    ref_words = tuple(ref_words)
    hyp_words = tuple(hyp_words)

    @lru_cache(maxsize=None)
    def best(i, j):
        if i == 0 and j == 0:
            return 0, frozenset({(0, 0, 0)})
        options = []
        if i > 0 and j > 0:
            sub = 0 if ref_words[i - 1] == hyp_words[j - 1] else 1
            cost, triples = best(i - 1, j - 1)
            options.append((cost + sub, {(s + sub, d, k) for s, d, k in triples}))
        if i > 0:
            cost, triples = best(i - 1, j)
            options.append((cost + 1, {(s, d + 1, k) for s, d, k in triples}))
        if j > 0:
            cost, triples = best(i, j - 1)
            options.append((cost + 1, {(s, d, k + 1) for s, d, k in triples}))
        lowest = min(cost for cost, _ in options)
        merged = set()
        for cost, triples in options:
            if cost == lowest:
                merged |= triples
        return lowest, frozenset(merged)

    return best(len(ref_words), len(hyp_words))
