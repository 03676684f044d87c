"""Small statistics helpers for benchmark reports."""

from __future__ import annotations

import statistics


def pearson(xs, ys) -> float:
    """Pearson correlation; rejects degenerate inputs loudly."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise ValueError("series differ in length: %d vs %d" % (len(xs), len(ys)))
    if len(xs) < 2:
        raise ValueError("need at least two points")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise ValueError("zero variance: correlation is undefined")
    return statistics.correlation(xs, ys)


def mean(xs) -> float:
    return statistics.fmean(xs)


def median(xs) -> float:
    return statistics.median(xs)
