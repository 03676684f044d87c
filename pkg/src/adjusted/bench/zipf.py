"""Zipf-distributed sampling over a finite rank range.

Sampling uses the exact inverse CDF: the normalized cumulative weights of
ranks 1..n are tabulated once, and each draw is one uniform variate plus a
bisect.  Workload skew is parameterized by ``alpha`` in (0, 1], which maps
to the Zipf exponent ``1.2 * alpha`` — alpha 1 is a heavily skewed
power law, small alpha approaches uniform.
"""

from __future__ import annotations

import bisect
import itertools


class ZipfSampler:
    """Draws 0-based indexes with P(i) proportional to (i+1)**-exponent."""

    def __init__(self, n: int, exponent: float):
        if n < 1:
            raise ValueError("need at least one rank")
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        self.n = n
        self.exponent = exponent
        acc = itertools.accumulate(
            (rank ** -exponent if exponent else 1.0) for rank in range(1, n + 1)
        )
        self._cdf = list(acc)
        self._total = self._cdf[-1]

    def sample(self, rng) -> int:
        u = rng.random() * self._total
        return bisect.bisect_left(self._cdf, u)

    def weight(self, index: int) -> float:
        """Probability mass of a 0-based index."""
        lo = self._cdf[index - 1] if index else 0.0
        return (self._cdf[index] - lo) / self._total


def zipf_for_alpha(n: int, alpha: float) -> ZipfSampler:
    """The sampler the workloads use: exponent 1.2 * alpha, alpha in (0, 1]."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1], got %r" % (alpha,))
    return ZipfSampler(n, 1.2 * alpha)
