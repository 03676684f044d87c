"""Synthetic social graphs: skewed degrees, random matching.

Out-degrees follow the workload's Zipf law; edge targets are uniform.
Generation is pure function of (users, alpha, seed).  No clustering or
community structure is imposed — followers of a popular user are a
uniform sample, which is all the workload's skew model needs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .zipf import zipf_for_alpha


@dataclass
class SocialGraph:
    users: int
    following: dict = field(default_factory=dict)  # u -> set of followees
    followers: dict = field(default_factory=dict)  # u -> set of followers

    def check_symmetry(self) -> int:
        """Edge count, after asserting both adjacency views agree."""
        edges = 0
        for u, outs in self.following.items():
            for v in outs:
                assert u in self.followers[v], (u, v)
                edges += 1
        back = sum(len(s) for s in self.followers.values())
        assert back == edges
        return edges


def build_social_graph(users: int, alpha: float, seed=None) -> SocialGraph:
    if users < 2:
        raise ValueError("a social graph needs at least two users")
    rng = random.Random(seed)
    degrees = zipf_for_alpha(users - 1, alpha)
    graph = SocialGraph(
        users,
        {u: set() for u in range(users)},
        {u: set() for u in range(users)},
    )
    for u in range(users):
        degree = degrees.sample(rng) + 1  # ranks are 0-based, degrees >= 1
        targets = rng.sample(range(users - 1), degree)
        for t in targets:
            v = t if t < u else t + 1  # skip u itself
            graph.following[u].add(v)
            graph.followers[v].add(u)
    return graph
