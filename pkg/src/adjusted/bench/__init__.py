"""Benchmark harness: microbenchmarks and a social-network workload."""

from .micro import MicroConfig, micro_run
from .report import BenchReport, ThreadSample
from .retwis import (
    DEFAULT_MIX,
    OP_NAMES,
    RetwisConfig,
    RetwisStore,
    VARIANTS,
    retwis_run,
)
from .social import SocialGraph, build_social_graph
from .stats import mean, median, pearson
from .zipf import ZipfSampler, zipf_for_alpha

__all__ = [
    "BenchReport",
    "DEFAULT_MIX",
    "MicroConfig",
    "OP_NAMES",
    "RetwisConfig",
    "RetwisStore",
    "SocialGraph",
    "ThreadSample",
    "VARIANTS",
    "ZipfSampler",
    "build_social_graph",
    "mean",
    "median",
    "micro_run",
    "pearson",
    "retwis_run",
    "zipf_for_alpha",
]
