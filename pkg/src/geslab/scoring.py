"""Penalized Gaussian likelihood score, decomposable over nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Dag
from .simulate import Dataset


class ScoreError(ValueError):
    """Raised when a local score cannot be computed."""


@dataclass(frozen=True)
class ScoreConfig:
    """Scoring knobs: complexity penalty weight, residual-variance floor, and
    the minimum score gain a search move must clear."""

    lam: float = 1.0
    variance_floor: float = 1e-12
    tie_epsilon: float = 1e-10

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.variance_floor > 0:
            raise ValueError(f"variance_floor must be positive, got {self.variance_floor}")
        if self.tie_epsilon < 0:
            raise ValueError(f"tie_epsilon must be non-negative, got {self.tie_epsilon}")


class GaussianBicScorer:
    """Per-node score -(n/2) ln(sigma^2) - lam (|parents|+1) ln(n) / 2, where
    sigma^2 is the floored mean squared residual of the node's least-squares
    regression on its parents.  Columns are mean-centered once; local values
    are cached by (node, parent set)."""

    def __init__(self, data: Dataset, config: ScoreConfig = ScoreConfig()):
        self.config = config
        self.n = data.n
        self.p = data.p
        self._centered = data.values - data.values.mean(axis=0)
        self._log_n = math.log(self.n)
        self._cache: dict[tuple[int, frozenset[int]], float] = {}
        self.floor_hits: set[tuple[int, frozenset[int]]] = set()

    def local(self, node: int, parents) -> float:
        parents = frozenset(parents)
        key = (node, parents)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if not 0 <= node < self.p:
            raise ScoreError(f"node {node} outside 0..{self.p - 1}")
        if node in parents or not all(0 <= q < self.p for q in parents):
            raise ScoreError(f"bad parent set {sorted(parents)} for node {node}")
        if self.n <= len(parents) + 1:
            raise ScoreError(
                f"need n > |parents| + 1 to score node {node} with parents "
                f"{sorted(parents)}: n={self.n}"
            )
        y = self._centered[:, node]
        if parents:
            x = self._centered[:, sorted(parents)]
            beta, *_ = np.linalg.lstsq(x, y, rcond=None)
            resid = y - x @ beta
            rss = float(resid @ resid)
        else:
            rss = float(y @ y)
        sigma2 = rss / self.n
        if sigma2 < self.config.variance_floor:
            sigma2 = self.config.variance_floor
            self.floor_hits.add(key)
        value = (
            -0.5 * self.n * math.log(sigma2)
            - 0.5 * self.config.lam * (len(parents) + 1) * self._log_n
        )
        if not math.isfinite(value):
            raise ScoreError(
                f"non-finite local score for node {node} with parents {sorted(parents)}"
            )
        self._cache[key] = value
        return value

    def total(self, dag: Dag) -> float:
        if dag.node_count != self.p:
            raise ScoreError(f"graph has {dag.node_count} nodes, data has {self.p}")
        return sum(self.local(v, dag.parents(v)) for v in range(self.p))


def local_bic(data: Dataset, node: int, parents, config: ScoreConfig = ScoreConfig()) -> float:
    return GaussianBicScorer(data, config).local(node, parents)


def total_score(data: Dataset, dag: Dag, config: ScoreConfig = ScoreConfig()) -> float:
    return GaussianBicScorer(data, config).total(dag)
