"""Stopping rules and per-case distances in retained ordination dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .ordination import Ordination


@dataclass
class DistanceVector:
    """Euclidean distance from the origin over the first k components."""

    case_ids: list
    distances: np.ndarray
    k_used: int


def kaiser_guttman_k(eigenvalues) -> int:
    """Number of eigenvalues strictly greater than 1 (at least 1)."""
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    if eigenvalues.size == 0:
        raise InvalidInput("empty eigenvalue list")
    k = int(np.count_nonzero(eigenvalues > 1.0))
    return max(k, 1)


def variance_fraction_k(variance_fraction, tau: float) -> int:
    """Smallest k whose cumulative variance fraction reaches tau."""
    variance_fraction = np.asarray(variance_fraction, dtype=np.float64)
    if variance_fraction.size == 0:
        raise InvalidInput("empty variance fractions")
    if not 0 < tau <= 1:
        raise InvalidInput("variance target must be in (0, 1]")
    cum = np.cumsum(variance_fraction)
    hits = np.flatnonzero(cum >= tau - 1e-12)
    return int(hits[0]) + 1 if hits.size else len(cum)


def choose_k(ordination: Ordination, rule="kaiser") -> int:
    """Resolve a stopping rule: 'kaiser', a fixed int, or 'variance:<tau>'."""
    n = len(ordination.eigenvalues)
    if isinstance(rule, int):
        k = rule
    elif rule == "kaiser":
        k = kaiser_guttman_k(ordination.eigenvalues)
    elif isinstance(rule, str) and rule.startswith("fixed:"):
        k = int(rule.split(":", 1)[1])
    elif isinstance(rule, str) and rule.startswith("variance:"):
        k = variance_fraction_k(ordination.variance_fraction, float(rule.split(":", 1)[1]))
    else:
        raise InvalidInput(f"unknown stopping rule {rule!r}")
    if not 1 <= k <= n:
        raise InvalidInput(f"k={k} outside [1, {n}]")
    return k


def ordinal_distances(F, k: int, case_ids=None) -> DistanceVector:
    """d_i = sqrt(sum of squares of the first k coordinates of row i)."""
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2:
        raise InvalidInput("F must be 2-d")
    if not 1 <= k <= F.shape[1]:
        raise InvalidInput(f"k={k} outside [1, {F.shape[1]}]")
    d = np.sqrt(np.sum(F[:, :k] ** 2, axis=1))
    if case_ids is None:
        case_ids = list(range(F.shape[0]))
    return DistanceVector(case_ids=list(case_ids), distances=d, k_used=k)


def distances_for(ordination: Ordination, rule="kaiser") -> DistanceVector:
    """Apply a stopping rule to an ordination and compute distances."""
    k = choose_k(ordination, rule)
    return ordinal_distances(ordination.F, k, case_ids=ordination.case_ids)
