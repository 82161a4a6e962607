"""CA and PCA ordinations of coded matrices.

Both methods reduce to a thin SVD of a normalized target matrix and
return principal coordinates of the cases (F), contribution coordinates
of the variables (V), and the eigenvalue spectrum (squared singular
values) backing a scree plot.

CA operates on non-negative data: the target is the matrix of
standardized residuals of the correspondence matrix. PCA standardizes
each column (sample std, divisor m-1) and scales by 1/sqrt(m-1) so the
eigenvalues are exactly those of the sample correlation matrix (their
sum equals the column count).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .coding import CodedMatrix
from .errors import ConstantColumn, InvalidInput


@dataclass
class Ordination:
    """Result of a CA or PCA ordination."""

    method: str
    F: np.ndarray
    V: np.ndarray
    singular_values: np.ndarray
    eigenvalues: np.ndarray
    variance_fraction: np.ndarray
    case_ids: list
    variable_names: list


def _spectrum(singular_values):
    eig = singular_values**2
    total = eig.sum()
    frac = eig / total if total > 0 else np.zeros_like(eig)
    return eig, frac


def ordinate_ca(coded: CodedMatrix, target_strategy="vectorized") -> Ordination:
    """Correspondence analysis of a non-negative coded matrix."""
    N = coded.matrix
    if N.shape[0] < 2 or N.shape[1] < 2:
        raise InvalidInput("CA needs at least a 2x2 matrix")
    P, r, c = linalg.correspondence_matrix(N)
    target = linalg.CA_TARGET_STRATEGIES[target_strategy]
    T = target(P, r, c)
    res = linalg.svd(T)
    F = linalg.principal_coordinates(res, row_scale=r)
    eig, frac = _spectrum(res.singular_values)
    return Ordination(
        method="CA",
        F=F,
        V=res.V,
        singular_values=res.singular_values,
        eigenvalues=eig,
        variance_fraction=frac,
        case_ids=list(coded.case_ids),
        variable_names=list(coded.variable_names),
    )


def ordinate_pca(coded: CodedMatrix) -> Ordination:
    """PCA of columnwise-standardized data (correlation-matrix convention)."""
    X = coded.matrix
    m = X.shape[0]
    if m < 2:
        raise InvalidInput("PCA needs at least 2 cases")
    std = X.std(axis=0, ddof=1)
    flat = np.flatnonzero(std == 0)
    if flat.size:
        raise ConstantColumn(coded.variable_names[int(flat[0])])
    Z = (X - X.mean(axis=0)) / std
    T = Z / np.sqrt(m - 1)
    res = linalg.svd(T)
    # Uniform row masses 1/m: F = sqrt(m) * U * diag(s).
    F = linalg.principal_coordinates(res, row_scale=None)
    eig, frac = _spectrum(res.singular_values)
    return Ordination(
        method="PCA",
        F=F,
        V=res.V,
        singular_values=res.singular_values,
        eigenvalues=eig,
        variance_fraction=frac,
        case_ids=list(coded.case_ids),
        variable_names=list(coded.variable_names),
    )


def scree(ordination: Ordination):
    """(component, eigenvalue, cumulative variance fraction) triples, 1-based."""
    cum = np.cumsum(ordination.variance_fraction)
    return [
        (j + 1, float(ordination.eigenvalues[j]), float(cum[j]))
        for j in range(len(ordination.eigenvalues))
    ]
