"""Explained variance by multivariate regression, and low-rank ordination.

The central quantity: the fraction of total logratio variance explained by
a set of logratio predictors. The J CLR columns are the responses; each is
regressed (with intercept) on all predictor columns by least squares, and
the weighted fitted variances are accumulated. Running the J regressions
jointly or separately gives the same number, which the tests exploit as an
oracle.

Ordination is the matching low-rank picture: an SVD of the column-centred
CLR matrix (weighted by the part weights) or of a column-centred logratio
value matrix, exported as biplot coordinates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .compositions import (
    CompositionMatrix,
    LogratioSpec,
    PartWeights,
    clr_matrix,
    slr_values,
)
from .errors import DegenerateDataError, InputDataError
from .variance import column_variances

__all__ = [
    "RegressionFit",
    "OrdinationResult",
    "explained_variance",
    "lra",
    "pca_of_logratios",
    "ternary_coords",
]

# Relative singular-value cutoff below which predictor directions are
# treated as collinear and projected out.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares fit of the CLR responses on logratio predictors.

    ``fitted_variance + residual_variance`` reconstructs the total logratio
    variance exactly (the fit includes an intercept, so the decomposition is
    Pythagorean). ``coefficients`` has one row per retained predictor, one
    column per response part; for collinear designs it is the minimum-norm
    solution, and the fitted values are the projection onto the predictor
    column space, which is well defined regardless of rank.
    """

    intercepts: np.ndarray
    coefficients: np.ndarray
    fitted_variance: float
    residual_variance: float
    explained_fraction: float
    predictors: tuple[LogratioSpec, ...]

    @property
    def total_variance(self) -> float:
        return self.fitted_variance + self.residual_variance

    def to_document(self, part_names: Sequence[str] | None = None) -> dict:
        labels = [s.label(part_names) for s in self.predictors]
        return {
            "explained_fraction": self.explained_fraction,
            "explained_pct": 100.0 * self.explained_fraction,
            "fitted_variance": self.fitted_variance,
            "residual_variance": self.residual_variance,
            "predictors": labels,
        }


def predictor_columns(
    m: CompositionMatrix, specs: Sequence[LogratioSpec]
) -> np.ndarray:
    """Evaluate logratio specs into an I x P design block (no intercept)."""
    if not specs:
        return np.empty((m.n_samples, 0))
    return np.column_stack([slr_values(m, s) for s in specs])


def explained_variance(
    m: CompositionMatrix,
    w: PartWeights | None = None,
    predictors: Sequence[LogratioSpec] = (),
) -> RegressionFit:
    """Fit all CLR responses on the given logratio predictors.

    Zero-variance predictors are dropped with a warning; collinear ones are
    harmless because the fit is computed as a projection with a rank cutoff
    of ``RANK_TOL`` relative to the largest singular value.
    """
    if w is None:
        w = PartWeights.uniform(m.n_parts)
    responses = clr_matrix(m, w)
    n = m.n_samples
    y_mean = responses.mean(axis=0)
    centred = responses - y_mean
    total = float(np.sum(w.weights * np.mean(centred * centred, axis=0)))
    if total == 0:
        raise DegenerateDataError(
            "total logratio variance is zero (constant composition)"
        )

    kept: list[LogratioSpec] = []
    cols: list[np.ndarray] = []
    for spec in predictors:
        x = slr_values(m, spec)
        if np.ptp(x) == 0:
            warnings.warn(
                f"predictor {spec.label(m.part_names)} has zero variance; dropped",
                stacklevel=2,
            )
            continue
        kept.append(spec)
        cols.append(x)

    if len(kept) >= n:
        raise InputDataError(
            f"{len(kept)} predictors for {n} samples; need fewer linearly "
            "independent predictors than samples"
        )

    if not cols:
        return RegressionFit(
            intercepts=y_mean,
            coefficients=np.empty((0, m.n_parts)),
            fitted_variance=0.0,
            residual_variance=total,
            explained_fraction=0.0,
            predictors=(),
        )

    design = np.column_stack(cols)
    x_mean = design.mean(axis=0)
    design_c = design - x_mean
    u, s, vt = np.linalg.svd(design_c, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    u, s, vt = u[:, :rank], s[:rank], vt[:rank]

    projected = u.T @ centred                     # rank x J
    fitted = u @ projected
    coefficients = vt.T @ (projected / s[:, None])  # minimum-norm, P x J
    intercepts = y_mean - x_mean @ coefficients

    fitted_var = float(np.sum(w.weights * np.mean(fitted * fitted, axis=0)))
    resid = centred - fitted
    resid_var = float(np.sum(w.weights * np.mean(resid * resid, axis=0)))

    return RegressionFit(
        intercepts=intercepts,
        coefficients=coefficients,
        fitted_variance=fitted_var,
        residual_variance=resid_var,
        explained_fraction=fitted_var / total,
        predictors=tuple(kept),
    )


@dataclass(frozen=True)
class OrdinationResult:
    """Biplot coordinates from an SVD.

    Rows are in principal scale (their weighted mean square along axis k is
    the axis variance), variables in standard scale, so the inner products
    reconstruct the analysed matrix: a form biplot. ``dim_variances`` are
    the squared singular values and sum to the total variance of the
    analysed matrix. ``group_hulls`` gives, per group level, the row indices
    of the convex hull of the first two coordinates in drawing order.
    """

    row_coords: np.ndarray
    col_coords: np.ndarray
    dim_variances: np.ndarray
    dim_percentages: np.ndarray
    variables: tuple[str, ...]
    sample_labels: tuple[str, ...]
    group_factor: tuple[str, ...] | None
    group_hulls: dict[str, tuple[int, ...]] | None

    @property
    def n_dims(self) -> int:
        return self.row_coords.shape[1]

    def to_document(self) -> dict:
        dims = [f"dim{k + 1}" for k in range(self.n_dims)]
        doc = {
            "dims": dims,
            "dim_variances": [float(v) for v in self.dim_variances],
            "dim_percentages": [float(p) for p in self.dim_percentages],
            "samples": [
                {
                    "label": lbl,
                    "group": self.group_factor[i] if self.group_factor else None,
                    "coords": [float(x) for x in self.row_coords[i]],
                }
                for i, lbl in enumerate(self.sample_labels)
            ],
            "variables": [
                {"name": name, "coords": [float(x) for x in self.col_coords[v]]}
                for v, name in enumerate(self.variables)
            ],
        }
        if self.group_hulls is not None:
            doc["group_hulls"] = {g: list(idx) for g, idx in self.group_hulls.items()}
        return doc


def _fix_signs(u: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Largest-magnitude variable loading on each axis made positive, so
    # coordinates are reproducible across BLAS implementations.
    for k in range(cols.shape[1]):
        i = int(np.argmax(np.abs(cols[:, k])))
        if cols[i, k] < 0:
            cols[:, k] = -cols[:, k]
            u[:, k] = -u[:, k]
    return u, cols


def _hulls_2d(
    coords: np.ndarray, groups: tuple[str, ...] | None
) -> dict[str, tuple[int, ...]] | None:
    if groups is None:
        return None
    hulls: dict[str, tuple[int, ...]] = {}
    for level in sorted(set(groups)):
        idx = np.array([i for i, g in enumerate(groups) if g == level])
        pts = coords[idx, :2]
        if len(idx) <= 2:
            hulls[level] = tuple(int(i) for i in idx)
            continue
        try:
            hull = ConvexHull(pts)
            hulls[level] = tuple(int(idx[v]) for v in hull.vertices)
        except QhullError:
            # collinear points: fall back to the extremes along dim 1
            order = np.argsort(pts[:, 0])
            hulls[level] = (int(idx[order[0]]), int(idx[order[-1]]))
    return hulls


def _svd_ordination(
    scaled: np.ndarray,
    col_backscale: np.ndarray,
    n_samples: int,
    n_dims: int,
    variables: tuple[str, ...],
    sample_labels: tuple[str, ...],
    group_factor: tuple[str, ...] | None,
    scaling: str = "row-principal",
) -> OrdinationResult:
    u, s, vt = np.linalg.svd(scaled, full_matrices=False)
    u, s = u[:, :n_dims], s[:n_dims]
    col_coords = vt[:n_dims].T * col_backscale[:, None]
    u, col_coords = _fix_signs(u, col_coords)
    if scaling == "row-principal":
        row_coords = np.sqrt(n_samples) * u * s
    elif scaling == "column-principal":
        row_coords = np.sqrt(n_samples) * u
        col_coords = col_coords * s[None, :]
    else:
        raise InputDataError(
            f"unknown scaling {scaling!r}; use 'row-principal' or 'column-principal'"
        )
    variances = s * s
    total = float(variances.sum())
    if total == 0:
        raise DegenerateDataError("nothing to ordinate: data are constant")
    return OrdinationResult(
        row_coords=row_coords,
        col_coords=col_coords,
        dim_variances=variances,
        dim_percentages=100.0 * variances / total,
        variables=variables,
        sample_labels=sample_labels,
        group_factor=group_factor,
        group_hulls=_hulls_2d(row_coords, group_factor),
    )


def lra(
    m: CompositionMatrix,
    w: PartWeights | None = None,
    scaling: str = "row-principal",
) -> OrdinationResult:
    """Logratio analysis: the SVD/PCA of the column-centred CLR matrix.

    Rows are weighted 1/I, columns by the part weights, so the axis
    variances sum to the total logratio variance. A 3-part composition is
    exactly two-dimensional. The default row-principal (form) biplot puts
    rows in principal scale; ``scaling="column-principal"`` swaps which
    side absorbs the singular values. Either way the inner products
    reconstruct the centred CLR matrix.
    """
    if w is None:
        w = PartWeights.uniform(m.n_parts)
    clr = clr_matrix(m, w)
    centred = clr - clr.mean(axis=0)
    if np.ptp(centred) == 0:
        raise DegenerateDataError("constant composition has no logratio variance")
    scaled = centred * np.sqrt(w.weights)[None, :] / np.sqrt(m.n_samples)
    n_dims = min(m.n_samples - 1, m.n_parts - 1)
    return _svd_ordination(
        scaled,
        col_backscale=1.0 / np.sqrt(w.weights),
        n_samples=m.n_samples,
        n_dims=n_dims,
        variables=m.part_names,
        sample_labels=m.sample_labels,
        group_factor=m.group_factor,
        scaling=scaling,
    )


def pca_of_logratios(
    m: CompositionMatrix,
    specs: Sequence[LogratioSpec],
    standardize: bool = False,
    scaling: str = "row-principal",
) -> OrdinationResult:
    """PCA of selected logratio values (centred, unstandardized by default).

    Keeping the raw variances preserves the variance accounting used
    everywhere else; pass ``standardize=True`` to give each logratio unit
    variance instead.
    """
    if len(specs) < 2:
        raise InputDataError("need at least 2 logratios to ordinate")
    for a in range(len(specs)):
        for b in range(a + 1, len(specs)):
            if specs[a] == specs[b]:
                raise InputDataError(
                    f"duplicate logratio: {specs[a].label(m.part_names)}"
                )
    values = predictor_columns(m, specs)
    centred = values - values.mean(axis=0)
    if standardize:
        sd = np.sqrt(column_variances(values))
        if np.any(sd == 0):
            v = int(np.argmax(sd == 0))
            raise DegenerateDataError(
                f"logratio {specs[v].label(m.part_names)} is constant; "
                "cannot standardize"
            )
        centred = centred / sd
    if np.ptp(centred) == 0:
        raise DegenerateDataError("all logratios are constant")
    scaled = centred / np.sqrt(m.n_samples)
    n_dims = min(m.n_samples - 1, len(specs))
    return _svd_ordination(
        scaled,
        col_backscale=np.ones(len(specs)),
        n_samples=m.n_samples,
        n_dims=n_dims,
        variables=tuple(s.label(m.part_names) for s in specs),
        sample_labels=m.sample_labels,
        group_factor=m.group_factor,
        scaling=scaling,
    )


def ternary_coords(m: CompositionMatrix) -> np.ndarray:
    """Barycentric coordinates of a 3-part composition in the unit triangle.

    Vertices for parts 1..3 are (0,0), (1,0) and (1/2, sqrt(3)/2). Rows are
    normalized internally, so percentages and proportions map identically.
    """
    if m.n_parts != 3:
        raise InputDataError(f"ternary coordinates need exactly 3 parts, got {m.n_parts}")
    sums = m.values.sum(axis=1)
    if np.any(sums <= 0):
        i = int(np.argmax(sums <= 0))
        raise InputDataError(
            f"row sum is {sums[i]} at sample {m.sample_labels[i]!r}"
        )
    p = m.values / sums[:, None]
    x = p[:, 1] + 0.5 * p[:, 2]
    y = (np.sqrt(3.0) / 2.0) * p[:, 2]
    return np.column_stack([x, y])
