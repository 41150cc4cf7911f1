"""Total logratio variance, by the all-pairs formula and the CLR shortcut.

The total logratio variance of a strictly positive composition matrix with
part weights c is

    sum over j < k of  c_j * c_k * var(log x_j - log x_k)        (all pairs)
    sum over j        of  c_j * var(CLR column j)                 (shortcut)

and the two are algebraically identical. The all-pairs route costs
J*(J-1)/2 variances, the shortcut only J; both are kept because the
per-pair variances themselves feed candidate tables downstream.

Variances are population variances: sums of squared deviations divided by
the number of samples I, never I - 1. Mixing conventions silently scales
every absolute variance by (I-1)/I, so the sample version is deliberately
not offered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .compositions import CompositionMatrix, PartWeights, clr_matrix
from .errors import DegenerateDataError, InputDataError

__all__ = [
    "VarianceReport",
    "variance_population",
    "total_logratio_variance",
    "explained_percentage",
]


def variance_population(v: np.ndarray) -> float:
    """Population variance of a vector: mean squared deviation from the mean."""
    a = np.asarray(v, dtype=float).ravel()
    if a.size == 0:
        raise InputDataError("cannot take the variance of an empty vector")
    d = a - a.mean()
    return float(np.mean(d * d))


def column_variances(matrix: np.ndarray) -> np.ndarray:
    """Population variance of each column."""
    d = matrix - matrix.mean(axis=0)
    return np.mean(d * d, axis=0)


@dataclass(frozen=True)
class VarianceReport:
    """Total logratio variance plus its per-CLR (and optionally per-pair)
    decomposition.

    ``per_pair``, when present, holds the J*(J-1)/2 pairwise logratio
    variances in (j < k) row-major order; :meth:`pair_items` yields them
    keyed by index pair.
    """

    total: float
    per_clr: np.ndarray
    per_pair: np.ndarray | None
    part_names: tuple[str, ...]
    weights_used: PartWeights
    n_samples: int

    def pair_items(self) -> Iterator[tuple[tuple[int, int], float]]:
        if self.per_pair is None:
            raise InputDataError("report was computed without per-pair variances")
        n = len(self.part_names)
        it = iter(self.per_pair)
        for j in range(n):
            for k in range(j + 1, n):
                yield (j, k), float(next(it))

    def to_document(self) -> dict:
        doc: dict = {
            "total": self.total,
            "n_samples": self.n_samples,
            "n_parts": len(self.part_names),
            "weights": {
                n: float(c) for n, c in zip(self.part_names, self.weights_used.weights)
            },
            "per_clr": {
                n: float(v) for n, v in zip(self.part_names, self.per_clr)
            },
        }
        if self.per_pair is not None:
            doc["per_pair"] = {
                f"{self.part_names[j]}/{self.part_names[k]}": v
                for (j, k), v in self.pair_items()
            }
        return doc


def total_logratio_variance(
    m: CompositionMatrix,
    w: PartWeights | None = None,
    method: Literal["clr", "pairs"] = "clr",
) -> VarianceReport:
    """Total weighted logratio variance of a strictly positive matrix.

    ``method="clr"`` computes the J CLR column variances; ``method="pairs"``
    computes all J*(J-1)/2 pairwise logratio variances and fills
    ``per_pair``. Both totals agree to floating-point accuracy; the pairs
    accumulation uses exact (fsum) summation so the agreement survives
    J in the tens.
    """
    if w is None:
        w = PartWeights.uniform(m.n_parts)
    if w.n_parts != m.n_parts:
        raise InputDataError(f"{w.n_parts} weights for {m.n_parts} parts")
    m.require_positive("total logratio variance")

    per_clr = column_variances(clr_matrix(m, w))
    c = w.weights

    if method == "clr":
        total = math.fsum(cj * vj for cj, vj in zip(c, per_clr))
        per_pair = None
    elif method == "pairs":
        logs = np.log(m.values)
        per_pair = np.empty(m.n_parts * (m.n_parts - 1) // 2)
        terms = []
        pos = 0
        for j in range(m.n_parts):
            diffs = logs[:, [j]] - logs[:, j + 1 :]
            variances = column_variances(diffs)
            n = variances.size
            per_pair[pos : pos + n] = variances
            terms.extend(c[j] * c[j + 1 :] * variances)
            pos += n
        total = math.fsum(terms)
    else:
        raise InputDataError(f"unknown method {method!r}; use 'clr' or 'pairs'")

    return VarianceReport(
        total=float(total),
        per_clr=per_clr,
        per_pair=per_pair,
        part_names=m.part_names,
        weights_used=w,
        n_samples=m.n_samples,
    )


def explained_percentage(explained: float, report: VarianceReport) -> float:
    """Express an explained variance as a percentage of the report's total."""
    total = report.total
    if total == 0:
        raise DegenerateDataError(
            "total logratio variance is zero (constant composition); "
            "explained percentages are undefined"
        )
    slack = 1e-9 * total
    if explained < -slack or explained > total + slack:
        raise InputDataError(
            f"explained variance {explained!r} outside [0, total={total!r}]"
        )
    return 100.0 * explained / total
