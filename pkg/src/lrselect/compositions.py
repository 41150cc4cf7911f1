"""Core data model: compositional matrices, part weights and logratio transforms.

A composition is a row of nonnegative parts carrying relative information;
a matrix stacks one composition per sample. All transforms defined here are
ratio-based, so they are invariant to per-row rescaling (closure). Natural
logarithms are used throughout; every explained-variance percentage in this
package is invariant to the choice of log base, only the absolute value of
the total logratio variance depends on it.

All types are immutable after construction and every operation is a pure
function of its inputs, so shared instances are safe to use concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputDataError

__all__ = [
    "CompositionMatrix",
    "PartWeights",
    "LogratioSpec",
    "Amalgamation",
    "ZeroReplacement",
    "close",
    "replace_zeros",
    "plr_values",
    "clr_matrix",
    "slr_values",
    "amalgamate",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CompositionMatrix:
    """An I x J matrix of nonnegative parts with row and column metadata.

    Parameters
    ----------
    values : array-like, shape (I, J)
        Nonnegative reals; proportions, percentages or raw magnitudes.
    part_names : sequence of str
        J unique column names.
    sample_labels : sequence of str
        I row labels.
    group_factor : sequence of str, optional
        Categorical label per sample (e.g. a season), used for grouped
        displays; never enters any computation.
    """

    values: np.ndarray
    part_names: tuple[str, ...]
    sample_labels: tuple[str, ...]
    group_factor: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        values = _readonly(np.atleast_2d(self.values))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "part_names", tuple(self.part_names))
        object.__setattr__(self, "sample_labels", tuple(self.sample_labels))
        if self.group_factor is not None:
            object.__setattr__(self, "group_factor", tuple(self.group_factor))

        if values.ndim != 2:
            raise InputDataError(f"expected a 2-D matrix, got ndim={values.ndim}")
        n_rows, n_cols = values.shape
        if n_rows < 2:
            raise InputDataError(f"need at least 2 samples, got {n_rows}")
        if n_cols < 2:
            raise InputDataError(f"need at least 2 parts, got {n_cols}")
        if len(self.part_names) != n_cols:
            raise InputDataError(
                f"{len(self.part_names)} part names for {n_cols} columns"
            )
        if len(set(self.part_names)) != len(self.part_names):
            dupes = sorted({n for n in self.part_names if self.part_names.count(n) > 1})
            raise InputDataError(f"duplicate part names: {', '.join(dupes)}")
        if len(self.sample_labels) != n_rows:
            raise InputDataError(
                f"{len(self.sample_labels)} sample labels for {n_rows} rows"
            )
        if self.group_factor is not None and len(self.group_factor) != n_rows:
            raise InputDataError(
                f"{len(self.group_factor)} group labels for {n_rows} rows"
            )
        if not np.all(np.isfinite(values)):
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise InputDataError(
                f"non-finite value at sample {self.sample_labels[i]!r}, "
                f"part {self.part_names[j]!r}"
            )
        if np.any(values < 0):
            i, j = np.argwhere(values < 0)[0]
            raise InputDataError(
                f"negative value {values[i, j]} at sample "
                f"{self.sample_labels[i]!r}, part {self.part_names[j]!r}"
            )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_parts(self) -> int:
        return self.values.shape[1]

    def part_index(self, name: str) -> int:
        try:
            return self.part_names.index(name)
        except ValueError:
            raise InputDataError(f"unknown part name: {name!r}") from None

    def part_indices(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.part_index(n) for n in names)

    def require_positive(self, context: str = "this operation") -> None:
        """Raise unless every entry is strictly positive (zeros must be
        replaced before any log transform)."""
        if np.any(self.values <= 0):
            i, j = np.argwhere(self.values <= 0)[0]
            raise InputDataError(
                f"{context} requires strictly positive data; found "
                f"{self.values[i, j]} at sample {self.sample_labels[i]!r}, "
                f"part {self.part_names[j]!r} (replace zeros first)"
            )

    def with_values(self, values: np.ndarray) -> "CompositionMatrix":
        """Same metadata, new values."""
        return CompositionMatrix(
            values, self.part_names, self.sample_labels, self.group_factor
        )


@dataclass(frozen=True)
class PartWeights:
    """Positive weights over the J parts, themselves a composition (sum 1)."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = _readonly(np.asarray(self.weights, dtype=float).ravel())
        object.__setattr__(self, "weights", w)
        if w.size < 2:
            raise InputDataError(f"need at least 2 weights, got {w.size}")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise InputDataError("part weights must be finite and strictly positive")
        total = float(np.sum(w))
        if abs(total - 1.0) > 1e-12:
            raise InputDataError(
                f"part weights must sum to 1 (got {total!r}); "
                "use PartWeights.proportional to normalize raw values"
            )

    @classmethod
    def uniform(cls, n_parts: int) -> "PartWeights":
        return cls(np.full(n_parts, 1.0 / n_parts))

    @classmethod
    def proportional(cls, raw: Sequence[float]) -> "PartWeights":
        """Normalize positive raw values (e.g. group sizes) into weights."""
        a = np.asarray(raw, dtype=float)
        if np.any(a <= 0):
            raise InputDataError("raw weights must be strictly positive")
        return cls(a / a.sum())

    @classmethod
    def from_mapping(
        cls, part_names: Sequence[str], mapping: Mapping[str, float]
    ) -> "PartWeights":
        missing = [n for n in part_names if n not in mapping]
        if missing:
            raise InputDataError(f"weights missing for parts: {', '.join(missing)}")
        extra = [n for n in mapping if n not in part_names]
        if extra:
            raise InputDataError(f"weights for unknown parts: {', '.join(extra)}")
        return cls.proportional([float(mapping[n]) for n in part_names])

    @property
    def n_parts(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class LogratioSpec:
    """A logratio between two disjoint part sets.

    Both sets singletons: a pairwise logratio (PLR). Anything larger on
    either side: a summated (amalgamation) logratio (SLR), the log of the
    ratio of the two sums.

    ``name`` is a display label only; it never affects equality, so a named
    and an unnamed spec over the same sets compare equal.
    """

    numerator: frozenset[int]
    denominator: frozenset[int]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "numerator", frozenset(int(i) for i in self.numerator))
        object.__setattr__(
            self, "denominator", frozenset(int(i) for i in self.denominator)
        )
        if not self.numerator or not self.denominator:
            raise InputDataError("numerator and denominator must be nonempty")
        shared = self.numerator & self.denominator
        if shared:
            raise InputDataError(
                f"numerator and denominator overlap on parts {sorted(shared)}"
            )

    @classmethod
    def plr(cls, j: int, k: int, name: str | None = None) -> "LogratioSpec":
        if j == k:
            raise InputDataError("a pairwise logratio needs two distinct parts")
        return cls(frozenset([j]), frozenset([k]), name)

    @property
    def is_plr(self) -> bool:
        return len(self.numerator) == 1 and len(self.denominator) == 1

    def parts(self) -> frozenset[int]:
        return self.numerator | self.denominator

    def flipped(self) -> "LogratioSpec":
        return LogratioSpec(self.denominator, self.numerator)

    def label(self, part_names: Sequence[str] | None = None) -> str:
        """Canonical display label, used for deterministic tie-breaking."""
        if self.name is not None:
            return self.name
        if part_names is None:
            fmt = str
        else:
            fmt = lambda i: part_names[i]  # noqa: E731
        num = "+".join(fmt(i) for i in sorted(self.numerator))
        den = "+".join(fmt(i) for i in sorted(self.denominator))
        return f"{num}/{den}"

    def validate_for(self, m: CompositionMatrix) -> None:
        bad = [i for i in self.parts() if not 0 <= i < m.n_parts]
        if bad:
            raise InputDataError(f"part indices out of range: {sorted(bad)}")


@dataclass(frozen=True)
class Amalgamation:
    """A named group of parts to be summed into a single new part."""

    name: str
    parts: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", frozenset(int(i) for i in self.parts))
        if not self.name:
            raise InputDataError("amalgamation name must be nonempty")
        if not self.parts:
            raise InputDataError(f"amalgamation {self.name!r} has no parts")


@dataclass(frozen=True)
class ZeroReplacement:
    """Per-part count of zero cells replaced by :func:`replace_zeros`."""

    counts: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)


def close(m: CompositionMatrix, constant: float = 1.0) -> CompositionMatrix:
    """Rescale every row to sum to ``constant``.

    Ratio-based statistics are unaffected by closure; it matters only for
    display (percentages vs proportions) and for ternary coordinates.
    """
    if not constant > 0:
        raise InputDataError(f"closure constant must be positive, got {constant}")
    sums = m.values.sum(axis=1)
    if np.any(sums <= 0):
        i = int(np.argmax(sums <= 0))
        raise InputDataError(
            f"cannot close: row sum is {sums[i]} at sample {m.sample_labels[i]!r}"
        )
    return m.with_values(constant * m.values / sums[:, None])


def replace_zeros(m: CompositionMatrix) -> tuple[CompositionMatrix, ZeroReplacement]:
    """Replace each zero by two-thirds of its column's smallest positive value.

    The replacement is column-local and unconditional: positive entries are
    left untouched, no compensating adjustment is applied to the rest of the
    row. Returns the new matrix and a per-part replacement count.
    """
    values = np.array(m.values)
    counts = []
    for j in range(m.n_parts):
        col = values[:, j]
        zero_mask = col == 0
        n_zero = int(zero_mask.sum())
        if n_zero:
            positive = col[col > 0]
            if positive.size == 0:
                raise InputDataError(
                    f"part {m.part_names[j]!r} is zero in every sample; "
                    "no positive minimum exists to replace from"
                )
            col[zero_mask] = (2.0 / 3.0) * positive.min()
        counts.append((m.part_names[j], n_zero))
    return m.with_values(values), ZeroReplacement(tuple(counts))


def plr_values(m: CompositionMatrix, j: int, k: int) -> np.ndarray:
    """Pairwise logratio log(x_j / x_k) per sample. Antisymmetric in (j, k)."""
    if j == k:
        raise InputDataError("a pairwise logratio needs two distinct parts")
    m.require_positive("a pairwise logratio")
    return np.log(m.values[:, j]) - np.log(m.values[:, k])


def clr_matrix(m: CompositionMatrix, w: PartWeights) -> np.ndarray:
    """Centred logratios: log parts centred by their weighted mean per row.

    Entry (i, j) is log(x_ij) minus the weighted mean over k of log(x_ik),
    so each row has weighted mean zero. With uniform weights the centring
    is the plain arithmetic mean of the log parts.
    """
    m.require_positive("the centred-logratio transform")
    if w.n_parts != m.n_parts:
        raise InputDataError(
            f"{w.n_parts} weights for {m.n_parts} parts"
        )
    logs = np.log(m.values)
    return logs - (logs @ w.weights)[:, None]


def slr_values(m: CompositionMatrix, spec: LogratioSpec) -> np.ndarray:
    """Summated logratio: log of the ratio of two disjoint part-set sums.

    Reduces exactly to :func:`plr_values` when both sets are singletons.
    """
    spec.validate_for(m)
    m.require_positive("a summated logratio")
    num = sorted(spec.numerator)
    den = sorted(spec.denominator)
    return np.log(m.values[:, num].sum(axis=1)) - np.log(m.values[:, den].sum(axis=1))


def amalgamate(
    m: CompositionMatrix,
    groups: Sequence[Amalgamation],
    remainder: str | None = None,
) -> CompositionMatrix:
    """Sum each group's parts into one new part.

    Parts covered by no group are dropped, unless ``remainder`` names an
    extra group that collects them. Group order is preserved.
    """
    if not groups:
        raise InputDataError("need at least one amalgamation group")
    seen: dict[int, str] = {}
    for g in groups:
        for i in g.parts:
            if not 0 <= i < m.n_parts:
                raise InputDataError(
                    f"amalgamation {g.name!r} references part index {i}, "
                    f"but there are only {m.n_parts} parts"
                )
            if i in seen:
                raise InputDataError(
                    f"part {m.part_names[i]!r} appears in both "
                    f"{seen[i]!r} and {g.name!r}"
                )
            seen[i] = g.name
    names = [g.name for g in groups]
    if len(set(names)) != len(names):
        raise InputDataError("amalgamation names must be unique")

    groups = list(groups)
    if remainder is not None:
        uncovered = frozenset(range(m.n_parts)) - frozenset(seen)
        if not uncovered:
            raise InputDataError(
                f"remainder group {remainder!r} requested but every part is covered"
            )
        groups.append(Amalgamation(remainder, uncovered))

    cols = [m.values[:, sorted(g.parts)].sum(axis=1) for g in groups]
    return CompositionMatrix(
        np.column_stack(cols),
        tuple(g.name for g in groups),
        m.sample_labels,
        m.group_factor,
    )
