"""Forward stepwise logratio selection, amalgamation hierarchies, PLR graphs.

Selection is greedy: at each step every candidate logratio is scored by the
extra percentage of total logratio variance it would explain on top of the
already committed set, and the best one is committed. Ties (within a tiny
tolerance) are reported as a tie set; the engine auto-commits the
lexicographically smallest label but callers may override, which mirrors how
a domain expert picks among statistically equivalent candidates.

Scoring uses an orthonormal basis of the committed predictor columns that is
extended one vector at a time, so evaluating a candidate costs one
projection rather than a full refit. The result is identical (to floating
point) to refitting the regression, which the tests verify against the
direct implementation in :mod:`.ordination`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .compositions import (
    Amalgamation,
    CompositionMatrix,
    LogratioSpec,
    PartWeights,
    clr_matrix,
    slr_values,
)
from .errors import DegenerateDataError, InputDataError
from .ordination import RANK_TOL, RegressionFit, explained_variance

__all__ = [
    "CandidateScore",
    "SelectionStep",
    "SelectionTrace",
    "Split",
    "CommittedSlr",
    "AmalgamationHierarchy",
    "HierarchyExplained",
    "StepContribution",
    "LogratioGraph",
    "evaluate_candidates",
    "stepwise_select",
    "hierarchy_explained",
    "plr_graph",
]

#: Candidates whose additional explained fraction is within this tolerance
#: of the best are reported as tied (fraction units, not percentage points).
TIE_TOL = 1e-9

#: Additional explained fraction below which a candidate adds nothing new
#: (it is collinear with the committed set).
COLLINEAR_TOL = 1e-12


class _Scorer:
    """Incremental explained-variance scorer over a fixed committed basis."""

    def __init__(
        self,
        m: CompositionMatrix,
        w: PartWeights,
        committed: Sequence[LogratioSpec],
    ) -> None:
        self.m = m
        self.w = w
        responses = clr_matrix(m, w)
        self.responses = responses - responses.mean(axis=0)
        self.sqrt_w = np.sqrt(w.weights)
        self.n = m.n_samples
        self.total = float(
            np.sum(w.weights * np.mean(self.responses * self.responses, axis=0))
        )
        if self.total == 0:
            raise DegenerateDataError(
                "total logratio variance is zero (constant composition)"
            )
        self.committed: list[LogratioSpec] = []
        self.basis = np.empty((self.n, 0))
        for spec in committed:
            self.commit(spec)

    def _orthogonal_part(self, spec: LogratioSpec) -> np.ndarray | None:
        """Component of the candidate column orthogonal to the basis, or
        None when the candidate is (numerically) collinear."""
        x = slr_values(self.m, spec)
        x = x - x.mean()
        norm = np.linalg.norm(x)
        if norm == 0:
            return None
        # two Gram-Schmidt passes keep the basis orthonormal to machine
        # precision over many commits
        r = x - self.basis @ (self.basis.T @ x)
        r = r - self.basis @ (self.basis.T @ r)
        if np.linalg.norm(r) <= RANK_TOL * norm:
            return None
        return r / np.linalg.norm(r)

    def additional_fraction(self, spec: LogratioSpec) -> float:
        if any(spec == c for c in self.committed):
            return 0.0
        q = self._orthogonal_part(spec)
        if q is None:
            return 0.0
        loadings = q @ self.responses
        return float(np.sum(self.w.weights * loadings * loadings) / self.n / self.total)

    def explained_fraction(self) -> float:
        if self.basis.shape[1] == 0:
            return 0.0
        proj = self.basis.T @ self.responses
        return float(
            np.sum(self.w.weights * np.sum(proj * proj, axis=0)) / self.n / self.total
        )

    def commit(self, spec: LogratioSpec) -> None:
        q = self._orthogonal_part(spec)
        if q is not None:
            self.basis = np.column_stack([self.basis, q])
        self.committed.append(spec)


@dataclass(frozen=True)
class CandidateScore:
    spec: LogratioSpec
    label: str
    additional_pct: float


@dataclass(frozen=True)
class SelectionStep:
    """One committed step: every score seen, the choice, and the tie set."""

    step: int
    scores: tuple[CandidateScore, ...]
    chosen: LogratioSpec
    chosen_label: str
    additional_pct: float
    cumulative_pct: float
    tie_labels: tuple[str, ...]
    manual: bool = False


@dataclass(frozen=True)
class SelectionTrace:
    steps: tuple[SelectionStep, ...]
    seed_pct: float = 0.0
    stopped_early: bool = False
    stop_reason: str | None = None

    @property
    def final_pct(self) -> float:
        return self.steps[-1].cumulative_pct if self.steps else self.seed_pct

    def to_document(self) -> dict:
        return {
            "seed_pct": self.seed_pct,
            "stopped_early": self.stopped_early,
            "stop_reason": self.stop_reason,
            "steps": [
                {
                    "step": s.step,
                    "chosen": s.chosen_label,
                    "additional_pct": s.additional_pct,
                    "cumulative_pct": s.cumulative_pct,
                    "tie_set": list(s.tie_labels),
                    "manual": s.manual,
                    "candidates": [
                        {"label": c.label, "additional_pct": c.additional_pct}
                        for c in s.scores
                    ],
                }
                for s in self.steps
            ],
        }

    def to_table(self) -> list[dict]:
        """Flat rows (step, chosen, additional_pct, cumulative_pct, tie_set)."""
        return [
            {
                "step": s.step,
                "chosen": s.chosen_label,
                "additional_pct": s.additional_pct,
                "cumulative_pct": s.cumulative_pct,
                "tie_set": "|".join(s.tie_labels),
            }
            for s in self.steps
        ]


def _sorted_scores(
    m: CompositionMatrix,
    scorer: _Scorer,
    candidates: Sequence[LogratioSpec],
) -> list[CandidateScore]:
    scored = [
        CandidateScore(
            spec=c,
            label=c.label(m.part_names),
            additional_pct=100.0 * scorer.additional_fraction(c),
        )
        for c in candidates
    ]
    scored.sort(key=lambda s: (-s.additional_pct, s.label))
    return scored


def evaluate_candidates(
    m: CompositionMatrix,
    w: PartWeights | None = None,
    committed: Sequence[LogratioSpec] = (),
    candidates: Sequence[LogratioSpec] = (),
) -> list[CandidateScore]:
    """Score each candidate by the extra explained percentage it would add.

    Sorted by decreasing contribution, ties broken by label so the output
    order is deterministic. A candidate equal to a committed spec scores
    exactly 0; that is information, not an error.
    """
    if not candidates:
        raise InputDataError("no candidates to evaluate")
    if w is None:
        w = PartWeights.uniform(m.n_parts)
    for spec in candidates:
        spec.validate_for(m)
    scorer = _Scorer(m, w, committed)
    return _sorted_scores(m, scorer, candidates)


def tie_set(scores: Sequence[CandidateScore], tol: float = TIE_TOL) -> list[CandidateScore]:
    """Leading candidates within ``tol`` (fraction units) of the best score."""
    if not scores:
        return []
    best = scores[0].additional_pct
    return [s for s in scores if best - s.additional_pct <= 100.0 * tol]


def stepwise_select(
    m: CompositionMatrix,
    w: PartWeights | None = None,
    candidates: Sequence[LogratioSpec] = (),
    k: int = 1,
    seed_committed: Sequence[LogratioSpec] = (),
    floor_pct: float = 0.0,
) -> SelectionTrace:
    """Greedy forward selection of up to ``k`` logratios.

    Stops early when the candidate pool is exhausted, when every remaining
    candidate is collinear with the committed set, or when the best
    additional percentage drops below ``floor_pct``. With the default floor
    of 0 it otherwise runs all ``k`` steps.
    """
    if k < 1:
        raise InputDataError(f"step count must be at least 1, got {k}")
    if not candidates:
        raise InputDataError("no candidates to select from")
    if w is None:
        w = PartWeights.uniform(m.n_parts)
    for spec in candidates:
        spec.validate_for(m)

    scorer = _Scorer(m, w, seed_committed)
    seed_pct = 100.0 * scorer.explained_fraction()
    cumulative = seed_pct
    pool = list(candidates)
    steps: list[SelectionStep] = []
    stopped, reason = False, None

    for step in range(1, k + 1):
        if not pool:
            stopped, reason = True, "candidates exhausted"
            break
        scored = _sorted_scores(m, scorer, pool)
        best = scored[0]
        if best.additional_pct <= 100.0 * COLLINEAR_TOL:
            stopped, reason = True, "all remaining candidates are collinear"
            break
        if best.additional_pct < floor_pct:
            stopped, reason = True, f"best increment below floor ({floor_pct})"
            break
        ties = tie_set(scored)
        chosen = min(ties, key=lambda s: s.label)
        scorer.commit(chosen.spec)
        cumulative += chosen.additional_pct
        steps.append(
            SelectionStep(
                step=step,
                scores=tuple(scored),
                chosen=chosen.spec,
                chosen_label=chosen.label,
                additional_pct=chosen.additional_pct,
                cumulative_pct=cumulative,
                tie_labels=tuple(s.label for s in ties),
            )
        )
        pool = [c for c in pool if c != chosen.spec]

    return SelectionTrace(
        steps=tuple(steps),
        seed_pct=seed_pct,
        stopped_early=stopped,
        stop_reason=reason,
    )


# ---------------------------------------------------------------------------
# Amalgamation hierarchy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Split:
    parent: str
    children: tuple[str, ...]


@dataclass(frozen=True)
class CommittedSlr:
    step: int
    numerator: str
    denominator: str
    manual: bool = False


@dataclass(frozen=True)
class AmalgamationHierarchy:
    """Named part-set nodes, splits that partition them, and committed SLRs.

    Nodes that are not a child of any split are roots; roots are mutual
    siblings (a three-way top split is simply three roots).
    Every committed SLR must relate two sibling nodes.
    """

    nodes: tuple[Amalgamation, ...] = ()
    splits: tuple[Split, ...] = ()
    committed: tuple[CommittedSlr, ...] = ()

    def node_map(self) -> dict[str, frozenset[int]]:
        return {n.name: n.parts for n in self.nodes}

    def roots(self) -> tuple[str, ...]:
        children = {c for s in self.splits for c in s.children}
        return tuple(n.name for n in self.nodes if n.name not in children)

    def sibling_sets(self) -> list[tuple[str | None, tuple[str, ...]]]:
        """(parent or None for the root level, sibling names) pairs."""
        out: list[tuple[str | None, tuple[str, ...]]] = []
        roots = self.roots()
        if roots:
            out.append((None, roots))
        out.extend((s.parent, s.children) for s in self.splits)
        return out

    def are_siblings(self, a: str, b: str) -> bool:
        for _, sibs in self.sibling_sets():
            if a in sibs and b in sibs:
                return True
        return False

    def spec_for(self, slr: CommittedSlr) -> LogratioSpec:
        nodes = self.node_map()
        return LogratioSpec(
            nodes[slr.numerator],
            nodes[slr.denominator],
            name=f"{slr.numerator}/{slr.denominator}",
        )

    def specs(self) -> tuple[LogratioSpec, ...]:
        return tuple(self.spec_for(s) for s in self.committed)

    def next_step(self) -> int:
        return max((s.step for s in self.committed), default=0) + 1

    def validate(self, n_parts: int | None = None) -> tuple[str, ...]:
        """Raise on structural errors; return cap-excess warnings."""
        names = [n.name for n in self.nodes]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise InputDataError(f"duplicate node names: {', '.join(dupes)}")
        nodes = self.node_map()
        if n_parts is not None:
            for n in self.nodes:
                bad = [i for i in n.parts if not 0 <= i < n_parts]
                if bad:
                    raise InputDataError(
                        f"node {n.name!r} references part indices {sorted(bad)} "
                        f"outside 0..{n_parts - 1}"
                    )

        seen_children: set[str] = set()
        seen_parents: set[str] = set()
        for split in self.splits:
            if split.parent not in nodes:
                raise InputDataError(f"split parent {split.parent!r} is not a node")
            if split.parent in seen_parents:
                raise InputDataError(f"node {split.parent!r} is split twice")
            seen_parents.add(split.parent)
            if len(split.children) < 2:
                raise InputDataError(
                    f"split of {split.parent!r} needs at least 2 children"
                )
            union: set[int] = set()
            for child in split.children:
                if child not in nodes:
                    raise InputDataError(f"split child {child!r} is not a node")
                if child in seen_children:
                    raise InputDataError(f"node {child!r} is a child of two splits")
                seen_children.add(child)
                overlap = union & nodes[child]
                if overlap:
                    raise InputDataError(
                        f"children of {split.parent!r} overlap on part "
                        f"index {sorted(overlap)[0]}"
                    )
                union |= nodes[child]
            if union != set(nodes[split.parent]):
                raise InputDataError(
                    f"children of {split.parent!r} do not partition it"
                )

        roots = self.roots()
        claimed: set[int] = set()
        for r in roots:
            overlap = claimed & nodes[r]
            if overlap:
                raise InputDataError(
                    f"root nodes overlap on part index {sorted(overlap)[0]}"
                )
            claimed |= nodes[r]

        steps = [s.step for s in self.committed]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise InputDataError("committed SLR steps must be strictly increasing")
        per_sibling_set: dict[str | None, int] = {}
        for slr in self.committed:
            label = f"step {slr.step} ({slr.numerator}/{slr.denominator})"
            for side in (slr.numerator, slr.denominator):
                if side not in nodes:
                    raise InputDataError(f"{label}: {side!r} is not a node")
            if slr.numerator == slr.denominator:
                raise InputDataError(f"{label}: numerator equals denominator")
            parent = None
            found = False
            for par, sibs in self.sibling_sets():
                if slr.numerator in sibs and slr.denominator in sibs:
                    parent, found = par, True
                    break
            if not found:
                raise InputDataError(
                    f"{label}: {slr.numerator!r} and {slr.denominator!r} "
                    "are not sibling nodes"
                )
            per_sibling_set[parent] = per_sibling_set.get(parent, 0) + 1

        warnings_out = []
        for parent, count in per_sibling_set.items():
            sibs = next(s for p, s in self.sibling_sets() if p == parent)
            if count > len(sibs) - 1:
                where = f"children of {parent!r}" if parent else "the root nodes"
                warnings_out.append(
                    f"{count} SLRs committed among {where}; only "
                    f"{len(sibs) - 1} can be linearly independent"
                )
        return tuple(warnings_out)

    # -- evolution (returns new immutable instances) --

    def with_nodes(self, new_nodes: Iterable[Amalgamation]) -> "AmalgamationHierarchy":
        return replace(self, nodes=self.nodes + tuple(new_nodes))

    def with_split(
        self, parent: str | None, children: Sequence[Amalgamation]
    ) -> "AmalgamationHierarchy":
        """Add child nodes and, unless they are new roots, a split record."""
        out = self.with_nodes(children)
        if parent is not None:
            out = replace(
                out, splits=out.splits + (Split(parent, tuple(c.name for c in children)),)
            )
        return out

    def with_commit(
        self, numerator: str, denominator: str, manual: bool = False
    ) -> "AmalgamationHierarchy":
        slr = CommittedSlr(self.next_step(), numerator, denominator, manual)
        return replace(self, committed=self.committed + (slr,))

    def without_last_commit(self) -> "AmalgamationHierarchy":
        if not self.committed:
            raise InputDataError("no committed SLRs to remove")
        return replace(self, committed=self.committed[:-1])

    # -- document form --

    def to_document(self, part_names: Sequence[str]) -> dict:
        return {
            "nodes": [
                {"name": n.name, "parts": [part_names[i] for i in sorted(n.parts)]}
                for n in self.nodes
            ],
            "splits": [
                {"parent": s.parent, "children": list(s.children)}
                for s in self.splits
            ],
            "slrs": [
                {
                    "step": s.step,
                    "num": s.numerator,
                    "den": s.denominator,
                    "manual": s.manual,
                }
                for s in self.committed
            ],
        }

    @classmethod
    def from_document(
        cls, doc: Mapping, part_names: Sequence[str]
    ) -> "AmalgamationHierarchy":
        index = {name: i for i, name in enumerate(part_names)}

        def part_set(parts: Iterable[str], node: str) -> frozenset[int]:
            missing = [p for p in parts if p not in index]
            if missing:
                raise InputDataError(
                    f"node {node!r} references unknown parts: {', '.join(missing)}"
                )
            return frozenset(index[p] for p in parts)

        try:
            nodes = tuple(
                Amalgamation(n["name"], part_set(n["parts"], n["name"]))
                for n in doc.get("nodes", [])
            )
            splits = tuple(
                Split(s["parent"], tuple(s["children"]))
                for s in doc.get("splits", [])
            )
            committed = tuple(
                CommittedSlr(
                    int(s["step"]), s["num"], s["den"], bool(s.get("manual", False))
                )
                for s in doc.get("slrs", [])
            )
        except (KeyError, TypeError) as exc:
            raise InputDataError(f"malformed hierarchy document: {exc}") from exc
        hierarchy = cls(nodes=nodes, splits=splits, committed=committed)
        hierarchy.validate(len(part_names))
        return hierarchy


@dataclass(frozen=True)
class StepContribution:
    step: int
    label: str
    additional_pct: float
    cumulative_pct: float
    manual: bool


@dataclass(frozen=True)
class HierarchyExplained:
    fit: RegressionFit
    steps: tuple[StepContribution, ...]

    @property
    def total_pct(self) -> float:
        return 100.0 * self.fit.explained_fraction

    def to_document(self, part_names: Sequence[str] | None = None) -> dict:
        return {
            "total_pct": self.total_pct,
            "steps": [
                {
                    "step": s.step,
                    "slr": s.label,
                    "additional_pct": s.additional_pct,
                    "cumulative_pct": s.cumulative_pct,
                    "manual": s.manual,
                }
                for s in self.steps
            ],
            "fit": self.fit.to_document(part_names),
        }


def hierarchy_explained(
    m: CompositionMatrix,
    w: PartWeights | None = None,
    hierarchy: AmalgamationHierarchy | None = None,
) -> HierarchyExplained:
    """Cumulative explained variance of a hierarchy's committed SLRs, in
    step order, with the per-step increments."""
    if hierarchy is None:
        raise InputDataError("no hierarchy given")
    import warnings as _warnings

    for msg in hierarchy.validate(m.n_parts):
        _warnings.warn(msg, stacklevel=2)
    if w is None:
        w = PartWeights.uniform(m.n_parts)

    scorer = _Scorer(m, w, ())
    steps: list[StepContribution] = []
    cumulative = 0.0
    for slr in hierarchy.committed:
        spec = hierarchy.spec_for(slr)
        additional = 100.0 * scorer.additional_fraction(spec)
        cumulative += additional
        scorer.commit(spec)
        steps.append(
            StepContribution(
                step=slr.step,
                label=spec.label(m.part_names),
                additional_pct=additional,
                cumulative_pct=cumulative,
                manual=slr.manual,
            )
        )
    fit = explained_variance(m, w, hierarchy.specs())
    return HierarchyExplained(fit=fit, steps=tuple(steps))


# ---------------------------------------------------------------------------
# PLR graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogratioGraph:
    """Undirected graph with one vertex per part and one edge per PLR."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    connected: bool
    acyclic: bool

    @property
    def is_tree(self) -> bool:
        return self.connected and self.acyclic


def plr_graph(
    specs: Sequence[LogratioSpec],
    part_names: Sequence[str] | None = None,
) -> LogratioGraph:
    """Build the graph of a set of pairwise logratios and classify it.

    Any edge set is a valid graph; the interesting outputs are the
    connected/acyclic flags. A greedily selected PLR set is always acyclic,
    because a cycle-closing logratio is a linear combination of the others
    and adds no variance.
    """
    for spec in specs:
        if not spec.is_plr:
            raise InputDataError(
                f"{spec.label(part_names)} is not a pairwise logratio"
            )

    def vname(i: int) -> str:
        return part_names[i] if part_names is not None else str(i)

    edges = []
    vertex_ids: set[int] = set()
    for spec in specs:
        (j,), (k,) = spec.numerator, spec.denominator
        vertex_ids.update((j, k))
        edges.append((vname(j), vname(k)))
    vertices = tuple(vname(i) for i in sorted(vertex_ids))

    parent: dict[str, str] = {v: v for v in vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    acyclic = True
    components = len(vertices)
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            acyclic = False
        else:
            parent[ru] = rv
            components -= 1

    return LogratioGraph(
        vertices=vertices,
        edges=tuple(edges),
        connected=components <= 1,
        acyclic=acyclic,
    )
