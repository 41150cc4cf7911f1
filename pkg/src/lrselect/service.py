"""Session-oriented HTTP+JSON API for the expert-in-the-loop workflow.

A session wraps one uploaded dataset (zeros replaced at upload, once) plus
the evolving amalgamation hierarchy. Reads are side-effect free; mutations
(split / commit / undo / redo / import) are serialized per session by a
lock, and each one pushes an undo snapshot, so undo followed by redo
restores the exact prior state.

All percentages in response bodies are full precision; rounding is the
client's concern.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .compositions import (
    Amalgamation,
    CompositionMatrix,
    LogratioSpec,
    PartWeights,
    ZeroReplacement,
    amalgamate,
    close,
    replace_zeros,
)
from .errors import DegenerateDataError, InputDataError
from .io import parse_composition_csv
from .ordination import lra, pca_of_logratios, ternary_coords
from .selection import (
    AmalgamationHierarchy,
    CandidateScore,
    _Scorer,
    tie_set,
)

DEFAULT_MAX_UPLOAD = 16 * 1024 * 1024


class CandidateBody(BaseModel):
    # each side is a node name or an explicit list of part names
    num: str | list[str]
    den: str | list[str]


class EvaluateBody(BaseModel):
    candidates: list[CandidateBody]


class ChildBody(BaseModel):
    name: str
    parts: list[str]


class SplitBody(BaseModel):
    parent: str | None = None
    children: list[ChildBody]


class CommitBody(BaseModel):
    num: str
    den: str
    manual: bool = False


@dataclass
class Session:
    matrix: CompositionMatrix
    weights: PartWeights
    replacement: ZeroReplacement
    hierarchy: AmalgamationHierarchy = field(default_factory=AmalgamationHierarchy)
    undo_stack: list[AmalgamationHierarchy] = field(default_factory=list)
    redo_stack: list[AmalgamationHierarchy] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _resolve_side(session: Session, side: str | list[str]) -> frozenset[int]:
    if isinstance(side, str):
        parts = session.hierarchy.node_map().get(side)
        if parts is None:
            raise InputDataError(f"unknown node: {side!r}")
        return parts
    return session.matrix.part_indices(side)


def _candidate_label(session: Session, side_num, side_den) -> str:
    def one(side):
        if isinstance(side, str):
            return side
        return "+".join(side)

    return f"{one(side_num)}/{one(side_den)}"


def build_trace(session: Session) -> dict:
    """Replay the committed SLRs, scoring each against its full sibling
    candidate set so ties are visible, and accumulate percentages."""
    m, w, h = session.matrix, session.weights, session.hierarchy
    nodes = h.node_map()
    # committed orientation wins over enumeration order, so a candidate row
    # for an already-committed pair carries the same label as its commit
    orientation = {
        frozenset((s.numerator, s.denominator)): (s.numerator, s.denominator)
        for s in h.committed
    }
    scorer = _Scorer(m, w, ())
    steps = []
    cumulative = 0.0
    for slr in h.committed:
        sibling_candidates: list[LogratioSpec] = []
        for _, sibs in h.sibling_sets():
            if slr.numerator in sibs and slr.denominator in sibs:
                for a in range(len(sibs)):
                    for b in range(a + 1, len(sibs)):
                        num, den = orientation.get(
                            frozenset((sibs[a], sibs[b])), (sibs[a], sibs[b])
                        )
                        sibling_candidates.append(
                            LogratioSpec(nodes[num], nodes[den], name=f"{num}/{den}")
                        )
                break
        scored = sorted(
            (
                {
                    "label": c.name,
                    "additional_pct": 100.0 * scorer.additional_fraction(c),
                }
                for c in sibling_candidates
            ),
            key=lambda s: (-s["additional_pct"], s["label"]),
        )
        best = scored[0]["additional_pct"] if scored else 0.0
        ties = [
            s["label"] for s in scored if best - s["additional_pct"] <= 1e-7
        ]
        chosen = h.spec_for(slr)
        additional = 100.0 * scorer.additional_fraction(chosen)
        cumulative += additional
        scorer.commit(chosen)
        steps.append(
            {
                "step": slr.step,
                "chosen": chosen.name,
                "additional_pct": additional,
                "cumulative_pct": cumulative,
                "tie_set": ties,
                "manual": slr.manual,
                "candidates": scored,
            }
        )
    return {"steps": steps, "cumulative_pct": cumulative}


def state_document(session_id: str, session: Session) -> dict:
    trace = build_trace(session)
    return {
        "id": session_id,
        "hierarchy": session.hierarchy.to_document(session.matrix.part_names),
        "trace": trace,
        "cumulative_pct": trace["cumulative_pct"],
        "can_undo": bool(session.undo_stack),
        "can_redo": bool(session.redo_stack),
    }


def create_app(
    data_dir: str | None = None,
    ui_dir: str | None = None,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    app = FastAPI(title="lrselect workbench service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session: {session_id}")
        return session

    def persist(session_id: str, session: Session) -> None:
        if data_dir is None:
            return
        path = Path(data_dir) / f"{session_id}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(export_document(session_id, session), indent=2, sort_keys=True)
        )

    def export_document(session_id: str, session: Session) -> dict:
        doc = state_document(session_id, session)
        nodes = session.hierarchy.node_map()
        names = session.matrix.part_names
        doc["slr_definitions"] = [
            {
                "step": s.step,
                "label": f"{s.numerator}/{s.denominator}",
                "numerator": {
                    "node": s.numerator,
                    "parts": [names[i] for i in sorted(nodes[s.numerator])],
                },
                "denominator": {
                    "node": s.denominator,
                    "parts": [names[i] for i in sorted(nodes[s.denominator])],
                },
                "manual": s.manual,
            }
            for s in session.hierarchy.committed
        ]
        doc["total_logratio_variance"] = _total_variance(session)
        return doc

    def _total_variance(session: Session) -> float:
        scorer = _Scorer(session.matrix, session.weights, ())
        return scorer.total

    @app.post("/sessions", status_code=201)
    async def create_session(
        request: Request, label_col: str = "auto", closure: float = 1.0
    ):
        body = await request.body()
        if len(body) > max_upload_bytes:
            raise HTTPException(413, f"upload exceeds {max_upload_bytes} bytes")
        try:
            matrix = parse_composition_csv(
                body.decode("utf-8", errors="replace"),
                label_col=None if label_col == "none" else label_col,
            )
            matrix, replacement = replace_zeros(matrix)
            matrix = close(matrix, closure)
        except InputDataError as exc:
            raise HTTPException(400, str(exc))
        weights = PartWeights.uniform(matrix.n_parts)
        session = Session(matrix=matrix, weights=weights, replacement=replacement)
        session_id = uuid.uuid4().hex
        with registry_lock:
            sessions[session_id] = session
        return {
            "id": session_id,
            "samples": matrix.n_samples,
            "parts": matrix.n_parts,
            "part_names": list(matrix.part_names),
            "group_levels": sorted(set(matrix.group_factor))
            if matrix.group_factor
            else [],
            "replaced_cells": replacement.total,
            "replaced_by_part": {n: c for n, c in replacement.counts if c},
            "total_logratio_variance": _total_variance(session),
        }

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        session = get_session(session_id)
        return state_document(session_id, session)

    @app.post("/sessions/{session_id}/evaluate")
    def evaluate(session_id: str, body: EvaluateBody):
        session = get_session(session_id)
        if not body.candidates:
            raise HTTPException(422, "no candidates given")
        try:
            specs = [
                LogratioSpec(
                    _resolve_side(session, c.num),
                    _resolve_side(session, c.den),
                    name=_candidate_label(session, c.num, c.den),
                )
                for c in body.candidates
            ]
        except InputDataError as exc:
            raise HTTPException(422, str(exc))
        committed = session.hierarchy.specs()
        scorer = _Scorer(session.matrix, session.weights, committed)
        base_pct = 100.0 * scorer.explained_fraction()
        scored = [
            CandidateScore(
                spec=s,
                label=s.name,
                additional_pct=100.0 * scorer.additional_fraction(s),
            )
            for s in specs
        ]
        scored.sort(key=lambda s: (-s.additional_pct, s.label))
        ties = tie_set(scored)
        names = session.matrix.part_names
        return {
            "base_pct": base_pct,
            "tie_set": [t.label for t in ties],
            "candidates": [
                {
                    "label": s.label,
                    "num_parts": [names[i] for i in sorted(s.spec.numerator)],
                    "den_parts": [names[i] for i in sorted(s.spec.denominator)],
                    "additional_pct": s.additional_pct,
                    "is_tied": any(t.label == s.label for t in ties),
                    "is_committed": any(s.spec == c for c in committed),
                }
                for s in scored
            ],
        }

    def _mutate(session_id: str, session: Session, new_hierarchy) -> dict:
        session.undo_stack.append(session.hierarchy)
        session.redo_stack.clear()
        session.hierarchy = new_hierarchy
        persist(session_id, session)
        return state_document(session_id, session)

    @app.post("/sessions/{session_id}/split")
    def split(session_id: str, body: SplitBody):
        session = get_session(session_id)
        with session.lock:
            try:
                children = [
                    Amalgamation(c.name, session.matrix.part_indices(c.parts))
                    for c in body.children
                ]
                candidate = session.hierarchy.with_split(body.parent, children)
                candidate.validate(session.matrix.n_parts)
            except InputDataError as exc:
                raise HTTPException(422, str(exc))
            return _mutate(session_id, session, candidate)

    @app.post("/sessions/{session_id}/commit")
    def commit(session_id: str, body: CommitBody):
        session = get_session(session_id)
        with session.lock:
            nodes = session.hierarchy.node_map()
            for side in (body.num, body.den):
                if side not in nodes:
                    raise HTTPException(422, f"unknown node: {side!r}")
            if body.num == body.den or not session.hierarchy.are_siblings(
                body.num, body.den
            ):
                raise HTTPException(
                    409,
                    detail={
                        "error": f"{body.num!r} and {body.den!r} are not sibling "
                        "nodes; commit refused",
                        "state": state_document(session_id, session),
                    },
                )
            candidate = session.hierarchy.with_commit(body.num, body.den, body.manual)
            try:
                candidate.validate(session.matrix.n_parts)
            except InputDataError as exc:
                raise HTTPException(409, str(exc))
            return _mutate(session_id, session, candidate)

    @app.post("/sessions/{session_id}/hierarchy")
    def import_hierarchy(session_id: str, doc: dict):
        session = get_session(session_id)
        with session.lock:
            try:
                hierarchy = AmalgamationHierarchy.from_document(
                    doc, session.matrix.part_names
                )
            except InputDataError as exc:
                raise HTTPException(422, str(exc))
            return _mutate(session_id, session, hierarchy)

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if not session.undo_stack:
                raise HTTPException(409, "nothing to undo")
            session.redo_stack.append(session.hierarchy)
            session.hierarchy = session.undo_stack.pop()
            persist(session_id, session)
            return state_document(session_id, session)

    @app.post("/sessions/{session_id}/redo")
    def redo(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if not session.redo_stack:
                raise HTTPException(409, "nothing to redo")
            session.undo_stack.append(session.hierarchy)
            session.hierarchy = session.redo_stack.pop()
            persist(session_id, session)
            return state_document(session_id, session)

    def _roots_matrix(session: Session) -> CompositionMatrix:
        h = session.hierarchy
        nodes = h.node_map()
        roots = h.roots()
        if len(roots) < 2:
            raise HTTPException(422, "hierarchy has fewer than 2 root nodes")
        groups = [Amalgamation(name, nodes[name]) for name in roots]
        return amalgamate(session.matrix, groups)

    @app.get("/sessions/{session_id}/ordination")
    def ordination(session_id: str, mode: str = "lra", target: str = "parts"):
        session = get_session(session_id)
        try:
            if mode == "lra":
                if target == "roots":
                    matrix = _roots_matrix(session)
                    result = lra(matrix, PartWeights.uniform(matrix.n_parts))
                else:
                    result = lra(session.matrix, session.weights)
                return result.to_document()
            if mode == "pca-slr":
                specs = session.hierarchy.specs()
                if len(specs) < 2:
                    raise HTTPException(
                        422, "pca-slr needs at least 2 committed logratios"
                    )
                return pca_of_logratios(session.matrix, specs).to_document()
            if mode == "ternary":
                matrix = _roots_matrix(session)
                if matrix.n_parts != 3:
                    raise HTTPException(
                        422, f"ternary needs exactly 3 root nodes, got {matrix.n_parts}"
                    )
                coords = ternary_coords(matrix)
                return {
                    "vertices": list(matrix.part_names),
                    "points": [
                        {
                            "label": matrix.sample_labels[i],
                            "group": matrix.group_factor[i]
                            if matrix.group_factor
                            else None,
                            "x": float(coords[i, 0]),
                            "y": float(coords[i, 1]),
                        }
                        for i in range(matrix.n_samples)
                    ],
                }
            raise HTTPException(422, f"unknown mode {mode!r}")
        except (InputDataError, DegenerateDataError) as exc:
            raise HTTPException(422, str(exc))

    @app.get("/sessions/{session_id}/amalgamated")
    def amalgamated(session_id: str, target: str = "roots", closure: float = 100.0):
        session = get_session(session_id)
        if target != "roots":
            raise HTTPException(422, f"unknown target {target!r}")
        try:
            matrix = close(_roots_matrix(session), closure)
        except InputDataError as exc:
            raise HTTPException(422, str(exc))
        return {
            "parts": list(matrix.part_names),
            "labels": list(matrix.sample_labels),
            "groups": list(matrix.group_factor) if matrix.group_factor else None,
            "rows": [[float(v) for v in row] for row in matrix.values],
        }

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        session = get_session(session_id)
        doc = export_document(session_id, session)
        persist(session_id, session)
        return doc

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
