"""Session-oriented HTTP API over the audit engine.

Sessions persist as append-only event logs that are replayed on load, so a
service restart reconstructs exactly the state that was built up. Datasets
are cached in memory keyed by content hash and stored alongside the events.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Form, Query, Request, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import errors
from .compass import DEFINITIONS, describe_node, load_default_tree, load_tree_file
from .data import (
    Dataset,
    EqualWidth,
    ExplicitEdges,
    IngestConfig,
    feature_distribution,
    load_dataset,
)
from .metrics import RATE_KINDS, overall_metrics, subgroup_metrics
from .session import EXPLORATION, INFORMED_ANALYSIS, AuditSession, utc_now
from .suggest import similar_subgroups, suggest_subgroups

API_PREFIX = "/api/v1"

# Metric-vector fields selectable as display series in the metrics endpoint.
DISPLAY_METRICS = ("accuracy", "precision", "recall", "tnr", "fpr", "fnr",
                   "positive_rate", "negative_rate", "base_rate")


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    store_path: str = "./faircompass-store"
    tree_path: str | None = None
    static_dir: str | None = None
    max_upload_bytes: int = 64 * 1024 * 1024
    default_threshold: float = 0.1
    default_seed: int = 42
    default_k: int = 10
    min_stratum_size: int = 20
    product_cap: int = 1000

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
        return cls(**doc)


class EventStore:
    """Append-only JSONL event logs per session, plus dataset blobs."""

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        (self.root / "datasets").mkdir(parents=True, exist_ok=True)

    def _session_file(self, session_id: str) -> Path:
        return self.root / "sessions" / f"{session_id}.jsonl"

    def append_event(self, session_id: str, event: dict) -> None:
        with open(self._session_file(session_id), "a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, sort_keys=True) + "\n")

    def read_events(self, session_id: str) -> list[dict]:
        path = self._session_file(session_id)
        if not path.exists():
            raise errors.UnknownSession(f"no stored session {session_id!r}")
        with open(path, "r", encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]

    def has_session(self, session_id: str) -> bool:
        return self._session_file(session_id).exists()

    def session_ids(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "sessions").glob("*.jsonl"))

    def save_dataset(self, dataset_id: str, text: str, config: IngestConfig) -> None:
        blob = self.root / "datasets" / f"{dataset_id}.csv"
        if not blob.exists():
            blob.write_text(text, encoding="utf-8")
            (self.root / "datasets" / f"{dataset_id}.json").write_text(
                json.dumps(config.to_dict(), sort_keys=True), encoding="utf-8"
            )

    def load_dataset_blob(self, dataset_id: str) -> tuple[str, IngestConfig]:
        blob = self.root / "datasets" / f"{dataset_id}.csv"
        meta = self.root / "datasets" / f"{dataset_id}.json"
        if not blob.exists() or not meta.exists():
            raise errors.UnknownSession(f"no stored dataset {dataset_id!r}")
        config = IngestConfig.from_dict(json.loads(meta.read_text(encoding="utf-8")))
        return blob.read_text(encoding="utf-8"), config


class AuditService:
    """Engine facade with per-session locking and event-sourced persistence."""

    def __init__(self, config: ServiceConfig, clock=utc_now):
        self.config = config
        self.clock = clock
        self.store = EventStore(config.store_path)
        self.tree = load_tree_file(config.tree_path) if config.tree_path else load_default_tree()
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, AuditSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._session_counter = 0

    # -- datasets ----------------------------------------------------------

    def ingest_dataset(self, text: str, config: IngestConfig) -> Dataset:
        if len(text.encode("utf-8")) > self.config.max_upload_bytes:
            raise errors.DatasetTooLarge(
                f"upload exceeds the configured cap of {self.config.max_upload_bytes} bytes"
            )
        dataset = load_dataset(text, config)
        with self._registry_lock:
            self.datasets[dataset.id] = dataset
        self.store.save_dataset(dataset.id, text, config)
        return dataset

    def get_dataset(self, dataset_id: str) -> Dataset:
        with self._registry_lock:
            dataset = self.datasets.get(dataset_id)
        if dataset is not None:
            return dataset
        text, config = self.store.load_dataset_blob(dataset_id)
        dataset = load_dataset(text, config)
        with self._registry_lock:
            self.datasets[dataset.id] = dataset
        return dataset

    # -- sessions -----------------------------------------------------------

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create_session(self, dataset_id: str, session_id: str | None = None) -> AuditSession:
        dataset = self.get_dataset(dataset_id)
        with self._registry_lock:
            self._session_counter += 1
            if session_id is None:
                session_id = f"s-{dataset.id[:8]}-{self._session_counter}"
            if session_id in self.sessions or self.store.has_session(session_id):
                raise ValueError(f"session {session_id!r} already exists")
        event = {"kind": "create_session", "ts": self.clock(), "dataset_id": dataset_id}
        with self._lock(session_id):
            session = self._create_from_event(session_id, event)
            self.sessions[session_id] = session
            self.store.append_event(session_id, event)
        return session

    def _create_from_event(self, session_id: str, event: dict) -> AuditSession:
        dataset = self.get_dataset(event["dataset_id"])
        session = AuditSession(session_id, dataset, self.tree, clock=self.clock)
        session.log(EXPLORATION, "create_session", {"dataset_id": dataset.id}, ts=event["ts"])
        return session

    def get_session(self, session_id: str) -> AuditSession:
        with self._lock(session_id):
            session = self.sessions.get(session_id)
            if session is not None:
                return session
            events = self.store.read_events(session_id)
            if not events or events[0]["kind"] != "create_session":
                raise errors.UnknownSession(f"stored session {session_id!r} has no creation event")
            session = self._create_from_event(session_id, events[0])
            for event in events[1:]:
                self._apply(session, event)
            self.sessions[session_id] = session
            return session

    def _apply(self, session: AuditSession, event: dict) -> object:
        kind = event["kind"]
        ts = event["ts"]
        if kind == "bin_feature":
            strategy = (
                EqualWidth(event["k"]) if event["strategy"] == "equal_width"
                else ExplicitEdges(event["edges"])
            )
            return session.bin_feature(event["feature"], strategy,
                                       stage=event["stage"], ts=ts)
        if kind == "generate_groups":
            selections = [
                (feature, list(values) if values is not None else None)
                for feature, values in event["selections"]
            ]
            return session.generate_groups(selections, stage=event["stage"],
                                           note=event.get("note"), ts=ts,
                                           cap=self.config.product_cap)
        if kind == "pin":
            return session.pin(event["subgroup_id"], stage=event["stage"], ts=ts)
        if kind == "save_group_set":
            subgroups = None
            if event.get("subgroup_ids") is not None:
                subgroups = [session.subgroup(gid) for gid in event["subgroup_ids"]]
            return session.save_group_set(event["name"], subgroups,
                                          stage=event["stage"], ts=ts)
        if kind == "restore_group_set":
            return session.restore_group_set(event["group_set_id"],
                                             stage=event["stage"], ts=ts)
        if kind == "navigate":
            return session.navigate(event["node_id"], event["answer"], ts=ts)
        if kind == "backtrack":
            return session.backtrack(event["steps"], ts=ts)
        if kind == "select_definition":
            return session.select_definition(event["definition_id"], ts=ts)
        if kind == "evaluate":
            return session.evaluate(event["inputs"], ts=ts)
        if kind == "log":
            return session.log(event["stage"], event["action"],
                               event.get("payload") or {}, note=event.get("note"), ts=ts)
        raise ValueError(f"unknown event kind {kind!r}")

    def mutate(self, session_id: str, event: dict) -> object:
        """Apply a mutating event to a session and persist it."""
        session = self.get_session(session_id)
        event = {**event, "ts": self.clock()}
        with self._lock(session_id):
            result = self._apply(session, event)
            self.store.append_event(session_id, event)
        return result


def _histogram_dict(histogram) -> dict:
    return {
        "feature": histogram.feature,
        "bins": [[label, count] for label, count in histogram.bins],
        "total": histogram.total,
    }


def _vector_entry(session: AuditSession, group) -> dict:
    return {
        "subgroup": group.to_dict(),
        "metrics": subgroup_metrics(session.dataset, group).to_dict(),
    }


class SelectionBody(BaseModel):
    feature: str
    values: list | None = None


class GenerateGroupsBody(BaseModel):
    selections: list[SelectionBody]
    stage: str = EXPLORATION
    note: str | None = None


class BinBody(BaseModel):
    feature: str
    strategy: str
    k: int | None = None
    edges: list[float] | None = None
    stage: str = EXPLORATION


class PinBody(BaseModel):
    subgroup_id: str
    stage: str = INFORMED_ANALYSIS


class SaveGroupSetBody(BaseModel):
    name: str
    subgroup_ids: list[str] | None = None
    stage: str = EXPLORATION


class RestoreBody(BaseModel):
    stage: str = EXPLORATION


class NavigateBody(BaseModel):
    node_id: str
    answer: str


class BacktrackBody(BaseModel):
    steps: int = 1


class SelectDefinitionBody(BaseModel):
    definition_id: str


class EvaluateBody(BaseModel):
    inputs: dict


class LogBody(BaseModel):
    stage: str
    action: str
    payload: dict = {}
    note: str | None = None


class CreateSessionBody(BaseModel):
    dataset_id: str
    session_id: str | None = None


STATUS_BY_ERROR = {
    errors.UnknownFeature: 404,
    errors.UnknownSession: 404,
    errors.UnknownGroupSet: 404,
    errors.UnknownSubgroup: 404,
    errors.UnknownNode: 404,
    errors.UnknownDefinition: 404,
    errors.OffPath: 409,
    errors.DatasetTooLarge: 413,
}


def _status_for(exc: errors.FairCompassError) -> int:
    for klass, status in STATUS_BY_ERROR.items():
        if isinstance(exc, klass):
            return status
    return 422


def create_app(service: AuditService) -> FastAPI:
    app = FastAPI(title="faircompass", version="0.1.0")

    @app.exception_handler(errors.FairCompassError)
    async def engine_error_handler(request: Request, exc: errors.FairCompassError):
        body = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, errors.IngestError):
            body["row"] = exc.row
            body["column"] = exc.column
        return JSONResponse(status_code=_status_for(exc), content=body)

    # -- datasets ----------------------------------------------------------

    @app.post(API_PREFIX + "/datasets")
    async def upload_dataset(file: UploadFile, config: str = Form(...)):
        text = (await file.read()).decode("utf-8")
        ingest = IngestConfig.from_dict(json.loads(config))
        dataset = service.ingest_dataset(text, ingest)
        return dataset.summary()

    @app.get(API_PREFIX + "/datasets/{dataset_id}")
    def dataset_summary(dataset_id: str):
        return service.get_dataset(dataset_id).summary()

    @app.get(API_PREFIX + "/datasets/{dataset_id}/distribution")
    def dataset_distribution(dataset_id: str, feature: str):
        dataset = service.get_dataset(dataset_id)
        return _histogram_dict(feature_distribution(dataset, feature))

    # -- tree ----------------------------------------------------------------

    @app.get(API_PREFIX + "/tree")
    def tree():
        return service.tree.to_dict()

    @app.get(API_PREFIX + "/tree/nodes/{node_id}")
    def tree_node(node_id: str):
        description = describe_node(service.tree, node_id)
        return {
            "node_id": description.node_id,
            "kind": description.kind,
            "text": description.text,
            "answers": list(description.answers),
            "definition_id": description.definition_id,
            "definition_name": description.definition_name,
            "definition_description": description.definition_description,
            "required_inputs": sorted(description.required_inputs)
            if description.required_inputs is not None else None,
        }

    @app.get(API_PREFIX + "/definitions")
    def definitions():
        return [
            {
                "id": d.id,
                "name": d.name,
                "description": d.description,
                "required_inputs": sorted(d.required_inputs),
                "kind": d.kind,
                "rate_kinds": list(d.rate_kinds),
            }
            for d in DEFINITIONS.values()
        ]

    # -- sessions ----------------------------------------------------------------

    @app.post(API_PREFIX + "/sessions")
    def create_session(body: CreateSessionBody):
        session = service.create_session(body.dataset_id, body.session_id)
        return session.state_dict()

    @app.get(API_PREFIX + "/sessions/{session_id}")
    def session_state(session_id: str):
        session = service.get_session(session_id)
        state = session.state_dict()
        state["frontier"] = session.frontier()
        return state

    @app.get(API_PREFIX + "/sessions/{session_id}/distribution")
    def session_distribution(session_id: str, feature: str):
        session = service.get_session(session_id)
        return _histogram_dict(feature_distribution(session.dataset, feature))

    @app.post(API_PREFIX + "/sessions/{session_id}/bins")
    def bin_feature(session_id: str, body: BinBody):
        if body.strategy not in ("equal_width", "explicit"):
            raise errors.InvalidEdges(f"unknown strategy {body.strategy!r}")
        if body.strategy == "equal_width" and body.k is None:
            raise errors.InvalidEdges("equal_width needs k")
        if body.strategy == "explicit" and not body.edges:
            raise errors.InvalidEdges("explicit needs edges")
        service.mutate(session_id, {
            "kind": "bin_feature", "feature": body.feature,
            "strategy": body.strategy, "k": body.k, "edges": body.edges,
            "stage": body.stage,
        })
        session = service.get_session(session_id)
        spec = session.dataset.feature(body.feature)
        return {"feature": spec.name, "bin_edges": list(spec.bin_edges)}

    @app.post(API_PREFIX + "/sessions/{session_id}/groups")
    def generate_groups(session_id: str, body: GenerateGroupsBody):
        groups = service.mutate(session_id, {
            "kind": "generate_groups",
            "selections": [[s.feature, s.values] for s in body.selections],
            "stage": body.stage,
            "note": body.note,
        })
        return {"subgroups": [g.to_dict() for g in groups]}

    @app.get(API_PREFIX + "/sessions/{session_id}/metrics")
    def list_metrics(session_id: str, rates: str | None = None):
        session = service.get_session(session_id)
        selected = [r for r in (rates.split(",") if rates else []) if r]
        for rate in selected:
            if rate not in DISPLAY_METRICS and rate not in RATE_KINDS:
                raise errors.UndefinedRate(f"unknown rate kind {rate!r}")
        return {
            "selected_rates": selected,
            "overall": overall_metrics(session.dataset).to_dict(),
            "subgroups": [_vector_entry(session, g) for g in session.active_subgroups],
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/pin")
    def pin_subgroup(session_id: str, body: PinBody):
        group = service.mutate(session_id, {
            "kind": "pin", "subgroup_id": body.subgroup_id, "stage": body.stage,
        })
        return {"pinned": group.to_dict()}

    @app.get(API_PREFIX + "/sessions/{session_id}/compare")
    def compare(session_id: str, hovered: str):
        session = service.get_session(session_id)
        if session.pinned_subgroup is None:
            raise errors.UnknownSubgroup("no subgroup is pinned")
        pinned_group = session.subgroup(session.pinned_subgroup)
        hovered_group = session.subgroup(hovered)
        pinned_vec = subgroup_metrics(session.dataset, pinned_group)
        hovered_vec = subgroup_metrics(session.dataset, hovered_group)
        deltas = {}
        for kind in ("accuracy", "precision", "recall", "tnr", "fpr", "fnr",
                     "positive_rate", "negative_rate", "base_rate"):
            p = getattr(pinned_vec, kind)
            h = getattr(hovered_vec, kind)
            deltas[kind] = (h - p) if (p is not None and h is not None) else None
        return {
            "pinned": {"subgroup": pinned_group.to_dict(), "metrics": pinned_vec.to_dict()},
            "hovered": {"subgroup": hovered_group.to_dict(), "metrics": hovered_vec.to_dict()},
            "deltas": deltas,
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/group-sets")
    def save_group_set(session_id: str, body: SaveGroupSetBody):
        group_set = service.mutate(session_id, {
            "kind": "save_group_set", "name": body.name,
            "subgroup_ids": body.subgroup_ids, "stage": body.stage,
        })
        return group_set.to_dict()

    @app.get(API_PREFIX + "/sessions/{session_id}/group-sets")
    def list_group_sets(session_id: str):
        session = service.get_session(session_id)
        return {"group_sets": [gs.to_dict() for gs in session.saved_group_sets]}

    @app.post(API_PREFIX + "/sessions/{session_id}/group-sets/{group_set_id}/restore")
    def restore_group_set(session_id: str, group_set_id: str, body: RestoreBody):
        groups = service.mutate(session_id, {
            "kind": "restore_group_set", "group_set_id": group_set_id,
            "stage": body.stage,
        })
        return {"subgroups": [g.to_dict() for g in groups]}

    @app.get(API_PREFIX + "/sessions/{session_id}/suggestions")
    def suggestions(session_id: str, rate: str = "accuracy",
                    k: int | None = Query(default=None),
                    seed: int | None = Query(default=None)):
        session = service.get_session(session_id)
        if rate not in RATE_KINDS:
            raise errors.UndefinedRate(f"unknown rate kind {rate!r}")
        ranked = suggest_subgroups(
            session.dataset, rate,
            k=k if k is not None else service.config.default_k,
            seed=seed if seed is not None else service.config.default_seed,
        )
        return {"suggestions": [s.to_dict() for s in ranked]}

    @app.get(API_PREFIX + "/sessions/{session_id}/similar")
    def similar(session_id: str, target: str):
        session = service.get_session(session_id)
        target_group = session.subgroup(target)
        ranked = similar_subgroups(target_group, session.active_subgroups, session.dataset)
        return {
            "similar": [
                {"subgroup": g.to_dict(), "distance": d} for g, d in ranked
            ]
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/tree/navigate")
    def navigate(session_id: str, body: NavigateBody):
        node = service.mutate(session_id, {
            "kind": "navigate", "node_id": body.node_id, "answer": body.answer,
        })
        session = service.get_session(session_id)
        return {
            "node": {"id": node.id, "kind": node.kind, "text": node.text,
                     "answers": [label for label, _ in node.answers],
                     "definition_id": node.definition_id},
            "tree_path": [list(step) for step in session.tree_path],
            "selected_definition": session.selected_definition,
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/tree/backtrack")
    def backtrack(session_id: str, body: BacktrackBody):
        frontier = service.mutate(session_id, {"kind": "backtrack", "steps": body.steps})
        session = service.get_session(session_id)
        return {
            "frontier": frontier,
            "tree_path": [list(step) for step in session.tree_path],
            "selected_definition": session.selected_definition,
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/definition")
    def select_definition(session_id: str, body: SelectDefinitionBody):
        definition = service.mutate(session_id, {
            "kind": "select_definition", "definition_id": body.definition_id,
        })
        return {"selected_definition": definition.id,
                "required_inputs": sorted(definition.required_inputs)}

    @app.post(API_PREFIX + "/sessions/{session_id}/evaluate")
    def evaluate(session_id: str, body: EvaluateBody):
        result = service.mutate(session_id, {"kind": "evaluate", "inputs": body.inputs})
        return {"result": result.to_dict()}

    @app.post(API_PREFIX + "/sessions/{session_id}/log")
    def append_log(session_id: str, body: LogBody):
        entry = service.mutate(session_id, {
            "kind": "log", "stage": body.stage, "action": body.action,
            "payload": body.payload, "note": body.note,
        })
        return entry.to_dict()

    @app.get(API_PREFIX + "/sessions/{session_id}/report")
    def report(session_id: str, format: str = "json"):
        from .report import render_markdown

        session = service.get_session(session_id)
        export = session.export()
        if format == "markdown":
            return PlainTextResponse(render_markdown(export), media_type="text/markdown")
        return export

    if service.config.static_dir and Path(service.config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=service.config.static_dir, html=True), name="ui")

    return app
