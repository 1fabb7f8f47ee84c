"""HTTP survey service: serves color-pair stimuli, records judgments durably.

State lives in two append-only JSONL files under the data directory:
`sessions.jsonl` (one record per created session) and `judgments.jsonl`
(one record per acknowledged judgment). Every append is flushed and fsynced
before the request is acknowledged, and startup replays both files, so a
killed process never loses an acknowledged judgment and sessions resume at
their persisted cursor.
"""

from __future__ import annotations

import itertools
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .colors import format_hex
from .evaluation import ColorPairDataset, aggregate_judgments, load_dataset

DEFAULT_DISPLAY = {"background": "#808080", "separation_px": 0}
AFC_CAP_DEFAULT = 20


@dataclass
class Session:
    session_id: str
    mode: str
    dataset: str
    seed: int
    order: list  # rating: [pair_id, ...]; 2afc: [[pair_id, pair_id], ...]
    created_at: int
    cursor: int = 0
    label: str = ""


@dataclass
class SurveyState:
    data_dir: Path
    datasets: dict[str, ColorPairDataset]
    displays: dict[str, dict]
    afc_cap: int = AFC_CAP_DEFAULT
    sessions: dict[str, Session] = field(default_factory=dict)
    judgments: list[dict] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock)

    @property
    def sessions_path(self) -> Path:
        return self.data_dir / "sessions.jsonl"

    @property
    def judgments_path(self) -> Path:
        return self.data_dir / "judgments.jsonl"


def _append_fsync(path: Path, record: dict) -> None:
    # One JSON object per line; fsync before the caller acknowledges.
    line = json.dumps(record, separators=(",", ":")) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


def _replay(state: SurveyState) -> None:
    if state.sessions_path.exists():
        with open(state.sessions_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                state.sessions[rec["session_id"]] = Session(
                    session_id=rec["session_id"],
                    mode=rec["mode"],
                    dataset=rec["dataset"],
                    seed=rec["seed"],
                    order=rec["order"],
                    created_at=rec["created_at"],
                    label=rec.get("label", ""),
                )
    if state.judgments_path.exists():
        with open(state.judgments_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                state.judgments.append(rec)
                sess = state.sessions.get(rec["session_id"])
                if sess is not None:
                    sess.cursor += 1


def load_dataset_dir(dataset_dir: Path) -> tuple[dict[str, ColorPairDataset], dict[str, dict]]:
    """Load every *.csv dataset; `<name>.display.json` sidecars override the
    default stimulus display (background, separation)."""
    datasets: dict[str, ColorPairDataset] = {}
    displays: dict[str, dict] = {}
    for path in sorted(Path(dataset_dir).glob("*.csv")):
        name = path.stem
        datasets[name] = load_dataset(path)
        display = dict(DEFAULT_DISPLAY)
        sidecar = path.with_suffix(".display.json")
        if sidecar.exists():
            display.update(json.loads(sidecar.read_text(encoding="utf-8")))
        displays[name] = display
    return datasets, displays


def _build_order(ds: ColorPairDataset, mode: str, seed: int, afc_cap: int) -> list:
    rng = np.random.default_rng(seed)
    ids = ds.pair_ids
    if mode == "rating":
        return [ids[i] for i in rng.permutation(len(ids))]
    duels = list(itertools.combinations(ids, 2))
    if len(duels) > afc_cap:
        picks = rng.choice(len(duels), size=afc_cap, replace=False)
        duels = [duels[i] for i in picks]
    order = [list(duels[i]) for i in rng.permutation(len(duels))]
    return order


def _stimulus_payload(state: SurveyState, sess: Session) -> dict:
    ds = state.datasets[sess.dataset]
    by_id = {p.id: p for p in ds.pairs}
    entry = sess.order[sess.cursor]
    if sess.mode == "rating":
        pair_ids = [entry]
        stimulus_id = str(entry)
    else:
        pair_ids = list(entry)
        stimulus_id = f"{entry[0]}-{entry[1]}"
    pairs = [
        {"id": pid, "a": format_hex(by_id[pid].a), "b": format_hex(by_id[pid].b)}
        for pid in pair_ids
    ]
    return {
        "done": False,
        "stimulus_id": stimulus_id,
        "mode": sess.mode,
        "pairs": pairs,
        "display": state.displays[sess.dataset],
        "progress": {"done": sess.cursor, "total": len(sess.order)},
    }


class SessionRequest(BaseModel):
    mode: Literal["rating", "2afc"]
    dataset: str
    seed: Optional[int] = None
    label: str = ""


class JudgmentRequest(BaseModel):
    stimulus_id: str
    response: float | int
    elapsed_ms: int = 0
    # best-effort client context (viewport size, device pixel ratio, ...)
    client_meta: Optional[dict] = None


def create_app(
    data_dir,
    dataset_dir,
    afc_cap: int = AFC_CAP_DEFAULT,
    ui_dir=None,
) -> FastAPI:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    datasets, displays = load_dataset_dir(Path(dataset_dir))
    state = SurveyState(data_dir=data_dir, datasets=datasets, displays=displays, afc_cap=afc_cap)
    _replay(state)

    app = FastAPI(title="chromadiff survey service")
    app.state.survey = state
    # the browser UI may be served from a different origin (base URL config)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    @app.post("/api/sessions")
    def create_session(req: SessionRequest):
        with state.lock:
            ds = state.datasets.get(req.dataset)
            if ds is None:
                raise HTTPException(404, f"unknown dataset {req.dataset!r}")
            seed = req.seed if req.seed is not None else int.from_bytes(os.urandom(4), "big")
            sess = Session(
                session_id=uuid.uuid4().hex,
                mode=req.mode,
                dataset=req.dataset,
                seed=seed,
                order=_build_order(ds, req.mode, seed, state.afc_cap),
                created_at=int(time.time() * 1000),
                label=req.label,
            )
            _append_fsync(state.sessions_path, {
                "session_id": sess.session_id,
                "mode": sess.mode,
                "dataset": sess.dataset,
                "seed": sess.seed,
                "order": sess.order,
                "created_at": sess.created_at,
                "label": sess.label,
            })
            state.sessions[sess.session_id] = sess
            return {"session_id": sess.session_id, "count": len(sess.order)}

    def _get_session(session_id: str) -> Session:
        sess = state.sessions.get(session_id)
        if sess is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return sess

    @app.get("/api/sessions/{session_id}/next")
    def next_stimulus(session_id: str):
        with state.lock:
            sess = _get_session(session_id)
            if sess.cursor >= len(sess.order):
                return {"done": True, "progress": {"done": sess.cursor, "total": len(sess.order)}}
            return _stimulus_payload(state, sess)

    @app.post("/api/sessions/{session_id}/judgments")
    def submit_judgment(session_id: str, req: JudgmentRequest):
        with state.lock:
            sess = _get_session(session_id)
            if sess.cursor >= len(sess.order):
                raise HTTPException(409, "session already complete")
            expected = _stimulus_payload(state, sess)
            if req.stimulus_id != expected["stimulus_id"]:
                raise HTTPException(
                    409,
                    f"stimulus {req.stimulus_id!r} is not at the cursor "
                    f"(expected {expected['stimulus_id']!r}); duplicate or out of order",
                )
            pair_ids = [p["id"] for p in expected["pairs"]]
            if sess.mode == "rating":
                if not (0 <= req.response <= 10):
                    raise HTTPException(400, f"rating {req.response} out of range [0, 10]")
                response = float(req.response)
            else:
                if int(req.response) != req.response or int(req.response) not in pair_ids:
                    raise HTTPException(
                        400, f"2afc choice {req.response} must be one of {pair_ids}"
                    )
                response = int(req.response)
            if req.elapsed_ms < 0:
                raise HTTPException(400, "elapsed_ms must be non-negative")
            record = {
                "session_id": sess.session_id,
                "dataset": sess.dataset,
                "mode": sess.mode,
                "stimulus_id": req.stimulus_id,
                "pair_ids": pair_ids,
                "response": response,
                "elapsed_ms": req.elapsed_ms,
                "recorded_at": int(time.time() * 1000),
            }
            if req.client_meta is not None:
                record["client_meta"] = req.client_meta
            _append_fsync(state.judgments_path, record)
            state.judgments.append(record)
            sess.cursor += 1
            return {"ok": True, "progress": {"done": sess.cursor, "total": len(sess.order)}}

    @app.get("/api/aggregate")
    def get_aggregate(dataset: str = Query(...)):
        with state.lock:
            ds = state.datasets.get(dataset)
            if ds is None:
                raise HTTPException(404, f"unknown dataset {dataset!r}")
            records = [r for r in state.judgments if r["dataset"] == dataset]
            if not records:
                raise HTTPException(404, f"no judgments recorded for dataset {dataset!r}")
            modes = aggregate_judgments(records, ds)
            return {
                "dataset": dataset,
                "modes": {
                    mode: {str(pid): score for pid, score in scores.items()}
                    for mode, scores in modes.items()
                },
            }

    @app.get("/api/export")
    def export_judgments(dataset: str = Query(...)):
        with state.lock:
            if dataset not in state.datasets:
                raise HTTPException(404, f"unknown dataset {dataset!r}")
            lines = [
                json.dumps(r, separators=(",", ":"))
                for r in state.judgments
                if r["dataset"] == dataset
            ]
        body = "\n".join(lines) + ("\n" if lines else "")
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/api/dataset")
    def get_dataset(dataset: str = Query(...)):
        ds = state.datasets.get(dataset)
        if ds is None:
            raise HTTPException(404, f"unknown dataset {dataset!r}")
        return {
            "dataset": dataset,
            "pairs": [
                {"id": p.id, "a": format_hex(p.a), "b": format_hex(p.b)} for p in ds.pairs
            ],
            "has_human": ds.human is not None,
            "display": state.displays[dataset],
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
