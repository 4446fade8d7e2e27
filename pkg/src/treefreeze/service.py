"""Session-oriented HTTP/JSON API for the incremental loop.

Thin FastAPI layer over :mod:`treefreeze.sessions`.  Routes:

* ``POST /sessions``                 — create a session from a log (path or
  inline traces) and an optional initial tree,
* ``GET  /sessions/{id}/tree``       — canonical text, DOT, and a node-path
  map for click selection,
* ``GET  /sessions/{id}/variants``   — frequency-sorted variants with
  "covered" flags,
* ``PUT  /sessions/{id}/frozen``     — replace the frozen selection,
* ``POST /sessions/{id}/increments`` — apply one discovery step,
* ``POST /sessions/{id}/undo``       — restore the state before the last
  increment,
* ``GET  /sessions/{id}/metrics``    — per-increment quality rows and CSV.

Sessions are in-memory.  Mutating routes on one session are serialized by
a per-session lock; reads return a consistent snapshot without locking.
Errors carry a machine-readable shape: ``{"error": ..., "message": ...}``
plus ``stage`` for pipeline contract violations and ``position`` for tree
parse errors.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .alignments import DEFAULT_SEARCH_BUDGET
from .errors import (
    ContractViolation,
    ExplosionError,
    FreezeSelectionError,
    LogFormatError,
    ParseError,
    SearchBudgetExceeded,
)
from .ipda import registered_ipdas
from .logs import from_traces, load_log
from .sessions import ALGORITHMS, FreezeSession, tree_payload


class CreateSessionBody(BaseModel):
    log_path: Optional[str] = None
    traces: Optional[list[list[str]]] = None
    tree: Optional[str] = None
    ipda: str = "reference"
    loop_bound: int = 2
    search_budget: int = DEFAULT_SEARCH_BUDGET


class FrozenBody(BaseModel):
    paths: list[list[int]]


class IncrementBody(BaseModel):
    variant: Optional[int] = None
    trace: Optional[list[str]] = None
    algorithm: str = "advanced"
    ipda: Optional[str] = None


@contextmanager
def _api_errors():
    try:
        yield
    except ParseError as exc:
        raise HTTPException(
            status_code=422,
            detail={
                "error": "parse",
                "message": str(exc),
                "position": exc.position,
            },
        ) from None
    except ContractViolation as exc:
        raise HTTPException(
            status_code=422,
            detail={
                "error": "contract-violation",
                "stage": exc.stage,
                "message": str(exc),
            },
        ) from None
    except (SearchBudgetExceeded, ExplosionError) as exc:
        raise HTTPException(
            status_code=422,
            detail={"error": "budget-exceeded", "message": str(exc)},
        ) from None
    except FreezeSelectionError as exc:
        raise HTTPException(
            status_code=422,
            detail={"error": "frozen-selection", "message": str(exc)},
        ) from None
    except LogFormatError as exc:
        raise HTTPException(
            status_code=422,
            detail={"error": "log-format", "message": str(exc)},
        ) from None
    except FileNotFoundError as exc:
        raise HTTPException(
            status_code=422,
            detail={"error": "file-not-found", "message": str(exc)},
        ) from None
    except (ValueError, IndexError) as exc:
        raise HTTPException(
            status_code=422,
            detail={"error": "invalid-request", "message": str(exc)},
        ) from None


def create_app() -> FastAPI:
    app = FastAPI(title="treefreeze", version="0.1.0")
    # The browser client may be served from a different origin (static file
    # server); sessions are unauthenticated local state, so allow any.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, FreezeSession] = {}
    locks: dict[str, threading.Lock] = {}
    registry_lock = threading.Lock()
    counter = iter(range(1, 10**9))

    def get_session(session_id: str) -> FreezeSession:
        try:
            return sessions[session_id]
        except KeyError:
            raise HTTPException(
                status_code=404,
                detail={"error": "unknown-session", "message": session_id},
            ) from None

    def variants_view(session: FreezeSession) -> list[dict]:
        return [
            {
                "index": index,
                "trace": list(trace),
                "count": count,
                "covered": session.covered(trace),
            }
            for index, (trace, count) in enumerate(session.variant_list())
        ]

    def session_view(session_id: str, session: FreezeSession) -> dict:
        return {
            "id": session_id,
            "tree": tree_payload(session),
            "variants": variants_view(session),
            "previous": [list(t) for t in session.previous],
            "metrics": [r.to_dict() for r in session.reports],
            "ipda": session.default_ipda,
            "available_ipdas": registered_ipdas(),
            "algorithms": list(ALGORITHMS),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        with _api_errors():
            if (body.log_path is None) == (body.traces is None):
                raise ValueError("provide exactly one of log_path or traces")
            if body.log_path is not None:
                log = load_log(body.log_path)
            else:
                log = from_traces([tuple(t) for t in body.traces])
            session = FreezeSession(
                log,
                tree=body.tree,
                ipda=body.ipda,
                loop_bound=body.loop_bound,
                search_budget=body.search_budget,
            )
        with registry_lock:
            session_id = f"s{next(counter)}"
            sessions[session_id] = session
            locks[session_id] = threading.Lock()
        return session_view(session_id, session)

    @app.get("/sessions/{session_id}/tree")
    def get_tree(session_id: str) -> dict:
        return tree_payload(get_session(session_id))

    @app.get("/sessions/{session_id}/variants")
    def get_variants(session_id: str) -> dict:
        return {"variants": variants_view(get_session(session_id))}

    @app.put("/sessions/{session_id}/frozen")
    def put_frozen(session_id: str, body: FrozenBody) -> dict:
        session = get_session(session_id)
        with locks[session_id], _api_errors():
            paths = session.set_frozen(body.paths)
        return {"frozen_paths": [list(p) for p in paths]}

    @app.post("/sessions/{session_id}/increments")
    def post_increment(session_id: str, body: IncrementBody) -> dict:
        session = get_session(session_id)
        with locks[session_id], _api_errors():
            report = session.apply_increment(
                trace=tuple(body.trace) if body.trace is not None else None,
                variant=body.variant,
                algorithm=body.algorithm,
                ipda=body.ipda,
            )
            record = session.steps[-1]
        return {
            "tree": tree_payload(session),
            "report": report.to_dict(),
            "checks": record.checks,
            "previous": [list(t) for t in session.previous],
            "variants": variants_view(session),
        }

    @app.post("/sessions/{session_id}/undo")
    def post_undo(session_id: str) -> dict:
        session = get_session(session_id)
        with locks[session_id]:
            try:
                session.undo()
            except ValueError as exc:
                raise HTTPException(
                    status_code=409,
                    detail={"error": "nothing-to-undo", "message": str(exc)},
                ) from None
        return {
            "tree": tree_payload(session),
            "previous": [list(t) for t in session.previous],
            "variants": variants_view(session),
        }

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str) -> dict:
        session = get_session(session_id)
        return {
            "rows": [r.to_dict() for r in session.reports],
            "csv": session.metrics_csv(),
        }

    return app


app = create_app()
