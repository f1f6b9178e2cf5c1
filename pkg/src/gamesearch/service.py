"""HTTP play service: create sessions, submit moves, request AI replies.

Endpoints (JSON bodies):
  POST /sessions                 create a game + AI-opponent session
  GET  /sessions/{id}            full session view
  POST /sessions/{id}/moves      human move (text notation or action id)
  POST /sessions/{id}/ai-move    run the configured search and play its move

Sessions live in process memory. Operations on one session are
serialized by a per-session lock; searches for distinct sessions run
concurrently. Errors: 404 unknown session, 409 illegal move or wrong
turn or finished game, 422 malformed input.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .arena import build_evaluator
from .games import (
    Connect4,
    DotsAndBoxes,
    GameConfig,
    GameKind,
    IllegalActionError,
    MoveParseError,
    Othello,
    Player,
    make_game,
)
from .search import Algorithm, SearchParams, derived_seed, run_search


class AiSettingsModel(BaseModel):
    algorithm: Literal["ucb", "rmcts"] = "rmcts"
    n_sims: int = Field(default=256, ge=2, le=100_000)
    c: float = Field(default=1.0, gt=0)
    evaluator: str = "heuristic"


class CreateSessionModel(BaseModel):
    game: Literal["connect4", "othello", "dotsandboxes"] = "connect4"
    width: Optional[int] = Field(default=None, ge=1, le=32)
    height: Optional[int] = Field(default=None, ge=1, le=32)
    connect_k: Optional[int] = Field(default=None, ge=2, le=16)
    human_player: Literal["P1", "P2"] = "P1"
    ai: AiSettingsModel = Field(default_factory=AiSettingsModel)
    seed: int = 0
    moves: list[str] = Field(default_factory=list)


class MoveModel(BaseModel):
    move: Optional[str] = None  # game notation, e.g. "3", "c4", "h 0 1"
    action: Optional[int] = Field(default=None, ge=0)


class _Session:
    def __init__(self, sid, game, state, ai: AiSettingsModel, human: Player, seed: int, evaluator):
        self.id = sid
        self.game = game
        self.state = state
        self.ai = ai
        self.human = human
        self.seed = seed
        self.evaluator = evaluator
        self.history = []
        self.last_ai = None
        self.lock = threading.Lock()


def _board_payload(game, s) -> dict:
    if isinstance(game, Connect4):
        stride = game.height + 1
        cells = []
        for r in range(game.height - 1, -1, -1):  # top row first
            row = []
            for c in range(game.width):
                bit = 1 << (c * stride + r)
                row.append(1 if s.p1_bb & bit else 2 if s.p2_bb & bit else 0)
            cells.append(row)
        return {"type": "columns", "rows": game.height, "cols": game.width, "cells": cells}
    if isinstance(game, Othello):
        n = game.n
        cells = []
        for r in range(n):
            row = []
            for c in range(n):
                bit = 1 << (r * n + c)
                row.append(1 if s.p1_bb & bit else 2 if s.p2_bb & bit else 0)
            cells.append(row)
        return {"type": "grid", "rows": n, "cols": n, "cells": cells, "pass_action": game.pass_action}
    if isinstance(game, DotsAndBoxes):
        w, h = game.width, game.height
        h_edges = [
            [1 if s.edges & (1 << game._h_edge(r, c)) else 0 for c in range(w)]
            for r in range(h + 1)
        ]
        v_edges = [
            [1 if s.edges & (1 << game._v_edge(r, c)) else 0 for c in range(w + 1)]
            for r in range(h)
        ]
        boxes = []
        for r in range(h):
            row = []
            for c in range(w):
                bit = 1 << (r * w + c)
                row.append(1 if s.p1_boxes & bit else 2 if s.p2_boxes & bit else 0)
            boxes.append(row)
        return {
            "type": "edges",
            "box_rows": h,
            "box_cols": w,
            "h_edges": h_edges,
            "v_edges": v_edges,
            "boxes": boxes,
        }
    return {"type": "text"}


def _session_payload(session: _Session) -> dict:
    game, s = session.game, session.state
    finished = game.is_terminal(s)
    cfg = game.config
    return {
        "id": session.id,
        "game": {
            "kind": cfg.game.value,
            "width": cfg.width,
            "height": cfg.height,
            "connect_k": cfg.connect_k,
            "action_space": game.action_space_size,
            "max_score": float(game.max_score()),
        },
        "human_player": session.human.name,
        "ai": session.ai.model_dump(),
        "status": "finished" if finished else "in_progress",
        "to_move": None if finished else s.to_move.name,
        "score": float(game.terminal_score(s, Player.P1)) if finished else None,
        "board": _board_payload(game, s),
        "rendered": game.render(s),
        "legal_moves": [
            {"action": int(a), "name": game.action_name(int(a))}
            for a in ([] if finished else game.legal_actions(s))
        ],
        "history": list(session.history),
        "last_ai": session.last_ai,
    }


def _apply_move(session: _Session, action: int, by: str) -> None:
    game = session.game
    mover = session.state.to_move
    try:
        session.state = game.apply(session.state, action)
    except IllegalActionError as err:
        raise HTTPException(status_code=409, detail=str(err)) from None
    session.history.append(
        {
            "ply": len(session.history),
            "player": mover.name,
            "action": int(action),
            "name": game.action_name(int(action)),
            "by": by,
        }
    )


def create_app(frontend_dir=None) -> FastAPI:
    """Build the service; frontend_dir (or <repo>/frontend/dist) is served
    as static files when it exists."""
    app = FastAPI(title="gamesearch play service")
    sessions: dict = {}
    registry_lock = threading.Lock()

    def lookup(sid: str) -> _Session:
        with registry_lock:
            session = sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionModel):
        try:
            config = GameConfig(
                GameKind(req.game),
                width=req.width or 0,
                height=req.height or 0,
                connect_k=req.connect_k if req.connect_k is not None else 4,
            )
            game = make_game(config)
            evaluator = build_evaluator(req.ai.evaluator, game)
        except (ValueError, FileNotFoundError) as err:
            raise HTTPException(status_code=422, detail=str(err)) from None
        session = _Session(
            uuid.uuid4().hex,
            game,
            game.initial_state(),
            req.ai,
            Player[req.human_player],
            req.seed,
            evaluator,
        )
        for text in req.moves:
            if game.is_terminal(session.state):
                raise HTTPException(status_code=409, detail="replay past the end of the game")
            try:
                action = game.parse_move(text)
            except MoveParseError as err:
                raise HTTPException(status_code=422, detail=str(err)) from None
            _apply_move(session, action, "replay")
        with registry_lock:
            sessions[session.id] = session
        return _session_payload(session)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = lookup(sid)
        with session.lock:
            return _session_payload(session)

    @app.post("/sessions/{sid}/moves")
    def human_move(sid: str, body: MoveModel):
        if (body.move is None) == (body.action is None):
            raise HTTPException(status_code=422, detail="provide exactly one of move, action")
        session = lookup(sid)
        with session.lock:
            game = session.game
            if game.is_terminal(session.state):
                raise HTTPException(status_code=409, detail="game is over")
            if session.state.to_move != session.human:
                raise HTTPException(status_code=409, detail="not the human's turn")
            if body.move is not None:
                try:
                    action = game.parse_move(body.move)
                except MoveParseError as err:
                    raise HTTPException(status_code=422, detail=str(err)) from None
            else:
                action = body.action
            _apply_move(session, action, "human")
            return _session_payload(session)

    @app.post("/sessions/{sid}/ai-move")
    def ai_move(sid: str):
        session = lookup(sid)
        with session.lock:
            game = session.game
            if game.is_terminal(session.state):
                raise HTTPException(status_code=409, detail="game is over")
            if session.state.to_move == session.human:
                raise HTTPException(status_code=409, detail="it is the human's turn")
            ai = session.ai
            params = SearchParams(
                ai.n_sims,
                ai.c,
                derived_seed(session.seed, len(session.history)),
                Algorithm(ai.algorithm),
            )
            t0 = time.perf_counter()
            result = run_search(game, session.state, params, session.evaluator)
            wall = time.perf_counter() - t0
            action = result.best_action()
            session.last_ai = {
                "action": int(action),
                "name": game.action_name(int(action)),
                "value": float(result.value),
                "policy": [float(x) for x in result.policy],
                "q": [float(x) for x in result.q],
                "counts": [int(x) for x in result.counts],
                "wall_time": wall,
                "eval_calls": result.stats.eval_calls,
                "eval_items": result.stats.eval_items,
                "algorithm": ai.algorithm,
                "n_sims": ai.n_sims,
            }
            _apply_move(session, action, "ai")
            return _session_payload(session)

    mount_dir = Path(frontend_dir) if frontend_dir else Path(__file__).parents[2] / "frontend" / "dist"
    if mount_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=mount_dir, html=True), name="frontend")
    else:

        @app.get("/")
        def index():
            return {"service": "gamesearch", "endpoints": ["/sessions"]}

    return app
