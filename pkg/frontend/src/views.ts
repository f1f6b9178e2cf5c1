// Pure view models derived from a session payload. The DOM layer renders
// these; keeping them data-only makes board geometry and move wiring
// testable without a browser.

import type { AiDiagnostics, GameInfo, SessionView } from "./types";
import type { Phase } from "./state";

export interface CellView {
  value: number; // 0 empty, 1 P1, 2 P2
  action: number | null; // playable action id, null when not a legal target
}

export interface EdgeView {
  drawn: boolean;
  action: number | null;
}

export type BoardView =
  | { kind: "columns"; rows: number; cols: number; cells: CellView[][] }
  | { kind: "grid"; rows: number; cols: number; cells: CellView[][]; passAction: number | null }
  | {
      kind: "edges";
      boxRows: number;
      boxCols: number;
      hEdges: EdgeView[][];
      vEdges: EdgeView[][];
      boxes: number[][];
    };

export function buildBoardView(session: SessionView): BoardView {
  const board = session.board;
  const legal = new Set(session.legal_moves.map((m) => m.action));
  const byName = new Map(session.legal_moves.map((m) => [m.name, m.action]));

  if (board.type === "columns") {
    // Any cell in a legal column drops a piece into that column.
    const cells = board.cells.map((row) =>
      row.map((value, c) => ({ value, action: legal.has(c) ? c : null })),
    );
    return { kind: "columns", rows: board.rows, cols: board.cols, cells };
  }

  if (board.type === "grid") {
    const cells = board.cells.map((row, r) =>
      row.map((value, c) => {
        const action = r * board.cols + c;
        return { value, action: legal.has(action) ? action : null };
      }),
    );
    return {
      kind: "grid",
      rows: board.rows,
      cols: board.cols,
      cells,
      passAction: legal.has(board.pass_action) ? board.pass_action : null,
    };
  }

  const hEdges = board.h_edges.map((row, r) =>
    row.map((drawn, c) => ({
      drawn: drawn === 1,
      action: byName.get(`h ${r} ${c}`) ?? null,
    })),
  );
  const vEdges = board.v_edges.map((row, r) =>
    row.map((drawn, c) => ({
      drawn: drawn === 1,
      action: byName.get(`v ${r} ${c}`) ?? null,
    })),
  );
  return {
    kind: "edges",
    boxRows: board.box_rows,
    boxCols: board.box_cols,
    hEdges,
    vEdges,
    boxes: board.boxes,
  };
}

export function actionLabel(game: GameInfo, action: number): string {
  if (game.kind === "connect4") {
    return String(action + 1);
  }
  if (game.kind === "othello") {
    const n = game.width;
    if (action === n * n) return "pass";
    const r = Math.floor(action / n);
    const c = action % n;
    return `${String.fromCharCode(97 + c)}${r + 1}`;
  }
  return `#${action}`;
}

export interface PolicyBar {
  action: number;
  label: string;
  policy: number;
  count: number;
  q: number;
  chosen: boolean;
}

export function policyBars(ai: AiDiagnostics, game: GameInfo, limit = 12): PolicyBar[] {
  const bars: PolicyBar[] = [];
  for (let a = 0; a < ai.policy.length; a++) {
    const bar = {
      action: a,
      label: actionLabel(game, a),
      policy: ai.policy[a],
      count: ai.counts[a],
      q: ai.q[a],
      chosen: a === ai.action,
    };
    if (bar.policy > 1e-4 || bar.count > 0 || bar.chosen) bars.push(bar);
  }
  bars.sort((x, y) => y.policy - x.policy);
  return bars.slice(0, limit);
}

export function statusLine(phase: Phase, session: SessionView | null): string {
  switch (phase) {
    case "idle":
      return "Configure a game and press New game.";
    case "awaiting-human":
      return "Your move.";
    case "submitting":
      return "Sending move...";
    case "awaiting-ai":
      return "AI is thinking...";
    case "game-over":
      return session ? scoreText(session) : "Game over.";
  }
}

export function scoreText(session: SessionView): string {
  const p1 = session.score ?? 0;
  const human = session.human_player === "P1" ? p1 : -p1;
  if (human === 0) return "Draw.";
  const margin = Number.isInteger(human) ? Math.abs(human) : Math.abs(human).toFixed(1);
  return human > 0 ? `You won by ${margin}.` : `AI won by ${margin}.`;
}
