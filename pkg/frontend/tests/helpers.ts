import type { SessionView } from "../src/types";

export function emptyCells(rows: number, cols: number): number[][] {
  return Array.from({ length: rows }, () => Array(cols).fill(0));
}

export function makeSession(partial: Partial<SessionView> = {}): SessionView {
  return {
    id: "s1",
    game: { kind: "connect4", width: 7, height: 6, connect_k: 4, action_space: 7, max_score: 1 },
    human_player: "P1",
    ai: { algorithm: "rmcts", n_sims: 256, c: 1.0, evaluator: "heuristic" },
    status: "in_progress",
    to_move: "P1",
    score: null,
    board: { type: "columns", rows: 6, cols: 7, cells: emptyCells(6, 7) },
    rendered: "",
    legal_moves: Array.from({ length: 7 }, (_, a) => ({ action: a, name: String(a + 1) })),
    history: [],
    last_ai: null,
    ...partial,
  };
}
