// Wire types for the play service. Field names mirror the JSON payloads.

export type PlayerName = "P1" | "P2";
export type AlgorithmName = "ucb" | "rmcts";
export type GameKindName = "connect4" | "othello" | "dotsandboxes";

export interface AiSettings {
  algorithm: AlgorithmName;
  n_sims: number;
  c: number;
  evaluator: string;
}

export interface NewSessionRequest {
  game?: GameKindName;
  width?: number;
  height?: number;
  connect_k?: number;
  human_player?: PlayerName;
  ai?: Partial<AiSettings>;
  seed?: number;
  moves?: string[];
}

export interface GameInfo {
  kind: GameKindName;
  width: number;
  height: number;
  connect_k: number;
  action_space: number;
  max_score: number;
}

export interface LegalMove {
  action: number;
  name: string;
}

export interface HistoryEntry {
  ply: number;
  player: PlayerName;
  action: number;
  name: string;
  by: "replay" | "human" | "ai";
}

export interface AiDiagnostics {
  action: number;
  name: string;
  value: number;
  policy: number[];
  q: number[];
  counts: number[];
  wall_time: number;
  eval_calls: number;
  eval_items: number;
  algorithm: AlgorithmName;
  n_sims: number;
}

// Cell values everywhere: 0 empty, 1 P1, 2 P2.
export interface ColumnsBoard {
  type: "columns";
  rows: number;
  cols: number;
  cells: number[][]; // top row first
}

export interface GridBoard {
  type: "grid";
  rows: number;
  cols: number;
  cells: number[][];
  pass_action: number;
}

export interface EdgesBoard {
  type: "edges";
  box_rows: number;
  box_cols: number;
  h_edges: number[][]; // (box_rows+1) x box_cols
  v_edges: number[][]; // box_rows x (box_cols+1)
  boxes: number[][];
}

export type BoardPayload = ColumnsBoard | GridBoard | EdgesBoard;

export interface SessionView {
  id: string;
  game: GameInfo;
  human_player: PlayerName;
  ai: AiSettings;
  status: "in_progress" | "finished";
  to_move: PlayerName | null;
  score: number | null; // P1's terminal score
  board: BoardPayload;
  rendered: string;
  legal_moves: LegalMove[];
  history: HistoryEntry[];
  last_ai: AiDiagnostics | null;
}
