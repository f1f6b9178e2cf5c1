// DOM layer: paints the pure view models from views.ts into containers.

import type { AiDiagnostics, HistoryEntry } from "./types";
import type { BoardView, EdgeView, PolicyBar } from "./views";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBoard(
  container: HTMLElement,
  view: BoardView | null,
  onAction: (action: number) => void,
): void {
  container.textContent = "";
  if (!view) {
    container.appendChild(el("p", "placeholder", "No game in progress."));
    return;
  }

  if (view.kind === "columns" || view.kind === "grid") {
    const board = el("div", `board board-${view.kind}`);
    board.style.gridTemplateColumns = `repeat(${view.cols}, var(--cell))`;
    for (const row of view.cells) {
      for (const cell of row) {
        const div = el("div", "cell");
        if (cell.value) div.classList.add(`p${cell.value}`);
        if (cell.action !== null) {
          const action = cell.action;
          div.classList.add("playable");
          div.addEventListener("click", () => onAction(action));
        }
        board.appendChild(div);
      }
    }
    container.appendChild(board);
    return;
  }

  // Dots-and-boxes: interleave dots, edges and boxes on a (2h+1) x (2w+1) grid.
  const rows = 2 * view.boxRows + 1;
  const cols = 2 * view.boxCols + 1;
  const board = el("div", "board board-edges");
  const track = (n: number) =>
    Array.from({ length: n }, (_, i) => (i % 2 === 0 ? "var(--dot)" : "var(--cell)")).join(" ");
  board.style.gridTemplateColumns = track(cols);
  board.style.gridTemplateRows = track(rows);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      if (r % 2 === 0 && c % 2 === 0) {
        board.appendChild(el("div", "dot"));
      } else if (r % 2 === 0) {
        board.appendChild(edgeDiv(view.hEdges[r / 2][(c - 1) / 2], "edge edge-h", onAction));
      } else if (c % 2 === 0) {
        board.appendChild(edgeDiv(view.vEdges[(r - 1) / 2][c / 2], "edge edge-v", onAction));
      } else {
        const owner = view.boxes[(r - 1) / 2][(c - 1) / 2];
        board.appendChild(el("div", owner ? `boxcell p${owner}` : "boxcell"));
      }
    }
  }
  container.appendChild(board);
}

function edgeDiv(
  edge: EdgeView,
  className: string,
  onAction: (action: number) => void,
): HTMLElement {
  const div = el("div", className);
  if (edge.drawn) div.classList.add("drawn");
  if (edge.action !== null) {
    const action = edge.action;
    div.classList.add("playable");
    div.addEventListener("click", () => onAction(action));
  }
  return div;
}

export function renderPolicy(container: HTMLElement, bars: PolicyBar[]): void {
  container.textContent = "";
  if (bars.length === 0) {
    container.appendChild(el("p", "placeholder", "No search yet."));
    return;
  }
  const max = bars[0].policy || 1;
  for (const bar of bars) {
    const row = el("div", bar.chosen ? "policy-row chosen" : "policy-row");
    row.appendChild(el("span", "policy-label", bar.label));
    const trackDiv = el("div", "policy-track");
    const fill = el("div", "policy-fill");
    fill.style.width = `${((100 * bar.policy) / max).toFixed(1)}%`;
    trackDiv.appendChild(fill);
    row.appendChild(trackDiv);
    const sign = bar.q >= 0 ? "+" : "";
    row.appendChild(
      el(
        "span",
        "policy-meta",
        `${(100 * bar.policy).toFixed(1)}% n=${bar.count} q=${sign}${bar.q.toFixed(2)}`,
      ),
    );
    container.appendChild(row);
  }
}

export function renderAiMeta(container: HTMLElement, ai: AiDiagnostics | null): void {
  if (!ai) {
    container.textContent = "";
    return;
  }
  const sign = ai.value >= 0 ? "+" : "";
  container.textContent =
    `${ai.algorithm} (${ai.n_sims} sims) played ${ai.name}: ` +
    `value ${sign}${ai.value.toFixed(3)}, ` +
    `${ai.eval_calls} evaluator calls over ${ai.eval_items} positions, ` +
    `${ai.wall_time.toFixed(2)} s`;
}

export function renderHistory(container: HTMLElement, entries: HistoryEntry[]): void {
  container.textContent = "";
  for (const entry of entries) {
    const item = el("li", `by-${entry.by}`);
    item.appendChild(el("span", "history-player", entry.player));
    item.appendChild(el("span", "history-move", entry.name));
    item.appendChild(el("span", "history-by", entry.by));
    container.appendChild(item);
  }
  container.scrollTop = container.scrollHeight;
}
