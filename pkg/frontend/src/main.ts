import { ApiClient } from "./api";
import { GameStore } from "./state";
import { renderAiMeta, renderBoard, renderHistory, renderPolicy } from "./render";
import { buildBoardView, policyBars, statusLine } from "./views";
import type { AlgorithmName, GameKindName, NewSessionRequest, PlayerName } from "./types";

const store = new GameStore(new ApiClient());

const boardEl = document.getElementById("board")!;
const statusEl = document.getElementById("status")!;
const errorTextEl = document.getElementById("error-text")!;
const errorEl = document.getElementById("error")!;
const retryButton = document.getElementById("retry-button") as HTMLButtonElement;
const passButton = document.getElementById("pass-button") as HTMLButtonElement;
const aiMetaEl = document.getElementById("ai-meta")!;
const policyEl = document.getElementById("policy")!;
const historyEl = document.getElementById("history")!;
const form = document.getElementById("new-game") as HTMLFormElement;
const gameSelect = form.elements.namedItem("game") as HTMLSelectElement;

function render(): void {
  const session = store.session;
  statusEl.textContent = statusLine(store.phase, session);
  statusEl.className = `status status-${store.phase}`;
  errorEl.hidden = store.error === null;
  errorTextEl.textContent = store.error ?? "";
  retryButton.hidden = store.phase !== "awaiting-ai";
  boardEl.classList.toggle("locked", store.phase !== "awaiting-human");

  if (!session) {
    renderBoard(boardEl, null, () => {});
    passButton.hidden = true;
    renderAiMeta(aiMetaEl, null);
    renderPolicy(policyEl, []);
    renderHistory(historyEl, []);
    return;
  }

  const view = buildBoardView(session);
  renderBoard(boardEl, view, (action) => void store.playHuman(action));
  const pass = view.kind === "grid" ? view.passAction : null;
  passButton.hidden = pass === null || store.phase !== "awaiting-human";
  passButton.onclick = pass === null ? null : () => void store.playHuman(pass);
  renderAiMeta(aiMetaEl, session.last_ai);
  renderPolicy(policyEl, session.last_ai ? policyBars(session.last_ai, session.game) : []);
  renderHistory(historyEl, session.history);
  if (location.hash !== `#s=${session.id}`) {
    history.replaceState(null, "", `#s=${session.id}`);
  }
}

function numberField(data: FormData, name: string): number | undefined {
  const raw = (data.get(name) as string | null) ?? "";
  if (raw.trim() === "") return undefined;
  const value = Number(raw);
  return Number.isFinite(value) ? value : undefined;
}

function requestFromForm(data: FormData): NewSessionRequest {
  const game = data.get("game") as GameKindName;
  const req: NewSessionRequest = {
    game,
    human_player: data.get("human_player") as PlayerName,
    ai: {
      algorithm: data.get("algorithm") as AlgorithmName,
      n_sims: numberField(data, "n_sims") ?? 256,
      c: numberField(data, "c") ?? 1.0,
      evaluator: (data.get("evaluator") as string) || "heuristic",
    },
    // blank seed -> a fresh random one, so replaying an opening still
    // gets varied AI play; the id in the URL hash pins the session anyway
    seed: numberField(data, "seed") ?? Math.floor(Math.random() * 0x7fffffff),
  };
  const width = numberField(data, "width");
  const height = numberField(data, "height");
  if (width !== undefined) req.width = width;
  if (game === "othello") {
    if (width !== undefined) req.height = width; // board is square
  } else if (height !== undefined) {
    req.height = height;
  }
  if (game === "connect4") {
    const k = numberField(data, "connect_k");
    if (k !== undefined) req.connect_k = k;
  }
  return req;
}

form.addEventListener("submit", (event) => {
  event.preventDefault();
  void store.newGame(requestFromForm(new FormData(form)));
});

gameSelect.addEventListener("change", () => {
  form.dataset.game = gameSelect.value;
});
form.dataset.game = gameSelect.value;

retryButton.addEventListener("click", () => void store.requestAiMove());

store.subscribe(render);
render();

const resume = /^#s=([0-9a-f]+)$/.exec(location.hash);
if (resume) {
  void store.resume(resume[1]);
}
