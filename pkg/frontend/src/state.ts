// Session state machine. One request is in flight per store at most;
// after any successful update the store keeps requesting AI moves until
// the turn comes back to the human or the game ends (games with extra
// turns let the AI move several times in a row).

import type { ApiLike } from "./api";
import type { NewSessionRequest, SessionView } from "./types";

export type Phase = "idle" | "awaiting-human" | "submitting" | "awaiting-ai" | "game-over";

export class GameStore {
  phase: Phase = "idle";
  session: SessionView | null = null;
  error: string | null = null;

  private inflight = false;
  private listeners = new Set<() => void>();

  constructor(
    private readonly api: ApiLike,
    private readonly autoAi = true,
  ) {}

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private apply(session: SessionView): void {
    this.session = session;
    if (session.status === "finished") {
      this.phase = "game-over";
    } else if (session.to_move === session.human_player) {
      this.phase = "awaiting-human";
    } else {
      this.phase = "awaiting-ai";
    }
  }

  async newGame(req: NewSessionRequest): Promise<void> {
    if (this.inflight) return;
    this.inflight = true;
    this.error = null;
    this.phase = "idle";
    this.session = null;
    this.emit();
    try {
      this.apply(await this.api.createSession(req));
    } catch (err) {
      this.error = describe(err);
    } finally {
      this.inflight = false;
    }
    this.emit();
    await this.runAi();
  }

  async resume(id: string): Promise<void> {
    if (this.inflight) return;
    this.inflight = true;
    this.error = null;
    this.emit();
    try {
      this.apply(await this.api.getSession(id));
    } catch (err) {
      this.error = describe(err);
    } finally {
      this.inflight = false;
    }
    this.emit();
    await this.runAi();
  }

  async playHuman(action: number): Promise<void> {
    if (this.phase !== "awaiting-human" || this.inflight || !this.session) return;
    this.inflight = true;
    this.error = null;
    this.phase = "submitting";
    this.emit();
    try {
      this.apply(await this.api.playMove(this.session.id, { action }));
    } catch (err) {
      this.error = describe(err);
      this.apply(this.session); // restore the phase from the last good payload
    } finally {
      this.inflight = false;
    }
    this.emit();
    await this.runAi();
  }

  async requestAiMove(): Promise<void> {
    if (this.phase !== "awaiting-ai" || this.inflight || !this.session) return;
    this.inflight = true;
    this.error = null;
    this.emit();
    try {
      this.apply(await this.api.aiMove(this.session.id));
    } catch (err) {
      this.error = describe(err); // phase stays awaiting-ai; retry re-enters here
    } finally {
      this.inflight = false;
    }
    this.emit();
    await this.runAi();
  }

  private async runAi(): Promise<void> {
    if (this.autoAi && this.phase === "awaiting-ai" && this.error === null) {
      await this.requestAiMove();
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof Error) return err.message;
  return String(err);
}
