import { describe, expect, it, vi } from "vitest";
import type { ApiLike } from "../src/api";
import { GameStore } from "../src/state";
import type { SessionView } from "../src/types";
import { makeSession } from "./helpers";

function fakeApi(overrides: Partial<ApiLike> = {}): ApiLike {
  return {
    createSession: vi.fn(async () => makeSession()),
    getSession: vi.fn(async () => makeSession()),
    playMove: vi.fn(async () => makeSession()),
    aiMove: vi.fn(async () => makeSession()),
    ...overrides,
  };
}

describe("GameStore", () => {
  it("waits for the human when a new game opens on their turn", async () => {
    const api = fakeApi();
    const store = new GameStore(api);
    await store.newGame({ game: "connect4" });
    expect(store.phase).toBe("awaiting-human");
    expect(store.session?.id).toBe("s1");
    expect(api.aiMove).not.toHaveBeenCalled();
  });

  it("runs the AI automatically when it holds the opening move", async () => {
    const api = fakeApi({
      createSession: vi.fn(async () => makeSession({ human_player: "P2" })),
      aiMove: vi.fn(async () => makeSession({ human_player: "P2", to_move: "P2" })),
    });
    const store = new GameStore(api);
    await store.newGame({ human_player: "P2" });
    expect(api.aiMove).toHaveBeenCalledTimes(1);
    expect(api.aiMove).toHaveBeenCalledWith("s1");
    expect(store.phase).toBe("awaiting-human");
  });

  it("plays a human move and then the AI reply", async () => {
    const api = fakeApi({
      playMove: vi.fn(async () => makeSession({ to_move: "P2" })),
      aiMove: vi.fn(async () => makeSession({ to_move: "P1" })),
    });
    const store = new GameStore(api);
    await store.newGame({});
    await store.playHuman(3);
    expect(api.playMove).toHaveBeenCalledWith("s1", { action: 3 });
    expect(api.aiMove).toHaveBeenCalledTimes(1);
    expect(store.phase).toBe("awaiting-human");
  });

  it("keeps requesting AI moves while the AI holds the turn", async () => {
    // extra-turn games: the first AI reply leaves the AI on the move again
    const aiMove = vi
      .fn<[], Promise<SessionView>>()
      .mockResolvedValueOnce(makeSession({ to_move: "P2" }))
      .mockResolvedValueOnce(makeSession({ to_move: "P1" }));
    const api = fakeApi({
      playMove: vi.fn(async () => makeSession({ to_move: "P2" })),
      aiMove,
    });
    const store = new GameStore(api);
    await store.newGame({});
    await store.playHuman(0);
    expect(aiMove).toHaveBeenCalledTimes(2);
    expect(store.phase).toBe("awaiting-human");
  });

  it("stops at game over without asking the AI to move", async () => {
    const api = fakeApi({
      playMove: vi.fn(async () =>
        makeSession({ status: "finished", to_move: null, score: 1.0, legal_moves: [] }),
      ),
    });
    const store = new GameStore(api);
    await store.newGame({});
    await store.playHuman(0);
    expect(store.phase).toBe("game-over");
    expect(api.aiMove).not.toHaveBeenCalled();
  });

  it("ignores board clicks when it is not the human's turn", async () => {
    const api = fakeApi({
      createSession: vi.fn(async () => makeSession({ to_move: "P2" })),
    });
    const store = new GameStore(api, false);
    await store.newGame({});
    expect(store.phase).toBe("awaiting-ai");
    await store.playHuman(0);
    expect(api.playMove).not.toHaveBeenCalled();
  });

  it("allows only one request in flight", async () => {
    let release: (session: SessionView) => void = () => {};
    const playMove = vi.fn(
      () => new Promise<SessionView>((resolve) => (release = resolve)),
    );
    const api = fakeApi({ playMove });
    const store = new GameStore(api);
    await store.newGame({});
    const first = store.playHuman(0);
    await store.playHuman(1); // phase is "submitting": dropped
    release(makeSession());
    await first;
    expect(playMove).toHaveBeenCalledTimes(1);
    expect(playMove).toHaveBeenCalledWith("s1", { action: 0 });
  });

  it("surfaces move rejections and restores the turn", async () => {
    const api = fakeApi({
      playMove: vi.fn(async () => {
        throw new Error("column 1 is full");
      }),
    });
    const store = new GameStore(api);
    await store.newGame({});
    await store.playHuman(0);
    expect(store.error).toBe("column 1 is full");
    expect(store.phase).toBe("awaiting-human");
    expect(store.session?.id).toBe("s1");
    expect(api.aiMove).not.toHaveBeenCalled();
  });

  it("leaves a failed AI move retryable", async () => {
    const aiMove = vi
      .fn<[], Promise<SessionView>>()
      .mockRejectedValueOnce(new Error("evaluator crashed"))
      .mockResolvedValueOnce(makeSession({ human_player: "P2", to_move: "P2" }));
    const api = fakeApi({
      createSession: vi.fn(async () => makeSession({ human_player: "P2" })),
      aiMove,
    });
    const store = new GameStore(api);
    await store.newGame({});
    expect(store.error).toBe("evaluator crashed");
    expect(store.phase).toBe("awaiting-ai");
    await store.requestAiMove();
    expect(store.error).toBeNull();
    expect(store.phase).toBe("awaiting-human");
    expect(aiMove).toHaveBeenCalledTimes(2);
  });

  it("resumes an existing session by id", async () => {
    const api = fakeApi({
      getSession: vi.fn(async () =>
        makeSession({ id: "old", status: "finished", to_move: null, score: 0 }),
      ),
    });
    const store = new GameStore(api);
    await store.resume("old");
    expect(api.getSession).toHaveBeenCalledWith("old");
    expect(store.phase).toBe("game-over");
  });

  it("notifies subscribers across the submit cycle", async () => {
    const api = fakeApi({
      playMove: vi.fn(async () => makeSession({ to_move: "P2" })),
    });
    const store = new GameStore(api, false);
    await store.newGame({});
    const phases: string[] = [];
    const unsubscribe = store.subscribe(() => phases.push(store.phase));
    await store.playHuman(2);
    unsubscribe();
    expect(phases).toEqual(["submitting", "awaiting-ai"]);
  });

  it("reports creation failures", async () => {
    const api = fakeApi({
      createSession: vi.fn(async () => {
        throw new Error("unknown evaluator 'tablebase'");
      }),
    });
    const store = new GameStore(api);
    await store.newGame({});
    expect(store.error).toBe("unknown evaluator 'tablebase'");
    expect(store.phase).toBe("idle");
    expect(store.session).toBeNull();
  });
});
