import type { NewSessionRequest, SessionView } from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type MoveRequest = { action: number } | { move: string };

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ApiLike {
  createSession(req: NewSessionRequest): Promise<SessionView>;
  getSession(id: string): Promise<SessionView>;
  playMove(id: string, move: MoveRequest): Promise<SessionView>;
  aiMove(id: string): Promise<SessionView>;
}

export class ApiClient implements ApiLike {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return (await resp.json()) as T;
  }

  createSession(req: NewSessionRequest): Promise<SessionView> {
    return this.request("POST", "/sessions", req);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  playMove(id: string, move: MoveRequest): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/moves`, move);
  }

  aiMove(id: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/ai-move`);
  }
}

async function errorDetail(resp: Response): Promise<string> {
  // FastAPI errors carry {"detail": string | [...]}; anything else falls
  // back to the status line.
  const body: unknown = await resp.json().catch(() => null);
  if (body && typeof body === "object" && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    return typeof detail === "string" ? detail : JSON.stringify(detail);
  }
  return resp.statusText || `HTTP ${resp.status}`;
}
