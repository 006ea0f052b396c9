/** Typed client for the desktwin service endpoints (JSON + PNG frames). */

export interface SceneSnapshot {
  assets: AssetRecord[];
  environment: EnvironmentState;
  anchors: Record<string, [number, number, number]>;
  catalog_ref: string | null;
}

export interface AssetRecord {
  id: string;
  class_name: string;
  representation: { kind: string; path: string };
  pose: { rotation: number[][]; translation: number[] };
  uniform_scale: number;
  properties: Record<string, unknown>;
  created_by: string;
}

export interface EnvironmentState {
  time_of_day: number;
  weather: "clear" | "fog" | "rain" | "snow";
  intensity: number;
}

export interface DiffDict {
  provenance: string;
  edits: Record<string, unknown>[];
}

export interface TraceStage {
  name: string;
  status: string;
  seconds: number;
  detail: string;
}

export interface TraceDict {
  raw_prompt: string;
  requirements: { intent: string; detail: string }[];
  stages: TraceStage[];
  worker_outcomes: Record<string, unknown>[];
  total_seconds: number;
}

export interface PromptResponse {
  pending_diff: DiffDict;
  summary: string;
  trace: TraceDict;
  revision: number;
}

export interface SceneResponse {
  scene: SceneSnapshot;
  revision: number;
  history: { prompt: string; status: string; summary: string }[];
  pending: DiffDict | null;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

/** One logical call, recorded for deterministic replay. */
export interface LogEntry {
  method: "GET" | "POST";
  path: string; // with "{sid}" placeholder for the session id
  body?: unknown;
}

export class Api {
  readonly log: LogEntry[] = [];

  constructor(readonly baseUrl: string) {}

  private async request<T>(method: "GET" | "POST", path: string,
                           body?: unknown, sid?: string): Promise<T> {
    this.log.push({ method, path, body });
    const concrete = sid === undefined ? path : path.replaceAll("{sid}", sid);
    const resp = await fetch(this.baseUrl + concrete, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      throw new ApiError(resp.status, payload?.detail ?? payload);
    }
    return payload as T;
  }

  createSession(): Promise<{ session_id: string; revision: number }> {
    return this.request("POST", "/sessions");
  }

  prompt(sid: string, text: string): Promise<PromptResponse> {
    return this.request("POST", "/sessions/{sid}/prompt", { text }, sid);
  }

  accept(sid: string): Promise<{ applied: DiffDict; revision: number }> {
    return this.request("POST", "/sessions/{sid}/accept", undefined, sid);
  }

  reject(sid: string): Promise<{ revision: number }> {
    return this.request("POST", "/sessions/{sid}/reject", undefined, sid);
  }

  scene(sid: string): Promise<SceneResponse> {
    return this.request("GET", "/sessions/{sid}/scene", undefined, sid);
  }

  edit(sid: string, edit: Record<string, unknown>):
      Promise<{ diff: DiffDict; revision: number }> {
    return this.request("POST", "/sessions/{sid}/edit", edit, sid);
  }

  /** URL for a rendered frame; fetched by the viewer's <img> element. */
  renderUrl(sid: string, params: Record<string, number>): string {
    const query = Object.entries(params)
      .map(([k, v]) => `${k}=${encodeURIComponent(v)}`)
      .join("&");
    return `${this.baseUrl}/sessions/${sid}/render?${query}`;
  }

  async renderFrame(sid: string, params: Record<string, number>):
      Promise<{ bytes: ArrayBuffer; revision: number }> {
    const resp = await fetch(this.renderUrl(sid, params));
    if (!resp.ok) {
      throw new ApiError(resp.status, await resp.text());
    }
    return {
      bytes: await resp.arrayBuffer(),
      revision: Number(resp.headers.get("X-Scene-Revision") ?? -1),
    };
  }
}

/**
 * Replay a recorded log against a fresh server session; the final scene must
 * reproduce, because the UI never mutates state client-side.
 */
export async function replayLog(api: Api, log: LogEntry[]):
    Promise<SceneSnapshot | null> {
  let sid: string | null = null;
  let lastScene: SceneSnapshot | null = null;
  for (const entry of log) {
    if (entry.method === "POST" && entry.path === "/sessions") {
      const res = await api.createSession();
      sid = res.session_id;
      continue;
    }
    if (sid === null) {
      throw new Error("log does not start with session creation");
    }
    const concrete = entry.path.replaceAll("{sid}", sid);
    const resp = await fetch(api.baseUrl + concrete, {
      method: entry.method,
      headers: entry.body === undefined
        ? {} : { "Content-Type": "application/json" },
      body: entry.body === undefined ? undefined : JSON.stringify(entry.body),
    });
    if (entry.path === "/sessions/{sid}/scene" && resp.ok) {
      lastScene = (await resp.json()).scene as SceneSnapshot;
    }
  }
  if (sid !== null && lastScene === null) {
    const res = await api.scene(sid);
    lastScene = res.scene;
  }
  return lastScene;
}
