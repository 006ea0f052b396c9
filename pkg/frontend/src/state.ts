/**
 * Console state and controller: every state change is a server round-trip;
 * the client never mutates scene data locally. The controller tracks prompt
 * history with per-prompt status, the current pending diff, the scene
 * revision, and the orbit camera the viewer polls with.
 */

import { Api, ApiError, DiffDict, SceneSnapshot, TraceDict } from "./api.js";
import { OrbitState, cameraParams } from "./camera.js";

export type PromptStatus = "staged" | "accepted" | "rejected" | "error";

export interface PromptRecord {
  text: string;
  status: PromptStatus;
  summary: string;
  trace: TraceDict | null;
  error: string | null;
}

export interface ConsoleState {
  sessionId: string | null;
  revision: number;
  prompts: PromptRecord[];
  pendingSummary: string | null;
  pendingDiff: DiffDict | null;
  banner: string | null;
  scene: SceneSnapshot | null;
  orbit: OrbitState;
}

export class ConsoleController {
  state: ConsoleState;

  constructor(readonly api: Api) {
    this.state = {
      sessionId: null,
      revision: -1,
      prompts: [],
      pendingSummary: null,
      pendingDiff: null,
      banner: null,
      scene: null,
      orbit: {
        azimuthDeg: 225, elevationDeg: 35, distance: 18,
        target: [0, 0, 0], width: 320, height: 240,
      },
    };
  }

  private get sid(): string {
    if (this.state.sessionId === null) {
      throw new Error("no active session");
    }
    return this.state.sessionId;
  }

  async start(): Promise<void> {
    const res = await this.api.createSession();
    this.state.sessionId = res.session_id;
    this.state.revision = res.revision;
    await this.refreshScene();
  }

  async refreshScene(): Promise<void> {
    const res = await this.api.scene(this.sid);
    this.state.scene = res.scene;
    this.state.revision = res.revision;
  }

  /** Submit a prompt; on 409/502 the banner is set and the text preserved. */
  async submitPrompt(text: string): Promise<boolean> {
    this.state.banner = null;
    try {
      const res = await this.api.prompt(this.sid, text);
      this.state.prompts.push({
        text, status: "staged", summary: res.summary,
        trace: res.trace, error: null,
      });
      this.state.pendingSummary = res.summary;
      this.state.pendingDiff = res.pending_diff;
      this.state.revision = res.revision;
      return true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.banner = err.status === 409
          ? "a staged diff is awaiting accept/reject"
          : err.status === 502
            ? "chat backend failure"
            : `request failed (${err.status})`;
        if (err.status !== 409) {
          this.state.prompts.push({
            text, status: "error", summary: "",
            trace: null, error: String(err.detail ?? err.message),
          });
        }
        return false;
      }
      throw err;
    }
  }

  private lastStaged(): PromptRecord | null {
    for (let i = this.state.prompts.length - 1; i >= 0; i--) {
      if (this.state.prompts[i].status === "staged") {
        return this.state.prompts[i];
      }
    }
    return null;
  }

  async accept(): Promise<void> {
    const res = await this.api.accept(this.sid);
    this.state.revision = res.revision;
    const rec = this.lastStaged();
    if (rec !== null) {
      rec.status = "accepted";
    }
    this.state.pendingSummary = null;
    this.state.pendingDiff = null;
    await this.refreshScene();
  }

  async reject(): Promise<void> {
    const res = await this.api.reject(this.sid);
    this.state.revision = res.revision;
    const rec = this.lastStaged();
    if (rec !== null) {
      rec.status = "rejected";
    }
    this.state.pendingSummary = null;
    this.state.pendingDiff = null;
  }

  /** Direct environment edits used by the weather selector / time slider. */
  async setEnvironment(env: { time_of_day: number; weather: string;
                              intensity: number }): Promise<void> {
    const res = await this.api.edit(this.sid, {
      op: "set_environment", environment: env,
    });
    this.state.revision = res.revision;
    await this.refreshScene();
  }

  frameParams(): Record<string, number> {
    return cameraParams(this.state.orbit);
  }

  frameUrl(): string {
    return this.api.renderUrl(this.sid, this.frameParams());
  }
}

/** The fixture projection: a scene snapshot minus its catalog reference. */
export function sceneEssence(scene: SceneSnapshot): unknown {
  return {
    assets: scene.assets,
    environment: scene.environment,
    anchors: scene.anchors,
  };
}
