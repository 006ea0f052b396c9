import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api.js";
import { ConsoleController } from "../src/state.js";

/** In-memory fake of the service, faithful to its status codes. */
class FakeApi extends Api {
  revision = 0;
  pending: string | null = null;
  weather = "clear";
  failBackend = false;

  constructor() {
    super("http://fake");
  }

  override async createSession() {
    return { session_id: "s1", revision: this.revision };
  }

  override async prompt(_sid: string, text: string) {
    if (this.failBackend) {
      throw new ApiError(502, "chat backend failure");
    }
    if (this.pending !== null) {
      throw new ApiError(409, "a pending diff already exists");
    }
    this.pending = text;
    return {
      pending_diff: { provenance: `prompt:${text}`, edits: [] },
      summary: `staged: ${text}`,
      trace: {
        raw_prompt: text, requirements: [], stages: [],
        worker_outcomes: [], total_seconds: 0.01,
      },
      revision: this.revision,
    };
  }

  override async accept(_sid: string) {
    if (this.pending === null) {
      throw new ApiError(409, "no pending diff");
    }
    if (this.pending.includes("rain")) {
      this.weather = "rain";
    }
    this.pending = null;
    this.revision += 1;
    return { applied: { provenance: "x", edits: [] }, revision: this.revision };
  }

  override async reject(_sid: string) {
    if (this.pending === null) {
      throw new ApiError(409, "no pending diff");
    }
    this.pending = null;
    return { revision: this.revision };
  }

  override async scene(_sid: string) {
    return {
      scene: {
        assets: [],
        environment: { time_of_day: 12, weather: this.weather, intensity: 0 },
        anchors: { scene_center: [0, 0, 0] as [number, number, number] },
        catalog_ref: null,
      },
      revision: this.revision,
      history: [],
      pending: null,
    };
  }

  override async edit(_sid: string, _edit: Record<string, unknown>) {
    this.revision += 1;
    return { diff: { provenance: "direct", edits: [] },
             revision: this.revision };
  }
}

async function started(): Promise<[ConsoleController, FakeApi]> {
  const api = new FakeApi();
  const controller = new ConsoleController(api);
  await controller.start();
  return [controller, api];
}

describe("prompt lifecycle", () => {
  it("stages, then accepts and refreshes the scene", async () => {
    const [c] = await started();
    expect(await c.submitPrompt("Make it rain.")).toBe(true);
    expect(c.state.prompts[0].status).toBe("staged");
    expect(c.state.pendingSummary).toContain("rain");
    await c.accept();
    expect(c.state.prompts[0].status).toBe("accepted");
    expect(c.state.pendingSummary).toBeNull();
    expect(c.state.scene?.environment.weather).toBe("rain");
    expect(c.state.revision).toBe(1);
  });

  it("reject clears pending without changing the revision", async () => {
    const [c] = await started();
    await c.submitPrompt("Let it snow.");
    const before = c.state.revision;
    await c.reject();
    expect(c.state.prompts[0].status).toBe("rejected");
    expect(c.state.revision).toBe(before);
  });

  it("surfaces 409 as a banner without recording a new prompt", async () => {
    const [c] = await started();
    await c.submitPrompt("first");
    expect(await c.submitPrompt("second")).toBe(false);
    expect(c.state.banner).toContain("staged diff");
    expect(c.state.prompts.length).toBe(1); // typed text not swallowed
  });

  it("surfaces 502 as a backend banner with an error record", async () => {
    const [c, api] = await started();
    api.failBackend = true;
    expect(await c.submitPrompt("anything")).toBe(false);
    expect(c.state.banner).toContain("backend");
    expect(c.state.prompts[0].status).toBe("error");
  });
});

describe("environment edits", () => {
  it("round-trips through the server and bumps the revision", async () => {
    const [c] = await started();
    const before = c.state.revision;
    await c.setEnvironment({ time_of_day: 22, weather: "clear", intensity: 0 });
    expect(c.state.revision).toBe(before + 1);
  });
});

describe("camera", () => {
  it("produces a stable frame URL for fixed orbit state", async () => {
    const [c] = await started();
    const a = c.frameUrl();
    const b = c.frameUrl();
    expect(a).toBe(b);
    expect(a).toContain("/sessions/s1/render?");
  });
});
