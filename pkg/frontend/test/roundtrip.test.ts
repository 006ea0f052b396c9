/**
 * Round trip against the real Python service: the scripted maintenance
 * sequence must land exactly on the frozen fixture the server-side
 * acceptance test produces, a rejected prompt must leave the revision
 * untouched, and replaying the recorded request log must reproduce the
 * final scene.
 */
import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Api, replayLog } from "../src/api.js";
import { ConsoleController, sceneEssence } from "../src/state.js";

const PORT = 8911;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(__dirname, "..", "..");

let server: ReturnType<typeof spawn> | null = null;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 200; i++) {
    try {
      const r = await fetch(`${BASE}/sessions/none/scene`);
      if (r.status === 404) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  const work = mkdtempSync(join(tmpdir(), "desktwin-ui-"));
  const made = spawnSync("python3", ["-m", "desktwin.cli", "make-assets", work],
                         { cwd: REPO_ROOT, encoding: "utf8" });
  if (made.status !== 0) {
    throw new Error(`make-assets failed: ${made.stderr}`);
  }
  server = spawn("python3", [
    "-m", "desktwin.cli", "serve",
    "--scene", join(work, "scene.json"),
    "--port", String(PORT),
  ], { cwd: REPO_ROOT, stdio: "ignore" });
  await waitForServer();
}, 120_000);

afterAll(() => {
  server?.kill();
});

describe("maintenance sequence (prompts g-i)", () => {
  it("matches the frozen server-side fixture after three accepts",
     async () => {
    const api = new Api(BASE);
    const controller = new ConsoleController(api);
    await controller.start();
    const prompts = [
      "Create cement rubble at the center of the scene.",
      "Add traffic cones to mark the maintenance.",
      "Also add road barriers around there.",
    ];
    for (const text of prompts) {
      expect(await controller.submitPrompt(text)).toBe(true);
      await controller.accept();
    }
    const statuses = controller.state.prompts.map((p) => p.status);
    expect(statuses).toEqual(["accepted", "accepted", "accepted"]);

    const fixture = JSON.parse(readFileSync(
      join(__dirname, "fixtures", "fig4_scene.json"), "utf8"));
    const got = JSON.parse(JSON.stringify(
      sceneEssence(controller.state.scene!)));
    expect(got).toEqual(fixture);
  }, 60_000);

  it("replaying the request log reproduces the final scene", async () => {
    const api = new Api(BASE);
    const controller = new ConsoleController(api);
    await controller.start();
    await controller.submitPrompt(
      "Create cement rubble at the center of the scene.");
    await controller.accept();
    await controller.submitPrompt("Make it rain.");
    await controller.accept();
    const want = JSON.stringify(sceneEssence(controller.state.scene!));

    const replayed = await replayLog(new Api(BASE), api.log);
    expect(replayed).not.toBeNull();
    expect(JSON.stringify(sceneEssence(replayed!))).toBe(want);
  }, 60_000);
});

describe("reject path", () => {
  it("leaves the revision and the rendered frame unchanged", async () => {
    const api = new Api(BASE);
    const controller = new ConsoleController(api);
    await controller.start();
    const sid = controller.state.sessionId!;
    const revBefore = controller.state.revision;
    const frameBefore = await api.renderFrame(sid, controller.frameParams());

    expect(await controller.submitPrompt("Let it snow.")).toBe(true);
    await controller.reject();
    expect(controller.state.revision).toBe(revBefore);
    expect(controller.state.prompts[0].status).toBe("rejected");

    const frameAfter = await api.renderFrame(sid, controller.frameParams());
    expect(frameAfter.revision).toBe(frameBefore.revision);
    expect(Buffer.from(frameAfter.bytes).equals(
      Buffer.from(frameBefore.bytes))).toBe(true);
  }, 60_000);
});

describe("viewer", () => {
  it("a full orbit never changes the revision", async () => {
    const api = new Api(BASE);
    const controller = new ConsoleController(api);
    await controller.start();
    const sid = controller.state.sessionId!;
    const revBefore = controller.state.revision;
    for (let az = 0; az < 360; az += 60) {
      controller.state.orbit.azimuthDeg = az;
      const frame = await api.renderFrame(sid, controller.frameParams());
      expect(frame.revision).toBe(revBefore);
    }
    await controller.refreshScene();
    expect(controller.state.revision).toBe(revBefore);
  }, 60_000);

  it("weather and time edits round-trip through /edit and bump the revision",
     async () => {
    const api = new Api(BASE);
    const controller = new ConsoleController(api);
    await controller.start();
    const revBefore = controller.state.revision;
    await controller.setEnvironment(
      { time_of_day: 22.0, weather: "rain", intensity: 0.5 });
    expect(controller.state.revision).toBeGreaterThan(revBefore);
    expect(controller.state.scene!.environment.weather).toBe("rain");
    expect(controller.state.scene!.environment.time_of_day).toBe(22.0);
  }, 60_000);
});
