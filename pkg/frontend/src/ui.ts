/**
 * DOM layer: prompt panel with accept/reject, collapsible trace, polling
 * viewer with drag-to-orbit, and an environment panel (weather selector and
 * time-of-day slider) backed by direct edits. Rendering is pull-based: at
 * most one frame request is in flight, and polling pauses while one is.
 */

import { TraceDict } from "./api.js";
import { ConsoleController } from "./state.js";

const WEATHERS = ["clear", "fog", "rain", "snow"] as const;

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, attrs: Record<string, string> = {}, text = ""):
    HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

function traceBlock(trace: TraceDict): HTMLElement {
  const details = el("details", { class: "trace" });
  details.appendChild(el("summary", {},
    `trace: ${trace.stages.length} stages, `
    + `${trace.total_seconds.toFixed(2)}s`));
  for (const stage of trace.stages) {
    const label = stage.name === "level1" ? "Sr. Manager"
      : stage.name.startsWith("level2") ? `Jr. Manager ${stage.name}`
        : "Workers";
    details.appendChild(el(
      "div", { class: `stage ${stage.status}` },
      `${label}: ${stage.status} (${stage.seconds.toFixed(2)}s)`
      + (stage.detail ? ` — ${stage.detail}` : "")));
  }
  return details;
}

export class ConsoleView {
  private frameBusy = false;
  private frameStale = false;
  private input!: HTMLTextAreaElement;
  private banner!: HTMLElement;
  private history!: HTMLElement;
  private pendingPanel!: HTMLElement;
  private viewer!: HTMLImageElement;
  private revisionLabel!: HTMLElement;
  private staleBadge!: HTMLElement;

  constructor(private controller: ConsoleController,
              private root: HTMLElement,
              private pollMs = 750) {}

  mount(): void {
    const layout = el("div", { class: "layout" });
    layout.appendChild(this.buildPromptPanel());
    layout.appendChild(this.buildViewerPanel());
    this.root.appendChild(layout);
    this.renderState();
    window.setInterval(() => void this.pollFrame(), this.pollMs);
  }

  private buildPromptPanel(): HTMLElement {
    const panel = el("section", { class: "prompt-panel" });
    panel.appendChild(el("h2", {}, "scenario prompts"));
    this.banner = el("div", { class: "banner", hidden: "hidden" });
    panel.appendChild(this.banner);
    this.input = el("textarea", {
      rows: "3", placeholder: "e.g. Make it rain.",
    });
    panel.appendChild(this.input);
    const submit = el("button", {}, "submit");
    submit.addEventListener("click", () => void this.onSubmit());
    panel.appendChild(submit);
    this.pendingPanel = el("div", { class: "pending" });
    panel.appendChild(this.pendingPanel);
    this.history = el("div", { class: "history" });
    panel.appendChild(this.history);
    return panel;
  }

  private buildViewerPanel(): HTMLElement {
    const panel = el("section", { class: "viewer-panel" });
    this.revisionLabel = el("div", { class: "revision" });
    panel.appendChild(this.revisionLabel);
    this.staleBadge = el("div", { class: "stale-badge", hidden: "hidden" },
      "frame stale");
    panel.appendChild(this.staleBadge);
    this.viewer = el("img", { class: "viewer", alt: "scene" });
    this.attachOrbit(this.viewer);
    panel.appendChild(this.viewer);
    panel.appendChild(this.buildEnvironmentPanel());
    return panel;
  }

  private attachOrbit(img: HTMLImageElement): void {
    let dragging = false;
    let last = [0, 0];
    img.addEventListener("pointerdown", (ev) => {
      dragging = true;
      last = [ev.clientX, ev.clientY];
    });
    window.addEventListener("pointerup", () => { dragging = false; });
    window.addEventListener("pointermove", (ev) => {
      if (!dragging) {
        return;
      }
      const orbit = this.controller.state.orbit;
      orbit.azimuthDeg = (orbit.azimuthDeg
        - 0.4 * (ev.clientX - last[0])) % 360;
      orbit.elevationDeg = Math.max(-85, Math.min(85,
        orbit.elevationDeg + 0.3 * (ev.clientY - last[1])));
      last = [ev.clientX, ev.clientY];
    });
    img.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const orbit = this.controller.state.orbit;
      orbit.distance = Math.max(2, orbit.distance * (ev.deltaY > 0 ? 1.1 : 0.9));
    });
  }

  private buildEnvironmentPanel(): HTMLElement {
    const panel = el("div", { class: "environment" });
    const select = el("select");
    for (const w of WEATHERS) {
      select.appendChild(el("option", { value: w }, w));
    }
    select.addEventListener("change", () => void this.onEnvironment(
      { weather: select.value }));
    panel.appendChild(el("label", {}, "weather "));
    panel.appendChild(select);

    const slider = el("input", {
      type: "range", min: "0", max: "23.9", step: "0.1", value: "12",
    });
    slider.addEventListener("change", () => void this.onEnvironment(
      { time_of_day: Number(slider.value) }));
    panel.appendChild(el("label", {}, " time "));
    panel.appendChild(slider);
    return panel;
  }

  private async onEnvironment(patch: { weather?: string;
                                       time_of_day?: number }): Promise<void> {
    const env = this.controller.state.scene?.environment;
    if (!env) {
      return;
    }
    const weather = patch.weather ?? env.weather;
    let intensity = env.intensity;
    if (patch.weather !== undefined && patch.weather !== env.weather) {
      intensity = patch.weather === "clear" ? 0 : 0.5;
    }
    await this.controller.setEnvironment({
      time_of_day: patch.time_of_day ?? env.time_of_day,
      weather,
      intensity,
    });
    this.renderState();
  }

  private async onSubmit(): Promise<void> {
    const text = this.input.value.trim();
    if (!text) {
      return;
    }
    const ok = await this.controller.submitPrompt(text);
    if (ok) {
      this.input.value = ""; // kept on failure so nothing typed is lost
    }
    this.renderState();
  }

  private async pollFrame(): Promise<void> {
    if (this.frameBusy || this.controller.state.sessionId === null) {
      return;
    }
    this.frameBusy = true;
    try {
      const { bytes, revision } = await this.controller.api.renderFrame(
        this.controller.state.sessionId, this.controller.frameParams());
      const blob = new Blob([bytes], { type: "image/png" });
      const url = URL.createObjectURL(blob);
      const old = this.viewer.src;
      this.viewer.src = url;
      if (old.startsWith("blob:")) {
        URL.revokeObjectURL(old);
      }
      this.revisionLabel.textContent = `revision ${revision}`;
      this.frameStale = false;
    } catch {
      this.frameStale = true; // keep the last good frame
    } finally {
      this.staleBadge.hidden = !this.frameStale;
      this.frameBusy = false;
    }
  }

  renderState(): void {
    const state = this.controller.state;
    this.banner.hidden = state.banner === null;
    this.banner.textContent = state.banner ?? "";

    this.pendingPanel.replaceChildren();
    if (state.pendingSummary !== null) {
      this.pendingPanel.appendChild(
        el("div", { class: "summary" }, state.pendingSummary));
      const acceptBtn = el("button", {}, "accept");
      acceptBtn.addEventListener("click", async () => {
        await this.controller.accept();
        this.renderState();
      });
      const rejectBtn = el("button", {}, "reject");
      rejectBtn.addEventListener("click", async () => {
        await this.controller.reject();
        this.renderState();
      });
      this.pendingPanel.append(acceptBtn, rejectBtn);
    }

    this.history.replaceChildren();
    for (const rec of [...state.prompts].reverse()) {
      const row = el("div", { class: `prompt ${rec.status}` });
      row.appendChild(el("span", { class: "text" }, rec.text));
      row.appendChild(el("span", { class: "status" }, ` [${rec.status}]`));
      if (rec.trace) {
        row.appendChild(traceBlock(rec.trace));
      }
      if (rec.error) {
        row.appendChild(el("div", { class: "error" }, rec.error));
      }
      this.history.appendChild(row);
    }
  }
}
