import { Api } from "./api.js";
import { ConsoleController } from "./state.js";
import { ConsoleView } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("server") ?? "http://127.0.0.1:8732";

async function boot(): Promise<void> {
  const controller = new ConsoleController(new Api(baseUrl));
  await controller.start();
  const root = document.getElementById("console-root");
  if (root === null) {
    throw new Error("missing #console-root");
  }
  new ConsoleView(controller, root).mount();
}

boot().catch((err) => {
  const root = document.getElementById("console-root");
  if (root !== null) {
    root.textContent = `failed to start: ${err}`;
  }
});
