/** Browser bootstrap: instantiate the app and wire DOM event delegation. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import type { Tab } from "./state.js";

function mount(app: App, root: HTMLElement): void {
  const rerender = () => {
    root.innerHTML = app.html();
  };

  root.addEventListener("click", async (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) return;
    const action = target.dataset.action;
    if (action === "toggle-sidebar") await app.doToggleSidebar();
    else if (action === "generate-groups") await app.doGenerateGroups();
    else if (action === "save-group-set") {
      const name = window.prompt("Name for the active group set?");
      if (name) await app.doSaveGroupSet(name);
    } else if (action === "restore-group-set") {
      await app.doRestoreGroupSet(target.dataset.groupSet ?? "");
    } else if (action === "switch-tab") {
      await app.doSwitchTab(target.dataset.tab as Tab);
    } else if (action === "pin") await app.doPin(target.dataset.subgroup ?? "");
    else if (action === "hover") await app.doHover(target.dataset.subgroup ?? "");
    else if (action === "select-node") await app.doSelectNode(target.dataset.node ?? "");
    else if (action === "answer") {
      await app.doAnswer(target.dataset.node ?? "", target.dataset.answer ?? "");
    } else if (action === "backtrack") await app.doBacktrack();
    else if (action === "evaluate") await app.doEvaluate();
    else return;
    rerender();
  });

  root.addEventListener("change", async (event) => {
    const target = event.target as HTMLElement;
    const holder = target.closest<HTMLElement>("[data-action]");
    if (!holder) return;
    const action = holder.dataset.action;
    if (action === "select-feature") {
      const box = target as HTMLInputElement;
      await app.doSelectFeature(holder.dataset.feature ?? "", box.checked);
    } else if (action === "toggle-metric") {
      await app.doToggleMetric(holder.dataset.metric ?? "");
    } else if (action === "set-favourable") {
      const select = target as HTMLSelectElement;
      await app.doSetFavourable(select.value === "1" ? 1 : 0);
    } else if (action === "set-sensitive") {
      const select = target as HTMLSelectElement;
      await app.doSetSensitive(select.value || null);
    } else if (action === "set-legitimate") {
      const select = target as HTMLSelectElement;
      const chosen = Array.from(select.selectedOptions).map((o) => o.value);
      await app.doSetLegitimate(chosen);
    } else return;
    rerender();
  });

  rerender();
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  if (!sessionId) {
    root.innerHTML =
      `<div class="loading">Open with <code>?session=&lt;id&gt;</code> ` +
      `after creating a session via <code>POST /api/v1/sessions</code>.</div>`;
    return;
  }
  const app = new App(new ApiClient("/api/v1"), sessionId);
  try {
    await app.boot();
  } catch (error) {
    root.innerHTML = `<div class="loading error">failed to load session: ${String(error)}</div>`;
    return;
  }
  mount(app, root);
}

void start();
