// Browser bootstrap: wires the flow/state machines to the DOM.
// The page is served by `secrev annotate serve --ui-dir`; session id and
// bearer token arrive via the URL fragment so they never hit server logs:
//   /ui/#session=<id>&token=<token>&role=annotator|adjudicator|dashboard

import { ApiClient } from "./api.js";
import {
  AnnotatorFlow,
  applyShortcut,
  dashboardModel,
  emptyRubric,
  setRubricField,
  type RubricBoolField,
} from "./state.js";
import {
  renderAdjudicationItem,
  renderDashboard,
  renderItem,
  renderProgress,
} from "./render.js";
import type { LabelInput } from "./types.js";

function fragmentParams(): Map<string, string> {
  const params = new Map<string, string>();
  for (const pair of window.location.hash.replace(/^#/, "").split("&")) {
    const [key, value] = pair.split("=");
    if (key && value) {
      params.set(key, decodeURIComponent(value));
    }
  }
  return params;
}

function mount(): HTMLElement {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  return root;
}

async function runAnnotator(client: ApiClient, sessionId: string, root: HTMLElement) {
  const flow = new AnnotatorFlow(client, sessionId);
  await flow.load();

  const draw = () => {
    const current = flow.queue.current();
    const header =
      `<header>${renderProgress(flow.progressFraction())}` +
      (flow.lastError ? `<div class="error">${flow.lastError}</div>` : "") +
      `</header>`;
    if (current === null) {
      root.innerHTML = `${header}<p class="done">all items labeled; thank you.</p>`;
      return;
    }
    root.innerHTML = header + renderItem(current, flow.rubric);
  };

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const action = target.dataset.action;
    if (action === "set") {
      const field = target.dataset.field as RubricBoolField;
      const value = target.dataset.value === "true";
      flow.rubric = setRubricField(flow.rubric, field, value);
      draw();
    } else if (action === "submit") {
      void flow.submit().then(draw, (error) => {
        flow.lastError = String(error);
        draw();
      });
    }
  });

  root.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement;
    if (target.dataset.field === "note") {
      flow.rubric.note = target.value;
    } else if (target.dataset.field === "proposal") {
      flow.rubric.proposedKeywords = target.value
        .split(",")
        .map((keyword) => keyword.trim().toLowerCase())
        .filter((keyword) => keyword.length > 0);
    }
  });

  document.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement).tagName === "INPUT") {
      return;
    }
    if (event.key === "Enter") {
      if (flow.canSubmit()) {
        void flow.submit().then(draw);
      }
      return;
    }
    const next = applyShortcut(flow.kind, flow.rubric, event.key);
    if (next !== flow.rubric) {
      flow.rubric = next;
      draw();
    }
  });

  draw();
}

async function runAdjudicator(client: ApiClient, sessionId: string, root: HTMLElement) {
  const kindFromSummary = (await client.summary(sessionId)).kind;
  const rubrics = new Map<string, ReturnType<typeof emptyRubric>>();

  const draw = async () => {
    const queue = await client.adjudicationQueue(sessionId);
    if (queue.length === 0) {
      root.innerHTML = `<p class="done">no disagreements awaiting adjudication.</p>`;
      return;
    }
    root.innerHTML = queue.map(renderAdjudicationItem).join("");
  };

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const article = target.closest("[data-item-id]") as HTMLElement | null;
    if (!article) {
      return;
    }
    const itemId = article.dataset.itemId!;
    const rubric = rubrics.get(itemId) ?? emptyRubric();
    if (target.dataset.action === "set") {
      const field = target.dataset.field as RubricBoolField;
      const value = target.dataset.value === "true";
      rubrics.set(itemId, setRubricField(rubric, field, value));
      target.classList.toggle("selected");
    } else if (target.dataset.action === "adjudicate") {
      const label: LabelInput = {};
      if (rubric.verdict !== null) {
        label.verdict = rubric.verdict;
      }
      if (rubric.coherent !== null) {
        label.criteria = {
          coherent: rubric.coherent,
          addresses_vulnerability: rubric.addresses_vulnerability ?? false,
          plausible_trigger: rubric.plausible_trigger ?? false,
        };
      }
      if (rubric.semantic_equivalence !== null) {
        label.semantic_equivalence = rubric.semantic_equivalence;
        label.applicability = rubric.applicability ?? false;
      }
      void client.adjudicate(sessionId, itemId, label).then(() => draw());
    }
  });

  await draw();
  void kindFromSummary;
}

async function runDashboard(client: ApiClient, sessionId: string, root: HTMLElement) {
  const refresh = async () => {
    const stats = await client.stats(sessionId);
    root.innerHTML = renderDashboard(dashboardModel(stats));
  };
  await refresh();
  window.setInterval(() => void refresh(), 5000);
}

export async function start(): Promise<void> {
  const params = fragmentParams();
  const sessionId = params.get("session");
  const token = params.get("token");
  const role = params.get("role") ?? "annotator";
  const root = mount();
  if (!sessionId || !token) {
    root.innerHTML =
      `<p class="error">missing credentials: open this page as ` +
      `/ui/#session=&lt;id&gt;&amp;token=&lt;token&gt;&amp;role=annotator|adjudicator|dashboard</p>`;
    return;
  }
  const client = new ApiClient("", token);
  try {
    if (role === "adjudicator") {
      await runAdjudicator(client, sessionId, root);
    } else if (role === "dashboard") {
      await runDashboard(client, sessionId, root);
    } else {
      await runAnnotator(client, sessionId, root);
    }
  } catch (error) {
    root.innerHTML = `<p class="error">failed to load session: ${String(error)}</p>`;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void start();
}
