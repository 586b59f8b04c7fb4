import { describe, expect, it } from "vitest";

import { ApiClient, NetworkError } from "../src/api.js";
import {
  AnnotationQueue,
  AnnotatorFlow,
  applyShortcut,
  dashboardModel,
  emptyRubric,
  rubricComplete,
  setRubricField,
  toLabelInput,
} from "../src/state.js";
import type { ItemView, SessionStats } from "../src/types.js";

function item(id: string, labeled = false): ItemView {
  return {
    item_id: id,
    payload: { message: `message ${id}` },
    kind: "keyword_commit",
    your_label: labeled
      ? { verdict: true, criteria: null, semantic_equivalence: null, applicability: null, note: "" }
      : null,
    state: labeled ? "awaiting_peer" : "awaiting_your_label",
    proposed_keywords: [],
  };
}

describe("rubricComplete", () => {
  it("keyword sessions need only a verdict", () => {
    const rubric = emptyRubric();
    expect(rubricComplete("keyword_commit", rubric)).toBe(false);
    expect(rubricComplete("keyword_commit", { ...rubric, verdict: false })).toBe(true);
  });

  it("suitability needs all three criteria", () => {
    let rubric = emptyRubric();
    rubric = setRubricField(rubric, "coherent", true);
    rubric = setRubricField(rubric, "addresses_vulnerability", false);
    expect(rubricComplete("review_suitability", rubric)).toBe(false);
    rubric = setRubricField(rubric, "plausible_trigger", true);
    expect(rubricComplete("review_suitability", rubric)).toBe(true);
  });

  it("final evaluation needs both metrics", () => {
    let rubric = emptyRubric();
    rubric = setRubricField(rubric, "semantic_equivalence", true);
    expect(rubricComplete("final_evaluation", rubric)).toBe(false);
    rubric = setRubricField(rubric, "applicability", false);
    expect(rubricComplete("final_evaluation", rubric)).toBe(true);
  });
});

describe("toLabelInput", () => {
  it("builds suitability criteria payload", () => {
    let rubric = emptyRubric();
    rubric = setRubricField(rubric, "coherent", true);
    rubric = setRubricField(rubric, "addresses_vulnerability", true);
    rubric = setRubricField(rubric, "plausible_trigger", false);
    expect(toLabelInput("review_suitability", rubric)).toEqual({
      note: "",
      criteria: {
        coherent: true,
        addresses_vulnerability: true,
        plausible_trigger: false,
      },
    });
  });

  it("includes proposed keywords only when present", () => {
    let rubric = { ...emptyRubric(), proposedKeywords: ["sanitize"] };
    rubric = setRubricField(rubric, "verdict", true);
    expect(toLabelInput("keyword_commit", rubric)).toEqual({
      note: "",
      verdict: true,
      proposed_keywords: ["sanitize"],
    });
  });

  it("throws on incomplete rubric", () => {
    expect(() => toLabelInput("keyword_commit", emptyRubric())).toThrow();
  });
});

describe("applyShortcut", () => {
  it("y/n toggle the verdict with clear-on-repeat", () => {
    let rubric = emptyRubric();
    rubric = applyShortcut("keyword_commit", rubric, "y");
    expect(rubric.verdict).toBe(true);
    rubric = applyShortcut("keyword_commit", rubric, "y");
    expect(rubric.verdict).toBe(null);
    rubric = applyShortcut("keyword_commit", rubric, "n");
    expect(rubric.verdict).toBe(false);
  });

  it("1/2/3 set the suitability criteria", () => {
    let rubric = emptyRubric();
    rubric = applyShortcut("review_suitability", rubric, "1");
    rubric = applyShortcut("review_suitability", rubric, "2");
    rubric = applyShortcut("review_suitability", rubric, "#");
    expect(rubric.coherent).toBe(true);
    expect(rubric.addresses_vulnerability).toBe(true);
    expect(rubric.plausible_trigger).toBe(false);
  });

  it("unknown keys are no-ops", () => {
    const rubric = emptyRubric();
    expect(applyShortcut("keyword_commit", rubric, "q")).toBe(rubric);
  });
});

describe("AnnotationQueue", () => {
  it("tracks the first unlabeled item", () => {
    const queue = new AnnotationQueue([item("a", true), item("b"), item("c")]);
    expect(queue.current()?.item_id).toBe("b");
    expect(queue.labeled).toBe(1);
    queue.replace(item("b", true));
    expect(queue.current()?.item_id).toBe("c");
  });

  it("empty queue has no current item", () => {
    expect(new AnnotationQueue([]).current()).toBeNull();
  });
});

function fakeClient(
  items: ItemView[],
  onSubmit: (itemId: string, body: unknown) => ItemView | Error,
): ApiClient {
  const fetchImpl = async (input: string, init?: RequestInit) => {
    if (input.endsWith("/items") && (!init || init.method === "GET")) {
      return new Response(JSON.stringify({ items }), { status: 200 });
    }
    const match = input.match(/\/items\/([^/]+)\/label$/);
    if (match && init?.method === "POST") {
      const result = onSubmit(match[1]!, JSON.parse(String(init.body)));
      if (result instanceof Error) {
        throw result;
      }
      return new Response(JSON.stringify(result), { status: 200 });
    }
    throw new Error(`unexpected request ${input}`);
  };
  return new ApiClient("", "token", fetchImpl);
}

describe("AnnotatorFlow", () => {
  it("submits in presentation order and clears the rubric", async () => {
    const submitted: string[] = [];
    const client = fakeClient([item("a"), item("b")], (id) => {
      submitted.push(id);
      return item(id, true);
    });
    const flow = new AnnotatorFlow(client, "s1");
    await flow.load();
    expect(flow.canSubmit()).toBe(false);
    flow.rubric = setRubricField(flow.rubric, "verdict", true);
    expect(flow.canSubmit()).toBe(true);
    await flow.submit();
    expect(submitted).toEqual(["a"]);
    expect(flow.rubric.verdict).toBe(null);
    expect(flow.queue.current()?.item_id).toBe("b");
  });

  it("keeps the rubric on a network error for a retry", async () => {
    let failures = 1;
    const client = fakeClient([item("a")], (id) => {
      if (failures > 0) {
        failures -= 1;
        return new NetworkError("connection reset");
      }
      return item(id, true);
    });
    const flow = new AnnotatorFlow(client, "s1");
    await flow.load();
    flow.rubric = setRubricField(flow.rubric, "verdict", false);
    await flow.submit();
    expect(flow.status).toBe("retryable_error");
    expect(flow.rubric.verdict).toBe(false);
    await flow.submit();
    expect(flow.status).toBe("done");
  });
});

describe("dashboardModel", () => {
  const base: SessionStats = {
    session_id: "s",
    kind: "keyword_commit",
    rubric_version: "v1",
    n_items: 20,
    states: { awaiting_labels: 0, needs_adjudication: 0, agreed: 19, adjudicated: 1 },
    progress: { alice: 20, bob: 15 },
    complete: false,
    kappa: null,
  };

  it("kappa hidden while server reports unavailable", () => {
    const model = dashboardModel(base);
    expect(model.kappa).toBeNull();
    expect(model.progress.find((p) => p.annotator === "bob")?.fraction).toBe(0.75);
  });

  it("kappa passed through verbatim when available", () => {
    const stats = {
      ...base,
      kappa: { kappa: 0.9, observed_agreement: 0.95, expected_agreement: 0.5, n_items: 20 },
    };
    expect(dashboardModel(stats).kappa).toBe(0.9);
  });
});
