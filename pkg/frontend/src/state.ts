// Annotator-side state: the rubric form model, the work queue, and the
// dashboard view model. All server state is authoritative; this layer only
// tracks what the annotator is currently editing, so a page reload loses
// nothing that was submitted.

import { ApiClient, NetworkError } from "./api.js";
import type {
  ItemView,
  LabelInput,
  SessionKind,
  SessionStats,
} from "./types.js";

export interface RubricState {
  verdict: boolean | null;
  coherent: boolean | null;
  addresses_vulnerability: boolean | null;
  plausible_trigger: boolean | null;
  semantic_equivalence: boolean | null;
  applicability: boolean | null;
  note: string;
  proposedKeywords: string[];
}

export function emptyRubric(): RubricState {
  return {
    verdict: null,
    coherent: null,
    addresses_vulnerability: null,
    plausible_trigger: null,
    semantic_equivalence: null,
    applicability: null,
    note: "",
    proposedKeywords: [],
  };
}

export type RubricBoolField =
  | "verdict"
  | "coherent"
  | "addresses_vulnerability"
  | "plausible_trigger"
  | "semantic_equivalence"
  | "applicability";

// Tri-state toggle: clicking the already-selected value clears it.
export function setRubricField(
  rubric: RubricState,
  field: RubricBoolField,
  value: boolean,
): RubricState {
  return { ...rubric, [field]: rubric[field] === value ? null : value };
}

// Submit stays disabled until every rubric field for the session kind is set.
export function rubricComplete(kind: SessionKind, rubric: RubricState): boolean {
  switch (kind) {
    case "review_suitability":
      return (
        rubric.coherent !== null &&
        rubric.addresses_vulnerability !== null &&
        rubric.plausible_trigger !== null
      );
    case "final_evaluation":
      return (
        rubric.semantic_equivalence !== null && rubric.applicability !== null
      );
    default:
      return rubric.verdict !== null;
  }
}

export function toLabelInput(kind: SessionKind, rubric: RubricState): LabelInput {
  if (!rubricComplete(kind, rubric)) {
    throw new Error("rubric incomplete");
  }
  const base: LabelInput = { note: rubric.note };
  if (rubric.proposedKeywords.length > 0) {
    base.proposed_keywords = rubric.proposedKeywords;
  }
  switch (kind) {
    case "review_suitability":
      return {
        ...base,
        criteria: {
          coherent: rubric.coherent!,
          addresses_vulnerability: rubric.addresses_vulnerability!,
          plausible_trigger: rubric.plausible_trigger!,
        },
      };
    case "final_evaluation":
      return {
        ...base,
        semantic_equivalence: rubric.semantic_equivalence!,
        applicability: rubric.applicability!,
      };
    default:
      return { ...base, verdict: rubric.verdict! };
  }
}

// Keyboard shortcuts: annotators process hundreds of items, so every rubric
// control has a key. Returns a new state; unknown keys return the input.
export function applyShortcut(
  kind: SessionKind,
  rubric: RubricState,
  key: string,
): RubricState {
  const toggle = (value: boolean | null, next: boolean) =>
    value === next ? null : next;
  if (kind === "review_suitability") {
    switch (key) {
      case "1":
        return { ...rubric, coherent: toggle(rubric.coherent, true) };
      case "!":
        return { ...rubric, coherent: toggle(rubric.coherent, false) };
      case "2":
        return {
          ...rubric,
          addresses_vulnerability: toggle(rubric.addresses_vulnerability, true),
        };
      case "@":
        return {
          ...rubric,
          addresses_vulnerability: toggle(rubric.addresses_vulnerability, false),
        };
      case "3":
        return {
          ...rubric,
          plausible_trigger: toggle(rubric.plausible_trigger, true),
        };
      case "#":
        return {
          ...rubric,
          plausible_trigger: toggle(rubric.plausible_trigger, false),
        };
      default:
        return rubric;
    }
  }
  if (kind === "final_evaluation") {
    switch (key) {
      case "s":
        return {
          ...rubric,
          semantic_equivalence: toggle(rubric.semantic_equivalence, true),
        };
      case "S":
        return {
          ...rubric,
          semantic_equivalence: toggle(rubric.semantic_equivalence, false),
        };
      case "a":
        return { ...rubric, applicability: toggle(rubric.applicability, true) };
      case "A":
        return { ...rubric, applicability: toggle(rubric.applicability, false) };
      default:
        return rubric;
    }
  }
  switch (key) {
    case "y":
      return { ...rubric, verdict: toggle(rubric.verdict, true) };
    case "n":
      return { ...rubric, verdict: toggle(rubric.verdict, false) };
    default:
      return rubric;
  }
}

export class AnnotationQueue {
  constructor(public items: ItemView[]) {}

  get total(): number {
    return this.items.length;
  }

  get labeled(): number {
    return this.items.filter((item) => item.your_label !== null).length;
  }

  current(): ItemView | null {
    return this.items.find((item) => item.your_label === null) ?? null;
  }

  replace(updated: ItemView): void {
    this.items = this.items.map((item) =>
      item.item_id === updated.item_id ? updated : item,
    );
  }
}

export type FlowStatus = "idle" | "submitting" | "retryable_error" | "done";

export class AnnotatorFlow {
  queue = new AnnotationQueue([]);
  rubric = emptyRubric();
  kind: SessionKind = "keyword_commit";
  status: FlowStatus = "idle";
  lastError: string | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly sessionId: string,
  ) {}

  async load(): Promise<void> {
    const items = await this.client.items(this.sessionId);
    this.queue = new AnnotationQueue(items);
    const first = items[0];
    if (first !== undefined) {
      this.kind = first.kind;
    }
    this.status = this.queue.current() === null ? "done" : "idle";
  }

  canSubmit(): boolean {
    return (
      this.status !== "submitting" &&
      this.queue.current() !== null &&
      rubricComplete(this.kind, this.rubric)
    );
  }

  // Optimistic: the rubric clears as soon as the server confirms; on a
  // network failure the rubric is kept so the annotator can retry.
  async submit(): Promise<ItemView | null> {
    const item = this.queue.current();
    if (item === null || !this.canSubmit()) {
      return null;
    }
    const label = toLabelInput(this.kind, this.rubric);
    this.status = "submitting";
    try {
      const updated = await this.client.submitLabel(
        this.sessionId,
        item.item_id,
        label,
      );
      this.queue.replace(updated);
      this.rubric = emptyRubric();
      this.lastError = null;
      this.status = this.queue.current() === null ? "done" : "idle";
      return updated;
    } catch (error) {
      if (error instanceof NetworkError) {
        this.status = "retryable_error";
        this.lastError = `network problem, label not saved; retry (${error.message})`;
        return null;
      }
      this.status = "idle";
      throw error;
    }
  }

  progressFraction(): number {
    return this.queue.total === 0 ? 0 : this.queue.labeled / this.queue.total;
  }
}

export interface DashboardModel {
  nItems: number;
  states: Record<string, number>;
  progress: Array<{ annotator: string; labeled: number; fraction: number }>;
  complete: boolean;
  // null when the server reports kappa unavailable; shown verbatim otherwise
  kappa: number | null;
  kappaDetail: string | null;
}

export function dashboardModel(stats: SessionStats): DashboardModel {
  return {
    nItems: stats.n_items,
    states: stats.states,
    progress: Object.entries(stats.progress).map(([annotator, labeled]) => ({
      annotator,
      labeled,
      fraction: stats.n_items === 0 ? 0 : labeled / stats.n_items,
    })),
    complete: stats.complete,
    kappa: stats.kappa === null ? null : stats.kappa.kappa,
    kappaDetail:
      stats.kappa === null
        ? null
        : `observed ${stats.kappa.observed_agreement.toFixed(3)}, ` +
          `expected ${stats.kappa.expected_agreement.toFixed(3)}, ` +
          `n=${stats.kappa.n_items}`,
  };
}
