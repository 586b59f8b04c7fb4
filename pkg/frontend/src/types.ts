// API contract mirrored from the annotation server's /api/v1 JSON schema.

export type SessionKind =
  | "keyword_commit"
  | "review_suitability"
  | "external_vetting"
  | "final_evaluation";

export interface Criteria {
  coherent: boolean;
  addresses_vulnerability: boolean;
  plausible_trigger: boolean;
}

export interface LabelOut {
  verdict: boolean;
  criteria: Criteria | null;
  semantic_equivalence: boolean | null;
  applicability: boolean | null;
  note: string;
}

export interface LabelInput {
  verdict?: boolean;
  criteria?: Criteria;
  semantic_equivalence?: boolean;
  applicability?: boolean;
  note?: string;
  proposed_keywords?: string[];
}

export interface DiffLine {
  tag: "context" | "add" | "del";
  text: string;
}

export interface DiffHunk {
  old_start: number;
  old_len: number;
  new_start: number;
  new_len: number;
  lines: DiffLine[];
}

export interface FileDiff {
  old_path: string;
  new_path: string;
  is_binary: boolean;
  hunks: DiffHunk[];
}

export interface ItemPayload {
  message?: string;
  diff?: string;
  diff_hunks?: FileDiff[];
  review?: string;
  keyword?: string;
  negative_sample?: boolean;
  diff_hunk?: string;
  review_comment?: string;
  matched_keywords?: string[];
  generated?: string;
  ground_truth?: string;
}

export interface ItemView {
  item_id: string;
  payload: ItemPayload;
  kind: SessionKind;
  your_label: LabelOut | null;
  state: string;
  peer_label?: LabelOut;
  final_verdict?: boolean | null;
  proposed_keywords: string[];
}

export interface AdjudicationItem {
  item_id: string;
  payload: ItemPayload;
  kind: SessionKind;
  labels: Record<string, LabelOut>;
  adjudicated: LabelOut | null;
  state: string;
  final_verdict: boolean | null;
}

export interface SessionStats {
  session_id: string;
  kind: SessionKind;
  rubric_version: string;
  n_items: number;
  states: Record<string, number>;
  progress: Record<string, number>;
  complete: boolean;
  kappa: {
    kappa: number;
    observed_agreement: number;
    expected_agreement: number;
    n_items: number;
  } | null;
}

export interface SessionSummary {
  session_id: string;
  kind: SessionKind;
  rubric_version: string;
  n_items: number;
  role: "annotator" | "adjudicator";
  actor: string;
}

export interface CreatedSession {
  session_id: string;
  annotator_tokens: Record<string, string>;
  adjudicator_token: string | null;
  shuffle_seed: number;
  n_items: number;
}
