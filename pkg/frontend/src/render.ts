// Pure HTML-string renderers (no DOM dependency, so they unit-test in node).
// Diff rendering is structural, from the hunk JSON the server ships in the
// item payload; raw text is only a fallback.

import type { RubricState } from "./state.js";
import { rubricComplete } from "./state.js";
import type {
  AdjudicationItem,
  DiffHunk,
  FileDiff,
  ItemPayload,
  ItemView,
  LabelOut,
  SessionKind,
} from "./types.js";
import type { DashboardModel } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderHunk(hunk: DiffHunk): string {
  let oldLine = hunk.old_start;
  let newLine = hunk.new_start;
  const rows = hunk.lines.map((line) => {
    let oldNo = "";
    let newNo = "";
    if (line.tag !== "add") {
      oldNo = String(oldLine++);
    }
    if (line.tag !== "del") {
      newNo = String(newLine++);
    }
    const marker = line.tag === "add" ? "+" : line.tag === "del" ? "-" : " ";
    return (
      `<tr class="diff-${line.tag}">` +
      `<td class="lineno">${oldNo}</td><td class="lineno">${newNo}</td>` +
      `<td class="marker">${marker}</td>` +
      `<td class="code">${escapeHtml(line.text)}</td></tr>`
    );
  });
  const header =
    `<tr class="hunk-header"><td colspan="4">@@ -${hunk.old_start},${hunk.old_len} ` +
    `+${hunk.new_start},${hunk.new_len} @@</td></tr>`;
  return header + rows.join("");
}

export function renderFileDiff(file: FileDiff): string {
  const title = escapeHtml(
    file.old_path === file.new_path
      ? file.new_path
      : `${file.old_path} → ${file.new_path}`,
  );
  if (file.is_binary) {
    return `<div class="file-diff"><div class="file-path">${title}</div>` +
      `<div class="binary-note">binary file change</div></div>`;
  }
  return (
    `<div class="file-diff"><div class="file-path">${title}</div>` +
    `<table class="diff-table">${file.hunks.map(renderHunk).join("")}</table></div>`
  );
}

export function renderDiff(payload: ItemPayload): string {
  if (payload.diff_hunks && payload.diff_hunks.length > 0) {
    return payload.diff_hunks.map(renderFileDiff).join("");
  }
  const raw = payload.diff ?? payload.diff_hunk ?? "";
  if (!raw) {
    return `<div class="no-diff">no diff available</div>`;
  }
  // fallback: line-prefix highlighting of raw unified diff text
  const rows = raw
    .replace(/\n$/, "")
    .split("\n")
    .map((line) => {
      const tag = line.startsWith("+")
        ? "add"
        : line.startsWith("-")
          ? "del"
          : line.startsWith("@@")
            ? "hunk"
            : "context";
      return `<div class="rawdiff-${tag}">${escapeHtml(line)}</div>`;
    });
  return `<pre class="raw-diff">${rows.join("")}</pre>`;
}

function tristate(
  name: string,
  label: string,
  value: boolean | null,
): string {
  const yes = value === true ? " selected" : "";
  const no = value === false ? " selected" : "";
  return (
    `<div class="tristate" data-field="${name}">` +
    `<span class="tristate-label">${escapeHtml(label)}</span>` +
    `<button type="button" data-action="set" data-field="${name}" data-value="true" class="yes${yes}">yes</button>` +
    `<button type="button" data-action="set" data-field="${name}" data-value="false" class="no${no}">no</button>` +
    `</div>`
  );
}

export function renderRubric(kind: SessionKind, rubric: RubricState): string {
  const controls: string[] = [];
  if (kind === "review_suitability") {
    controls.push(
      tristate("coherent", "1. coherent review", rubric.coherent),
      tristate(
        "addresses_vulnerability",
        "2. addresses the vulnerability",
        rubric.addresses_vulnerability,
      ),
      tristate(
        "plausible_trigger",
        "3. could plausibly prompt the commit",
        rubric.plausible_trigger,
      ),
    );
  } else if (kind === "final_evaluation") {
    controls.push(
      tristate(
        "semantic_equivalence",
        "semantic equivalence with ground truth",
        rubric.semantic_equivalence,
      ),
      tristate("applicability", "raises a valid, applicable concern", rubric.applicability),
    );
  } else {
    const question =
      kind === "keyword_commit"
        ? "does this commit address a vulnerability?"
        : "is this review security-related?";
    controls.push(tristate("verdict", question, rubric.verdict));
  }
  if (kind === "keyword_commit") {
    controls.push(
      `<div class="proposal-box"><label>new keyword suggestions ` +
        `<input type="text" data-field="proposal" ` +
        `placeholder="comma-separated, noted for the next iteration" ` +
        `value="${escapeHtml(rubric.proposedKeywords.join(", "))}"></label></div>`,
    );
  }
  controls.push(
    `<div class="note-box"><label>note ` +
      `<input type="text" data-field="note" value="${escapeHtml(rubric.note)}"></label></div>`,
  );
  const disabled = rubricComplete(kind, rubric) ? "" : " disabled";
  controls.push(
    `<button type="button" class="submit" data-action="submit"${disabled}>submit</button>`,
  );
  return `<form class="rubric" onsubmit="return false">${controls.join("")}</form>`;
}

function panel(title: string, body: string): string {
  return `<section class="panel"><h3>${escapeHtml(title)}</h3>${body}</section>`;
}

export function renderItem(item: ItemView, rubric: RubricState): string {
  const parts: string[] = [`<article class="item" data-item-id="${item.item_id}">`];
  const payload = item.payload;
  if (payload.keyword) {
    parts.push(panel("keyword under validation", `<code>${escapeHtml(payload.keyword)}</code>`));
  }
  if (payload.negative_sample) {
    parts.push(panel("sample type", "no-keyword control sample"));
  }
  if (payload.message) {
    parts.push(panel("commit message", `<pre class="message">${escapeHtml(payload.message)}</pre>`));
  }
  if (payload.review) {
    parts.push(panel("generated review", `<blockquote class="review">${escapeHtml(payload.review)}</blockquote>`));
  }
  if (payload.review_comment) {
    parts.push(panel("review comment", `<blockquote class="review">${escapeHtml(payload.review_comment)}</blockquote>`));
  }
  if (payload.generated) {
    parts.push(panel("generated review", `<blockquote class="review">${escapeHtml(payload.generated)}</blockquote>`));
    parts.push(panel("ground-truth review", `<blockquote class="review">${escapeHtml(payload.ground_truth ?? "")}</blockquote>`));
  }
  parts.push(panel("code change", renderDiff(payload)));
  parts.push(renderRubric(item.kind, rubric));
  parts.push("</article>");
  return parts.join("");
}

export function renderProgress(fraction: number): string {
  const percent = Math.round(fraction * 100);
  return (
    `<div class="progress" role="progressbar" aria-valuenow="${percent}">` +
    `<div class="progress-fill" style="width:${percent}%"></div>` +
    `<span class="progress-text">${percent}%</span></div>`
  );
}

function renderLabel(label: LabelOut): string {
  const bits: string[] = [`verdict: <b>${label.verdict ? "yes" : "no"}</b>`];
  if (label.criteria) {
    bits.push(
      `criteria: ${Object.entries(label.criteria)
        .map(([name, value]) => `${escapeHtml(name)}=${value ? "y" : "n"}`)
        .join(", ")}`,
    );
  }
  if (label.semantic_equivalence !== null) {
    bits.push(`semantic equivalence: ${label.semantic_equivalence ? "y" : "n"}`);
  }
  if (label.applicability !== null) {
    bits.push(`applicability: ${label.applicability ? "y" : "n"}`);
  }
  if (label.note) {
    bits.push(`note: ${escapeHtml(label.note)}`);
  }
  return `<div class="label-card">${bits.join("<br>")}</div>`;
}

export function renderAdjudicationItem(item: AdjudicationItem): string {
  const labels = Object.entries(item.labels)
    .map(
      ([annotator, label]) =>
        `<div class="annotator-column"><h4>${escapeHtml(annotator)}</h4>${renderLabel(label)}</div>`,
    )
    .join("");
  return (
    `<article class="adjudication-item" data-item-id="${item.item_id}">` +
    panel("code change", renderDiff(item.payload)) +
    `<div class="side-by-side">${labels}</div>` +
    renderRubric(item.kind, {
      verdict: null,
      coherent: null,
      addresses_vulnerability: null,
      plausible_trigger: null,
      semantic_equivalence: null,
      applicability: null,
      note: "",
      proposedKeywords: [],
    }).replace('data-action="submit"', 'data-action="adjudicate"') +
    `</article>`
  );
}

export function renderDashboard(model: DashboardModel): string {
  const progressRows = model.progress
    .map(
      (p) =>
        `<div class="annotator-progress"><span>${escapeHtml(p.annotator)}</span>` +
        `${renderProgress(p.fraction)}<span>${p.labeled}/${model.nItems}</span></div>`,
    )
    .join("");
  const kappa =
    model.kappa === null
      ? `<div class="kappa unavailable">Cohen's kappa: not yet available</div>`
      : `<div class="kappa">Cohen's kappa: <b>${model.kappa}</b>` +
        ` <small>${escapeHtml(model.kappaDetail ?? "")}</small></div>`;
  const states = Object.entries(model.states)
    .map(([state, count]) => `<li>${escapeHtml(state)}: ${count}</li>`)
    .join("");
  return (
    `<div class="dashboard">` +
    `<h2>session dashboard${model.complete ? " (complete)" : ""}</h2>` +
    progressRows +
    `<ul class="states">${states}</ul>` +
    kappa +
    `</div>`
  );
}
