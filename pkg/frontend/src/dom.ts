/**
 * HTML rendering for the workbench. Pure template functions so the view
 * of any state is a deterministic string; main.ts owns the event wiring.
 */

import type { DocumentSummary, Progress, SentenceData } from "./api.js";
import type { TagPicker } from "./picker.js";
import type { Cursor } from "./workbench.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderBanner(message: string | null): string {
  if (!message) return "";
  return `<div class="banner" role="alert">${escapeHtml(message)}</div>`;
}

export function renderProgress(progress: Progress | null): string {
  if (!progress || progress.total_tokens === 0) return "";
  const pct = (n: number) => (100 * n) / progress.total_tokens;
  return `
    <div class="progress" title="manual ${progress.manual} / auto ${progress.auto} / untagged ${progress.untagged}">
      <div class="progress-manual" style="width:${pct(progress.manual)}%"></div>
      <div class="progress-auto" style="width:${pct(progress.auto)}%"></div>
    </div>`;
}

export function renderDocumentList(docs: DocumentSummary[]): string {
  if (docs.length === 0) return `<p class="empty">No documents in the corpus.</p>`;
  const rows = docs
    .map(
      (d) => `
      <tr data-doc="${escapeHtml(d.doc_id)}" tabindex="0" class="doc-row">
        <td>${escapeHtml(d.doc_id)}</td>
        <td>${escapeHtml(d.subcorpus)}</td>
        <td>${d.sentences}</td>
        <td>${d.tokens}</td>
        <td><span class="status status-${escapeHtml(d.status)}">${escapeHtml(d.status)}</span></td>
        <td>${d.claimed_by ? escapeHtml(d.claimed_by) : ""}</td>
      </tr>`,
    )
    .join("");
  return `
    <table class="doc-table">
      <thead><tr><th>document</th><th>subcorpus</th><th>sentences</th>
      <th>tokens</th><th>status</th><th>claimed by</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderSentence(sentence: SentenceData, cursor: Cursor,
                               active: boolean): string {
  const chips = sentence.tokens
    .map((token, i) => {
      const classes = ["token"];
      if (token.tag) {
        classes.push(token.tag.provenance === "manual" ? "token-manual" : "token-suggested");
      }
      if (active && i === cursor.token) classes.push("token-cursor");
      const tag = token.tag
        ? `<span class="token-tag">${escapeHtml(token.tag.convention)}</span>`
        : "";
      return `
        <span class="${classes.join(" ")}" data-token="${i}">
          <span class="token-surface">${escapeHtml(token.surface)}</span>${tag}
        </span>`;
    })
    .join("");
  return `
    <div class="sentence ${active ? "sentence-active" : ""}" data-sid="${escapeHtml(sentence.id)}">
      <span class="sentence-id">${escapeHtml(sentence.id)}</span>
      <span class="sentence-status">${escapeHtml(sentence.status)}</span>
      <div class="tokens">${chips}</div>
    </div>`;
}

export function renderPicker(picker: TagPicker): string {
  if (!picker.isOpen) return "";
  const crumb = picker.breadcrumb();
  const options = picker
    .options()
    .map((node, i) => {
      const classes = ["picker-option"];
      if (i === picker.highlight) classes.push("picker-highlight");
      const examples = node.examples.length
        ? `<span class="picker-examples">${escapeHtml(node.examples.join(", "))}</span>`
        : "";
      const more = node.children.length > 0 ? `<span class="picker-more">&#9656;</span>` : "";
      return `
        <li class="${classes.join(" ")}" data-label="${escapeHtml(node.label)}">
          <span class="picker-key">${i + 1}</span>
          <span class="picker-label">${escapeHtml(node.label)}</span>
          <span class="picker-name">${escapeHtml(node.name)}</span>
          ${examples}${more}
        </li>`;
    })
    .join("");
  const preview = picker.preview();
  return `
    <div class="picker" role="dialog" aria-label="tag picker">
      <div class="picker-crumb">${crumb.length ? crumb.map(escapeHtml).join(" &rsaquo; ") : "top level"}</div>
      <ul class="picker-options">${options}</ul>
      <div class="picker-preview">${preview ? escapeHtml(preview) : ""}</div>
      <div class="picker-help">digits or &#8597; + Enter choose &middot; Esc up/close</div>
    </div>`;
}

export function renderHelp(): string {
  return `
    <div class="help">
      &#8596; token &middot; &#8597; sentence &middot; Enter accept/pick &middot;
      Esc reject &middot; A confirm sentence
    </div>`;
}
