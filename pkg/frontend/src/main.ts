/**
 * Entry point: token prompt, document list, annotation view.
 *
 * One claim per browser session; a document someone else holds renders
 * read-only in the list (claim attempts surface the conflict banner).
 */

import { ApiClient, ApiError, type DocumentSummary } from "./api.js";
import {
  renderBanner,
  renderDocumentList,
  renderHelp,
  renderPicker,
  renderProgress,
  renderSentence,
} from "./dom.js";
import { Workbench } from "./workbench.js";

const TOKEN_KEY = "annkit-token";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

type View = "documents" | "annotate";

class App {
  private workbench: Workbench | null = null;
  private api: ApiClient | null = null;
  private documents: DocumentSummary[] = [];
  private view: View = "documents";
  private banner: string | null = null;

  async start(): Promise<void> {
    let token = localStorage.getItem(TOKEN_KEY);
    if (!token) {
      token = window.prompt("Annotator token:") ?? "";
      localStorage.setItem(TOKEN_KEY, token);
    }
    this.api = new ApiClient("", token);
    const tagset = await this.api.getTagset();
    this.workbench = new Workbench(this.api, tagset);
    await this.showDocuments();

    window.addEventListener("keydown", (event) => {
      void this.onKey(event);
    });
    el("app").addEventListener("click", (event) => {
      void this.onClick(event);
    });
  }

  private async showDocuments(): Promise<void> {
    if (!this.api) return;
    this.documents = await this.api.listDocuments();
    this.view = "documents";
    this.render();
  }

  private async openDocument(docId: string): Promise<void> {
    if (!this.workbench) return;
    try {
      await this.workbench.openDocument(docId);
      this.view = "annotate";
      this.banner = null;
    } catch (error) {
      this.banner = error instanceof ApiError ? error.message : String(error);
    }
    this.render();
  }

  private async onKey(event: KeyboardEvent): Promise<void> {
    if (!this.workbench) return;
    if (this.view === "annotate") {
      if (event.key === "q" && !this.workbench.picker.isOpen) {
        await this.workbench.closeDocument();
        await this.showDocuments();
        return;
      }
      event.preventDefault();
      await this.workbench.handleKey(event.key);
      if (event.key === "A" || event.key === "Enter") {
        await this.workbench.refreshProgress();
      }
      this.render();
      return;
    }
    if (this.view === "documents" && event.key === "Enter") {
      const focused = document.activeElement as HTMLElement | null;
      const docId = focused?.dataset?.doc;
      if (docId) await this.openDocument(docId);
    }
  }

  private async onClick(event: Event): Promise<void> {
    const target = event.target as HTMLElement | null;
    const row = target?.closest<HTMLElement>("[data-doc]");
    if (row?.dataset.doc && this.view === "documents") {
      await this.openDocument(row.dataset.doc);
    }
  }

  private render(): void {
    const root = el("app");
    if (this.view === "documents" || !this.workbench) {
      root.innerHTML = `
        <h1>Annotation workbench</h1>
        ${renderBanner(this.banner)}
        ${renderDocumentList(this.documents)}
        <p class="hint">Click a document (or focus + Enter) to claim it.</p>`;
      return;
    }
    const wb = this.workbench;
    const sentences = wb.sentences
      .map((s, i) => renderSentence(s, wb.cursor, i === wb.cursor.sentence))
      .join("");
    root.innerHTML = `
      <h1>${wb.activeDocument ?? ""}</h1>
      ${renderBanner(wb.banner)}
      ${renderProgress(wb.progress)}
      ${renderHelp()}
      <div class="sentences">${sentences}</div>
      ${renderPicker(wb.picker)}
      <p class="hint">q releases the claim and returns to the list.</p>`;
  }
}

void new App().start();
