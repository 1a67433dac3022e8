import { beforeEach, describe, expect, it } from "vitest";

import type {
  AnnotationApi,
  DocumentSummary,
  Progress,
  SentenceData,
  SentenceWindow,
  TagsetTree,
  TokenData,
  TokenTag,
} from "../src/api.js";
import { Workbench } from "../src/workbench.js";
import served from "./fixtures/tagset.json";

const tree = served as TagsetTree;

function conventionFor(leaf: string): string {
  const walk = (nodes: typeof tree.categories): string | null => {
    for (const n of nodes) {
      if (n.label === leaf) return n.convention;
      const hit = walk(n.children);
      if (hit) return hit;
    }
    return null;
  };
  const conv = walk(tree.categories);
  if (!conv) throw new Error(`no such leaf ${leaf}`);
  return conv;
}

function tag(leaf: string, provenance: string): TokenTag {
  return {
    convention: conventionFor(leaf),
    leaf_label: leaf,
    provenance,
    is_leaf: true,
  };
}

/** The 3-token fixture: "du" suggested QT__QTC, "go" suggested RP__CL, "ge" untagged. */
function fixtureSentence(): SentenceData {
  return {
    id: "d1.0001",
    text: "du go ge",
    status: "autotagged",
    tokens: [
      { surface: "du", span: [0, 2], tag: tag("QTC", "auto") },
      { surface: "go", span: [3, 5], tag: tag("CL", "auto") },
      { surface: "ge", span: [6, 8], tag: null },
    ],
  };
}

class RecordingApi implements AnnotationApi {
  calls: string[] = [];
  sentence: SentenceData = fixtureSentence();
  failNextWrite = false;

  async getTagset(): Promise<TagsetTree> {
    this.calls.push("getTagset");
    return tree;
  }

  async listDocuments(): Promise<DocumentSummary[]> {
    this.calls.push("listDocuments");
    return [];
  }

  async claim(docId: string): Promise<void> {
    this.calls.push(`claim ${docId}`);
  }

  async release(docId: string): Promise<void> {
    this.calls.push(`release ${docId}`);
  }

  async getSentences(docId: string): Promise<SentenceWindow> {
    this.calls.push(`getSentences ${docId}`);
    return {
      doc_id: docId,
      total: 1,
      from: 0,
      sentences: [structuredClone(this.sentence)],
    };
  }

  async getProgress(docId: string): Promise<Progress> {
    this.calls.push(`getProgress ${docId}`);
    const tokens = this.sentence.tokens;
    const manual = tokens.filter((t) => t.tag?.provenance === "manual").length;
    const auto = tokens.filter((t) => t.tag && t.tag.provenance !== "manual").length;
    return {
      total_tokens: tokens.length,
      manual,
      auto,
      untagged: tokens.length - manual - auto,
    };
  }

  private failIfRequested(): void {
    if (this.failNextWrite) {
      this.failNextWrite = false;
      throw new Error("ClaimRequired: no active claim on document 'd1'");
    }
  }

  async putTag(sentenceId: string, index: number, leaf: string): Promise<TokenData> {
    this.calls.push(`putTag ${sentenceId} ${index} ${leaf}`);
    this.failIfRequested();
    this.sentence.tokens[index].tag = tag(leaf, "manual");
    return structuredClone(this.sentence.tokens[index]);
  }

  async confirmToken(sentenceId: string, index: number): Promise<TokenData> {
    this.calls.push(`confirmToken ${sentenceId} ${index}`);
    this.failIfRequested();
    const t = this.sentence.tokens[index];
    if (t.tag) t.tag.provenance = "manual";
    return structuredClone(t);
  }

  async confirmAll(sentenceId: string): Promise<number> {
    this.calls.push(`confirmAll ${sentenceId}`);
    this.failIfRequested();
    let n = 0;
    for (const t of this.sentence.tokens) {
      if (t.tag && t.tag.provenance !== "manual") {
        t.tag.provenance = "manual";
        n += 1;
      }
    }
    return n;
  }

  async autotagDocument(docId: string): Promise<number> {
    this.calls.push(`autotag ${docId}`);
    return 0;
  }

  writeCalls(): string[] {
    return this.calls.filter(
      (c) => c.startsWith("putTag") || c.startsWith("confirm") || c.startsWith("autotag"),
    );
  }
}

describe("workbench flows on the 3-token fixture", () => {
  let api: RecordingApi;
  let wb: Workbench;

  beforeEach(async () => {
    api = new RecordingApi();
    wb = new Workbench(api, tree);
    await wb.openDocument("d1");
    api.calls = [];
  });

  it("opening a document claims it and loads sentences", async () => {
    const fresh = new RecordingApi();
    const w = new Workbench(fresh, tree);
    await w.openDocument("d1");
    expect(fresh.calls).toEqual(["claim d1", "getSentences d1", "getProgress d1"]);
    expect(w.sentences).toHaveLength(1);
    expect(w.currentToken()?.surface).toBe("du");
  });

  it("Enter on a suggested token issues exactly one confirm call", async () => {
    await wb.handleKey("Enter");
    expect(api.writeCalls()).toEqual(["confirmToken d1.0001 0"]);
    expect(wb.pendingWrites).toHaveLength(0);
    expect(wb.cursor.token).toBe(1); // advanced to the next token
  });

  it("Esc on a suggestion clears it locally and issues no requests", async () => {
    expect(wb.currentToken()?.tag?.provenance).toBe("auto");
    await wb.handleKey("Escape");
    expect(api.writeCalls()).toEqual([]);
    expect(wb.currentToken()?.tag).toBeNull();
    expect(wb.picker.isOpen).toBe(true);
    expect(wb.picker.breadcrumb()).toEqual([]); // opens at top level
  });

  it("Esc then picking a tag issues exactly one putTag call", async () => {
    await wb.handleKey("Escape");
    await wb.handleKey("4"); // V
    await wb.handleKey("1"); // VM
    await wb.handleKey("1"); // VF -> emit
    expect(api.writeCalls()).toEqual(["putTag d1.0001 0 VF"]);
    const token = wb.sentences[0].tokens[0];
    expect(token.tag?.convention).toBe("V__VM__VF"); // server-derived string applied
    expect(token.tag?.provenance).toBe("manual");
  });

  it("Enter on an untagged token opens the picker instead of writing", async () => {
    await wb.handleKey("ArrowRight");
    await wb.handleKey("ArrowRight"); // cursor on "ge"
    await wb.handleKey("Enter");
    expect(api.writeCalls()).toEqual([]);
    expect(wb.picker.isOpen).toBe(true);
  });

  it("confirm-all issues one request when suggestions exist", async () => {
    await wb.handleKey("A");
    expect(api.writeCalls()).toEqual(["confirmAll d1.0001"]);
    const provs = wb.sentences[0].tokens.map((t) => t.tag?.provenance ?? null);
    expect(provs).toEqual(["manual", "manual", null]);
  });

  it("confirm-all with zero suggestions issues no requests", async () => {
    await wb.handleKey("A"); // first confirm-all flips both
    api.calls = [];
    await wb.handleKey("A");
    expect(api.calls).toEqual([]);
  });

  it("manual tags are never re-confirmed by Enter", async () => {
    await wb.handleKey("Enter"); // confirm token 0
    api.calls = [];
    wb.cursor.token = 0;
    await wb.handleKey("Enter"); // already manual: opens picker instead
    expect(api.writeCalls()).toEqual([]);
    expect(wb.picker.isOpen).toBe(true);
  });

  it("after a drain local state equals a fresh server fetch", async () => {
    await wb.handleKey("Enter"); // confirm du
    await wb.handleKey("Enter"); // confirm go
    const fresh = await api.getSentences("d1");
    expect(wb.sentences).toEqual(fresh.sentences);
    expect(wb.pendingWrites).toHaveLength(0);
  });

  it("a rejected write surfaces a banner, re-queues nothing, reconciles", async () => {
    api.failNextWrite = true;
    await wb.handleKey("Enter");
    expect(wb.banner).toContain("ClaimRequired");
    expect(wb.pendingWrites).toHaveLength(0);
    // exactly one write attempt plus the reconciling re-fetch
    expect(api.writeCalls()).toEqual(["confirmToken d1.0001 0"]);
    expect(api.calls.filter((c) => c.startsWith("getSentences"))).toHaveLength(1);
    const fresh = await api.getSentences("d1");
    expect(wb.sentences).toEqual(fresh.sentences);
  });

  it("cursor stays inside the sentence", async () => {
    await wb.handleKey("ArrowLeft");
    expect(wb.cursor.token).toBe(0);
    for (let i = 0; i < 9; i += 1) await wb.handleKey("ArrowRight");
    expect(wb.cursor.token).toBe(2);
  });

  it("q-equivalent close releases the claim", async () => {
    await wb.closeDocument();
    expect(api.calls).toContain("release d1");
    expect(wb.activeDocument).toBeNull();
  });
});
