/**
 * Workbench state machine: one claimed document, a token cursor, a queue
 * of un-acknowledged writes, and the keyboard grammar.
 *
 * Keyboard-only operation is complete: arrows (or hjkl) move the cursor,
 * Enter accepts a suggestion or opens the picker, Esc rejects a
 * suggestion and opens the picker, "A" confirms every suggestion in the
 * sentence. Writes apply optimistically, drain in order, and a rejected
 * write is dropped (never re-queued): the error surfaces as a banner and
 * the document is re-fetched so local state matches the server again.
 */

import type {
  AnnotationApi,
  Progress,
  SentenceData,
  TagsetTree,
  TokenData,
} from "./api.js";
import { TagPicker } from "./picker.js";

export type PendingWrite =
  | { kind: "tag"; sentenceId: string; tokenIndex: number; leafLabel: string }
  | { kind: "confirm"; sentenceId: string; tokenIndex: number }
  | { kind: "confirm_all"; sentenceId: string };

export interface Cursor {
  sentence: number;
  token: number;
}

function isSuggestion(token: TokenData | null): boolean {
  return !!token && token.tag !== null && token.tag.provenance !== "manual";
}

export class Workbench {
  readonly picker: TagPicker;
  activeDocument: string | null = null;
  sentences: SentenceData[] = [];
  cursor: Cursor = { sentence: 0, token: 0 };
  pendingWrites: PendingWrite[] = [];
  banner: string | null = null;
  progress: Progress | null = null;

  constructor(
    private readonly api: AnnotationApi,
    readonly tagsetCache: TagsetTree,
  ) {
    this.picker = new TagPicker(tagsetCache);
  }

  async openDocument(docId: string): Promise<void> {
    await this.api.claim(docId);
    this.activeDocument = docId;
    const window = await this.api.getSentences(docId);
    this.sentences = window.sentences;
    this.cursor = { sentence: 0, token: 0 };
    this.progress = await this.api.getProgress(docId);
  }

  async closeDocument(finished = false): Promise<void> {
    if (this.activeDocument === null) return;
    await this.api.release(this.activeDocument, finished);
    this.activeDocument = null;
    this.sentences = [];
    this.progress = null;
  }

  currentSentence(): SentenceData | null {
    return this.sentences[this.cursor.sentence] ?? null;
  }

  currentToken(): TokenData | null {
    return this.currentSentence()?.tokens[this.cursor.token] ?? null;
  }

  moveToken(delta: number): void {
    const sentence = this.currentSentence();
    if (!sentence || sentence.tokens.length === 0) return;
    const max = sentence.tokens.length - 1;
    this.cursor.token = Math.min(max, Math.max(0, this.cursor.token + delta));
  }

  moveSentence(delta: number): void {
    if (this.sentences.length === 0) return;
    const max = this.sentences.length - 1;
    this.cursor.sentence = Math.min(max, Math.max(0, this.cursor.sentence + delta));
    this.cursor.token = 0;
  }

  /** Central keyboard dispatch; every workflow action is reachable here. */
  async handleKey(key: string): Promise<void> {
    this.banner = null;
    if (this.picker.isOpen) {
      const result = this.picker.handleKey(key);
      if (result.kind === "emitted") {
        await this.submitTag(result.leafLabel);
      }
      return;
    }
    switch (key) {
      case "ArrowRight":
      case "l":
        this.moveToken(1);
        return;
      case "ArrowLeft":
      case "h":
        this.moveToken(-1);
        return;
      case "ArrowDown":
      case "j":
        this.moveSentence(1);
        return;
      case "ArrowUp":
      case "k":
        this.moveSentence(-1);
        return;
      case "Enter":
        await this.acceptOrPick();
        return;
      case "Escape":
        this.rejectSuggestion();
        return;
      case "A":
        await this.confirmAllInSentence();
        return;
      default:
        return;
    }
  }

  /** Enter: confirm the suggestion under the cursor, else open the picker. */
  private async acceptOrPick(): Promise<void> {
    const sentence = this.currentSentence();
    const token = this.currentToken();
    if (!sentence || !token) return;
    if (isSuggestion(token)) {
      this.enqueue({
        kind: "confirm",
        sentenceId: sentence.id,
        tokenIndex: this.cursor.token,
      });
      if (token.tag) token.tag.provenance = "manual"; // optimistic
      await this.drain();
      this.moveToken(1);
      return;
    }
    this.picker.open();
  }

  /** Esc: clear the suggestion locally and open the picker at the top. */
  private rejectSuggestion(): void {
    const token = this.currentToken();
    if (!token) return;
    if (isSuggestion(token)) {
      token.tag = null; // local only; the replacement tag write overwrites server-side
    }
    this.picker.open();
  }

  /** Confirm-all for the current sentence; no request when nothing is suggested. */
  async confirmAllInSentence(): Promise<void> {
    const sentence = this.currentSentence();
    if (!sentence) return;
    const suggested = sentence.tokens.filter((t) => isSuggestion(t));
    if (suggested.length === 0) return;
    for (const token of suggested) {
      if (token.tag) token.tag.provenance = "manual"; // optimistic
    }
    this.enqueue({ kind: "confirm_all", sentenceId: sentence.id });
    await this.drain();
  }

  private async submitTag(leafLabel: string): Promise<void> {
    const sentence = this.currentSentence();
    const token = this.currentToken();
    if (!sentence || !token) return;
    token.tag = {
      convention: leafLabel, // placeholder; server derives the full string
      leaf_label: leafLabel,
      provenance: "manual",
      is_leaf: true,
    };
    this.enqueue({
      kind: "tag",
      sentenceId: sentence.id,
      tokenIndex: this.cursor.token,
      leafLabel,
    });
    await this.drain();
    this.moveToken(1);
  }

  enqueue(write: PendingWrite): void {
    this.pendingWrites.push(write);
  }

  /**
   * Send queued writes in order. On success the server's token payload
   * replaces the optimistic one, so after a drain on a healthy connection
   * local state equals a fresh fetch.
   */
  async drain(): Promise<void> {
    while (this.pendingWrites.length > 0) {
      const write = this.pendingWrites[0];
      try {
        if (write.kind === "tag") {
          const token = await this.api.putTag(
            write.sentenceId, write.tokenIndex, write.leafLabel);
          this.applyToken(write.sentenceId, write.tokenIndex, token);
        } else if (write.kind === "confirm") {
          const token = await this.api.confirmToken(write.sentenceId, write.tokenIndex);
          this.applyToken(write.sentenceId, write.tokenIndex, token);
        } else {
          await this.api.confirmAll(write.sentenceId);
        }
        this.pendingWrites.shift();
      } catch (error) {
        this.pendingWrites.shift(); // dropped, never re-queued
        this.banner = error instanceof Error ? error.message : String(error);
        await this.reconcile();
      }
    }
  }

  private applyToken(sentenceId: string, tokenIndex: number, token: TokenData): void {
    const sentence = this.sentences.find((s) => s.id === sentenceId);
    if (sentence && sentence.tokens[tokenIndex]) {
      sentence.tokens[tokenIndex] = token;
    }
  }

  /** Re-fetch the claimed document so local state matches the server. */
  async reconcile(): Promise<void> {
    if (this.activeDocument === null) return;
    const window = await this.api.getSentences(this.activeDocument);
    this.sentences = window.sentences;
    const maxSentence = Math.max(0, this.sentences.length - 1);
    this.cursor.sentence = Math.min(this.cursor.sentence, maxSentence);
    const tokens = this.currentSentence()?.tokens.length ?? 0;
    this.cursor.token = Math.min(this.cursor.token, Math.max(0, tokens - 1));
  }

  async refreshProgress(): Promise<void> {
    if (this.activeDocument === null) return;
    this.progress = await this.api.getProgress(this.activeDocument);
  }
}
