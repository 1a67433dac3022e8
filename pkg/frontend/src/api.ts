/**
 * Typed client for the annotation service JSON API.
 *
 * The workbench talks to the service exclusively through this module; no
 * direct file access, no other transport. All write calls carry the
 * annotator's bearer token and only succeed while the annotator holds the
 * claim on the enclosing document.
 */

export interface TagsetNode {
  label: string;
  name: string;
  convention: string;
  examples: string[];
  children: TagsetNode[];
}

export interface TagsetTree {
  version: string;
  categories: TagsetNode[];
}

export interface TokenTag {
  convention: string;
  leaf_label: string;
  provenance: string;
  is_leaf: boolean;
}

export interface TokenData {
  surface: string;
  span: [number, number];
  tag: TokenTag | null;
}

export interface SentenceData {
  id: string;
  text: string;
  status: string;
  tokens: TokenData[];
}

export interface SentenceWindow {
  doc_id: string;
  total: number;
  from: number;
  sentences: SentenceData[];
}

export interface DocumentSummary {
  doc_id: string;
  subcorpus: string;
  sentences: number;
  tokens: number;
  status: string;
  claimed_by: string | null;
}

export interface Progress {
  total_tokens: number;
  manual: number;
  auto: number;
  untagged: number;
}

/** The slice of the service the workbench needs; tests substitute a recorder. */
export interface AnnotationApi {
  getTagset(): Promise<TagsetTree>;
  listDocuments(status?: string): Promise<DocumentSummary[]>;
  claim(docId: string): Promise<void>;
  release(docId: string, finished?: boolean): Promise<void>;
  getSentences(docId: string, from?: number, limit?: number): Promise<SentenceWindow>;
  getProgress(docId: string): Promise<Progress>;
  putTag(sentenceId: string, tokenIndex: number, leafLabel: string): Promise<TokenData>;
  confirmToken(sentenceId: string, tokenIndex: number): Promise<TokenData>;
  confirmAll(sentenceId: string): Promise<number>;
  autotagDocument(docId: string, mode?: string, minCount?: number): Promise<number>;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, detail: string) {
    super(`${code}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient implements AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    };
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let code = `HTTP ${response.status}`;
      let detail = response.statusText;
      try {
        const data = await response.json();
        code = data.error ?? code;
        detail = data.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }

  getTagset(): Promise<TagsetTree> {
    return this.request("GET", "/tagset");
  }

  listDocuments(status?: string): Promise<DocumentSummary[]> {
    const q = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request("GET", `/documents${q}`);
  }

  async claim(docId: string): Promise<void> {
    await this.request("POST", `/documents/${encodeURIComponent(docId)}/claim`);
  }

  async release(docId: string, finished = false): Promise<void> {
    await this.request("POST", `/documents/${encodeURIComponent(docId)}/release`, {
      finished,
    });
  }

  getSentences(docId: string, from = 0, limit = 500): Promise<SentenceWindow> {
    return this.request(
      "GET",
      `/documents/${encodeURIComponent(docId)}/sentences?from=${from}&limit=${limit}`,
    );
  }

  getProgress(docId: string): Promise<Progress> {
    return this.request("GET", `/documents/${encodeURIComponent(docId)}/progress`);
  }

  async putTag(sentenceId: string, tokenIndex: number, leafLabel: string): Promise<TokenData> {
    const data = await this.request<{ token: TokenData }>(
      "PUT",
      `/sentences/${encodeURIComponent(sentenceId)}/tokens/${tokenIndex}/tag`,
      { leaf_label: leafLabel },
    );
    return data.token;
  }

  async confirmToken(sentenceId: string, tokenIndex: number): Promise<TokenData> {
    const data = await this.request<{ token: TokenData }>(
      "POST",
      `/sentences/${encodeURIComponent(sentenceId)}/tokens/${tokenIndex}/confirm`,
    );
    return data.token;
  }

  async confirmAll(sentenceId: string): Promise<number> {
    const data = await this.request<{ confirmed: number }>(
      "POST",
      `/sentences/${encodeURIComponent(sentenceId)}/confirm-all`,
    );
    return data.confirmed;
  }

  async autotagDocument(docId: string, mode = "unambiguous_only", minCount = 1): Promise<number> {
    const data = await this.request<{ suggested: number }>(
      "POST",
      `/autotag/${encodeURIComponent(docId)}`,
      { mode, min_count: minCount },
    );
    return data.suggested;
  }
}
