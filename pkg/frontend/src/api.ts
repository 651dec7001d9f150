/** Typed client for the rule-learning service.
 *
 * All network traffic in the app goes through this module; the UI holds
 * no synthesis logic of its own. At most one suggest request is in
 * flight per column — issuing a new one aborts the previous.
 */

export interface ExampleMark {
  row: number;
  format: string;
}

export interface RuleJson {
  format: string;
  disjuncts: unknown[][];
}

export interface Suggestion {
  rule: RuleJson;
  formula: string;
  mask: boolean[];
  score: number;
  features: Record<string, number>;
}

export interface SuggestResponse {
  suggestions: Record<string, Suggestion[]>;
  diagnostics: {
    pool_size: number;
    cluster_rounds: number;
    candidates: Record<string, number>;
    failures: Record<string, string>;
    elapsed_ms: number;
  };
}

export interface ApplyResponse {
  mask: boolean[];
  formula: string;
  warnings: string[];
}

export interface ServiceConfigInfo {
  handraise_threshold: number;
}

/** A structured error response from the service. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly path?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  /** True for "nothing to learn yet" outcomes the UI should soften
   * into an "add more examples" hint rather than an error. */
  get needsMoreExamples(): boolean {
    return (
      this.status === 422 &&
      (this.code === "no_candidates" || this.code === "no_predicates")
    );
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inflight = new Map<string | number, AbortController>();

  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  async health(): Promise<{ status: string }> {
    return this.request("GET", "/v1/health");
  }

  async config(): Promise<ServiceConfigInfo> {
    return this.request("GET", "/v1/config");
  }

  /** Learn rules for one column. A second call for the same column
   * aborts the first (later edits cancel and reissue). */
  async suggest(
    table: string,
    column: string | number,
    examples: ExampleMark[],
    topK = 3,
  ): Promise<SuggestResponse> {
    this.inflight.get(column)?.abort();
    const controller = new AbortController();
    this.inflight.set(column, controller);
    try {
      return await this.request(
        "POST",
        "/v1/suggest",
        { table, column, examples, top_k: topK },
        controller.signal,
      );
    } finally {
      if (this.inflight.get(column) === controller) {
        this.inflight.delete(column);
      }
    }
  }

  async apply(
    table: string,
    column: string | number,
    rule: RuleJson,
  ): Promise<ApplyResponse> {
    return this.request("POST", "/v1/apply", { table, column, rule });
  }

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      const err = (payload as { error?: Record<string, string> }).error ?? {};
      throw new ApiError(
        resp.status,
        err.code ?? "unknown",
        err.message ?? `request failed with status ${resp.status}`,
        err.path,
      );
    }
    return payload as T;
  }
}
