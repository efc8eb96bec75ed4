// Typed client for the consentscan service API.

export interface QueueItem {
  text: string;
  predicted: string;
  margin: number;
  position: number;
}

export interface FindingRow {
  entry_id: string;
  url: string;
  kind: string;
  severity: string;
  score_total: number | null;
  annotated_url: string;
}

export interface LabelResponse {
  ok: boolean;
  duplicate: boolean;
  text: string;
  label: string;
}

export interface RetrainResponse {
  ok: boolean;
  trained_on: number;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async fetchQueue(limit: number): Promise<QueueItem[]> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/queue?limit=${limit}`);
    const payload = await asJson<{ queue: QueueItem[] }>(response);
    return payload.queue;
  }

  async submitLabel(text: string, label: string): Promise<LabelResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text, label }),
    });
    return asJson<LabelResponse>(response);
  }

  async retrain(): Promise<RetrainResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/retrain`, { method: "POST" });
    return asJson<RetrainResponse>(response);
  }

  async fetchFindings(): Promise<FindingRow[]> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/findings`);
    const payload = await asJson<{ findings: FindingRow[] }>(response);
    return payload.findings;
  }

  async fetchAnnotatedPage(entryId: string): Promise<string | null> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/pages/${encodeURIComponent(entryId)}/annotated`,
    );
    if (response.status === 404) return null;
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }
}
