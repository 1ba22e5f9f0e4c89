// Typed client for the theorem search JSON API.

export interface SearchFilters {
  thm_types?: string[];
  authors?: string[];
  tags?: string[];
  doc_id?: string;
  year_range?: [number, number];
  published_only?: boolean;
}

export interface PaperInfo {
  title: string;
  authors: string[];
  url: string;
  tags: string[];
  year: number;
  journal: string | null;
  citations: number;
}

export interface SearchHit {
  record_id: string;
  name: string;
  slogan: string;
  body: string;
  cosine: number;
  composite: number;
  rank: number;
  paper: PaperInfo;
}

export interface SearchRequest {
  query: string;
  k?: number;
  filters?: SearchFilters;
  citation_weight?: number;
  use_reranker?: boolean;
}

export interface SearchResponse {
  hits: SearchHit[];
  took_ms: number;
  api_version: string;
  warning?: string;
}

export interface FacetAuthor {
  name: string;
  count: number;
}

export interface Facets {
  count: number;
  thm_types: Record<string, number>;
  tags: string[];
  authors: FacetAuthor[];
  years: { min: number; max: number } | null;
  publication_statuses: string[];
  api_version: string;
}

export interface TheoremDetail {
  record_id: string;
  name: string;
  slogan: string;
  body: string;
  paper: PaperInfo & Record<string, unknown>;
  [key: string]: unknown;
}

export type Verdict = 'up' | 'down';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === 'AbortError') throw err;
      throw new ApiError(0, `network error: ${String(err)}`);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = (body as { detail?: string }).detail ?? response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  async search(req: SearchRequest, signal?: AbortSignal): Promise<SearchResponse> {
    const body = await this.request<SearchResponse>('/api/search', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(req),
      signal,
    });
    if (!Array.isArray(body.hits)) {
      throw new ApiError(0, 'malformed search response: missing hits');
    }
    return body;
  }

  async facets(): Promise<Facets> {
    return this.request<Facets>('/api/facets');
  }

  async theorem(recordId: string): Promise<TheoremDetail> {
    return this.request<TheoremDetail>(`/api/theorem/${encodeURIComponent(recordId)}`);
  }

  async feedback(queryText: string, recordId: string, verdict: Verdict): Promise<void> {
    await this.request('/api/feedback', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ query_text: queryText, record_id: recordId, verdict }),
    });
  }
}
