// Search state and transitions, kept separate from the DOM so the contract
// tests can drive them against a stub server.

import {
  ApiClient,
  ApiError,
  Facets,
  SearchFilters,
  SearchHit,
  SearchRequest,
  Verdict,
} from './api.js';

export type FeedbackState = 'none' | 'up' | 'down';

export interface HitViewModel {
  recordId: string;
  name: string;
  slogan: string;
  body: string;
  authors: string[];
  title: string;
  tags: string[];
  year: number;
  journal: string | null;
  citations: number;
  url: string;
  rank: number;
  cosine: number;
  feedbackState: FeedbackState;
}

export interface UiSearchState {
  queryText: string;
  k: number;
  activeFilters: SearchFilters;
  citationWeight: number;
  useReranker: boolean;
  results: HitViewModel[];
  loading: boolean;
  error: string | null;
  warning: string | null;
  tookMs: number | null;
}

export function initialState(): UiSearchState {
  return {
    queryText: '',
    k: 10,
    activeFilters: {},
    citationWeight: 0,
    useReranker: false,
    results: [],
    loading: false,
    error: null,
    warning: null,
    tookMs: null,
  };
}

function toViewModel(hit: SearchHit): HitViewModel {
  return {
    recordId: hit.record_id,
    name: hit.name,
    slogan: hit.slogan,
    body: hit.body,
    authors: hit.paper.authors,
    title: hit.paper.title,
    tags: hit.paper.tags,
    year: hit.paper.year,
    journal: hit.paper.journal,
    citations: hit.paper.citations,
    url: hit.paper.url,
    rank: hit.rank,
    cosine: hit.cosine,
    feedbackState: 'none',
  };
}

/** Drop empty filter entries so an all-clear sidebar sends no filters at all. */
export function compactFilters(filters: SearchFilters): SearchFilters | undefined {
  const out: SearchFilters = {};
  if (filters.thm_types?.length) out.thm_types = filters.thm_types;
  if (filters.authors?.length) out.authors = filters.authors;
  if (filters.tags?.length) out.tags = filters.tags;
  if (filters.doc_id) out.doc_id = filters.doc_id;
  if (filters.year_range) out.year_range = filters.year_range;
  if (filters.published_only) out.published_only = true;
  return Object.keys(out).length ? out : undefined;
}

/** Build the wire request; fields at their defaults are omitted. */
export function buildSearchRequest(state: UiSearchState): SearchRequest {
  const request: SearchRequest = { query: state.queryText, k: state.k };
  const filters = compactFilters(state.activeFilters);
  if (filters) request.filters = filters;
  if (state.citationWeight > 0) request.citation_weight = state.citationWeight;
  if (state.useReranker) request.use_reranker = true;
  return request;
}

export class SearchStore {
  state: UiSearchState = initialState();
  private inflight: AbortController | null = null;
  private listeners: Array<(state: UiSearchState) => void> = [];

  constructor(public api: ApiClient) {}

  subscribe(listener: (state: UiSearchState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Run a search; a new submission cancels the pending one. */
  async submitSearch(): Promise<void> {
    if (!this.state.queryText.trim()) return;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;

    // Results are empty while loading; kept aside so a failure can restore
    // them (error banner with prior results retained).
    const previous = this.state.results;
    this.state = { ...this.state, loading: true, results: [], error: null, warning: null };
    this.emit();
    try {
      const response = await this.api.search(buildSearchRequest(this.state), controller.signal);
      if (controller.signal.aborted) return;
      // Server rank order is preserved verbatim; the client never re-sorts.
      this.state = {
        ...this.state,
        loading: false,
        results: response.hits.map(toViewModel),
        warning: response.warning ?? null,
        tookMs: response.took_ms,
      };
    } catch (err) {
      if (controller.signal.aborted) return;
      const message = err instanceof ApiError ? err.message : 'search failed';
      this.state = { ...this.state, loading: false, results: previous, error: message };
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
    this.emit();
  }

  async loadFacets(): Promise<Facets | null> {
    try {
      return await this.api.facets();
    } catch {
      return null; // sidebar degrades to free-text filter entry
    }
  }

  /** Send a vote; the control reflects the new state only after the 202. */
  async sendFeedback(recordId: string, verdict: Verdict): Promise<void> {
    const hit = this.state.results.find((h) => h.recordId === recordId);
    if (!hit) return;
    const previous = hit.feedbackState;
    try {
      await this.api.feedback(this.state.queryText, recordId, verdict);
      this.setFeedbackState(recordId, verdict);
    } catch (err) {
      this.setFeedbackState(recordId, previous);
      const message = err instanceof ApiError ? err.message : 'feedback failed';
      this.state = { ...this.state, error: message };
      this.emit();
    }
  }

  private setFeedbackState(recordId: string, value: FeedbackState): void {
    this.state = {
      ...this.state,
      results: this.state.results.map((hit) =>
        hit.recordId === recordId ? { ...hit, feedbackState: value } : hit,
      ),
    };
    this.emit();
  }
}
