// Application bootstrap. The API base URL can be injected at serve time via
// `window.THMDX_API_BASE`; same-origin by default.

import { ApiClient } from './api.js';
import { SearchStore } from './state.js';
import { renderBanner, renderResults, renderSidebar } from './view.js';

declare global {
  interface Window {
    THMDX_API_BASE?: string;
  }
}

function bootstrap(): void {
  const api = new ApiClient(window.THMDX_API_BASE ?? '');
  const store = new SearchStore(api);

  const queryInput = document.getElementById('query') as HTMLInputElement;
  const kInput = document.getElementById('k') as HTMLInputElement;
  const lambdaInput = document.getElementById('lambda') as HTMLInputElement;
  const lambdaValue = document.getElementById('lambda-value') as HTMLElement;
  const rerankerInput = document.getElementById('reranker') as HTMLInputElement;
  const searchButton = document.getElementById('search') as HTMLButtonElement;
  const sidebar = document.getElementById('sidebar') as HTMLElement;
  const results = document.getElementById('results') as HTMLElement;
  const bannerHost = document.getElementById('banner') as HTMLElement;

  store.subscribe((state) => {
    renderResults(results, state, store);
    renderBanner(bannerHost, state, () => {
      store.state = { ...store.state, error: null };
      renderBanner(bannerHost, store.state, () => undefined);
    });
    searchButton.disabled = !state.queryText.trim() || state.loading;
  });

  const syncControls = () => {
    store.state.queryText = queryInput.value;
    store.state.k = Math.max(1, Number(kInput.value) || 10);
    store.state.citationWeight = Number(lambdaInput.value) || 0;
    store.state.useReranker = rerankerInput.checked;
    lambdaValue.textContent = store.state.citationWeight.toFixed(2);
    searchButton.disabled = !store.state.queryText.trim();
  };

  for (const input of [queryInput, kInput, lambdaInput, rerankerInput]) {
    input.addEventListener('input', syncControls);
  }
  syncControls();

  const submit = () => void store.submitSearch();
  searchButton.addEventListener('click', submit);
  queryInput.addEventListener('keydown', (event) => {
    if (event.key === 'Enter' && queryInput.value.trim()) submit();
  });

  void store.loadFacets().then((facets) => renderSidebar(sidebar, facets, store));
}

document.addEventListener('DOMContentLoaded', bootstrap);
