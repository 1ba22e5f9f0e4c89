// DOM wiring: sidebar filters, search controls, result list, banners.

import { Facets } from './api.js';
import { renderMath, escapeHtml } from './math.js';
import { HitViewModel, SearchStore, UiSearchState } from './state.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function checkboxGroup(
  container: HTMLElement,
  title: string,
  options: Array<{ value: string; label: string }>,
  onChange: (selected: string[]) => void,
): void {
  const block = el('div', 'facet-block');
  block.appendChild(el('h3', undefined, title));
  const chosen = new Set<string>();
  for (const option of options) {
    const row = el('label', 'facet-option');
    const box = el('input');
    box.type = 'checkbox';
    box.value = option.value;
    box.addEventListener('change', () => {
      if (box.checked) chosen.add(option.value);
      else chosen.delete(option.value);
      onChange([...chosen]);
    });
    row.appendChild(box);
    row.appendChild(document.createTextNode(' ' + option.label));
    block.appendChild(row);
  }
  container.appendChild(block);
}

export function renderSidebar(container: HTMLElement, facets: Facets | null, store: SearchStore): void {
  container.textContent = '';
  if (!facets) {
    // Facet load failed: degrade to free-text tag entry.
    const block = el('div', 'facet-block');
    block.appendChild(el('h3', undefined, 'Tags (comma separated)'));
    const input = el('input');
    input.type = 'text';
    input.addEventListener('change', () => {
      store.state.activeFilters.tags = input.value
        .split(',')
        .map((t) => t.trim())
        .filter(Boolean);
    });
    block.appendChild(input);
    container.appendChild(block);
    return;
  }

  checkboxGroup(
    container,
    'Statement type',
    Object.entries(facets.thm_types).map(([value, count]) => ({
      value,
      label: `${value} (${count})`,
    })),
    (selected) => {
      store.state.activeFilters.thm_types = selected;
    },
  );
  checkboxGroup(
    container,
    'Tags',
    facets.tags.map((tag) => ({ value: tag, label: tag })),
    (selected) => {
      store.state.activeFilters.tags = selected;
    },
  );
  checkboxGroup(
    container,
    'Authors',
    facets.authors.map((a) => ({ value: a.name, label: `${a.name} (${a.count})` })),
    (selected) => {
      store.state.activeFilters.authors = selected;
    },
  );

  const yearBlock = el('div', 'facet-block');
  yearBlock.appendChild(el('h3', undefined, 'Year'));
  const low = el('input');
  const high = el('input');
  low.type = high.type = 'number';
  if (facets.years) {
    low.placeholder = String(facets.years.min);
    high.placeholder = String(facets.years.max);
  }
  const applyYears = () => {
    if (low.value && high.value) {
      store.state.activeFilters.year_range = [Number(low.value), Number(high.value)];
    } else {
      delete store.state.activeFilters.year_range;
    }
  };
  low.addEventListener('change', applyYears);
  high.addEventListener('change', applyYears);
  yearBlock.appendChild(low);
  yearBlock.appendChild(document.createTextNode(' – '));
  yearBlock.appendChild(high);
  container.appendChild(yearBlock);

  const pubBlock = el('label', 'facet-block facet-option');
  const pub = el('input');
  pub.type = 'checkbox';
  pub.addEventListener('change', () => {
    store.state.activeFilters.published_only = pub.checked;
  });
  pubBlock.appendChild(pub);
  pubBlock.appendChild(document.createTextNode(' published only'));
  container.appendChild(pubBlock);
}

function renderHit(hit: HitViewModel, store: SearchStore): HTMLElement {
  const card = el('article', 'hit');
  const title = el('h2');
  title.textContent = `${hit.rank}. ${hit.name}`;
  card.appendChild(title);

  card.appendChild(el('p', 'slogan', hit.slogan));
  const body = el('div', 'body');
  body.innerHTML = renderMath(hit.body);
  card.appendChild(body);

  const meta = el('p', 'meta');
  const journal = hit.journal ? `, ${hit.journal}` : '';
  const year = hit.year ? ` (${hit.year}${journal})` : '';
  meta.innerHTML =
    `<strong>${escapeHtml(hit.title)}</strong>${escapeHtml(year)} — ` +
    `${escapeHtml(hit.authors.join(', '))} · ${escapeHtml(hit.tags.join(' '))} · ` +
    `${hit.citations} citations · cosine ${hit.cosine.toFixed(3)}`;
  card.appendChild(meta);

  const actions = el('div', 'actions');
  if (hit.url) {
    const link = el('a', 'source-link', 'source');
    link.href = hit.url;
    link.target = '_blank';
    link.rel = 'noopener';
    actions.appendChild(link);
  }
  for (const verdict of ['up', 'down'] as const) {
    const button = el('button', `vote vote-${verdict}`);
    button.textContent = verdict === 'up' ? '👍' : '👎';
    if (hit.feedbackState === verdict) button.classList.add('selected');
    button.addEventListener('click', () => void store.sendFeedback(hit.recordId, verdict));
    actions.appendChild(button);
  }
  card.appendChild(actions);
  return card;
}

export function renderResults(container: HTMLElement, state: UiSearchState, store: SearchStore): void {
  container.textContent = '';
  if (state.loading) {
    container.appendChild(el('p', 'status', 'Searching…'));
    return;
  }
  if (state.warning) container.appendChild(el('p', 'warning', state.warning));
  if (!state.results.length) {
    if (state.tookMs !== null) container.appendChild(el('p', 'status', 'No results.'));
    return;
  }
  for (const hit of state.results) {
    container.appendChild(renderHit(hit, store));
  }
  if (state.tookMs !== null) {
    container.appendChild(el('p', 'status', `${state.results.length} results in ${state.tookMs.toFixed(1)} ms`));
  }
}

export function renderBanner(container: HTMLElement, state: UiSearchState, onDismiss: () => void): void {
  container.textContent = '';
  if (!state.error) return;
  const banner = el('div', 'banner', state.error);
  const dismiss = el('button', 'dismiss', '×');
  dismiss.addEventListener('click', onDismiss);
  banner.appendChild(dismiss);
  container.appendChild(banner);
}
