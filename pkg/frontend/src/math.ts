// Dependency-free math typesetting for a small LaTeX subset.
//
// `$...$` and `\[...\]` spans are rendered with superscripts, subscripts,
// fractions, and a symbol table. Any span containing a command outside the
// supported subset falls back to verbatim monospace, so rendering never
// breaks the page.

const GREEK: Record<string, string> = {
  alpha: 'α', beta: 'β', gamma: 'γ', delta: 'δ', epsilon: 'ε', varepsilon: 'ε',
  zeta: 'ζ', eta: 'η', theta: 'θ', iota: 'ι', kappa: 'κ', lambda: 'λ', mu: 'μ',
  nu: 'ν', xi: 'ξ', pi: 'π', rho: 'ρ', sigma: 'σ', tau: 'τ', upsilon: 'υ',
  phi: 'φ', varphi: 'φ', chi: 'χ', psi: 'ψ', omega: 'ω',
  Gamma: 'Γ', Delta: 'Δ', Theta: 'Θ', Lambda: 'Λ', Xi: 'Ξ', Pi: 'Π',
  Sigma: 'Σ', Upsilon: 'Υ', Phi: 'Φ', Psi: 'Ψ', Omega: 'Ω',
};

const SYMBOLS: Record<string, string> = {
  ...GREEK,
  le: '≤', leq: '≤', ge: '≥', geq: '≥', ne: '≠', neq: '≠', equiv: '≡',
  sim: '∼', simeq: '≃', approx: '≈', cong: '≅', propto: '∝',
  in: '∈', notin: '∉', ni: '∋', subset: '⊂', subseteq: '⊆', supset: '⊃',
  supseteq: '⊇', cup: '∪', cap: '∩', setminus: '∖', emptyset: '∅',
  varnothing: '∅', times: '×', cdot: '⋅', pm: '±', mp: '∓', div: '÷',
  to: '→', rightarrow: '→', leftarrow: '←', mapsto: '↦', implies: '⇒',
  Rightarrow: '⇒', Leftarrow: '⇐', iff: '⇔', Leftrightarrow: '⇔',
  infty: '∞', partial: '∂', nabla: '∇', forall: '∀', exists: '∃',
  neg: '¬', land: '∧', wedge: '∧', lor: '∨', vee: '∨',
  sum: '∑', prod: '∏', int: '∫', oint: '∮', bigcup: '⋃', bigcap: '⋂',
  oplus: '⊕', otimes: '⊗', perp: '⊥', parallel: '∥', angle: '∠',
  ell: 'ℓ', hbar: 'ℏ', Re: 'ℜ', Im: 'ℑ', aleph: 'ℵ', prime: '′',
  circ: '∘', bullet: '•', star: '⋆', dagger: '†', ldots: '…', cdots: '⋯',
  dots: '…', vdots: '⋮', mid: '∣', nmid: '∤', sqrt: '√',
  langle: '⟨', rangle: '⟩', lfloor: '⌊', rfloor: '⌋', lceil: '⌈', rceil: '⌉',
};

// Named operators render as plain text.
const TEXT_OPERATORS = new Set([
  'sin', 'cos', 'tan', 'log', 'ln', 'exp', 'min', 'max', 'sup', 'inf',
  'lim', 'det', 'dim', 'ker', 'deg', 'gcd', 'mod', 'bmod', 'pmod', 'Hom',
]);

const SPACING = new Set([',', ';', '!', ' ', 'quad', 'qquad']);
const PASSTHROUGH = new Set(['left', 'right', 'displaystyle', 'limits']);

const BLACKBOARD: Record<string, string> = {
  C: 'ℂ', H: 'ℍ', N: 'ℕ', P: 'ℙ', Q: 'ℚ', R: 'ℝ', Z: 'ℤ',
};

function blackboard(letter: string): string {
  if (BLACKBOARD[letter]) return BLACKBOARD[letter];
  const code = letter.charCodeAt(0);
  if (code >= 65 && code <= 90) return String.fromCodePoint(0x1d538 + code - 65);
  if (code >= 97 && code <= 122) return String.fromCodePoint(0x1d552 + code - 97);
  return letter;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

class UnsupportedCommand extends Error {}

class SpanRenderer {
  private pos = 0;

  constructor(private tex: string) {}

  render(): string {
    return this.renderUntil(() => this.pos >= this.tex.length);
  }

  private renderUntil(done: () => boolean): string {
    let out = '';
    while (!done() && this.pos < this.tex.length) {
      out += this.step();
    }
    return out;
  }

  private readGroup(): string {
    // Assumes current char is '{'; returns raw group content.
    let depth = 0;
    const start = this.pos + 1;
    for (let i = this.pos; i < this.tex.length; i++) {
      const ch = this.tex[i];
      if (ch === '{') depth += 1;
      else if (ch === '}') {
        depth -= 1;
        if (depth === 0) {
          const content = this.tex.slice(start, i);
          this.pos = i + 1;
          return content;
        }
      }
    }
    throw new UnsupportedCommand('unbalanced braces');
  }

  private renderArgument(): string {
    if (this.tex[this.pos] === '{') {
      return new SpanRenderer(this.readGroup()).render();
    }
    // Single token argument: one char or one command.
    return this.step();
  }

  private step(): string {
    const ch = this.tex[this.pos];
    if (ch === '{') {
      return new SpanRenderer(this.readGroup()).render();
    }
    if (ch === '}') {
      throw new UnsupportedCommand('stray closing brace');
    }
    if (ch === '^') {
      this.pos += 1;
      return `<sup>${this.renderArgument()}</sup>`;
    }
    if (ch === '_') {
      this.pos += 1;
      return `<sub>${this.renderArgument()}</sub>`;
    }
    if (ch === '\\') {
      return this.command();
    }
    this.pos += 1;
    return escapeHtml(ch);
  }

  private command(): string {
    const rest = this.tex.slice(this.pos + 1);
    const wordMatch = /^[A-Za-z]+/.exec(rest);
    const name = wordMatch ? wordMatch[0] : rest.slice(0, 1);
    this.pos += 1 + name.length;

    if (SYMBOLS[name] !== undefined) return SYMBOLS[name];
    if (TEXT_OPERATORS.has(name)) return escapeHtml(name);
    if (SPACING.has(name)) return ' ';
    if (PASSTHROUGH.has(name)) return '';
    if (name === '{' || name === '}' || name === '%' || name === '&' || name === '#' || name === '$') {
      return escapeHtml(name);
    }
    if (name === 'mathbb') {
      const raw = this.rawArgument();
      return [...raw].map(blackboard).join('');
    }
    if (name === 'mathcal' || name === 'mathfrak' || name === 'mathscr') {
      return `<em>${escapeHtml(this.rawArgument())}</em>`;
    }
    if (name === 'mathbf' || name === 'boldsymbol') {
      return `<strong>${new SpanRenderer(this.rawArgument()).render()}</strong>`;
    }
    if (name === 'mathrm' || name === 'text' || name === 'operatorname' || name === 'textrm') {
      return escapeHtml(this.rawArgument());
    }
    if (name === 'frac') {
      const numerator = this.renderArgument();
      const denominator = this.renderArgument();
      return `<sup>${numerator}</sup>&frasl;<sub>${denominator}</sub>`;
    }
    if (name === 'overline' || name === 'bar' || name === 'hat' || name === 'tilde' || name === 'vec') {
      return this.renderArgument();
    }
    throw new UnsupportedCommand(name);
  }

  private rawArgument(): string {
    if (this.tex[this.pos] === '{') {
      return this.readGroup();
    }
    const ch = this.tex[this.pos] ?? '';
    this.pos += 1;
    return ch;
  }
}

function renderSpan(tex: string, display: boolean): string {
  const cls = display ? 'math math-display' : 'math';
  try {
    return `<span class="${cls}">${new SpanRenderer(tex).render()}</span>`;
  } catch {
    const verbatim = display ? `\\[${tex}\\]` : `$${tex}$`;
    return `<code class="math-fallback">${escapeHtml(verbatim)}</code>`;
  }
}

/**
 * Typeset a statement body. Text outside math spans is escaped; math spans
 * render with the supported subset or fall back to verbatim monospace.
 * Never throws.
 */
export function renderMath(body: string): string {
  try {
    let out = '';
    let i = 0;
    while (i < body.length) {
      if (body.startsWith('\\[', i)) {
        const end = body.indexOf('\\]', i + 2);
        if (end >= 0) {
          out += renderSpan(body.slice(i + 2, end), true);
          i = end + 2;
          continue;
        }
      }
      if (body[i] === '$' && body[i - 1] !== '\\') {
        const end = body.indexOf('$', i + 1);
        if (end > i) {
          out += renderSpan(body.slice(i + 1, end), false);
          i = end + 1;
          continue;
        }
      }
      out += escapeHtml(body[i]);
      i += 1;
    }
    return out;
  } catch {
    return `<code class="math-fallback">${escapeHtml(body)}</code>`;
  }
}
