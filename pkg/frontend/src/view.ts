// DOM rendering.  One card per document, formula hits as indented
// sub-items; results render in exactly the order the service returned.

import type { DocResult, FormulaHit, ParseErrorInfo, SearchResponse } from "./api.js";
import { utf8OffsetToCharIndex } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function formulaHitItem(hit: FormulaHit): HTMLElement {
  const item = el("li", "formula-hit");
  const code = el("code", "formula-latex", hit.formula_latex);
  item.appendChild(code);
  item.appendChild(el("span", "hit-score", ` score ${hit.score}`));
  if (hit.substitution.length > 0) {
    const bindings = el("ul", "substitution");
    for (const pair of hit.substitution) {
      const row = el("li", "binding");
      row.appendChild(el("span", "wildcard", `?${pair.wildcard}`));
      row.appendChild(document.createTextNode(" → "));
      row.appendChild(el("code", undefined, pair.latex));
      bindings.appendChild(row);
    }
    item.appendChild(bindings);
  }
  if (hit.renaming && hit.renaming.length > 0) {
    const note = hit.renaming.map((r) => `${r.from}→${r.to}`).join(", ");
    item.appendChild(el("span", "renaming", ` (renaming ${note})`));
  }
  return item;
}

function resultCard(result: DocResult): HTMLElement {
  const card = el("article", "result-card");
  const heading = el("h3", "result-title", result.title);
  card.appendChild(heading);
  const meta = el("p", "result-meta", result.doc_id);
  if (result.text_score !== undefined) {
    meta.appendChild(el("span", "text-score", ` text ${result.text_score.toFixed(4)}`));
  }
  card.appendChild(meta);
  card.appendChild(el("p", "snippet", result.snippet));
  if (result.formula_hits.length > 0) {
    const list = el("ul", "formula-hits");
    for (const hit of result.formula_hits) {
      list.appendChild(formulaHitItem(hit));
    }
    card.appendChild(list);
  }
  return card;
}

export function renderResults(container: HTMLElement, body: SearchResponse): void {
  container.replaceChildren();
  if (body.results.length === 0) {
    container.appendChild(el("p", "no-results", "No results."));
    return;
  }
  for (const result of body.results) {
    container.appendChild(resultCard(result));
  }
  container.appendChild(
    el("p", "total-line", `${body.total} matching document(s)`),
  );
}

// The marker sits under the math field: the source line, a caret line
// pointing at the failing column, then the message.  Monospace alignment
// makes the column land under the offending character.
export function renderParseError(
  container: HTMLElement,
  source: string,
  error: ParseErrorInfo,
): void {
  container.replaceChildren();
  const column = utf8OffsetToCharIndex(source, error.position);
  const block = el("pre", "parse-error");
  block.textContent = `${source}\n${" ".repeat(column)}^\n`;
  container.appendChild(block);
  container.appendChild(
    el("p", "parse-error-message", `${error.kind}: ${error.message}`),
  );
  container.hidden = false;
}

export function clearParseError(container: HTMLElement): void {
  container.replaceChildren();
  container.hidden = true;
}

export function renderNetworkBanner(
  container: HTMLElement,
  message: string,
  onRetry: () => void,
): void {
  container.replaceChildren();
  container.appendChild(el("span", "banner-text", `Request failed: ${message} `));
  const retry = el("button", "retry", "Retry");
  retry.type = "button";
  retry.addEventListener("click", onRetry);
  container.appendChild(retry);
  container.hidden = false;
}

export function clearNetworkBanner(container: HTMLElement): void {
  container.replaceChildren();
  container.hidden = true;
}

export type Validity = "neutral" | "valid" | "invalid";

export function renderValidity(target: HTMLElement, validity: Validity, detail = ""): void {
  target.dataset.validity = validity;
  target.textContent =
    validity === "neutral" ? "" : validity === "valid" ? "✓ parses" : `✗ ${detail}`;
}
