// Wire the two-field form to the service: submit runs a combined search,
// the math field live-validates against /api/render as you type.

import { postRender, postSearch, type FetchLike, type SearchRequest } from "./api.js";
import {
  LatestOnly,
  canSubmit,
  debounce,
  initialState,
  toSearchRequest,
  type UiQueryState,
} from "./state.js";
import {
  clearNetworkBanner,
  clearParseError,
  renderNetworkBanner,
  renderParseError,
  renderResults,
  renderValidity,
} from "./view.js";

const LIVE_VALIDATE_DELAY_MS = 250;

interface Elements {
  form: HTMLFormElement;
  text: HTMLInputElement;
  math: HTMLInputElement;
  alpha: HTMLInputElement;
  limit: HTMLInputElement;
  submit: HTMLButtonElement;
  validity: HTMLElement;
  mathError: HTMLElement;
  banner: HTMLElement;
  results: HTMLElement;
}

function grab(root: Document): Elements {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = root.getElementById(id);
    if (!node) {
      throw new Error(`missing element #${id}`);
    }
    return node as T;
  };
  return {
    form: byId("search-form"),
    text: byId("text-input"),
    math: byId("math-input"),
    alpha: byId("alpha-toggle"),
    limit: byId("limit-input"),
    submit: byId("submit-button"),
    validity: byId("math-validity"),
    mathError: byId("math-error"),
    banner: byId("network-banner"),
    results: byId("results"),
  };
}

export function init(root: Document = document, fetchFn: FetchLike = fetch): void {
  const ui = grab(root);
  const state: UiQueryState = { ...initialState };
  const searches = new LatestOnly();

  const refreshSubmit = (): void => {
    ui.submit.disabled = !canSubmit(state);
  };

  const liveValidate = debounce(async (source: string) => {
    if (!source.trim()) {
      renderValidity(ui.validity, "neutral");
      return;
    }
    const outcome = await postRender(source, true, fetchFn);
    if (source !== state.math) {
      return; // the field moved on while the request was in flight
    }
    if (outcome.kind === "ok") {
      renderValidity(ui.validity, "valid");
    } else if (outcome.kind === "parse-error") {
      renderValidity(ui.validity, "invalid", outcome.error.message);
    } else {
      renderValidity(ui.validity, "neutral");
    }
  }, LIVE_VALIDATE_DELAY_MS);

  const runSearch = async (request: SearchRequest): Promise<void> => {
    const ticket = searches.begin();
    clearNetworkBanner(ui.banner);
    clearParseError(ui.mathError);
    const outcome = await postSearch(request, fetchFn);
    if (!searches.isCurrent(ticket)) {
      return; // a newer submission superseded this one
    }
    switch (outcome.kind) {
      case "ok":
        renderResults(ui.results, outcome.body);
        break;
      case "parse-error":
        renderParseError(ui.mathError, state.math, outcome.error);
        break;
      case "bad-request":
        renderNetworkBanner(ui.banner, outcome.message, () => void runSearch(request));
        break;
      case "network":
        renderNetworkBanner(ui.banner, outcome.message, () => void runSearch(request));
        break;
    }
  };

  ui.text.addEventListener("input", () => {
    state.text = ui.text.value;
    refreshSubmit();
  });
  ui.math.addEventListener("input", () => {
    state.math = ui.math.value;
    refreshSubmit();
    clearParseError(ui.mathError);
    liveValidate(state.math);
  });
  ui.alpha.addEventListener("change", () => {
    state.alpha = ui.alpha.checked;
  });
  ui.limit.addEventListener("change", () => {
    const parsed = Number.parseInt(ui.limit.value, 10);
    state.limit = Number.isFinite(parsed) && parsed > 0 ? parsed : 10;
  });
  ui.form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!canSubmit(state)) {
      return;
    }
    void runSearch(toSearchRequest(state));
  });

  refreshSubmit();
}

// In the served bundle the script tag runs after the body exists.
if (typeof window !== "undefined" && window.document.getElementById("search-form")) {
  init(window.document);
}
