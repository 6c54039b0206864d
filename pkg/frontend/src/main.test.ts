// Acceptance-level tests: drive the real page markup through init() with a
// faked service and assert on the rendered DOM.

import { beforeEach, describe, expect, it, vi } from "vitest";

import type { SearchResponse } from "./api.js";
import { init } from "./main.js";
import { fakeFetch, flushTasks, mountPage, type RouteReply } from "./testutil.js";
import fixtures from "./fixtures.json";

function elements() {
  return {
    form: document.getElementById("search-form") as HTMLFormElement,
    text: document.getElementById("text-input") as HTMLInputElement,
    math: document.getElementById("math-input") as HTMLInputElement,
    alpha: document.getElementById("alpha-toggle") as HTMLInputElement,
    submit: document.getElementById("submit-button") as HTMLButtonElement,
    validity: document.getElementById("math-validity") as HTMLElement,
    mathError: document.getElementById("math-error") as HTMLElement,
    banner: document.getElementById("network-banner") as HTMLElement,
    results: document.getElementById("results") as HTMLElement,
  };
}

function type(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function submit(form: HTMLFormElement): void {
  form.dispatchEvent(new Event("submit", { cancelable: true }));
}

beforeEach(() => {
  mountPage();
});

describe("submit gating", () => {
  it("starts disabled and stays disabled while both fields are empty", () => {
    init(document, fakeFetch(() => ({ status: 200, body: fixtures.search_empty })));
    const ui = elements();
    expect(ui.submit.disabled).toBe(true);
    type(ui.text, "   ");
    expect(ui.submit.disabled).toBe(true);
    type(ui.math, "?w");
    expect(ui.submit.disabled).toBe(false);
    type(ui.math, "");
    expect(ui.submit.disabled).toBe(true);
  });
});

describe("the two-field scenario", () => {
  it("renders one card with one formula sub-item and the bindings", async () => {
    const fetchFn = fakeFetch((url) =>
      url === "/api/search"
        ? { status: 200, body: fixtures.search_fig2 }
        : { status: 200, body: fixtures.render_ok },
    );
    init(document, fetchFn);
    const ui = elements();
    type(ui.text, "Gröbner");
    type(ui.math, "a?x^2+b?y^2+?z");
    submit(ui.form);
    await flushTasks();

    const cards = ui.results.querySelectorAll(".result-card");
    expect(cards.length).toBe(1);
    const card = cards[0]!;
    expect(card.querySelector(".result-title")?.textContent).toBe(
      "Stable Normal Forms for Polynomial System Solving",
    );
    expect(card.querySelector(".snippet")?.textContent).toContain("Gröbner");

    const hits = card.querySelectorAll(".formula-hit");
    expect(hits.length).toBe(1);
    expect(hits[0]!.querySelector(".formula-latex")?.textContent).toBe(
      "p_1=ax_1^2+bx_2^2+\\epsilon_1x_1y_1",
    );
    const bindings = [...hits[0]!.querySelectorAll(".binding")].map(
      (b) => b.textContent,
    );
    expect(bindings).toEqual([
      "?x → x_{1}",
      "?y → x_{2}",
      "?z → \\epsilon_{1}x_{1}y_{1}",
    ]);

    // the search request carried exactly the two fields
    const searchCall = fetchFn.calls.find((c) => c[0] === "/api/search");
    expect(searchCall?.[1]).toEqual({
      text: "Gröbner",
      math: "a?x^2+b?y^2+?z",
      limit: 10,
    });
  });

  it("maps the alpha toggle onto the request", async () => {
    const fetchFn = fakeFetch(() => ({ status: 200, body: fixtures.search_empty }));
    init(document, fetchFn);
    const ui = elements();
    type(ui.math, "C_{q+m}");
    ui.alpha.checked = true;
    ui.alpha.dispatchEvent(new Event("change", { bubbles: true }));
    submit(ui.form);
    await flushTasks();
    const searchCall = fetchFn.calls.find((c) => c[0] === "/api/search");
    expect(searchCall?.[1]).toMatchObject({ math: "C_{q+m}", alpha: true });
  });
});

describe("result ordering", () => {
  it("renders results exactly in the order the service returned", async () => {
    const body: SearchResponse = {
      results: ["z-doc", "a-doc", "m-doc"].map((id) => ({
        doc_id: id,
        title: id.toUpperCase(),
        snippet: id,
        formula_hits: [],
      })),
      total: 3,
      timings: { text_ms: 0, math_ms: 0 },
    };
    init(document, fakeFetch(() => ({ status: 200, body })));
    const ui = elements();
    type(ui.text, "anything");
    submit(ui.form);
    await flushTasks();
    const titles = [...ui.results.querySelectorAll(".result-title")].map(
      (t) => t.textContent,
    );
    expect(titles).toEqual(["Z-DOC", "A-DOC", "M-DOC"]);
  });
});

describe("math parse errors", () => {
  it("renders inline under the math field with the caret at the offset", async () => {
    const fetchFn = fakeFetch((url) =>
      url === "/api/search"
        ? { status: 422, body: fixtures.parse_error_422.body }
        : { status: 200, body: fixtures.render_ok },
    );
    init(document, fetchFn);
    const ui = elements();
    type(ui.math, "a?x^2+b?(");
    submit(ui.form);
    await flushTasks();

    expect(ui.mathError.hidden).toBe(false);
    const pre = ui.mathError.querySelector("pre")!;
    const [sourceLine, caretLine] = pre.textContent!.split("\n");
    expect(sourceLine).toBe("a?x^2+b?(");
    expect(caretLine).toBe(" ".repeat(7) + "^"); // byte offset 7 -> column 7
    expect(ui.mathError.querySelector(".parse-error-message")?.textContent).toContain(
      "unexpected-token",
    );
    // typing again clears the marker
    type(ui.math, "a?x^2+b?y");
    expect(ui.mathError.hidden).toBe(true);
  });
});

describe("network failures", () => {
  it("shows a banner whose retry re-runs the search", async () => {
    let fail = true;
    const fetchFn = fakeFetch((url): RouteReply => {
      if (url === "/api/search" && fail) {
        throw new Error("boom");
      }
      return { status: 200, body: fixtures.search_fig2 };
    });
    init(document, fetchFn);
    const ui = elements();
    type(ui.text, "Gröbner");
    submit(ui.form);
    await flushTasks();
    expect(ui.banner.hidden).toBe(false);
    expect(ui.banner.textContent).toContain("boom");

    fail = false;
    (ui.banner.querySelector("button.retry") as HTMLButtonElement).click();
    await flushTasks();
    expect(ui.banner.hidden).toBe(true);
    expect(ui.results.querySelectorAll(".result-card").length).toBe(1);
  });
});

describe("stale responses", () => {
  it("drops a slow first response that a second submit superseded", async () => {
    const slowBody: SearchResponse = {
      results: [
        { doc_id: "old", title: "OLD", snippet: "old", formula_hits: [] },
      ],
      total: 1,
      timings: { text_ms: 0, math_ms: 0 },
    };
    let firstResolve: ((r: RouteReply) => void) | undefined;
    let callCount = 0;
    const fetchFn = fakeFetch((url): Promise<RouteReply> | RouteReply => {
      if (url !== "/api/search") {
        return { status: 200, body: fixtures.render_ok };
      }
      callCount += 1;
      if (callCount === 1) {
        return new Promise((resolve) => {
          firstResolve = resolve;
        });
      }
      return { status: 200, body: fixtures.search_fig2 };
    });
    init(document, fetchFn);
    const ui = elements();
    type(ui.text, "first");
    submit(ui.form);
    type(ui.text, "second");
    submit(ui.form);
    await flushTasks();
    // the fast second response is on screen
    expect(ui.results.textContent).toContain("Stable Normal Forms");
    // the slow first response arrives late and must not replace it
    firstResolve!({ status: 200, body: slowBody });
    await flushTasks();
    expect(ui.results.textContent).not.toContain("OLD");
    expect(ui.results.textContent).toContain("Stable Normal Forms");
  });
});

describe("live validation", () => {
  it("debounces and shows valid / invalid / neutral", async () => {
    vi.useFakeTimers();
    const fetchFn = fakeFetch((url, payload) => {
      if (url !== "/api/render") {
        return { status: 200, body: fixtures.search_empty };
      }
      const latex = (payload as { latex: string }).latex;
      return latex.includes("unknowncmd")
        ? { status: 422, body: fixtures.render_bad.body }
        : { status: 200, body: fixtures.render_ok };
    });
    init(document, fetchFn);
    const ui = elements();

    type(ui.math, "?x");
    await vi.advanceTimersByTimeAsync(260);
    expect(ui.validity.dataset.validity).toBe("valid");

    type(ui.math, "\\unknowncmd");
    await vi.advanceTimersByTimeAsync(260);
    expect(ui.validity.dataset.validity).toBe("invalid");
    expect(ui.validity.textContent).toContain("unknown");

    type(ui.math, "");
    await vi.advanceTimersByTimeAsync(260);
    expect(ui.validity.dataset.validity).toBe("neutral");
    expect(ui.validity.textContent).toBe("");

    // only render calls for the two nonempty values: debounce coalesced
    const renderCalls = fetchFn.calls.filter((c) => c[0] === "/api/render");
    expect(renderCalls.length).toBe(2);
    vi.useRealTimers();
  });
});
