// Query-form state and the small pure helpers the UI logic hangs off.

import type { SearchRequest } from "./api.js";

export interface UiQueryState {
  text: string;
  math: string;
  alpha: boolean;
  limit: number;
}

export const initialState: UiQueryState = {
  text: "",
  math: "",
  alpha: false,
  limit: 10,
};

// Submit stays disabled while both fields are empty.
export function canSubmit(state: UiQueryState): boolean {
  return state.text.trim().length > 0 || state.math.trim().length > 0;
}

// The alpha toggle maps 1:1 onto the request flag; empty fields are omitted.
export function toSearchRequest(state: UiQueryState): SearchRequest {
  const request: SearchRequest = { limit: state.limit };
  if (state.text.trim()) {
    request.text = state.text;
  }
  if (state.math.trim()) {
    request.math = state.math;
  }
  if (state.alpha) {
    request.alpha = true;
  }
  return request;
}

// At most one search is live; responses to superseded submissions are
// dropped by checking the ticket they were issued under.
export class LatestOnly {
  private seq = 0;

  begin(): number {
    this.seq += 1;
    return this.seq;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.seq;
  }
}

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A): void => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, waitMs);
  };
  wrapped.cancel = () => {
    if (timer !== undefined) {
      clearTimeout(timer);
      timer = undefined;
    }
  };
  return wrapped;
}

// Parse errors report byte offsets into the UTF-8 source; the caret in the
// UI needs the UTF-16 character index of that spot.
export function utf8OffsetToCharIndex(source: string, byteOffset: number): number {
  const encoder = new TextEncoder();
  let bytes = 0;
  let index = 0;
  for (const cp of source) {
    if (bytes >= byteOffset) {
      break;
    }
    bytes += encoder.encode(cp).length;
    index += cp.length; // surrogate pairs take two UTF-16 units
  }
  return index;
}
