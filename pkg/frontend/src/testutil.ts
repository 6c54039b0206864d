// Shared test plumbing: mount the real page markup and fake the service.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "./api.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function mountPage(): void {
  const html = readFileSync(join(HERE, "..", "index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/);
  if (!body) {
    throw new Error("index.html has no body");
  }
  // tests call init() themselves; the bundle script must not load here
  const markup = (body[1] ?? "").replace(/<script[\s\S]*?<\/script>/g, "");
  document.body.innerHTML = markup;
}

export interface RouteReply {
  status: number;
  body: unknown;
}

export type Router = (url: string, payload: unknown) => RouteReply | Promise<RouteReply>;

export function fakeFetch(router: Router): FetchLike & { calls: unknown[][] } {
  const calls: unknown[][] = [];
  const fn = (async (url: string, init?: RequestInit) => {
    const payload = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push([url, payload]);
    const reply = await router(url, payload);
    return {
      status: reply.status,
      json: async () => reply.body,
    } as Response;
  }) as FetchLike & { calls: unknown[][] };
  fn.calls = calls;
  return fn;
}

export function flushTasks(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
