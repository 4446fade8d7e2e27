/** Entry point: wire the API client, store, and view together. */

import { Api } from "./api.js";
import { SessionStore } from "./store.js";
import { mount } from "./view.js";

export function bootstrap(root: HTMLElement, serviceUrl: string): SessionStore {
  const store = new SessionStore(new Api(serviceUrl));
  mount(root, store);
  return store;
}

// In the browser, mount into #app; the service URL can be overridden with
// ?service=http://host:port (default: a local service on port 8000).
const root = typeof document === "undefined" ? null : document.getElementById("app");
if (root) {
  const params = new URLSearchParams(window.location.search);
  bootstrap(root, params.get("service") ?? "http://127.0.0.1:8000");
}
