/** DOM rendering. The whole app re-renders on every store change; the few
 * bits of pure UI state (picked variant, algorithm, discovery step) live in
 * this module and are re-applied after each rebuild.
 */

import { layoutTree } from "./layout.js";
import type { PlacedNode } from "./layout.js";
import { pathKey } from "./paths.js";
import type { SessionStore } from "./store.js";
import type { QualityRow } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

interface UiState {
  variant: number | null;
  algorithm: string;
  ipda: string | null;
  tracesText: string;
  treeText: string;
}

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

function svgEl(tag: string): SVGElement {
  return document.createElementNS(SVG_NS, tag) as SVGElement;
}

function renderBanner(store: SessionStore): HTMLElement | null {
  if (!store.unreachable) return null;
  const banner = el("div", "banner", "service unreachable — is it running?");
  banner.setAttribute("role", "alert");
  return banner;
}

function renderToast(store: SessionStore): HTMLElement | null {
  if (!store.notice) return null;
  const toast = el("div", `toast toast-${store.notice.kind}`);
  toast.setAttribute("role", "alert");
  if (store.notice.stage) {
    toast.appendChild(el("span", "toast-stage", `[${store.notice.stage}] `));
  }
  toast.appendChild(el("span", "toast-message", store.notice.message));
  return toast;
}

function parseTraces(text: string): string[][] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(",").map((a) => a.trim()).filter((a) => a));
}

function renderCreatePanel(store: SessionStore, ui: UiState): HTMLElement {
  const panel = el("section", "create-panel");
  panel.appendChild(el("h2", undefined, "New session"));
  panel.appendChild(
    el(
      "p",
      "placeholder",
      "Paste an event log to begin: one trace per line, activities separated by commas.",
    ),
  );
  const traces = el("textarea", "traces-input");
  traces.rows = 5;
  traces.placeholder = "a,b\na,c,b";
  traces.value = ui.tracesText;
  traces.addEventListener("input", () => (ui.tracesText = traces.value));
  panel.appendChild(traces);

  const tree = el("input", "tree-input");
  tree.placeholder = "initial tree (optional), e.g. ->(a,b)";
  tree.value = ui.treeText;
  tree.addEventListener("input", () => (ui.treeText = tree.value));
  panel.appendChild(tree);

  const button = el("button", "create-button", "Create session");
  button.disabled = store.busy;
  button.addEventListener("click", () => {
    void store.createSession({
      traces: parseTraces(ui.tracesText),
      tree: ui.treeText.trim() || undefined,
    });
  });
  panel.appendChild(button);
  return panel;
}

function nodeGlyphClass(node: PlacedNode): string {
  const frozen = node.info.frozen ? " frozen" : "";
  const root = node.info.frozen_root ? " frozen-root" : "";
  return `node kind-${node.info.kind}${frozen}${root}`;
}

function renderTreePanel(store: SessionStore): HTMLElement {
  const panel = el("section", "tree-panel");
  panel.appendChild(el("h2", undefined, "Model"));
  const payload = store.effectiveTree();
  if (!payload) {
    panel.appendChild(el("p", "placeholder", "No session yet."));
    return panel;
  }

  const layout = layoutTree(payload);
  const svg = svgEl("svg");
  svg.setAttribute("class", "tree-svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));

  for (const box of layout.boxes) {
    const rect = svgEl("rect");
    rect.setAttribute("class", "frozen-box");
    rect.setAttribute("x", String(box.x));
    rect.setAttribute("y", String(box.y));
    rect.setAttribute("width", String(box.width));
    rect.setAttribute("height", String(box.height));
    rect.setAttribute("data-root-id", String(box.rootId));
    svg.appendChild(rect);
  }

  for (const link of layout.links) {
    const line = svgEl("line");
    line.setAttribute("class", "link");
    line.setAttribute("x1", String(link.source.x));
    line.setAttribute("y1", String(link.source.y));
    line.setAttribute("x2", String(link.target.x));
    line.setAttribute("y2", String(link.target.y));
    svg.appendChild(line);
  }

  for (const node of layout.nodes) {
    const group = svgEl("g");
    group.setAttribute("class", nodeGlyphClass(node));
    group.setAttribute("data-path", pathKey(node.info.path));
    group.setAttribute("transform", `translate(${node.x},${node.y})`);

    const circle = svgEl("circle");
    circle.setAttribute("r", "16");
    group.appendChild(circle);

    const label = svgEl("text");
    label.setAttribute("class", "node-label");
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("dy", "0.33em");
    label.textContent = node.info.kind === "tau" ? "τ" : node.info.text;
    group.appendChild(label);

    group.addEventListener("click", () => {
      void store.toggleFrozen(node.info.path);
    });
    svg.appendChild(group);
  }

  panel.appendChild(svg);
  const text = el("pre", "tree-text", payload.text);
  panel.appendChild(text);
  return panel;
}

function renderVariantsPanel(
  store: SessionStore,
  ui: UiState,
  invalidate: () => void,
): HTMLElement {
  const panel = el("section", "variants-panel");
  panel.appendChild(el("h2", undefined, "Variants"));
  const list = el("ul", "variant-list");
  for (const variant of store.variants) {
    const item = el("li", "variant");
    item.dataset.index = String(variant.index);

    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "variant";
    radio.className = "variant-pick";
    radio.checked = ui.variant === variant.index;
    radio.addEventListener("change", () => {
      ui.variant = variant.index;
      invalidate(); // the apply button's enablement depends on the pick
    });
    item.appendChild(radio);

    item.appendChild(
      el("span", "variant-trace", variant.trace.join(", ")),
    );
    item.appendChild(el("span", "variant-count", `×${variant.count}`));
    item.appendChild(
      el(
        "span",
        variant.covered ? "badge covered" : "badge uncovered",
        variant.covered ? "covered" : "not covered",
      ),
    );
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

function renderControls(store: SessionStore, ui: UiState): HTMLElement {
  const panel = el("section", "controls-panel");
  panel.appendChild(el("h2", undefined, "Increment"));
  const view = store.view!;

  const algorithm = el("select", "algorithm-select") as HTMLSelectElement;
  for (const name of view.algorithms) {
    const option = el("option", undefined, name) as HTMLOptionElement;
    option.value = name;
    algorithm.appendChild(option);
  }
  algorithm.value = ui.algorithm;
  algorithm.addEventListener("change", () => (ui.algorithm = algorithm.value));
  panel.appendChild(algorithm);

  const ipda = el("select", "ipda-select") as HTMLSelectElement;
  for (const name of view.available_ipdas) {
    const option = el("option", undefined, name) as HTMLOptionElement;
    option.value = name;
    ipda.appendChild(option);
  }
  ipda.value = ui.ipda ?? view.ipda;
  ipda.addEventListener("change", () => (ui.ipda = ipda.value));
  panel.appendChild(ipda);

  const apply = el("button", "apply-button", "Apply");
  apply.disabled = store.busy || ui.variant === null;
  apply.addEventListener("click", () => {
    if (ui.variant === null) return;
    void store.applyIncrement({
      variant: ui.variant,
      algorithm: ui.algorithm,
      ipda: ui.ipda ?? undefined,
    });
  });
  panel.appendChild(apply);

  const undo = el("button", "undo-button", "Undo");
  undo.disabled = store.busy;
  undo.addEventListener("click", () => void store.undo());
  panel.appendChild(undo);

  if (store.lastChecks) {
    const checks = el("p", "checks");
    const mark = (ok: boolean) => (ok ? "✓" : "✗");
    checks.textContent =
      `frozen preserved ${mark(store.lastChecks.frozen_preserved)} · ` +
      `previous accepted ${mark(store.lastChecks.previous_accepted)}`;
    panel.appendChild(checks);
  }
  return panel;
}

function sparkline(rows: QualityRow[]): SVGElement {
  const width = 160;
  const height = 40;
  const svg = svgEl("svg");
  svg.setAttribute("class", "sparkline");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  if (rows.length > 0) {
    const step = rows.length > 1 ? width / (rows.length - 1) : 0;
    const points = rows
      .map((row, i) => {
        const x = rows.length > 1 ? i * step : width / 2;
        const y = height - 4 - row.f_measure * (height - 8);
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
    const line = svgEl("polyline");
    line.setAttribute("class", "sparkline-path");
    line.setAttribute("points", points);
    svg.appendChild(line);
  }
  return svg;
}

function renderMetricsPanel(store: SessionStore): HTMLElement {
  const panel = el("section", "metrics-panel");
  panel.appendChild(el("h2", undefined, "Quality"));
  panel.appendChild(sparkline(store.metricsRows));
  const last = store.metricsRows[store.metricsRows.length - 1];
  if (last) {
    const row = el("p", "metrics-last");
    row.textContent =
      `fitness ${last.fitness.toFixed(4)} · ` +
      `precision ${last.precision.toFixed(4)} · ` +
      `F ${last.f_measure.toFixed(4)}`;
    panel.appendChild(row);
  }
  panel.appendChild(
    el("p", "metrics-count", `${store.metricsRows.length} state(s)`),
  );
  return panel;
}

/** Mount the app into `root` and keep it in sync with the store. */
export function mount(root: HTMLElement, store: SessionStore): void {
  const ui: UiState = {
    variant: null,
    algorithm: "advanced",
    ipda: null,
    tracesText: "",
    treeText: "",
  };

  const render = () => {
    root.textContent = "";
    const app = el("div", "app");

    const header = el("header");
    header.appendChild(el("h1", undefined, "treefreeze"));
    const banner = renderBanner(store);
    if (banner) header.appendChild(banner);
    app.appendChild(header);

    if (!store.view) {
      app.appendChild(renderCreatePanel(store, ui));
    } else {
      const summary = el("p", "session-summary");
      summary.textContent =
        `session ${store.sessionId} · ${store.previous.length} trace(s) added`;
      app.appendChild(summary);

      const main = el("main");
      main.appendChild(renderTreePanel(store));
      const aside = el("aside");
      aside.appendChild(renderVariantsPanel(store, ui, render));
      aside.appendChild(renderControls(store, ui));
      aside.appendChild(renderMetricsPanel(store));
      main.appendChild(aside);
      app.appendChild(main);
    }

    const toast = renderToast(store);
    if (toast) app.appendChild(toast);
    root.appendChild(app);
  };

  store.subscribe(render);
  render();
}
