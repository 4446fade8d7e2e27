/** Shared payload fixtures, shaped exactly like the service responses. */

import type { NodeKind, TreeNodeInfo, TreePayload } from "../src/types.js";

export function node(
  id: number,
  path: number[],
  text: string,
  kind: NodeKind,
  frozenRoot = false,
  frozen = false,
): TreeNodeInfo {
  return { id, path, text, kind, frozen_root: frozenRoot, frozen };
}

/** ->(*(X(->(a,b),+(c,d)),tau),+(e,a)) with the last ∧ frozen. */
export function workbenchPayload(): TreePayload {
  return {
    text: "->(*(X(->(a,b),+(c,d)),tau),+(e,a))",
    dot: "",
    nodes: [
      node(0, [], "→", "operator"),
      node(1, [0], "↻", "operator"),
      node(2, [0, 0], "×", "operator"),
      node(3, [0, 0, 0], "→", "operator"),
      node(4, [0, 0, 0, 0], "a", "activity"),
      node(5, [0, 0, 0, 1], "b", "activity"),
      node(6, [0, 0, 1], "∧", "operator"),
      node(7, [0, 0, 1, 0], "c", "activity"),
      node(8, [0, 0, 1, 1], "d", "activity"),
      node(9, [0, 1], "τ", "tau"),
      node(10, [1], "∧", "operator", true, true),
      node(11, [1, 0], "e", "activity", false, true),
      node(12, [1, 1], "a", "activity", false, true),
    ],
    frozen_paths: [[1]],
  };
}

/** A minimal ->(a,b) payload with nothing frozen. */
export function tinyPayload(): TreePayload {
  return {
    text: "->(a,b)",
    dot: "",
    nodes: [
      node(0, [], "→", "operator"),
      node(1, [0], "a", "activity"),
      node(2, [1], "b", "activity"),
    ],
    frozen_paths: [],
  };
}
