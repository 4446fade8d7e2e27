/** Client-side tidy-tree layout.
 *
 * The service transmits no geometry — only the canonical text and a flat
 * preorder node map with child-index paths. This module rebuilds the
 * hierarchy from the paths and places it with d3's tidy-tree algorithm.
 */

import { hierarchy, tree } from "d3-hierarchy";
import type { TreeNodeInfo, TreePayload } from "./types.js";
import { isAncestorOrSelf, pathKey } from "./paths.js";

export const NODE_DX = 64;
export const NODE_DY = 72;
export const BOX_PAD = 22;

export interface PlacedNode {
  info: TreeNodeInfo;
  x: number;
  y: number;
}

export interface Link {
  source: PlacedNode;
  target: PlacedNode;
}

/** Dashed box drawn around one frozen subtree. */
export interface FrozenBox {
  rootId: number;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface TreeLayout {
  nodes: PlacedNode[];
  links: Link[];
  boxes: FrozenBox[];
  width: number;
  height: number;
}

interface HierarchyDatum {
  info: TreeNodeInfo;
  children: HierarchyDatum[];
}

function buildHierarchy(nodes: TreeNodeInfo[]): HierarchyDatum {
  const byKey = new Map<string, HierarchyDatum>();
  let root: HierarchyDatum | undefined;
  for (const info of nodes) {
    const datum: HierarchyDatum = { info, children: [] };
    byKey.set(pathKey(info.path), datum);
    if (info.path.length === 0) {
      root = datum;
    } else {
      const parent = byKey.get(pathKey(info.path.slice(0, -1)));
      if (!parent) {
        throw new Error(`node ${info.id}: parent of path [${info.path}] missing`);
      }
      parent.children.push(datum);
    }
  }
  if (!root) {
    throw new Error("tree payload has no root node");
  }
  return root;
}

export function layoutTree(payload: TreePayload): TreeLayout {
  const root = hierarchy(buildHierarchy(payload.nodes), (d) => d.children);
  tree<HierarchyDatum>().nodeSize([NODE_DX, NODE_DY])(root);

  const placedById = new Map<number, PlacedNode>();
  let minX = Infinity;
  let maxX = -Infinity;
  let maxY = 0;
  for (const point of root.descendants()) {
    minX = Math.min(minX, point.x!);
    maxX = Math.max(maxX, point.x!);
    maxY = Math.max(maxY, point.y!);
  }
  for (const point of root.descendants()) {
    placedById.set(point.data.info.id, {
      info: point.data.info,
      x: point.x! - minX + BOX_PAD,
      y: point.y! + BOX_PAD,
    });
  }

  // Keep payload (preorder) order so subtrees are contiguous runs.
  const nodes = payload.nodes.map((info) => placedById.get(info.id)!);
  const links: Link[] = [];
  for (const node of nodes) {
    if (node.info.path.length > 0) {
      const parent = nodes.find((p) =>
        pathKey(p.info.path) === pathKey(node.info.path.slice(0, -1)),
      )!;
      links.push({ source: parent, target: node });
    }
  }

  const boxes: FrozenBox[] = [];
  for (const root of nodes.filter((n) => n.info.frozen_root)) {
    const members = nodes.filter((n) =>
      isAncestorOrSelf(root.info.path, n.info.path),
    );
    const xs = members.map((m) => m.x);
    const ys = members.map((m) => m.y);
    boxes.push({
      rootId: root.info.id,
      x: Math.min(...xs) - BOX_PAD,
      y: Math.min(...ys) - BOX_PAD,
      width: Math.max(...xs) - Math.min(...xs) + 2 * BOX_PAD,
      height: Math.max(...ys) - Math.min(...ys) + 2 * BOX_PAD,
    });
  }

  return {
    nodes,
    links,
    boxes,
    width: maxX - minX + 2 * BOX_PAD,
    height: maxY + 2 * BOX_PAD,
  };
}
