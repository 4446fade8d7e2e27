import { describe, expect, test } from "vitest";

import { isAncestorOrSelf, pathKey, samePath, wouldNest } from "../src/paths.js";

describe("path helpers", () => {
  test("pathKey is stable and distinguishes levels", () => {
    expect(pathKey([])).toBe("");
    expect(pathKey([0, 1, 2])).toBe("0.1.2");
    expect(pathKey([0, 12])).not.toBe(pathKey([0, 1, 2]));
  });

  test("samePath compares element-wise", () => {
    expect(samePath([], [])).toBe(true);
    expect(samePath([1, 0], [1, 0])).toBe(true);
    expect(samePath([1, 0], [1])).toBe(false);
    expect(samePath([1, 0], [1, 1])).toBe(false);
  });

  test("the root is an ancestor of everything", () => {
    expect(isAncestorOrSelf([], [3, 1])).toBe(true);
    expect(isAncestorOrSelf([], [])).toBe(true);
  });

  test("ancestor-or-self follows prefixes only", () => {
    expect(isAncestorOrSelf([1], [1, 0])).toBe(true);
    expect(isAncestorOrSelf([1], [1])).toBe(true);
    expect(isAncestorOrSelf([1, 0], [1])).toBe(false);
    expect(isAncestorOrSelf([0], [1, 0])).toBe(false);
  });

  test("nesting is symmetric; siblings never nest", () => {
    expect(wouldNest([1], [1, 0])).toBe(true);
    expect(wouldNest([1, 0], [1])).toBe(true);
    expect(wouldNest([], [1])).toBe(true);
    expect(wouldNest([0], [1])).toBe(false);
    expect(wouldNest([0, 1], [0, 2])).toBe(false);
  });
});
