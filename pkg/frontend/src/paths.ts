/** Child-index path helpers. Paths address nodes as in the service payload. */

export function pathKey(path: number[]): string {
  return path.join(".");
}

export function samePath(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((step, i) => step === b[i]);
}

/** True when `ancestor` is `path` itself or one of its ancestors. */
export function isAncestorOrSelf(ancestor: number[], path: number[]): boolean {
  return (
    ancestor.length <= path.length &&
    ancestor.every((step, i) => step === path[i])
  );
}

/** True when freezing both paths would nest one inside the other. */
export function wouldNest(a: number[], b: number[]): boolean {
  return isAncestorOrSelf(a, b) || isAncestorOrSelf(b, a);
}
