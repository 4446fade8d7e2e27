/** Session state, mirroring the service with optimistic freezing.
 *
 * Rules:
 *
 * - at most one mutation is in flight at a time; further attempts are
 *   refused until the first settles,
 * - freeze clicks update the selection immediately (optimistic) and roll
 *   back if the server rejects the PUT,
 * - nested selections are refused client-side with the same reason the
 *   server would give, before any request is sent,
 * - the canonical tree text always comes from the last server response.
 */

import type { Api } from "./api.js";
import { ApiError, ServiceUnreachable } from "./api.js";
import { samePath, wouldNest } from "./paths.js";
import type {
  CreateSessionRequest,
  IncrementChecks,
  IncrementRequest,
  QualityRow,
  SessionView,
  TreePayload,
  VariantInfo,
} from "./types.js";

export type ApiLike = Pick<
  Api,
  | "createSession"
  | "getTree"
  | "getVariants"
  | "setFrozen"
  | "applyIncrement"
  | "undo"
  | "getMetrics"
>;

export interface Notice {
  kind: "error" | "info";
  message: string;
  stage?: string;
}

export class SessionStore {
  private readonly listeners = new Set<() => void>();

  sessionId: string | null = null;
  view: SessionView | null = null;
  tree: TreePayload | null = null;
  variants: VariantInfo[] = [];
  previous: string[][] = [];
  metricsRows: QualityRow[] = [];
  /** Frozen selection shown in the UI; may run ahead of the server briefly. */
  selection: number[][] = [];
  lastChecks: IncrementChecks | null = null;
  busy = false;
  unreachable = false;
  notice: Notice | null = null;

  constructor(private readonly api: ApiLike) {}

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Tree payload with frozen flags recomputed from the live selection. */
  effectiveTree(): TreePayload | null {
    if (!this.tree) return null;
    const roots = this.selection;
    const nodes = this.tree.nodes.map((node) => {
      const isRoot = roots.some((p) => samePath(p, node.path));
      const inside = roots.some(
        (p) =>
          p.length <= node.path.length &&
          p.every((step, i) => step === node.path[i]),
      );
      return { ...node, frozen_root: isRoot, frozen: inside };
    });
    return { ...this.tree, nodes, frozen_paths: roots };
  }

  private fail(cause: unknown): void {
    if (cause instanceof ServiceUnreachable) {
      this.unreachable = true;
      this.notice = { kind: "error", message: cause.message };
    } else if (cause instanceof ApiError) {
      this.notice = { kind: "error", message: cause.message, stage: cause.stage };
    } else {
      this.notice = { kind: "error", message: String(cause) };
    }
  }

  private refuseWhileBusy(): boolean {
    if (!this.busy) return false;
    this.notice = {
      kind: "info",
      message: "another change is still being applied",
    };
    this.emit();
    return true;
  }

  async createSession(request: CreateSessionRequest): Promise<boolean> {
    if (this.refuseWhileBusy()) return false;
    this.busy = true;
    this.emit();
    try {
      const view = await this.api.createSession(request);
      this.sessionId = view.id;
      this.view = view;
      this.tree = view.tree;
      this.variants = view.variants;
      this.previous = view.previous;
      this.metricsRows = view.metrics;
      this.selection = view.tree.frozen_paths;
      this.lastChecks = null;
      this.unreachable = false;
      this.notice = { kind: "info", message: `session ${view.id} created` };
      return true;
    } catch (cause) {
      this.fail(cause);
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  /** Toggle the frozen selection at `path` (optimistic, rolls back). */
  async toggleFrozen(path: number[]): Promise<boolean> {
    if (!this.sessionId || !this.tree) return false;
    if (this.refuseWhileBusy()) return false;

    const selected = this.selection.some((p) => samePath(p, path));
    let next: number[][];
    if (selected) {
      next = this.selection.filter((p) => !samePath(p, path));
    } else {
      const clash = this.selection.find((p) => wouldNest(p, path));
      if (clash) {
        this.notice = {
          kind: "error",
          message:
            "frozen subtrees must be pairwise non-nested " +
            `(already frozen: [${clash.join(",")}])`,
        };
        this.emit();
        return false;
      }
      next = [...this.selection, path];
    }

    const before = this.selection;
    this.selection = next;
    this.busy = true;
    this.emit();
    try {
      const result = await this.api.setFrozen(this.sessionId, next);
      this.selection = result.frozen_paths;
      this.tree = await this.api.getTree(this.sessionId);
      this.unreachable = false;
      this.notice = null;
      return true;
    } catch (cause) {
      this.selection = before;
      this.fail(cause);
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  async applyIncrement(request: IncrementRequest): Promise<boolean> {
    if (!this.sessionId) return false;
    if (this.refuseWhileBusy()) return false;
    this.busy = true;
    this.emit();
    try {
      const result = await this.api.applyIncrement(this.sessionId, request);
      this.tree = result.tree;
      this.selection = result.tree.frozen_paths;
      this.variants = result.variants;
      this.previous = result.previous;
      this.lastChecks = result.checks;
      this.metricsRows = (await this.api.getMetrics(this.sessionId)).rows;
      this.unreachable = false;
      this.notice = {
        kind: "info",
        message: `increment applied (${request.algorithm})`,
      };
      return true;
    } catch (cause) {
      this.fail(cause);
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  async undo(): Promise<boolean> {
    if (!this.sessionId) return false;
    if (this.refuseWhileBusy()) return false;
    this.busy = true;
    this.emit();
    try {
      const result = await this.api.undo(this.sessionId);
      this.tree = result.tree;
      this.selection = result.tree.frozen_paths;
      this.variants = result.variants;
      this.previous = result.previous;
      this.lastChecks = null;
      this.metricsRows = (await this.api.getMetrics(this.sessionId)).rows;
      this.unreachable = false;
      this.notice = { kind: "info", message: "undone" };
      return true;
    } catch (cause) {
      this.fail(cause);
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }
}
