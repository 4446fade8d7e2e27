"""Session state for the interactive incremental-discovery loop.

A :class:`FreezeSession` bundles what the loop works on: the event log,
the current tree, the frozen-subtree selection, the traces added so far,
and an undo history.  The CLI scenario runner and the HTTP service are
both thin layers over this class, so batch replays and interactive runs
share one behavior.

Frozen subtrees are selected by root-relative child-index paths.  Paths
are not stable across rewrites, so after every increment the selection is
re-resolved structurally: each frozen subtree is looked up again in the
new tree (first occurrence wins, occurrences never overlap) and the paths
are updated.  The session keeps the invariant that every previously added
trace is accepted by the current tree; both freezing algorithms preserve
it by contract, and the session re-checks and surfaces it per increment.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .alignments import DEFAULT_SEARCH_BUDGET
from .errors import FreezeSelectionError
from .freezing import freeze, freeze_advanced, freeze_baseline
from .ipda import IpdaRequest, apply_ipda
from .logs import EventLog, Trace, from_traces, variants
from .metrics import CSV_HEADER, QualityReport, quality_report
from .semantics import accepts
from .trees import (
    ProcessTree,
    find_subtree,
    parse_tree,
    path_of,
    resolve_path,
    sequence_of,
    serialize_tree,
)

ALGORITHMS = ("advanced", "baseline", "plain")


@dataclass(frozen=True)
class Snapshot:
    tree: ProcessTree
    previous: tuple[Trace, ...]
    frozen_paths: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class IncrementRecord:
    """What one increment did, for summaries and history replay."""

    trace: Trace
    algorithm: str
    ipda: str
    frozen_paths: tuple[tuple[int, ...], ...]
    checks: dict = field(compare=False)


def _as_paths(paths) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i) for i in path) for path in paths)


class FreezeSession:
    """One user's incremental discovery loop over a fixed event log."""

    def __init__(
        self,
        log: EventLog,
        tree: Union[ProcessTree, str, None] = None,
        ipda: str = "reference",
        loop_bound: int = 2,
        search_budget: int = DEFAULT_SEARCH_BUDGET,
    ):
        self.log = log
        self.default_ipda = ipda
        self.loop_bound = loop_bound
        self.search_budget = search_budget
        self._variants = variants(log)

        if tree is None:
            if not self._variants:
                raise ValueError("cannot seed a session from an empty log")
            seed = self._variants[0][0]
            self.tree = sequence_of(seed)
            self.previous: tuple[Trace, ...] = (seed,)
        else:
            self.tree = parse_tree(tree) if isinstance(tree, str) else tree
            self.previous = ()

        self.frozen_paths: tuple[tuple[int, ...], ...] = ()
        self.history: list[Snapshot] = [self._snapshot()]
        self.steps: list[IncrementRecord] = []
        self.reports: list[QualityReport] = [self._report()]

    # -- selection ---------------------------------------------------

    def set_frozen(self, paths) -> tuple[tuple[int, ...], ...]:
        """Replace the frozen selection; validates paths and nesting."""
        paths = _as_paths(paths)
        roots = [resolve_path(self.tree, path) for path in paths]
        if roots:
            freeze(self.tree, roots)  # validates disjointness and labels
        self.frozen_paths = paths
        return self.frozen_paths

    def frozen_roots(self) -> list[int]:
        return [resolve_path(self.tree, path) for path in self.frozen_paths]

    # -- increments --------------------------------------------------

    def variant_list(self) -> list[tuple[Trace, int]]:
        return list(self._variants)

    def resolve_variant(self, index: int) -> Trace:
        if not 0 <= index < len(self._variants):
            raise IndexError(
                f"variant index {index} out of range 0..{len(self._variants) - 1}"
            )
        return self._variants[index][0]

    def apply_increment(
        self,
        trace: Optional[Trace] = None,
        variant: Optional[int] = None,
        algorithm: str = "advanced",
        ipda: Optional[str] = None,
    ) -> QualityReport:
        """Run one discovery step and make its result the current tree."""
        if algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}"
            )
        if (trace is None) == (variant is None):
            raise ValueError("provide exactly one of trace or variant")
        if trace is None:
            trace = self.resolve_variant(variant)
        trace = tuple(trace)
        impl = ipda or self.default_ipda

        roots = self.frozen_roots()
        selection = freeze(self.tree, roots)
        structures = [sub.tree for sub in selection.subtrees]

        if algorithm == "plain" or not roots:
            result = apply_ipda(
                impl, IpdaRequest(self.tree, trace, frozenset(self.previous))
            )
        elif algorithm == "baseline":
            result = freeze_baseline(
                self.tree, selection, trace, self.previous, impl=impl,
                budget=self.search_budget,
            )
        else:
            result = freeze_advanced(
                self.tree, selection, trace, self.previous, impl=impl,
                budget=self.search_budget,
            )

        new_previous = self.previous + (trace,)
        new_paths, missing = _relocate(result, structures)
        checks = {
            "frozen_preserved": not missing,
            "previous_accepted": all(accepts(result, t) for t in new_previous),
        }

        pre = self._snapshot()
        self.tree = result
        self.previous = new_previous
        self.frozen_paths = new_paths
        self.history.append(pre)
        self.steps.append(
            IncrementRecord(trace, algorithm, impl, pre.frozen_paths, checks)
        )
        self.reports.append(self._report())
        return self.reports[-1]

    def undo(self) -> Snapshot:
        """Drop the latest increment and restore the state just before it."""
        if len(self.history) < 2:
            raise ValueError("nothing to undo")
        before = self.history.pop()
        self.steps.pop()
        self.reports.pop()
        self.tree = before.tree
        self.previous = before.previous
        self.frozen_paths = before.frozen_paths
        return before

    def replay_matches(self) -> bool:
        """Re-fold the recorded steps from the initial snapshot and compare."""
        initial = self.history[0]
        clone = FreezeSession(
            self.log,
            tree=initial.tree,
            ipda=self.default_ipda,
            loop_bound=self.loop_bound,
            search_budget=self.search_budget,
        )
        clone.previous = initial.previous
        clone.frozen_paths = initial.frozen_paths
        clone.history = [initial]
        for step in self.steps:
            clone.set_frozen(step.frozen_paths)
            clone.apply_increment(
                trace=step.trace, algorithm=step.algorithm, ipda=step.ipda
            )
        return serialize_tree(clone.tree) == serialize_tree(self.tree)

    # -- reporting ---------------------------------------------------

    def covered(self, trace: Trace) -> bool:
        return accepts(self.tree, trace)

    def metrics_csv(self) -> str:
        rows = [CSV_HEADER]
        rows.extend(r.to_csv_row(i) for i, r in enumerate(self.reports))
        return "\n".join(rows) + "\n"

    def _report(self) -> QualityReport:
        return quality_report(self.log, self.tree, self.search_budget)

    def _snapshot(self) -> Snapshot:
        return Snapshot(self.tree, self.previous, self.frozen_paths)

    # -- persistence -------------------------------------------------

    def to_snapshot_json(self) -> str:
        payload = {
            "log": [[case, list(trace)] for case, trace in self.log.cases],
            "tree": serialize_tree(self.tree),
            "previous": [list(t) for t in self.previous],
            "frozen": [list(p) for p in self.frozen_paths],
            "ipda": self.default_ipda,
            "loop_bound": self.loop_bound,
            "search_budget": self.search_budget,
            "history": [
                {
                    "tree": serialize_tree(s.tree),
                    "previous": [list(t) for t in s.previous],
                    "frozen": [list(p) for p in s.frozen_paths],
                }
                for s in self.history
            ],
            "steps": [
                {
                    "trace": list(s.trace),
                    "algorithm": s.algorithm,
                    "ipda": s.ipda,
                    "frozen": [list(p) for p in s.frozen_paths],
                    "checks": s.checks,
                }
                for s in self.steps
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_snapshot_json(cls, text: str) -> "FreezeSession":
        payload = json.loads(text)
        log = EventLog(
            cases=tuple(
                (case, tuple(trace)) for case, trace in payload["log"]
            )
        )
        session = cls(
            log,
            tree=payload["tree"],
            ipda=payload.get("ipda", "reference"),
            loop_bound=payload.get("loop_bound", 2),
            search_budget=payload.get("search_budget", DEFAULT_SEARCH_BUDGET),
        )
        session.previous = tuple(tuple(t) for t in payload["previous"])
        session.frozen_paths = _as_paths(payload["frozen"])
        session.history = [
            Snapshot(
                parse_tree(s["tree"]),
                tuple(tuple(t) for t in s["previous"]),
                _as_paths(s["frozen"]),
            )
            for s in payload["history"]
        ]
        session.steps = [
            IncrementRecord(
                tuple(s["trace"]),
                s["algorithm"],
                s["ipda"],
                _as_paths(s["frozen"]),
                dict(s["checks"]),
            )
            for s in payload["steps"]
        ]
        session.reports = _recompute_reports(session)
        return session


def _recompute_reports(session: FreezeSession) -> list[QualityReport]:
    # history[k] snapshots the state *before* increment k, so the per-state
    # report list is history[1:] (the states increments 1..n-1 started from)
    # followed by the current state.
    states = [snap.tree for snap in session.history[1:]]
    states.append(session.tree)
    return [
        quality_report(session.log, tree, session.search_budget)
        for tree in states
    ]


def _relocate(
    tree: ProcessTree, structures: list[ProcessTree]
) -> tuple[tuple[tuple[int, ...], ...], list[int]]:
    """Re-resolve frozen structures in a rewritten tree.

    Returns the new selection paths plus the indices of structures that no
    longer occur (possible only for the plain algorithm, which ignores the
    selection).  Occurrences are chosen greedily in node order, skipping
    candidates that overlap an already placed structure.
    """
    taken: list[tuple[int, int]] = []
    paths: list[tuple[int, ...]] = []
    missing: list[int] = []
    for index, structure in enumerate(structures):
        placed = None
        for v in find_subtree(tree, structure):
            span = (v, v + tree.sizes[v])
            if all(span[1] <= lo or span[0] >= hi for lo, hi in taken):
                placed = v
                break
        if placed is None:
            missing.append(index)
            continue
        taken.append((placed, placed + tree.sizes[placed]))
        paths.append(path_of(tree, placed))
    return tuple(paths), missing


def tree_payload(session: FreezeSession) -> dict:
    """The tree as the service transmits it: text, DOT, and a node map."""
    from .trees import to_dot

    tree = session.tree
    frozen_roots = set(session.frozen_roots())
    frozen_spans = [(v, v + tree.sizes[v]) for v in frozen_roots]
    nodes = []
    for v in tree:
        label = tree.labels[v]
        if isinstance(label, str):
            kind = "activity"
        elif label is None:
            kind = "tau"
        else:
            kind = "operator"
        nodes.append(
            {
                "id": v,
                "path": list(path_of(tree, v)),
                "text": tree.node_text(v),
                "kind": kind,
                "frozen_root": v in frozen_roots,
                "frozen": any(lo <= v < hi for lo, hi in frozen_spans),
            }
        )
    highlight = sorted(
        v for v in tree if any(lo <= v < hi for lo, hi in frozen_spans)
    )
    return {
        "text": serialize_tree(tree),
        "dot": to_dot(tree, highlight=highlight),
        "nodes": nodes,
        "frozen_paths": [list(p) for p in session.frozen_paths],
    }
