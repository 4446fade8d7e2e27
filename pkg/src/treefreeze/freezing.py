"""Incremental discovery with frozen subtrees.

A user marks pairwise non-nested subtrees of the current tree as frozen;
a freezing-enabled discovery step must return a tree that still contains
every frozen subtree verbatim and accepts the previously added traces
plus the new one.

Two strategies are implemented on top of an arbitrary pluggable discovery
step (see :mod:`treefreeze.ipda`):

* :func:`freeze_baseline` runs the step as-is and, if a frozen subtree got
  lost, re-attaches it in parallel as an optional part.
* :func:`freeze_advanced` hides the frozen subtrees from the step
  altogether: each one is replaced by a fresh ``open``/``close`` label
  pair, the previously added traces and the new trace are projected onto
  those labels, the discovery step runs on the abstracted material, and
  the frozen subtrees are reinserted afterwards at the lowest feasible
  position, sized by how often their labels can occur there.
"""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Iterable, Union

from .alignments import DEFAULT_SEARCH_BUDGET, accepting_run, optimal_alignment
from .errors import ContractViolation, FreezeSelectionError
from .ipda import IpdaFn, IpdaRequest, apply_ipda
from .semantics import CLOSE, OPEN, Cardinality, Trace, accepts, sta
from .trees import (
    ProcessTree,
    activity,
    choice,
    is_subtree,
    lca,
    loop,
    parallel,
    reduce_tree,
    replace_leaf_labels,
    replace_node,
    sequence,
    subtree_at,
    tau,
)

REPLACEMENT_LABEL = re.compile(r"__(open|close)_\d+")


@dataclass(frozen=True)
class FrozenSubtree:
    """One frozen subtree: its position, root in the host tree, a copy of
    the subtree itself, and its replacement labels."""

    position: int
    root: int
    tree: ProcessTree
    open_label: str
    close_label: str


@dataclass(frozen=True)
class FrozenSelection:
    """A validated, ordered set of frozen subtrees of one host tree."""

    host: ProcessTree
    subtrees: tuple[FrozenSubtree, ...]

    @property
    def n(self) -> int:
        return len(self.subtrees)


def freeze(
    host: ProcessTree, roots: Iterable[int], label_base: int = 0
) -> FrozenSelection:
    """Select the subtrees rooted at ``roots`` (in order) for freezing.

    Replacement labels ``__open_<k>`` / ``__close_<k>`` are generated from
    ``label_base`` on; pass a session-scoped counter to keep them fresh
    across steps.  Raises :class:`FreezeSelectionError` for out-of-range
    or nested selections, or when the host alphabet already uses the
    reserved label pattern.
    """
    roots = list(roots)
    clashes = sorted(
        a for a in host.alphabet() if REPLACEMENT_LABEL.fullmatch(a)
    )
    if clashes:
        raise FreezeSelectionError(
            f"host tree uses reserved replacement labels {clashes}"
        )
    for v in roots:
        if not isinstance(v, int) or v < 0 or v >= len(host):
            raise FreezeSelectionError(f"node id {v!r} out of range")
    if len(set(roots)) != len(roots):
        raise FreezeSelectionError("duplicate frozen roots")
    spans = [(v, v + host.sizes[v]) for v in roots]
    for i, (lo1, hi1) in enumerate(spans):
        for lo2, hi2 in spans[i + 1 :]:
            if lo1 < hi2 and lo2 < hi1:
                raise FreezeSelectionError(
                    "frozen subtrees must be pairwise non-nested"
                )
    subtrees = tuple(
        FrozenSubtree(
            position=i,
            root=v,
            tree=subtree_at(host, v),
            open_label=f"__open_{label_base + i}",
            close_label=f"__close_{label_base + i}",
        )
        for i, v in enumerate(roots)
    )
    return FrozenSelection(host=host, subtrees=subtrees)


@dataclass(frozen=True)
class TraceProjection:
    """Chain of projections of one trace: ``levels[k]`` has the first
    ``k`` frozen subtrees replaced by their labels, so ``levels[0]`` is
    the original trace and ``levels[-1]`` the fully projected one."""

    source: Trace
    levels: tuple[Trace, ...]

    @property
    def final(self) -> Trace:
        return self.levels[-1]


# -- stage 1: replacing ------------------------------------------------------


def replace_frozen(selection: FrozenSelection) -> ProcessTree:
    """Swap each frozen subtree for the sequence ``->(open_i, close_i)``."""
    result = selection.host
    # Replace from the highest root id down so earlier ids stay valid;
    # the selection is non-nested, hence the id ranges are disjoint.
    for sub in sorted(selection.subtrees, key=lambda s: -s.root):
        stub = sequence(activity(sub.open_label), activity(sub.close_label))
        result = replace_node(result, sub.root, stub)
    return result


# -- stage 2: projecting previously added traces -----------------------------


def _owner_map(selection: FrozenSelection) -> dict[int, int]:
    owner: dict[int, int] = {}
    for sub in selection.subtrees:
        for v in range(sub.root, sub.root + selection.host.sizes[sub.root]):
            owner[v] = sub.position
    return owner


def project_previous(
    selection: FrozenSelection,
    previous: Iterable[Trace],
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> list[TraceProjection]:
    """Project each previously added trace onto the replacement labels.

    Each trace is replayed to an accepting run of the host tree; the steps
    inside the i-th frozen subtree collapse into its open/close labels
    (emitted when the subtree's root opens and closes), everything outside
    is kept verbatim.
    """
    owner = _owner_map(selection)
    host = selection.host
    records = []
    for trace in previous:
        trace = tuple(trace)
        try:
            run = accepting_run(host, trace)
        except ValueError:
            raise ContractViolation(
                "project-previous",
                f"previously added trace {list(trace)!r} is not accepted "
                "by the tree",
            ) from None
        levels = []
        for k in range(selection.n + 1):
            emitted: list[str] = []
            for v, event in run:
                i = owner.get(v)
                if i is not None and i < k:
                    sub = selection.subtrees[i]
                    if v == sub.root:
                        if event is OPEN:
                            emitted.append(sub.open_label)
                        elif event is CLOSE:
                            emitted.append(sub.close_label)
                        else:  # a frozen leaf executes in a single step
                            emitted.append(sub.open_label)
                            emitted.append(sub.close_label)
                elif isinstance(event, str):
                    emitted.append(event)
            levels.append(tuple(emitted))
        records.append(TraceProjection(source=trace, levels=tuple(levels)))
    return records


# -- stage 3: projecting the next trace --------------------------------------


def abstraction_tree(selection: FrozenSelection) -> ProcessTree:
    """The tree used to spot full executions of frozen subtrees in a trace:
    ``*(tau, T_i)`` for one subtree, a parallel of such loops otherwise."""
    tree, _ = _abstraction_with_ranges(selection)
    return tree


def _abstraction_with_ranges(
    selection: FrozenSelection,
) -> tuple[ProcessTree, list[tuple[int, int, int]]]:
    """Abstraction tree plus ``(start, end, position)`` id ranges of each
    embedded frozen subtree copy."""
    if selection.n == 0:
        raise FreezeSelectionError("abstraction tree of an empty selection")
    loops = [loop(tau(), sub.tree) for sub in selection.subtrees]
    if selection.n == 1:
        tree = loops[0]
        base = 0
    else:
        tree = parallel(*loops)
        base = 1
    ranges = []
    offset = base
    for sub in selection.subtrees:
        root = offset + 2  # loop node, tau leaf, then the subtree copy
        ranges.append((root, root + len(sub.tree), sub.position))
        offset += 2 + len(sub.tree)
    return tree, ranges


def project_next(
    selection: FrozenSelection,
    trace: Trace,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> TraceProjection:
    """Project the next trace onto the replacement labels via alignment.

    The trace is aligned against the abstraction tree; every deviation-free
    full execution of a frozen subtree (from its root's open to its close
    with no visible model move on the subtree's nodes) is replaced by the
    open/close labels.  Log moves inside such a segment survive between
    the labels; deviating or partial material stays verbatim.
    """
    trace = tuple(trace)
    if selection.n == 0:
        return TraceProjection(source=trace, levels=(trace,))
    abstraction, ranges = _abstraction_with_ranges(selection)
    alignment = optimal_alignment(abstraction, trace, budget)

    def owner_of(node: int) -> int | None:
        for start, end, position in ranges:
            if start <= node < end:
                return position
        return None

    roots = {start: position for start, _, position in ranges}
    is_leaf_subtree = {
        sub.position: len(sub.tree) == 1 for sub in selection.subtrees
    }

    # Segment detection: (position, start move, end move, deviating).
    segments: list[tuple[int, int, int, bool]] = []
    open_segments: dict[int, list] = {}
    for idx, move in enumerate(alignment.moves):
        if move.node is None:
            continue
        i = owner_of(move.node)
        if i is None:
            continue
        root_of_i = move.node in roots and roots[move.node] == i
        if root_of_i and is_leaf_subtree[i]:
            segments.append((i, idx, idx, move.kind == "model"))
            continue
        if root_of_i and move.event is OPEN:
            open_segments[i] = [idx, False]
            continue
        if root_of_i and move.event is CLOSE:
            start, deviating = open_segments.pop(i)
            segments.append((i, start, idx, deviating))
            continue
        if move.kind == "model":
            open_segments[i][1] = True

    starts = {start: (i, end, deviating) for i, start, end, deviating in segments}
    ends = {end: i for i, start, end, deviating in segments if end != start}

    levels = []
    for k in range(selection.n + 1):
        emitted: list[str] = []
        inside: set[int] = set()
        for idx, move in enumerate(alignment.moves):
            if idx in starts:
                i, end, deviating = starts[idx]
                if i < k and not deviating:
                    sub = selection.subtrees[i]
                    emitted.append(sub.open_label)
                    if end == idx:
                        emitted.append(sub.close_label)
                    else:
                        inside.add(i)
                    continue
            if idx in ends and ends[idx] in inside:
                inside.remove(ends[idx])
                emitted.append(selection.subtrees[ends[idx]].close_label)
                continue
            if move.node is None:
                emitted.append(move.log)
                continue
            i = owner_of(move.node)
            if i in inside:
                continue
            if move.log is not None:
                emitted.append(move.log)
        levels.append(tuple(emitted))
    return TraceProjection(source=trace, levels=tuple(levels))


# -- stage 4: reinserting ----------------------------------------------------


def cardinality_case(values: frozenset[Cardinality]) -> str:
    """Map a cardinality set onto the four reinsertion cases."""
    if not values:
        warnings.warn(
            "empty cardinality intersection; falling back to the "
            "permissive zero-many case",
            stacklevel=2,
        )
        return "zero-many"
    if values <= {Cardinality.ONE}:
        return "one"
    if values <= {Cardinality.ZERO, Cardinality.ONE}:
        return "zero-one"
    if values <= {Cardinality.ONE, Cardinality.MANY}:
        return "one-many"
    return "zero-many"


def _wrapped_frozen(tree: ProcessTree, case: str) -> tuple[ProcessTree, int]:
    """The frozen part for a reinsertion case, plus the offset of the
    frozen subtree's root inside ``parallel(wrapped, ...)``."""
    if case == "one":
        return tree, 1
    if case == "zero-one":
        return choice(tau(), tree), 3
    if case == "one-many":
        return loop(tree, tau()), 2
    if case == "zero-many":
        return loop(tau(), tree), 3
    raise AssertionError(f"unknown case {case!r}")  # pragma: no cover


def reinsert_frozen(
    discovered: ProcessTree,
    selection: FrozenSelection,
    projections: Iterable[TraceProjection],
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ProcessTree:
    """Insert the frozen subtrees back into a discovered tree.

    Subtrees are reinserted in reverse order.  For subtree ``i`` the first
    candidate position is the lowest common ancestor of all leaves carrying
    its labels; the labels' joint cardinality there picks one of the four
    wrappings (exactly-once, optional, one-or-more, zero-or-more), the
    label leaves turn silent, and the wrapped frozen part goes in parallel
    with the candidate.  If the tree then fails to accept the projections
    at the matching level (subtrees before ``i`` still label-replaced),
    the candidate escalates to its parent.  The final tree is reduced with
    the reinserted copies protected.
    """
    projections = list(projections)
    current = discovered
    inserted_roots: list[int] = []
    for i in range(selection.n - 1, -1, -1):
        sub = selection.subtrees[i]
        targets = sorted({record.levels[i] for record in projections})
        occurrences = [
            v
            for v in current
            if current.labels[v] in (sub.open_label, sub.close_label)
        ]
        candidate_node = lca(current, occurrences) if occurrences else 0
        while True:
            candidate = subtree_at(current, candidate_node)
            if occurrences:
                values = sta(candidate, sub.open_label) & sta(
                    candidate, sub.close_label
                )
                case = cardinality_case(values)
            else:
                case = "zero-one"
            wrapped, root_offset = _wrapped_frozen(sub.tree, case)
            silenced = replace_leaf_labels(
                candidate, {sub.open_label: None, sub.close_label: None}
            )
            replacement = parallel(wrapped, silenced)
            attempt = replace_node(current, candidate_node, replacement)
            if all(accepts(attempt, target) for target in targets):
                old_size = current.sizes[candidate_node]
                delta = len(replacement) - old_size
                moved = []
                for r in inserted_roots:
                    if r < candidate_node:
                        moved.append(r)
                    elif candidate_node <= r < candidate_node + old_size:
                        moved.append(
                            candidate_node + 1 + len(wrapped) + (r - candidate_node)
                        )
                    else:
                        moved.append(r + delta)
                moved.append(candidate_node + root_offset)
                inserted_roots = moved
                current = attempt
                break
            if candidate_node == 0:
                raise ContractViolation(
                    "reinsert-feasibility",
                    f"no feasible position for frozen subtree "
                    f"{sub.position} ({sub.tree!r}); level-{i} projections "
                    "rejected even at the root",
                )
            candidate_node = current.parents[candidate_node]
    return reduce_tree(current, protected=inserted_roots)


# -- the two freezing-enabled strategies --------------------------------------


def _check_preconditions(
    t: ProcessTree, selection: FrozenSelection, previous: Iterable[Trace]
) -> None:
    if selection.host != t:
        raise ContractViolation(
            "freezing-precondition",
            "frozen selection was made on a different host tree",
        )
    for trace in sorted(set(map(tuple, previous))):
        if not accepts(t, trace):
            raise ContractViolation(
                "freezing-precondition",
                f"previously added trace {list(trace)!r} is not accepted "
                "by the current tree",
            )


def check_frozen_postconditions(
    result: ProcessTree,
    selection: FrozenSelection,
    traces: Iterable[Trace],
) -> None:
    """Assert the freezing contract on a result tree."""
    for sub in selection.subtrees:
        if not is_subtree(sub.tree, result):
            raise ContractViolation(
                "frozen-postcondition",
                f"frozen subtree {sub.position} ({sub.tree!r}) is not "
                "contained in the result",
            )
    for trace in sorted(set(map(tuple, traces))):
        if not accepts(result, trace):
            raise ContractViolation(
                "frozen-postcondition",
                f"result does not accept trace {list(trace)!r}",
            )


def freeze_baseline(
    t: ProcessTree,
    selection: FrozenSelection,
    trace: Trace,
    previous: Iterable[Trace],
    impl: Union[str, IpdaFn] = "reference",
    check_ipda: bool = True,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ProcessTree:
    """Discovery step, then re-attach lost frozen subtrees in parallel.

    The re-attached parts are optional (``X(tau, T_i)``), so acceptance of
    the added traces is unaffected.
    """
    trace = tuple(trace)
    previous = {tuple(p) for p in previous}
    _check_preconditions(t, selection, previous)
    discovered = apply_ipda(
        impl,
        IpdaRequest(tree=t, trace=trace, previous=frozenset(previous)),
        check_postcondition=check_ipda,
    )
    missing = [
        sub for sub in selection.subtrees if not is_subtree(sub.tree, discovered)
    ]
    if missing:
        result = parallel(
            discovered, *[choice(tau(), sub.tree) for sub in missing]
        )
    else:
        result = discovered
    check_frozen_postconditions(result, selection, previous | {trace})
    return result


def freeze_advanced(
    t: ProcessTree,
    selection: FrozenSelection,
    trace: Trace,
    previous: Iterable[Trace],
    impl: Union[str, IpdaFn] = "reference",
    check_ipda: bool = True,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ProcessTree:
    """The full pipeline: replace, project, discover, reinsert."""
    trace = tuple(trace)
    previous = {tuple(p) for p in previous}
    _check_preconditions(t, selection, previous)
    if selection.n == 0:
        return apply_ipda(
            impl,
            IpdaRequest(tree=t, trace=trace, previous=frozenset(previous)),
            check_postcondition=check_ipda,
        )
    replaced = replace_frozen(selection)
    records = project_previous(selection, sorted(previous), budget)
    records.append(project_next(selection, trace, budget))
    request = IpdaRequest(
        tree=replaced,
        trace=records[-1].final,
        previous=frozenset(record.final for record in records[:-1]),
    )
    discovered = apply_ipda(impl, request, check_postcondition=check_ipda)
    result = reinsert_frozen(discovered, selection, records, budget)
    check_frozen_postconditions(result, selection, previous | {trace})
    return result
