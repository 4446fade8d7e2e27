"""Execution semantics of process trees.

A *running sequence* of a tree is a sequence of ``(node, event)`` steps:
leaves contribute a single step carrying their activity (or tau), operator
nodes wrap the steps of their children in an ``open``/``close`` pair.
Sequence children run in order, choice picks exactly one child, parallel
children interleave freely, and a loop alternates body and redo parts,
always starting and ending with the body.  The trace of a running sequence
is its projection onto activity steps, and the language of a tree is the
set of traces of its running sequences.

Two views are provided:

* exhaustive bounded enumeration (:func:`running_sequences_bounded`,
  :func:`language_bounded`) for small trees, with a hard size cap; and
* an incremental transition system (:class:`Execution`) over immutable
  execution states, which decides membership exactly (:func:`accepts`)
  without any loop bound and powers alignment search.
"""
from __future__ import annotations

import math
from enum import IntEnum
from itertools import product
from typing import Iterable, Optional, Union

from .errors import ExplosionError
from .trees import Operator, ProcessTree

DEFAULT_SEQUENCE_CAP = 100_000


class _Marker:
    """Non-activity event markers (tau/open/close); compared by identity."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


TAU_EVENT = _Marker("tau")
OPEN = _Marker("open")
CLOSE = _Marker("close")

#: An event on a running-sequence step: an activity name or a marker.
Event = Union[str, _Marker]
#: One step of a running sequence.
Step = tuple[int, Event]
RunningSequence = tuple[Step, ...]
Trace = tuple[str, ...]


def project_steps(steps: Iterable[Step]) -> Trace:
    """Activity projection of a running sequence."""
    return tuple(e for _, e in steps if isinstance(e, str))


# -- bounded enumeration -----------------------------------------------------


def running_sequences_bounded(
    t: ProcessTree,
    loop_bound: int = 2,
    cap: int = DEFAULT_SEQUENCE_CAP,
) -> list[RunningSequence]:
    """All running sequences with at most ``loop_bound`` body executions
    per loop node.

    Raises :class:`ExplosionError` as soon as an intermediate result would
    exceed ``cap`` sequences.
    """
    if loop_bound < 1:
        raise ValueError("loop_bound must be at least 1")

    def guard(count: int) -> None:
        if count > cap:
            raise ExplosionError(
                f"more than {cap} running sequences; raise the cap or "
                "lower the loop bound"
            )

    def concat_options(parts: list[list[RunningSequence]]) -> list[RunningSequence]:
        count = math.prod(len(p) for p in parts)
        guard(count)
        out: list[RunningSequence] = []
        for combo in product(*parts):
            seq: list[Step] = []
            for piece in combo:
                seq.extend(piece)
            out.append(tuple(seq))
        return out

    def interleave_options(parts: list[list[RunningSequence]]) -> list[RunningSequence]:
        out: list[RunningSequence] = []
        combos = math.prod(len(p) for p in parts)
        guard(combos)
        for combo in product(*parts):
            lengths = [len(s) for s in combo]
            count = math.factorial(sum(lengths))
            for l in lengths:
                count //= math.factorial(l)
            guard(count * combos)

            def merge(prefix: list[Step], remaining: tuple[RunningSequence, ...]):
                live = [i for i, s in enumerate(remaining) if s]
                if not live:
                    out.append(tuple(prefix))
                    guard(len(out))
                    return
                for i in live:
                    rest = list(remaining)
                    head, rest[i] = rest[i][0], rest[i][1:]
                    merge(prefix + [head], tuple(rest))

            merge([], tuple(combo))
        return out

    def rec(v: int) -> list[RunningSequence]:
        label = t.labels[v]
        kids = t.children[v]
        if not kids:
            event: Event = label if isinstance(label, str) else TAU_EVENT
            return [((v, event),)]
        opening: RunningSequence = ((v, OPEN),)
        closing: RunningSequence = ((v, CLOSE),)
        if label is Operator.SEQUENCE:
            inner = concat_options([rec(c) for c in kids])
        elif label is Operator.CHOICE:
            inner = []
            for c in kids:
                inner.extend(rec(c))
            guard(len(inner))
        elif label is Operator.PARALLEL:
            inner = interleave_options([rec(c) for c in kids])
        elif label is Operator.LOOP:
            body, redo = rec(kids[0]), rec(kids[1])
            inner = []
            for m in range(1, loop_bound + 1):
                parts: list[list[RunningSequence]] = []
                for i in range(m):
                    if i:
                        parts.append(redo)
                    parts.append(body)
                inner.extend(concat_options(parts))
                guard(len(inner))
        else:  # pragma: no cover - exhaustive over operators
            raise AssertionError(f"unknown operator {label!r}")
        return [opening + seq + closing for seq in inner]

    return rec(0)


def language_bounded(
    t: ProcessTree,
    loop_bound: int = 2,
    cap: int = DEFAULT_SEQUENCE_CAP,
) -> set[Trace]:
    """Traces of all running sequences within the loop bound."""
    return {
        project_steps(seq)
        for seq in running_sequences_bounded(t, loop_bound, cap)
    }


# -- incremental transition system -------------------------------------------
#
# Execution states are immutable nested tuples, one slot per active node:
#   leaf:      0 (not executed) or 1 (executed)
#   operator:  "F" (future), ("O", inner) while open, "C" (closed)
# with operator-specific inner state:
#   sequence:  (next_child_index, child_state); (len(children), None) when
#              every child is done and only the close step remains
#   choice:    None before a child is picked, else (child_index, child_state)
#   parallel:  tuple of child states
#   loop:      (0, body_state) or (1, redo_state); a finished redo part
#              normalizes to (0, <initial body state>)

State = object

_FUTURE = "F"
_CLOSED = "C"


class Execution:
    """Cached transition relation over execution states of one tree."""

    def __init__(self, tree: ProcessTree, state_cap: int = 200_000):
        self.tree = tree
        self.state_cap = state_cap
        self._succ: dict[State, tuple[tuple[int, Event, State], ...]] = {}

    # -- single-state view -------------------------------------------------

    def initial(self) -> State:
        return self._initial(0)

    def is_final(self, state: State) -> bool:
        return self._done(0, state)

    def successors(self, state: State) -> tuple[tuple[int, Event, State], ...]:
        """All possible next steps as ``(node, event, next_state)``."""
        cached = self._succ.get(state)
        if cached is None:
            cached = tuple(self._expand(0, state))
            if len(self._succ) >= self.state_cap:
                raise ExplosionError(
                    f"execution-state cache exceeded {self.state_cap} states"
                )
            self._succ[state] = cached
        return cached

    # -- state-set view (used by acceptance and precision) ------------------

    def closure(self, states: frozenset) -> frozenset:
        """States reachable via invisible (tau/open/close) steps."""
        seen = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for _, event, s2 in self.successors(s):
                if not isinstance(event, str) and s2 not in seen:
                    seen.add(s2)
                    stack.append(s2)
        return frozenset(seen)

    def start(self) -> frozenset:
        return self.closure(frozenset((self.initial(),)))

    def step(self, states: frozenset, activity: str) -> frozenset:
        """Closed state set after consuming one activity."""
        nxt = {
            s2
            for s in states
            for _, event, s2 in self.successors(s)
            if event == activity
        }
        return self.closure(frozenset(nxt))

    def enabled(self, states: frozenset) -> frozenset:
        """Activities executable from a closed state set."""
        return frozenset(
            event
            for s in states
            for _, event, s2 in self.successors(s)
            if isinstance(event, str)
        )

    def accepting(self, states: frozenset) -> bool:
        return any(self.is_final(s) for s in states)

    # -- internals ----------------------------------------------------------

    def _initial(self, v: int) -> State:
        return 0 if self.tree.is_leaf(v) else _FUTURE

    def _done(self, v: int, state: State) -> bool:
        if self.tree.is_leaf(v):
            return state == 1
        return state == _CLOSED

    def _open_inner(self, v: int) -> State:
        label = self.tree.labels[v]
        kids = self.tree.children[v]
        if label is Operator.SEQUENCE:
            return (0, self._initial(kids[0]))
        if label is Operator.CHOICE:
            return None
        if label is Operator.PARALLEL:
            return tuple(self._initial(c) for c in kids)
        return (0, self._initial(kids[0]))  # loop starts with its body

    def _norm_seq(self, v: int, i: int, child_state: State) -> State:
        kids = self.tree.children[v]
        if self._done(kids[i], child_state):
            i += 1
            if i == len(kids):
                return (i, None)
            return (i, self._initial(kids[i]))
        return (i, child_state)

    def _norm_loop(self, v: int, redo_state: State) -> State:
        body, redo = self.tree.children[v]
        if self._done(redo, redo_state):
            return (0, self._initial(body))
        return (1, redo_state)

    def _expand(self, v: int, state: State):
        tree = self.tree
        label = tree.labels[v]
        kids = tree.children[v]
        if not kids:
            if state == 0:
                event: Event = label if isinstance(label, str) else TAU_EVENT
                yield (v, event, 1)
            return
        if state == _FUTURE:
            yield (v, OPEN, ("O", self._open_inner(v)))
            return
        if state == _CLOSED:
            return
        inner = state[1]
        if label is Operator.SEQUENCE:
            i, cs = inner
            if i == len(kids):
                yield (v, CLOSE, _CLOSED)
                return
            for n, e, cs2 in self._expand(kids[i], cs):
                yield (n, e, ("O", self._norm_seq(v, i, cs2)))
            return
        if label is Operator.CHOICE:
            if inner is None:
                for idx, c in enumerate(kids):
                    for n, e, cs2 in self._expand(c, self._initial(c)):
                        yield (n, e, ("O", (idx, cs2)))
                return
            idx, cs = inner
            if self._done(kids[idx], cs):
                yield (v, CLOSE, _CLOSED)
                return
            for n, e, cs2 in self._expand(kids[idx], cs):
                yield (n, e, ("O", (idx, cs2)))
            return
        if label is Operator.PARALLEL:
            states = inner
            if all(self._done(c, cs) for c, cs in zip(kids, states)):
                yield (v, CLOSE, _CLOSED)
                return
            for j, (c, cs) in enumerate(zip(kids, states)):
                if self._done(c, cs):
                    continue
                for n, e, cs2 in self._expand(c, cs):
                    yield (n, e, ("O", states[:j] + (cs2,) + states[j + 1 :]))
            return
        # loop
        phase, cs = inner
        body, redo = kids
        if phase == 0:
            if self._done(body, cs):
                yield (v, CLOSE, _CLOSED)
                for n, e, cs2 in self._expand(redo, self._initial(redo)):
                    yield (n, e, ("O", self._norm_loop(v, cs2)))
                return
            for n, e, cs2 in self._expand(body, cs):
                yield (n, e, ("O", (0, cs2)))
            return
        for n, e, cs2 in self._expand(redo, cs):
            yield (n, e, ("O", self._norm_loop(v, cs2)))


_EXECUTION_CACHE: dict[ProcessTree, Execution] = {}
_EXECUTION_CACHE_LIMIT = 256


def execution(t: ProcessTree) -> Execution:
    """Shared, memoized transition system for ``t``."""
    ex = _EXECUTION_CACHE.get(t)
    if ex is None:
        if len(_EXECUTION_CACHE) >= _EXECUTION_CACHE_LIMIT:
            _EXECUTION_CACHE.clear()
        ex = Execution(t)
        _EXECUTION_CACHE[t] = ex
    return ex


def accepts(t: ProcessTree, trace: Iterable[str]) -> bool:
    """Exact language membership, decided by state-set replay."""
    trace = tuple(trace)
    alphabet = t.alphabet()
    if any(a not in alphabet for a in trace):
        return False
    ex = execution(t)
    states = ex.start()
    for a in trace:
        states = ex.step(states, a)
        if not states:
            return False
    return ex.accepting(states)


def replay_prefix(t: ProcessTree, prefix: Iterable[str]) -> Optional[frozenset]:
    """Closed state set after a trace prefix, or ``None`` if unreplayable."""
    ex = execution(t)
    states = ex.start()
    for a in prefix:
        states = ex.step(states, a)
        if not states:
            return None
    return states


def enabled_after(t: ProcessTree, prefix: Iterable[str]) -> Optional[frozenset]:
    """Activities enabled after replaying ``prefix``; ``None`` if unreplayable."""
    states = replay_prefix(t, prefix)
    if states is None:
        return None
    return execution(t).enabled(states)


# -- activity cardinality abstraction ----------------------------------------


class Cardinality(IntEnum):
    """How often an activity may occur in one trace of a (sub)tree."""

    ZERO = 0
    ONE = 1
    MANY = 2


def _card_add(a: Cardinality, b: Cardinality) -> Cardinality:
    return Cardinality(min(a + b, Cardinality.MANY))


def sta(t: ProcessTree, label: str, node: int = 0) -> frozenset[Cardinality]:
    """Exact cardinality abstraction of ``label`` under ``node``.

    The result is the set of per-trace occurrence classes (zero / one /
    many, where many means two or more) that the subtree can realize,
    computed by abstract interpretation: leaves map to ``{one}`` or
    ``{zero}``, sequence and parallel add child sets pointwise, choice
    takes the union, and loops iterate ``body (redo body)*`` to a fixpoint.
    """

    def rec(v: int) -> frozenset[Cardinality]:
        node_label = t.labels[v]
        kids = t.children[v]
        if not kids:
            if node_label == label:
                return frozenset((Cardinality.ONE,))
            return frozenset((Cardinality.ZERO,))
        if node_label in (Operator.SEQUENCE, Operator.PARALLEL):
            acc = frozenset((Cardinality.ZERO,))
            for c in kids:
                child = rec(c)
                acc = frozenset(_card_add(a, b) for a in acc for b in child)
            return acc
        if node_label is Operator.CHOICE:
            out: frozenset[Cardinality] = frozenset()
            for c in kids:
                out = out | rec(c)
            return out
        # loop: body, then any number of (redo body) rounds
        body, redo = rec(kids[0]), rec(kids[1])
        acc = body
        while True:
            extended = frozenset(
                _card_add(_card_add(a, r), b) for a in acc for r in redo for b in body
            )
            nxt = acc | extended
            if nxt == acc:
                return acc
            acc = nxt

    return rec(node)
