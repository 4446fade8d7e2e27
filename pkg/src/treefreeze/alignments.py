"""Optimal alignments between traces and process trees.

An alignment is a sequence of moves; every move has a log part, a model
part, or both:

* synchronous move: log activity and model step agree (cost 0);
* log move: an activity only in the trace (cost 1);
* visible model move: an activity step only in the model (cost 1);
* invisible model move: a tau/open/close step (cost 0).

The model parts of the moves, in order, must form a running sequence of
the tree, and the log parts must spell the trace.  The cost of an
alignment is the number of log moves plus visible model moves; an optimal
alignment minimizes this cost.

The search is A* over pairs of execution state and trace position, with
the (admissible) heuristic counting trace symbols that do not occur in
the tree at all.  Ties between equally cheap frontier nodes go to the one
with the higher cost already paid (so a finished deviation's invisible
tail is wrapped up before cheaper-looking detours are tried), then to
insertion order with synchronous moves generated first.  The order is
fixed, so among several optimal alignments the returned witness is
deterministic: deviations land as late and as close to their matching
context as the cost structure allows.
"""
from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Iterable, Optional

from .errors import SearchBudgetExceeded
from .semantics import (
    CLOSE,
    OPEN,
    Event,
    RunningSequence,
    TAU_EVENT,
    Trace,
    execution,
)
from .trees import ProcessTree

DEFAULT_SEARCH_BUDGET = 500_000


@dataclass(frozen=True)
class Move:
    """One alignment move; ``log`` and/or (``node``, ``event``) are set."""

    log: Optional[str]
    node: Optional[int]
    event: Optional[Event]

    @property
    def kind(self) -> str:
        if self.node is None:
            return "log"
        if self.log is not None:
            return "sync"
        if isinstance(self.event, str):
            return "model"
        return "invisible"

    @property
    def is_deviation(self) -> bool:
        return self.kind in ("log", "model")


@dataclass(frozen=True)
class Alignment:
    trace: Trace
    moves: tuple[Move, ...]
    cost: int
    log_moves: int
    visible_model_moves: int
    expanded: int

    @property
    def synchronous_moves(self) -> int:
        return sum(1 for m in self.moves if m.kind == "sync")

    def model_steps(self) -> RunningSequence:
        """The running sequence executed by the model parts."""
        return tuple(
            (m.node, m.event) for m in self.moves if m.node is not None
        )


def optimal_alignment(
    t: ProcessTree,
    trace: Iterable[str],
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Alignment:
    """A cost-optimal alignment of ``trace`` against ``t``.

    Raises :class:`SearchBudgetExceeded` after ``budget`` node expansions.
    """
    trace = tuple(trace)
    ex = execution(t)
    alphabet = t.alphabet()

    # h[pos] = symbols in trace[pos:] foreign to the tree; each of those
    # costs at least one log move, lower-bounding both cost components.
    foreign = [0] * (len(trace) + 1)
    for pos in range(len(trace) - 1, -1, -1):
        foreign[pos] = foreign[pos + 1] + (trace[pos] not in alphabet)

    start = (ex.initial(), 0)
    # records: (parent record index, move) for path reconstruction
    records: list[tuple[int, Optional[Move]]] = [(-1, None)]
    counter = 0
    heap: list[tuple[int, int, int, int, int]] = []
    # entry: (f, -g, counter, g, record); -g pops deeper nodes first among
    # equal f, which drives a path that just paid its last deviation through
    # its remaining invisible moves before alternatives are reconsidered.
    heappush(heap, (foreign[0], 0, counter, 0, 0))
    positions: list[tuple] = [start]
    settled: set[tuple] = set()
    expanded = 0

    while heap:
        _, _, _, g, rec = heappop(heap)
        state, pos = positions[rec]
        key = (state, pos)
        if key in settled:
            continue
        settled.add(key)
        expanded += 1
        if expanded > budget:
            raise SearchBudgetExceeded(
                f"alignment search exceeded {budget} node expansions"
            )
        if pos == len(trace) and ex.is_final(state):
            moves: list[Move] = []
            while rec > 0:
                parent, move = records[rec]
                moves.append(move)
                rec = parent
            moves.reverse()
            log_moves = sum(1 for m in moves if m.kind == "log")
            return Alignment(
                trace=trace,
                moves=tuple(moves),
                cost=g,
                log_moves=log_moves,
                visible_model_moves=g - log_moves,
                expanded=expanded,
            )

        def push(move: Move, state2, pos2, g2: int) -> None:
            nonlocal counter
            if (state2, pos2) in settled:
                return
            counter += 1
            records.append((rec, move))
            positions.append((state2, pos2))
            heappush(
                heap,
                (g2 + foreign[pos2], -g2, counter, g2, len(records) - 1),
            )

        successors = ex.successors(state)
        if pos < len(trace):
            symbol = trace[pos]
            for node, event, state2 in successors:
                if event == symbol:
                    push(Move(symbol, node, event), state2, pos + 1, g)
            push(Move(symbol, None, None), state, pos + 1, g + 1)
        for node, event, state2 in successors:
            if isinstance(event, str):
                push(Move(None, node, event), state2, pos, g + 1)
            else:
                push(Move(None, node, event), state2, pos, g)

    raise SearchBudgetExceeded("alignment search space exhausted unexpectedly")


def accepting_run(t: ProcessTree, trace: Iterable[str]) -> RunningSequence:
    """A running sequence of ``t`` whose trace is ``trace``.

    The run is recovered from a zero-cost alignment, so the choice among
    multiple witnessing runs is deterministic.  Raises ``ValueError`` when
    the trace is not in the tree's language.
    """
    trace = tuple(trace)
    alignment = optimal_alignment(t, trace)
    if alignment.cost != 0:
        raise ValueError(
            f"trace {list(trace)!r} is not in the language of the tree"
        )
    return alignment.model_steps()


def check_alignment(
    t: ProcessTree, trace: Iterable[str], moves: Iterable[Move]
) -> tuple[int, int]:
    """Validate an alignment; returns (log moves, visible model moves).

    Checks the three defining conditions: the log parts spell the trace,
    the model parts form a running sequence of the tree, and every move is
    one of the four legal shapes.  Raises ``ValueError`` otherwise.
    """
    trace = tuple(trace)
    moves = tuple(moves)
    log_moves = 0
    model_moves = 0
    logged: list[str] = []
    for i, m in enumerate(moves):
        if m.node is None:
            if m.log is None or m.event is not None:
                raise ValueError(f"move {i}: empty move (no log and no model part)")
            log_moves += 1
            logged.append(m.log)
        else:
            if m.event is None:
                raise ValueError(f"move {i}: model part without an event")
            if m.log is not None:
                if m.log != m.event:
                    raise ValueError(
                        f"move {i}: synchronous move with mismatched labels "
                        f"{m.log!r} vs {m.event!r}"
                    )
                logged.append(m.log)
            elif isinstance(m.event, str):
                model_moves += 1
    if logged != list(trace):
        raise ValueError(
            f"log projection {logged!r} does not spell the trace {list(trace)!r}"
        )

    ex = execution(t)
    state = ex.initial()
    for i, m in enumerate(moves):
        if m.node is None:
            continue
        for node, event, state2 in ex.successors(state):
            if node == m.node and event == m.event:
                state = state2
                break
        else:
            raise ValueError(
                f"move {i}: step ({m.node}, {m.event!r}) is not enabled"
            )
    if not ex.is_final(state):
        raise ValueError("model projection is not a complete running sequence")
    return log_moves, model_moves


def format_alignment(t: ProcessTree, alignment: Alignment) -> str:
    """Two-row text rendering: log parts on top, model parts below."""
    skip = ">>"
    top: list[str] = []
    bottom: list[str] = []
    for m in alignment.moves:
        top.append(m.log if m.log is not None else skip)
        if m.node is None:
            bottom.append(skip)
        elif isinstance(m.event, str):
            bottom.append(m.event)
        elif m.event is TAU_EVENT:
            bottom.append("τ")
        elif m.event is OPEN:
            bottom.append(f"open[{t.node_text(m.node)}]")
        elif m.event is CLOSE:
            bottom.append(f"close[{t.node_text(m.node)}]")
        else:  # pragma: no cover
            bottom.append("?")
    widths = [max(len(a), len(b)) for a, b in zip(top, bottom)]
    row = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths))
    return (
        f"log   | {row(top)}\n"
        f"model | {row(bottom)}\n"
        f"cost={alignment.cost} (log moves={alignment.log_moves}, "
        f"model moves={alignment.visible_model_moves}, "
        f"sync={alignment.synchronous_moves})"
    )
