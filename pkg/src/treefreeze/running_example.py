"""The bundled worked example: a small order process with a frozen block.

One tree, three traces, and a scripted discovery step, used across demos,
the test suite, and the companion UI walkthrough.  The process runs an
order loop (``a``/``b`` or ``c``/``d`` rounds) followed by a closing block
``e`` and ``a`` in parallel; the closing block is the part worth freezing
when the process is incrementally rediscovered.

``scripted_discovery()`` returns the canned discovery step used in the
walkthrough: for the projected trace it returns a tree that wraps the
frozen block's placeholders around a newly discovered loop on ``a``, and
for the raw trace (the baseline path, which ignores placeholders) it
returns a rediscovered tree without the frozen block.  The canned outputs
are stipulated results of an external discovery engine; everything that is
derived from them in this package is still contract-checked downstream.
"""
from __future__ import annotations

from .ipda import IpdaFn, canned_ipda, register_ipda, registered_ipdas
from .logs import EventLog, from_traces
from .trees import ProcessTree, parse_tree

INITIAL_TREE_TEXT = "->(*(X(->(a,b),+(c,d)),tau),+(e,a))"
LOOP_PART_TEXT = "*(X(->(a,b),+(c,d)),tau)"
FROZEN_BLOCK_TEXT = "+(e,a)"

#: Root-relative child-index path of the frozen block inside the initial
#: tree (second child of the root sequence).
FROZEN_BLOCK_PATH = (1,)

#: Traces already added when the walkthrough starts.
TRACE_PREVIOUS_1 = ("d", "c", "a", "b", "a", "e")
TRACE_PREVIOUS_2 = ("a", "b", "e", "a")

#: The trace added during the walkthrough.
TRACE_NEXT = ("c", "d", "a", "e", "a", "a")

#: A longer variant of the next trace with a second closing block, used to
#: show full-execution detection during projection.
TRACE_NEXT_LONG = ("c", "d", "a", "e", "a", "a", "e")

#: Projection of ``TRACE_NEXT`` once the frozen block is replaced by its
#: placeholder labels.
TRACE_NEXT_PROJECTED = ("c", "d", "__open_0", "__close_0", "a", "a")

#: Scripted discovery output for the projected trace: the placeholders
#: stay, and the trailing repeats of ``a`` become a loop between them.
DISCOVERED_PROJECTED_TEXT = (
    "->(*(X(->(a,b),+(c,d)),tau),->(__open_0,*(tau,a),__close_0))"
)

#: Scripted discovery output for the raw trace (baseline path): the
#: closing block is rediscovered as ``e`` parallel to a loop on ``a``,
#: which loses the frozen block as a unit.
DISCOVERED_RAW_TEXT = "->(*(X(->(a,b),+(c,d)),tau),+(e,*(a,tau)))"

#: The advanced result: the frozen block survives next to the new loop.
ADVANCED_RESULT_TEXT = "->(*(X(->(a,b),+(c,d)),tau),+(+(e,a),*(tau,a)))"

#: The baseline result: the rediscovered tree with the frozen block
#: re-attached optionally in parallel.
BASELINE_RESULT_TEXT = (
    "+(->(*(X(->(a,b),+(c,d)),tau),+(e,*(a,tau))),X(tau,+(e,a)))"
)


def initial_tree() -> ProcessTree:
    return parse_tree(INITIAL_TREE_TEXT)


def frozen_block() -> ProcessTree:
    return parse_tree(FROZEN_BLOCK_TEXT)


def previous_traces() -> list[tuple[str, ...]]:
    return [TRACE_PREVIOUS_1, TRACE_PREVIOUS_2]


def event_log() -> EventLog:
    """The walkthrough log: previous traces plus the one to add next."""
    return from_traces([TRACE_NEXT, TRACE_PREVIOUS_1, TRACE_PREVIOUS_2])


def scripted_discovery() -> IpdaFn:
    return canned_ipda(
        {
            TRACE_NEXT_PROJECTED: DISCOVERED_PROJECTED_TEXT,
            TRACE_NEXT: DISCOVERED_RAW_TEXT,
        }
    )


SCRIPTED_IPDA_NAME = "worked-example"

if SCRIPTED_IPDA_NAME not in registered_ipdas():
    register_ipda(SCRIPTED_IPDA_NAME, scripted_discovery())
