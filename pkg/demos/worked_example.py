#!/usr/bin/env python3
"""Walk the freezing pipeline stage by stage on the bundled example.

The host model contains a choice between ``e`` and ``a`` that the user
wants to keep verbatim while the rest of the model is re-discovered
around a deviating trace.  The script prints every intermediate artifact
and finishes by comparing the advanced strategy against the baseline
that simply re-attaches the frozen part in parallel.
"""
from treefreeze.freezing import (
    abstraction_tree,
    freeze,
    freeze_advanced,
    freeze_baseline,
    project_next,
    project_previous,
    reinsert_frozen,
    replace_frozen,
)
from treefreeze.ipda import canned_ipda
from treefreeze.logs import from_traces
from treefreeze.metrics import quality_report
from treefreeze.running_example import (
    DISCOVERED_PROJECTED_TEXT,
    DISCOVERED_RAW_TEXT,
    FROZEN_BLOCK_PATH,
    TRACE_NEXT,
    TRACE_PREVIOUS_1,
    TRACE_PREVIOUS_2,
    initial_tree,
    scripted_discovery,
)
from treefreeze.trees import parse_tree, resolve_path, serialize_tree


def show(title: str, value) -> None:
    print(f"{title:<26} {value}")


def main() -> None:
    host = initial_tree()
    previous = [TRACE_PREVIOUS_1, TRACE_PREVIOUS_2]
    show("initial tree", serialize_tree(host))
    show("already added", " / ".join(",".join(t) for t in previous))
    show("next trace", ",".join(TRACE_NEXT))
    print()

    frozen_root = resolve_path(host, FROZEN_BLOCK_PATH)
    selection = freeze(host, [frozen_root])
    show("frozen subtree", serialize_tree(selection.subtrees[0].tree))

    replaced = replace_frozen(selection)
    show("with open/close stubs", serialize_tree(replaced))

    records = project_previous(selection, previous)
    for index, record in enumerate(records, 1):
        show(f"projected previous #{index}", ",".join(record.final))

    show("abstraction tree", serialize_tree(abstraction_tree(selection)))
    projected_next = project_next(selection, TRACE_NEXT)
    show("projected next", ",".join(projected_next.final))

    discovered = parse_tree(DISCOVERED_PROJECTED_TEXT)
    show("discovery output", serialize_tree(discovered))
    reinserted = reinsert_frozen(
        discovered, selection, records + [projected_next]
    )
    show("after reinsertion", serialize_tree(reinserted))
    print()

    advanced = freeze_advanced(
        host, selection, TRACE_NEXT, previous, impl=scripted_discovery()
    )
    baseline = freeze_baseline(
        host,
        selection,
        TRACE_NEXT,
        previous,
        impl=canned_ipda({TRACE_NEXT: DISCOVERED_RAW_TEXT}),
    )
    show("advanced result", serialize_tree(advanced))
    show("baseline result", serialize_tree(baseline))
    print()

    log = from_traces([TRACE_NEXT, *previous])
    for name, tree in (("advanced", advanced), ("baseline", baseline)):
        report = quality_report(log, tree)
        print(
            f"{name:<9} fitness={report.fitness:.4f} "
            f"precision={report.precision:.4f} "
            f"f_measure={report.f_measure:.4f}"
        )


if __name__ == "__main__":
    main()
