"""Command-line entry point.

Subcommands:

* ``parse``      — canonicalize a tree (optionally write DOT),
* ``align``      — align a trace against a tree,
* ``metrics``    — fitness/precision/F-measure of a tree against a log,
* ``export-dot`` — DOT rendering of a tree,
* ``run``        — replay a scenario file of incremental steps.

Exit codes: 0 on success, 2 for input errors, 3 when a search or
enumeration budget is exhausted, 4 when a pipeline contract is violated.

A scenario is a JSON object::

    {
      "initial_tree": "->(a,b)",          // optional; default: the most
                                           // frequent variant as a sequence
      "log": "relative/path/to/log.jsonl", // or {"traces": [["a","b"], ...]}
      "ipda": "reference",                 // default discovery step
      "loop_bound": 2,
      "search_budget": 500000,
      "output_dir": "out",
      "steps": [
        {"variant": 0, "frozen": [[1]], "algorithm": "advanced"},
        {"trace": ["a", "b"], "algorithm": "baseline", "ipda": "rebuild"}
      ]
    }

Each step selects a variant by index into the frequency-sorted variant
list (or gives a literal trace), optionally replaces the frozen selection
(child-index paths, re-resolved against the current tree), and names the
algorithm.  The runner writes ``step_000.tree.txt`` for the initial tree,
one tree file per step, a ``metrics.csv`` curve, and ``summary.json``.
Replaying the same scenario twice produces byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .alignments import DEFAULT_SEARCH_BUDGET, format_alignment, optimal_alignment
from .errors import (
    ContractViolation,
    ExplosionError,
    FreezeSelectionError,
    LogFormatError,
    ParseError,
    SearchBudgetExceeded,
)
from .logs import EventLog, from_traces, load_log
from .metrics import CSV_HEADER, quality_report
from .sessions import FreezeSession
from .trees import parse_tree, serialize_tree, to_dot

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_CONTRACT = 4


def _tree_argument(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--tree", help="tree in textual notation")
    group.add_argument("--tree-file", help="file containing the tree text")


def _load_tree(args: argparse.Namespace):
    text = args.tree
    if text is None:
        text = Path(args.tree_file).read_text(encoding="utf-8").strip()
    return parse_tree(text)


def _parse_trace(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treefreeze",
        description="Incremental process discovery with subtree freezing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_parse = sub.add_parser("parse", help="canonicalize a tree")
    p_parse.add_argument("tree", help="tree in textual notation")
    p_parse.add_argument("--dot", help="also write a DOT rendering here")

    p_align = sub.add_parser("align", help="align a trace against a tree")
    _tree_argument(p_align)
    p_align.add_argument(
        "--trace", required=True, help="comma-separated activities"
    )
    p_align.add_argument(
        "--search-budget", type=int, default=DEFAULT_SEARCH_BUDGET
    )
    p_align.add_argument("--format", choices=("text", "json"), default="text")

    p_metrics = sub.add_parser(
        "metrics", help="quality of a tree against a log"
    )
    _tree_argument(p_metrics)
    p_metrics.add_argument("--log", required=True, help="event log file")
    p_metrics.add_argument(
        "--search-budget", type=int, default=DEFAULT_SEARCH_BUDGET
    )
    p_metrics.add_argument("--format", choices=("json", "csv"), default="json")

    p_dot = sub.add_parser("export-dot", help="write a DOT rendering")
    _tree_argument(p_dot)
    p_dot.add_argument("-o", "--output", help="output file (default stdout)")

    p_run = sub.add_parser("run", help="replay a scenario file")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("--output-dir", help="override the scenario's output_dir")
    p_run.add_argument("--ipda", help="override the scenario's discovery step")
    p_run.add_argument("--loop-bound", type=int, default=None)
    p_run.add_argument("--search-budget", type=int, default=None)

    return parser


def _cmd_parse(args: argparse.Namespace) -> int:
    tree = parse_tree(args.tree)
    print(serialize_tree(tree))
    if args.dot:
        Path(args.dot).write_text(to_dot(tree), encoding="utf-8")
    return EXIT_OK


def _cmd_align(args: argparse.Namespace) -> int:
    tree = _load_tree(args)
    trace = _parse_trace(args.trace)
    alignment = optimal_alignment(tree, trace, budget=args.search_budget)
    if args.format == "json":
        payload = {
            "cost": alignment.cost,
            "log_moves": alignment.log_moves,
            "visible_model_moves": alignment.visible_model_moves,
            "moves": [
                {
                    "kind": move.kind,
                    "log": move.log,
                    "node": move.node,
                    "event": None if not isinstance(move.event, str) else move.event,
                }
                for move in alignment.moves
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(format_alignment(tree, alignment))
    return EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    tree = _load_tree(args)
    log = load_log(args.log)
    report = quality_report(log, tree, budget=args.search_budget)
    if args.format == "csv":
        print(CSV_HEADER)
        print(report.to_csv_row(0))
    else:
        print(report.to_json())
    return EXIT_OK


def _cmd_export_dot(args: argparse.Namespace) -> int:
    tree = _load_tree(args)
    text = to_dot(tree)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def _scenario_log(spec: dict, base: Path) -> EventLog:
    ref = spec.get("log")
    if ref is None:
        raise LogFormatError("scenario is missing the 'log' field")
    if isinstance(ref, dict):
        return from_traces([tuple(t) for t in ref["traces"]])
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    return load_log(path)


def run_scenario(
    scenario_path, output_dir: Optional[str] = None, **overrides
) -> dict:
    """Replay a scenario file; returns the summary written to disk."""
    scenario_path = Path(scenario_path)
    spec = json.loads(scenario_path.read_text(encoding="utf-8"))
    base = scenario_path.parent

    log = _scenario_log(spec, base)
    session = FreezeSession(
        log,
        tree=spec.get("initial_tree"),
        ipda=overrides.get("ipda") or spec.get("ipda", "reference"),
        loop_bound=overrides.get("loop_bound") or spec.get("loop_bound", 2),
        search_budget=overrides.get("search_budget")
        or spec.get("search_budget", DEFAULT_SEARCH_BUDGET),
    )

    out = Path(output_dir or spec.get("output_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    (out / "step_000.tree.txt").write_text(
        serialize_tree(session.tree) + "\n", encoding="utf-8"
    )

    steps_summary = []
    for number, step in enumerate(spec.get("steps", []), start=1):
        context = f"step {number}"
        try:
            if "frozen" in step:
                session.set_frozen(step["frozen"])
            kwargs = {
                "algorithm": step.get("algorithm", "advanced"),
                "ipda": step.get("ipda"),
            }
            if "trace" in step:
                kwargs["trace"] = tuple(step["trace"])
            elif "variant" in step:
                kwargs["variant"] = int(step["variant"])
            else:
                raise ValueError("step needs a 'trace' or 'variant' selector")
            session.apply_increment(**kwargs)
        except (ValueError, IndexError, KeyError, FreezeSelectionError) as exc:
            raise type(exc)(f"{context}: {exc}") from exc
        except ContractViolation as exc:
            raise ContractViolation(exc.stage, f"{context}: {exc}") from exc
        (out / f"step_{number:03d}.tree.txt").write_text(
            serialize_tree(session.tree) + "\n", encoding="utf-8"
        )
        record = session.steps[-1]
        steps_summary.append(
            {
                "trace": list(record.trace),
                "algorithm": record.algorithm,
                "ipda": record.ipda,
                "frozen": [list(p) for p in record.frozen_paths],
                "checks": record.checks,
            }
        )

    (out / "metrics.csv").write_text(session.metrics_csv(), encoding="utf-8")
    summary = {
        "initial_tree": serialize_tree(session.history[0].tree),
        "final_tree": serialize_tree(session.tree),
        "steps": steps_summary,
        "metrics": [r.to_dict() for r in session.reports],
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return summary


def _cmd_run(args: argparse.Namespace) -> int:
    run_scenario(
        args.scenario,
        output_dir=args.output_dir,
        ipda=args.ipda,
        loop_bound=args.loop_bound,
        search_budget=args.search_budget,
    )
    return EXIT_OK


_COMMANDS = {
    "parse": _cmd_parse,
    "align": _cmd_align,
    "metrics": _cmd_metrics,
    "export-dot": _cmd_export_dot,
    "run": _cmd_run,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SearchBudgetExceeded, ExplosionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolation as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (
        ParseError,
        LogFormatError,
        FreezeSelectionError,
        FileNotFoundError,
        IsADirectoryError,
        json.JSONDecodeError,
        ValueError,
        IndexError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
