"""Regenerate the synthetic quality-trend fixture under demos/data/.

The fixture is a 20-variant log of a small order process whose closing
block runs ``e`` and ``f`` in parallel.  Every variant contains exactly
one such block, so a session that freezes the block exercises it at every
increment.  Two scenario files replay the same incremental schedule with
the structure-destroying "rebuild" discovery step: one with the advanced
freezing algorithm, one with the baseline.  The fixture is fully
deterministic — rerunning this script must reproduce the files byte for
byte.
"""
from __future__ import annotations

import json
from pathlib import Path

DATA = Path(__file__).parent / "data"

#: (body prefix, block order, suffix, frequency) per variant.
VARIANTS = [
    ("a b",   "e f", "",    20),
    ("a b",   "f e", "",    18),
    ("a c",   "e f", "",    16),
    ("a c",   "f e", "",    14),
    ("a b",   "e f", "d",   13),
    ("a b",   "f e", "d",   12),
    ("a c",   "e f", "d",   11),
    ("b c",   "e f", "",    10),
    ("b c",   "f e", "",     9),
    ("a b c", "e f", "",     8),
    ("a b c", "f e", "",     7),
    ("a b",   "e f", "d d",  6),
    ("a c b", "e f", "",     5),
    ("a c",   "e f", "d d",  4),
    ("b c",   "e f", "d",    4),
    ("a b c", "e f", "d",    3),
    ("c",     "e f", "",     3),
    ("c",     "f e", "",     2),
    ("b c",   "f e", "d",    2),
    ("a b c", "f e", "d d",  1),
]

INITIAL_TREE = "->(a,b,+(e,f))"


def trace_of(prefix: str, block: str, suffix: str) -> list[str]:
    return (prefix.split() + block.split() + suffix.split())


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)

    lines = []
    case = 0
    for prefix, block, suffix, count in VARIANTS:
        trace = trace_of(prefix, block, suffix)
        for _ in range(count):
            case += 1
            lines.append(json.dumps({"case": f"case_{case}", "trace": trace}))
    (DATA / "trend_log.jsonl").write_text("\n".join(lines) + "\n", "utf-8")

    # The same schedule for both algorithms: add all twenty variants in
    # frequency order.  The block is frozen before the first increment at
    # its path in the initial tree; afterwards the session re-resolves the
    # selection structurally, so later steps need no frozen field.
    for algorithm in ("advanced", "baseline"):
        steps = []
        for index in range(len(VARIANTS)):
            step = {"variant": index, "algorithm": algorithm}
            if index == 0:
                step["frozen"] = [[2]]
            steps.append(step)
        scenario = {
            "initial_tree": INITIAL_TREE,
            "log": "trend_log.jsonl",
            "ipda": "rebuild",
            "output_dir": f"out/trend_{algorithm}",
            "steps": steps,
        }
        path = DATA / f"trend_scenario_{algorithm}.json"
        path.write_text(
            json.dumps(scenario, indent=2, sort_keys=True) + "\n", "utf-8"
        )

    print(f"wrote fixture for {len(VARIANTS)} variants to {DATA}")


if __name__ == "__main__":
    main()
