#!/usr/bin/env python3
"""Replay the bundled 20-variant trend scenario with both strategies.

``make_trend_fixture.py`` generates the log and the two scenario files;
this script replays them and prints the per-increment F-measure curves
side by side.  The advanced strategy protects the frozen two-activity
block while the model around it is rebuilt, which keeps its curve on or
above the baseline at every step.

Outputs (step trees, metrics.csv, summary.json) land in ``demos/out/``.
"""
import csv
from pathlib import Path

from treefreeze.cli import run_scenario

HERE = Path(__file__).resolve().parent
DATA = HERE / "data"
OUT = HERE / "out"


def read_curve(output_dir: Path) -> list[dict]:
    with (output_dir / "metrics.csv").open(encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def main() -> None:
    curves = {}
    for algorithm in ("advanced", "baseline"):
        scenario = DATA / f"trend_scenario_{algorithm}.json"
        output_dir = OUT / f"trend_{algorithm}"
        run_scenario(scenario, output_dir=output_dir)
        curves[algorithm] = read_curve(output_dir)
        print(f"replayed {scenario.name} -> {output_dir}")
    print()

    print(f"{'step':>4}  {'advanced F':>10}  {'baseline F':>10}  margin")
    for adv, base in zip(curves["advanced"], curves["baseline"]):
        a, b = float(adv["f_measure"]), float(base["f_measure"])
        marker = "" if a >= b else "  <-- baseline ahead"
        print(
            f"{adv['increment']:>4}  {a:>10.6f}  {b:>10.6f}  "
            f"{a - b:+.6f}{marker}"
        )

    final_a = float(curves["advanced"][-1]["f_measure"])
    final_b = float(curves["baseline"][-1]["f_measure"])
    print()
    print(f"final F-measure: advanced {final_a:.6f} vs baseline {final_b:.6f}")


if __name__ == "__main__":
    main()
