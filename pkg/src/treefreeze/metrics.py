"""Quality metrics of a tree against an event log.

* fitness: alignment-based; one minus the total deviation cost over the
  worst-case cost, frequency-weighted per variant.  The worst case for a
  trace is deleting everything and walking the cheapest model run (trace
  length plus the fewest visible activities of any complete run).
* precision: escaping-edges style; over all replayable variant prefixes,
  one minus the weighted share of model-enabled activities never observed
  next in the log.  Prefixes the model cannot replay are skipped.
* f_measure: harmonic mean of the two (zero when both vanish).

All iteration orders are fixed and floats are only combined by summation,
so repeated runs produce byte-identical reports.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .alignments import DEFAULT_SEARCH_BUDGET, optimal_alignment
from .logs import EventLog, Trace, variants
from .semantics import enabled_after
from .trees import ProcessTree, serialize_tree


@dataclass(frozen=True)
class VariantQuality:
    trace: Trace
    frequency: int
    cost: int
    worst_cost: int


@dataclass(frozen=True)
class QualityReport:
    tree_text: str
    fitness: float
    precision: float
    f_measure: float
    per_variant: tuple[VariantQuality, ...]

    def to_dict(self) -> dict:
        return {
            "tree": self.tree_text,
            "fitness": self.fitness,
            "precision": self.precision,
            "f_measure": self.f_measure,
            "variants": [
                {
                    "trace": list(v.trace),
                    "frequency": v.frequency,
                    "cost": v.cost,
                    "worst_cost": v.worst_cost,
                }
                for v in self.per_variant
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv_row(self, index: int) -> str:
        """One plot-ready curve row: index, fitness, precision, f_measure."""
        return (
            f"{index},{self.fitness:.10f},"
            f"{self.precision:.10f},{self.f_measure:.10f}"
        )


CSV_HEADER = "increment,fitness,precision,f_measure"


def shortest_run_cost(t: ProcessTree, budget: int = DEFAULT_SEARCH_BUDGET) -> int:
    """Fewest visible activities over all complete runs of the tree."""
    return optimal_alignment(t, (), budget).cost


def fitness(
    log: EventLog,
    t: ProcessTree,
    budget: int = DEFAULT_SEARCH_BUDGET,
    _variants: Optional[list[tuple[Trace, int]]] = None,
) -> float:
    report = quality_report(log, t, budget, _variants, with_precision=False)
    return report.fitness


def precision(
    log: EventLog,
    t: ProcessTree,
    _variants: Optional[list[tuple[Trace, int]]] = None,
) -> float:
    """Escaping-edges precision of the tree w.r.t. the log."""
    variant_list = variants(log) if _variants is None else _variants
    weight: dict[Trace, int] = {}
    observed: dict[Trace, set[str]] = {}
    for trace, frequency in variant_list:
        for k in range(len(trace) + 1):
            prefix = trace[:k]
            weight[prefix] = weight.get(prefix, 0) + frequency
            observed.setdefault(prefix, set())
            if k < len(trace):
                observed[prefix].add(trace[k])
    enabled_total = 0
    escaping_total = 0
    for prefix in sorted(weight):
        enabled = enabled_after(t, prefix)
        if enabled is None:
            continue
        escaping = enabled - observed[prefix]
        enabled_total += weight[prefix] * len(enabled)
        escaping_total += weight[prefix] * len(escaping)
    if enabled_total == 0:
        return 1.0
    return 1.0 - escaping_total / enabled_total


def _harmonic(fitness_value: float, precision_value: float) -> float:
    if fitness_value + precision_value == 0:
        return 0.0
    return 2 * fitness_value * precision_value / (fitness_value + precision_value)


def f_measure(
    log: EventLog, t: ProcessTree, budget: int = DEFAULT_SEARCH_BUDGET
) -> float:
    """Harmonic mean of fitness and precision of the tree w.r.t. the log."""
    return quality_report(log, t, budget).f_measure


def quality_report(
    log: EventLog,
    t: ProcessTree,
    budget: int = DEFAULT_SEARCH_BUDGET,
    _variants: Optional[list[tuple[Trace, int]]] = None,
    with_precision: bool = True,
) -> QualityReport:
    variant_list = variants(log) if _variants is None else _variants
    empty_trace_cost = shortest_run_cost(t, budget)
    rows = []
    total_cost = 0
    total_worst = 0
    for trace, frequency in variant_list:
        alignment = optimal_alignment(t, trace, budget)
        worst = len(trace) + empty_trace_cost
        rows.append(
            VariantQuality(
                trace=trace,
                frequency=frequency,
                cost=alignment.cost,
                worst_cost=worst,
            )
        )
        total_cost += frequency * alignment.cost
        total_worst += frequency * worst
    fitness_value = 1.0 if total_worst == 0 else 1.0 - total_cost / total_worst
    precision_value = precision(log, t, variant_list) if with_precision else 0.0
    return QualityReport(
        tree_text=serialize_tree(t),
        fitness=fitness_value,
        precision=precision_value,
        f_measure=_harmonic(fitness_value, precision_value),
        per_variant=tuple(rows),
    )
