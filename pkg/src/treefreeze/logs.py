"""Event logs: CSV / XES import, JSON-lines round-trip, variants.

Only the bare minimum of the XES standard is supported: ``concept:name``
on events (the activity), ``time:timestamp`` for ordering, and
``concept:name`` on traces (the case id).  CSV files need a case id,
activity, and timestamp column; timestamps are RFC 3339 or a day-first
short form like ``10/03/21 12:00``.  All importers fail loudly with the
offending row or element rather than guessing.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Union
from xml.etree import ElementTree

from .errors import LogFormatError

Trace = tuple[str, ...]


@dataclass(frozen=True)
class EventLog:
    """An ordered collection of cases; each case is (case id, trace)."""

    cases: tuple[tuple[str, Trace], ...]

    @property
    def traces(self) -> tuple[Trace, ...]:
        return tuple(trace for _, trace in self.cases)

    def alphabet(self) -> frozenset[str]:
        return frozenset(a for trace in self.traces for a in trace)

    def __len__(self) -> int:
        return len(self.cases)


def from_traces(traces: Iterable[Iterable[str]]) -> EventLog:
    """Build a log from bare traces, numbering the cases."""
    cases = tuple(
        (f"case_{i + 1}", tuple(trace)) for i, trace in enumerate(traces)
    )
    return EventLog(cases)


def variants(log: EventLog) -> list[tuple[Trace, int]]:
    """Distinct traces with frequencies, most frequent first.

    Ties are broken lexicographically so the order is deterministic.
    """
    counts: dict[Trace, int] = {}
    for trace in log.traces:
        counts[trace] = counts.get(trace, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


_DAY_FIRST_FORMATS = (
    "%d/%m/%y %H:%M",
    "%d/%m/%y %H:%M:%S",
    "%d/%m/%Y %H:%M",
    "%d/%m/%Y %H:%M:%S",
)


def _parse_timestamp(text: str) -> datetime:
    candidate = text.strip()
    try:
        return datetime.fromisoformat(candidate.replace("Z", "+00:00"))
    except ValueError:
        pass
    for fmt in _DAY_FIRST_FORMATS:
        try:
            return datetime.strptime(candidate, fmt)
        except ValueError:
            continue
    raise ValueError(f"unsupported timestamp {text!r}")


def import_csv(
    path: Union[str, Path],
    case_column: str = "case_id",
    activity_column: str = "activity",
    timestamp_column: str = "timestamp",
    delimiter: str = ",",
) -> EventLog:
    """Read a flat event table; one row per event.

    Events are grouped by case and ordered by timestamp (stable, so equal
    timestamps keep file order); cases appear in order of first occurrence.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle, delimiter=delimiter)
        if reader.fieldnames is None:
            raise LogFormatError(f"{path}: empty file, expected a header row")
        missing = [
            column
            for column in (case_column, activity_column, timestamp_column)
            if column not in reader.fieldnames
        ]
        if missing:
            raise LogFormatError(
                f"{path}: missing column(s) {missing}; found {reader.fieldnames}"
            )
        events: dict[str, list[tuple[datetime, int, str]]] = {}
        order: list[str] = []
        for row_number, row in enumerate(reader, start=2):
            case = row[case_column]
            activity = row[activity_column]
            stamp_text = row[timestamp_column]
            if case is None or activity is None or stamp_text is None:
                raise LogFormatError(f"{path}: row {row_number}: short row")
            if not activity:
                raise LogFormatError(
                    f"{path}: row {row_number}: empty activity name"
                )
            try:
                stamp = _parse_timestamp(stamp_text)
            except ValueError as exc:
                raise LogFormatError(
                    f"{path}: row {row_number}: {exc}"
                ) from None
            if case not in events:
                events[case] = []
                order.append(case)
            events[case].append((stamp, row_number, activity))
    if not order:
        raise LogFormatError(f"{path}: no event rows")
    cases = []
    for case in order:
        rows = sorted(events[case], key=lambda item: (item[0], item[1]))
        cases.append((case, tuple(activity for _, _, activity in rows)))
    return EventLog(tuple(cases))


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def import_xes_lite(path: Union[str, Path]) -> EventLog:
    """Read a (minimal) XES file: traces of events with ``concept:name``."""
    path = Path(path)
    try:
        root = ElementTree.parse(path).getroot()
    except ElementTree.ParseError as exc:
        raise LogFormatError(f"{path}: not well-formed XML: {exc}") from None
    if _local_name(root.tag) != "log":
        raise LogFormatError(f"{path}: root element is not <log>")
    cases = []
    trace_number = 0
    for element in root:
        if _local_name(element.tag) != "trace":
            continue
        trace_number += 1
        case_id = f"trace_{trace_number}"
        for attr in element:
            if (
                _local_name(attr.tag) == "string"
                and attr.get("key") == "concept:name"
            ):
                case_id = attr.get("value", case_id)
        events: list[tuple[object, int, str]] = []
        position = 0
        timestamps_seen = True
        for child in element:
            if _local_name(child.tag) != "event":
                continue
            position += 1
            name = None
            stamp = None
            for attr in child:
                key = attr.get("key")
                if _local_name(attr.tag) == "string" and key == "concept:name":
                    name = attr.get("value")
                elif _local_name(attr.tag) == "date" and key == "time:timestamp":
                    raw = attr.get("value", "")
                    try:
                        stamp = _parse_timestamp(raw)
                    except ValueError:
                        raise LogFormatError(
                            f"{path}: trace {trace_number}, event {position}: "
                            f"unsupported timestamp {raw!r}"
                        ) from None
            if name is None:
                raise LogFormatError(
                    f"{path}: trace {trace_number}, event {position}: "
                    "missing concept:name"
                )
            if stamp is None:
                timestamps_seen = False
            events.append((stamp, position, name))
        if timestamps_seen:
            events.sort(key=lambda item: (item[0], item[1]))
        cases.append((case_id, tuple(name for _, _, name in events)))
    if not cases:
        raise LogFormatError(f"{path}: no <trace> elements")
    return EventLog(tuple(cases))


def write_jsonl(log: EventLog, path: Union[str, Path]) -> None:
    """Dump a log as JSON lines: ``{"case": id, "trace": [activities]}``."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for case, trace in log.cases:
            handle.write(
                json.dumps({"case": case, "trace": list(trace)}) + "\n"
            )


def read_jsonl(path: Union[str, Path]) -> EventLog:
    path = Path(path)
    cases = []
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogFormatError(
                    f"{path}: line {line_number}: {exc}"
                ) from None
            if (
                not isinstance(record, dict)
                or "case" not in record
                or "trace" not in record
                or not isinstance(record["trace"], list)
                or not all(isinstance(a, str) for a in record["trace"])
            ):
                raise LogFormatError(
                    f"{path}: line {line_number}: expected "
                    '{"case": ..., "trace": [...]}'
                )
            cases.append((str(record["case"]), tuple(record["trace"])))
    if not cases:
        raise LogFormatError(f"{path}: no records")
    return EventLog(tuple(cases))


def load_log(path: Union[str, Path], **csv_options) -> EventLog:
    """Dispatch on file suffix: .csv, .xes, or .jsonl/.json lines."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return import_csv(path, **csv_options)
    if suffix == ".xes":
        return import_xes_lite(path)
    if suffix in (".jsonl", ".json"):
        return read_jsonl(path)
    raise LogFormatError(f"{path}: unsupported log format {suffix!r}")
