"""Event-log model and ingestion (CSV, a minimal XES dialect, variant dumps)."""

from __future__ import annotations

import csv
import io
import logging
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Mapping

logger = logging.getLogger(__name__)

Trace = tuple[int, ...]


class LogFormatError(ValueError):
    """Raised when an input log cannot be parsed."""

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        self.line = line
        self.offset = offset
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class LogConfigError(ValueError):
    """Raised when a column mapping does not match the input."""


@dataclass(frozen=True)
class EventLog:
    """A multiset of traces stored as variant counts plus an empty-trace counter.

    Activities are interned: ``labels[i]`` is the display name of activity id ``i``.
    Sublogs produced during discovery share the label table of their parent, so
    their alphabet may be a strict subset of ``range(len(labels))``.
    """

    labels: tuple[str, ...]
    variants: Mapping[Trace, int]
    empty_count: int = 0
    metadata: Mapping[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.empty_count < 0:
            raise ValueError("empty_count must be non-negative")
        for trace, count in self.variants.items():
            if not trace:
                raise ValueError("empty traces belong in empty_count, not in variants")
            if count < 1:
                raise ValueError(f"variant count must be >= 1, got {count}")

    @classmethod
    def from_traces(
        cls,
        traces: Iterable[Iterable[str]] | Mapping[tuple[str, ...], int],
        labels: Iterable[str] | None = None,
    ) -> EventLog:
        """Build a log from label sequences (or a ``{sequence: count}`` mapping).

        Empty sequences are counted in ``empty_count``.
        """
        if isinstance(traces, Mapping):
            items = [(tuple(t), int(c)) for t, c in traces.items()]
        else:
            items = [(tuple(t), 1) for t in traces]
        table: dict[str, int] = {}
        for label in labels or ():
            table.setdefault(label, len(table))
        variants: Counter[Trace] = Counter()
        empty = 0
        for seq, count in items:
            if count <= 0:
                continue
            if not seq:
                empty += count
                continue
            variants[tuple(table.setdefault(a, len(table)) for a in seq)] += count
        return cls(tuple(table), dict(variants), empty)

    @property
    def alphabet(self) -> frozenset[int]:
        return frozenset(a for trace in self.variants for a in trace)

    @property
    def num_traces(self) -> int:
        """|L|, including empty traces."""
        return sum(self.variants.values()) + self.empty_count

    @property
    def num_nonempty(self) -> int:
        return sum(self.variants.values())

    @property
    def num_events(self) -> int:
        """||L||."""
        return sum(len(t) * c for t, c in self.variants.items())

    def label(self, activity: int) -> str:
        return self.labels[activity]

    def activity_id(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def traces(self) -> list[tuple[tuple[str, ...], int]]:
        """Variants as label tuples, in a deterministic order."""
        out = [(tuple(self.labels[a] for a in t), c) for t, c in self.variants.items()]
        out.sort(key=lambda item: (-item[1], item[0]))
        return out

    def with_variants(self, variants: Mapping[Trace, int], empty_count: int) -> EventLog:
        """A log over the same label table."""
        return EventLog(self.labels, dict(variants), empty_count)

    def without_empty(self) -> EventLog:
        return EventLog(self.labels, self.variants, 0)

    def project(self, keep: Iterable[int]) -> EventLog:
        """Drop every event whose activity is not in ``keep``.

        Traces that become empty are added to ``empty_count``.
        """
        keep = frozenset(keep)
        variants: Counter[Trace] = Counter()
        empty = self.empty_count
        for trace, count in self.variants.items():
            projected = tuple(a for a in trace if a in keep)
            if projected:
                variants[projected] += count
            else:
                empty += count
        return EventLog(self.labels, dict(variants), empty)


@dataclass(frozen=True)
class LogStats:
    traces: int
    events: int
    alphabet_size: int
    distinct_variants: int
    empty_traces: int

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.traces, self.events, self.alphabet_size, self.distinct_variants, self.empty_traces)


def log_stats(log: EventLog) -> LogStats:
    return LogStats(
        traces=log.num_traces,
        events=log.num_events,
        alphabet_size=len(log.alphabet),
        distinct_variants=len(log.variants),
        empty_traces=log.empty_count,
    )


@dataclass
class CsvConfig:
    case: str = "case"
    activity: str = "activity"
    timestamp: str | None = None
    delimiter: str = ","
    header: bool = True


def _as_text(stream: IO[bytes] | IO[str] | bytes | str) -> str:
    if isinstance(stream, bytes):
        return stream.decode("utf-8-sig")
    if isinstance(stream, str):
        return stream
    data = stream.read()
    return data.decode("utf-8-sig") if isinstance(data, bytes) else data


def _parse_timestamp(value: str, line: int) -> float:
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise LogFormatError(f"unparsable timestamp {value!r}", line=line) from None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.timestamp()


def parse_csv(stream: IO[bytes] | IO[str] | bytes | str, config: CsvConfig | None = None) -> EventLog:
    """Read an event log with one event per row.

    Without a header row, ``config.case``/``activity``/``timestamp`` may be
    column indices given as strings (``"0"``, ``"1"``...).
    """
    config = config or CsvConfig()
    text = _as_text(stream)
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=config.delimiter)
    rows = iter(reader)

    def column(name: str, header: list[str] | None) -> int:
        if header is None:
            try:
                return int(name)
            except ValueError:
                raise LogConfigError(f"column {name!r} must be an index when the input has no header") from None
        if name not in header:
            raise LogConfigError(f"missing column {name!r}")
        return header.index(name)

    header: list[str] | None = None
    first_line = 1
    if config.header:
        try:
            header = [h.strip() for h in next(rows)]
        except StopIteration:
            return EventLog((), {}, 0)
        first_line = 2
    case_col = column(config.case, header)
    act_col = column(config.activity, header)
    time_col = column(config.timestamp, header) if config.timestamp is not None else None

    cases: dict[str, list[tuple[float, int, str]]] = {}
    for offset, row in enumerate(rows):
        line = first_line + offset
        if not row or all(not cell.strip() for cell in row):
            continue
        needed = max(case_col, act_col, time_col if time_col is not None else -1)
        if len(row) <= needed:
            raise LogFormatError(f"expected at least {needed + 1} fields, got {len(row)}", line=line)
        case_id = row[case_col]
        events = cases.setdefault(case_id, [])
        activity = row[act_col]
        if not activity:
            # a case row without an activity registers the case only
            continue
        stamp = _parse_timestamp(row[time_col], line) if time_col is not None else 0.0
        events.append((stamp, line, activity))

    traces = []
    for events in cases.values():
        events.sort(key=lambda e: (e[0], e[1]))
        traces.append([e[2] for e in events])
    return EventLog.from_traces(traces)


def write_csv(log: EventLog, stream: IO[str], *, delimiter: str = ",") -> None:
    """Write one row per event with synthetic case ids (``case``, ``activity`` columns)."""
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["case", "activity"])
    n = 0
    for labels, count in log.traces():
        for _ in range(count):
            for activity in labels:
                writer.writerow([f"c{n}", activity])
            n += 1
    for _ in range(log.empty_count):
        writer.writerow([f"c{n}", ""])
        n += 1


_CONCEPT_NAME = "concept:name"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes_lite(stream: IO[bytes] | bytes | str) -> EventLog:
    """Read ``<trace>``/``<event>`` elements; events are named by their ``concept:name`` string.

    Events without a name are skipped and counted in ``metadata["skipped_events"]``.
    """
    if isinstance(stream, (bytes, str)):
        data = stream.encode("utf-8") if isinstance(stream, str) else stream
    else:
        data = stream.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    if not data.strip():
        return EventLog((), {}, 0, {"skipped_events": 0})
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        lines = data.split(b"\n")
        offset = sum(len(x) + 1 for x in lines[: line - 1]) + col
        raise LogFormatError(f"malformed XML: {exc}", offset=offset) from None

    traces = []
    skipped = 0
    for trace_el in root.iter():
        if _local(trace_el.tag) != "trace":
            continue
        seq = []
        for event_el in trace_el:
            if _local(event_el.tag) != "event":
                continue
            name = None
            for attr in event_el:
                if _local(attr.tag) == "string" and attr.get("key") == _CONCEPT_NAME:
                    name = attr.get("value")
                    break
            if name is None:
                skipped += 1
                continue
            seq.append(name)
        traces.append(seq)
    if skipped:
        logger.warning("skipped %d events without %s", skipped, _CONCEPT_NAME)
    log = EventLog.from_traces(traces)
    return EventLog(log.labels, log.variants, log.empty_count, {"skipped_events": skipped})


def dump_variants(log: EventLog) -> str:
    """Serialize as ``empty=n`` followed by ``count<TAB>a,b,c`` lines."""
    lines = [f"empty={log.empty_count}"]
    for labels, count in log.traces():
        lines.append(f"{count}\t{','.join(labels)}")
    return "\n".join(lines) + "\n"


def parse_variants(stream: IO[bytes] | IO[str] | bytes | str) -> EventLog:
    text = _as_text(stream)
    counts: Counter[tuple[str, ...]] = Counter()
    empty = 0
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("empty="):
            try:
                empty += int(line[len("empty="):])
            except ValueError:
                raise LogFormatError(f"bad empty-trace count {line!r}", line=n) from None
            continue
        count_text, _, body = raw.partition("\t")
        try:
            count = int(count_text)
        except ValueError:
            raise LogFormatError(f"bad variant count {count_text!r}", line=n) from None
        if count < 1:
            raise LogFormatError("variant count must be >= 1", line=n)
        seq = tuple(a.strip() for a in body.split(",")) if body.strip() else ()
        if not seq:
            empty += count
        else:
            counts[seq] += count
    log = EventLog.from_traces(counts)
    return EventLog(log.labels, log.variants, log.empty_count + empty)
