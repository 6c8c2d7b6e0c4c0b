"""Trace data model and its canonical text serialization.

A trace file looks like::

    # comment
    run run_0
    ppt isIsosceles:::ENTER
    var x int
    var y int
    var z int

    sample isIsosceles:::ENTER 1 2 3

All ``ppt`` blocks precede all ``sample`` lines.
"""

from __future__ import annotations

import enum
import fnmatch
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

RETURN_VAR = "return"
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INT = re.compile(r"-?[0-9]+\Z")


class TraceError(ValueError):
    """Malformed trace text or an inconsistent Trace value."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class PointKind(enum.Enum):
    ENTER = "ENTER"
    EXIT = "EXIT"

    @property
    def order(self) -> int:
        return 0 if self is PointKind.ENTER else 1


@dataclass(frozen=True)
class VarDecl:
    name: str
    vtype: str = "int"

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise TraceError(f"invalid variable name {self.name!r}")
        if self.vtype != "int":
            raise TraceError(f"unsupported type {self.vtype!r} for {self.name}")


@dataclass(frozen=True)
class ProgramPoint:
    name: str
    kind: PointKind
    decls: tuple[VarDecl, ...] = ()

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name) or ":::" in self.name:
            raise TraceError(f"invalid program point name {self.name!r}")
        names = [d.name for d in self.decls]
        if len(set(names)) != len(names):
            raise TraceError(f"duplicate variable in {self.label}")
        if self.kind is PointKind.EXIT and (not names or names[-1] != RETURN_VAR):
            raise TraceError(f"exit point {self.label} must declare '{RETURN_VAR}' last")

    @property
    def label(self) -> str:
        return f"{self.name}:::{self.kind.value}"

    @property
    def var_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.decls)

    @property
    def sort_key(self) -> tuple[str, int]:
        return (self.name, self.kind.order)

    def index(self, var: str) -> int:
        try:
            return self.var_names.index(var)
        except ValueError:
            raise KeyError(f"{var!r} is not declared at {self.label}") from None

    @classmethod
    def from_names(cls, label: str, names: Iterable[str]) -> "ProgramPoint":
        name, kind = split_label(label)
        return cls(name, kind, tuple(VarDecl(n) for n in names))


def split_label(label: str) -> tuple[str, PointKind]:
    name, sep, kind = label.rpartition(":::")
    if not sep or not name:
        raise TraceError(f"malformed program point {label!r}; expected NAME:::ENTER or NAME:::EXIT")
    try:
        return name, PointKind(kind)
    except ValueError:
        raise TraceError(f"unknown point kind {kind!r} in {label!r}") from None


def label_key(label: str) -> tuple[str, int]:
    """Sort key placing points by (name, ENTER before EXIT)."""
    name, kind = split_label(label)
    return (name, kind.order)


@dataclass(frozen=True)
class Sample:
    ppt: ProgramPoint
    values: tuple[int, ...]
    # Position is carried by the enclosing trace; the serial is not serialized.
    serial: int = field(default=0, compare=False)

    def __post_init__(self):
        if len(self.values) != len(self.ppt.decls):
            raise TraceError(
                f"arity mismatch at {self.ppt.label}: "
                f"expected {len(self.ppt.decls)} values, got {len(self.values)}"
            )
        for v in self.values:
            if isinstance(v, bool) or not isinstance(v, int):
                raise TraceError(f"non-integer value {v!r} at {self.ppt.label}")
            if not INT64_MIN <= v <= INT64_MAX:
                raise TraceError(f"value {v} out of int64 range at {self.ppt.label}")

    def value(self, var: str) -> int:
        return self.values[self.ppt.index(var)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.ppt.var_names, self.values))


@dataclass(frozen=True)
class Trace:
    run_id: str
    points: Mapping[str, ProgramPoint] = field(default_factory=dict)
    samples: tuple[Sample, ...] = ()

    def __post_init__(self):
        if not self.run_id or any(c.isspace() for c in self.run_id):
            raise TraceError(f"invalid run id {self.run_id!r}")
        for label, point in self.points.items():
            if label != point.label:
                raise TraceError(f"point table key {label!r} does not match {point.label!r}")
        last = None
        for s in self.samples:
            if self.points.get(s.ppt.label) != s.ppt:
                raise TraceError(f"sample references undeclared program point {s.ppt.label}")
            if last is not None and s.serial <= last:
                raise TraceError("sample serials must be strictly increasing")
            last = s.serial

    def __hash__(self):
        return hash((self.run_id, tuple(sorted(self.points)), self.samples))

    @classmethod
    def build(
        cls,
        run_id: str,
        points: Iterable[ProgramPoint],
        samples: Iterable[tuple[str, Iterable[int]]] = (),
    ) -> "Trace":
        """Construct a trace from points and ``(label, values)`` rows."""
        table: dict[str, ProgramPoint] = {}
        for p in points:
            if p.label in table:
                raise TraceError(f"duplicate program point {p.label}")
            table[p.label] = p
        rows = []
        for serial, (label, values) in enumerate(samples):
            if label not in table:
                raise TraceError(f"sample references undeclared program point {label}")
            rows.append(Sample(table[label], tuple(values), serial))
        return cls(run_id, table, tuple(rows))

    def sorted_points(self) -> list[ProgramPoint]:
        return sorted(self.points.values(), key=lambda p: p.sort_key)

    def samples_at(self, label: str) -> list[Sample]:
        return [s for s in self.samples if s.ppt.label == label]

    def restrict(self, patterns: Iterable[str] | str | None) -> "Trace":
        """Keep only the points matching any pattern (see ``match_points``)."""
        if patterns is None:
            return self
        keep = match_points(self.points, patterns)
        return Trace(
            self.run_id,
            {l: p for l, p in self.points.items() if l in keep},
            tuple(s for s in self.samples if s.ppt.label in keep),
        )


def _expand_pattern(pattern: str) -> str:
    if ":::" in pattern:
        return pattern
    if pattern in ("ENTER", "EXIT"):
        return f"*:::{pattern}"
    return f"{pattern}:::*"


def match_points(labels: Iterable[str], patterns: Iterable[str] | str) -> set[str]:
    """Labels matching any glob pattern.

    ``ENTER``/``EXIT`` select a point kind, a bare name selects both points of
    a function, anything containing ``:::`` is matched against the full label.
    """
    if isinstance(patterns, str):
        patterns = [p for p in patterns.split(",") if p.strip()]
    pats = [_expand_pattern(p.strip()) for p in patterns]
    return {l for l in labels if any(fnmatch.fnmatchcase(l, p) for p in pats)}


def _columns(line: str) -> list[tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _parse_int(token: str, lineno: int, col: int) -> int:
    if not _INT.match(token):
        raise TraceError(f"non-integer value {token!r}", lineno, col)
    v = int(token)
    if not INT64_MIN <= v <= INT64_MAX:
        raise TraceError(f"value {token} out of int64 range", lineno, col)
    return v


def parse_trace(text: str | bytes) -> Trace:
    """Parse trace text. Errors carry the offending line and column."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceError(f"trace is not valid UTF-8: {exc}") from None

    run_id: str | None = None
    points: dict[str, ProgramPoint] = {}
    samples: list[Sample] = []
    block: tuple[str, PointKind, list[VarDecl], int] | None = None

    def close_block():
        nonlocal block
        if block is not None:
            name, kind, decls, at = block
            try:
                point = ProgramPoint(name, kind, tuple(decls))
            except TraceError as exc:
                raise TraceError(exc.message, at, 1) from None
            points[point.label] = point
            block = None

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if line.lstrip().startswith("#"):
            continue
        if not line.strip():
            close_block()
            continue
        cols = _columns(line)
        col, head = cols[0]
        args = cols[1:]

        if head == "run":
            if run_id is not None:
                raise TraceError("duplicate run line", lineno, col)
            if points or block or samples:
                raise TraceError("run line must precede declarations", lineno, col)
            if len(args) != 1:
                raise TraceError("expected: run <run_id>", lineno, col)
            run_id = args[0][1]
        elif head == "ppt":
            if run_id is None:
                raise TraceError("missing run line before declarations", lineno, col)
            if samples:
                raise TraceError("ppt declarations must precede all samples", lineno, col)
            if len(args) != 1:
                raise TraceError("expected: ppt <name>:::<ENTER|EXIT>", lineno, col)
            close_block()
            acol, label = args[0]
            try:
                name, kind = split_label(label)
            except TraceError as exc:
                raise TraceError(exc.message, lineno, acol) from None
            if f"{name}:::{kind.value}" in points:
                raise TraceError(f"duplicate program point {label}", lineno, acol)
            block = (name, kind, [], lineno)
        elif head == "var":
            if block is None:
                raise TraceError("var line outside a ppt block", lineno, col)
            if len(args) != 2:
                raise TraceError("expected: var <name> int", lineno, col)
            (ncol, vname), (tcol, vtype) = args
            if not _IDENT.match(vname):
                raise TraceError(f"invalid variable name {vname!r}", lineno, ncol)
            if vtype != "int":
                raise TraceError(f"unsupported type {vtype!r}", lineno, tcol)
            if any(d.name == vname for d in block[2]):
                raise TraceError(f"duplicate variable {vname}", lineno, ncol)
            block[2].append(VarDecl(vname, vtype))
        elif head == "sample":
            if run_id is None:
                raise TraceError("missing run line before samples", lineno, col)
            close_block()
            if not args:
                raise TraceError("expected: sample <name>:::<ENTER|EXIT> <values...>", lineno, col)
            acol, label = args[0]
            point = points.get(label)
            if point is None:
                raise TraceError(f"sample references undeclared program point {label}", lineno, acol)
            values = tuple(_parse_int(tok, lineno, c) for c, tok in args[1:])
            if len(values) != len(point.decls):
                raise TraceError(
                    f"arity mismatch at {label}: expected {len(point.decls)} values, got {len(values)}",
                    lineno,
                    acol,
                )
            samples.append(Sample(point, values, len(samples)))
        else:
            raise TraceError(f"unknown directive {head!r}", lineno, col)

    close_block()
    if run_id is None:
        raise TraceError("missing run line", 1, 1)
    return Trace(run_id, points, tuple(samples))


def write_trace(trace: Trace) -> str:
    """Render the canonical text form: sorted points, serial-ordered samples, LF endings."""
    out = [f"run {trace.run_id}"]
    for point in trace.sorted_points():
        out.append(f"ppt {point.label}")
        out.extend(f"var {d.name} {d.vtype}" for d in point.decls)
        out.append("")
    for s in sorted(trace.samples, key=lambda s: s.serial):
        out.append(" ".join(["sample", s.ppt.label, *map(str, s.values)]))
    return "\n".join(out) + "\n"


def read_trace_file(path) -> Trace:
    with open(path, "rb") as fh:
        return parse_trace(fh.read())
