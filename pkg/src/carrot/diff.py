"""Contrast a good-run model with a failing run and render the findings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .invariants import InvariantInstance
from .spectra import Model, Spectrum, check_compatible, absorb
from .trace import label_key


@dataclass(frozen=True)
class ValueExtension:
    ppt: str
    var: str
    new_values: tuple[int, ...]


@dataclass(frozen=True)
class PairExtension:
    ppt: str
    vars: tuple[str, str]
    new_pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class DiffReport:
    bad_run_id: str
    invalidated: tuple[InvariantInstance, ...] = ()
    value_extensions: tuple[ValueExtension, ...] = ()
    pair_extensions: tuple[PairExtension, ...] = ()
    # points the bad run reached but no good run did
    unmodeled: tuple[str, ...] = field(default=())

    @property
    def is_empty(self) -> bool:
        return not (self.invalidated or self.value_extensions or self.pair_extensions or self.unmodeled)

    def __len__(self):
        return (
            len(self.invalidated) + len(self.value_extensions)
            + len(self.pair_extensions) + len(self.unmodeled)
        )


def diff(model: Model, bad: Spectrum) -> DiffReport:
    """Invariants of ``model`` the bad run falsifies, plus value/pair-set growth."""
    check_compatible(model, bad, f"bad run {bad.run_id}")
    after = absorb(model, bad)
    invalidated = sorted(model.live - after.live, key=lambda i: i.sort_key)

    unmodeled = sorted(bad.observed - model.observed, key=label_key)
    modeled = bad.observed & model.observed
    var_pos = {
        (label, v): i for label, p in model.points.items() for i, v in enumerate(p.var_names)
    }

    vext = []
    for key in sorted(bad.vsets, key=lambda k: (label_key(k[0]), var_pos[k])):
        if key[0] not in modeled:
            continue
        new = bad.vsets[key] - model.vsets.get(key, frozenset())
        if new:
            vext.append(ValueExtension(key[0], key[1], tuple(sorted(new))))

    pext = []
    for key in sorted(bad.psets, key=lambda k: (label_key(k[0]), k[1], k[2])):
        if key[0] not in modeled:
            continue
        new = bad.psets[key] - model.psets.get(key, frozenset())
        if new:
            pext.append(PairExtension(key[0], (key[1], key[2]), tuple(sorted(new))))

    return DiffReport(bad.run_id, tuple(invalidated), tuple(vext), tuple(pext), tuple(unmodeled))


EMPTY_TEXT = "no invariants invalidated; no value-set extensions"


def _fmt_values(values) -> str:
    return "{" + ", ".join(map(str, values)) + "}"


def _fmt_pairs(pairs) -> str:
    return "{" + ", ".join(f"({v}, {w})" for v, w in pairs) + "}"


def render_text(report: DiffReport) -> str:
    if report.is_empty:
        return EMPTY_TEXT + "\n"
    lines = []
    if not report.invalidated:
        lines.append("no invariants invalidated")
    for inv in report.invalidated:
        lines.append(f"{inv.ppt}  violated: {inv.predicate()}")
    for label in report.unmodeled:
        lines.append(f"{label}  unmodeled: never exercised by a good run")
    # value-set growth is a weak signal; keep it below the relational findings
    for ext in report.value_extensions:
        lines.append(f"{ext.ppt}  new values: {ext.var} in {_fmt_values(ext.new_values)}")
    for ext in report.pair_extensions:
        a, b = ext.vars
        lines.append(f"{ext.ppt}  new pairs: ({a}, {b}) in {_fmt_pairs(ext.new_pairs)}")
    return "\n".join(lines) + "\n"


def report_records(report: DiffReport) -> list[dict]:
    """Flat finding records: ``{category, ppt, kind, vars, detail}``."""
    records = []
    for inv in report.invalidated:
        records.append({
            "category": "invalidated",
            "ppt": inv.ppt,
            "kind": inv.kind.value,
            "vars": list(inv.slots),
            "detail": {"predicate": inv.predicate(), "const": inv.learned_const},
        })
    for label in report.unmodeled:
        records.append({"category": "unmodeled", "ppt": label, "kind": None, "vars": [], "detail": {}})
    for ext in report.value_extensions:
        records.append({
            "category": "value_ext",
            "ppt": ext.ppt,
            "kind": "ValueSet",
            "vars": [ext.var],
            "detail": {"new_values": list(ext.new_values)},
        })
    for ext in report.pair_extensions:
        records.append({
            "category": "pair_ext",
            "ppt": ext.ppt,
            "kind": "PairValueSet",
            "vars": list(ext.vars),
            "detail": {"new_pairs": [list(p) for p in ext.new_pairs]},
        })
    return records


def render_structured(report: DiffReport) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in report_records(report))


def render_report(report: DiffReport, format: str = "text") -> str:
    if format == "text":
        return render_text(report)
    if format == "structured":
        return render_structured(report)
    raise ValueError(f"unknown report format {format!r}")
