"""Per-run spectra and the good-run model built from them.

A spectrum only speaks for the program points its run exercised.  The
model intersects live invariants point by point over the runs that reached
each point, and unions value sets; a point no run has reached contributes
no constraint rather than an empty one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .invariants import (
    ALL_SCHEMATA,
    InvariantInstance,
    PointSets,
    Schema,
    Status,
    instantiate_all,
    update_invariant,
    update_value_sets,
)
from .trace import ProgramPoint, Sample, Trace, label_key

VarKey = tuple[str, str]
PairKey = tuple[str, str, str]


class IncompatibleError(ValueError):
    """Spectra or models built from different instrumentation or settings."""


class ModelFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Spectrum:
    run_id: str
    points: Mapping[str, ProgramPoint]
    observed: frozenset[str]
    live: frozenset[InvariantInstance]
    vsets: Mapping[VarKey, frozenset[int]]
    psets: Mapping[PairKey, frozenset[tuple[int, int]]]
    schemata: frozenset[Schema] = ALL_SCHEMATA
    value_sets: bool = True
    pair_sets: bool = True

    def live_at(self, label: str) -> set[InvariantInstance]:
        return {i for i in self.live if i.ppt == label}


@dataclass(frozen=True)
class Model:
    points: Mapping[str, ProgramPoint]
    observed: frozenset[str]
    live: frozenset[InvariantInstance]
    vsets: Mapping[VarKey, frozenset[int]]
    psets: Mapping[PairKey, frozenset[tuple[int, int]]]
    runs_absorbed: int
    schemata: frozenset[Schema] = ALL_SCHEMATA
    value_sets: bool = True
    pair_sets: bool = True

    def live_at(self, label: str) -> set[InvariantInstance]:
        return {i for i in self.live if i.ppt == label}

    @property
    def live_count(self) -> int:
        return len(self.live)

    def value_count(self) -> int:
        return sum(len(v) for v in self.vsets.values())

    def pair_count(self) -> int:
        return sum(len(v) for v in self.psets.values())

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum) -> "Model":
        return cls(
            dict(spectrum.points), spectrum.observed, spectrum.live,
            dict(spectrum.vsets), dict(spectrum.psets), 1,
            spectrum.schemata, spectrum.value_sets, spectrum.pair_sets,
        )


class Engine:
    """Streams samples through every enabled schema at every declared point.

    One engine over one trace yields that run's spectrum; one engine over
    several concatenated traces yields the same model as intersecting their
    spectra.
    """

    def __init__(
        self,
        points: Mapping[str, ProgramPoint],
        schemata: Iterable[Schema] = ALL_SCHEMATA,
        value_sets: bool = True,
        pair_sets: bool = True,
    ):
        self.points = dict(points)
        self.schemata = frozenset(schemata)
        self.value_sets = value_sets
        self.pair_sets = pair_sets
        self.samples_seen = 0
        self._instances: dict[str, list[InvariantInstance]] = {
            label: sorted(instantiate_all(p, self.schemata), key=lambda i: i.sort_key)
            for label, p in self.points.items()
        }
        self._sets: dict[str, PointSets] = {
            label: PointSets.empty(p, value_sets, pair_sets) for label, p in self.points.items()
        }
        self._observed: set[str] = set()

    def observe(self, sample: Sample) -> None:
        label = sample.ppt.label
        if self.points.get(label) != sample.ppt:
            raise IncompatibleError(f"sample at {label} does not match the engine's point table")
        self._instances[label] = [
            inv
            for inv in (update_invariant(i, sample) for i in self._instances[label])
            if inv.status is not Status.Falsified
        ]
        update_value_sets(self._sets[label], sample)
        self._observed.add(label)
        self.samples_seen += 1

    def feed(self, trace: Trace) -> "Engine":
        _check_tables(self.points, trace.points, trace.run_id)
        for s in trace.samples:
            self.observe(s)
        return self

    def _snapshot(self):
        live = frozenset(
            i for label in self._observed for i in self._instances[label]
        )
        vsets = {
            (label, var): frozenset(vs)
            for label in self._observed
            for var, vs in self._sets[label].values.items()
        }
        psets = {
            (label, a, b): frozenset(ps)
            for label in self._observed
            for (a, b), ps in self._sets[label].pairs.items()
        }
        return frozenset(self._observed), live, vsets, psets

    def spectrum(self, run_id: str) -> Spectrum:
        observed, live, vsets, psets = self._snapshot()
        return Spectrum(
            run_id, dict(self.points), observed, live, vsets, psets,
            self.schemata, self.value_sets, self.pair_sets,
        )

    def model(self, runs_absorbed: int) -> Model:
        observed, live, vsets, psets = self._snapshot()
        return Model(
            dict(self.points), observed, live, vsets, psets, runs_absorbed,
            self.schemata, self.value_sets, self.pair_sets,
        )


def _check_tables(a: Mapping[str, ProgramPoint], b: Mapping[str, ProgramPoint], what: str) -> None:
    if dict(a) == dict(b):
        return
    for label in sorted(set(a) & set(b), key=label_key):
        if a[label] != b[label]:
            raise IncompatibleError(
                f"{what}: program point {label} declared as "
                f"({', '.join(a[label].var_names)}) and ({', '.join(b[label].var_names)})"
            )
    only = sorted(set(a) ^ set(b), key=label_key)
    raise IncompatibleError(f"{what}: program point tables differ at {', '.join(only)}")


def check_compatible(a, b, what: str = "inputs") -> None:
    """Raise IncompatibleError unless ``a`` and ``b`` share points and settings."""
    if a.schemata != b.schemata:
        raise IncompatibleError(f"{what}: computed with different schemata")
    if (a.value_sets, a.pair_sets) != (b.value_sets, b.pair_sets):
        raise IncompatibleError(f"{what}: value-set/pair-set settings differ")
    _check_tables(a.points, b.points, what)


def compute_spectrum(
    trace: Trace,
    enabled: Iterable[Schema] = ALL_SCHEMATA,
    value_sets: bool = True,
    pair_sets: bool = True,
) -> Spectrum:
    engine = Engine(trace.points, enabled, value_sets, pair_sets)
    return engine.feed(trace).spectrum(trace.run_id)


def absorb(model: Model, spectrum: Spectrum) -> Model:
    """Fold one more run into ``model``."""
    check_compatible(model, spectrum, f"run {spectrum.run_id}")
    seen = spectrum.observed
    # points the new run did not reach keep their current invariants
    kept = {i for i in model.live if i.ppt not in seen}
    for label in seen:
        if label in model.observed:
            kept |= model.live_at(label) & spectrum.live_at(label)
        else:
            kept |= spectrum.live_at(label)
    vsets = dict(model.vsets)
    for key, vs in spectrum.vsets.items():
        vsets[key] = vsets.get(key, frozenset()) | vs
    psets = dict(model.psets)
    for key, ps in spectrum.psets.items():
        psets[key] = psets.get(key, frozenset()) | ps
    return Model(
        dict(model.points), model.observed | seen, frozenset(kept), vsets, psets,
        model.runs_absorbed + 1, model.schemata, model.value_sets, model.pair_sets,
    )


def build_model(spectra: Sequence[Spectrum]) -> Model:
    """Intersect live invariants and union value sets across good-run spectra."""
    spectra = list(spectra)
    if not spectra:
        raise ValueError("build_model needs at least one spectrum")
    model = Model.from_spectrum(spectra[0])
    for s in spectra[1:]:
        model = absorb(model, s)
    return model


def stream_model(
    traces: Sequence[Trace],
    enabled: Iterable[Schema] = ALL_SCHEMATA,
    value_sets: bool = True,
    pair_sets: bool = True,
) -> Model:
    """Build the model by pushing every good trace through a single engine."""
    traces = list(traces)
    if not traces:
        raise ValueError("stream_model needs at least one trace")
    engine = Engine(traces[0].points, enabled, value_sets, pair_sets)
    for t in traces:
        engine.feed(t)
    return engine.model(len(traces))


# -- text format -----------------------------------------------------------

def _fmt_const(inv: InvariantInstance) -> list[str]:
    return [] if inv.learned_const is None else [str(inv.learned_const)]


def _body_lines(obj) -> list[str]:
    out = [
        "schemata " + " ".join(s.value for s in sorted(obj.schemata, key=lambda s: s.order)),
        f"vsets {'on' if obj.value_sets else 'off'}",
        f"psets {'on' if obj.pair_sets else 'off'}",
    ]
    for p in sorted(obj.points.values(), key=lambda p: p.sort_key):
        out.append(" ".join(["ppt", p.label, *p.var_names]))
    for label in sorted(obj.observed, key=label_key):
        out.append(f"observed {label}")
    for inv in sorted(obj.live, key=lambda i: i.sort_key):
        out.append(" ".join(["inv", inv.ppt, inv.kind.value, *inv.slots, *_fmt_const(inv)]))
    vorder = _var_order(obj.points)
    for (label, var) in sorted(obj.vsets, key=lambda k: (label_key(k[0]), vorder[k])):
        out.append(" ".join(["vset", label, var, *map(str, sorted(obj.vsets[(label, var)]))]))
    for key in sorted(obj.psets, key=lambda k: (label_key(k[0]), k[1], k[2])):
        pairs = " ".join(f"({v},{w})" for v, w in sorted(obj.psets[key]))
        out.append(f"pset {key[0]} {key[1]} {key[2]}" + (f" {pairs}" if pairs else ""))
    return out


def _var_order(points: Mapping[str, ProgramPoint]) -> dict[VarKey, int]:
    return {(label, v): i for label, p in points.items() for i, v in enumerate(p.var_names)}


def dump_spectrum(spectrum: Spectrum) -> str:
    return "\n".join([f"spectrum {spectrum.run_id}", *_body_lines(spectrum)]) + "\n"


def dump_model(model: Model) -> str:
    return "\n".join([f"model {model.runs_absorbed}", *_body_lines(model)]) + "\n"


_PAIR = re.compile(r"\((-?\d+),(-?\d+)\)\Z")


def _parse_body(lines: list[tuple[int, list[str]]]) -> dict:
    state: dict = {
        "schemata": None, "value_sets": True, "pair_sets": True,
        "points": {}, "observed": set(), "live": set(), "vsets": {}, "psets": {},
    }
    for lineno, toks in lines:
        head, args = toks[0], toks[1:]
        try:
            if head == "schemata":
                state["schemata"] = frozenset(Schema(a) for a in args)
            elif head in ("vsets", "psets"):
                if args not in (["on"], ["off"]):
                    raise ValueError(f"expected '{head} on' or '{head} off'")
                state["value_sets" if head == "vsets" else "pair_sets"] = args[0] == "on"
            elif head == "ppt":
                p = ProgramPoint.from_names(args[0], args[1:])
                if p.label in state["points"]:
                    raise ValueError(f"duplicate program point {p.label}")
                state["points"][p.label] = p
            elif head == "observed":
                (label,) = args
                if label not in state["points"]:
                    raise ValueError(f"undeclared program point {label}")
                state["observed"].add(label)
            elif head == "inv":
                label, kind = args[0], Schema(args[1])
                slots = tuple(args[2 : 2 + kind.arity])
                rest = args[2 + kind.arity :]
                if label not in state["points"]:
                    raise ValueError(f"undeclared program point {label}")
                for v in slots:
                    state["points"][label].index(v)
                const = None
                if kind.binds_constant:
                    (c,) = rest
                    const = int(c)
                elif rest:
                    raise ValueError(f"{kind.value} takes no constant")
                state["live"].add(InvariantInstance(label, kind, slots, const))
            elif head == "vset":
                label, var = args[0], args[1]
                state["points"][label].index(var)
                state["vsets"][(label, var)] = frozenset(int(v) for v in args[2:])
            elif head == "pset":
                label, a, b = args[0], args[1], args[2]
                state["points"][label].index(a)
                state["points"][label].index(b)
                pairs = set()
                for tok in args[3:]:
                    m = _PAIR.match(tok)
                    if not m:
                        raise ValueError(f"malformed pair {tok!r}")
                    pairs.add((int(m.group(1)), int(m.group(2))))
                state["psets"][(label, a, b)] = frozenset(pairs)
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (ValueError, KeyError, IndexError) as exc:
            msg = exc.args[0] if exc.args else type(exc).__name__
            raise ModelFormatError(str(msg), lineno) from None
    if state["schemata"] is None:
        raise ModelFormatError("missing schemata line")
    return state


def _split(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            out.append((lineno, line.split()))
    return out


def load_spectrum(text: str) -> Spectrum:
    lines = _split(text)
    if not lines or lines[0][1][0] != "spectrum" or len(lines[0][1]) != 2:
        raise ModelFormatError("expected 'spectrum <run_id>' header", lines[0][0] if lines else None)
    st = _parse_body(lines[1:])
    return Spectrum(
        lines[0][1][1], st["points"], frozenset(st["observed"]), frozenset(st["live"]),
        st["vsets"], st["psets"], st["schemata"], st["value_sets"], st["pair_sets"],
    )


def load_model(text: str) -> Model:
    lines = _split(text)
    if not lines or lines[0][1][0] != "model" or len(lines[0][1]) != 2:
        raise ModelFormatError("expected 'model <runs>' header", lines[0][0] if lines else None)
    try:
        runs = int(lines[0][1][1])
    except ValueError:
        raise ModelFormatError("run count must be an integer", lines[0][0]) from None
    st = _parse_body(lines[1:])
    return Model(
        st["points"], frozenset(st["observed"]), frozenset(st["live"]),
        st["vsets"], st["psets"], runs, st["schemata"], st["value_sets"], st["pair_sets"],
    )
