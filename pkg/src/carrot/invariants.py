"""Relational schemata, their instances, and value/pair-value set tracking."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable

from .trace import ProgramPoint, Sample, label_key


class Schema(enum.Enum):
    Equality = "Equality"
    Sum = "Sum"
    LessThan = "LessThan"
    ConstantEquality = "ConstantEquality"

    @property
    def order(self) -> int:
        return _SCHEMA_ORDER[self]

    @property
    def arity(self) -> int:
        return 1 if self is Schema.ConstantEquality else 2

    @property
    def binds_constant(self) -> bool:
        return self in (Schema.Sum, Schema.ConstantEquality)


_SCHEMA_ORDER = {s: i for i, s in enumerate(Schema)}
ALL_SCHEMATA = frozenset(Schema)

SCHEMA_ALIASES = {
    "eq": Schema.Equality,
    "sum": Schema.Sum,
    "lessthan": Schema.LessThan,
    "const": Schema.ConstantEquality,
}


def parse_schemata(spec: str | Iterable[str | Schema] | None) -> frozenset[Schema]:
    """Resolve ``"eq,sum"``, ``["lessthan"]``, ``"all"`` or Schema members to a schema set."""
    if spec is None:
        return ALL_SCHEMATA
    if isinstance(spec, str):
        if spec.strip().lower() == "all":
            return ALL_SCHEMATA
        spec = [s for s in spec.split(",") if s.strip()]
    out = set()
    for item in spec:
        if isinstance(item, Schema):
            out.add(item)
            continue
        key = item.strip()
        if key.lower() in SCHEMA_ALIASES:
            out.add(SCHEMA_ALIASES[key.lower()])
        elif key in Schema.__members__:
            out.add(Schema[key])
        else:
            raise ValueError(
                f"unknown schema {item!r}; choose from {', '.join(SCHEMA_ALIASES)}"
            )
    return frozenset(out)


class Status(enum.Enum):
    Unbound = "Unbound"
    Live = "Live"
    Falsified = "Falsified"


class EngineError(RuntimeError):
    """An invariant was updated with a sample from an incompatible point."""


@dataclass(frozen=True)
class InvariantInstance:
    """A schema applied to concrete variables at one program point.

    Identity is ``(ppt, kind, slots, learned_const)``; ``status`` is bookkeeping
    and does not take part in equality or hashing.
    """

    ppt: str
    kind: Schema
    slots: tuple[str, ...]
    learned_const: int | None = None
    status: Status = field(default=Status.Live, compare=False)

    def __post_init__(self):
        if len(self.slots) != self.kind.arity:
            raise ValueError(f"{self.kind.value} takes {self.kind.arity} slot(s), got {self.slots}")
        if self.kind.arity == 2 and self.slots[0] == self.slots[1]:
            raise ValueError(f"{self.kind.value} needs two distinct variables")
        if self.kind in (Schema.Equality, Schema.Sum) and self.slots[0] > self.slots[1]:
            # symmetric schemata are stored with ascending slots
            object.__setattr__(self, "slots", (self.slots[1], self.slots[0]))

    @property
    def sort_key(self):
        return (
            label_key(self.ppt),
            self.kind.order,
            self.slots,
            -1 if self.learned_const is None else 0,
            self.learned_const or 0,
        )

    def predicate(self) -> str:
        """Human-readable form, e.g. ``x < z`` or ``x + y == 4``."""
        a = self.slots[0]
        c = "?" if self.learned_const is None else str(self.learned_const)
        if self.kind is Schema.Equality:
            return f"{a} == {self.slots[1]}"
        if self.kind is Schema.LessThan:
            return f"{a} < {self.slots[1]}"
        if self.kind is Schema.Sum:
            return f"{a} + {self.slots[1]} == {c}"
        return f"{a} == {c}"

    def __str__(self):
        return f"{self.ppt}: {self.predicate()}"


def instantiate_all(
    ppt: ProgramPoint, enabled: Iterable[Schema] = ALL_SCHEMATA
) -> set[InvariantInstance]:
    """Every candidate the enabled schemata yield at ``ppt``.

    For n variables: LessThan gives n(n-1) ordered pairs, Equality and Sum
    n(n-1)/2 unordered pairs each, ConstantEquality one per variable.
    """
    enabled = frozenset(enabled)
    names = sorted(ppt.var_names)
    label = ppt.label
    out: set[InvariantInstance] = set()
    if Schema.LessThan in enabled:
        for a, b in itertools.permutations(names, 2):
            out.add(InvariantInstance(label, Schema.LessThan, (a, b)))
    for kind, status in ((Schema.Equality, Status.Live), (Schema.Sum, Status.Unbound)):
        if kind in enabled:
            for a, b in itertools.combinations(names, 2):
                out.add(InvariantInstance(label, kind, (a, b), None, status))
    if Schema.ConstantEquality in enabled:
        for a in names:
            out.add(InvariantInstance(label, Schema.ConstantEquality, (a,), None, Status.Unbound))
    return out


def candidate_count(n_vars: int, enabled: Iterable[Schema] = ALL_SCHEMATA) -> int:
    enabled = frozenset(enabled)
    pairs = n_vars * (n_vars - 1) // 2
    return (
        (2 * pairs if Schema.LessThan in enabled else 0)
        + (pairs if Schema.Equality in enabled else 0)
        + (pairs if Schema.Sum in enabled else 0)
        + (n_vars if Schema.ConstantEquality in enabled else 0)
    )


def _lookup(inv: InvariantInstance, sample: Sample) -> tuple[int, ...]:
    if sample.ppt.label != inv.ppt:
        raise EngineError(f"sample at {sample.ppt.label} cannot update invariant at {inv.ppt}")
    try:
        return tuple(sample.value(v) for v in inv.slots)
    except KeyError as exc:
        raise EngineError(str(exc.args[0])) from None


def update_invariant(inv: InvariantInstance, sample: Sample) -> InvariantInstance:
    """Check one sample against ``inv``; falsification is permanent."""
    if inv.status is Status.Falsified:
        return inv
    vals = _lookup(inv, sample)
    kind = inv.kind
    if kind is Schema.Equality:
        holds = vals[0] == vals[1]
    elif kind is Schema.LessThan:
        holds = vals[0] < vals[1]
    else:
        observed = vals[0] + vals[1] if kind is Schema.Sum else vals[0]
        if inv.status is Status.Unbound:
            return replace(inv, learned_const=observed, status=Status.Live)
        holds = observed == inv.learned_const
    if holds:
        return inv if inv.status is Status.Live else replace(inv, status=Status.Live)
    return replace(inv, status=Status.Falsified)


def canonical_pairs(names: Iterable[str]) -> list[tuple[str, str]]:
    return list(itertools.combinations(sorted(names), 2))


@dataclass
class PointSets:
    """Value sets and pair-value sets accumulated at one program point."""

    ppt: str
    values: dict[str, set[int]] = field(default_factory=dict)
    pairs: dict[tuple[str, str], set[tuple[int, int]]] = field(default_factory=dict)

    @classmethod
    def empty(cls, ppt: ProgramPoint, value_sets: bool = True, pair_sets: bool = True) -> "PointSets":
        return cls(
            ppt.label,
            {v: set() for v in ppt.var_names} if value_sets else {},
            {p: set() for p in canonical_pairs(ppt.var_names)} if pair_sets else {},
        )


def update_value_sets(state: PointSets, sample: Sample) -> PointSets:
    """Insert the sample's values (and canonical value pairs) into ``state`` in place."""
    if sample.ppt.label != state.ppt:
        raise EngineError(f"sample at {sample.ppt.label} cannot update sets at {state.ppt}")
    row = sample.as_dict()
    for var, vs in state.values.items():
        vs.add(row[var])
    for (a, b), ps in state.pairs.items():
        ps.add((row[a], row[b]))
    return state
