"""How the model settles as good runs accumulate."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .invariants import candidate_count
from .spectra import Model, Spectrum, absorb

DEFAULT_WINDOW = 10


@dataclass(frozen=True)
class CurveRecord:
    run: int
    live: int
    falsified: int
    vset_ins: int
    pset_ins: int


@dataclass(frozen=True)
class ConvergenceCurve:
    records: tuple[CurveRecord, ...]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def live(self) -> list[int]:
        return [r.live for r in self.records]

    @property
    def falsified(self) -> list[int]:
        return [r.falsified for r in self.records]

    @property
    def vset_ins(self) -> list[int]:
        return [r.vset_ins for r in self.records]

    @property
    def pset_ins(self) -> list[int]:
        return [r.pset_ins for r in self.records]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["run", "live", "falsified", "vset_ins", "pset_ins"])
        for r in self.records:
            w.writerow([r.run, r.live, r.falsified, r.vset_ins, r.pset_ins])
        return buf.getvalue()

    @classmethod
    def from_falsifications(cls, counts: Sequence[int]) -> "ConvergenceCurve":
        """A curve carrying only falsification counts; handy for ``steady_state``."""
        return cls(tuple(CurveRecord(i, 0, c, 0, 0) for i, c in enumerate(counts, start=1)))


def _candidates(model: Model, labels) -> int:
    return sum(candidate_count(len(model.points[l].decls), model.schemata) for l in labels)


def convergence_curve(spectra: Sequence[Spectrum]) -> ConvergenceCurve:
    """Record k describes the model built from the first k spectra.

    ``falsified`` counts candidates lost during run k: model invariants the
    run contradicted, plus candidates at points first reached in run k that
    did not survive it.
    """
    spectra = list(spectra)
    if not spectra:
        raise ValueError("convergence_curve needs at least one spectrum")
    records = []
    model: Model | None = None
    for k, s in enumerate(spectra, start=1):
        if model is None:
            new_model = Model.from_spectrum(s)
            lost = _candidates(new_model, s.observed) - len(new_model.live)
            vins, pins = new_model.value_count(), new_model.pair_count()
        else:
            new_model = absorb(model, s)
            fresh = s.observed - model.observed
            fresh_live = sum(1 for i in new_model.live if i.ppt in fresh)
            lost = len(model.live - new_model.live) + _candidates(new_model, fresh) - fresh_live
            vins = new_model.value_count() - model.value_count()
            pins = new_model.pair_count() - model.pair_count()
        records.append(CurveRecord(k, len(new_model.live), lost, vins, pins))
        model = new_model
    return ConvergenceCurve(tuple(records))


def steady_state(curve: ConvergenceCurve, window: int = DEFAULT_WINDOW) -> int | None:
    """Smallest run index i >= 1 after which ``window`` runs falsify nothing.

    Value-set insertions are ignored: value sets keep growing long after the
    relational invariants have settled.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    counts = curve.falsified
    for i in range(1, len(counts) - window + 1):
        if not any(counts[i : i + window]):
            return i
    return None
