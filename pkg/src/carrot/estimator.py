"""scikit-learn style front end over the spectrum/model/diff pipeline.

>>> loc = InvariantLocalizer(schemata="lessthan").fit(good_traces)
>>> reports = loc.transform([bad_trace])
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .convergence import DEFAULT_WINDOW, convergence_curve, steady_state
from .diff import DiffReport, diff
from .invariants import Schema, parse_schemata
from .spectra import Model, Spectrum, absorb, build_model, compute_spectrum
from .trace import Trace, parse_trace, read_trace_file


def check_trace(x) -> Trace:
    """Coerce a Trace, trace text, or path to a trace file into a Trace."""
    if isinstance(x, Trace):
        return x
    if isinstance(x, bytes):
        return parse_trace(x)
    if isinstance(x, os.PathLike):
        return read_trace_file(x)
    if isinstance(x, str):
        if "\n" not in x and os.path.exists(x):
            return read_trace_file(x)
        return parse_trace(x)
    raise TypeError(f"expected a Trace, trace text or a path, got {type(x).__name__}")


def check_traces(X, allow_empty: bool = False) -> list[Trace]:
    if isinstance(X, (Trace, str, bytes, os.PathLike)):
        raise TypeError("expected a sequence of traces, got a single trace; wrap it in a list")
    traces = [check_trace(x) for x in X]
    if not traces and not allow_empty:
        raise ValueError("at least one trace is required")
    return traces


def check_good_mask(y, n: int) -> np.ndarray:
    """Interpret ``y`` as good/bad labels: truthy or ``"good"`` means good."""
    if y is None:
        return np.ones(n, dtype=bool)
    labels = list(y)
    if len(labels) != n:
        raise ValueError(f"got {n} traces but {len(labels)} labels")
    return np.array(
        [lab == "good" if isinstance(lab, str) else bool(lab) for lab in labels], dtype=bool
    )


def check_config(schemata, value_sets: bool, pair_sets: bool, window: int) -> frozenset[Schema]:
    enabled = parse_schemata(schemata)
    if not enabled and not value_sets:
        raise ValueError("enable at least one schema or value sets")
    if int(window) < 1:
        raise ValueError("window must be >= 1")
    return enabled


class SpectrumTransformer(TransformerMixin, BaseEstimator):
    """Stateless transformer: traces in, spectra out."""

    def __init__(self, schemata="all", value_sets=True, pair_sets=True, points=None):
        self.schemata = schemata
        self.value_sets = value_sets
        self.pair_sets = pair_sets
        self.points = points

    def fit(self, X=None, y=None):
        self.schemata_ = check_config(self.schemata, self.value_sets, self.pair_sets, 1)
        return self

    def transform(self, X) -> list[Spectrum]:
        enabled = check_config(self.schemata, self.value_sets, self.pair_sets, 1)
        return [
            compute_spectrum(t.restrict(self.points), enabled, self.value_sets, self.pair_sets)
            for t in check_traces(X, allow_empty=True)
        ]


class InvariantLocalizer(BaseEstimator):
    """Learn a model from good runs; report what failing runs violate.

    Parameters
    ----------
    schemata : str or iterable
        ``"all"`` or any of ``eq, sum, lessthan, const`` (comma-separated or a list).
    value_sets, pair_sets : bool
        Track per-variable value sets and per-pair value sets.
    window : int
        Zero-falsification window used to locate the steady state.
    points : str or list of str, optional
        Restrict analysis to matching program points (``"ENTER"``, a
        function name, or a label glob).

    Attributes
    ----------
    model_ : Model
    curve_ : ConvergenceCurve
        How the model evolved over the fitted runs, in order.
    steady_state_ : int or None
    """

    def __init__(self, schemata="all", value_sets=True, pair_sets=True, window=DEFAULT_WINDOW,
                 points=None):
        self.schemata = schemata
        self.value_sets = value_sets
        self.pair_sets = pair_sets
        self.window = window
        self.points = points

    def _spectra(self, traces: Iterable[Trace]) -> list[Spectrum]:
        return [
            compute_spectrum(t.restrict(self.points), self.schemata_, self.value_sets, self.pair_sets)
            for t in traces
        ]

    def fit(self, X, y=None):
        """Fit on good runs. If ``y`` is given, only runs labelled good are used."""
        self.schemata_ = check_config(self.schemata, self.value_sets, self.pair_sets, self.window)
        traces = check_traces(X)
        mask = check_good_mask(y, len(traces))
        good = [t for t, g in zip(traces, mask) if g]
        if not good:
            raise ValueError("no good runs to fit")
        spectra = self._spectra(good)
        self.model_ = build_model(spectra)
        self.curve_ = convergence_curve(spectra)
        self.steady_state_ = steady_state(self.curve_, self.window)
        return self

    def partial_fit(self, X, y=None):
        """Absorb further good runs into an existing model."""
        if not hasattr(self, "model_"):
            return self.fit(X, y)
        traces = check_traces(X)
        mask = check_good_mask(y, len(traces))
        model = self.model_
        for s in self._spectra(t for t, g in zip(traces, mask) if g):
            model = absorb(model, s)
        self.model_ = model
        return self

    def transform(self, X) -> list[DiffReport]:
        check_is_fitted(self, "model_")
        return [diff(self.model_, s) for s in self._spectra(check_traces(X, allow_empty=True))]

    def fit_transform(self, X, y=None, X_bad=None):
        self.fit(X, y)
        return self.transform(X if X_bad is None else X_bad)

    def predict(self, X) -> np.ndarray:
        """1 for runs that falsify at least one model invariant, else 0."""
        return np.array([int(bool(r.invalidated)) for r in self.transform(X)], dtype=int)

    @property
    def live_(self):
        check_is_fitted(self, "model_")
        return self.model_.live

    def load_model(self, model: Model) -> "InvariantLocalizer":
        """Adopt a previously built model (e.g. read from disk)."""
        self.schemata = sorted(s.value for s in model.schemata)
        self.value_sets = model.value_sets
        self.pair_sets = model.pair_sets
        self.schemata_ = model.schemata
        self.model_ = model
        return self
