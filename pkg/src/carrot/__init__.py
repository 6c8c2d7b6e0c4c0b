"""Fault localization by contrasting potential-invariant spectra.

Good runs are summarized into a model (intersection of live invariants,
union of value sets); a failing run is reported by the model invariants it
falsifies and the values it adds.
"""

from .convergence import ConvergenceCurve, CurveRecord, convergence_curve, steady_state
from .diff import DiffReport, PairExtension, ValueExtension, diff, render_report
from .estimator import InvariantLocalizer, SpectrumTransformer, check_trace, check_traces
from .invariants import (
    ALL_SCHEMATA,
    InvariantInstance,
    PointSets,
    Schema,
    Status,
    instantiate_all,
    parse_schemata,
    update_invariant,
    update_value_sets,
)
from .spectra import (
    Engine,
    IncompatibleError,
    Model,
    Spectrum,
    absorb,
    build_model,
    compute_spectrum,
    dump_model,
    dump_spectrum,
    load_model,
    load_spectrum,
    stream_model,
)
from .trace import (
    PointKind,
    ProgramPoint,
    Sample,
    Trace,
    TraceError,
    VarDecl,
    parse_trace,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_SCHEMATA",
    "ConvergenceCurve",
    "CurveRecord",
    "DiffReport",
    "Engine",
    "IncompatibleError",
    "InvariantInstance",
    "InvariantLocalizer",
    "Model",
    "PairExtension",
    "PointKind",
    "PointSets",
    "ProgramPoint",
    "Sample",
    "Schema",
    "Spectrum",
    "SpectrumTransformer",
    "Status",
    "Trace",
    "TraceError",
    "ValueExtension",
    "VarDecl",
    "absorb",
    "build_model",
    "check_trace",
    "check_traces",
    "compute_spectrum",
    "convergence_curve",
    "diff",
    "dump_model",
    "dump_spectrum",
    "instantiate_all",
    "load_model",
    "load_spectrum",
    "parse_schemata",
    "parse_trace",
    "render_report",
    "steady_state",
    "stream_model",
    "update_invariant",
    "update_value_sets",
    "write_trace",
]
