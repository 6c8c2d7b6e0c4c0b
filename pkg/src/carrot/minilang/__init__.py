"""A small traced language standing in for an instrumented C program."""

from .corpus import (
    HALT,
    CaseError,
    InputCase,
    LabelRule,
    RunOutcome,
    execute_cases,
    parse_cases,
    run_corpus,
)
from .interpreter import (
    DEFAULT_STEP_BUDGET,
    HaltError,
    Interpreter,
    MinilangRuntimeError,
    StepBudgetExceeded,
    evaluate,
    program_points,
    run_traced,
    wrap64,
)
from .parser import FunctionDef, MinilangError, Program, parse_program

__all__ = [
    "HALT",
    "CaseError",
    "DEFAULT_STEP_BUDGET",
    "FunctionDef",
    "HaltError",
    "InputCase",
    "Interpreter",
    "LabelRule",
    "MinilangError",
    "MinilangRuntimeError",
    "Program",
    "RunOutcome",
    "StepBudgetExceeded",
    "evaluate",
    "execute_cases",
    "parse_cases",
    "parse_program",
    "program_points",
    "run_corpus",
    "run_traced",
    "wrap64",
]
