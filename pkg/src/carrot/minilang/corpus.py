"""Input cases and good/bad partitioning of traced runs.

Case files hold one case per line::

    # args -> expected
    1 2 3 -> 0
    2 3 2 -> 1
    25 -> halt
    7

``halt`` means the correct program is expected to stop via ``halt``; a case
without ``->`` has no expected value.  An optional ``entry NAME`` line before
the first case selects the function to call (default: the first one defined).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Sequence

from ..trace import INT64_MAX, INT64_MIN, Trace
from .interpreter import HaltError, MinilangRuntimeError, run_traced
from .parser import MinilangError, Program

HALT = "halt"


class CaseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class InputCase:
    entry: str | None
    args: tuple[int, ...]
    # an int, HALT, or None when unknown
    expected: int | str | None = None
    line: int | None = None


class LabelRule(enum.Enum):
    ORACLE = "oracle"  # good iff the outcome matches ``expected``
    HALT = "halt"  # good iff the run completes without halting


@dataclass(frozen=True)
class RunOutcome:
    index: int
    case: InputCase
    result: int | None
    halted: bool
    good: bool
    trace: Trace


_INT = re.compile(r"-?[0-9]+\Z")


def _int(tok: str, lineno: int) -> int:
    if not _INT.match(tok):
        raise CaseError(f"expected an integer, found {tok!r}", lineno)
    v = int(tok)
    if not INT64_MIN <= v <= INT64_MAX:
        raise CaseError(f"{tok} is out of int64 range", lineno)
    return v


def parse_cases(text: str, program: Program | None = None, entry: str | None = None) -> list[InputCase]:
    """Parse a case file; with ``program`` given, check arity against the entry function.

    An explicit ``entry`` argument overrides the file's ``entry`` line.
    """
    fn = None
    cases = []
    seen_entry = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        is_entry = parts[0] == "entry"
        if is_entry:
            if cases or seen_entry or len(parts) != 2:
                raise CaseError("'entry NAME' must appear once, before the first case", lineno)
            seen_entry = True
            entry = entry or parts[1]
        if program is not None and fn is None:
            try:
                fn = program.function(entry) if entry else program.entry
            except MinilangError as exc:
                raise CaseError(str(exc), lineno) from None
        if is_entry:
            continue
        lhs, arrow, rhs = line.partition("->")
        args = tuple(_int(t, lineno) for t in lhs.split())
        expected: int | str | None = None
        if arrow:
            rhs = rhs.strip()
            if not rhs:
                raise CaseError("missing expected value after '->'", lineno)
            expected = HALT if rhs == HALT else _int(rhs, lineno)
        if fn is not None and len(args) != len(fn.params):
            raise CaseError(
                f"{fn.name} takes {len(fn.params)} argument(s), case has {len(args)}", lineno
            )
        cases.append(InputCase(entry, args, expected, lineno))
    return cases


def execute_cases(
    program: Program,
    cases: Sequence[InputCase],
    label: LabelRule | str = LabelRule.ORACLE,
    step_budget: int | None = None,
    run_prefix: str = "run_",
) -> list[RunOutcome]:
    label = LabelRule(label)
    outcomes = []
    for index, case in enumerate(cases):
        if label is LabelRule.ORACLE and case.expected is None:
            where = f" (line {case.line})" if case.line else ""
            raise CaseError(f"case {index}{where} has no expected value under oracle labeling")
        run_id = f"{run_prefix}{index}"
        try:
            result, trace = run_traced(program, case, run_id, step_budget)
            halted = False
        except HaltError as exc:
            result, trace, halted = None, exc.trace, True
        except MinilangRuntimeError as exc:
            where = f" (line {case.line})" if case.line else ""
            err = MinilangRuntimeError(f"case {index}{where}: {exc}")
            err.trace = exc.trace
            raise err from exc
        if label is LabelRule.ORACLE:
            good = (case.expected == HALT) if halted else (result == case.expected)
        else:
            good = not halted
        outcomes.append(RunOutcome(index, case, result, halted, good, trace))
    return outcomes


def run_corpus(
    program: Program,
    cases: Sequence[InputCase],
    label: LabelRule | str = LabelRule.ORACLE,
    step_budget: int | None = None,
) -> tuple[list[Trace], list[Trace]]:
    """Split traced runs into (good, bad)."""
    outcomes = execute_cases(program, cases, label, step_budget)
    return [o.trace for o in outcomes if o.good], [o.trace for o in outcomes if not o.good]
