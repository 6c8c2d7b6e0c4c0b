"""Tree-walking evaluator that records ENTER/EXIT samples for every call."""

from __future__ import annotations

import os
from typing import Sequence

from ..trace import RETURN_VAR, PointKind, ProgramPoint, Sample, Trace, VarDecl
from .parser import (
    Assign,
    BinOp,
    Call,
    ExprStmt,
    FunctionDef,
    Halt,
    If,
    Let,
    MinilangError,
    Neg,
    Num,
    Program,
    Return,
    Var,
)

DEFAULT_STEP_BUDGET = 1_000_000
STEP_BUDGET_ENV = "CARROT_STEP_BUDGET"


def wrap64(v: int) -> int:
    return ((v + 2**63) % 2**64) - 2**63


class MinilangRuntimeError(MinilangError):
    """Execution stopped early; ``trace`` holds the samples recorded so far."""

    trace: Trace | None = None


class HaltError(MinilangRuntimeError):
    pass


class StepBudgetExceeded(MinilangRuntimeError):
    pass


def default_step_budget() -> int:
    raw = os.environ.get(STEP_BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_STEP_BUDGET
    try:
        budget = int(raw)
    except ValueError:
        raise ValueError(f"{STEP_BUDGET_ENV} must be a positive integer, got {raw!r}") from None
    if budget < 1:
        raise ValueError(f"{STEP_BUDGET_ENV} must be a positive integer, got {raw!r}")
    return budget


def program_points(program: Program) -> dict[str, ProgramPoint]:
    """ENTER observes the formals; EXIT observes the formals plus ``return``."""
    points = {}
    for f in program.functions:
        decls = tuple(VarDecl(p) for p in f.params)
        for p in (
            ProgramPoint(f.name, PointKind.ENTER, decls),
            ProgramPoint(f.name, PointKind.EXIT, decls + (VarDecl(RETURN_VAR),)),
        ):
            points[p.label] = p
    return points


class _Return(Exception):
    def __init__(self, value: int):
        self.value = value


class Interpreter:
    def __init__(self, program: Program, step_budget: int | None = None, tracing: bool = True):
        self.program = program
        self.step_budget = default_step_budget() if step_budget is None else step_budget
        self.tracing = tracing
        self.points = program_points(program)
        self.steps = 0
        self.samples: list[Sample] = []

    def _tick(self, node) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise StepBudgetExceeded(
                f"step budget of {self.step_budget} exceeded", getattr(node, "line", None),
                getattr(node, "col", None),
            )

    def _record(self, fn: FunctionDef, kind: PointKind, values: Sequence[int]) -> None:
        if self.tracing:
            point = self.points[f"{fn.name}:::{kind.value}"]
            self.samples.append(Sample(point, tuple(values), len(self.samples)))

    def call(self, fn: FunctionDef, args: Sequence[int]) -> int:
        if len(args) != len(fn.params):
            raise MinilangError(f"{fn.name} takes {len(fn.params)} argument(s), got {len(args)}")
        env = dict(zip(fn.params, (wrap64(a) for a in args)))
        self._record(fn, PointKind.ENTER, [env[p] for p in fn.params])
        try:
            self.exec_block(fn.body, env)
            result = 0  # falling off the end returns 0
        except _Return as r:
            result = r.value
        self._record(fn, PointKind.EXIT, [env[p] for p in fn.params] + [result])
        return result

    def exec_block(self, stmts, env: dict[str, int]) -> None:
        for s in stmts:
            self._tick(s)
            if isinstance(s, (Let, Assign)):
                env[s.name] = self.eval(s.value, env)
            elif isinstance(s, If):
                if self.eval(s.cond, env) != 0:
                    self.exec_block(s.then, env)
                else:
                    self.exec_block(s.orelse, env)
            elif isinstance(s, Return):
                raise _Return(self.eval(s.value, env))
            elif isinstance(s, Halt):
                raise HaltError("halt reached", s.line, s.col)
            elif isinstance(s, ExprStmt):
                self.eval(s.value, env)
            else:  # pragma: no cover
                raise TypeError(f"unknown statement {s!r}")

    def eval(self, e, env: dict[str, int]) -> int:
        self._tick(e)
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Var):
            return env[e.name]
        if isinstance(e, Neg):
            return wrap64(-self.eval(e.operand, env))
        if isinstance(e, BinOp):
            a = self.eval(e.left, env)
            b = self.eval(e.right, env)
            op = e.op
            if op == "+":
                return wrap64(a + b)
            if op == "-":
                return wrap64(a - b)
            if op == "*":
                return wrap64(a * b)
            if op == "==":
                return int(a == b)
            if op == "!=":
                return int(a != b)
            if op == "<":
                return int(a < b)
            if op == "<=":
                return int(a <= b)
            if op == ">":
                return int(a > b)
            if op == ">=":
                return int(a >= b)
            raise TypeError(f"unknown operator {op}")  # pragma: no cover
        if isinstance(e, Call):
            args = [self.eval(a, env) for a in e.args]
            return self.call(self.program.function(e.name), args)
        raise TypeError(f"unknown expression {e!r}")  # pragma: no cover

    def trace(self, run_id: str) -> Trace:
        return Trace(run_id, dict(self.points), tuple(self.samples))


def _run(program, entry, args, run_id, step_budget, tracing):
    fn = program.function(entry) if entry else program.entry
    interp = Interpreter(program, step_budget, tracing)
    try:
        result = interp.call(fn, list(args))
    except MinilangRuntimeError as exc:
        exc.trace = interp.trace(run_id)
        raise
    except RecursionError:
        exc = MinilangRuntimeError("call depth exceeded")
        exc.trace = interp.trace(run_id)
        raise exc from None
    return result, interp.trace(run_id)


def run_traced(
    program: Program,
    case,
    run_id: str = "run",
    step_budget: int | None = None,
) -> tuple[int, Trace]:
    """Evaluate ``case`` and return its result with the recorded trace.

    Raises HaltError or StepBudgetExceeded with the partial trace attached.
    """
    return _run(program, case.entry, case.args, run_id, step_budget, True)


def evaluate(program: Program, case, step_budget: int | None = None) -> int:
    """Evaluate without recording samples."""
    return _run(program, case.entry, case.args, "run", step_budget, False)[0]
