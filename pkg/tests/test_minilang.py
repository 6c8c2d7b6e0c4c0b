import pytest

from carrot import fixtures
from carrot.minilang import (
    HALT,
    CaseError,
    HaltError,
    InputCase,
    MinilangError,
    MinilangRuntimeError,
    StepBudgetExceeded,
    evaluate,
    execute_cases,
    parse_cases,
    parse_program,
    run_corpus,
    run_traced,
    wrap64,
)

INT64_MAX = 2**63 - 1


def call(src, *args, entry=None):
    return evaluate(parse_program(src), InputCase(entry, args))


def test_isosceles_parses(isiso_program):
    assert [f.name for f in isiso_program.functions] == ["isIsosceles"]
    assert isiso_program.entry.params == ("x", "y", "z")


@pytest.mark.parametrize(
    "args, result",
    [((1, 2, 3), 0), ((2, 5, 5), 1), ((2, 2, 3), 1), ((2, 3, 2), 0)],
)
def test_isosceles_results(isiso_program, args, result):
    assert evaluate(isiso_program, InputCase(None, args)) == result


def test_traced_run_records_enter_and_exit(isiso_program):
    result, trace = run_traced(isiso_program, InputCase(None, (2, 2, 3)), "r")
    assert result == 1
    assert [(s.ppt.label, s.values) for s in trace.samples] == [
        ("isIsosceles:::ENTER", (2, 2, 3)),
        ("isIsosceles:::EXIT", (2, 2, 3, 1)),
    ]
    assert trace.points["isIsosceles:::EXIT"].var_names == ("x", "y", "z", "return")


def test_partial_id(partial_program):
    assert evaluate(partial_program, InputCase(None, (20,))) == 20
    assert evaluate(partial_program, InputCase(None, (25,))) == 30
    assert evaluate(partial_program, InputCase("scan", (10, 7))) == 10007


def test_nested_calls_trace_in_order(partial_program):
    _, trace = run_traced(partial_program, InputCase("scan", (20, 3)))
    assert [s.ppt.label for s in trace.samples] == [
        "scan:::ENTER", "partial_id:::ENTER", "partial_id:::EXIT", "scan:::EXIT",
    ]
    assert trace.samples[-1].values == (20, 3, 20003)


def test_every_function_declares_points_even_if_unreached(partial_program):
    _, trace = run_traced(partial_program, InputCase("partial_id", (10,)))
    assert set(trace.points) == {
        "partial_id:::ENTER", "partial_id:::EXIT", "scan:::ENTER", "scan:::EXIT",
    }


@pytest.mark.parametrize(
    "src, args, result",
    [
        ("fn f(a, b) { return a - b * 2; }", (10, 3), 4),
        ("fn f(a) { return -a; }", (5,), -5),
        ("fn f(a) { return (a + 1) * 2; }", (2,), 6),
        ("fn f(a, b) { return a < b; }", (1, 2), 1),
        ("fn f(a, b) { return a >= b; }", (1, 2), 0),
        ("fn f(a, b) { return a != b; }", (1, 2), 1),
        ("fn f(a) { let t = a; t = t + 1; return t; }", (1,), 2),
        ("fn f(a) { if (a) { return 1; } }", (0,), 0),
        ("fn f(a) { a = 9; }", (1,), 0),
        ("fn f(a) { return a + 1; }", (INT64_MAX,), -(2**63)),
        ("fn f(a) { return a * 2; }", (2**62,), -(2**63)),
        ("fn f() { return g(3); } fn g(n) { if (n < 1) { return 0; } return n + g(n - 1); }", (), 6),
        ("// comment\nfn f() { # another\n return 7; }", (), 7),
    ],
)
def test_evaluation(src, args, result):
    assert call(src, *args) == result


def test_wrap64():
    assert wrap64(INT64_MAX + 1) == -(2**63)
    assert wrap64(-(2**63) - 1) == INT64_MAX
    assert wrap64(5) == 5


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("", "no functions defined"),
        ("fn f() { return g(1); }", "undefined function g"),
        ("fn f() { return x; }", "unassigned variable x"),
        ("fn f(a) { if (a) { let t = 1; } return t; }", "unassigned variable t"),
        ("fn f() { y = 1; }", "undeclared variable y"),
        ("fn f(a) { return f(); }", "argument"),
        ("fn f() { } fn f() { }", "duplicate function f"),
        ("fn f(a, a) { }", "duplicate parameter"),
        ("fn f() { return 1 }", "expected ';'"),
        ("fn f() { return @; }", "unexpected character"),
        ("fn f() { return 99999999999999999999; }", "int64"),
    ],
)
def test_static_errors(src, fragment):
    with pytest.raises(MinilangError, match=fragment):
        parse_program(src)


def test_static_error_location():
    with pytest.raises(MinilangError) as info:
        parse_program("fn f() {\n  return g(1);\n}")
    assert (info.value.line, info.value.column) == (2, 10)


def test_assignment_in_both_branches_counts():
    assert call("fn f(a) { let t = 0; if (a) { t = 1; } else { t = 2; } return t; }", 0) == 2
    assert call("fn f(a) { if (a) { let t = 1; return t; } else { let t = 2; return t; } }", 1) == 1


def test_halt_keeps_partial_trace():
    prog = parse_program("fn f(a) { if (a < 0) { halt; } return a; }")
    with pytest.raises(HaltError) as info:
        run_traced(prog, InputCase(None, (-1,)))
    assert [s.ppt.label for s in info.value.trace.samples] == ["f:::ENTER"]


RECURSE = "fn f(n) { if (n < 1) { return 0; } return 1 + f(n - 1); }"


def test_step_budget():
    prog = parse_program(RECURSE)
    assert evaluate(prog, InputCase(None, (50,)), step_budget=1000) == 50
    with pytest.raises(StepBudgetExceeded):
        evaluate(prog, InputCase(None, (50,)), step_budget=20)


def test_step_budget_from_environment(monkeypatch):
    prog = parse_program(RECURSE)
    monkeypatch.setenv("CARROT_STEP_BUDGET", "20")
    with pytest.raises(StepBudgetExceeded, match="20"):
        evaluate(prog, InputCase(None, (50,)))
    monkeypatch.setenv("CARROT_STEP_BUDGET", "nope")
    with pytest.raises(ValueError, match="CARROT_STEP_BUDGET"):
        evaluate(prog, InputCase(None, (50,)))


def test_deep_recursion_is_a_runtime_error():
    prog = parse_program(RECURSE)
    with pytest.raises(MinilangRuntimeError, match="call depth|step budget"):
        evaluate(prog, InputCase(None, (10**6,)), step_budget=10**8)


# -- case files ------------------------------------------------------------

def test_parse_cases(isiso_program):
    cases = parse_cases(fixtures.read("isisosceles.cases"), isiso_program)
    assert [c.args for c in cases] == [(1, 2, 3), (2, 5, 5), (2, 2, 3), (2, 3, 2)]
    assert [c.expected for c in cases] == [0, 1, 1, 1]
    assert cases[0].line == 2


def test_parse_cases_entry_and_halt(partial_program):
    cases = parse_cases(fixtures.read("partial_id.cases"), partial_program)
    assert {c.entry for c in cases} == {"partial_id"}
    assert [c.expected for c in cases][-2:] == [HALT, HALT]


def test_case_without_expectation():
    (case,) = parse_cases("1 2\n")
    assert case.expected is None


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("1 2 -> 0\n", "line 1: isIsosceles takes 3"),
        ("1 2 3 -> 0\n4 5 -> 1\n", "line 2"),
        ("1 x 3 -> 0\n", "expected an integer"),
        ("1 2 3 ->\n", "missing expected value"),
        ("entry nothere\n", "undefined function"),
        ("1 2 3 -> 0\nentry isIsosceles\n", "'entry NAME'"),
        ("entry isIsosceles\nentry isIsosceles\n", "line 2: 'entry NAME'"),
    ],
)
def test_case_errors(isiso_program, text, fragment):
    with pytest.raises(CaseError, match=fragment):
        parse_cases(text, isiso_program)


def test_isosceles_corpus_split(isiso_corpus):
    good, bad = isiso_corpus
    assert len(good) == 3 and len(bad) == 1
    assert bad[0].samples[0].values == (2, 3, 2)


def test_partial_id_corpus_split(partial_program):
    good, bad = run_corpus(partial_program, parse_cases(fixtures.read("partial_id.cases"), partial_program))
    assert [t.samples[0].values for t in good] == [(10,), (20,), (30,)]
    assert [t.samples[0].values for t in bad] == [(5,), (25,)]


def test_scan_corpus_split(partial_program):
    good, bad = run_corpus(partial_program, parse_cases(fixtures.read("scan.cases"), partial_program))
    assert (len(good), len(bad)) == (24, 6)


def test_halt_labeling_rule():
    prog = parse_program("fn f(a) { if (a < 0) { halt; } return a; }")
    cases = parse_cases("1\n-1\n2 -> 99\n")
    outcomes = execute_cases(prog, cases, "halt")
    assert [o.good for o in outcomes] == [True, False, True]
    assert outcomes[1].halted and outcomes[1].result is None
    with pytest.raises(CaseError, match="no expected value"):
        execute_cases(prog, cases, "oracle")


def test_expected_halt_is_good_only_when_halting():
    prog = parse_program("fn f(a) { if (a < 0) { halt; } return a; }")
    outcomes = execute_cases(prog, parse_cases("-1 -> halt\n1 -> halt\n"))
    assert [o.good for o in outcomes] == [True, False]


def test_runtime_error_names_the_case():
    prog = parse_program(RECURSE)
    with pytest.raises(MinilangRuntimeError, match=r"case 1 \(line 2\)"):
        execute_cases(prog, parse_cases("1 -> 1\n100 -> 100\n"), step_budget=50)


def test_execution_is_deterministic(partial_program):
    cases = parse_cases(fixtures.read("scan.cases"), partial_program)
    assert run_corpus(partial_program, cases) == run_corpus(partial_program, cases)


def test_traced_and_untraced_agree(partial_program):
    for case in parse_cases(fixtures.read("scan.cases"), partial_program):
        if case.expected == HALT:
            continue
        result, trace = run_traced(partial_program, case)
        assert result == evaluate(partial_program, case) == case.expected
        enters = sum(s.ppt.kind.value == "ENTER" for s in trace.samples)
        exits = sum(s.ppt.kind.value == "EXIT" for s in trace.samples)
        assert enters == exits == 2
