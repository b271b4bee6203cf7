"""Reference interpreters for the AST and the GOTO-program.

These are the concrete-execution oracles: they evaluate programs under
fixed-width two's-complement semantics, drawing nondeterministic values from
a feed.  `exhaustive_check` enumerates every nondet choice at small widths
and is the ground truth the verifier's verdicts are tested against.

Division or modulo by a zero divisor raises InterpError; oracle test
programs avoid it (the VC encoding gives such divisions a fresh
nondeterministic result instead).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import goto_ir
from .frontend import (Assert, Assign, Assume, Binary, Cast, Decl, DoWhile,
                       Expr, For, If, IntLit, IntType, Loc, Nondet,
                       SourceProgram, Unary, Var, While)


class InterpError(Exception):
    pass


class FeedExhausted(Exception):
    """Raised when an interpreter needs a nondet value the feed lacks."""

    def __init__(self, width: int):
        super().__init__(f"feed exhausted (next request is {width} bits)")
        self.width = width


def wrap(value: int, ty: IntType) -> int:
    value &= ty.umax
    if ty.signed and value > ty.smax:
        value -= 1 << ty.width
    return value


class ListFeed:
    """Sequential nondet values; records the request widths it served."""

    def __init__(self, values: list[int] | None = None):
        self.values = list(values or [])
        self.pos = 0
        self.widths: list[int] = []

    def take(self, key, ty: IntType) -> int:
        if self.pos >= len(self.values):
            raise FeedExhausted(ty.width)
        value = self.values[self.pos]
        self.pos += 1
        self.widths.append(ty.width)
        return wrap(value, ty)


class KeyedFeed:
    """Nondet values addressed by a stable key, for counterexample replay.

    Keys are ('site', site_id, iteration-tuple) for nondet calls and
    ('init', name) for reads of uninitialised variables.  Missing keys take
    the default (solvers leave unconstrained symbols out of models).
    """

    def __init__(self, values: dict, default: int = 0):
        self.values = dict(values)
        self.default = default

    def take(self, key, ty: IntType) -> int:
        return wrap(self.values.get(key, self.default), ty)


@dataclass
class RunResult:
    status: str                 # 'ok' | 'assert' | 'fuel'
    violation: Loc | None = None
    env: dict = field(default_factory=dict)
    blocked: bool = False       # an assume failed; path is vacuous
    head_states: list = field(default_factory=list)  # (loop_id, visit, env copy)


def _sdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def eval_expr(expr: Expr, env: dict, feed, itervec=()) -> int:
    if isinstance(expr, IntLit):
        return wrap(expr.value, expr.ty)
    if isinstance(expr, Var):
        if expr.name not in env or env[expr.name] is None:
            env[expr.name] = feed.take(("init", expr.name), expr.ty)
        return env[expr.name]
    if isinstance(expr, Nondet):
        return feed.take(("site", expr.site, tuple(itervec)), expr.ty)
    if isinstance(expr, Cast):
        return wrap(eval_expr(expr.operand, env, feed, itervec), expr.ty)
    if isinstance(expr, Unary):
        val = eval_expr(expr.operand, env, feed, itervec)
        if expr.op == "!":
            return 0 if val != 0 else 1
        return wrap(-val, expr.ty)
    if isinstance(expr, Binary):
        op = expr.op
        if op == "&&":
            return 1 if (eval_expr(expr.lhs, env, feed, itervec) != 0
                         and eval_expr(expr.rhs, env, feed, itervec) != 0) else 0
        if op == "||":
            return 1 if (eval_expr(expr.lhs, env, feed, itervec) != 0
                         or eval_expr(expr.rhs, env, feed, itervec) != 0) else 0
        a = eval_expr(expr.lhs, env, feed, itervec)
        b = eval_expr(expr.rhs, env, feed, itervec)
        if op == "+":
            return wrap(a + b, expr.ty)
        if op == "-":
            return wrap(a - b, expr.ty)
        if op == "*":
            return wrap(a * b, expr.ty)
        if op in ("/", "%"):
            if b == 0:
                raise InterpError("division by zero")
            q = _sdiv(a, b)
            return wrap(q if op == "/" else a - b * q, expr.ty)
        if op == "<":
            return 1 if a < b else 0
        if op == "<=":
            return 1 if a <= b else 0
        if op == ">":
            return 1 if a > b else 0
        if op == ">=":
            return 1 if a >= b else 0
        if op == "==":
            return 1 if a == b else 0
        if op == "!=":
            return 1 if a != b else 0
    raise TypeError(f"cannot evaluate {expr!r}")


# ------------------------------------------------------------------
# AST interpreter
# ------------------------------------------------------------------

class _AbortAssert(Exception):
    def __init__(self, loc: Loc):
        self.loc = loc


class _AbortAssume(Exception):
    pass


def run_ast(program: SourceProgram, feed, max_steps: int = 1_000_000) -> RunResult:
    env: dict = {}
    steps = [0]
    head_states: list = []
    loop_visits: dict[int, int] = {}
    next_loop = [0]

    def tick():
        steps[0] += 1
        if steps[0] > max_steps:
            raise InterpError("fuel")

    def exec_body(stmts: list, itervec: tuple):
        for stmt in stmts:
            exec_stmt(stmt, itervec)

    def exec_loop(cond: Expr, body: list, itervec: tuple):
        loop_id = next_loop[0]
        next_loop[0] += 1
        visit = 0
        head_states.append((loop_id, visit, dict(env)))
        while True:
            tick()
            if eval_expr(cond, env, feed, itervec + (visit,)) == 0:
                break
            exec_body(body, itervec + (visit,))
            visit += 1
            head_states.append((loop_id, visit, dict(env)))

    def exec_stmt(stmt, itervec: tuple):
        tick()
        if isinstance(stmt, Decl):
            env[stmt.name] = (eval_expr(stmt.init, env, feed, itervec)
                              if stmt.init is not None else None)
        elif isinstance(stmt, Assign):
            env[stmt.name] = eval_expr(stmt.expr, env, feed, itervec)
        elif isinstance(stmt, If):
            if eval_expr(stmt.cond, env, feed, itervec) != 0:
                exec_body(stmt.then, itervec)
            else:
                exec_body(stmt.els, itervec)
        elif isinstance(stmt, While):
            exec_loop(stmt.cond, stmt.body, itervec)
        elif isinstance(stmt, For):
            if stmt.init is not None:
                exec_stmt(stmt.init, itervec)
            cond = stmt.cond if stmt.cond is not None else IntLit(1, ty=IntType(32, True))
            body = list(stmt.body) + ([stmt.step] if stmt.step is not None else [])
            exec_loop(cond, body, itervec)
        elif isinstance(stmt, DoWhile):
            exec_body(stmt.body, itervec)
            exec_loop(stmt.cond, stmt.body, itervec)
        elif isinstance(stmt, Assume):
            if eval_expr(stmt.expr, env, feed, itervec) == 0:
                raise _AbortAssume()
        elif isinstance(stmt, Assert):
            if eval_expr(stmt.expr, env, feed, itervec) == 0:
                raise _AbortAssert(stmt.loc)
        else:
            raise TypeError(f"cannot execute {stmt!r}")

    try:
        exec_body(program.body, ())
    except _AbortAssume:
        return RunResult("ok", env=env, blocked=True, head_states=head_states)
    except _AbortAssert as abort:
        return RunResult("assert", violation=abort.loc, env=env, head_states=head_states)
    except InterpError as exc:
        if str(exc) == "fuel":
            return RunResult("fuel", env=env, head_states=head_states)
        raise
    return RunResult("ok", env=env, head_states=head_states)


# ------------------------------------------------------------------
# GOTO interpreter
# ------------------------------------------------------------------

def run_goto(gp: goto_ir.GotoProgram, feed, max_steps: int = 1_000_000,
             on_step=None) -> RunResult:
    """`on_step(pc, env)` is called before executing each instruction."""
    env: dict = {}
    head_states: list = []
    visits: dict[int, int] = {}
    pc = 0
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            return RunResult("fuel", env=env, head_states=head_states)
        if on_step is not None:
            on_step(pc, env)
        ins = gp.instrs[pc]
        if ins.kind == goto_ir.END:
            return RunResult("ok", env=env, head_states=head_states)
        if ins.kind == goto_ir.DECL:
            env[ins.var] = None
            pc += 1
        elif ins.kind == goto_ir.ASSIGN:
            env[ins.var] = eval_expr(ins.expr, env, feed)
            pc += 1
        elif ins.kind == goto_ir.ASSUME:
            if eval_expr(ins.expr, env, feed) == 0:
                return RunResult("ok", env=env, blocked=True, head_states=head_states)
            pc += 1
        elif ins.kind == goto_ir.ASSERT:
            if eval_expr(ins.expr, env, feed) == 0:
                return RunResult("assert", violation=ins.loc, env=env, head_states=head_states)
            pc += 1
        elif ins.kind == goto_ir.IFGOTO:
            if ins.role == "loop-head":
                visit = visits.get(pc, 0)
                visits[pc] = visit + 1
                head_states.append((ins.loop_id, visit, dict(env)))
            pc = ins.target if eval_expr(ins.expr, env, feed) != 0 else pc + 1
        elif ins.kind == goto_ir.GOTO:
            pc = ins.target
        elif ins.kind == goto_ir.SKIP:
            pc += 1
        else:
            raise TypeError(f"cannot execute {ins!r}")


# ------------------------------------------------------------------
# Exhaustive oracle
# ------------------------------------------------------------------

@dataclass
class OracleVerdict:
    safe: bool
    witness: list | None = None   # feed values of the violating run
    violation: Loc | None = None
    runs: int = 0


def exhaustive_check(target, widths=None, max_runs: int = 1 << 24,
                     max_steps: int = 200_000) -> OracleVerdict:
    """Enumerate every nondeterministic input choice, depth first in value
    order, so the first violation found is the lexicographically smallest.

    `target` is a SourceProgram or a GotoProgram.
    """
    runner = run_goto if isinstance(target, goto_ir.GotoProgram) else run_ast
    runs = 0
    stack: list[list[int]] = [[]]
    while stack:
        prefix = stack.pop()
        feed = ListFeed(prefix)
        try:
            result = runner(target, feed, max_steps=max_steps)
        except FeedExhausted as need:
            # branch on the next nondet request, last value pushed first so
            # value 0 is explored next (DFS in ascending order)
            for value in range((1 << need.width) - 1, -1, -1):
                stack.append(prefix + [value])
            continue
        runs += 1
        if runs > max_runs:
            raise InterpError(f"exhaustive search exceeded {max_runs} runs")
        if result.status == "fuel":
            raise InterpError("execution fuel exhausted during exhaustive check")
        if result.status == "assert":
            return OracleVerdict(False, witness=prefix, violation=result.violation, runs=runs)
    return OracleVerdict(True, runs=runs)
