"""Flat GOTO-program representation and lowering from the typed AST.

All structured control flow is lowered to a list of instructions with
explicit (guarded) gotos.  Every loop is normalised to a single shape:

    head:  IF (!c) GOTO exit      -- guard check, role 'loop-head'
           ...body...
           GOTO head              -- role 'backjump'
    exit:

`for (B; c; D) { E }` becomes  `B; while (c) { E; D; }`  and
`do { E } while (c)` becomes  `E; while (c) { E }`  so the body runs once
before the halt condition is first checked.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace

from .frontend import (Assert, Assign, Assume, Binary, Cast, Decl, DoWhile,
                       Expr, For, If, IntLit, IntType, Loc, Nondet,
                       SourceError, SourceProgram, Unary, Var, While,
                       WidthConfig, pretty_expr)

# Instruction kinds
DECL = "decl"
ASSIGN = "assign"
ASSUME = "assume"
ASSERT = "assert"
IFGOTO = "ifgoto"   # jump taken when expr is nonzero
GOTO = "goto"
SKIP = "skip"
END = "end"


@dataclass
class Instr:
    kind: str
    var: str | None = None
    ty: IntType | None = None
    expr: Expr | None = None
    target: int = -1
    loc: Loc = field(default_factory=Loc, compare=False)
    role: str = ""       # dump annotation: loop-head, backjump, havoc, ...
    loop_id: int = -1
    path: tuple = ()     # enclosing (loop_id, copy) pairs after unrolling

    def clone(self) -> "Instr":
        return replace(self, expr=copy.deepcopy(self.expr))


@dataclass
class GotoProgram:
    instrs: list[Instr]
    widths: WidthConfig
    declarations: list = field(default_factory=list)  # (name, IntType)

    def dump(self) -> str:
        lines = []
        for idx, ins in enumerate(self.instrs):
            lines.append(f"{idx:4d}: {format_instr(ins)}")
        return "\n".join(lines) + "\n"


@dataclass
class LoopInfo:
    loop_id: int
    head: int          # index of the guard ifgoto
    backjump: int      # index of the back-edge goto
    guard: Expr        # positive continue condition c; halt condition is !c
    loop_vars: set[str] = field(default_factory=set)
    havoc_vars: set[str] = field(default_factory=set)
    nesting_depth: int = 0


def format_instr(ins: Instr) -> str:
    if ins.kind == DECL:
        text = f"DECL {ins.var} : {ins.ty}"
    elif ins.kind == ASSIGN:
        text = f"ASSIGN {ins.var} := {pretty_expr(ins.expr)}"
    elif ins.kind == ASSUME:
        text = f"ASSUME {pretty_expr(ins.expr)}"
    elif ins.kind == ASSERT:
        text = f"ASSERT {pretty_expr(ins.expr)}"
    elif ins.kind == IFGOTO:
        text = f"IF {pretty_expr(ins.expr)} GOTO {ins.target}"
    elif ins.kind == GOTO:
        text = f"GOTO {ins.target}"
    elif ins.kind == SKIP:
        text = "SKIP"
    elif ins.kind == END:
        text = "END"
    else:
        raise ValueError(f"unknown instruction kind {ins.kind!r}")
    if ins.role:
        tag = ins.role if ins.loop_id < 0 else f"{ins.role} L{ins.loop_id}"
        text = f"{text:<40s} ; {tag}"
    return text


def negate(expr: Expr) -> Expr:
    ty = IntType(expr.ty.width, True) if expr.ty else None
    return Unary("!", expr, ty=ty, loc=expr.loc if hasattr(expr, "loc") else Loc())


# ------------------------------------------------------------------
# Lowering
# ------------------------------------------------------------------

class _Lowerer:
    def __init__(self, program: SourceProgram, widths: WidthConfig):
        self.program = program
        self.widths = widths
        self.instrs: list[Instr] = []
        self.next_loop = 0

    def emit(self, ins: Instr) -> int:
        self.instrs.append(ins)
        return len(self.instrs) - 1

    def lower_body(self, stmts: list):
        for stmt in stmts:
            self.lower_stmt(stmt)

    def lower_stmt(self, stmt):
        if isinstance(stmt, Decl):
            self.emit(Instr(DECL, var=stmt.name, ty=stmt.ty, loc=stmt.loc))
            if stmt.init is not None:
                self.emit(Instr(ASSIGN, var=stmt.name, expr=stmt.init, loc=stmt.loc))
        elif isinstance(stmt, Assign):
            self.emit(Instr(ASSIGN, var=stmt.name, expr=stmt.expr, loc=stmt.loc))
        elif isinstance(stmt, Assume):
            self.emit(Instr(ASSUME, expr=stmt.expr, loc=stmt.loc))
        elif isinstance(stmt, Assert):
            self.emit(Instr(ASSERT, expr=stmt.expr, loc=stmt.loc))
        elif isinstance(stmt, If):
            branch = self.emit(Instr(IFGOTO, expr=negate(stmt.cond), loc=stmt.loc))
            self.lower_body(stmt.then)
            if stmt.els:
                skip = self.emit(Instr(GOTO, loc=stmt.loc))
                self.instrs[branch].target = len(self.instrs)
                self.lower_body(stmt.els)
                self.instrs[skip].target = len(self.instrs)
            else:
                self.instrs[branch].target = len(self.instrs)
        elif isinstance(stmt, While):
            self.lower_loop(stmt.cond, stmt.body, stmt.loc)
        elif isinstance(stmt, For):
            if stmt.init is not None:
                self.lower_stmt(stmt.init)
            cond = stmt.cond if stmt.cond is not None else IntLit(1, ty=self.widths.type_of("int", True), loc=stmt.loc)
            body = list(stmt.body)
            if stmt.step is not None:
                body = body + [stmt.step]
            self.lower_loop(cond, body, stmt.loc)
        elif isinstance(stmt, DoWhile):
            # body runs once before the halt condition is first checked
            self.lower_body(copy.deepcopy(stmt.body))
            self.lower_loop(stmt.cond, stmt.body, stmt.loc)
        else:
            raise TypeError(f"cannot lower {stmt!r}")

    def lower_loop(self, cond: Expr, body: list, loc: Loc):
        loop_id = self.next_loop
        self.next_loop += 1
        head = self.emit(Instr(IFGOTO, expr=negate(cond), loc=loc,
                               role="loop-head", loop_id=loop_id))
        self.lower_body(body)
        self.emit(Instr(GOTO, target=head, loc=loc, role="backjump", loop_id=loop_id))
        self.instrs[head].target = len(self.instrs)


def lower(program: SourceProgram, widths: WidthConfig | None = None) -> GotoProgram:
    """Lower a type-checked AST to a GOTO-program."""
    if not program.typechecked:
        raise ValueError("lower() requires a type-checked program")
    widths = widths or WidthConfig()
    lw = _Lowerer(program, widths)
    lw.lower_body(program.body)
    lw.emit(Instr(END))
    return GotoProgram(instrs=lw.instrs, widths=widths,
                       declarations=list(program.declarations))


# ------------------------------------------------------------------
# Loop analysis
# ------------------------------------------------------------------

def expr_vars(expr: Expr | None, acc: set[str] | None = None) -> set[str]:
    acc = acc if acc is not None else set()
    if expr is None:
        return acc
    if isinstance(expr, Var):
        acc.add(expr.name)
    elif isinstance(expr, Unary):
        expr_vars(expr.operand, acc)
    elif isinstance(expr, Binary):
        expr_vars(expr.lhs, acc)
        expr_vars(expr.rhs, acc)
    elif isinstance(expr, Cast):
        expr_vars(expr.operand, acc)
    return acc


def strip_casts(expr: Expr) -> Expr:
    while isinstance(expr, Cast):
        expr = expr.operand
    return expr


def count_backjumps(gp: GotoProgram) -> int:
    """Number of backward control-flow edges; measures unwinding progress."""
    return sum(1 for idx, ins in enumerate(gp.instrs)
               if ins.kind in (GOTO, IFGOTO) and 0 <= ins.target <= idx)


def _successors(gp: GotoProgram, idx: int, follow_back: bool = True) -> list[int]:
    ins = gp.instrs[idx]
    if ins.kind == END:
        return []
    if ins.kind == GOTO:
        if not follow_back and ins.target <= idx:
            return []
        return [ins.target]
    if ins.kind == IFGOTO:
        succ = [idx + 1]
        if follow_back or ins.target > idx:
            succ.append(ins.target)
        return succ
    return [idx + 1]


def _must_assigned_through(gp: GotoProgram, start: int, stop: int) -> set[str]:
    """Variables assigned on every acyclic path from `start` to `stop`
    (back edges are not followed, so inner loop bodies count as optional)."""
    universe = {ins.var for ins in gp.instrs if ins.kind == ASSIGN and ins.var}
    ins_sets: dict[int, set[str]] = {start: set()}
    order = list(range(start, stop + 1))
    changed = True
    while changed:
        changed = False
        for idx in order:
            if idx not in ins_sets:
                continue
            cur = ins_sets[idx]
            out = cur | {gp.instrs[idx].var} if gp.instrs[idx].kind == ASSIGN else cur
            for succ in _successors(gp, idx, follow_back=False):
                if succ > stop:
                    continue
                if succ not in ins_sets:
                    ins_sets[succ] = set(out)
                    changed = True
                else:
                    narrowed = ins_sets[succ] & out
                    if narrowed != ins_sets[succ]:
                        ins_sets[succ] = narrowed
                        changed = True
    return ins_sets.get(stop, universe & set())


def analyze_loops(gp: GotoProgram) -> list[LoopInfo]:
    """One LoopInfo per back edge.  Rejects irreducible control flow (a back
    edge must target a loop-head guard with a matching exit jump)."""
    loops: list[LoopInfo] = []
    heads: dict[int, int] = {}
    for idx, ins in enumerate(gp.instrs):
        if ins.kind in (GOTO, IFGOTO) and 0 <= ins.target <= idx:
            head = ins.target
            head_ins = gp.instrs[head]
            if (ins.kind != GOTO or head_ins.kind != IFGOTO
                    or head_ins.target <= idx or head in heads):
                raise SourceError("unsupported-feature",
                                  "irreducible control flow", ins.loc.line, ins.loc.col)
            heads[head] = idx
            guard = strip_casts(head_ins.expr)
            if not isinstance(guard, Unary) or guard.op != "!":
                raise SourceError("unsupported-feature",
                                  "irreducible control flow", ins.loc.line, ins.loc.col)
            loops.append(LoopInfo(
                loop_id=head_ins.loop_id if head_ins.loop_id >= 0 else len(loops),
                head=head, backjump=idx, guard=guard.operand))

    for loop in loops:
        body = range(loop.head + 1, loop.backjump)
        lvars = expr_vars(loop.guard)
        for idx in body:
            ins = gp.instrs[idx]
            if ins.var:
                lvars.add(ins.var)
            expr_vars(ins.expr, lvars)
        loop.loop_vars = lvars
        always = (_must_assigned_through(gp, loop.head + 1, loop.backjump)
                  if loop.backjump > loop.head + 1 else set())
        loop.havoc_vars = expr_vars(loop.guard) | (always & lvars)
        loop.nesting_depth = sum(1 for other in loops
                                 if other.head < loop.head and loop.backjump < other.backjump)
    loops.sort(key=lambda l: l.head)
    return loops


def assigned_vars(gp: GotoProgram, lo: int, hi: int) -> set[str]:
    """Variables assigned anywhere in the instruction range [lo, hi]."""
    return {ins.var for ins in gp.instrs[lo:hi + 1] if ins.kind == ASSIGN and ins.var}
