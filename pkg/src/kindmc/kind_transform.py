"""Loop-free phase programs: k-fold guarded unrolling plus the base-case,
forward-condition and inductive-step transformations.

Each loop is replaced by k copies of its body, each guarded by a jump to
the loop's exit point, so the program that remains has no back edges and
the copies nest as ite(guard, body, rest).  After the copies:

    base case          assume(!c)   -- unwinding assumption
    forward condition  assert(!c)   -- unwinding assertion
    inductive step     assume(!c), preceded by the state bookkeeping

The inductive step additionally havocs every havoc variable before the
loop (fresh nondet per variable per loop instance), stores the entry state
in a scalar record `cs`, and per copy j emits

    S: sv[j-1] := cs;   E: body;   U: cs := current vars;
    R: assume(sv[j-1] != cs)       -- field-wise disjunction of inequality

so redundant (repeated) states are excluded incrementally: copy j adds only
the sv[j-1] != cs conjunct, accumulating along the path rather than
comparing all pairs.  State vectors are k scalar record values, never a
runtime array.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .frontend import Binary, Expr, IntType, Nondet, Var
from .goto_ir import (ASSERT, ASSIGN, ASSUME, DECL, END, GOTO, IFGOTO,
                      GotoProgram, Instr, LoopInfo, analyze_loops,
                      count_backjumps, negate)

PHASES = ("base", "forward", "inductive")


@dataclass(frozen=True)
class StateVectorSpec:
    loop_id: int
    fields: tuple          # havoc variable names, declaration order
    k: int

    def cs_name(self, var: str) -> str:
        return f"cs{self.loop_id}${var}"

    def sv_name(self, copy: int, var: str) -> str:
        return f"sv{self.loop_id}${copy}${var}"


@dataclass
class CopyInfo:
    loop_id: int
    copy: int              # 1-based copy index
    guard_pos: int         # index of the copy's guard ifgoto
    path: tuple            # enclosing (loop_id, copy) pairs, outermost first


@dataclass
class LoopFreeProgram:
    program: GotoProgram
    phase: str             # 'none' | 'base' | 'forward' | 'inductive'
    k: int
    copies: list = field(default_factory=list)        # CopyInfo, emission order
    exits: dict = field(default_factory=dict)         # loop_id -> exit position
    specs: dict = field(default_factory=dict)         # loop_id -> StateVectorSpec

    def dump(self) -> str:
        return self.program.dump()


def _ordered_fields(loop: LoopInfo, declarations: list) -> tuple:
    order = {name: idx for idx, (name, _) in enumerate(declarations)}
    return tuple(sorted(loop.havoc_vars, key=lambda v: (order.get(v, 1 << 30), v)))


class _Builder:
    def __init__(self, gp: GotoProgram, loops: list[LoopInfo], k: int, phase: str):
        self.gp = gp
        self.k = k
        self.phase = phase
        self.loop_at_head = {loop.head: loop for loop in loops}
        self.var_types = dict(gp.declarations)
        self.out: list[Instr] = []
        self.copies: list[CopyInfo] = []
        self.exits: dict[int, int] = {}
        self.specs: dict[int, StateVectorSpec] = {}
        self.extra_decls: list = []
        self.next_site = 1 << 20  # synthetic nondet sites, clear of source ids
        self.int_ty = gp.widths.type_of("int", True)

    def fresh_nondet(self, ty: IntType) -> Nondet:
        node = Nondet(ty=ty, signed=ty.signed)
        node.site = self.next_site
        self.next_site += 1
        return node

    def emit(self, ins: Instr) -> int:
        self.out.append(ins)
        return len(self.out) - 1

    def declare(self, name: str, ty: IntType, loop_id: int):
        if all(existing != name for existing, _ in self.extra_decls):
            self.extra_decls.append((name, ty))
        self.emit(Instr(DECL, var=name, ty=ty, role="state-decl", loop_id=loop_id))

    # -- regions ----------------------------------------------------

    def emit_region(self, lo: int, hi: int, path: tuple):
        """Emit original instructions [lo, hi), unrolling loops.  Local jump
        targets are resolved within this (copy of the) region."""
        local_map: dict[int, int] = {}
        fixes: list[tuple[int, int]] = []
        idx = lo
        while idx < hi:
            ins = self.gp.instrs[idx]
            loop = self.loop_at_head.get(idx)
            if loop is not None:
                local_map[idx] = len(self.out)
                self.emit_loop(loop, path)
                idx = loop.backjump + 1
                continue
            local_map[idx] = len(self.out)
            clone = ins.clone()
            clone.path = path
            pos = self.emit(clone)
            if ins.kind in (GOTO, IFGOTO):
                fixes.append((pos, ins.target))
            idx += 1
        end_pos = len(self.out)
        for pos, target in fixes:
            if target in local_map:
                self.out[pos].target = local_map[target]
            elif target == hi:
                self.out[pos].target = end_pos
            else:
                raise ValueError(f"jump target {target} escapes region [{lo},{hi})")

    def emit_loop(self, loop: LoopInfo, path: tuple):
        inductive = self.phase == "inductive"
        spec = StateVectorSpec(loop.loop_id, _ordered_fields(loop, self.gp.declarations), self.k)
        self.specs.setdefault(loop.loop_id, spec)
        if inductive and spec.fields:
            for name in spec.fields:
                self.declare(spec.cs_name(name), self.var_types[name], loop.loop_id)
            for j in range(1, self.k + 1):
                for name in spec.fields:
                    self.declare(spec.sv_name(j, name), self.var_types[name], loop.loop_id)
            for name in spec.fields:  # A: havoc the loop variables
                self.emit(Instr(ASSIGN, var=name,
                                expr=self.fresh_nondet(self.var_types[name]),
                                role="havoc", loop_id=loop.loop_id, path=path))
            for name in spec.fields:  # cs records the entry state
                self.emit(Instr(ASSIGN, var=spec.cs_name(name),
                                expr=Var(name, ty=self.var_types[name]),
                                role="state-init", loop_id=loop.loop_id, path=path))
        guard_positions = []
        for j in range(1, self.k + 1):
            cpath = path + ((loop.loop_id, j),)
            guard = negate(copy.deepcopy(loop.guard))
            gpos = self.emit(Instr(IFGOTO, expr=guard, role="copy-guard",
                                   loop_id=loop.loop_id, path=cpath))
            guard_positions.append(gpos)
            self.copies.append(CopyInfo(loop.loop_id, j, gpos, cpath))
            if inductive and spec.fields:
                for name in spec.fields:  # S: sv[j-1] = cs
                    self.emit(Instr(ASSIGN, var=spec.sv_name(j, name),
                                    expr=Var(spec.cs_name(name), ty=self.var_types[name]),
                                    role="store", loop_id=loop.loop_id, path=cpath))
            self.emit_region(loop.head + 1, loop.backjump, cpath)
            if inductive and spec.fields:
                for name in spec.fields:  # U: cs = current values
                    self.emit(Instr(ASSIGN, var=spec.cs_name(name),
                                    expr=Var(name, ty=self.var_types[name]),
                                    role="update", loop_id=loop.loop_id, path=cpath))
                diff = None  # R: any field differs => states differ
                for name in spec.fields:
                    ne = Binary("!=", Var(spec.sv_name(j, name), ty=self.var_types[name]),
                                Var(spec.cs_name(name), ty=self.var_types[name]),
                                ty=self.int_ty)
                    diff = ne if diff is None else Binary("||", diff, ne, ty=self.int_ty)
                self.emit(Instr(ASSUME, expr=diff, role="redundancy",
                                loop_id=loop.loop_id, path=cpath))
        exit_pos = len(self.out)
        self.exits[loop.loop_id] = exit_pos
        for gpos in guard_positions:
            self.out[gpos].target = exit_pos
        halt = negate(copy.deepcopy(loop.guard))
        if self.phase == "base" or self.phase == "inductive":
            self.emit(Instr(ASSUME, expr=halt, role="unwinding-assumption",
                            loop_id=loop.loop_id, path=path))
        elif self.phase == "forward":
            self.emit(Instr(ASSERT, expr=halt, role="unwinding-assertion",
                            loop_id=loop.loop_id, path=path))
            # cut the insufficiently unrolled paths so that any remaining
            # model is a complete execution violating a real property;
            # validity of the whole VC is unchanged
            self.emit(Instr(ASSUME, expr=copy.deepcopy(halt), role="unwinding-cut",
                            loop_id=loop.loop_id, path=path))


def _build(gp: GotoProgram, k: int, phase: str) -> LoopFreeProgram:
    if k < 1:
        raise ValueError("k must be at least 1")
    loops = analyze_loops(gp)
    builder = _Builder(gp, loops, k, phase)
    builder.emit_region(0, len(gp.instrs), ())
    program = GotoProgram(instrs=builder.out, widths=gp.widths,
                          declarations=list(gp.declarations) + builder.extra_decls)
    assert count_backjumps(program) == 0, "unrolled program must be loop-free"
    return LoopFreeProgram(program=program, phase=phase, k=k,
                           copies=builder.copies, exits=builder.exits,
                           specs=builder.specs)


def unroll(gp: GotoProgram, k: int) -> LoopFreeProgram:
    """k-fold guarded unrolling without any trailing check."""
    return _build(gp, k, "none")


def make_base_case(gp: GotoProgram, k: int) -> LoopFreeProgram:
    return _build(gp, k, "base")


def make_forward_condition(gp: GotoProgram, k: int) -> LoopFreeProgram:
    return _build(gp, k, "forward")


def make_inductive_step(gp: GotoProgram, k: int) -> LoopFreeProgram:
    return _build(gp, k, "inductive")
