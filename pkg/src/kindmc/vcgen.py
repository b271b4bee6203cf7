"""SSA conversion of loop-free programs and VC construction.

The symbolic executor walks the instruction list once, keeping a path guard
and a variable environment.  Joins introduce ite nodes selecting by the
incoming guards, so a guarded assignment surfaces as  v2 = ite(g, body, v1)
exactly in the shape the unrolled copies require.  Expressions are interned
in a pool with eager constant folding, which is also what eliminates
assume statements whose condition propagates to literal true.

An assert contributes the obligation  (assumes-before-it && guard) => expr;
an assume only constrains executions that reach it.  The VC query is
  defs && not(all obligations)
so Sat means some assert is violable under the assumes on its own prefix,
and a base-case model is a real (never spurious) execution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _evalpy
from .frontend import (Binary, Cast, Expr, IntLit, IntType, Nondet, Unary,
                       Var)
from .goto_ir import (ASSERT, ASSIGN, ASSUME, DECL, END, GOTO, IFGOTO, SKIP,
                      GotoProgram)
from .kind_transform import LoopFreeProgram

BOOL = 0  # width marker for boolean nodes

_ARITH = {"add", "sub", "mul", "udiv", "sdiv", "urem", "srem", "neg"}
_CMP = {"eq", "ult", "ule", "slt", "sle"}
_LOGIC = {"and", "or", "not"}


class Node:
    """Interned expression node: op, width (0 for Bool), args, and either a
    constant value or a symbol name."""

    __slots__ = ("op", "width", "args", "value", "name", "key", "nid")

    def __init__(self, op, width, args=(), value=None, name=None, key=None, nid=0):
        self.op = op
        self.width = width
        self.args = args
        self.value = value
        self.name = name
        self.key = key
        self.nid = nid

    def is_const(self) -> bool:
        return self.op == "const"

    def __repr__(self):
        if self.op == "const":
            return f"{self.value}w{self.width}"
        if self.op == "sym":
            return self.name
        return f"({self.op} {' '.join(map(repr, self.args))})"


class Pool:
    def __init__(self):
        self.interned: dict = {}
        self.nodes: list[Node] = []
        self.true = self.const(BOOL, 1)
        self.false = self.const(BOOL, 0)

    def _intern(self, key, build) -> Node:
        node = self.interned.get(key)
        if node is None:
            node = build()
            node.nid = len(self.nodes)
            self.nodes.append(node)
            self.interned[key] = node
        return node

    def const(self, width: int, value: int) -> Node:
        if width:
            value &= (1 << width) - 1
        else:
            value = 1 if value else 0
        key = ("const", width, value)
        return self._intern(key, lambda: Node("const", width, value=value, key=key))

    def sym(self, name: str, width: int, origin) -> Node:
        key = ("sym", name)
        node = self._intern(key, lambda: Node("sym", width, name=name, key=("sym", name, origin)))
        node.key = ("sym", name, origin)
        return node

    def make(self, op: str, width: int, *args: Node) -> Node:
        if op in _ARITH and op != "neg":
            assert args[0].width == args[1].width == width, (op, width, args)
        if op in _CMP:
            assert args[0].width == args[1].width, (op, args)
        if op in _LOGIC:
            assert all(a.width == BOOL for a in args), (op, args)

        if all(a.is_const() for a in args):
            value = _evalpy.eval_op(op, width, [a.value for a in args],
                                    args[0].width if args else 0)
            return self.const(width, value)
        # shallow simplifications
        if op == "and":
            if args[0] is self.false or args[1] is self.false:
                return self.false
            if args[0] is self.true:
                return args[1]
            if args[1] is self.true:
                return args[0]
            if args[0] is args[1]:
                return args[0]
        elif op == "or":
            if args[0] is self.true or args[1] is self.true:
                return self.true
            if args[0] is self.false:
                return args[1]
            if args[1] is self.false:
                return args[0]
            if args[0] is args[1]:
                return args[0]
        elif op == "not" and args[0].op == "not":
            return args[0].args[0]
        elif op == "ite":
            if args[0].is_const():
                return args[1] if args[0].value else args[2]
            if args[1] is args[2]:
                return args[1]
        elif op == "eq" and args[0] is args[1]:
            return self.true
        key = (op, width) + tuple(a.nid for a in args)
        return self._intern(key, lambda: Node(op, width, args=args, key=key))

    def ite(self, cond: Node, then: Node, els: Node) -> Node:
        assert then.width == els.width
        return self.make("ite", then.width, cond, then, els)

    def cast(self, node: Node, from_ty: IntType, to_ty: IntType) -> Node:
        if from_ty.width == to_ty.width:
            return node
        if from_ty.width < to_ty.width:
            op = "sext" if from_ty.signed else "zext"
            return self.make(op, to_ty.width, node)
        return self.make("trunc", to_ty.width, node)


@dataclass
class Snapshot:
    loop_id: int
    copy: int
    path: tuple
    reach_guard: Node          # path guard on arrival at the copy's guard
    taken_guard: Node          # reach_guard && loop condition
    env: dict                  # var -> Node, state on arrival


@dataclass
class Obligation:
    guard: Node
    expr: Node
    ctx_len: int               # assumes preceding this assert
    kind: str                  # 'property' | 'unwind' | validation roles
    loc: object
    role: str
    path: tuple
    index: int


@dataclass
class SsaProgram:
    pool: Pool
    defs: list                 # (ssa name, Node) in definition order
    assumes: list              # (guard Node, expr Node) in program order
    asserts: list[Obligation]
    free_syms: list[Node]      # creation order = declaration order
    versions: dict             # var -> current version index
    var_types: dict
    snapshots: list[Snapshot]
    final_env: dict
    final_guard: Node
    vacuous: bool = False
    phase: str = "none"
    k: int = 0

    def dump(self) -> str:
        lines = [f"; ssa phase={self.phase} k={self.k}"]
        for name, node in self.defs:
            lines.append(f"{name} := {node!r}")
        for guard, expr in self.assumes:
            lines.append(f"assume [{guard!r}] {expr!r}")
        for ob in self.asserts:
            lines.append(f"assert [{ob.guard!r}] {ob.expr!r}  ; {ob.kind}")
        return "\n".join(lines) + "\n"


class _Uninit:
    __slots__ = ("name", "version")

    def __init__(self, name, version):
        self.name = name
        self.version = version


class _SsaBuilder:
    def __init__(self, lfp: LoopFreeProgram):
        self.lfp = lfp
        self.gp = lfp.program
        self.pool = Pool()
        self.var_types = dict(self.gp.declarations)
        self.versions: dict[str, int] = {}
        self.defs: list = []
        self.assumes: list = []
        self.asserts: list[Obligation] = []
        self.free_syms: list[Node] = []
        self.snapshots: list[Snapshot] = []
        self.env: dict = {}
        self.guard = self.pool.true
        self.pending: dict[int, list] = {}
        self.guard_count = 0
        self.int_ty = self.gp.widths.type_of("int", True)

    # -- symbols ----------------------------------------------------

    def bump(self, var: str) -> str:
        self.versions[var] = self.versions.get(var, 0) + 1
        return f"{var}_{self.versions[var]}"

    def fresh_sym(self, name: str, width: int, origin) -> Node:
        node = self.pool.sym(name, width, origin)
        if node not in self.free_syms:
            self.free_syms.append(node)
        return node

    def materialize(self, var: str) -> Node:
        value = self.env.get(var)
        if isinstance(value, _Uninit):
            ty = self.var_types[var]
            sym = self.fresh_sym(f"{var}_{value.version}", ty.width, ("init", var))
            self.env[var] = sym
            return sym
        if value is None:
            raise KeyError(f"use of undeclared variable {var!r} in SSA build")
        return value

    # -- expression translation --------------------------------------

    def value(self, expr: Expr, path: tuple) -> Node:
        pool = self.pool
        if isinstance(expr, IntLit):
            return pool.const(expr.ty.width, expr.value)
        if isinstance(expr, Var):
            return self.materialize(expr.name)
        if isinstance(expr, Nondet):
            name = f"nd{len(self.free_syms) + 1}"
            return self.fresh_sym(name, expr.ty.width, ("site", expr.site, path))
        if isinstance(expr, Cast):
            inner = self.value(expr.operand, path)
            return pool.cast(inner, expr.operand.ty, expr.ty)
        if isinstance(expr, Unary):
            if expr.op == "!":
                return self.b2v(pool.make("not", BOOL, self.boolean(expr.operand, path)))
            inner = self.value(expr.operand, path)
            return pool.make("neg", expr.ty.width, inner)
        if isinstance(expr, Binary):
            op = expr.op
            if op in ("&&", "||"):
                lhs = self.boolean(expr.lhs, path)
                rhs = self.boolean(expr.rhs, path)
                return self.b2v(pool.make("and" if op == "&&" else "or", BOOL, lhs, rhs))
            if op in ("<", "<=", ">", ">=", "==", "!="):
                return self.b2v(self.compare(expr, path))
            lhs = self.value(expr.lhs, path)
            rhs = self.value(expr.rhs, path)
            width = expr.ty.width
            names = {"+": "add", "-": "sub", "*": "mul"}
            if op in names:
                return pool.make(names[op], width, lhs, rhs)
            if op in ("/", "%"):
                signed = expr.ty.signed
                divop = ("sdiv" if signed else "udiv") if op == "/" else ("srem" if signed else "urem")
                raw = pool.make(divop, width, lhs, rhs)
                # division by zero yields a fresh nondet value, no error path
                alt = self.fresh_sym(f"nd{len(self.free_syms) + 1}", width,
                                     ("divzero", len(self.free_syms)))
                zero = pool.const(width, 0)
                return pool.ite(pool.make("eq", BOOL, rhs, zero), alt, raw)
            raise ValueError(f"unknown operator {op!r}")
        raise TypeError(f"cannot translate {expr!r}")

    def compare(self, expr: Binary, path: tuple) -> Node:
        lhs = self.value(expr.lhs, path)
        rhs = self.value(expr.rhs, path)
        signed = expr.lhs.ty.signed
        pool = self.pool
        op = expr.op
        if op in (">", ">="):
            lhs, rhs = rhs, lhs
            op = "<" if op == ">" else "<="
        if op == "==":
            return pool.make("eq", BOOL, lhs, rhs)
        if op == "!=":
            return pool.make("not", BOOL, pool.make("eq", BOOL, lhs, rhs))
        name = ("slt" if signed else "ult") if op == "<" else ("sle" if signed else "ule")
        return pool.make(name, BOOL, lhs, rhs)

    def boolean(self, expr: Expr, path: tuple) -> Node:
        pool = self.pool
        if isinstance(expr, Binary):
            if expr.op in ("<", "<=", ">", ">=", "==", "!="):
                return self.compare(expr, path)
            if expr.op in ("&&", "||"):
                return pool.make("and" if expr.op == "&&" else "or", BOOL,
                                 self.boolean(expr.lhs, path), self.boolean(expr.rhs, path))
        if isinstance(expr, Unary) and expr.op == "!":
            return pool.make("not", BOOL, self.boolean(expr.operand, path))
        if isinstance(expr, Cast):
            return self.boolean(expr.operand, path)  # truthiness is width-independent upcast
        value = self.value(expr, path)
        zero = pool.const(value.width, 0)
        return pool.make("not", BOOL, pool.make("eq", BOOL, value, zero))

    def b2v(self, b: Node) -> Node:
        w = self.int_ty.width
        return self.pool.ite(b, self.pool.const(w, 1), self.pool.const(w, 0))

    # -- joins --------------------------------------------------------

    def merge_incoming(self, incoming: list) -> set:
        """incoming: list of (guard, env).  Merge with the current
        fall-through state; returns the set of variables that changed."""
        states = []
        if not (self.guard.is_const() and self.guard.value == 0):
            states.append((self.guard, self.env))
        states.extend(incoming)
        if not states:
            self.guard = self.pool.false
            self.env = {}
            return set()
        base_guard, base_env = states[0]
        merged = dict(base_env)
        total = base_guard
        changed = set()
        for g, env in states[1:]:
            for var in set(merged) | set(env):
                a = merged.get(var)
                b = env.get(var)
                if a is b:
                    continue
                if isinstance(a, _Uninit) and isinstance(b, _Uninit) and a.version == b.version:
                    continue
                av = self._force(merged, var, a)
                bv = self._force(env, var, b)
                if av is not bv:
                    merged[var] = self.pool.ite(g, bv, av)
                    changed.add(var)
            total = self.pool.make("or", BOOL, total, g)
        self.guard = total
        self.env = merged
        return changed

    def _force(self, env: dict, var: str, value) -> Node:
        if isinstance(value, _Uninit):
            ty = self.var_types[var]
            sym = self.fresh_sym(f"{var}_{value.version}", ty.width, ("init", var))
            env[var] = sym
            return sym
        if value is None:
            # variable not live on this path: treat as an initial symbol
            self.versions[var] = self.versions.get(var, 0) + 1
            ty = self.var_types[var]
            sym = self.fresh_sym(f"{var}_{self.versions[var]}", ty.width, ("init", var))
            env[var] = sym
            return sym
        return value

    # -- main walk ------------------------------------------------------

    def run(self) -> SsaProgram:
        instrs = self.gp.instrs
        copy_at: dict[int, object] = {c.guard_pos: c for c in self.lfp.copies}
        for idx, ins in enumerate(instrs):
            incoming = self.pending.pop(idx, None)
            if incoming:
                changed = self.merge_incoming(incoming)
                for var in sorted(changed):
                    self.defs.append((self.bump(var), self.env[var]))
            dead = self.guard.is_const() and self.guard.value == 0
            if ins.kind == DECL:
                self.versions[ins.var] = self.versions.get(ins.var, 0) + 1
                self.env[ins.var] = _Uninit(ins.var, self.versions[ins.var])
            elif dead:
                continue
            elif ins.kind == ASSIGN:
                if isinstance(ins.expr, Nondet):
                    name = self.bump(ins.var)
                    sym = self.fresh_sym(name, self.var_types[ins.var].width,
                                         ("site", ins.expr.site, ins.path))
                    self.env[ins.var] = sym
                    self.defs.append((name, sym))
                else:
                    value = self.value(ins.expr, ins.path)
                    self.env[ins.var] = value
                    self.defs.append((self.bump(ins.var), value))
            elif ins.kind == ASSUME:
                if ins.role == "unwinding-assumption":
                    self.snapshots.append(Snapshot(
                        loop_id=ins.loop_id, copy=-1, path=ins.path,
                        reach_guard=self.guard, taken_guard=self.guard,
                        env=dict(self.env)))
                expr = self.boolean(ins.expr, ins.path)
                self.assumes.append((self.guard, expr))
            elif ins.kind == ASSERT:
                if ins.role == "unwinding-assertion":
                    self.snapshots.append(Snapshot(
                        loop_id=ins.loop_id, copy=-1, path=ins.path,
                        reach_guard=self.guard, taken_guard=self.guard,
                        env=dict(self.env)))
                expr = self.boolean(ins.expr, ins.path)
                kind = "unwind" if ins.role == "unwinding-assertion" else (
                    ins.role if ins.role.startswith("validate:") else "property")
                self.asserts.append(Obligation(
                    guard=self.guard, expr=expr, ctx_len=len(self.assumes),
                    kind=kind, loc=ins.loc, role=ins.role, path=ins.path,
                    index=len(self.asserts)))
            elif ins.kind == IFGOTO:
                cond = self.boolean(ins.expr, ins.path)
                info = copy_at.get(idx)
                if info is not None:
                    # loop condition is the negation of the exit jump
                    taken_body = self.pool.make("not", BOOL, cond)
                    self.defs.append((f"g{self.guard_count + 1}", taken_body))
                    self.guard_count += 1
                    self.snapshots.append(Snapshot(
                        loop_id=info.loop_id, copy=info.copy, path=info.path,
                        reach_guard=self.guard,
                        taken_guard=self.pool.make("and", BOOL, self.guard, taken_body),
                        env=dict(self.env)))
                jump_guard = self.pool.make("and", BOOL, self.guard, cond)
                if not (jump_guard.is_const() and jump_guard.value == 0):
                    self.pending.setdefault(ins.target, []).append((jump_guard, dict(self.env)))
                self.guard = self.pool.make("and", BOOL, self.guard,
                                            self.pool.make("not", BOOL, cond))
            elif ins.kind == GOTO:
                self.pending.setdefault(ins.target, []).append((self.guard, dict(self.env)))
                self.guard = self.pool.false
            elif ins.kind in (SKIP, END):
                pass
        if self.pending:
            raise ValueError("unresolved jump targets in loop-free program")
        return SsaProgram(
            pool=self.pool, defs=self.defs, assumes=self.assumes,
            asserts=self.asserts, free_syms=self.free_syms,
            versions=dict(self.versions), var_types=self.var_types,
            snapshots=self.snapshots, final_env=dict(self.env),
            final_guard=self.guard, phase=self.lfp.phase, k=self.lfp.k)


def to_ssa(lfp: LoopFreeProgram) -> SsaProgram:
    return _SsaBuilder(lfp).run()


def simplify_assumes(ssa: SsaProgram) -> SsaProgram:
    """Delete assumes that propagate to literal true; a literally false
    assume on an unconditional path marks the program vacuous."""
    keep: list = []
    keep_index: list[int] = []
    vacuous = False
    for guard, expr in ssa.assumes:
        if expr.is_const() and expr.value == 1:
            keep_index.append(-1)
            continue
        if guard.is_const() and guard.value == 1 and expr.is_const() and expr.value == 0:
            vacuous = True
        keep_index.append(len(keep))
        keep.append((guard, expr))
    new_asserts = []
    for ob in ssa.asserts:
        kept_before = sum(1 for i in keep_index[:ob.ctx_len] if i >= 0)
        new_asserts.append(Obligation(
            guard=ob.guard, expr=ob.expr, ctx_len=kept_before, kind=ob.kind,
            loc=ob.loc, role=ob.role, path=ob.path, index=ob.index))
    return SsaProgram(
        pool=ssa.pool, defs=ssa.defs, assumes=keep, asserts=new_asserts,
        free_syms=ssa.free_syms, versions=ssa.versions, var_types=ssa.var_types,
        snapshots=ssa.snapshots, final_env=ssa.final_env,
        final_guard=ssa.final_guard, vacuous=vacuous, phase=ssa.phase, k=ssa.k)


@dataclass
class Vc:
    """query = constraints && not(property).  Unsat means the phase claim
    holds; Sat yields a model over the free symbols (a base-case model is a
    concrete counterexample)."""

    ssa: SsaProgram
    phase: str
    query: Node
    obligations: list          # (Obligation, standalone implication Node)
    pool: Pool
    free_syms: list
    vacuous: bool = False

    @property
    def k(self) -> int:
        return self.ssa.k


def build_vc(ssa: SsaProgram, phase: str | None = None) -> Vc:
    """Assemble the phase query.  Assumes contribute (guard => expr) facts;
    each assert yields (its assume prefix && guard) => expr; the query is
    the negation of their conjunction."""
    pool = ssa.pool
    phase = phase or ssa.phase
    prefix = [pool.true]
    for guard, expr in ssa.assumes:
        fact = pool.make("or", BOOL, pool.make("not", BOOL, guard), expr)
        prefix.append(pool.make("and", BOOL, prefix[-1], fact))
    obligations = []
    prop = pool.true
    for ob in ssa.asserts:
        antecedent = pool.make("and", BOOL, prefix[ob.ctx_len], ob.guard)
        impl = pool.make("or", BOOL, pool.make("not", BOOL, antecedent), ob.expr)
        obligations.append((ob, impl))
        prop = pool.make("and", BOOL, prop, impl)
    query = pool.make("not", BOOL, prop)
    if ssa.vacuous:
        query = pool.false
    return Vc(ssa=ssa, phase=phase, query=query, obligations=obligations,
              pool=pool, free_syms=list(ssa.free_syms), vacuous=ssa.vacuous)
