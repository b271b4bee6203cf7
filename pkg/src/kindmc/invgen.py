"""Affine (polyhedral) invariant inference and instrumentation.

Two-step analysis: (1) every elementary instruction gets an affine
transformer, a polyhedron over the doubled variable set {v#init} | {v}
relating pre- to post-state; compound effects come from relational
composition.  (2) polyhedral invariants are propagated forward through the
GOTO-program, with Kleene iteration at loop heads, widening after a short
delay and one narrowing pass.

The abstraction is over mathematical integers (no wrap-around), so inferred
candidates are only instrumented after `validate_invariants` has proved
them inductive under the real fixed-width semantics; candidates that fail
(for instance because an expression would overflow) are dropped.

Inferred invariants are instrumented as assume statements before the loop,
at the top of the loop body, and immediately after the loop.  Constraints
mentioning #init pseudo-variables are never instrumented.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import goto_ir
from .frontend import (Binary, Cast, Expr, IntLit, IntType, Nondet, Unary,
                       Var, WidthConfig)
from .goto_ir import (ASSERT, ASSIGN, ASSUME, DECL, END, GOTO, IFGOTO, SKIP,
                      GotoProgram, Instr, LoopInfo, strip_casts)
from .polyhedra import AffineConstraint, Infeasible, Polyhedron

log = logging.getLogger(__name__)

INIT_SUFFIX = "#init"
WIDENING_DELAY = 3
MAX_SWEEPS = 60


def is_init_var(name: str) -> bool:
    return name.endswith(INIT_SUFFIX)


def init_of(name: str) -> str:
    return name + INIT_SUFFIX


# ------------------------------------------------------------------
# Linearisation of expressions
# ------------------------------------------------------------------

def linearize(expr: Expr) -> tuple[dict, int] | None:
    """Return (coeffs, const) for an affine expression, else None.
    Casts are treated as transparent (exact in the absence of overflow;
    the validation gate re-checks everything bit-precisely)."""
    expr = strip_casts(expr)
    if isinstance(expr, IntLit):
        return {}, expr.value
    if isinstance(expr, Var):
        return {expr.name: 1}, 0
    if isinstance(expr, Unary) and expr.op == "-":
        sub = linearize(expr.operand)
        if sub is None:
            return None
        coeffs, const = sub
        return {v: -c for v, c in coeffs.items()}, -const
    if isinstance(expr, Binary):
        if expr.op in ("+", "-"):
            lhs = linearize(expr.lhs)
            rhs = linearize(expr.rhs)
            if lhs is None or rhs is None:
                return None
            sign = 1 if expr.op == "+" else -1
            coeffs = dict(lhs[0])
            for v, c in rhs[0].items():
                coeffs[v] = coeffs.get(v, 0) + sign * c
            return coeffs, lhs[1] + sign * rhs[1]
        if expr.op == "*":
            lhs = linearize(expr.lhs)
            rhs = linearize(expr.rhs)
            if lhs is None or rhs is None:
                return None
            for (ca, ka), (cb, kb) in ((lhs, rhs), (rhs, lhs)):
                if not ca:  # constant * affine
                    return {v: ka * c for v, c in cb.items()}, ka * kb
            return None
    return None


def condition_constraints(expr: Expr, positive: bool = True) -> list | None:
    """Affine constraints implied by the (non-)satisfaction of a condition.
    Returns a list of (coeffs, const, is_eq) or None when nothing affine can
    be said.  Negation of a strict comparison uses the integer tightening."""
    expr = strip_casts(expr)
    if isinstance(expr, Unary) and expr.op == "!":
        return condition_constraints(expr.operand, not positive)
    if isinstance(expr, IntLit):
        truth = (expr.value != 0) == positive
        return [] if truth else [({}, 1, False)]
    if isinstance(expr, Binary):
        op = expr.op
        if op == "&&":
            if positive:
                lhs = condition_constraints(expr.lhs, True)
                rhs = condition_constraints(expr.rhs, True)
                return (lhs or []) + (rhs or []) if (lhs is not None or rhs is not None) else None
            return None  # negation is a disjunction
        if op == "||":
            if not positive:
                lhs = condition_constraints(expr.lhs, False)
                rhs = condition_constraints(expr.rhs, False)
                return (lhs or []) + (rhs or []) if (lhs is not None or rhs is not None) else None
            return None
        if op in ("<", "<=", ">", ">=", "==", "!="):
            if not positive:
                flipped = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}[op]
                return condition_constraints(Binary(flipped, expr.lhs, expr.rhs, ty=expr.ty), True)
            lhs = linearize(expr.lhs)
            rhs = linearize(expr.rhs)
            if lhs is None or rhs is None:
                return None
            coeffs = dict(lhs[0])
            for v, c in rhs[0].items():
                coeffs[v] = coeffs.get(v, 0) - c
            const = lhs[1] - rhs[1]
            if op == "<":       # a - b < 0  =>  a - b + 1 <= 0 over integers
                return [(coeffs, const + 1, False)]
            if op == "<=":
                return [(coeffs, const, False)]
            if op == ">":
                return [({v: -c for v, c in coeffs.items()}, -const + 1, False)]
            if op == ">=":
                return [({v: -c for v, c in coeffs.items()}, -const, False)]
            if op == "==":
                return [(coeffs, const, True)]
            return None  # != is not convex
    if isinstance(expr, Var) and not positive:
        return [({expr.name: 1}, 0, True)]  # !v  =>  v == 0
    return None


# ------------------------------------------------------------------
# Affine transformers
# ------------------------------------------------------------------

@dataclass
class AffineTransformer:
    """Polyhedron over {v#init} | {v} relating pre-state to post-state."""

    relation: Polyhedron
    universe: tuple  # variable names framed by this transformer

    def __str__(self):
        return str(self.relation)


def identity_transformer(universe) -> AffineTransformer:
    uni = tuple(sorted(universe))
    poly = Polyhedron.of([({v: 1, init_of(v): -1}, 0, True) for v in uni])
    return AffineTransformer(poly, uni)


def _type_bounds(name: str, ty: IntType | None) -> list:
    if ty is None:
        return []
    return [({name: -1}, ty.min_value(), False),   # min <= v
            ({name: 1}, -ty.max_value(), False)]   # v <= max


def _nondet_bounds(name: str, rhs: Expr, var_ty: IntType | None) -> list:
    """Bounds for v := nondet(): the tighter of the call's and the
    variable's range when the conversion cannot wrap."""
    inner = strip_casts(rhs)
    if isinstance(inner, Nondet) and inner.ty is not None and var_ty is not None:
        if (inner.ty.min_value() >= var_ty.min_value()
                and inner.ty.max_value() <= var_ty.max_value()):
            return _type_bounds(name, inner.ty)
    return _type_bounds(name, var_ty)


def transformer_of(instr: Instr, universe, var_types: dict | None = None) -> AffineTransformer:
    """Exact transformer for affine assignments; identity on untouched
    variables; non-affine right-hand sides leave the target ranging over its
    type bounds (abstraction, not failure)."""
    uni = tuple(sorted(universe))
    var_types = var_types or {}
    frame = [({v: 1, init_of(v): -1}, 0, True) for v in uni]
    raw: list
    if instr.kind == DECL:
        raw = [c for c in frame if c[0].get(instr.var) is None]
        raw += _type_bounds(instr.var, instr.ty)
    elif instr.kind == ASSIGN:
        raw = [c for c in frame if c[0].get(instr.var) is None]
        lin = None if isinstance(strip_casts(instr.expr), Nondet) else linearize(instr.expr)
        if lin is not None:
            coeffs = {init_of(v): c for v, c in lin[0].items()}
            coeffs[instr.var] = coeffs.get(instr.var, 0) - 1
            # v = e#  =>  e# - v == 0
            raw.append((coeffs, lin[1], True))
        else:
            raw += _nondet_bounds(instr.var, instr.expr, var_types.get(instr.var))
    elif instr.kind in (ASSUME, ASSERT):
        conds = condition_constraints(instr.expr, True)
        raw = list(frame)
        if conds is not None:
            raw += [({init_of(v): c for v, c in coeffs.items()}, const, is_eq)
                    for coeffs, const, is_eq in conds]
    elif instr.kind in (SKIP, GOTO, IFGOTO, END):
        raw = list(frame)
    else:
        raise ValueError(f"no transformer for {instr.kind}")
    return AffineTransformer(Polyhedron.of(raw), uni)


def compose(t1: AffineTransformer, t2: AffineTransformer) -> AffineTransformer:
    """Relational composition: run t1 then t2."""
    uni = tuple(sorted(set(t1.universe) | set(t2.universe)))
    mid = {v: v + "#mid" for v in uni}
    first = t1.relation.rename({v: mid[v] for v in uni})
    second = t2.relation.rename({init_of(v): mid[v] for v in uni})
    merged = first.meet(second)
    result = merged.project_out(mid.values())
    return AffineTransformer(result, uni)


def apply_transformer(t: AffineTransformer, poly: Polyhedron) -> Polyhedron:
    if poly.is_bottom:
        return Polyhedron.bot()
    pre = poly.rename({v: init_of(v) for v in poly.variables() if not is_init_var(v)})
    merged = pre.meet(t.relation)
    return merged.project_out([init_of(v) for v in t.universe]
                              + [v for v in pre.variables() if is_init_var(v)])


# ------------------------------------------------------------------
# Forward propagation
# ------------------------------------------------------------------

@dataclass
class LoopInvariants:
    before: Polyhedron
    head: Polyhedron
    body_top: Polyhedron
    after: Polyhedron


@dataclass
class InvariantMap:
    at_entry: dict = field(default_factory=dict)      # instruction index -> Polyhedron
    loop_points: dict = field(default_factory=dict)   # loop_id -> LoopInvariants

    def dump(self, gp: GotoProgram) -> str:
        lines = []
        for idx in range(len(gp.instrs)):
            poly = self.at_entry.get(idx, Polyhedron.bot())
            lines.append(f"{idx:4d}: {poly}")
        for loop_id in sorted(self.loop_points):
            pts = self.loop_points[loop_id]
            lines.append(f"loop {loop_id}: before: {pts.before}")
            lines.append(f"loop {loop_id}: head:   {pts.head}")
            lines.append(f"loop {loop_id}: body:   {pts.body_top}")
            lines.append(f"loop {loop_id}: after:  {pts.after}")
        return "\n".join(lines) + "\n"


def _meet_condition(poly: Polyhedron, expr: Expr, positive: bool) -> Polyhedron:
    conds = condition_constraints(expr, positive)
    if conds is None or poly.is_bottom:
        return poly
    try:
        extra = [AffineConstraint.make(c, k, e) for c, k, e in conds]
    except Infeasible:
        return Polyhedron.bot()
    extra = [c for c in extra if c is not None]
    return poly.meet(Polyhedron(extra))


def propagate(gp: GotoProgram, loops: list[LoopInfo]) -> InvariantMap:
    """Forward fixpoint from the entry polyhedron, Kleene iteration with
    widening at loop heads after WIDENING_DELAY joins, one narrowing pass."""
    n = len(gp.instrs)
    var_types = dict(gp.declarations)
    universe = sorted(var_types)
    heads = {loop.head: loop for loop in loops}
    backjumps = {loop.backjump for loop in loops}

    transformers: dict[int, AffineTransformer] = {}
    for idx, ins in enumerate(gp.instrs):
        if ins.kind in (DECL, ASSIGN):
            transformers[idx] = transformer_of(ins, universe, var_types)

    def flow(idx: int, poly: Polyhedron) -> list[tuple[int, Polyhedron]]:
        """Successor contributions of executing instruction idx."""
        ins = gp.instrs[idx]
        if poly.is_bottom or ins.kind == END:
            return []
        if ins.kind in (DECL, ASSIGN):
            return [(idx + 1, apply_transformer(transformers[idx], poly))]
        if ins.kind in (ASSUME, ASSERT):
            return [(idx + 1, _meet_condition(poly, ins.expr, True))]
        if ins.kind == GOTO:
            return [(ins.target, poly)]
        if ins.kind == IFGOTO:
            return [(ins.target, _meet_condition(poly, ins.expr, True)),
                    (idx + 1, _meet_condition(poly, ins.expr, False))]
        return [(idx + 1, poly)]

    state: dict[int, Polyhedron] = {i: Polyhedron.bot() for i in range(n)}
    state[0] = Polyhedron.top()
    join_counts: dict[int, int] = {}

    def sweep(widen: bool) -> bool:
        changed = False
        for idx in range(n):
            for succ, contrib in flow(idx, state[idx]):
                if contrib.is_bottom:
                    continue
                current = state[succ]
                candidate = current.join(contrib)
                if not current.is_bottom and candidate.entails_all(current):
                    continue  # no growth
                if widen and succ in heads:
                    count = join_counts.get(succ, 0) + 1
                    join_counts[succ] = count
                    if count > WIDENING_DELAY and not current.is_bottom:
                        candidate = current.widen(candidate)
                        if candidate.entails_all(current) and current.entails_all(candidate):
                            continue
                state[succ] = candidate
                changed = True
        return changed

    sweeps = 0
    while sweep(widen=True):
        sweeps += 1
        if sweeps > MAX_SWEEPS:
            log.warning("invariant propagation did not stabilise; widening to current state")
            break

    # one narrowing pass: a single application of the transfer function to
    # the widened post-fixpoint, met with it to stay decreasing
    acc: dict[int, Polyhedron] = {i: Polyhedron.bot() for i in range(n)}
    acc[0] = Polyhedron.top()
    for idx in range(n):
        for succ, contrib in flow(idx, state[idx]):
            if not contrib.is_bottom:
                acc[succ] = acc[succ].join(contrib)
    for idx in range(1, n):
        state[idx] = acc[idx].meet(state[idx]) if not acc[idx].is_bottom else Polyhedron.bot()

    invs = InvariantMap(at_entry=dict(state))
    for loop in loops:
        head_poly = state[loop.head]
        before = Polyhedron.bot()
        for idx in range(n):
            if idx in backjumps:
                continue
            for succ, contrib in flow(idx, state[idx]):
                if succ == loop.head and not contrib.is_bottom:
                    before = before.join(contrib)
        body_top = state.get(loop.head + 1, Polyhedron.bot())
        after = _meet_condition(head_poly, gp.instrs[loop.head].expr, True)
        # mathematically redundant constraints are kept: under wrap-around
        # semantics they are not redundant and help the validation gate
        invs.loop_points[loop.loop_id] = LoopInvariants(
            before=before.promote_equalities(),
            head=head_poly.promote_equalities(),
            body_top=body_top.promote_equalities(),
            after=after.promote_equalities())
    return invs


# ------------------------------------------------------------------
# Constraint -> expression
# ------------------------------------------------------------------

def constraint_to_expr(c: AffineConstraint, var_types: dict,
                       widths: WidthConfig) -> Expr | None:
    """Rewrite a constraint into the expression grammar: positive terms on
    the left, negated negative terms and the constant on the right, every
    variable cast to the wide signed type.  Evaluation can still wrap for
    extreme coefficient/width combinations; the bit-precise validation gate
    drops any candidate whose expression form is not actually invariant.
    Returns None for #init forms, unknown variables, or variables whose
    values do not fit the wide type."""
    wide = IntType(widths.long_width, True)
    for v, _k in c.coeffs:
        if is_init_var(v) or v not in var_types:
            return None
        ty = var_types[v]
        if ty.min_value() < wide.min_value() or ty.max_value() > wide.max_value():
            return None
    if not (wide.smin <= c.const <= wide.smax):
        return None

    def term(v: str, k: int) -> Expr:
        var = Var(v, ty=var_types[v])
        castv: Expr = var if var_types[v] == wide else Cast(ty=wide, operand=var)
        if k == 1:
            return castv
        return Binary("*", IntLit(k, ty=wide), castv, ty=wide)

    def tsum(terms: list[Expr], const: int) -> Expr:
        if not terms:
            return IntLit(const, ty=wide)
        acc = terms[0]
        for t in terms[1:]:
            acc = Binary("+", acc, t, ty=wide)
        if const > 0:
            acc = Binary("+", acc, IntLit(const, ty=wide), ty=wide)
        elif const < 0:
            acc = Binary("-", acc, IntLit(-const, ty=wide), ty=wide)
        return acc

    # positive side keeps the constant when positive: 2j - 5t + 1 <= 0
    # renders as 2*j + 1 <= 5*t ... except the figure style subtracts on
    # the right, so the constant always moves right: 2*j <= 5*t - 1
    lhs_terms = [term(v, k) for v, k in c.coeffs if k > 0]
    rhs_terms = [term(v, -k) for v, k in c.coeffs if k < 0]
    if lhs_terms:
        lhs = tsum(lhs_terms, 0)
        rhs = tsum(rhs_terms, -c.const)
    else:
        lhs = tsum([], c.const)
        rhs = tsum(rhs_terms, 0)
    op = "==" if c.is_eq else "<="
    booly = IntType(widths.int_width, True)
    return Binary(op, lhs, rhs, ty=booly)


def conjoin(exprs: list[Expr], widths: WidthConfig) -> Expr | None:
    if not exprs:
        return None
    acc = exprs[0]
    for e in exprs[1:]:
        acc = Binary("&&", acc, e, ty=IntType(widths.int_width, True))
    return acc


@dataclass
class LoopCandidates:
    """Instrumentable constraints per loop point (no #init forms)."""

    before: list
    head: list
    after: list


def collect_candidates(gp: GotoProgram, loops: list[LoopInfo],
                       invs: InvariantMap) -> dict:
    """Pick the instrumentable constraint lists for every loop.  The body-top
    assume reuses the head candidates (they hold at the head, hence at the
    body top); the guard itself is already part of the path condition."""
    var_types = dict(gp.declarations)
    out = {}
    for loop in loops:
        pts = invs.loop_points.get(loop.loop_id)
        if pts is None:
            continue

        def usable(poly: Polyhedron) -> list:
            if poly.is_bottom or poly.is_top:
                return []
            keep = []
            for c in poly.constraints:
                if any(is_init_var(v) or v not in var_types for v in c.variables()):
                    continue
                keep.append(c)
            return keep

        out[loop.loop_id] = LoopCandidates(
            before=usable(pts.before), head=usable(pts.body_top), after=usable(pts.after))
    return out


# ------------------------------------------------------------------
# Instrumentation
# ------------------------------------------------------------------

def _insert(instrs: list[Instr], pos: int, new: Instr, land_on_new: set) -> None:
    """Insert `new` at `pos`.  Jumps whose index is in `land_on_new` keep a
    target == pos (they execute the new instruction); every other target
    >= pos shifts by one."""
    for idx, ins in enumerate(instrs):
        if ins.kind in (GOTO, IFGOTO) and ins.target >= pos:
            if ins.target == pos and idx in land_on_new:
                continue
            ins.target += 1
    instrs.insert(pos, new)


def instrument(gp: GotoProgram, invs: InvariantMap,
               candidates: dict | None = None) -> GotoProgram:
    """Insert invariant assumes before each loop, at the top of its body and
    immediately after it.  `candidates` (from collect_candidates, possibly
    filtered by validate_invariants) defaults to everything instrumentable."""
    loops = goto_ir.analyze_loops(gp)
    if candidates is None:
        candidates = collect_candidates(gp, loops, invs)
    var_types = dict(gp.declarations)
    widths = gp.widths
    out = GotoProgram(instrs=[ins.clone() for ins in gp.instrs], widths=widths,
                      declarations=list(gp.declarations))

    # innermost-last positions first so earlier loop heads stay valid; loop
    # positions are re-derived before every insertion because each insert
    # shifts everything behind it
    for loop in sorted(loops, key=lambda l: l.head, reverse=True):
        cands = candidates.get(loop.loop_id)
        if cands is None:
            continue

        def make_assume(constraints, where) -> Instr | None:
            exprs = []
            for c in constraints:
                expr = constraint_to_expr(c, var_types, widths)
                if expr is not None:
                    exprs.append(expr)
            cond = conjoin(exprs, widths)
            if cond is None:
                return None
            return Instr(ASSUME, expr=cond, role=f"invariant-{where}", loop_id=loop.loop_id)

        def current() -> LoopInfo:
            return next(l for l in goto_ir.analyze_loops(out)
                        if l.loop_id == loop.loop_id)

        after = make_assume(cands.after, "exit")
        if after is not None:
            this = current()
            _insert(out.instrs, out.instrs[this.head].target, after,
                    land_on_new={this.head})
        body = make_assume(cands.head, "head")
        if body is not None:
            _insert(out.instrs, current().head + 1, body, land_on_new=set())
        before = make_assume(cands.before, "entry")
        if before is not None:
            this = current()
            land = {idx for idx, ins in enumerate(out.instrs)
                    if ins.kind in (GOTO, IFGOTO) and ins.target == this.head
                    and idx != this.backjump}
            _insert(out.instrs, this.head, before, land_on_new=land)
    return out


# ------------------------------------------------------------------
# Validation program (loop-free) for the inductive soundness gate
# ------------------------------------------------------------------

@dataclass
class Obligation:
    loop_id: int
    point: str        # 'before' | 'head-init' | 'head-step' | 'after'
    index: int        # position in that point's candidate list


def build_validation_program(gp: GotoProgram, loops: list[LoopInfo],
                             candidates: dict) -> tuple[GotoProgram, list[Obligation]]:
    """Loop-free program whose assertions hold iff every candidate is a
    bit-precise inductive invariant.  Each loop is replaced by

        assert(before); assert(head);            -- initiation
        havoc(modified vars); assume(head);
        if (c) { body'; assert(head); assume(0); } -- preservation
        assume(!c); assert(after); assume(after);  -- exit entailment

    so the candidates strengthen downstream checks exactly as the
    instrumented assumes would.
    """
    var_types = dict(gp.declarations)
    widths = gp.widths
    obligations: list[Obligation] = []
    out: list[Instr] = []
    label_fix: list[tuple[int, int]] = []  # (new position, original target)
    index_map: dict[int, int] = {}         # original index -> new index
    loop_at_head = {loop.head: loop for loop in loops}
    int_ty = IntType(widths.int_width, True)

    def exprs_of(loop_id: int, point: str) -> list[tuple[int, Expr]]:
        cands = candidates.get(loop_id)
        if cands is None:
            return []
        lst = {"before": cands.before, "head": cands.head, "after": cands.after}[point]
        pairs = []
        for i, c in enumerate(lst):
            expr = constraint_to_expr(c, var_types, widths)
            if expr is not None:
                pairs.append((i, expr))
        return pairs

    def emit_asserts(loop_id: int, point: str, tag: str):
        for i, expr in exprs_of(loop_id, point):
            obligations.append(Obligation(loop_id, tag, i))
            out.append(Instr(ASSERT, expr=expr, role=f"validate:{tag}:{loop_id}:{i}",
                             loop_id=loop_id))

    def emit_assumes(loop_id: int, point: str, role: str):
        for _, expr in exprs_of(loop_id, point):
            out.append(Instr(ASSUME, expr=expr, role=role, loop_id=loop_id))

    def emit_region(lo: int, hi: int):
        idx = lo
        while idx < hi:
            ins = gp.instrs[idx]
            loop = loop_at_head.get(idx)
            if loop is None:
                index_map[idx] = len(out)
                clone = ins.clone()
                if clone.kind == ASSERT:
                    # aborted executions never reach later points, so the
                    # original checks act as assumes while validating
                    clone.kind = ASSUME
                    clone.role = "validate:original-assert"
                out.append(clone)
                if ins.kind in (GOTO, IFGOTO):
                    label_fix.append((len(out) - 1, ins.target))
                idx += 1
                continue
            guard = loop.guard
            index_map[idx] = len(out)
            emit_asserts(loop.loop_id, "before", "before")
            emit_asserts(loop.loop_id, "head", "head-init")
            for v in sorted(goto_ir.assigned_vars(gp, loop.head + 1, loop.backjump - 1)):
                ty = var_types.get(v)
                out.append(Instr(ASSIGN, var=v,
                                 expr=Nondet(ty=ty, signed=ty.signed if ty else False),
                                 role="validate:havoc", loop_id=loop.loop_id))
            emit_assumes(loop.loop_id, "head", "validate:assume-head")
            branch = len(out)
            out.append(Instr(IFGOTO, expr=goto_ir.negate(guard), loop_id=loop.loop_id,
                             role="validate:guard"))
            emit_region(loop.head + 1, loop.backjump)
            # body falls through (or jumps) here: the preservation check
            index_map[loop.backjump] = len(out)
            emit_asserts(loop.loop_id, "head", "head-step")
            out.append(Instr(ASSUME, expr=IntLit(0, ty=int_ty), role="validate:cut",
                             loop_id=loop.loop_id))
            out[branch].target = len(out)
            out.append(Instr(ASSUME, expr=goto_ir.negate(guard), role="validate:exit-guard",
                             loop_id=loop.loop_id))
            emit_asserts(loop.loop_id, "after", "after")
            emit_assumes(loop.loop_id, "after", "validate:assume-after")
            idx = loop.backjump + 1

    emit_region(0, len(gp.instrs))
    for pos, orig_target in label_fix:
        if orig_target not in index_map:
            raise ValueError("validation rebuild lost a jump target")
        out[pos].target = index_map[orig_target]
    vgp = GotoProgram(instrs=out, widths=widths, declarations=list(gp.declarations))
    return vgp, obligations


def validate_invariants(gp: GotoProgram, loops: list[LoopInfo], invs: InvariantMap,
                        solve, candidates: dict | None = None,
                        max_rounds: int = 32) -> dict:
    """Keep only candidates the solver proves inductive under the real
    fixed-width semantics: each round checks initiation, preservation by one
    body iteration, and exit entailment for every remaining candidate
    simultaneously (candidates may support each other); failing conjuncts
    are dropped and the check repeats.  A solver timeout or error drops all
    remaining candidates (conservative)."""
    from .kind_transform import LoopFreeProgram
    from .vcgen import build_vc, simplify_assumes, to_ssa

    if candidates is None:
        candidates = collect_candidates(gp, loops, invs)
    for _ in range(max_rounds):
        vgp, obligations = build_validation_program(gp, loops, candidates)
        if not obligations:
            break
        lfp = LoopFreeProgram(program=vgp, phase="validate", k=0)
        vc = build_vc(simplify_assumes(to_ssa(lfp)))
        verdict = solve(vc)
        if verdict.is_unsat:
            return candidates
        if verdict.is_sat:
            from .solver import eval_nodes
            values = eval_nodes(vc, [impl for _, impl in vc.obligations], verdict.model)
            failed = []
            for (ob, _), value in zip(vc.obligations, values):
                if value or not ob.kind.startswith("validate:"):
                    continue
                _, tag, loop_id, index = ob.kind.split(":")
                failed.append(Obligation(int(loop_id), tag, int(index)))
            if failed and drop_failed(candidates, failed):
                continue
        # unknown, or a model that names no candidate: drop everything
        log.warning("invariant validation inconclusive (%s); dropping candidates",
                    verdict.reason or verdict.status)
        return {lid: LoopCandidates([], [], []) for lid in candidates}
    return candidates


def drop_failed(candidates: dict, failed: list[Obligation]) -> bool:
    """Remove candidates named by failed obligations; head failures remove
    the head candidate, aligning 'head-init' and 'head-step'. Returns True
    when anything was removed."""
    removed = False
    by_loop: dict[int, set] = {}
    for ob in failed:
        point = "head" if ob.point in ("head-init", "head-step") else ob.point
        by_loop.setdefault(ob.loop_id, set()).add((point, ob.index))
    for loop_id, victims in by_loop.items():
        cands = candidates.get(loop_id)
        if cands is None:
            continue
        for point in ("before", "head", "after"):
            lst = getattr(cands, point)
            keep = [c for i, c in enumerate(lst) if (point, i) not in victims]
            if len(keep) != len(lst):
                setattr(cands, point, keep)
                removed = True
    return removed
