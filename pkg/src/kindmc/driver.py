"""The k-induction driver and the plain-BMC baseline.

Per step: the base case searches for a counterexample within k unwindings
(Sat means a real bug, reported with a replayable trace); then k increases
and the forward condition tries to prove the loops fully unrolled and the
property valid in all reachable states; then the inductive step tries to
prove the property preserved by one more arbitrary iteration.  Queries are
issued strictly in that order: base(k), forward(k+1), inductive(k+1),
base(k+1), ...  A phase that comes back unknown (timeout) is treated as
inconclusive and the search continues with the next k.

Plain BMC uses the forward-condition program instead: an Unsat unwinding
assertion proves the program, a model violating a property assert is a
bug, and a model violating only the unwinding assertion bumps k.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import invgen, solver
from .frontend import SourceError, WidthConfig, parse_and_check
from .goto_ir import GotoProgram, analyze_loops, lower
from .interp import KeyedFeed, run_ast
from .kind_transform import (make_base_case, make_forward_condition,
                             make_inductive_step)
from .solver import SolverConfig, SolverVerdict
from .vcgen import Node, SsaProgram, Vc, build_vc, simplify_assumes, to_ssa

TRUE = "true"
FALSE = "false"
UNKNOWN = "unknown"


class InternalCheckError(RuntimeError):
    """A soundness tripwire fired (for example, a counterexample trace that
    does not replay on the reference interpreter)."""


@dataclass
class VerifyOptions:
    mode: str = "kind-inv"           # kind-inv | kind | bmc
    max_k: int = 100
    widths: WidthConfig = field(default_factory=WidthConfig)
    solver_cmd: str | None = None    # external solver template
    oracle_width: int = 0            # > 0: discharge VCs with the enumerator
    timeout: float = 900.0           # wall-clock budget for the whole task
    enum_cap_bits: int = 24

    def __post_init__(self):
        if self.max_k < 1:
            raise ValueError("max_k must be at least 1")
        if self.mode not in ("kind-inv", "kind", "bmc"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class TraceState:
    loop_id: int                     # -1 for the pre-loop state of a task
    iteration: int                   # 0 = state on loop entry
    values: dict                     # variable -> signed value


@dataclass
class Counterexample:
    states: list                     # TraceState, execution order
    violated: object                 # source Loc of the failed assert
    model: dict                      # free symbol -> raw value
    feed: dict                       # replay feed for the interpreter


@dataclass
class Outcome:
    verdict: str
    phase: str = "none"              # base | forward | inductive | none
    k_final: int = 0
    counterexample: Counterexample | None = None
    timings: dict = field(default_factory=dict)   # phase -> seconds
    query_log: list = field(default_factory=list)  # (phase, k, status)
    reason: str = ""
    vacuous: bool = False
    invariants_used: bool = False


class _Budget:
    def __init__(self, total: float):
        self.total = total
        self.start = time.monotonic()

    @property
    def remaining(self) -> float:
        return self.total - (time.monotonic() - self.start)

    def exhausted(self) -> bool:
        return self.remaining <= 0


class _Session:
    """One verification task: pipeline state plus solver accounting."""

    def __init__(self, text: str, opts: VerifyOptions):
        self.opts = opts
        self.budget = _Budget(opts.timeout)
        self.ast = parse_and_check(text, opts.widths)
        self.gp: GotoProgram = lower(self.ast, opts.widths)
        self.loops = analyze_loops(self.gp)
        self.query_log: list = []
        self.timings: dict = {}
        self.invariants_used = False

    def per_query_timeout(self, k: int) -> float:
        remaining_k = max(self.opts.max_k - k + 1, 1)
        share = self.budget.total / (3 * remaining_k)
        return max(min(share, max(self.budget.remaining, 0.1)), 5.0)

    def solve(self, vc: Vc, phase: str, k: int) -> SolverVerdict:
        t0 = time.monotonic()
        if self.opts.oracle_width:
            verdict = solver.enumerate_vc(vc, self.opts.oracle_width,
                                          cap_bits=self.opts.enum_cap_bits)
        else:
            cfg = SolverConfig(command=self.opts.solver_cmd,
                               timeout=self.per_query_timeout(k))
            verdict = solver.check(vc, cfg)
        self.timings[phase] = self.timings.get(phase, 0.0) + (time.monotonic() - t0)
        self.query_log.append((phase, k, verdict.status))
        return verdict

    def instrument_invariants(self) -> None:
        if not self.loops:
            return
        invs = invgen.propagate(self.gp, self.loops)
        candidates = invgen.validate_invariants(
            self.gp, self.loops, invs,
            solve=lambda vc: self.solve(vc, "validate", 1))
        self.gp = invgen.instrument(self.gp, invs, candidates)
        self.loops = analyze_loops(self.gp)
        self.invariants_used = True

    def phase_vc(self, maker, k: int) -> tuple[Vc, SsaProgram]:
        ssa = simplify_assumes(to_ssa(maker(self.gp, k)))
        return build_vc(ssa), ssa

    def outcome(self, verdict: str, **kw) -> Outcome:
        return Outcome(verdict=verdict, timings=dict(self.timings),
                       query_log=list(self.query_log),
                       invariants_used=self.invariants_used, **kw)


def verify(text: str, opts: VerifyOptions | None = None) -> Outcome:
    """The k-induction driver loop."""
    opts = opts or VerifyOptions()
    session = _Session(text, opts)
    if opts.mode == "bmc":
        return _run_bmc(session)
    if opts.mode == "kind-inv":
        session.instrument_invariants()
        if session.budget.exhausted():
            return session.outcome(UNKNOWN, reason="timeout", k_final=1)

    # Queries follow the driver figure literally: base(k), then k
    # increments, then forward(k) and inductive(k).  The reported k_final
    # is the round's base-case depth, "the k reached".
    k = 1
    while k <= opts.max_k:
        round_k = k
        if session.budget.exhausted():
            return session.outcome(UNKNOWN, reason="timeout", k_final=round_k)
        vc, ssa = session.phase_vc(make_base_case, k)
        verdict = session.solve(vc, "base", k)
        if verdict.is_sat:
            cex = reconstruct_trace(verdict.model, ssa, session.ast, vc)
            return session.outcome(FALSE, phase="base", k_final=round_k,
                                   counterexample=cex)
        k += 1
        if session.budget.exhausted():
            return session.outcome(UNKNOWN, reason="timeout", k_final=round_k)
        vc, _ = session.phase_vc(make_forward_condition, k)
        verdict = session.solve(vc, "forward", k)
        if verdict.is_unsat:
            return session.outcome(TRUE, phase="forward", k_final=round_k,
                                   vacuous=vc.vacuous)
        if session.budget.exhausted():
            return session.outcome(UNKNOWN, reason="timeout", k_final=round_k)
        vc, _ = session.phase_vc(make_inductive_step, k)
        verdict = session.solve(vc, "inductive", k)
        if verdict.is_unsat:
            return session.outcome(TRUE, phase="inductive", k_final=round_k,
                                   vacuous=vc.vacuous)
    reason = "timeout" if any(s == "unknown" for _, _, s in session.query_log) else "max-k"
    return session.outcome(UNKNOWN, reason=reason, k_final=opts.max_k)


def verify_bmc(text: str, opts: VerifyOptions | None = None) -> Outcome:
    opts = opts or VerifyOptions(mode="bmc")
    session = _Session(text, opts)
    return _run_bmc(session)


def _run_bmc(session: _Session) -> Outcome:
    opts = session.opts
    for k in range(1, opts.max_k + 1):
        if session.budget.exhausted():
            return session.outcome(UNKNOWN, reason="timeout", k_final=k)
        vc, ssa = session.phase_vc(make_forward_condition, k)
        verdict = session.solve(vc, "bmc", k)
        if verdict.is_unsat:
            return session.outcome(TRUE, phase="forward", k_final=k, vacuous=vc.vacuous)
        if verdict.is_sat:
            values = solver.eval_nodes(vc, [impl for _, impl in vc.obligations],
                                       verdict.model)
            property_hit = any(ob.kind == "property" and not value
                               for (ob, _), value in zip(vc.obligations, values))
            if property_hit:
                cex = reconstruct_trace(verdict.model, ssa, session.ast, vc)
                return session.outcome(FALSE, phase="base", k_final=k,
                                       counterexample=cex)
        # unknown or only the unwinding assertion violated: deepen
    reason = "timeout" if any(s == "unknown" for _, _, s in session.query_log) else "max-k"
    return session.outcome(UNKNOWN, reason=reason, k_final=opts.max_k)


# ------------------------------------------------------------------
# Counterexample reconstruction and replay
# ------------------------------------------------------------------

def _signed_env(env_values: dict, var_types: dict) -> dict:
    out = {}
    for var, raw in env_values.items():
        ty = var_types.get(var)
        if ty is None or "$" in var:
            continue  # internal bookkeeping variables stay hidden
        value = raw & ty.umax
        if ty.signed and value > ty.smax:
            value -= 1 << ty.width
        out[var] = value
    return out


def reconstruct_trace(model: dict, ssa: SsaProgram, ast, vc: Vc) -> Counterexample:
    """Map SSA versions back to per-iteration valuations s[0..k] and replay
    them on the reference interpreter; a mismatch raises
    InternalCheckError (soundness bug tripwire)."""
    var_types = ssa.var_types
    nodes: list = []
    index: dict[int, int] = {}

    def want(node) -> int:
        if id(node) not in index:
            index[id(node)] = len(nodes)
            nodes.append(node)
        return index[id(node)]

    for snap in ssa.snapshots:
        want(snap.reach_guard)
        want(snap.taken_guard)
        for node in snap.env.values():
            if isinstance(node, Node):
                want(node)
    for node in ssa.final_env.values():
        if isinstance(node, Node):
            want(node)
    violated_obs = []
    for ob, impl in vc.obligations:
        if ob.kind == "property":
            violated_obs.append((ob, want(impl)))
    values = solver.eval_nodes(vc, nodes, model) if nodes else []

    def value_of(node) -> int:
        return values[index[id(node)]]

    violated = None
    for ob, slot in violated_obs:
        if not values[slot]:
            violated = ob
            break
    if violated is None:
        raise InternalCheckError("sat model violates no property assert")

    states: list[TraceState] = []
    taken_counts: dict = {}
    for snap in ssa.snapshots:
        if not value_of(snap.reach_guard):
            continue
        env_values = {var: value_of(node) for var, node in snap.env.items()
                      if isinstance(node, Node)}
        if snap.copy >= 1:
            key = (snap.loop_id, snap.path[:-1])
            if value_of(snap.taken_guard):
                taken_counts[key] = taken_counts.get(key, 0) + 1
            iteration = snap.copy - 1
        else:
            # loop exit: only adds a state when every copy ran (otherwise
            # the last reached guard already recorded this state)
            key = (snap.loop_id, snap.path)
            iteration = taken_counts.get(key, 0)
            if iteration < ssa.k:
                continue
        states.append(TraceState(loop_id=snap.loop_id, iteration=iteration,
                                 values=_signed_env(env_values, var_types)))
    if not states:
        # violation before any loop: a single state at the failure point
        env_values = {var: value_of(node) for var, node in ssa.final_env.items()
                      if isinstance(node, Node)}
        states.append(TraceState(loop_id=-1, iteration=0,
                                 values=_signed_env(env_values, var_types)))

    feed = {}
    for sym in ssa.free_syms:
        kind = sym.key[2][0] if isinstance(sym.key[2], tuple) else None
        origin = sym.key[2]
        raw = model.get(sym.name, 0)
        if kind == "site":
            _, site, path = origin
            itervec = tuple(copy - 1 for _, copy in path)
            feed[("site", site, itervec)] = raw
        elif kind == "init":
            feed[("init", origin[1])] = raw
    result = run_ast(ast, KeyedFeed(feed))
    if result.status != "assert":
        raise InternalCheckError("counterexample does not replay to a violation")
    if (result.violation.line, result.violation.col) != (violated.loc.line, violated.loc.col):
        raise InternalCheckError("counterexample replays to a different assert")
    return Counterexample(states=states, violated=violated.loc, model=dict(model),
                          feed=feed)


def format_counterexample(cex: Counterexample) -> str:
    lines = ["counterexample trace:"]
    for state in cex.states:
        where = "entry" if state.loop_id < 0 else f"loop {state.loop_id} s[{state.iteration}]"
        vals = ", ".join(f"{k} = {v}" for k, v in sorted(state.values.items()))
        lines.append(f"  {where}: {vals}")
    lines.append(f"  violated assert at line {cex.violated.line}, column {cex.violated.col}")
    return "\n".join(lines)
