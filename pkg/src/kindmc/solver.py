"""VC discharge: an external SMT-LIB2 solver process and the internal
exhaustive enumerator used as the desk-scale oracle.

The external interface is SMT-LIB2 v2.6 over the solver's stdin/stdout,
one process per query (no incremental sessions).  The command comes from
the --solver-cmd flag, the KINDMC_SOLVER environment variable, a native z3
on PATH, or the bundled node wrapper around the z3 WebAssembly build (see
tools/).  A `{file}` placeholder in the template is substituted with the
path of a temp file holding the script; otherwise the script is piped in.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import _evalpy, evalkernel
from .vcgen import BOOL, Node, Vc

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


@dataclass
class SolverVerdict:
    status: str                      # sat | unsat | unknown
    model: dict = field(default_factory=dict)   # symbol name -> unsigned value
    reason: str = ""                 # timeout | solver-error | resource

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    @property
    def is_unsat(self) -> bool:
        return self.status == UNSAT


@dataclass
class SolverConfig:
    command: str | None = None       # template; None = resolve a default
    timeout: float = 60.0            # seconds per query
    logic: str = "QF_BV"
    enum_cap_bits: int = 24          # refuse searches beyond 2^24 assignments

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


def default_solver_command() -> str | None:
    env = os.environ.get("KINDMC_SOLVER")
    if env:
        return env
    if shutil.which("z3"):
        return "z3 -in"
    wrapper = Path(__file__).resolve().parents[2] / "tools" / "z3smt2.mjs"
    if (wrapper.exists() and shutil.which("node")
            and (wrapper.parent / "node_modules" / "z3-solver").exists()):
        return f"node {wrapper}"
    return None


# ------------------------------------------------------------------
# SMT-LIB2 emission
# ------------------------------------------------------------------

_SMT_OPS = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul", "udiv": "bvudiv",
    "sdiv": "bvsdiv", "urem": "bvurem", "srem": "bvsrem", "neg": "bvneg",
    "eq": "=", "ult": "bvult", "ule": "bvule", "slt": "bvslt", "sle": "bvsle",
    "and": "and", "or": "or", "not": "not", "ite": "ite",
}


def _sort(width: int) -> str:
    return "Bool" if width == BOOL else f"(_ BitVec {width})"


def emit_smtlib(vc: Vc, want_model: bool = True) -> str:
    """Deterministic QF_BV script: declarations, one assert of the query,
    check-sat, and get-model on demand.  Byte-stable for a given VC."""
    lines = [f"; vc phase={vc.phase} k={vc.k}", f"(set-logic {SolverConfig().logic})"]
    if want_model:
        lines.insert(1, "(set-option :produce-models true)")
    order: list[Node] = []
    seen: set[int] = set()
    stack: list = [(vc.query, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for arg in reversed(node.args):
            if id(arg) not in seen:
                stack.append((arg, False))
    names: dict[int, str] = {}
    for sym in vc.free_syms:
        names[id(sym)] = sym.name
        lines.append(f"(declare-fun {sym.name} () {_sort(sym.width)})")

    def ref(node: Node) -> str:
        if node.op == "const":
            if node.width == BOOL:
                return "true" if node.value else "false"
            return f"(_ bv{node.value} {node.width})"
        return names[id(node)]

    counter = 0
    for node in order:
        if node.op in ("const", "sym"):
            if node.op == "sym" and id(node) not in names:
                names[id(node)] = node.name
                lines.append(f"(declare-fun {node.name} () {_sort(node.width)})")
            continue
        counter += 1
        name = f".t{counter}"
        args = " ".join(ref(a) for a in node.args)
        if node.op == "zext":
            body = f"((_ zero_extend {node.width - node.args[0].width}) {args})"
        elif node.op == "sext":
            body = f"((_ sign_extend {node.width - node.args[0].width}) {args})"
        elif node.op == "trunc":
            body = f"((_ extract {node.width - 1} 0) {args})"
        else:
            body = f"({_SMT_OPS[node.op]} {args})"
        lines.append(f"(define-fun {name} () {_sort(node.width)} {body})")
        names[id(node)] = name
    lines.append(f"(assert {ref(vc.query)})")
    lines.append("(check-sat)")
    if want_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------
# Model parsing (s-expressions)
# ------------------------------------------------------------------

def _sexpr_tokens(text: str):
    token = []
    for ch in text:
        if ch in "()":
            if token:
                yield "".join(token)
                token = []
            yield ch
        elif ch.isspace():
            if token:
                yield "".join(token)
                token = []
        else:
            token.append(ch)
    if token:
        yield "".join(token)


def _parse_sexprs(text: str) -> list:
    stack: list = [[]]
    for tok in _sexpr_tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                return []  # unbalanced; treat as no model
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    return stack[0]


def _bv_value(term) -> int | None:
    if isinstance(term, str):
        if term.startswith("#x"):
            return int(term[2:], 16)
        if term.startswith("#b"):
            return int(term[2:], 2)
        if term == "true":
            return 1
        if term == "false":
            return 0
    elif isinstance(term, list) and len(term) == 3 and term[0] == "_" \
            and isinstance(term[1], str) and term[1].startswith("bv"):
        return int(term[1][2:])
    return None


def parse_model(text: str) -> dict:
    model: dict = {}
    for top in _parse_sexprs(text):
        items = top if isinstance(top, list) else [top]
        if items and items[0] == "model":
            items = items[1:]
        for entry in items:
            if (isinstance(entry, list) and len(entry) >= 5 and entry[0] == "define-fun"
                    and isinstance(entry[1], str)):
                value = _bv_value(entry[-1])
                if value is not None:
                    model[entry[1]] = value
    return model


# ------------------------------------------------------------------
# External solver process
# ------------------------------------------------------------------

def run_solver_text(script: str, cfg: SolverConfig) -> tuple[str, str]:
    """Run one solver process on an SMT-LIB2 script; returns (status, raw
    stdout).  Kills the process at the timeout."""
    command = cfg.command or default_solver_command()
    if not command:
        raise RuntimeError("no SMT solver available; pass --solver-cmd or set KINDMC_SOLVER")
    argv = shlex.split(command)
    tmp_path = None
    try:
        if any("{file}" in a for a in argv):
            fd, tmp_path = tempfile.mkstemp(suffix=".smt2")
            with os.fdopen(fd, "w") as handle:
                handle.write(script)
            argv = [a.replace("{file}", tmp_path) for a in argv]
            stdin = None
        else:
            stdin = script
        try:
            proc = subprocess.run(argv, input=stdin, capture_output=True,
                                  text=True, timeout=cfg.timeout)
        except subprocess.TimeoutExpired:
            return "timeout", ""
        except OSError as exc:
            return "error", str(exc)
        out = proc.stdout
        lines = out.splitlines()
        for idx, line in enumerate(lines):
            line = line.strip()
            if line in (SAT, UNSAT, UNKNOWN):
                return line, "\n".join(lines[idx + 1:])
        return "error", out + proc.stderr
    finally:
        if tmp_path:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass


def check(vc: Vc, cfg: SolverConfig, want_model: bool = True) -> SolverVerdict:
    """Discharge a VC with the external solver process."""
    script = emit_smtlib(vc, want_model=want_model)
    status, out = run_solver_text(script, cfg)
    if status == SAT:
        model = parse_model(out) if want_model else {}
        full = {sym.name: model.get(sym.name, 0) for sym in vc.free_syms}
        return SolverVerdict(SAT, model=full)
    if status == UNSAT:
        return SolverVerdict(UNSAT)
    if status == UNKNOWN:
        return SolverVerdict(UNKNOWN, reason="solver-unknown")
    if status == "timeout":
        return SolverVerdict(UNKNOWN, reason="timeout")
    return SolverVerdict(UNKNOWN, reason="solver-error")


# ------------------------------------------------------------------
# Exhaustive enumerator (oracle)
# ------------------------------------------------------------------

def enumerate_vc(vc: Vc, width: int, cap_bits: int = 24,
                 compiled: bool | None = None) -> SolverVerdict:
    """Exhaustively evaluate the query.  Each free symbol ranges over its
    declared width, capped at `width` bits (symbols are re-typed down when
    wider, so the result is authoritative only when every symbol's declared
    width is at most `width`).  Search spaces beyond 2^cap_bits assignments
    are refused with Unknown(resource)."""
    program = _evalpy.compile_nodes([vc.query])
    decl_order = {id(sym): i for i, sym in enumerate(vc.free_syms)}
    reachable = sorted(program.inputs, key=lambda item: decl_order[id(item[2])])
    inputs = [(slot, min(w, width)) for slot, w, _ in reachable]
    if sum(w for _, w in inputs) > cap_bits:
        return SolverVerdict(UNKNOWN, reason="resource")
    hit = evalkernel.enumerate_assignments(program, program.out_slots[0],
                                           inputs=inputs, compiled=compiled)
    if hit is None:
        return SolverVerdict(UNSAT)
    model = {sym.name: 0 for sym in vc.free_syms}
    for (slot, _w), value in zip(inputs, hit):
        for pslot, _pw, sym in program.inputs:
            if pslot == slot:
                model[sym.name] = value
    return SolverVerdict(SAT, model=model)


def eval_nodes(vc: Vc, nodes: list, model: dict) -> list[int]:
    """Evaluate arbitrary nodes of this VC's pool under a model."""
    program = _evalpy.compile_nodes(nodes)
    values = []
    for slot, w, sym in program.inputs:
        values.append(model.get(sym.name, 0) & _evalpy.mask(w))
    return _evalpy.run_once(program, values)


def model_satisfies_query(vc: Vc, model: dict) -> bool:
    return bool(eval_nodes(vc, [vc.query], model)[0])
