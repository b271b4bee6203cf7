"""Pure-Python evaluation kernel for VC formulas.

Values are unsigned bit patterns.  Division follows the SMT-LIB bit-vector
conventions for zero divisors (the VC builder guards every division with a
fresh nondet anyway, so those cases are unobservable in queries).

The bytecode layout, shared with the compiled kernel, is a flat int64 array
with stride 6:  [op, dst, a, b, c, w]  where w is the result width for
arithmetic, the operand width for comparisons, and the source width for
sign extension (stored in c for sext/trunc).
"""

from __future__ import annotations

from array import array

OPS = {name: code for code, name in enumerate(
    ["add", "sub", "mul", "udiv", "sdiv", "urem", "srem", "neg",
     "eq", "ult", "ule", "slt", "sle",
     "and", "or", "not", "ite", "zext", "sext", "trunc"])}

HAVE_COMPILED = False  # this module is the fallback


def mask(width: int) -> int:
    return (1 << width) - 1


def to_signed(value: int, width: int) -> int:
    if value >= (1 << (width - 1)):
        value -= 1 << width
    return value


def eval_op(op: str, width: int, args: list[int], argwidth: int) -> int:
    """Constant semantics of one operation on raw unsigned values."""
    if op == "add":
        return (args[0] + args[1]) & mask(width)
    if op == "sub":
        return (args[0] - args[1]) & mask(width)
    if op == "mul":
        return (args[0] * args[1]) & mask(width)
    if op == "neg":
        return (-args[0]) & mask(width)
    if op == "udiv":
        return mask(width) if args[1] == 0 else (args[0] // args[1]) & mask(width)
    if op == "urem":
        return args[0] if args[1] == 0 else (args[0] % args[1]) & mask(width)
    if op in ("sdiv", "srem"):
        a = to_signed(args[0], width)
        b = to_signed(args[1], width)
        if b == 0:
            if op == "sdiv":
                return 1 if a < 0 else mask(width)  # SMT-LIB convention
            return args[0]
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return (q if op == "sdiv" else a - b * q) & mask(width)
    if op == "eq":
        return 1 if args[0] == args[1] else 0
    if op == "ult":
        return 1 if args[0] < args[1] else 0
    if op == "ule":
        return 1 if args[0] <= args[1] else 0
    if op == "slt":
        return 1 if to_signed(args[0], argwidth) < to_signed(args[1], argwidth) else 0
    if op == "sle":
        return 1 if to_signed(args[0], argwidth) <= to_signed(args[1], argwidth) else 0
    if op == "and":
        return 1 if (args[0] and args[1]) else 0
    if op == "or":
        return 1 if (args[0] or args[1]) else 0
    if op == "not":
        return 0 if args[0] else 1
    if op == "ite":
        return args[1] if args[0] else args[2]
    if op == "zext":
        return args[0]
    if op == "sext":
        value = args[0]
        if value >= (1 << (argwidth - 1)):
            value |= mask(width) ^ mask(argwidth)
        return value
    if op == "trunc":
        return args[0] & mask(width)
    raise ValueError(f"unknown op {op!r}")


class Program:
    """Compiled formula: constant-initialised slots, input slots, bytecode."""

    __slots__ = ("code", "n_instr", "slots_init", "inputs", "out_slots", "names")

    def __init__(self, code, n_instr, slots_init, inputs, out_slots, names):
        self.code = code              # array('q'), stride 6
        self.n_instr = n_instr
        self.slots_init = slots_init  # array('Q')
        self.inputs = inputs          # list of (slot, width, sym node)
        self.out_slots = out_slots
        self.names = names            # slot -> debug name (sparse dict)


def compile_nodes(roots: list) -> Program:
    """Topologically order the DAG reachable from `roots` into bytecode."""
    order: list = []
    seen: set[int] = set()
    stack = [(r, False) for r in reversed(roots)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen and not expanded:
            continue
        if expanded:
            order.append(node)
            continue
        seen.add(id(node))
        stack.append((node, True))
        for arg in node.args:
            if id(arg) not in seen:
                stack.append((arg, False))
    slot_of: dict[int, int] = {}
    slots_init = array("Q", [0] * len(order))
    inputs = []
    code = array("q")
    names = {}
    n_instr = 0
    for node in order:
        slot = slot_of.setdefault(id(node), len(slot_of))
        if node.op == "const":
            slots_init[slot] = node.value
        elif node.op == "sym":
            inputs.append((slot, node.width, node))
            names[slot] = node.name
        else:
            a = slot_of[id(node.args[0])]
            b = slot_of[id(node.args[1])] if len(node.args) > 1 else 0
            c = slot_of[id(node.args[2])] if len(node.args) > 2 else 0
            w = node.width
            if node.op in ("eq", "ult", "ule", "slt", "sle"):
                w = node.args[0].width
            if node.op in ("sext", "trunc"):
                c = node.args[0].width
            code.extend([OPS[node.op], slot, a, b, c, w])
            n_instr += 1
    out_slots = [slot_of[id(r)] for r in roots]
    return Program(code, n_instr, slots_init, inputs, out_slots, names)


_OP_NAMES = {v: k for k, v in OPS.items()}
_OP_ITE = OPS["ite"]
_OP_SEXT = OPS["sext"]
_OP_TRUNC = OPS["trunc"]
_UNARY = {OPS["neg"], OPS["not"], OPS["zext"], OPS["sext"], OPS["trunc"]}


def _exec(code, n_instr: int, slots: list) -> None:
    for i in range(n_instr):
        base = i * 6
        op = code[base]
        a = slots[code[base + 2]]
        w = code[base + 5]
        if op == _OP_ITE:
            slots[code[base + 1]] = slots[code[base + 3]] if a else slots[code[base + 4]]
        elif op in _UNARY:
            argw = code[base + 4] if op in (_OP_SEXT, _OP_TRUNC) else w
            slots[code[base + 1]] = eval_op(_OP_NAMES[op], w, [a], argw)
        else:
            b = slots[code[base + 3]]
            slots[code[base + 1]] = eval_op(_OP_NAMES[op], w, [a, b], w)


def run_once(program: Program, values: list[int]) -> list[int]:
    """Evaluate under one input assignment; returns the root values."""
    slots = list(program.slots_init)
    for (slot, width, _), value in zip(program.inputs, values):
        slots[slot] = value & mask(width)
    _exec(program.code, program.n_instr, slots)
    return [slots[s] for s in program.out_slots]


def run_all(program: Program, out_slot: int) -> list[int] | None:
    """Enumerate all input assignments in lexicographic order (first input
    most significant); return the first assignment making the output
    nonzero, or None.  Pure-Python fallback for the compiled kernel."""
    n = len(program.inputs)
    limits = [1 << width for _, width, _ in program.inputs]
    values = [0] * n
    slots = list(program.slots_init)
    code = program.code
    n_instr = program.n_instr
    input_slots = [slot for slot, _, _ in program.inputs]
    while True:
        for idx in range(n):
            slots[input_slots[idx]] = values[idx]
        _exec(code, n_instr, slots)
        if slots[out_slot]:
            return list(values)
        pos = n - 1
        while pos >= 0:
            values[pos] += 1
            if values[pos] < limits[pos]:
                break
            values[pos] = 0
            pos -= 1
        if pos < 0:
            return None
