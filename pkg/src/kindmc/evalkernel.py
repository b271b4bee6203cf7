"""Selects the enumeration kernel at import: the compiled extension when it
was built, otherwise the pure-Python fallback with identical semantics."""

from __future__ import annotations

from . import _evalpy

try:
    from . import _evalcore  # type: ignore[attr-defined]
    HAVE_COMPILED = True
except ImportError:
    _evalcore = None
    HAVE_COMPILED = False


def enumerate_assignments(program: _evalpy.Program, out_slot: int,
                          inputs: list | None = None, compiled: bool | None = None):
    """First input assignment (lexicographic) making out_slot nonzero, else
    None.  `inputs` overrides the program's input (slot, width) order."""
    pairs = inputs if inputs is not None else [(s, w) for s, w, _ in program.inputs]
    use_compiled = HAVE_COMPILED if compiled is None else (compiled and HAVE_COMPILED)
    if use_compiled:
        return _evalcore.run_all(program.code, program.n_instr,
                                 program.slots_init, pairs, out_slot)
    if inputs is not None:
        reordered = _evalpy.Program(program.code, program.n_instr, program.slots_init,
                                    [(s, w, None) for s, w in pairs],
                                    program.out_slots, program.names)
        return _evalpy.run_all(reordered, out_slot)
    return _evalpy.run_all(program, out_slot)
