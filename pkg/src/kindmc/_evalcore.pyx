# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# Compiled enumeration kernel: same bytecode and semantics as _evalpy, with
# the odometer loop and instruction dispatch in C.  Selected at import by
# kindmc.evalkernel when the extension was built.

from libc.stdlib cimport free, malloc

HAVE_COMPILED = True

cdef inline unsigned long long _mask(long long w) nogil:
    if w >= 64:
        return <unsigned long long>0xFFFFFFFFFFFFFFFFULL
    return (<unsigned long long>1 << w) - 1

cdef inline long long _signed(unsigned long long v, long long w) nogil:
    if w >= 64:
        return <long long>v
    if v >= (<unsigned long long>1 << (w - 1)):
        return <long long>(v - (<unsigned long long>1 << w))
    return <long long>v

cdef inline unsigned long long _sdiv(unsigned long long a, unsigned long long b,
                                     long long w, bint want_rem) nogil:
    cdef long long sa = _signed(a, w)
    cdef long long sb = _signed(b, w)
    cdef long long q, qa, qb
    if sb == 0:
        if want_rem:
            return a
        if sa < 0:
            return 1
        return _mask(w)
    qa = -sa if sa < 0 else sa
    qb = -sb if sb < 0 else sb
    q = qa / qb
    if (sa < 0) != (sb < 0):
        q = -q
    if want_rem:
        return (<unsigned long long>(sa - sb * q)) & _mask(w)
    return (<unsigned long long>q) & _mask(w)

cdef int _exec(long long* code, long long n_instr, unsigned long long* slots) nogil:
    cdef long long i, base, op, w, cw
    cdef unsigned long long a, b, m, r
    for i in range(n_instr):
        base = i * 6
        op = code[base]
        a = slots[code[base + 2]]
        w = code[base + 5]
        m = _mask(w)
        if op == 0:      # add
            r = (a + slots[code[base + 3]]) & m
        elif op == 1:    # sub
            r = (a - slots[code[base + 3]]) & m
        elif op == 2:    # mul
            r = (a * slots[code[base + 3]]) & m
        elif op == 3:    # udiv
            b = slots[code[base + 3]]
            r = m if b == 0 else (a / b) & m
        elif op == 4:    # sdiv
            r = _sdiv(a, slots[code[base + 3]], w, 0)
        elif op == 5:    # urem
            b = slots[code[base + 3]]
            r = a if b == 0 else (a % b) & m
        elif op == 6:    # srem
            r = _sdiv(a, slots[code[base + 3]], w, 1)
        elif op == 7:    # neg
            r = (0 - a) & m
        elif op == 8:    # eq
            r = 1 if a == slots[code[base + 3]] else 0
        elif op == 9:    # ult
            r = 1 if a < slots[code[base + 3]] else 0
        elif op == 10:   # ule
            r = 1 if a <= slots[code[base + 3]] else 0
        elif op == 11:   # slt
            r = 1 if _signed(a, w) < _signed(slots[code[base + 3]], w) else 0
        elif op == 12:   # sle
            r = 1 if _signed(a, w) <= _signed(slots[code[base + 3]], w) else 0
        elif op == 13:   # and
            r = 1 if (a != 0 and slots[code[base + 3]] != 0) else 0
        elif op == 14:   # or
            r = 1 if (a != 0 or slots[code[base + 3]] != 0) else 0
        elif op == 15:   # not
            r = 0 if a != 0 else 1
        elif op == 16:   # ite
            r = slots[code[base + 3]] if a != 0 else slots[code[base + 4]]
        elif op == 17:   # zext
            r = a
        elif op == 18:   # sext
            cw = code[base + 4]
            r = a
            if a >= (<unsigned long long>1 << (cw - 1)):
                r = a | (m ^ _mask(cw))
        elif op == 19:   # trunc
            r = a & m
        else:
            return -1
        slots[code[base + 1]] = r
    return 0


def run_all(code_obj, long long n_instr, slots_obj, inputs, long long out_slot):
    """Enumerate all assignments to the input slots in lexicographic order;
    return the first one making slots[out_slot] nonzero, else None.

    code_obj: array('q') bytecode; slots_obj: array('Q') initial slots;
    inputs: list of (slot, width).
    """
    cdef long long[::1] code_view = code_obj
    cdef unsigned long long[::1] init_view = slots_obj
    cdef long long n_slots = init_view.shape[0]
    cdef long long n = len(inputs)
    cdef long long i, pos
    cdef bint found = False
    cdef unsigned long long* slots = <unsigned long long*>malloc(n_slots * sizeof(unsigned long long))
    cdef long long* islots = <long long*>malloc((n if n else 1) * sizeof(long long))
    cdef unsigned long long* limits = <unsigned long long*>malloc((n if n else 1) * sizeof(unsigned long long))
    cdef unsigned long long* values = <unsigned long long*>malloc((n if n else 1) * sizeof(unsigned long long))
    cdef long long* code = <long long*>malloc((n_instr * 6 if n_instr else 1) * sizeof(long long))
    if slots == NULL or islots == NULL or limits == NULL or values == NULL or code == NULL:
        free(slots); free(islots); free(limits); free(values); free(code)
        raise MemoryError()
    try:
        for i in range(n_slots):
            slots[i] = init_view[i]
        for i in range(n_instr * 6):
            code[i] = code_view[i]
        for i in range(n):
            islots[i] = inputs[i][0]
            limits[i] = <unsigned long long>1 << inputs[i][1]
            values[i] = 0
        with nogil:
            while True:
                for i in range(n):
                    slots[islots[i]] = values[i]
                _exec(code, n_instr, slots)
                if slots[out_slot] != 0:
                    found = True
                    break
                pos = n - 1
                while pos >= 0:
                    values[pos] += 1
                    if values[pos] < limits[pos]:
                        break
                    values[pos] = 0
                    pos -= 1
                if pos < 0:
                    break
        if not found:
            return None
        return [values[i] for i in range(n)]
    finally:
        free(slots); free(islots); free(limits); free(values); free(code)
