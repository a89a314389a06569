# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel. Mirrors ``_pykernel`` exactly, on int64."""


from libc.stdlib cimport free, malloc
from libc.string cimport memcpy
from posix.time cimport CLOCK_MONOTONIC, clock_gettime, timespec

ctypedef long long i64

cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_MOD = 6
    OP_EQ = 7
    OP_NE = 8
    OP_LT = 9
    OP_LE = 10
    OP_AND = 11
    OP_OR = 12
    OP_NOT = 13
    OP_ITE = 14

cdef int MAX_ROUNDS = 64
cdef int CLOCK_EVERY = 64

cdef enum:
    SAT = 0
    UNSAT = 1
    OUT_OF_NODES = 2
    OUT_OF_TIME = 3


cdef inline i64 imin(i64 a, i64 b) nogil:
    return a if a < b else b


cdef inline i64 imax(i64 a, i64 b) nogil:
    return a if a > b else b


cdef inline i64 iabs(i64 a) nogil:
    return -a if a < 0 else a


cdef inline i64 fdiv(i64 a, i64 b) nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 cdiv(i64 a, i64 b) nogil:
    return -fdiv(-a, b)


cdef inline i64 tdiv(i64 a, i64 b) nogil:
    return a / b


cdef struct Prog:
    int n
    int nroots
    int nvars
    i64 *ops
    i64 *a
    i64 *b
    i64 *c
    i64 *val
    i64 *roots
    i64 *mid
    i64 *asc
    i64 *nlo
    i64 *nhi


cdef inline void quot(i64 tl, i64 th, i64 dl, i64 dh, i64 *lo, i64 *hi) nogil:
    lo[0] = imin(cdiv(tl, dl), cdiv(tl, dh))
    hi[0] = imax(fdiv(th, dl), fdiv(th, dh))


# returns 0 for "no narrowing", 1 with bounds in lo/hi
cdef int mul_inverse(i64 tl, i64 th, i64 dl, i64 dh, i64 *lo, i64 *hi) nogil:
    cdef int have = 0
    cdef i64 nl, nh
    if dl <= 0 and 0 <= dh:
        if tl <= 0 and 0 <= th:
            return 0
        if dh >= 1:
            quot(tl, th, imax(dl, 1), dh, lo, hi)
            have = 1
        if dl <= -1:
            quot(-th, -tl, -imin(dh, -1), -dl, &nl, &nh)
            if have == 0:
                lo[0] = nl
                hi[0] = nh
            else:
                lo[0] = imin(lo[0], nl)
                hi[0] = imax(hi[0], nh)
            have = 1
        if have == 0:
            lo[0] = 1
            hi[0] = 0
        return 1
    if dl >= 1:
        quot(tl, th, dl, dh, lo, hi)
        return 1
    quot(-th, -tl, -dh, -dl, lo, hi)
    return 1


cdef inline void div_part(i64 xl, i64 xh, i64 a, i64 b, i64 *lo, i64 *hi) nogil:
    cdef i64 c1 = tdiv(xl, a), c2 = tdiv(xl, b), c3 = tdiv(xh, a), c4 = tdiv(xh, b)
    lo[0] = imin(imin(c1, c2), imin(c3, c4))
    hi[0] = imax(imax(c1, c2), imax(c3, c4))


cdef void forward(Prog *p, i64 *vlo, i64 *vhi) nogil:
    cdef int k
    cdef i64 op, x, y, z, xl, xh, yl, yh, lo, hi, p1, p2, p3, p4, m, a0, b0
    cdef int have
    cdef i64 *nlo = p.nlo
    cdef i64 *nhi = p.nhi
    for k in range(p.n):
        op = p.ops[k]
        if op == OP_CONST:
            nlo[k] = p.val[k]
            nhi[k] = p.val[k]
            continue
        if op == OP_VAR:
            nlo[k] = vlo[p.val[k]]
            nhi[k] = vhi[p.val[k]]
            continue
        x = p.a[k]
        xl = nlo[x]
        xh = nhi[x]
        if op == OP_NOT:
            nlo[k] = 1 - xh
            nhi[k] = 1 - xl
            continue
        y = p.b[k]
        yl = nlo[y]
        yh = nhi[y]
        if op == OP_ADD:
            lo = xl + yl
            hi = xh + yh
        elif op == OP_SUB:
            lo = xl - yh
            hi = xh - yl
        elif op == OP_MUL:
            p1 = xl * yl
            p2 = xl * yh
            p3 = xh * yl
            p4 = xh * yh
            lo = imin(imin(p1, p2), imin(p3, p4))
            hi = imax(imax(p1, p2), imax(p3, p4))
        elif op == OP_DIV:
            have = 0
            lo = 0
            hi = 0
            if yl <= 0 and 0 <= yh:
                have = 1
            if yh >= 1:
                div_part(xl, xh, imax(yl, 1), yh, &a0, &b0)
                if have:
                    lo = imin(lo, a0)
                    hi = imax(hi, b0)
                else:
                    lo = a0
                    hi = b0
                have = 1
            if yl <= -1:
                div_part(xl, xh, yl, imin(yh, -1), &a0, &b0)
                if have:
                    lo = imin(lo, a0)
                    hi = imax(hi, b0)
                else:
                    lo = a0
                    hi = b0
        elif op == OP_MOD:
            if xl == xh and yl == yh:
                if yl == 0:
                    lo = 0
                    hi = 0
                else:
                    lo = xl - yl * tdiv(xl, yl)
                    hi = lo
            else:
                m = imax(iabs(yl), iabs(yh))
                if m == 0:
                    lo = 0
                    hi = 0
                else:
                    lo = 0 if xl >= 0 else imax(xl, 1 - m)
                    hi = 0 if xh <= 0 else imin(xh, m - 1)
        elif op == OP_EQ or op == OP_NE:
            if xl == xh and xh == yl and yl == yh:
                lo = 1
                hi = 1
            elif xh < yl or yh < xl:
                lo = 0
                hi = 0
            else:
                lo = 0
                hi = 1
            if op == OP_NE:
                p1 = lo
                lo = 1 - hi
                hi = 1 - p1
        elif op == OP_LT:
            if xh < yl:
                lo = 1
                hi = 1
            elif xl >= yh:
                lo = 0
                hi = 0
            else:
                lo = 0
                hi = 1
        elif op == OP_LE:
            if xh <= yl:
                lo = 1
                hi = 1
            elif xl > yh:
                lo = 0
                hi = 0
            else:
                lo = 0
                hi = 1
        elif op == OP_AND:
            lo = imin(xl, yl)
            hi = imin(xh, yh)
        elif op == OP_OR:
            lo = imax(xl, yl)
            hi = imax(xh, yh)
        else:
            z = p.c[k]
            if xl >= 1:
                lo = yl
                hi = yh
            elif xh <= 0:
                lo = nlo[z]
                hi = nhi[z]
            else:
                lo = imin(yl, nlo[z])
                hi = imax(yh, nhi[z])
        nlo[k] = lo
        nhi[k] = hi


cdef int propagate(Prog *p, i64 *vlo, i64 *vhi) nogil:
    cdef int rnd, k, changed, want_eq
    cdef i64 op, x, y, z, tl, th, v, rl, rh, lo, hi, r
    cdef i64 *nlo = p.nlo
    cdef i64 *nhi = p.nhi
    for rnd in range(MAX_ROUNDS):
        forward(p, vlo, vhi)
        for k in range(p.nroots):
            r = p.roots[k]
            if nhi[r] < 1:
                return 0
            nlo[r] = 1
        changed = 0
        for k in range(p.n - 1, -1, -1):
            tl = nlo[k]
            th = nhi[k]
            if tl > th:
                return 0
            op = p.ops[k]
            if op == OP_CONST:
                continue
            if op == OP_VAR:
                v = p.val[k]
                if tl > vlo[v]:
                    vlo[v] = tl
                    changed = 1
                if th < vhi[v]:
                    vhi[v] = th
                    changed = 1
                continue
            x = p.a[k]
            if op == OP_NOT:
                nlo[x] = imax(nlo[x], 1 - th)
                nhi[x] = imin(nhi[x], 1 - tl)
                continue
            y = p.b[k]
            if op == OP_ADD:
                nlo[x] = imax(nlo[x], tl - nhi[y])
                nhi[x] = imin(nhi[x], th - nlo[y])
                if nlo[x] > nhi[x]:
                    return 0
                nlo[y] = imax(nlo[y], tl - nhi[x])
                nhi[y] = imin(nhi[y], th - nlo[x])
            elif op == OP_SUB:
                nlo[x] = imax(nlo[x], tl + nlo[y])
                nhi[x] = imin(nhi[x], th + nhi[y])
                if nlo[x] > nhi[x]:
                    return 0
                nlo[y] = imax(nlo[y], nlo[x] - th)
                nhi[y] = imin(nhi[y], nhi[x] - tl)
            elif op == OP_MUL:
                if mul_inverse(tl, th, nlo[y], nhi[y], &rl, &rh):
                    nlo[x] = imax(nlo[x], rl)
                    nhi[x] = imin(nhi[x], rh)
                    if nlo[x] > nhi[x]:
                        return 0
                if mul_inverse(tl, th, nlo[x], nhi[x], &rl, &rh):
                    nlo[y] = imax(nlo[y], rl)
                    nhi[y] = imin(nhi[y], rh)
            elif op == OP_EQ or op == OP_NE:
                if tl == th:
                    want_eq = (tl == 1) == (op == OP_EQ)
                    if want_eq:
                        lo = imax(nlo[x], nlo[y])
                        hi = imin(nhi[x], nhi[y])
                        nlo[x] = lo
                        nlo[y] = lo
                        nhi[x] = hi
                        nhi[y] = hi
                    else:
                        if nlo[y] == nhi[y]:
                            if nlo[x] == nlo[y]:
                                nlo[x] += 1
                            if nhi[x] == nlo[y]:
                                nhi[x] -= 1
                        if nlo[x] == nhi[x]:
                            if nlo[y] == nlo[x]:
                                nlo[y] += 1
                            if nhi[y] == nlo[x]:
                                nhi[y] -= 1
            elif op == OP_LT:
                if tl == 1:
                    nhi[x] = imin(nhi[x], nhi[y] - 1)
                    nlo[y] = imax(nlo[y], nlo[x] + 1)
                elif th == 0:
                    nlo[x] = imax(nlo[x], nlo[y])
                    nhi[y] = imin(nhi[y], nhi[x])
            elif op == OP_LE:
                if tl == 1:
                    nhi[x] = imin(nhi[x], nhi[y])
                    nlo[y] = imax(nlo[y], nlo[x])
                elif th == 0:
                    nlo[x] = imax(nlo[x], nlo[y] + 1)
                    nhi[y] = imin(nhi[y], nhi[x] - 1)
            elif op == OP_AND:
                if tl == 1:
                    nlo[x] = imax(nlo[x], 1)
                    nlo[y] = imax(nlo[y], 1)
                elif th == 0:
                    if nlo[x] == 1:
                        nhi[y] = imin(nhi[y], 0)
                    elif nlo[y] == 1:
                        nhi[x] = imin(nhi[x], 0)
            elif op == OP_OR:
                if th == 0:
                    nhi[x] = imin(nhi[x], 0)
                    nhi[y] = imin(nhi[y], 0)
                elif tl == 1:
                    if nhi[x] == 0:
                        nlo[y] = imax(nlo[y], 1)
                    elif nhi[y] == 0:
                        nlo[x] = imax(nlo[x], 1)
            elif op == OP_ITE:
                z = p.c[k]
                if nlo[x] >= 1:
                    nlo[y] = imax(nlo[y], tl)
                    nhi[y] = imin(nhi[y], th)
                elif nhi[x] <= 0:
                    nlo[z] = imax(nlo[z], tl)
                    nhi[z] = imin(nhi[z], th)
                elif imax(nlo[y], tl) > imin(nhi[y], th):
                    nhi[x] = 0
                    nlo[z] = imax(nlo[z], tl)
                    nhi[z] = imin(nhi[z], th)
                elif imax(nlo[z], tl) > imin(nhi[z], th):
                    nlo[x] = 1
                    nlo[y] = imax(nlo[y], tl)
                    nhi[y] = imin(nhi[y], th)
            if nlo[x] > nhi[x] or nlo[y] > nhi[y]:
                return 0
        if not changed:
            return 1
    return 1


cdef struct Search:
    Prog *p
    i64 *stack_lo
    i64 *stack_hi
    long long nodes
    long long budget
    double deadline
    int status  # -1 running, else stop status
    i64 *model


cdef double now() nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + ts.tv_nsec * 1e-9


cdef int try_value(Search *s, int level, int i, i64 v) nogil:
    """Returns 1 when a model was found below this value."""
    cdef int nv = s.p.nvars
    cdef i64 *lo = s.stack_lo + level * nv
    cdef i64 *hi = s.stack_hi + level * nv
    cdef i64 *lo2 = lo + nv
    cdef i64 *hi2 = hi + nv
    s.nodes += 1
    if s.nodes > s.budget:
        s.status = OUT_OF_NODES
        return 0
    if s.deadline > 0 and s.nodes % CLOCK_EVERY == 0 and now() > s.deadline:
        s.status = OUT_OF_TIME
        return 0
    memcpy(lo2, lo, nv * sizeof(i64))
    memcpy(hi2, hi, nv * sizeof(i64))
    lo2[i] = v
    hi2[i] = v
    if propagate(s.p, lo2, hi2):
        return rec(s, level + 1)
    return 0


cdef int rec(Search *s, int level) nogil:
    cdef int nv = s.p.nvars
    cdef i64 *lo = s.stack_lo + level * nv
    cdef i64 *hi = s.stack_hi + level * nv
    cdef int i = 0
    cdef i64 v, m, d, up, down, vlo, vhi
    while i < nv and lo[i] == hi[i]:
        i += 1
    if i == nv:
        memcpy(s.model, lo, nv * sizeof(i64))
        return 1
    vlo = lo[i]
    vhi = hi[i]
    if s.p.asc[i]:
        v = vlo
        while v <= vhi:
            if try_value(s, level, i, v):
                return 1
            if s.status >= 0:
                return 0
            v += 1
        return 0
    m = imin(imax(s.p.mid[i], vlo), vhi)
    if try_value(s, level, i, m):
        return 1
    if s.status >= 0:
        return 0
    d = 1
    while True:
        up = m + d
        down = m - d
        if up > vhi and down < vlo:
            return 0
        if up <= vhi:
            if try_value(s, level, i, up):
                return 1
            if s.status >= 0:
                return 0
        if down >= vlo:
            if try_value(s, level, i, down):
                return 1
            if s.status >= 0:
                return 0
        d += 1


cdef i64 *as_buffer(object seq):
    cdef Py_ssize_t n = len(seq)
    cdef i64 *buf = <i64 *> malloc((n if n > 0 else 1) * sizeof(i64))
    cdef Py_ssize_t j
    for j in range(n):
        buf[j] = seq[j]
    return buf


cdef void load(Prog *p, object prog):
    p.n = len(prog.ops)
    p.nroots = len(prog.roots)
    p.nvars = len(prog.mid)
    p.ops = as_buffer(prog.ops)
    p.a = as_buffer(prog.a)
    p.b = as_buffer(prog.b)
    p.c = as_buffer(prog.c)
    p.val = as_buffer(prog.val)
    p.roots = as_buffer(prog.roots)
    p.mid = as_buffer(prog.mid)
    p.asc = as_buffer(prog.asc)
    p.nlo = <i64 *> malloc((p.n if p.n > 0 else 1) * sizeof(i64))
    p.nhi = <i64 *> malloc((p.n if p.n > 0 else 1) * sizeof(i64))


cdef void unload(Prog *p):
    free(p.ops)
    free(p.a)
    free(p.b)
    free(p.c)
    free(p.val)
    free(p.roots)
    free(p.mid)
    free(p.asc)
    free(p.nlo)
    free(p.nhi)


def propagate_py(prog, vlo, vhi):
    """Same contract as ``_pykernel.propagate``: narrows the lists in place."""
    cdef Prog p
    cdef int ok, j
    cdef int nv = len(vlo)
    load(&p, prog)
    cdef i64 *lo = as_buffer(vlo)
    cdef i64 *hi = as_buffer(vhi)
    try:
        with nogil:
            ok = propagate(&p, lo, hi)
        for j in range(nv):
            vlo[j] = lo[j]
            vhi[j] = hi[j]
    finally:
        free(lo)
        free(hi)
        unload(&p)
    return bool(ok)


def search(prog, vlo, vhi, long long budget, double deadline):
    """Same contract as ``_pykernel.search``."""
    cdef Prog p
    cdef Search s
    cdef int nv = len(vlo)
    cdef int j, found
    load(&p, prog)
    s.p = &p
    s.stack_lo = <i64 *> malloc((nv + 1) * (nv if nv > 0 else 1) * sizeof(i64))
    s.stack_hi = <i64 *> malloc((nv + 1) * (nv if nv > 0 else 1) * sizeof(i64))
    s.model = <i64 *> malloc((nv if nv > 0 else 1) * sizeof(i64))
    s.nodes = 0
    s.budget = budget
    s.deadline = deadline
    s.status = -1
    try:
        for j in range(nv):
            s.stack_lo[j] = vlo[j]
            s.stack_hi[j] = vhi[j]
        with nogil:
            if not propagate(&p, s.stack_lo, s.stack_hi):
                found = -1
            else:
                found = rec(&s, 0)
        if found == -1:
            return UNSAT, None, 0
        if found == 1:
            return SAT, [s.model[j] for j in range(nv)], s.nodes
        if s.status == OUT_OF_NODES:
            return OUT_OF_NODES, None, s.nodes - 1
        if s.status == OUT_OF_TIME:
            return OUT_OF_TIME, None, s.nodes
        return UNSAT, None, s.nodes
    finally:
        free(s.stack_lo)
        free(s.stack_hi)
        free(s.model)
        unload(&p)
