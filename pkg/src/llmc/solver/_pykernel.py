"""Reference search kernel in pure Python.

Operates on the flat node program built by :mod:`llmc.solver.lower`. The
compiled ``_ckernel`` implements the same algorithm step for step and must
return identical results, including node counts.
"""

from time import monotonic

(OP_CONST, OP_VAR, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_MOD, OP_EQ, OP_NE,
 OP_LT, OP_LE, OP_AND, OP_OR, OP_NOT, OP_ITE) = range(15)

MAX_ROUNDS = 64
CLOCK_EVERY = 64

SAT, UNSAT, OUT_OF_NODES, OUT_OF_TIME = 0, 1, 2, 3


def tdiv(a, b):
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _div_part(xl, xh, a, b):
    c = (tdiv(xl, a), tdiv(xl, b), tdiv(xh, a), tdiv(xh, b))
    return min(c), max(c)


def _quot(tl, th, dl, dh):
    """Hull of integers x with x*d in [tl, th] for some d in [dl, dh], dl >= 1."""
    lo = min(-((-tl) // dl), -((-tl) // dh))
    hi = max(th // dl, th // dh)
    return lo, hi


def _mul_inverse(tl, th, dl, dh):
    """Bounds for x given x*d in [tl,th], d in [dl,dh]. Returns None for no narrowing."""
    if dl <= 0 <= dh:
        if tl <= 0 <= th:
            return None
        lo = hi = None
        if dh >= 1:
            lo, hi = _quot(tl, th, max(dl, 1), dh)
        if dl <= -1:
            nl, nh = _quot(-th, -tl, -min(dh, -1), -dl)
            if lo is None:
                lo, hi = nl, nh
            else:
                lo, hi = min(lo, nl), max(hi, nh)
        if lo is None:
            return 1, 0  # d can only be 0, so x*d = 0 is outside t
        return lo, hi
    if dl >= 1:
        return _quot(tl, th, dl, dh)
    return _quot(-th, -tl, -dh, -dl)


def forward(prog, vlo, vhi, nlo, nhi):
    ops, A, B, C, val = prog.ops, prog.a, prog.b, prog.c, prog.val
    for k in range(len(ops)):
        op = ops[k]
        if op == OP_CONST:
            nlo[k] = nhi[k] = val[k]
            continue
        if op == OP_VAR:
            nlo[k] = vlo[val[k]]
            nhi[k] = vhi[val[k]]
            continue
        x = A[k]
        xl = nlo[x]
        xh = nhi[x]
        if op == OP_NOT:
            nlo[k] = 1 - xh
            nhi[k] = 1 - xl
            continue
        y = B[k]
        yl = nlo[y]
        yh = nhi[y]
        if op == OP_ADD:
            lo, hi = xl + yl, xh + yh
        elif op == OP_SUB:
            lo, hi = xl - yh, xh - yl
        elif op == OP_MUL:
            p1, p2, p3, p4 = xl * yl, xl * yh, xh * yl, xh * yh
            lo, hi = min(p1, p2, p3, p4), max(p1, p2, p3, p4)
        elif op == OP_DIV:
            lo = hi = None
            if yl <= 0 <= yh:
                lo = hi = 0
            if yh >= 1:
                a, b = _div_part(xl, xh, max(yl, 1), yh)
                lo = a if lo is None else min(lo, a)
                hi = b if hi is None else max(hi, b)
            if yl <= -1:
                a, b = _div_part(xl, xh, yl, min(yh, -1))
                lo = a if lo is None else min(lo, a)
                hi = b if hi is None else max(hi, b)
        elif op == OP_MOD:
            if xl == xh and yl == yh:
                if yl == 0:
                    lo = hi = 0
                else:
                    lo = hi = xl - yl * tdiv(xl, yl)
            else:
                m = max(abs(yl), abs(yh))
                if m == 0:
                    lo = hi = 0
                else:
                    lo = 0 if xl >= 0 else max(xl, 1 - m)
                    hi = 0 if xh <= 0 else min(xh, m - 1)
        elif op == OP_EQ or op == OP_NE:
            if xl == xh == yl == yh:
                lo = hi = 1
            elif xh < yl or yh < xl:
                lo = hi = 0
            else:
                lo, hi = 0, 1
            if op == OP_NE:
                lo, hi = 1 - hi, 1 - lo
        elif op == OP_LT:
            if xh < yl:
                lo = hi = 1
            elif xl >= yh:
                lo = hi = 0
            else:
                lo, hi = 0, 1
        elif op == OP_LE:
            if xh <= yl:
                lo = hi = 1
            elif xl > yh:
                lo = hi = 0
            else:
                lo, hi = 0, 1
        elif op == OP_AND:
            lo, hi = min(xl, yl), min(xh, yh)
        elif op == OP_OR:
            lo, hi = max(xl, yl), max(xh, yh)
        else:  # OP_ITE
            z = C[k]
            if xl >= 1:
                lo, hi = yl, yh
            elif xh <= 0:
                lo, hi = nlo[z], nhi[z]
            else:
                lo, hi = min(yl, nlo[z]), max(yh, nhi[z])
        nlo[k] = lo
        nhi[k] = hi


def propagate(prog, vlo, vhi):
    """Narrow ``vlo``/``vhi`` in place. Returns False on contradiction."""
    n = len(prog.ops)
    ops, A, B, C, val = prog.ops, prog.a, prog.b, prog.c, prog.val
    nlo = [0] * n
    nhi = [0] * n
    for _ in range(MAX_ROUNDS):
        forward(prog, vlo, vhi, nlo, nhi)
        for r in prog.roots:
            if nhi[r] < 1:
                return False
            nlo[r] = 1
        changed = False
        for k in range(n - 1, -1, -1):
            tl = nlo[k]
            th = nhi[k]
            if tl > th:
                return False
            op = ops[k]
            if op == OP_CONST:
                continue
            if op == OP_VAR:
                v = val[k]
                if tl > vlo[v]:
                    vlo[v] = tl
                    changed = True
                if th < vhi[v]:
                    vhi[v] = th
                    changed = True
                continue
            x = A[k]
            if op == OP_NOT:
                nlo[x] = max(nlo[x], 1 - th)
                nhi[x] = min(nhi[x], 1 - tl)
                continue
            y = B[k]
            if op == OP_ADD:
                nlo[x] = max(nlo[x], tl - nhi[y])
                nhi[x] = min(nhi[x], th - nlo[y])
                if nlo[x] > nhi[x]:
                    return False
                nlo[y] = max(nlo[y], tl - nhi[x])
                nhi[y] = min(nhi[y], th - nlo[x])
            elif op == OP_SUB:
                nlo[x] = max(nlo[x], tl + nlo[y])
                nhi[x] = min(nhi[x], th + nhi[y])
                if nlo[x] > nhi[x]:
                    return False
                nlo[y] = max(nlo[y], nlo[x] - th)
                nhi[y] = min(nhi[y], nhi[x] - tl)
            elif op == OP_MUL:
                r = _mul_inverse(tl, th, nlo[y], nhi[y])
                if r is not None:
                    nlo[x] = max(nlo[x], r[0])
                    nhi[x] = min(nhi[x], r[1])
                    if nlo[x] > nhi[x]:
                        return False
                r = _mul_inverse(tl, th, nlo[x], nhi[x])
                if r is not None:
                    nlo[y] = max(nlo[y], r[0])
                    nhi[y] = min(nhi[y], r[1])
            elif op == OP_EQ or op == OP_NE:
                if tl == th:
                    want_eq = (tl == 1) == (op == OP_EQ)
                    if want_eq:
                        lo = max(nlo[x], nlo[y])
                        hi = min(nhi[x], nhi[y])
                        nlo[x] = nlo[y] = lo
                        nhi[x] = nhi[y] = hi
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
                    nhi[x] = min(nhi[x], nhi[y] - 1)
                    nlo[y] = max(nlo[y], nlo[x] + 1)
                elif th == 0:
                    nlo[x] = max(nlo[x], nlo[y])
                    nhi[y] = min(nhi[y], nhi[x])
            elif op == OP_LE:
                if tl == 1:
                    nhi[x] = min(nhi[x], nhi[y])
                    nlo[y] = max(nlo[y], nlo[x])
                elif th == 0:
                    nlo[x] = max(nlo[x], nlo[y] + 1)
                    nhi[y] = min(nhi[y], nhi[x] - 1)
            elif op == OP_AND:
                if tl == 1:
                    nlo[x] = max(nlo[x], 1)
                    nlo[y] = max(nlo[y], 1)
                elif th == 0:
                    if nlo[x] == 1:
                        nhi[y] = min(nhi[y], 0)
                    elif nlo[y] == 1:
                        nhi[x] = min(nhi[x], 0)
            elif op == OP_OR:
                if th == 0:
                    nhi[x] = min(nhi[x], 0)
                    nhi[y] = min(nhi[y], 0)
                elif tl == 1:
                    if nhi[x] == 0:
                        nlo[y] = max(nlo[y], 1)
                    elif nhi[y] == 0:
                        nlo[x] = max(nlo[x], 1)
            elif op == OP_ITE:
                z = C[k]
                if nlo[x] >= 1:
                    nlo[y] = max(nlo[y], tl)
                    nhi[y] = min(nhi[y], th)
                elif nhi[x] <= 0:
                    nlo[z] = max(nlo[z], tl)
                    nhi[z] = min(nhi[z], th)
                elif max(nlo[y], tl) > min(nhi[y], th):
                    nhi[x] = 0
                    nlo[z] = max(nlo[z], tl)
                    nhi[z] = min(nhi[z], th)
                elif max(nlo[z], tl) > min(nhi[z], th):
                    nlo[x] = 1
                    nlo[y] = max(nlo[y], tl)
                    nhi[y] = min(nhi[y], th)
            # DIV and MOD are not inverted; emptiness of ITE's else-arm is
            # caught when that node is visited
            if nlo[x] > nhi[x] or nlo[y] > nhi[y]:
                return False
        if not changed:
            return True
    return True


def _values(lo, hi, mid, asc):
    if asc:
        yield from range(lo, hi + 1)
        return
    m = min(max(mid, lo), hi)
    yield m
    d = 1
    while True:
        up = m + d
        down = m - d
        if up > hi and down < lo:
            return
        if up <= hi:
            yield up
        if down >= lo:
            yield down
        d += 1


class _Stop(Exception):
    def __init__(self, status):
        self.status = status


def search(prog, vlo, vhi, budget, deadline):
    """Depth-first enumeration with propagation at every node.

    Returns ``(status, values, nodes)``; ``values`` is the model for SAT.
    ``deadline`` is a ``time.monotonic()`` instant, or 0 for none.
    """
    vlo = list(vlo)
    vhi = list(vhi)
    nvars = len(vlo)
    counter = [0]
    if not propagate(prog, vlo, vhi):
        return UNSAT, None, 0

    def rec(lo, hi):
        i = 0
        while i < nvars and lo[i] == hi[i]:
            i += 1
        if i == nvars:
            return list(lo)
        for v in _values(lo[i], hi[i], prog.mid[i], prog.asc[i]):
            counter[0] += 1
            if counter[0] > budget:
                raise _Stop(OUT_OF_NODES)
            if deadline > 0 and counter[0] % CLOCK_EVERY == 0 and monotonic() > deadline:
                raise _Stop(OUT_OF_TIME)
            lo2 = list(lo)
            hi2 = list(hi)
            lo2[i] = hi2[i] = v
            if propagate(prog, lo2, hi2):
                r = rec(lo2, hi2)
                if r is not None:
                    return r
        return None

    try:
        model = rec(vlo, vhi)
    except _Stop as s:
        return s.status, None, counter[0] - (1 if s.status == OUT_OF_NODES else 0)
    if model is None:
        return UNSAT, None, counter[0]
    return SAT, model, counter[0]
