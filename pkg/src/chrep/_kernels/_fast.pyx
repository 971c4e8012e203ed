# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Howell form and modular matrix product over Z/q.

Semantics are defined by ``chrep._kernels.reference``; this module is a
typed translation of the same algorithms.  All moduli here are prime
powers q <= 2**21, so every intermediate product fits in a signed 64-bit
integer (entries < q, row length < 2**20).
"""

from libc.stdlib cimport free, malloc

ctypedef long long i64

IMPLEMENTATION = "compiled"

DEF MAX_Q = 2097152  # 2**21


cdef i64 _gcd(i64 a, i64 b) noexcept:
    cdef i64 t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef void _egcd(i64 a, i64 b, i64 *g, i64 *s, i64 *t) noexcept:
    cdef i64 old_r = a, r = b
    cdef i64 old_s = 1, ss = 0
    cdef i64 old_t = 0, tt = 1
    cdef i64 quo, tmp
    while r:
        quo = old_r / r
        tmp = old_r - quo * r; old_r = r; r = tmp
        tmp = old_s - quo * ss; old_s = ss; ss = tmp
        tmp = old_t - quo * tt; old_t = tt; tt = tmp
    g[0] = old_r
    s[0] = old_s
    t[0] = old_t


cdef i64 _modinv(i64 a, i64 q) except -1:
    cdef i64 g, s, t
    _egcd(a % q, q, &g, &s, &t)
    if g != 1:
        raise ValueError("not invertible")
    s %= q
    if s < 0:
        s += q
    return s


cdef i64 _unit_factor(i64 a, i64 q) except -1:
    a %= q
    if a == 0:
        return 1
    cdef i64 g = _gcd(a, q)
    return _modinv(a / g, q)


def matmul_mod(a, b, q):
    """Matrix product mod q; same contract as the reference kernel."""
    cdef Py_ssize_t m = len(a)
    if m == 0:
        return []
    cdef Py_ssize_t k = len(a[0])
    if k != len(b):
        raise ValueError("matmul_mod: shape mismatch")
    cdef Py_ssize_t n = len(b[0]) if k else 0
    cdef i64 qq = q
    if qq <= 0 or qq > MAX_Q:
        raise ValueError("modulus out of supported range")
    cdef i64 *am = <i64 *> malloc(m * k * sizeof(i64))
    cdef i64 *bm = <i64 *> malloc(k * n * sizeof(i64))
    if am == NULL or bm == NULL:
        free(am); free(bm)
        raise MemoryError()
    cdef Py_ssize_t i, j, l
    cdef i64 acc
    try:
        for i in range(m):
            row = a[i]
            for j in range(k):
                am[i * k + j] = <i64> (row[j] % q)
        for i in range(k):
            row = b[i]
            for j in range(n):
                bm[i * n + j] = <i64> (row[j] % q)
        out = []
        for i in range(m):
            orow = [0] * n
            for j in range(n):
                acc = 0
                for l in range(k):
                    acc += am[i * k + l] * bm[l * n + j]
                    if acc >= (<i64> 1) << 60:
                        acc %= qq
                orow[j] = acc % qq
            out.append(orow)
        return out
    finally:
        free(am)
        free(bm)


def howell_complete(mat, q):
    """Howell form with transform and kernel; see the reference kernel."""
    cdef i64 qq = q
    if qq <= 0 or qq > MAX_Q:
        raise ValueError("modulus out of supported range")
    cdef Py_ssize_t n_orig = len(mat)
    cdef Py_ssize_t n_col = len(mat[0]) if n_orig else 0
    # worst case: one annihilator row appended per column
    cdef Py_ssize_t cap = n_orig + n_col + 1
    cdef i64 *work = <i64 *> malloc(cap * n_col * sizeof(i64))
    cdef i64 *trans = <i64 *> malloc(cap * n_orig * sizeof(i64))
    if (work == NULL and n_col > 0) or (trans == NULL and n_orig > 0):
        free(work); free(trans)
        raise MemoryError()
    cdef Py_ssize_t n_row = n_orig
    cdef Py_ssize_t r = 0, c = 0, i, j, l
    cdef i64 g, s, t, uu, vv, u, pivot, ann, x, y
    try:
        for i in range(n_orig):
            row = mat[i]
            for j in range(n_col):
                work[i * n_col + j] = <i64> (row[j] % q)
            for j in range(n_orig):
                trans[i * n_orig + j] = 1 if i == j else 0
        while c < n_col:
            j = r
            while j < n_row and work[j * n_col + c] == 0:
                j += 1
            if j < n_row:
                if j > r:
                    for l in range(n_col):
                        x = work[r * n_col + l]
                        work[r * n_col + l] = work[j * n_col + l]
                        work[j * n_col + l] = x
                    for l in range(n_orig):
                        x = trans[r * n_orig + l]
                        trans[r * n_orig + l] = trans[j * n_orig + l]
                        trans[j * n_orig + l] = x
                for i in range(r + 1, n_row):
                    if work[i * n_col + c]:
                        _egcd(work[r * n_col + c], work[i * n_col + c], &g, &s, &t)
                        uu = -(work[i * n_col + c] / g)
                        vv = work[r * n_col + c] / g
                        s %= qq; t %= qq; uu %= qq; vv %= qq
                        if s < 0: s += qq
                        if t < 0: t += qq
                        if uu < 0: uu += qq
                        if vv < 0: vv += qq
                        for l in range(n_col):
                            x = work[r * n_col + l]
                            y = work[i * n_col + l]
                            work[r * n_col + l] = (s * x + t * y) % qq
                            work[i * n_col + l] = (uu * x + vv * y) % qq
                        for l in range(n_orig):
                            x = trans[r * n_orig + l]
                            y = trans[i * n_orig + l]
                            trans[r * n_orig + l] = (s * x + t * y) % qq
                            trans[i * n_orig + l] = (uu * x + vv * y) % qq
                u = _unit_factor(work[r * n_col + c], qq)
                if u != 1:
                    for l in range(n_col):
                        work[r * n_col + l] = (u * work[r * n_col + l]) % qq
                    for l in range(n_orig):
                        trans[r * n_orig + l] = (u * trans[r * n_orig + l]) % qq
                pivot = work[r * n_col + c]
                for i in range(r):
                    x = work[i * n_col + c] / pivot
                    if x:
                        for l in range(n_col):
                            work[i * n_col + l] = (work[i * n_col + l] - x * work[r * n_col + l]) % qq
                            if work[i * n_col + l] < 0:
                                work[i * n_col + l] += qq
                        for l in range(n_orig):
                            trans[i * n_orig + l] = (trans[i * n_orig + l] - x * trans[r * n_orig + l]) % qq
                            if trans[i * n_orig + l] < 0:
                                trans[i * n_orig + l] += qq
                ann = qq / _gcd(pivot, qq)
                if ann != qq:
                    if n_row >= cap:
                        raise RuntimeError("howell capacity exceeded")
                    for l in range(n_col):
                        work[n_row * n_col + l] = (ann * work[r * n_col + l]) % qq
                    for l in range(n_orig):
                        trans[n_row * n_orig + l] = (ann * trans[r * n_orig + l]) % qq
                    n_row += 1
                r += 1
            c += 1
        hows = []
        transform = []
        kernel = []
        for i in range(n_row):
            nz = False
            for l in range(n_col):
                if work[i * n_col + l]:
                    nz = True
                    break
            if nz:
                hows.append([work[i * n_col + l] for l in range(n_col)])
                transform.append([trans[i * n_orig + l] for l in range(n_orig)])
            else:
                tz = False
                for l in range(n_orig):
                    if trans[i * n_orig + l]:
                        tz = True
                        break
                if tz:
                    kernel.append([trans[i * n_orig + l] for l in range(n_orig)])
        return hows, transform, kernel
    finally:
        free(work)
        free(trans)
