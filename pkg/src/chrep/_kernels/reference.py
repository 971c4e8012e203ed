"""Reference implementations of the arithmetic kernels.

Everything here works over Z/q for a prime power q, on plain Python ints
(no overflow concerns).  The compiled module ``_fast`` mirrors these
functions exactly; ``chrep._kernels`` selects whichever is available.

The Howell form is the canonical echelon form for row spans over Z/q:
two generating sets span the same submodule of (Z/q)^n iff they reduce to
the identical Howell form.  The variant here follows the classical
annihilator-augmented elimination (Howell 1986; Storjohann-Mulders), so
the rows of the transform that map to zero span the full kernel.
"""

from __future__ import annotations

from math import gcd

IMPLEMENTATION = "reference"


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    return old_r, old_s, old_t


def modinv(a: int, q: int) -> int:
    g, s, _ = _egcd(a % q, q)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {q}")
    return s % q


def unit_factor(a: int, q: int) -> int:
    """A unit u with u*a == gcd(a, q) (mod q).  Requires q a prime power."""
    a %= q
    if a == 0:
        return 1
    g = gcd(a, q)
    return modinv(a // g, q)


def gcdex_rows(a: int, b: int, q: int) -> tuple[int, int, int, int, int]:
    """(g, s, t, u, v) with s*a + t*b == g, u*a + v*b == 0 (mod q) and
    the matrix [[s, t], [u, v]] invertible mod q (determinant 1 over Z)."""
    a %= q
    b %= q
    g, s, t = _egcd(a, b)
    if g == 0:
        return 0, 1, 0, 0, 1
    u = -(b // g)
    v = a // g
    return g % q, s % q, t % q, u % q, v % q


def matmul_mod(a: list[list[int]], b: list[list[int]], q: int) -> list[list[int]]:
    """Matrix product mod q.  Shapes: (m x k) @ (k x n)."""
    if not a:
        return []
    k = len(a[0])
    if k != len(b):
        raise ValueError("matmul_mod: shape mismatch")
    n = len(b[0]) if b else 0
    bt = [[row[j] for row in b] for j in range(n)]
    out = []
    for row in a:
        out.append([sum(x * y for x, y in zip(row, col)) % q for col in bt])
    return out


def howell_complete(
    mat: list[list[int]], q: int
) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Howell form with transform and kernel over Z/q (q a prime power).

    Returns (H, U, K) where H is the canonical Howell form of the row span
    of ``mat`` (zero rows removed), U @ mat == H (mod q), and the rows of K
    span {x : x @ mat == 0 (mod q)}.
    """
    n_col = len(mat[0]) if mat else 0
    work = [[x % q for x in row] for row in mat]
    n_orig = len(work)
    # transform rows tracked in coordinates of the original rows
    trans = [[1 if i == j else 0 for j in range(n_orig)] for i in range(n_orig)]

    r = 0
    c = 0
    while c < n_col:
        n_row = len(work)
        j = r
        while j < n_row and work[j][c] == 0:
            j += 1
        if j < n_row:
            if j > r:
                work[r], work[j] = work[j], work[r]
                trans[r], trans[j] = trans[j], trans[r]
            # clear below
            for i in range(r + 1, n_row):
                if work[i][c]:
                    g, s, t, uu, vv = gcdex_rows(work[r][c], work[i][c], q)
                    wr, wi = work[r], work[i]
                    work[r] = [(s * x + t * y) % q for x, y in zip(wr, wi)]
                    work[i] = [(uu * x + vv * y) % q for x, y in zip(wr, wi)]
                    tr, ti = trans[r], trans[i]
                    trans[r] = [(s * x + t * y) % q for x, y in zip(tr, ti)]
                    trans[i] = [(uu * x + vv * y) % q for x, y in zip(tr, ti)]
            # scale so the pivot is the minimal representative p^s
            u = unit_factor(work[r][c], q)
            if u != 1:
                work[r] = [(u * x) % q for x in work[r]]
                trans[r] = [(u * x) % q for x in trans[r]]
            pivot = work[r][c]
            # reduce entries above the pivot into [0, pivot)
            for i in range(r):
                x = work[i][c] // pivot
                if x:
                    wr = work[r]
                    work[i] = [(y - x * z) % q for y, z in zip(work[i], wr)]
                    tr = trans[r]
                    trans[i] = [(y - x * z) % q for y, z in zip(trans[i], tr)]
            # append the annihilator multiple (keeps the span property and
            # makes the zero-mapped transform rows span the full kernel)
            ann = q // gcd(pivot, q)
            if ann != q:
                work.append([(ann * x) % q for x in work[r]])
                trans.append([(ann * x) % q for x in trans[r]])
            r += 1
        c += 1

    hows, transform, kernel = [], [], []
    for row, trow in zip(work, trans):
        if any(row):
            hows.append(row)
            transform.append(trow)
        elif any(trow):
            kernel.append(trow)
    return hows, transform, kernel
