"""Exact linear algebra and polynomial arithmetic over prime fields F_p.

Matrices are int64 numpy arrays with entries in [0, p). Everything here
assumes p < 2**31 so a single product of residues fits in int64.
"""
import itertools

import numpy as np
import scipy.sparse as sp

_F53 = 2 ** 53
_I63 = 2 ** 63 - 1


def _inner_chunk(p, limit):
    return max(1, limit // max(1, (p - 1) ** 2))


def matmul_mod(A, B, p):
    """A @ B mod p without overflow.

    Uses float64 BLAS while the dot products stay below 2**53, chunking the
    inner dimension otherwise.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    k = A.shape[-1]
    out_shape = A.shape[:-1] + B.shape[1:]
    if k == 0:
        return np.zeros(out_shape, dtype=np.int64)
    step = _inner_chunk(p, _F53)
    if step >= k:
        C = A.astype(np.float64) @ B.astype(np.float64)
        return np.fmod(C, p).astype(np.int64)
    if step >= 64:
        Af = A.astype(np.float64)
        Bf = B.astype(np.float64)
        acc = np.zeros(out_shape, dtype=np.int64)
        for s in range(0, k, step):
            part = Af[..., s:s + step] @ Bf[s:s + step]
            acc = (acc + np.fmod(part, p).astype(np.int64)) % p
        return acc
    step = _inner_chunk(p, _I63)
    acc = np.zeros(out_shape, dtype=np.int64)
    for s in range(0, k, step):
        acc = (acc + (A[..., s:s + step] @ B[s:s + step]) % p) % p
    return acc


def rref_mod(M, p):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2:
        raise ValueError("rref_mod expects a matrix")
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r, c:] = (A[r, c:] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            A[rows, c:] = (A[rows, c:] - np.outer(col[rows], A[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r].copy(), pivots


def rank_mod(M, p):
    return len(rref_mod(M, p)[1])


def nullspace_mod(M, p):
    """Basis (as rows) of {x : M x = 0}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, piv = rref_mod(M, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for j, f in enumerate(free):
        out[j, f] = 1
        for i, c in enumerate(piv):
            out[j, c] = (-R[i, f]) % p
    return out


def solve_rows_mod(W, V, p):
    """Coordinates C with C @ W = V for rows of V in the row space of W.

    Raises ValueError when some row of V is outside that span.
    """
    W = np.asarray(W, dtype=np.int64) % p
    V = np.atleast_2d(np.asarray(V, dtype=np.int64)) % p
    k = W.shape[0]
    aug = np.concatenate([W.T, V.T], axis=1)
    R, piv = rref_mod(aug, p)
    if any(c >= k for c in piv):
        raise ValueError("vector outside the row space")
    C = np.zeros((V.shape[0], k), dtype=np.int64)
    for i, c in enumerate(piv):
        C[:, c] = R[i, k:]
    return C


def inv_mod(M, p):
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    R, piv = rref_mod(np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1), p)
    if list(piv[:n]) != list(range(n)):
        raise ValueError("singular matrix")
    return R[:, n:]


def charpoly_mod(M, p):
    """Characteristic polynomial, coefficients low -> high, monic.

    Reduces to upper Hessenberg form by similarity, then runs the
    standard three-term style recurrence.
    """
    H = np.array(M, dtype=np.int64) % p
    n = H.shape[0]
    for m in range(1, n - 1):
        j = m - 1
        nz = np.flatnonzero(H[m:, j])
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            H[[i, m]] = H[[m, i]]
            H[:, [i, m]] = H[:, [m, i]]
        inv = pow(int(H[m, j]), -1, p)
        u = (H[m + 1:, j] * inv) % p
        if not u.any():
            continue
        H[m + 1:] = (H[m + 1:] - np.outer(u, H[m]) % p) % p
        H[:, m] = (H[:, m] + matmul_mod(H[:, m + 1:], u[:, None], p)[:, 0]) % p
    polys = [np.array([1], dtype=np.int64)]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        cur = np.zeros(m + 1, dtype=np.int64)
        cur[1:] = prev
        cur[:m] = (cur[:m] - H[m - 1, m - 1] * prev) % p
        t = 1
        for i in range(m - 1, 0, -1):
            t = (t * int(H[i, i - 1])) % p
            if t == 0:
                break
            coef = (t * int(H[i - 1, m - 1])) % p
            if coef:
                q = polys[i - 1]
                cur[:q.size] = (cur[:q.size] - coef * q) % p
        polys.append(cur)
    return polys[n]


# ---------------------------------------------------------------- polynomials
# Low -> high coefficient arrays over F_p.

def _trim(a):
    a = np.asarray(a, dtype=np.int64)
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return np.zeros(0, dtype=np.int64)
    return a[: nz[-1] + 1].copy()


def poly_mul(a, b, p):
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    if min(a.size, b.size) * (p - 1) ** 2 < _I63:
        return _trim(np.convolve(a, b) % p)
    out = np.convolve(a.astype(object), b.astype(object))
    return _trim(np.array([int(x) % p for x in out], dtype=np.int64))


def poly_divmod(a, b, p):
    a = _trim(a) % p
    b = _trim(b)
    if b.size == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.size - 1
    inv_lead = pow(int(b[-1]), -1, p)
    if a.size - 1 < db:
        return np.zeros(0, dtype=np.int64), a
    q = np.zeros(a.size - db, dtype=np.int64)
    r = a.copy()
    for k in range(a.size - 1, db - 1, -1):
        c = (int(r[k]) * inv_lead) % p
        if c:
            q[k - db] = c
            r[k - db:k + 1] = (r[k - db:k + 1] - c * b) % p
    return _trim(q), _trim(r[:db])


def poly_mod(a, b, p):
    return poly_divmod(a, b, p)[1]


def poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b.size:
        a, b = b, poly_mod(a, b, p)
    if a.size:
        a = (a * pow(int(a[-1]), -1, p)) % p
    return a


def poly_powmod(base, e, f, p):
    result = np.array([1], dtype=np.int64)
    base = poly_mod(base, f, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), f, p)
        e >>= 1
        if e:
            base = poly_mod(poly_mul(base, base, p), f, p)
    return result


def _poly_sub(a, b, p):
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.int64)
    out[:a.size] += a
    out[:b.size] -= b
    return _trim(out % p)


def poly_roots_mod(f, p):
    """Distinct roots in F_p of f, ascending.

    gcd with x^p - x isolates the split part; equal-degree splitting uses
    the shifts x + 0, x + 1, ... in order so the procedure is seedless.
    """
    f = _trim(np.asarray(f, dtype=np.int64) % p)
    if f.size <= 1:
        return []
    if p <= 3:
        return [r for r in range(p) if _eval(f, r, p) == 0]
    x = np.array([0, 1], dtype=np.int64)
    g = poly_gcd(_poly_sub(poly_powmod(x, p, f, p), x, p), f, p)
    roots = []
    _split_linear(g, p, roots)
    return sorted(roots)


def _eval(f, r, p):
    acc = 0
    for c in f[::-1]:
        acc = (acc * r + int(c)) % p
    return acc


def _split_linear(g, p, out):
    d = g.size - 1
    if d <= 0:
        return
    if d == 1:
        out.append(int((-g[0] * pow(int(g[1]), -1, p)) % p))
        return
    half = (p - 1) // 2
    for a in itertools.count():
        h = poly_powmod(np.array([a % p, 1], dtype=np.int64), half, g, p)
        h = _poly_sub(h, np.array([1], dtype=np.int64), p)
        c = poly_gcd(h, g, p)
        if 0 < c.size - 1 < d:
            _split_linear(c, p, out)
            _split_linear(poly_divmod(g, c, p)[0], p, out)
            return
        if a > 4 * p + 64:
            raise ArithmeticError("root splitting did not terminate")


# ------------------------------------------------------ incremental row spaces

class RowSpaceBuilder:
    """Accumulates row batches into a reduced echelon basis over F_p.

    Rows may be given as scipy sparse matrices; reduction against the
    current basis is a single sparse @ dense product per batch, so the
    cost is dominated by the final rank rather than the row count.
    """

    def __init__(self, ncols, p):
        self.p = int(p)
        self.ncols = int(ncols)
        self.basis = np.zeros((0, ncols), dtype=np.int64)
        self.pivots = np.zeros(0, dtype=np.int64)

    @property
    def rank(self):
        return self.basis.shape[0]

    def add(self, rows):
        p = self.p
        sparse = sp.issparse(rows)
        if sparse:
            rows = rows.tocsr()
            rows.data %= p
            dense = rows.toarray().astype(np.int64)
            if self.rank:
                coeff = rows[:, self.pivots].tocsr()
                width = int(np.diff(coeff.indptr).max()) if coeff.shape[0] else 0
                if width * (p - 1) ** 2 < _F53:
                    red = coeff.astype(np.float64) @ self.basis.astype(np.float64)
                    red = np.fmod(np.asarray(red), p).astype(np.int64)
                else:
                    red = matmul_mod(coeff.toarray().astype(np.int64), self.basis, p)
                dense = (dense - red) % p
        else:
            dense = np.atleast_2d(np.asarray(rows, dtype=np.int64)) % p
            if self.rank:
                dense = (dense - matmul_mod(dense[:, self.pivots], self.basis, p)) % p
        keep = np.flatnonzero(dense.any(axis=1))
        if keep.size == 0:
            return 0
        new, piv = rref_mod(dense[keep], p)
        if not piv:
            return 0
        piv = np.asarray(piv, dtype=np.int64)
        if self.rank:
            self.basis = (self.basis - matmul_mod(self.basis[:, piv], new, p)) % p
        self.basis = np.concatenate([self.basis, new], axis=0)
        self.pivots = np.concatenate([self.pivots, piv])
        return len(piv)

    def kernel_basis(self):
        """Rows spanning {x : b . x = 0 for every accumulated row b}."""
        p = self.p
        pivset = set(int(c) for c in self.pivots)
        free = [c for c in range(self.ncols) if c not in pivset]
        out = np.zeros((len(free), self.ncols), dtype=np.int64)
        if free:
            out[np.arange(len(free)), free] = 1
            if self.rank:
                out[:, self.pivots] = (-self.basis[:, free].T) % p
        return out

