"""Twisted H^1(S_2, G) of a symmetric pair and H^2(G, F_p) by cochains.

H^1: the cocycles are Z = {s : theta(s) = s^-1}, and g in G acts on Z by
g . s = theta(g^-1) s g. H^1(S_2, G) is the orbit set; the orbit of the
identity is the coboundary set {theta(g^-1) g}.

H^2: normalized inhomogeneous cochains with trivial F_p coefficients.
"""
import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import config
from .errors import CapExceededError, NotInvariantError, NotNormalError
from .groups import (double_coset_labels, find_involutive_automorphisms, orbit_partition,
                     quotient_group)
from .modlinalg import RowSpaceBuilder, nullspace_mod, rank_mod, solve_rows_mod

# ------------------------------------------------------------------------ H^1


@dataclass
class CohomologySet:
    group: object
    theta: object
    z: np.ndarray          # cocycle ids, sorted
    labels: np.ndarray     # class label per entry of z
    reps: np.ndarray       # smallest cocycle id of each class
    sizes: np.ndarray

    def __len__(self):
        return len(self.reps)

    @property
    def trivial_class(self):
        return int(self.labels[0])  # z[0] is the identity

    def class_of(self, ids):
        return self.labels[np.searchsorted(self.z, np.asarray(ids, dtype=np.int64))]

    def to_json(self):
        return {
            "group": self.group.name,
            "theta": self.theta.name,
            "z_size": int(self.z.size),
            "class_count": len(self),
            "classes": [{"rep": int(r), "size": int(s)} for r, s in zip(self.reps, self.sizes)],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def cocycles(G, theta):
    return np.flatnonzero(theta.images == G.inv)


def twisted_action(G, theta, g, s):
    """g . s = theta(g^-1) s g."""
    return G.mul(G.mul(theta.images[G.inv[g]], s), g)


def h1_s2(G, theta):
    """H^1(S_2, G) for the involution theta, as a CohomologySet."""
    z = cocycles(G, theta)
    maps = []
    for g in G.gens:
        img = twisted_action(G, theta, g, z)
        pos = np.searchsorted(z, img)
        pos = np.minimum(pos, z.size - 1)
        if not np.array_equal(z[pos], img):
            raise AssertionError("twisted action leaves the cocycle set")
        maps.append(pos)
    labels, mins = orbit_partition(z.size, maps)
    sizes = np.bincount(labels, minlength=len(mins))
    return CohomologySet(G, theta, z, labels, z[mins], sizes)


def coboundaries(G, theta):
    """Sorted ids of {theta(g^-1) g : g in G}."""
    g = G.elements()
    return np.unique(G.mul(theta.images[G.inv[g]], g))


def check_action_laws(G, theta, samples=200, seed=0):
    """Identity and compatibility laws of the twisted action on random draws.

    g . s is a right action: h . (g . s) = (g h) . s.
    """
    z = cocycles(G, theta)
    rng = np.random.default_rng(seed)
    s = z[rng.integers(0, z.size, samples)]
    g = rng.integers(0, G.order, samples)
    h = rng.integers(0, G.order, samples)
    ident = np.array_equal(twisted_action(G, theta, 0, s), s)
    lhs = twisted_action(G, theta, h, twisted_action(G, theta, g, s))
    rhs = twisted_action(G, theta, G.mul(g, h), s)
    stays = np.isin(twisted_action(G, theta, g, s), z)
    return bool(ident and np.array_equal(lhs, rhs) and stays.all())


def _require_invariant(theta, D):
    if not theta.preserves(D):
        raise NotInvariantError("subgroup is not theta-invariant")


def h1_kernel(G, D, theta):
    """Number of classes of H^1(S_2, D) mapping to the trivial class of H^1(S_2, G)."""
    _require_invariant(theta, D)
    local = h1_s2(D.group, theta.restrict(D))
    reps = D.to_parent(local.reps)
    return int(np.isin(reps, coboundaries(G, theta)).sum())


def gamma_inv(G, D, theta):
    """Ids of {g : g theta(g^-1) in D}."""
    g = G.elements()
    return np.flatnonzero(D.mask[G.mul(g, theta.images[G.inv[g]])])


def gamma_inv_cosets(G, D, theta, check=True):
    """|D \\ G^inv / G^theta|; equals h1_kernel (asserted when ``check``)."""
    _require_invariant(theta, D)
    H = theta.fixed_subgroup()
    labels, _ = double_coset_labels(G, D, H)
    count = int(np.unique(labels[gamma_inv(G, D, theta)]).size)
    if check:
        k = h1_kernel(G, D, theta)
        if k != count:
            raise AssertionError(f"double-coset count {count} differs from kernel size {k}")
    return count


def h1_extension_bounds(G, N, theta, extensions=None):
    """Sizes entering the subgroup and quotient bounds for N normal and theta-invariant:

        |H^1(N)| <= |H^1(G)| [G:N]
        |H^1(G)| <= |H^1(G/N)| max_tau |H^1_tau(N)|

    tau runs over every involutive automorphism of N, identity included.
    ``extensions`` (involutions of G) is used only to flag which tau are
    restrictions of an involution of G.
    """
    _require_invariant(theta, N)
    if not N.is_normal():
        raise NotNormalError("quotient bound needs a normal subgroup")
    Q, _ = quotient_group(G, N)
    hG = len(h1_s2(G, theta))
    hN = len(h1_s2(N.group, theta.restrict(N)))
    hQ = len(h1_s2(Q, theta.induced_on_quotient(Q)))
    taus = find_involutive_automorphisms(N.group)
    sizes = [len(h1_s2(N.group, t)) for t in taus]
    restricted = set()
    for t in extensions or ():
        if t.preserves(N):
            restricted.add(t.restrict(N).images.tobytes())
    index = G.order // N.order
    return {
        "h1_G": hG, "h1_N": hN, "h1_Q": hQ, "index": index,
        "max_tau": max(sizes), "tau_complete": bool(taus.complete),
        "tau_extends": [t.images.tobytes() in restricted for t in taus],
        "subgroup_ok": hN <= hG * index,
        "quotient_ok": hG <= hQ * max(sizes),
    }


def involutions_of_order_two(G):
    """Number of elements of order dividing 2 (|A_2| for abelian A)."""
    return int((G.element_orders() <= 2).sum())


# ------------------------------------------------------------------------ H^2


def coboundary_d2(G, p):
    """Sparse matrix of d: C^1 -> C^2, (df)(g,h) = f(h) - f(gh) + f(g)."""
    m = G.order - 1
    if m == 0:
        return sp.csr_matrix((0, 0), dtype=np.int64)
    nz = np.arange(1, G.order)
    g = np.repeat(nz, m)
    h = np.tile(nz, m)
    gh = G.mul(g, h)
    row = np.arange(m * m)
    rows = [row, row, row]
    cols = [h - 1, gh - 1, g - 1]
    vals = [np.ones(m * m), -np.ones(m * m), np.ones(m * m)]
    keep = gh != 0
    rows[1], cols[1], vals[1] = row[keep], cols[1][keep], vals[1][keep]
    M = sp.coo_matrix((np.concatenate(vals).astype(np.int64),
                       (np.concatenate(rows), np.concatenate(cols))), shape=(m * m, m))
    M = M.tocsr()
    M.data %= p
    return M


def coboundary_d3(G, p, last=None):
    """Sparse d: C^2 -> C^3, (df)(g,h,k) = f(h,k) - f(gh,k) + f(g,hk) - f(g,h).

    Rows are indexed by (g, h, k) with g, h non-identity and k running over
    ``last`` (all non-identity elements by default).
    """
    m = G.order - 1
    nz = np.arange(1, G.order)
    ks = nz if last is None else np.asarray([k for k in last if k != 0], dtype=np.int64)
    nk = ks.size
    g = np.repeat(nz, m * nk)
    h = np.tile(np.repeat(nz, nk), m)
    k = np.tile(ks, m * m)
    gh = G.mul(g, h)
    hk = G.mul(h, k)
    row = np.arange(g.size)
    parts = [
        (row, (h - 1) * m + (k - 1), 1, np.ones(row.size, dtype=bool)),
        (row, (gh - 1) * m + (k - 1), -1, gh != 0),
        (row, (g - 1) * m + (hk - 1), 1, hk != 0),
        (row, (g - 1) * m + (h - 1), -1, np.ones(row.size, dtype=bool)),
    ]
    rr = np.concatenate([r[mask] for r, _, _, mask in parts])
    cc = np.concatenate([c[mask] for _, c, _, mask in parts])
    vv = np.concatenate([np.full(int(mask.sum()), v, dtype=np.int64) for _, _, v, mask in parts])
    M = sp.coo_matrix((vv, (rr, cc)), shape=(g.size, m * m)).tocsr()
    M.sum_duplicates()
    M.data %= p
    M.eliminate_zeros()
    return M


def _row_space(M, p, batch=512):
    """RowSpaceBuilder filled with the rows of sparse M in batches."""
    rs = RowSpaceBuilder(M.shape[1], p)
    for s in range(0, M.shape[0], batch):
        rs.add(M[s:s + batch])
        if rs.rank == M.shape[1]:
            break
    return rs


@dataclass
class H2Data:
    dim: int
    z2: np.ndarray       # basis of cocycles (rows)
    b2_rank: int
    complement: np.ndarray   # cocycles spanning a complement of B^2 in Z^2
    b2: np.ndarray       # basis of coboundaries (rows)


def _h2_data(G, p, check_complex=True):
    caps = config.get_caps()
    if G.order > caps.h2:
        raise CapExceededError(f"H^2 computation above cap {caps.h2} (order {G.order})")
    m = G.order - 1
    if m == 0:
        z = np.zeros((0, 0), dtype=np.int64)
        return H2Data(0, z, 0, z, z)
    d2 = coboundary_d2(G, p)
    if check_complex:
        d3 = coboundary_d3(G, p)
        prod = (d3 @ d2).tocsr()
        prod.data %= p
        prod.eliminate_zeros()
        if prod.nnz:
            raise AssertionError("d3 d2 is not zero")
    # the cocycle condition for all (g, h, k) follows from the k in a generating set
    d3s = coboundary_d3(G, p, last=G.gens)
    z2 = _row_space(d3s, p).kernel_basis()
    b2 = _row_space(d2.T.tocsr(), p)
    dim = z2.shape[0] - b2.rank
    # complement of B^2 inside Z^2
    comp = RowSpaceBuilder(m * m, p)
    if b2.rank:
        comp.add(b2.basis)
    chosen = []
    for row in z2:
        if comp.add(row[None, :]):
            chosen.append(row)
    complement = np.array(chosen, dtype=np.int64).reshape(-1, m * m)
    if complement.shape[0] != dim:
        raise AssertionError("complement dimension mismatch")
    return H2Data(dim, z2, b2.rank, complement, b2.basis)


def h2_fp_dimension(G, p, check_complex=True):
    """dim H^2(G, F_p) for trivial coefficients."""
    return _h2_data(G, p, check_complex).dim


def h2_fp_dimension_full(G, p):
    """Same dimension using every cocycle row (no generator reduction); for cross-checks."""
    if G.order > config.get_caps().h2:
        raise CapExceededError("H^2 computation above cap")
    if G.order == 1:
        return 0
    d2 = coboundary_d2(G, p)
    d3 = coboundary_d3(G, p)
    r3 = _row_space(d3, p).rank
    r2 = rank_mod(d2.toarray(), p)
    return (G.order - 1) ** 2 - r3 - r2


def h2_invariants_dimension(G2, N, p):
    """dim of the G2-invariants in H^2(N, F_p), G2 acting by conjugation on N.

    The action on a cocycle is f -> f^g, f^g(x, y) = f(g^-1 x g, g^-1 y g);
    the invariants are computed on H^2 = complement of B^2 in Z^2.
    """
    if not N.is_normal():
        raise NotNormalError("conjugation action needs a normal subgroup")
    NG = N.group
    data = _h2_data(NG, p)
    h = data.dim
    if h == 0:
        return 0
    m = NG.order - 1
    U = data.complement
    W = np.concatenate([U, data.b2], axis=0)
    blocks = []
    for g in G2.gens:
        # perm[x] = local id of g^-1 x g
        conj = N.to_local(G2.conj(N.members, g))
        nz = np.arange(1, NG.order)
        cx = conj[nz] - 1
        col = (cx[:, None] * m + cx[None, :]).ravel()
        moved = U[:, col]
        C = solve_rows_mod(W, moved, p)
        T = C[:, :h]
        blocks.append(((T - np.eye(h, dtype=np.int64)) % p).T)
    stack = np.concatenate(blocks, axis=0)
    return int(nullspace_mod(stack, p).shape[0])


def h2_lemma_checks(G2, N, p):
    """Compare H^2 dimensions along 1 -> N -> G2 -> G2/N -> 1.

    If p does not divide |N|: dim H^2(G2) = dim H^2(G2/N).
    If p does not divide |G2/N|: dim H^2(G2) = dim H^2(N)^{G2/N}.
    """
    Q, _ = quotient_group(G2, N)
    d2 = h2_fp_dimension(G2, p)
    out = {"order": G2.order, "kernel_order": N.order, "quotient_order": Q.order,
           "p": p, "dim_middle": d2, "checks": []}
    if N.order % p:
        d3 = h2_fp_dimension(Q, p)
        out["checks"].append({"case": "kernel coprime", "dim_other": d3, "ok": d2 == d3})
    if Q.order % p:
        d1 = h2_invariants_dimension(G2, N, p)
        out["checks"].append({"case": "quotient coprime", "dim_other": d1, "ok": d2 == d1})
    out["ok"] = all(c["ok"] for c in out["checks"])
    return out
