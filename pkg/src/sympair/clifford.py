"""Clifford theory over a normal subgroup, the Mackey count of invariants of an
induced character, tensor factorization over a normal p-subgroup, and a
step-by-step replay of the multiplicity bound argument on a concrete
(G, theta, rho, p)."""
import json
from dataclasses import dataclass, field

import numpy as np

from . import config
from .chartab import (constituents, dual, induce, invariant_dimension,
                      restrict, table_of, tensor, twist)
from .cohomology import gamma_inv, gamma_inv_cosets, h1_kernel, h1_s2, h2_fp_dimension
from .errors import NotNormalError, PreconditionError, VerificationError
from .groups import Subgroup, double_coset_labels, p_radical, quotient_group


def _values_on(chi, H, ids):
    """chi (a character of H.group) at parent ids lying in H."""
    return chi.at(H.to_local(ids))


def _average(chi, H, ids):
    """(1/|ids|) sum chi over parent ids of a subgroup of H, mod ell."""
    ell = chi.table.ell
    s = int(_values_on(chi, H, ids).sum() % ell)
    return s * pow(len(ids), -1, ell) % ell


def _inner_on(a, A, b, B, ids):
    """(1/|K|) sum_{k in K} a(k) b(k^-1), K given by parent ids in A and B."""
    ell = a.table.ell
    G = A.parent
    va = _values_on(a, A, ids)
    vb = _values_on(b, B, G.inv[ids])
    s = int((va * vb % ell).sum() % ell)
    return s * pow(len(ids), -1, ell) % ell


def tau_stabilizer(G, N, tau):
    """{g : tau(g^-1 n g) = tau(n) for all n in N} (tau a character of N.group)."""
    ntab = tau.table
    reps = N.to_parent(ntab.classes.reps)
    g = G.elements()
    moved = G.mul(G.mul(G.inv[g][:, None], reps[None, :]), g[:, None])
    vals = tau.at(N.to_local(moved.ravel())).reshape(moved.shape)
    keep = (vals == tau.values[None, :]).all(axis=1)
    return Subgroup(G, np.flatnonzero(keep))


@dataclass
class CliffordData:
    tau: object          # character of N.group
    tau_index: int
    delta: Subgroup
    sigma: object        # character of delta.group


def clifford_stabilizer(G, N, rho, tau=None):
    """(tau, Delta = G_tau, sigma) with rho = Ind_Delta^G sigma (asserted).

    tau defaults to the lowest-index constituent of Res_N rho.
    """
    if not N.is_normal():
        raise NotNormalError("Clifford theory needs a normal subgroup")
    res = restrict(rho, N)
    if tau is None:
        tau = constituents(res)[0][0]
    ntab = tau.table
    tau_index = ntab.index_of(tau)
    D = tau_stabilizer(G, N, tau)
    if not D.mask[N.members].all():
        raise VerificationError("stabilizer does not contain N")
    dtab = table_of(D, rho.table)
    hits = []
    for sigma in dtab.irreducibles:
        if _inner_on(sigma, D, tau, N, N.members) == 0:
            continue
        if _inner_on(rho, G.whole(), sigma, D, D.members) == 0:
            continue
        hits.append(sigma)
    if len(hits) != 1:
        raise VerificationError(f"expected one Clifford correspondent, found {len(hits)}")
    sigma = hits[0]
    if induce(sigma, G) != rho:
        raise VerificationError("induction does not reproduce rho")
    if rho.degree != (G.order // D.order) * sigma.degree:
        raise VerificationError("degree relation fails")
    return CliffordData(tau, tau_index, D, sigma)


def mackey_invariants(G, D, sigma, theta, check=True):
    """Sum over D\\G/G^theta of dim sigma^{D cap g G^theta g^-1}.

    Returns (total, [(rep, contribution)]); with ``check`` the total is
    compared with dim (Ind sigma)^{G^theta}.
    """
    H = theta.fixed_subgroup()
    _, reps = double_coset_labels(G, D, H)
    parts = []
    for g in reps:
        conj = G.mul(G.mul(int(g), H.members), G.inv[int(g)])
        K = np.intersect1d(conj, D.members)
        parts.append((int(g), int(_average(sigma, D, K))))
    total = sum(c for _, c in parts)
    if check:
        direct = invariant_dimension(induce(sigma, G), H)
        if direct != total:
            raise VerificationError(f"Mackey sum {total} differs from direct value {direct}")
    return total, parts


@dataclass
class Factorization:
    pi1: object
    pi2: object
    index1: int
    index2: int


def tensor_factorize(G, N, rho, p=None):
    """First (pi1, pi2) in table order with rho = pi1 pi2, Res_N pi1 irreducible
    and N acting trivially on pi2; None when there is none."""
    ok, _ = _isotypic(rho, N)
    if not ok:
        raise PreconditionError("restriction to N is not isotypic")
    if p is not None and N.order != p ** _plog(N.order, p):
        raise PreconditionError("N is not a p-group")
    tab = rho.table
    irr = tab.irreducibles
    ntab = table_of(N, tab)
    first, second = [], []
    for k, chi in enumerate(irr):
        res = restrict(chi, N)
        if ntab.inner(res.values, res.values) == 1:
            first.append(k)
        if (res.values == chi.degree).all():
            second.append(k)
    for i in first:
        for j in second:
            if irr[i].degree * irr[j].degree != rho.degree:
                continue
            if tensor(irr[i], irr[j]) == rho:
                return Factorization(irr[i], irr[j], i, j)
    return None


def _plog(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _isotypic(rho, N):
    parts = constituents(restrict(rho, N))
    return len(parts) == 1, parts


def factorization_expected(G, N, p):
    """Whether the hypotheses that guarantee a tensor factorization hold:
    p odd, N a nontrivial normal p-group and H^2(G/N, F_p) = 0.

    Returns None when G/N is above the H^2 cap (undecided)."""
    if p % 2 == 0 or N.order == 1:
        return False
    Q, _ = quotient_group(G, N)
    if Q.order > config.get_caps().h2:
        return None
    return h2_fp_dimension(Q, p, check_complex=False) == 0


# -------------------------------------------------------------- the trace


@dataclass
class TraceReport:
    group: str
    theta: str
    rho_index: int
    p: int
    steps: list = field(default_factory=list)
    early_exit: bool = False

    @property
    def ok(self):
        return all(s["ok"] for s in self.steps)

    def add(self, step, description, ok, **values):
        rec = {"step": step, "description": description, "values": values, "ok": bool(ok)}
        self.steps.append(rec)
        if not ok:
            raise VerificationError(f"trace step {step} failed: {description} {values}",
                                    step=step, instance=self.to_json())
        return rec

    def to_json(self):
        return {"group": self.group, "theta": self.theta, "rho": self.rho_index,
                "p": self.p, "early_exit": self.early_exit, "ok": self.ok,
                "steps": self.steps}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def main_theorem_trace(G, theta, rho, p):
    """Replay the reduction for one irreducible rho; any failing step raises."""
    if p % 2 == 0:
        raise PreconditionError("the trace needs an odd prime")
    tab = rho.table
    rep = TraceReport(G.name, theta.name, tab.index_of(rho), p)
    H = theta.fixed_subgroup()
    dim_rho = invariant_dimension(rho, H)

    N = p_radical(G, p)
    pgroup = N.order == p ** _plog(N.order, p)
    rep.add(1, "N = Rad_p(G) is a normal p-subgroup", N.is_normal() and pgroup
            and theta.preserves(N), order=N.order)

    Ntheta = np.intersect1d(N.members, H.members)
    d_n = _average(rho, G.whole(), Ntheta)
    if d_n == 0:
        rep.early_exit = True
        rep.add(2, "rho has no N^theta-invariants; nothing to bound", dim_rho == 0,
                dim_N_theta=d_n, dim_rho=dim_rho)
        return rep
    rep.add(2, "rho has N^theta-invariants", True, dim_N_theta=d_n, dim_rho=dim_rho)

    res = restrict(rho, N)
    tau = None
    for t, _ in constituents(res):
        if _average(t, N, Ntheta):
            tau = t
            break
    rep.add(3, "constituent tau of Res_N rho with N^theta-invariants", tau is not None,
            tau_index=None if tau is None else tau.table.index_of(tau),
            tau_degree=None if tau is None else tau.degree)

    theta_n = theta.restrict(N)
    lp = dual(tau) == twist(tau, theta_n)
    rep.add(4, "dual(tau) = tau o theta on N", lp)

    cl = clifford_stabilizer(G, N, rho, tau=tau)
    D = cl.delta
    rep.add(5, "Delta = G_tau is theta-stable", theta.preserves(D), delta_order=D.order)

    total, parts = mackey_invariants(G, D, cl.sigma, theta, check=False)
    rep.add(6, "dim rho^{G^theta} equals the double-coset sum", total == dim_rho,
            dim_rho=dim_rho, mackey_total=total, cosets=len(parts))

    ginv = np.zeros(G.order, dtype=bool)
    ginv[gamma_inv(G, D, theta)] = True
    support = [g for g, c in parts if c]
    rep.add(7, "every contributing double coset lies in G^inv", all(ginv[g] for g in support),
            contributing=len(support))

    count = gamma_inv_cosets(G, D, theta, check=False)
    kern = h1_kernel(G, D, theta)
    rep.add(8, "|Delta\\G^inv/G^theta| = |ker(H1(S2,Delta) -> H1(S2,G))|", count == kern,
            cosets=count, kernel=kern)

    h1d = len(h1_s2(D.group, theta.restrict(D)))
    best = max([c for g, c in parts if ginv[g]], default=0)
    rep.add(9, "dim rho^{G^theta} <= |H1(S2,Delta)| * max contribution",
            dim_rho <= h1d * best, dim_rho=dim_rho, h1_delta=h1d, max_contribution=best)
    return rep
