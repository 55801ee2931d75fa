"""Symmetric pairs (G, theta): multiplicities nu and mu, the odd-order
Gelfand-Kazhdan and polar-decomposition checks, and the Lapid-Prasad test."""
import json
from dataclasses import dataclass

import numpy as np

from .chartab import (character_table, dual, is_isotypic_restriction, table_of,
                      twist)
from .errors import EvenOrderError, PreconditionError
from .groups import Automorphism, double_coset_labels, p_radical
from .modlinalg import matmul_mod


class SymmetricPair:
    """A finite group with an involutive automorphism."""

    def __init__(self, group, theta, label=None):
        if theta.group is not group:
            raise PreconditionError("involution of a different group")
        if not theta.is_involution:
            raise PreconditionError("theta does not square to the identity")
        self.group = group
        self.theta = theta
        self.label = label or theta.name
        self._fixed = None
        self._anti = None

    @property
    def fixed(self):
        """The symmetric subgroup G^theta."""
        if self._fixed is None:
            self._fixed = self.theta.fixed_subgroup()
        return self._fixed

    @property
    def anti_fixed(self):
        """Ids of {g : theta(g) = g^-1}."""
        if self._anti is None:
            G = self.group
            self._anti = np.flatnonzero(self.theta.images == G.inv)
        return self._anti

    @property
    def table(self):
        return character_table(self.group)

    @property
    def odd(self):
        return self.group.order % 2 == 1

    def __repr__(self):
        return f"SymmetricPair({self.group.name}, {self.label})"


# --------------------------------------------------------------- multiplicities


def invariant_dims(pair, H=None):
    """dim rho^H for every irreducible rho (table order); H defaults to G^theta."""
    tab = pair.table
    H = pair.fixed if H is None else H
    ell = tab.ell
    cnt = np.bincount(tab.classes.class_of[H.members], minlength=len(tab)) % ell
    d = matmul_mod(tab.matrix, cnt[:, None], ell)[:, 0]
    return d * pow(H.order, -1, ell) % ell


def twisted_dims(pair, H=None):
    """Matrix of <Res_H rho, chi> over irreducibles rho and linear chi of H."""
    tab = pair.table
    H = pair.fixed if H is None else H
    ell = tab.ell
    sub = table_of(H, tab)
    lin = np.array([c.values for c in sub.irreducibles if c.degree == 1], dtype=np.int64)
    R = tab.matrix[:, tab.classes.class_of[H.to_parent(sub.classes.reps)]]
    w = lin[:, sub.classes.inverse_class] * (sub.sizes % ell) % ell
    m = matmul_mod(R, w.T, ell)
    return m * pow(H.order, -1, ell) % ell


def nu(pair):
    """max over irreducible rho of dim rho^{G^theta}."""
    return int(invariant_dims(pair).max())


def mu(pair):
    """max over irreducible rho and linear chi of G^theta of dim rho^{G^theta, chi}."""
    return int(twisted_dims(pair).max())


def nu_prime(G, p, involutions):
    """max over the given involutions of dim rho^{G^theta}, over the irreducibles
    whose restriction to Rad_p(G) is isotypic."""
    tab = character_table(G)
    R = p_radical(G, p)
    keep = np.array([is_isotypic_restriction(rho, R)[0] for rho in tab.irreducibles])
    best = 0
    for theta in involutions:
        dims = invariant_dims(SymmetricPair(G, theta))
        best = max(best, int(dims[keep].max()))
    return best


def nu_over(G, involutions, complete):
    """(nu(G), label) where label says whether the involution list is exhaustive."""
    best = max(nu(SymmetricPair(G, t)) for t in involutions)
    return best, "true-max" if complete else "catalog-max"


# ----------------------------------------------------------- odd-order results


def _power_each(G, a, k):
    """a[i] ** k[i] for arrays of ids and non-negative exponents."""
    a = np.asarray(a, dtype=np.int64)
    k = np.asarray(k, dtype=np.int64).copy()
    out = np.zeros_like(a)
    base = a.copy()
    while k.any():
        odd = (k & 1).astype(bool)
        out[odd] = G.mul(out[odd], base[odd])
        k >>= 1
        live = k > 0
        base[live] = G.mul(base[live], base[live])
    return out


def polar_decompose_all(pair):
    """(o, s) arrays over every g, with s = (theta(g^-1) g)^((|G|+1)/2) and o = g s^-1."""
    G = pair.group
    if G.order % 2 == 0:
        raise EvenOrderError("polar decomposition needs odd order")
    g = G.elements()
    base = G.mul(pair.theta.images[G.inv[g]], g)
    e = ((G.order + 1) // 2) % G.element_orders()[base]
    s = _power_each(G, base, e)
    o = G.mul(g, G.inv[s])
    return o, s


def polar_decompose(pair, g):
    """(o, s) with theta(o) = o, theta(s) = s^-1 and o s = g (all asserted)."""
    o, s = polar_decompose_all(pair)
    o, s = int(o[g]), int(s[g])
    G, th = pair.group, pair.theta.images
    if th[o] != o or th[s] != G.inv[s] or int(G.mul(o, s)) != int(g):
        raise AssertionError("polar decomposition identities fail")
    return o, s


def polar_check(pair):
    """Counts of failures of the three identities over all g (all zero when it works)."""
    G, th = pair.group, pair.theta.images
    o, s = polar_decompose_all(pair)
    return {
        "fixed": int((th[o] != o).sum()),
        "anti": int((th[s] != G.inv[s]).sum()),
        "product": int((G.mul(o, s) != G.elements()).sum()),
    }


def gelfand_kazhdan_check(pair):
    """(holds, violators): does every g satisfy theta(g^-1) in H g H, H = G^theta?

    Decided through H\\G/H double-coset labels, which is the same as searching
    all (h1, h2) in H x H.
    """
    G = pair.group
    H = pair.fixed
    labels, _ = double_coset_labels(G, H, H)
    g = G.elements()
    bad = np.flatnonzero(labels[g] != labels[pair.theta.images[G.inv[g]]])
    return bad.size == 0, [int(x) for x in bad]


@dataclass
class LPRow:
    index: int
    degree: int
    inv_dim: int
    distinguished: bool
    dual_twist_equal: bool


def lapid_prasad_check(pair):
    """Per irreducible: distinguished?, and is dual(rho) = twist(rho, theta)?"""
    dims = invariant_dims(pair)
    rows = []
    for k, rho in enumerate(pair.table.irreducibles):
        eq = dual(rho) == twist(rho, pair.theta)
        rows.append(LPRow(k, rho.degree, int(dims[k]), bool(dims[k] > 0), bool(eq)))
    return rows


# -------------------------------------------------------------------- reports


@dataclass
class MultiplicityReport:
    group: str
    involution: str
    ell: int
    rows: list
    nu: int
    mu: int
    catalog_complete: bool

    def to_json(self):
        return {
            "group": self.group,
            "involution": self.involution,
            "ell": self.ell,
            "rows": self.rows,
            "nu": self.nu,
            "mu": self.mu,
            "catalog_complete": self.catalog_complete,
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def multiplicity_report(pair, catalog_complete=False):
    dims = invariant_dims(pair)
    tw = twisted_dims(pair)
    lp = lapid_prasad_check(pair)
    rows = [{"degree": r.degree, "inv_dim": int(dims[r.index]),
             "distinguished": r.distinguished,
             "lp_ok": (not r.distinguished) or r.dual_twist_equal} for r in lp]
    rep = MultiplicityReport(pair.group.name, pair.label, pair.table.ell, rows,
                             int(dims.max()), int(tw.max()), bool(catalog_complete))
    if rep.nu != max(r["inv_dim"] for r in rows) or rep.mu < rep.nu:
        raise AssertionError("report aggregates are inconsistent")
    return rep


def product_involution(P, thetas):
    """Componentwise involution on a direct ProductGroup."""
    comps = P.components(P.elements())
    img = sum(P.embed(k, t.images[c]) for k, (t, c) in enumerate(zip(thetas, comps)))
    name = "x".join(t.name or "?" for t in thetas)
    return Automorphism(P, img, name=name)
