"""Character tables over a modular splitting field F_ell, and character calculus.

Tables are computed with the Dixon-Schneider method: the central characters
omega_chi(C_k) = |C_k| chi(g_k) / chi(1) are the common eigenvectors of the
class multiplication matrices, which we split one class at a time over F_ell.
All character values are residues mod ell. Since ell > |G|, every inner
product of genuine characters is an integer in [0, |G|) and so is determined
by its residue.
"""
import json
import math
from dataclasses import dataclass

import numpy as np
from sympy import isprime
from sympy.ntheory import primitive_root

from . import config
from .errors import (CapExceededError, NonLinearCharacterError, NotNormalError,
                     SplittingPrimeError, SubgroupMismatchError)
from .groups import FiniteGroup, Subgroup, SubsetGroup
from .modlinalg import (charpoly_mod, matmul_mod, nullspace_mod, poly_roots_mod,
                        rref_mod)

ELL_BOUND = 2 ** 31


@dataclass(frozen=True)
class SplittingModulus:
    ell: int
    exponent: int
    zeta: int  # fixed primitive exponent-th root of unity mod ell


def splitting_modulus(order, exponent):
    """Smallest prime ell = 1 mod exponent with ell > max(2 sqrt(order), order)."""
    bound = max(order, math.isqrt(4 * order))
    k = bound // exponent + 1
    while True:
        ell = k * exponent + 1
        if ell >= ELL_BOUND:
            raise SplittingPrimeError(f"no splitting prime below 2^31 for exponent {exponent}")
        if isprime(ell):
            g = int(primitive_root(ell))
            return SplittingModulus(ell, exponent, pow(g, (ell - 1) // exponent, ell))
        k += 1


def _group_of(H):
    return H.group if isinstance(H, Subgroup) else H


def character_table(G, ell=None):
    """Character table of G (a FiniteGroup or Subgroup), cached on the group.

    ``ell`` forces the splitting prime; subgroup tables are built over the
    parent's prime so characters of both live in the same field.
    """
    G = _group_of(G)
    key = ("chartab", ell)
    if key not in G._cache:
        tab = CharacterTable(G, ell)
        G._cache[key] = tab
        G._cache[("chartab", tab.ell)] = tab
    return G._cache[key]


def table_of(H, like):
    """Table of subgroup H over the same prime as table ``like``."""
    return character_table(_group_of(H), ell=like.ell)


class CharacterTable:
    def __init__(self, G, ell=None):
        caps = config.get_caps()
        if G.order > caps.order:
            raise CapExceededError(f"group order {G.order} above cap {caps.order}")
        self.group = G
        self.classes = G.classes()
        r = len(self.classes)
        if r > caps.classes:
            raise CapExceededError(f"{r} classes above cap {caps.classes}")
        e = G.exponent()
        if ell is None:
            self.modulus = splitting_modulus(G.order, e)
        else:
            ell = int(ell)
            if (ell - 1) % e or ell <= G.order or not isprime(ell):
                raise SplittingPrimeError(f"{ell} does not split a group of exponent {e}")
            g = int(primitive_root(ell))
            self.modulus = SplittingModulus(ell, e, pow(g, (ell - 1) // e, ell))
        self.ell = self.modulus.ell
        self.sizes = self.classes.sizes
        self._irr = None
        self._class_mats = {}

    def __len__(self):
        return len(self.classes)

    # ---------------------------------------------------------- construction
    def class_matrix(self, i):
        """M_i with M_i[j, k] = #{x in C_i : x^-1 g_k in C_j}."""
        if i not in self._class_mats:
            G, cl = self.group, self.classes
            r = len(cl)
            x = G.inv[cl.members(i)]
            prod = G.mul(x[:, None], cl.reps[None, :])
            j = cl.class_of[prod]
            k = np.broadcast_to(np.arange(r), j.shape)
            M = np.bincount((j * r + k).ravel(), minlength=r * r).reshape(r, r)
            self._class_mats[i] = M.astype(np.int64)
        return self._class_mats[i]

    def _central_characters(self):
        ell = self.ell
        r = len(self.classes)
        done = []
        todo = [np.eye(r, dtype=np.int64)]
        for i in range(1, r):
            if not todo:
                break
            A = self.class_matrix(i).T % ell
            nxt = []
            for V in todo:
                _, piv = rref_mod(V, ell)
                R = matmul_mod(V, A, ell)[:, piv]
                chi = charpoly_mod(R, ell)
                roots = poly_roots_mod(chi, ell)
                pieces = []
                for lam in roots:
                    shifted = (R - lam * np.eye(len(R), dtype=np.int64)) % ell
                    C = nullspace_mod(shifted.T, ell)
                    pieces.append(rref_mod(matmul_mod(C, V, ell), ell)[0])
                if sum(len(P) for P in pieces) != len(V):
                    raise ArithmeticError("class matrices failed to diagonalise over F_ell")
                for P in pieces:
                    (done if len(P) == 1 else nxt).append(P)
            todo = nxt
        done.extend(todo)
        if any(len(V) != 1 for V in done) or len(done) != r:
            raise ArithmeticError("central characters did not separate")
        return [V[0] for V in done]

    def _build(self):
        ell = self.ell
        n = self.group.order
        h = self.sizes % ell
        hinv = np.array([pow(int(x), -1, ell) for x in h], dtype=np.int64)
        star = self.classes.inverse_class
        rows = []
        for w in self._central_characters():
            w = (w * pow(int(w[0]), -1, ell)) % ell
            s = int(((w * w[star]) % ell * hinv % ell).sum() % ell)
            dsq = (n * pow(s, -1, ell)) % ell
            d = math.isqrt(dsq)
            if d * d != dsq:
                raise ArithmeticError("degree is not an integer square root")
            rows.append((d * w % ell) * hinv % ell)
        rows.sort(key=lambda v: (int(v[0]), tuple(int(x) for x in v)))
        self._irr = [Character(self, v, irreducible=True) for v in rows]
        self._matrix = np.array(rows, dtype=np.int64).reshape(len(rows), -1)

    @property
    def irreducibles(self):
        if self._irr is None:
            self._build()
        return self._irr

    @property
    def matrix(self):
        self.irreducibles
        return self._matrix

    @property
    def degrees(self):
        return [c.degree for c in self.irreducibles]

    def character(self, values):
        return Character(self, np.asarray(values, dtype=np.int64) % self.ell)

    def trivial(self):
        return self.character(np.ones(len(self.classes), dtype=np.int64))

    def regular(self):
        v = np.zeros(len(self.classes), dtype=np.int64)
        v[0] = self.group.order
        return self.character(v)

    def index_of(self, chi):
        for k, psi in enumerate(self.irreducibles):
            if np.array_equal(psi.values, chi.values):
                return k
        return None

    # ----------------------------------------------------------- calculus
    def inner(self, a, b):
        """<a, b> over the whole group, lifted to [0, ell)."""
        ell = self.ell
        s = int(((a % ell) * (b[self.classes.inverse_class] % ell) % ell * (self.sizes % ell) % ell).sum() % ell)
        return s * pow(self.group.order, -1, ell) % ell

    def decompose(self, chi):
        """Multiplicities of every irreducible in chi, in table order."""
        ell = self.ell
        X = self.matrix[:, self.classes.inverse_class]
        w = (chi.values * (self.sizes % ell)) % ell
        m = matmul_mod(X, w[:, None], ell)[:, 0]
        return m * pow(self.group.order, -1, ell) % ell

    def certify(self):
        """Exact row orthogonality and sum of squared degrees; column relation mod ell."""
        ell = self.ell
        n = self.group.order
        X = self.matrix
        r = len(X)
        if r != len(self.classes):
            raise AssertionError("irreducible count differs from class count")
        if sum(d * d for d in self.degrees) != n:
            raise AssertionError("sum of squared degrees differs from |G|")
        Xs = X[:, self.classes.inverse_class]
        gram = matmul_mod((X * (self.sizes % ell)) % ell, Xs.T, ell)
        if not np.array_equal(gram, (n % ell) * np.eye(r, dtype=np.int64)):
            raise AssertionError("row orthogonality fails")
        cols = matmul_mod(X.T, Xs, ell)
        cent = np.diag((n * np.array([pow(int(s), -1, ell) for s in self.sizes])) % ell)
        if not np.array_equal(cols, cent % ell):
            raise AssertionError("column orthogonality fails mod ell")
        return True

    # ---------------------------------------------------------- export
    def signed(self, v):
        v = int(v) % self.ell
        return v - self.ell if v > self.ell // 2 else v

    def to_json(self):
        G = self.group
        return {
            "group": G.name,
            "order": G.order,
            "ell": self.ell,
            "exponent": self.modulus.exponent,
            "zeta": self.modulus.zeta,
            "classes": [{"rep": _jsonable(G.element(int(r))), "size": int(s),
                         "order": int(G.element_orders()[r])}
                        for r, s in zip(self.classes.reps, self.sizes)],
            "degrees": [int(d) for d in self.degrees],
            "values": [[int(x) for x in c.values] for c in self.irreducibles],
        }

    def to_text(self):
        G = self.group
        orders = G.element_orders()[self.classes.reps]
        seen = {}
        head = [""]
        for o in orders:
            seen[int(o)] = seen.get(int(o), 0) + 1
            head.append(f"{int(o)}{chr(96 + seen[int(o)]) if seen[int(o)] <= 26 else seen[int(o)]}")
        rows = [["|C|", *[str(int(s)) for s in self.sizes]]]
        for i, c in enumerate(self.irreducibles):
            rows.append([f"X{i}", *[str(self.signed(x)) for x in c.values]])
        table = [head] + rows
        width = [max(len(r[j]) for r in table) for j in range(len(head))]
        lines = [f"{G.name or 'group'}  order {G.order}  classes {len(self)}  ell {self.ell}"]
        lines += ["  ".join(x.rjust(w) for x, w in zip(r, width)) for r in table]
        return "\n".join(lines)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, np.integer):
        return int(x)
    return x


class Character:
    """A class function, one residue mod ell per conjugacy class."""

    __slots__ = ("table", "values", "_irr")

    def __init__(self, table, values, irreducible=None):
        self.table = table
        self.values = np.asarray(values, dtype=np.int64) % table.ell
        self._irr = irreducible

    @property
    def group(self):
        return self.table.group

    @property
    def degree(self):
        return int(self.values[0])

    @property
    def irreducible(self):
        if self._irr is None:
            self._irr = self.table.inner(self.values, self.values) == 1
        return self._irr

    def at(self, ids):
        """Values at element ids of the owning group."""
        return self.values[self.table.classes.class_of[np.asarray(ids, dtype=np.int64)]]

    def _same(self, other):
        if other.table is not self.table:
            raise SubgroupMismatchError("characters of different tables")

    def __add__(self, other):
        self._same(other)
        return Character(self.table, self.values + other.values)

    def __mul__(self, other):
        return tensor(self, other)

    def __eq__(self, other):
        return isinstance(other, Character) and other.table is self.table \
            and np.array_equal(other.values, self.values)

    def __hash__(self):
        return hash((id(self.table), self.values.tobytes()))

    def __repr__(self):
        return f"Character(deg={self.degree}, {[self.table.signed(v) for v in self.values]})"


# ---------------------------------------------------------------- operations


def _subgroup_of(chi_table, G):
    """The Subgroup of G whose group carries ``chi_table``."""
    H = chi_table.group
    if H is G:
        return G.whole()
    if isinstance(H, SubsetGroup) and H.parent is G:
        return H.subgroup
    raise SubgroupMismatchError("character is not defined on a subgroup of this group")


def _class_counts(chi, H):
    """Number of elements of H in each class of chi's group."""
    tab = chi.table
    if H.parent is not tab.group:
        raise SubgroupMismatchError("subgroup of a different group")
    return np.bincount(tab.classes.class_of[H.members], minlength=len(tab.classes))


def inner_product(chi, psi, H=None):
    """(1/|H|) sum_{h in H} chi(h) psi(h^-1), lifted to [0, ell)."""
    chi._same(psi)
    tab = chi.table
    if H is None or H.order == tab.group.order:
        return tab.inner(chi.values, psi.values)
    ell = tab.ell
    cnt = _class_counts(chi, H) % ell
    s = int((chi.values * psi.values[tab.classes.inverse_class] % ell * cnt % ell).sum() % ell)
    return s * pow(H.order, -1, ell) % ell


def invariant_dimension(rho, H=None):
    """dim rho^H = <Res_H rho, 1_H>."""
    tab = rho.table
    if H is None:
        H = tab.group.whole()
    ell = tab.ell
    cnt = _class_counts(rho, H) % ell
    return int((rho.values * cnt % ell).sum() % ell) * pow(H.order, -1, ell) % ell


def restrict(chi, H):
    """Res_H chi as a character of ``H.group`` (table over the same ell)."""
    tab = chi.table
    if H.parent is not tab.group:
        raise SubgroupMismatchError("subgroup of a different group")
    sub = table_of(H, tab)
    reps = H.to_parent(sub.classes.reps)
    return Character(sub, chi.at(reps))


def twisted_invariant_dimension(rho, H, chi):
    """<Res_H rho, chi> for a linear character chi of H."""
    if chi.degree != 1:
        raise NonLinearCharacterError("twisting character must have degree 1")
    res = restrict(rho, H)
    if chi.table is not res.table:
        raise SubgroupMismatchError("chi is not a character of H")
    return res.table.inner(res.values, chi.values)


def induce(sigma, G):
    """Ind_Delta^G sigma, with Delta the subgroup carrying sigma's table."""
    D = _subgroup_of(sigma.table, G)
    tab = character_table(G, ell=sigma.table.ell)
    ell = tab.ell
    r = len(tab.classes)
    gcls = tab.classes.class_of[D.members]
    # local ids of sigma's group follow D.members
    vals = sigma.values[sigma.table.classes.class_of]
    sums = np.zeros(r, dtype=np.int64)
    np.add.at(sums, gcls, vals)
    sums %= ell
    coef = np.array([(G.order * pow(D.order * int(h), -1, ell)) % ell for h in tab.sizes], dtype=np.int64)
    return Character(tab, sums * coef % ell)


def tensor(chi, psi):
    chi._same(psi)
    return Character(chi.table, chi.values * psi.values)


def dual(chi):
    return Character(chi.table, chi.values[chi.table.classes.inverse_class])


def twist(chi, theta):
    """g -> chi(theta(g))."""
    tab = chi.table
    if theta.group is not tab.group:
        raise SubgroupMismatchError("automorphism of a different group")
    return Character(tab, chi.at(theta.images[tab.classes.reps]), irreducible=chi._irr)


def linear_characters(H, like=None):
    """Degree-one irreducibles of H (Subgroup or FiniteGroup)."""
    tab = table_of(H, like) if like is not None else character_table(H)
    return [c for c in tab.irreducibles if c.degree == 1]


def constituents(chi):
    """[(irreducible, multiplicity)] with positive multiplicity, table order."""
    tab = chi.table
    m = tab.decompose(chi)
    return [(tab.irreducibles[k], int(m[k])) for k in np.flatnonzero(m)]


def is_isotypic_restriction(rho, N):
    """(True, tau) when Res_N rho is a multiple of one irreducible tau."""
    if not N.is_normal():
        raise NotNormalError("isotypic test needs a normal subgroup")
    parts = constituents(restrict(rho, N))
    if len(parts) == 1:
        return True, parts[0][0]
    return False, None
