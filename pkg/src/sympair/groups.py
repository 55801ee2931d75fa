"""Finite groups with a dense integer index over their elements.

Every group enumerates its elements once and afterwards works with ids
``0 .. order-1`` (the identity is always id 0). Multiplication is a
vectorised map on id arrays, so class, coset and orbit computations are
numpy operations over the whole group rather than Python loops.

Backends:

* ``permutation``  image arrays on {0..n-1}; ``(a*b)[i] = b[a[i]]``
* ``matrix``       d x d matrices over F_p, row-major, entries in [0, p)
* ``abelian``      Z/n1 x ... x Z/nk with mixed-radix ids
* ``product``      direct or semidirect products of other groups
* ``subset``       a subgroup re-indexed as a group in its own right
* ``quotient``     cosets of a normal subgroup, labelled by min member id
* ``cayley-table`` an explicit multiplication table
"""
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import config
from .errors import (BackendMismatchError, CapExceededError,
                     NotAutomorphismError, NotNormalError)

# ------------------------------------------------------------------ helpers


def factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def p_part(n, p):
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def orbit_partition(n, maps):
    """Orbits of the maps (index arrays on range(n)) as (labels, minima).

    Orbit labels are numbered in increasing order of their smallest member.
    """
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    maps = [np.asarray(m, dtype=np.int64) for m in maps]
    if not maps:
        lab = np.arange(n, dtype=np.int64)
        return lab, lab.copy()
    src = np.tile(np.arange(n, dtype=np.int64), len(maps))
    dst = np.concatenate(maps)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n))
    k, lab = connected_components(graph, directed=True, connection="weak")
    mins = np.full(k, n, dtype=np.int64)
    np.minimum.at(mins, lab, np.arange(n, dtype=np.int64))
    order = np.argsort(mins, kind="stable")
    relabel = np.empty(k, dtype=np.int64)
    relabel[order] = np.arange(k)
    return relabel[lab], mins[order]


# ----------------------------------------------------------------- elements


class GroupElement:
    """An element of a FiniteGroup: the owning group plus the element id."""

    __slots__ = ("group", "id")

    def __init__(self, group, id):
        self.group = group
        self.id = int(id)

    @property
    def form(self):
        return self.group.element(self.id)

    def __mul__(self, other):
        if other.group is not self.group:
            raise BackendMismatchError("elements of different groups")
        return GroupElement(self.group, int(self.group.mul(self.id, other.id)))

    def inverse(self):
        return GroupElement(self.group, int(self.group.inv[self.id]))

    def __pow__(self, k):
        return GroupElement(self.group, int(self.group.power(np.array([self.id]), k)[0]))

    def order(self):
        return int(self.group.element_orders()[self.id])

    def __eq__(self, other):
        return isinstance(other, GroupElement) and other.group is self.group and other.id == self.id

    def __hash__(self):
        return hash((id(self.group), self.id))

    def __repr__(self):
        return f"GroupElement({self.group.name or self.group.backend}, {self.id})"


# -------------------------------------------------------------- base class


class FiniteGroup:
    backend = "abstract"

    def __init__(self, order, gens, name=None):
        self.order = int(order)
        self.gens = sorted({int(g) for g in gens if int(g) != 0})
        self.name = name
        self.inv = None
        self._table = None
        self._cache = {}

    # subclasses provide _mul_raw on flat int64 arrays and set self.inv
    def _mul_raw(self, a, b):
        raise NotImplementedError

    def _finish(self):
        if self.order <= config.get_caps().table and self._table is None:
            n = self.order
            ids = np.arange(n, dtype=np.int64)
            self._table = self._mul_raw(np.repeat(ids, n), np.tile(ids, n)).reshape(n, n)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._table is not None:
            return self._table[a, b]
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        return self._mul_raw(a.ravel(), b.ravel()).reshape(shape)

    def conj(self, x, g):
        """g^-1 x g."""
        return self.mul(self.mul(self.inv[g], x), g)

    def power(self, a, k):
        a = np.asarray(a, dtype=np.int64)
        k = int(k)
        if k < 0:
            a, k = self.inv[a], -k
        result = np.zeros_like(a)
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def elements(self):
        return np.arange(self.order, dtype=np.int64)

    def __call__(self, i):
        return GroupElement(self, i)

    def element(self, i):
        raise NotImplementedError

    def index(self, form):
        raise NotImplementedError

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or ''} order={self.order}>"

    # ---- cached structure
    def element_orders(self):
        if "orders" not in self._cache:
            n = self.order
            ids = self.elements()
            orders = np.ones(n, dtype=np.int64)
            for p, e in factorize(n).items():
                y = self.power(ids, n // p ** e)
                k = 0
                while k < e:
                    nontriv = y != 0
                    if not nontriv.any():
                        break
                    orders[nontriv] *= p
                    y = self.power(y, p)
                    k += 1
            self._cache["orders"] = orders
        return self._cache["orders"]

    def exponent(self):
        return int(np.lcm.reduce(np.unique(self.element_orders())))

    def classes(self):
        if "classes" not in self._cache:
            self._cache["classes"] = ConjugacyClasses(self)
        return self._cache["classes"]

    def whole(self):
        if "whole" not in self._cache:
            self._cache["whole"] = Subgroup(self, self.elements(), self.gens)
        return self._cache["whole"]

    def trivial(self):
        return Subgroup(self, np.zeros(1, dtype=np.int64), [])

    def subgroup(self, gens):
        return generate_subgroup(self, gens)

    def is_abelian(self):
        return all(np.array_equal(self.mul(g, h), self.mul(h, g))
                   for g in self.gens for h in self.gens)


# ---------------------------------------------------------- form backends


def _bfs(identity, gen_forms, compose, encode, cap):
    seen = np.sort(encode(identity[None]))
    blocks = [identity[None]]
    frontier = identity[None]
    total = 1
    while len(frontier) and gen_forms:
        cand = np.concatenate([compose(frontier, np.broadcast_to(g, frontier.shape)) for g in gen_forms])
        codes = encode(cand)
        _, first = np.unique(codes, return_index=True)
        first.sort()
        cand, codes = cand[first], codes[first]
        fresh = ~np.isin(codes, seen, assume_unique=True)
        cand, codes = cand[fresh], codes[fresh]
        total += len(cand)
        if total > cap:
            raise CapExceededError(f"group order exceeds the enumeration cap {cap}")
        if len(cand):
            blocks.append(cand)
            seen = np.union1d(seen, codes)
        frontier = cand
    return np.concatenate(blocks)


class _FormGroup(FiniteGroup):
    def __init__(self, forms, gen_forms, name=None):
        self.forms = np.ascontiguousarray(forms, dtype=np.int64)
        codes = self._encode(self.forms)
        self._code_order = np.argsort(codes, kind="stable")
        self._sorted_codes = codes[self._code_order]
        gens = self._lookup(np.asarray(gen_forms, dtype=np.int64).reshape(-1, self.forms.shape[1])) \
            if len(gen_forms) else []
        super().__init__(len(self.forms), gens, name)
        self.inv = self._lookup(self._invert(self.forms))
        self._finish()

    def _lookup(self, forms):
        codes = self._encode(forms)
        pos = np.searchsorted(self._sorted_codes, codes)
        pos = np.minimum(pos, len(self._sorted_codes) - 1)
        if not np.array_equal(self._sorted_codes[pos], codes):
            raise KeyError("element not in group")
        return self._code_order[pos]

    def _mul_raw(self, a, b):
        return self._lookup(self._compose(self.forms[a], self.forms[b]))

    def contains_forms(self, forms):
        codes = self._encode(np.asarray(forms, dtype=np.int64).reshape(-1, self.forms.shape[1]))
        pos = np.minimum(np.searchsorted(self._sorted_codes, codes), len(self._sorted_codes) - 1)
        return self._sorted_codes[pos] == codes

    def index(self, form):
        return int(self._lookup(np.asarray(form, dtype=np.int64).reshape(1, -1))[0])


class PermutationGroup(_FormGroup):
    backend = "permutation"

    def __init__(self, degree, forms, gen_forms, name=None):
        self.degree = int(degree)
        if self.degree > 15:
            raise CapExceededError("permutation degree above 15 is not supported")
        self._weights = self.degree ** np.arange(self.degree, dtype=np.int64)
        super().__init__(forms, gen_forms, name)

    def _encode(self, forms):
        return forms @ self._weights

    @staticmethod
    def _compose(A, B):
        return np.take_along_axis(B, A, axis=1)

    @staticmethod
    def _invert(A):
        return np.argsort(A, axis=1).astype(np.int64)

    def element(self, i):
        return tuple(int(x) for x in self.forms[i])

    @classmethod
    def generated(cls, degree, gen_forms, name=None, cap=None):
        cap = cap or config.get_caps().order
        ident = np.arange(degree, dtype=np.int64)
        gen_forms = [np.asarray(g, dtype=np.int64) for g in gen_forms]
        for g in gen_forms:
            if g.shape != (degree,) or sorted(g.tolist()) != list(range(degree)):
                raise ValueError(f"not a permutation of degree {degree}: {g.tolist()}")
        weights = degree ** np.arange(degree, dtype=np.int64)
        forms = _bfs(ident, gen_forms, cls._compose, lambda F: F @ weights, cap)
        return cls(degree, forms, gen_forms, name)


def _batched_inverse_mod(M, d, p):
    N = M.shape[0]
    A = np.concatenate([M.reshape(N, d, d) % p, np.broadcast_to(np.eye(d, dtype=np.int64), (N, d, d))], axis=2).copy()
    rows = np.arange(N)
    invtab = np.array([0] + [pow(i, -1, p) for i in range(1, p)], dtype=np.int64)
    for c in range(d):
        piv = c + np.argmax(A[:, c:, c] != 0, axis=1)
        if not np.all(A[rows, piv, c] != 0):
            raise ValueError("singular matrix")
        top = A[rows, piv].copy()
        A[rows, piv] = A[:, c]
        A[:, c] = top
        A[:, c] = (A[:, c] * invtab[A[:, c, c]][:, None]) % p
        for r in range(d):
            if r != c:
                f = A[:, r, c][:, None]
                A[:, r] = (A[:, r] - f * A[:, c]) % p
    return A[:, :, d:].reshape(N, d * d)


class MatrixGroup(_FormGroup):
    backend = "matrix"

    def __init__(self, d, p, forms, gen_forms, name=None):
        self.d = int(d)
        self.p = int(p)
        if self.p ** (self.d * self.d) >= 2 ** 62:
            raise CapExceededError("matrix encoding would overflow")
        self._weights = self.p ** np.arange(self.d * self.d, dtype=np.int64)
        super().__init__(forms, gen_forms, name)

    def _encode(self, forms):
        return forms @ self._weights

    def _compose(self, A, B):
        d, p = self.d, self.p
        return (A.reshape(-1, d, d) @ B.reshape(-1, d, d) % p).reshape(-1, d * d)

    def _invert(self, A):
        return _batched_inverse_mod(A, self.d, self.p)

    def element(self, i):
        d = self.d
        f = self.forms[i]
        return tuple(tuple(int(x) for x in f[r * d:(r + 1) * d]) for r in range(d))

    def matrices(self):
        return self.forms.reshape(-1, self.d, self.d)

    @classmethod
    def generated(cls, d, p, gen_forms, name=None, cap=None):
        cap = cap or config.get_caps().order
        ident = np.eye(d, dtype=np.int64).ravel()
        gen_forms = [np.asarray(g, dtype=np.int64).reshape(d * d) % p for g in gen_forms]

        def compose(A, B):
            return (A.reshape(-1, d, d) @ B.reshape(-1, d, d) % p).reshape(-1, d * d)

        weights = p ** np.arange(d * d, dtype=np.int64)
        forms = _bfs(ident, gen_forms, compose, lambda F: F @ weights, cap)
        return cls(d, p, forms, gen_forms, name)


def close_generators(gens, backend="permutation", *, degree=None, p=None, name=None, cap=None):
    """The group generated by ``gens`` (forms or GroupElements).

    Permutations are image lists; matrices are d x d nested lists over F_p.
    An empty generating set gives the trivial group.
    """
    forms = []
    for g in gens:
        if isinstance(g, GroupElement):
            if g.group.backend != backend:
                raise BackendMismatchError(f"{g.group.backend} element in a {backend} closure")
            if backend == "matrix":
                p = p or g.group.p
                if g.group.p != p:
                    raise BackendMismatchError("matrices over different primes")
            forms.append(np.asarray(g.form, dtype=np.int64))
        else:
            forms.append(np.asarray(g, dtype=np.int64))
    if backend == "permutation":
        if degree is None:
            degree = forms[0].size if forms else 1
        if any(f.ndim != 1 or f.size != degree for f in forms):
            raise BackendMismatchError("permutations of different degrees")
        return PermutationGroup.generated(degree, forms, name=name, cap=cap)
    if backend == "matrix":
        if p is None:
            raise ValueError("matrix closure needs the prime p")
        if forms:
            d = forms[0].shape[0]
            if any(f.shape != (d, d) for f in forms):
                raise BackendMismatchError("matrices of different sizes")
        else:
            d = degree or 1
        return MatrixGroup.generated(d, p, forms, name=name, cap=cap)
    raise BackendMismatchError(f"closure not defined for backend {backend!r}")


# ---------------------------------------------------------- other backends


class AbelianGroup(FiniteGroup):
    backend = "abelian"

    def __init__(self, moduli, name=None):
        self.moduli = [int(m) for m in moduli if int(m) > 1] or [1]
        self._strides = np.cumprod([1] + self.moduli[:-1]).astype(np.int64)
        order = int(np.prod(self.moduli, dtype=object))
        if order > config.get_caps().order:
            raise CapExceededError(f"group order {order} exceeds the enumeration cap")
        gens = [int(s) for s, m in zip(self._strides, self.moduli) if m > 1]
        super().__init__(order, gens, name)
        ids = self.elements()
        comps = self._split(ids)
        self.inv = self._join([(-c) % m for c, m in zip(comps, self.moduli)])
        self._finish()

    def _split(self, ids):
        return [(ids // s) % m for s, m in zip(self._strides, self.moduli)]

    def _join(self, comps):
        out = np.zeros_like(comps[0])
        for c, s in zip(comps, self._strides):
            out = out + c * s
        return out

    def _mul_raw(self, a, b):
        ca, cb = self._split(a), self._split(b)
        return self._join([(x + y) % m for x, y, m in zip(ca, cb, self.moduli)])

    def element(self, i):
        return tuple(int(c[0]) for c in self._split(np.array([i])))

    def index(self, form):
        return int(sum((int(x) % m) * int(s) for x, m, s in zip(form, self.moduli, self._strides)))


class ProductGroup(FiniteGroup):
    """Direct product of factors, or N x| H when ``action`` is given.

    ``action[h, n]`` is the image of n in N under the automorphism by which
    h in H acts; then (n1,h1)(n2,h2) = (n1 * action[h1, n2], h1 h2).
    """

    backend = "product"

    def __init__(self, factors, action=None, name=None):
        self.factors = list(factors)
        self.action = None if action is None else np.asarray(action, dtype=np.int64)
        if self.action is not None and len(self.factors) != 2:
            raise ValueError("semidirect products take exactly two factors")
        sizes = [f.order for f in self.factors]
        order = int(np.prod(sizes, dtype=object))
        if order > config.get_caps().order:
            raise CapExceededError(f"group order {order} exceeds the enumeration cap")
        self._strides = np.cumprod([1] + sizes[:-1]).astype(np.int64)
        gens = []
        for f, s in zip(self.factors, self._strides):
            gens.extend(int(g) * int(s) for g in f.gens)
        super().__init__(order, gens, name)
        ids = self.elements()
        comps = self._split(ids)
        if self.action is None:
            self.inv = self._join([f.inv[c] for f, c in zip(self.factors, comps)])
        else:
            N, H = self.factors
            n, h = comps
            hinv = H.inv[h]
            self.inv = self._join([self.action[hinv, N.inv[n]], hinv])
        self._finish()

    def _split(self, ids):
        return [(ids // s) % f.order for f, s in zip(self.factors, self._strides)]

    def _join(self, comps):
        out = np.zeros_like(np.asarray(comps[0]))
        for c, s in zip(comps, self._strides):
            out = out + c * s
        return out

    def _mul_raw(self, a, b):
        ca, cb = self._split(a), self._split(b)
        if self.action is None:
            return self._join([f.mul(x, y) for f, x, y in zip(self.factors, ca, cb)])
        N, H = self.factors
        return self._join([N.mul(ca[0], self.action[ca[1], cb[0]]), H.mul(ca[1], cb[1])])

    def components(self, ids):
        return self._split(np.asarray(ids, dtype=np.int64))

    def embed(self, k, ids):
        """Ids of the k-th factor's elements in the product."""
        return np.asarray(ids, dtype=np.int64) * self._strides[k]

    def element(self, i):
        comps = self._split(np.array([i]))
        return tuple(f.element(int(c[0])) for f, c in zip(self.factors, comps))

    def index(self, form):
        return int(sum(f.index(x) * int(s) for f, x, s in zip(self.factors, form, self._strides)))


class CayleyGroup(FiniteGroup):
    backend = "cayley-table"

    def __init__(self, table, gens=None, name=None):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if not np.array_equal(table[0], np.arange(n)) or not np.array_equal(table[:, 0], np.arange(n)):
            raise ValueError("id 0 must be the identity of the table")
        if gens is None:
            gens = range(1, n)
        super().__init__(n, gens, name)
        self._table = table
        self.inv = np.argmax(table == 0, axis=1).astype(np.int64)
        if gens is None or len(self.gens) == n - 1:
            self.gens = _greedy_generators(self, np.arange(n))

    def _mul_raw(self, a, b):
        return self._table[a, b]

    def element(self, i):
        return int(i)

    def index(self, form):
        return int(form)


class SubsetGroup(FiniteGroup):
    """A subgroup of ``parent`` re-indexed as a group (ids follow sorted parent ids)."""

    backend = "subset"

    def __init__(self, subgroup, name=None):
        self.subgroup = subgroup
        self.parent = subgroup.parent
        self.members = subgroup.members
        gens = np.searchsorted(self.members, np.asarray(subgroup.gens, dtype=np.int64))
        super().__init__(len(self.members), gens, name)
        self.inv = np.searchsorted(self.members, self.parent.inv[self.members])
        self._finish()

    def _mul_raw(self, a, b):
        return np.searchsorted(self.members, self.parent.mul(self.members[a], self.members[b]))

    def to_parent(self, ids):
        return self.members[np.asarray(ids, dtype=np.int64)]

    def from_parent(self, ids):
        ids = np.asarray(ids, dtype=np.int64)
        loc = np.searchsorted(self.members, ids)
        loc = np.minimum(loc, len(self.members) - 1)
        if not np.array_equal(self.members[loc], ids):
            raise KeyError("element outside the subgroup")
        return loc

    def element(self, i):
        return self.parent.element(int(self.members[i]))

    def index(self, form):
        return int(self.from_parent(np.array([self.parent.index(form)]))[0])


class QuotientGroup(FiniteGroup):
    """G/N. Element i is the coset whose smallest member id is ``reps[i]``."""

    backend = "quotient"

    def __init__(self, parent, normal, name=None):
        self.parent = parent
        self.normal = normal
        n = parent.order
        ids = parent.elements()
        k = normal.order
        if k * k <= n:
            low = ids.copy()
            for x in normal.members[1:]:
                np.minimum(low, parent.mul(ids, x), out=low)
        else:
            low = np.full(n, n, dtype=np.int64)
            done = np.zeros(n, dtype=bool)
            for x in ids:
                if done[x]:
                    continue
                coset = parent.mul(x, normal.members)
                low[coset] = x
                done[coset] = True
        self.reps, self.labels = np.unique(low, return_inverse=True)
        self.labels = self.labels.astype(np.int64).reshape(-1)
        gens = self.labels[np.asarray(parent.gens, dtype=np.int64)] if parent.gens else []
        super().__init__(len(self.reps), gens, name)
        self.inv = self.labels[parent.inv[self.reps]]
        self._finish()

    def _mul_raw(self, a, b):
        return self.labels[self.parent.mul(self.reps[a], self.reps[b])]

    def element(self, i):
        return int(self.reps[i])

    def index(self, form):
        return int(self.labels[int(form)])


# ---------------------------------------------------------------- subgroups


class Subgroup:
    """A subgroup of ``parent`` given by its sorted member ids."""

    def __init__(self, parent, members, gens=None):
        self.parent = parent
        members = np.unique(np.asarray(members, dtype=np.int64))
        if members.size == 0 or members[0] != 0:
            raise ValueError("a subgroup must contain the identity")
        if parent.order % members.size:
            raise AssertionError("subgroup order does not divide the group order")
        self.members = members
        self._gens = None if gens is None else sorted({int(g) for g in gens if int(g) != 0})
        self._cache = {}

    @property
    def order(self):
        return int(self.members.size)

    def __len__(self):
        return self.order

    @property
    def gens(self):
        if self._gens is None:
            self._gens = _greedy_generators(self.parent, self.members)
        return self._gens

    @property
    def mask(self):
        if "mask" not in self._cache:
            m = np.zeros(self.parent.order, dtype=bool)
            m[self.members] = True
            self._cache["mask"] = m
        return self._cache["mask"]

    def contains(self, ids):
        return self.mask[np.asarray(ids, dtype=np.int64)]

    @property
    def group(self):
        """This subgroup as a FiniteGroup (``SubsetGroup``)."""
        if "group" not in self._cache:
            if self.order == self.parent.order:
                self._cache["group"] = self.parent
            else:
                name = f"sub({self.parent.name})" if self.parent.name else None
                self._cache["group"] = SubsetGroup(self, name=name)
        return self._cache["group"]

    def to_local(self, ids):
        """Parent ids -> ids in ``self.group``."""
        if self.group is self.parent:
            return np.asarray(ids, dtype=np.int64)
        return self.group.from_parent(ids)

    def to_parent(self, local):
        if self.group is self.parent:
            return np.asarray(local, dtype=np.int64)
        return self.members[np.asarray(local, dtype=np.int64)]

    def is_normal(self):
        mask = self.mask
        return all(mask[self.parent.conj(self.members, g)].all() for g in self.parent.gens)

    def require_normal(self):
        if not self.is_normal():
            raise NotNormalError("subgroup is not normal")

    def conjugate(self, g):
        """g H g^-1."""
        G = self.parent
        return Subgroup(G, G.mul(G.mul(g, self.members), G.inv[g]))

    def intersect(self, other):
        return Subgroup(self.parent, np.intersect1d(self.members, other.members, assume_unique=True))

    def relative_to(self, other):
        """This subgroup as a Subgroup of ``other.group`` (requires containment)."""
        if not other.mask[self.members].all():
            raise ValueError("subgroup not contained in the given subgroup")
        gens = None if self._gens is None else other.to_local(np.asarray(self._gens, dtype=np.int64))
        return Subgroup(other.group, other.to_local(self.members), gens)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent \
            and np.array_equal(other.members, self.members)

    def __hash__(self):
        return hash((id(self.parent), self.members.tobytes()))

    def __repr__(self):
        return f"<Subgroup order={self.order} of {self.parent!r}>"


def generate_subgroup(G, gens):
    gens = [int(g) for g in np.atleast_1d(np.asarray(gens, dtype=np.int64)) if int(g) != 0]
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    frontier = np.zeros(1, dtype=np.int64)
    while frontier.size and gens:
        cand = np.unique(np.concatenate([G.mul(frontier, g) for g in gens]))
        cand = cand[~mask[cand]]
        mask[cand] = True
        frontier = cand
    return Subgroup(G, np.flatnonzero(mask), gens)


def _greedy_generators(G, members):
    """A generating set for the subgroup with these members, high orders first."""
    members = np.asarray(members, dtype=np.int64)
    if members.size <= 1:
        return []
    orders = G.element_orders()[members]
    ranked = members[np.lexsort((members, -orders))]
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    size = 1
    gens = []
    for x in ranked:
        if size == members.size:
            break
        if mask[x]:
            continue
        gens.append(int(x))
        sub = generate_subgroup(G, gens)
        mask = sub.mask.copy()
        size = sub.order
    return gens


def normal_closure(G, gens):
    gens = [int(g) for g in gens if int(g) != 0]
    H = generate_subgroup(G, gens)
    while True:
        extra = []
        for g in G.gens:
            c = G.conj(np.asarray(H.gens, dtype=np.int64), g)
            extra.extend(int(x) for x in c[~H.mask[c]])
        if not extra:
            return H
        H = generate_subgroup(G, H.gens + sorted(set(extra)))


# --------------------------------------------------------- classes & cosets


class ConjugacyClasses:
    """Conjugacy classes ordered by smallest member id (identity class first)."""

    def __init__(self, G):
        self.group = G
        ids = G.elements()
        maps = [G.conj(ids, g) for g in G.gens]
        self.class_of, self.reps = orbit_partition(G.order, maps)
        self.sizes = np.bincount(self.class_of, minlength=len(self.reps)).astype(np.int64)
        self.inverse_class = self.class_of[G.inv[self.reps]]

    def __len__(self):
        return len(self.reps)

    def members(self, k):
        return np.flatnonzero(self.class_of == k)

    def as_list(self):
        order = np.argsort(self.class_of, kind="stable")
        bounds = np.cumsum(self.sizes)[:-1]
        return [(int(r), m) for r, m in zip(self.reps, np.split(order, bounds))]

    def power_map(self, k):
        return self.class_of[self.group.power(self.reps, k)]


def conjugacy_classes(G):
    """List of (representative id, member ids)."""
    return G.classes().as_list()


def double_coset_labels(G, A, B):
    """Label of the double coset A g B for every g (labels by smallest member)."""
    ids = G.elements()
    maps = [G.mul(a, ids) for a in A.gens] + [G.mul(ids, b) for b in B.gens]
    return orbit_partition(G.order, maps)


def double_cosets(G, A, B):
    """Representatives (smallest ids) of the double cosets A\\G/B."""
    return [int(x) for x in double_coset_labels(G, A, B)[1]]


def fixed_subgroup(G, theta):
    images = theta.images if isinstance(theta, Automorphism) else np.asarray(theta)
    return Subgroup(G, np.flatnonzero(images == G.elements()))


def quotient_group(G, N):
    """(G/N, projection array over the ids of G)."""
    if not N.is_normal():
        raise NotNormalError("quotient by a subgroup that is not normal")
    Q = QuotientGroup(G, N, name=f"{G.name}/N" if G.name else None)
    return Q, Q.labels


def center(G):
    ids = G.elements()
    mask = np.ones(G.order, dtype=bool)
    for g in G.gens:
        mask &= G.mul(ids, g) == G.mul(g, ids)
    return Subgroup(G, np.flatnonzero(mask))


def derived_subgroup(G):
    comms = []
    for i, g in enumerate(G.gens):
        for h in G.gens[i + 1:]:
            comms.append(int(G.mul(G.mul(G.inv[g], G.inv[h]), G.mul(g, h))))
    return normal_closure(G, comms)


def structural_subgroups(G):
    return center(G), derived_subgroup(G)


def normalizer(G, H):
    ids = G.elements()
    mask = np.ones(G.order, dtype=bool)
    for x in H.gens:
        mask &= H.mask[G.conj(x, ids)]
    return Subgroup(G, np.flatnonzero(mask))


def sylow_subgroup(G, p):
    """A Sylow p-subgroup, grown inside successive normalizers.

    Each step adds the lowest-id p-power-order element of N_G(P) outside P,
    so the result is reproducible.
    """
    target = p_part(G.order, p)
    orders = G.element_orders()
    ppow = {int(o): p_part(int(o), p) == o for o in np.unique(orders)}
    pmask = np.array([ppow[int(o)] for o in orders], dtype=bool)
    P = G.trivial()
    while P.order < target:
        N = normalizer(G, P)
        cand = N.members[pmask[N.members] & ~P.mask[N.members]]
        if cand.size == 0:
            raise AssertionError("Sylow growth stalled")
        P = generate_subgroup(G, P.gens + [int(cand[0])])
    return P


def p_core(G, P):
    """Largest normal subgroup of G inside P (intersection of the conjugates)."""
    mask = P.mask.copy()
    while True:
        cur = np.flatnonzero(mask)
        keep = np.ones(cur.size, dtype=bool)
        for g in G.gens:
            keep &= mask[G.conj(cur, g)]
            keep &= mask[G.conj(cur, G.inv[g])]
        if keep.all():
            return Subgroup(G, cur)
        mask[cur[~keep]] = False


def p_radical(G, p):
    """Rad_p(G) = O_p(G), the largest normal p-subgroup."""
    if G.order % p:
        return G.trivial()
    if p_part(G.order, p) == G.order:
        return G.whole()
    return p_core(G, sylow_subgroup(G, p))


# ------------------------------------------------------------ automorphisms


class Automorphism:
    """A certified automorphism given by its image array over element ids."""

    def __init__(self, group, images, name=None, certify=True):
        self.group = group
        self.images = np.asarray(images, dtype=np.int64)
        self.name = name
        if certify:
            self.certify()
        self.is_involution = bool(np.array_equal(self.images[self.images], group.elements()))

    def certify(self):
        G, f = self.group, self.images
        n = G.order
        if f.shape != (n,) or not np.array_equal(np.sort(f), np.arange(n)):
            raise NotAutomorphismError("image array is not a bijection")
        if f[0] != 0:
            raise NotAutomorphismError("identity not fixed")
        ids = G.elements()
        # f(x g) = f(x) f(g) for every x and every generator g forces a homomorphism
        for g in G.gens:
            if not np.array_equal(f[G.mul(ids, g)], G.mul(f, f[g])):
                raise NotAutomorphismError("not a homomorphism")
        if n > config.get_caps().verify_exhaustive:
            rng = np.random.default_rng(0)
            a = rng.integers(0, n, 10_000)
            b = rng.integers(0, n, 10_000)
            if not np.array_equal(f[G.mul(a, b)], G.mul(f[a], f[b])):
                raise NotAutomorphismError("not a homomorphism (sampled)")

    def __call__(self, ids):
        return self.images[np.asarray(ids, dtype=np.int64)]

    def compose(self, other):
        """self o other."""
        return Automorphism(self.group, self.images[other.images], certify=False)

    def inverse(self):
        inv = np.empty_like(self.images)
        inv[self.images] = self.group.elements()
        return Automorphism(self.group, inv, certify=False)

    def fixed_subgroup(self):
        if "fixed" not in self.__dict__:
            self.fixed = fixed_subgroup(self.group, self)
        return self.fixed

    def preserves(self, H):
        return bool(H.mask[self.images[H.members]].all())

    def restrict(self, H):
        """The induced automorphism of ``H.group`` (H must be invariant)."""
        if not self.preserves(H):
            raise ValueError("subgroup is not invariant")
        return Automorphism(H.group, H.to_local(self.images[H.members]), name=self.name, certify=False)

    def induced_on_quotient(self, Q):
        """Induced automorphism of a QuotientGroup (kernel must be invariant)."""
        return Automorphism(Q, Q.labels[self.images[Q.reps]], name=self.name, certify=False)

    def __eq__(self, other):
        return isinstance(other, Automorphism) and other.group is self.group \
            and np.array_equal(other.images, self.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        return f"Automorphism({self.name or '?'}, involution={self.is_involution})"


def identity_automorphism(G):
    return Automorphism(G, G.elements(), name="id", certify=False)


def inner_automorphism(G, t, name=None):
    """x -> t x t^-1."""
    ids = G.elements()
    return Automorphism(G, G.mul(G.mul(t, ids), G.inv[t]), name=name or f"inner:{int(t)}", certify=False)


def minimal_generating_sequence(G):
    """An irredundant generating sequence, preferring high element orders."""
    gens = _greedy_generators(G, G.elements())
    changed = True
    while changed and len(gens) > 1:
        changed = False
        for i in range(len(gens)):
            rest = gens[:i] + gens[i + 1:]
            if generate_subgroup(G, rest).order == G.order:
                gens = rest
                changed = True
                break
    return gens


class InvolutionSearch(list):
    """List of involutive automorphisms plus a completeness flag."""

    def __init__(self, items, complete, nodes):
        super().__init__(items)
        self.complete = complete
        self.nodes = nodes


def _powers(G, x):
    """[x, x^2, ..., x^o = 1] for a single id, by doubling."""
    o = int(G.element_orders()[x])
    p = np.array([x], dtype=np.int64)
    while p.size < o:
        p = np.concatenate([p, G.mul(np.full(p.size, p[-1]), p)])
    return p[:o]


def _assign(f, finv, tgt, val):
    """Set f[tgt] = val; the newly defined ids, or None on a conflict."""
    cur = f[tgt]
    dfn = cur >= 0
    if not np.array_equal(cur[dfn], val[dfn]):
        return None
    t, v = tgt[~dfn], val[~dfn]
    if t.size == 0:
        return t
    u, first = np.unique(t, return_index=True)
    uv = v[first]
    if not np.array_equal(uv[np.searchsorted(u, t)], v):
        return None
    if (finv[uv] >= 0).any() or np.unique(uv).size != uv.size:
        return None
    f[u] = uv
    finv[uv] = u
    return u


def _extend_partial(G, f, finv, known, new_pairs):
    """Close the partial map f over right multiplication by the constrained
    elements; False on any inconsistency or loss of injectivity.

    The powers x^k -> y^k of each new pair are assigned first, which exposes
    most conflicts before the (slower) closure runs.
    """
    for x, y in new_pairs:
        if f[x] >= 0 and f[x] != y:
            return False
        if finv[y] >= 0 and finv[y] != x:
            return False
    for x, y in new_pairs:
        px, py = _powers(G, x), _powers(G, y)
        if px.size != py.size or _assign(f, finv, px, py) is None:
            return False
    src = np.flatnonzero(f >= 0)
    todo = [(src, list(new_pairs))]
    allpairs = known + list(new_pairs)
    while todo:
        src, pairs = todo.pop()
        fresh = []
        for x, y in pairs:
            u = _assign(f, finv, G.mul(src, x), G.mul(f[src], y))
            if u is None:
                return False
            if u.size:
                fresh.append(u)
        if fresh:
            todo.append((np.concatenate(fresh), allpairs))
    dom = np.flatnonzero(f >= 0)
    img = f[dom]
    back = f[img]
    ok = back >= 0
    return bool(np.array_equal(back[ok], dom[ok]))


def find_involutive_automorphisms(G, budget=200_000, cap=None, candidates=None):
    """All automorphisms theta of G with theta^2 = id, identity first.

    Backtracks over images of an irredundant generating sequence. Choosing
    theta(g) = y also fixes theta(y) = g, and the partial map is closed
    under multiplication after every choice, which prunes hard. Returns an
    ``InvolutionSearch``; ``complete`` is False when ``budget`` search nodes
    ran out before the tree was exhausted.
    """
    if candidates is not None:
        found = [a for a in candidates if a.is_involution]
        uniq = {a.images.tobytes(): a for a in found}
        items = sorted(uniq.values(), key=lambda a: tuple(a.images))
        return InvolutionSearch(items, complete=False, nodes=0)
    cap = cap or config.get_caps().automorphism_search
    if G.order > cap:
        raise CapExceededError(f"automorphism search above cap {cap} (order {G.order})")
    n = G.order
    if n == 1:
        return InvolutionSearch([identity_automorphism(G)], True, 0)
    gens = minimal_generating_sequence(G)
    orders = G.element_orders()
    cls = G.classes()
    csize = cls.sizes[cls.class_of]
    cand = {g: np.flatnonzero((orders == orders[g]) & (csize == csize[g])) for g in gens}
    results = []
    state = {"nodes": 0, "complete": True}

    def rec(f, finv, known):
        if state["nodes"] >= budget:
            state["complete"] = False
            return
        state["nodes"] += 1
        pending = [g for g in gens if f[g] < 0]
        if not pending:
            if (f >= 0).all():
                results.append(f.copy())
            return
        g = pending[0]
        for y in cand[g]:
            y = int(y)
            if finv[y] >= 0 or (f[y] >= 0 and f[y] != g):
                continue
            pairs = [(g, y)] if y == g else [(g, y), (y, g)]
            f2, finv2 = f.copy(), finv.copy()
            if _extend_partial(G, f2, finv2, known, pairs):
                rec(f2, finv2, known + pairs)
            if not state["complete"]:
                return

    f0 = np.full(n, -1, dtype=np.int64)
    finv0 = np.full(n, -1, dtype=np.int64)
    f0[0] = 0
    finv0[0] = 0
    rec(f0, finv0, [])
    results.sort(key=tuple)
    autos = []
    for k, img in enumerate(results):
        name = "id" if np.array_equal(img, np.arange(n)) else f"inv:{k}"
        autos.append(Automorphism(G, img, name=name))
    return InvolutionSearch(autos, state["complete"], state["nodes"])


def semidirect_action(N, H, hom):
    """Action array for N x| H from ``hom(h) -> Automorphism of N``."""
    return np.stack([hom(int(h)).images for h in H.elements()])
