"""Named group families, their standard involutions, and a small text grammar.

Grammar::

    spec   := family (":" int)*
            | combo ":" arg ("," arg)* (":" int)*
    combo  := "product" | "semidirect" | "double"
    arg    := "(" spec ")" | spec

The canonical rendering parenthesizes every combo argument, e.g.
``product:(heisenberg:3),(cyclic:2)``. Unparenthesized arguments are read
greedily, so ``product:heisenberg:3,cyclic:2`` parses to the same tree.
"""
import itertools
import re
from dataclasses import dataclass

import numpy as np
from sympy import isprime
from sympy.ntheory import primitive_root

from . import config
from .errors import (ArityError, CapExceededError, ParameterDomainError, SpecParseError,
                     UnknownInvolutionError)
from .groups import (AbelianGroup, Automorphism, CayleyGroup, MatrixGroup,
                     PermutationGroup, ProductGroup, find_involutive_automorphisms,
                     identity_automorphism, inner_automorphism)

COMBOS = ("product", "semidirect", "double")
# family -> (min params, max params); None means unbounded
FAMILIES = {
    "cyclic": (1, 1),
    "dihedral": (1, 1),
    "quaternion": (1, 1),
    "dicyclic": (1, 1),
    "symmetric": (1, 1),
    "alternating": (1, 1),
    "gl": (2, 2),
    "sl": (2, 2),
    "heisenberg": (1, 1),
    "frobenius": (2, 2),
    "abelian": (1, None),
}


@dataclass(frozen=True)
class GroupSpec:
    family: str
    params: tuple = ()
    args: tuple = ()

    def render(self):
        if self.family in COMBOS:
            body = ",".join(f"({a.render()})" for a in self.args)
            tail = "".join(f":{p}" for p in self.params)
            return f"{self.family}:{body}{tail}"
        return ":".join([self.family, *map(str, self.params)])

    def __str__(self):
        return self.render()


# ------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_-]*)|(?P<sym>[:,()]))")


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise SpecParseError(f"unexpected character {text[start]!r}", text, start,
                                 ("family name", "integer", "':'", "','", "'('", "')'"))
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind, value=None, expected=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            what = expected or (f"'{value}'" if value else kind)
            found = tok[1] or "end of input"
            raise SpecParseError(f"found {found!r}", self.text, tok[2], (what,))
        self.i += 1
        return tok

    def spec(self):
        tok = self.peek()
        if tok[0] != "name":
            raise SpecParseError(f"found {tok[1] or 'end of input'!r}", self.text, tok[2],
                                 ("family name",))
        name = tok[1].lower()
        if name not in FAMILIES and name not in COMBOS:
            raise SpecParseError(f"unknown family {tok[1]!r}", self.text, tok[2],
                                 tuple(sorted(FAMILIES) + list(COMBOS)))
        self.i += 1
        if name in COMBOS:
            self.take("sym", ":")
            args = [self.arg()]
            while self.peek()[:2] == ("sym", ","):
                self.i += 1
                args.append(self.arg())
            params = []
            while self.peek()[:2] == ("sym", ":") and self.peek(1)[0] == "int":
                self.i += 1
                params.append(int(self.take("int")[1]))
            node = GroupSpec(name, tuple(params), tuple(args))
        else:
            params = []
            while self.peek()[:2] == ("sym", ":"):
                self.i += 1
                params.append(int(self.take("int", expected="integer")[1]))
            node = GroupSpec(name, tuple(params))
        _check_arity(node, self.text, tok[2])
        return node

    def arg(self):
        if self.peek()[:2] == ("sym", "("):
            self.i += 1
            node = self.spec()
            self.take("sym", ")")
            return node
        return self.spec()


def _check_arity(node, text, pos):
    f = node.family
    if f in COMBOS:
        want = {"product": (1, None, 0, 0), "semidirect": (2, 2, 1, 1), "double": (1, 1, 0, 0)}[f]
        lo, hi, plo, phi = want
        if len(node.args) < lo or (hi is not None and len(node.args) > hi) \
                or not plo <= len(node.params) <= phi:
            raise ArityError(f"{f} takes {lo}{'' if hi == lo else '+'} group argument(s)"
                             f" and {plo} index parameter(s)", text, pos)
        return
    lo, hi = FAMILIES[f]
    n = len(node.params)
    if n < lo or (hi is not None and n > hi):
        raise ArityError(f"{f} takes {lo if hi == lo else f'at least {lo}'} parameter(s), got {n}",
                         text, pos)
    _check_domain(node, text, pos)


def _check_domain(node, text, pos):
    f, ps = node.family, node.params

    def bad(msg):
        raise ParameterDomainError(msg, text, pos)

    if any(p < 1 for p in ps):
        bad("parameters must be positive")
    if f in ("gl", "sl"):
        if not isprime(ps[1]):
            bad(f"{f} needs a prime field size, got {ps[1]}")
    elif f == "heisenberg":
        if not isprime(ps[0]):
            bad(f"heisenberg needs a prime, got {ps[0]}")
    elif f == "frobenius":
        p, q = ps
        if not isprime(p):
            bad(f"frobenius needs a prime p, got {p}")
        if q < 2 or (p - 1) % q:
            bad(f"frobenius:{p}:{q} needs q > 1 dividing p - 1")
    elif f == "symmetric" and ps[0] > 7:
        bad("symmetric:n supports n <= 7")
    elif f == "alternating" and ps[0] > 8:
        bad("alternating:n supports n <= 8")
    elif f == "quaternion":
        n = ps[0]
        if n < 8 or n & (n - 1):
            bad("quaternion:n needs n a power of two, at least 8")


def parse_group_spec(text):
    p = _Parser(text)
    node = p.spec()
    p.take("end", expected="end of input")
    return node


def read_spec_file(path):
    """Specs from a file: one per line, '#' starts a comment."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(parse_group_spec(line))
    return out


# ------------------------------------------------------------------ building

_BUILD_CACHE = {}


def build(spec, cache=True):
    """FiniteGroup for a GroupSpec or spec string, cached by canonical form
    unless ``cache`` is False (sweeps over many groups)."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    key = spec.render()
    if key in _BUILD_CACHE:
        return _BUILD_CACHE[key]
    G = _build(spec)
    G.name = key
    G.spec = spec
    if cache:
        _BUILD_CACHE[key] = G
    return G


def clear_cache():
    _BUILD_CACHE.clear()


def _mat_gens_gl(d, p, special):
    gens = []
    for i in range(d):
        for j in range(d):
            if i != j:
                m = np.eye(d, dtype=np.int64)
                m[i, j] = 1
                gens.append(m)
    if not special and p > 2:
        m = np.eye(d, dtype=np.int64)
        m[0, 0] = int(primitive_root(p))
        gens.append(m)
    return gens


def _dicyclic_table(n):
    """Dic_n of order 4n: ids k + 2n j for a^k x^j, x^2 = a^n, x a x^-1 = a^-1."""
    m = 2 * n
    k = np.arange(2 * m) % m
    j = np.arange(2 * m) // m
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    J1, J2 = np.meshgrid(j, j, indexing="ij")
    kk = np.where(J1 == 0, K1 + K2, K1 - K2 + np.where(J2 == 1, n, 0)) % m
    jj = (J1 + J2) % 2
    return kk + m * jj


def order_formula(spec):
    """Closed-form order of a spec (None where no simple formula applies)."""
    f, ps = spec.family, spec.params
    if f == "cyclic":
        return ps[0]
    if f == "dihedral":
        return 2 * ps[0]
    if f == "quaternion":
        return ps[0]
    if f == "dicyclic":
        return 4 * ps[0]
    if f == "symmetric":
        return int(np.prod(range(1, ps[0] + 1)))
    if f == "alternating":
        return max(1, int(np.prod(range(1, ps[0] + 1))) // 2)
    if f in ("gl", "sl"):
        d, p = ps
        n = 1
        for i in range(d):
            n *= p ** d - p ** i
        return n // (p - 1) if f == "sl" else n
    if f == "heisenberg":
        return ps[0] ** 3
    if f == "frobenius":
        return ps[0] * ps[1]
    if f == "abelian":
        return int(np.prod(ps))
    if f == "product":
        out = 1
        for a in spec.args:
            o = order_formula(a)
            if o is None:
                return None
            out *= o
        return out
    if f == "double":
        o = order_formula(spec.args[0])
        return None if o is None else o * o
    if f == "semidirect":
        a, b = (order_formula(x) for x in spec.args)
        return None if a is None or b is None else a * b
    return None


def _check_projected(spec):
    o = order_formula(spec)
    if o is not None and o > config.get_caps().order:
        raise CapExceededError(f"{spec.render()} has order {o}, above the cap")


def _build(spec):
    _check_projected(spec)
    f, ps = spec.family, spec.params
    if f == "cyclic":
        return AbelianGroup([ps[0]])
    if f == "abelian":
        return AbelianGroup(list(ps))
    if f == "dihedral":
        n = ps[0]
        if n == 1:
            return AbelianGroup([2])
        if n == 2:
            return AbelianGroup([2, 2])
        C = AbelianGroup([n])
        return ProductGroup([C, AbelianGroup([2])], action=np.stack([C.elements(), C.inv]))
    if f == "quaternion":
        return CayleyGroup(_dicyclic_table(ps[0] // 4))
    if f == "dicyclic":
        return CayleyGroup(_dicyclic_table(ps[0]))
    if f in ("symmetric", "alternating"):
        n = ps[0]
        if n <= 1 or (f == "alternating" and n <= 2):
            return PermutationGroup.generated(max(n, 1), [])
        if f == "symmetric":
            gens = [[1, 0, *range(2, n)], [*range(1, n), 0]]
        else:
            gens = [[(i + 1) % 3 if i < 3 else i for i in range(n)]]
            for k in range(3, n):
                g = list(range(n))
                g[0], g[1], g[k] = 1, k, 0
                gens.append(g)
        return PermutationGroup.generated(n, gens)
    if f in ("gl", "sl"):
        d, p = ps
        return MatrixGroup.generated(d, p, _mat_gens_gl(d, p, f == "sl"))
    if f == "heisenberg":
        p = ps[0]
        a = np.eye(3, dtype=np.int64)
        a[0, 1] = 1
        b = np.eye(3, dtype=np.int64)
        b[1, 2] = 1
        return MatrixGroup.generated(3, p, [a, b])
    if f == "frobenius":
        p, q = ps
        a = pow(int(primitive_root(p)), (p - 1) // q, p)
        return MatrixGroup.generated(2, p, [[[a, 0], [0, 1]], [[1, 1], [0, 1]]])
    if f == "product":
        return ProductGroup([build(a) for a in spec.args])
    if f == "double":
        B = build(spec.args[0])
        return ProductGroup([B, B])
    if f == "semidirect":
        N = build(spec.args[0])
        Hs = spec.args[1]
        if Hs.family != "cyclic" or Hs.params[0] % 2:
            raise ParameterDomainError("semidirect needs an even cyclic acting group",
                                       spec.render(), 0)
        H = build(Hs)
        alphas = semidirect_automorphisms(N)
        k = spec.params[0]
        if k >= len(alphas):
            raise ParameterDomainError(f"automorphism index {k} out of range ({len(alphas)} available)",
                                       spec.render(), 0)
        alpha = alphas[k]
        ident = N.elements()
        act = np.stack([alpha.images if h % 2 else ident for h in range(H.order)])
        return ProductGroup([N, H], action=act)
    raise SpecParseError(f"unknown family {f}", spec.render(), 0)


def semidirect_automorphisms(N):
    """Non-identity involutive automorphisms usable as semidirect indices.

    Complete enumeration when N is within the search cap, else the standard
    catalog of N.
    """
    if N.order <= config.get_caps().automorphism_search:
        found = find_involutive_automorphisms(N)
        autos = list(found)
    else:
        autos = [a for _, a in standard_involutions(N)]
    return [a for a in autos if not np.array_equal(a.images, N.elements())]


# ---------------------------------------------------------------- involutions


def _matrix_images(G, transform):
    """Ids of transform(forms) for a MatrixGroup, or None if not closed."""
    forms = transform(G.matrices()).reshape(G.order, -1) % G.p
    if not G.contains_forms(forms).all():
        return None
    return G._lookup(forms)


def _matrix_involutions(G):
    d, p = G.d, G.p
    out = []
    inv_t = G.inv[_transpose_ids(G)] if _transpose_ids(G) is not None else None
    if inv_t is not None:
        out.append(("transpose-inverse", inv_t))
    ti_forms = G.matrices()[G.inv]
    anti = ti_forms.transpose(0, 2, 1)[:, ::-1, ::-1]
    forms = anti.reshape(G.order, -1) % p
    if G.contains_forms(forms).all():
        out.append(("antidiagonal-transpose", G._lookup(forms)))
    if p > 2:
        for signs in itertools.product([1, -1], repeat=d - 1):
            s = np.array((1,) + signs, dtype=np.int64)
            if (s == 1).all():
                continue
            mult = np.outer(s, s)
            img = _matrix_images(G, lambda M: M * mult[None])
            if img is not None:
                tag = "".join("+" if x == 1 else "-" for x in s)
                out.append((f"diag:{tag}", img))
    return out


def _transpose_ids(G):
    forms = G.matrices().transpose(0, 2, 1).reshape(G.order, -1)
    if not G.contains_forms(forms).all():
        return None
    return G._lookup(forms)


def _inner_involutions(G):
    cl = G.classes()
    orders = G.element_orders()
    out = []
    k = 0
    for c, rep in enumerate(cl.reps):
        if orders[rep] == 2:
            out.append((f"inner:{k}", inner_automorphism(G, int(rep)).images))
            k += 1
    return out


def standard_involutions(G, spec=None):
    """[(name, Automorphism)] for the family of G; identity first, deduplicated.

    Inner involutions are taken one per conjugacy class of involutions t,
    since conjugate t give isomorphic symmetric pairs.
    """
    spec = spec if spec is not None else getattr(G, "spec", None)
    cands = [("id", G.elements())]
    if G.is_abelian():
        cands.append(("inversion", G.inv.copy()))
    if isinstance(G, MatrixGroup):
        cands.extend(_matrix_involutions(G))
    if spec is not None and spec.family == "double":
        P = G
        a, b = P.components(P.elements())
        cands.append(("flip", P.embed(0, b) + P.embed(1, a)))
        base = standard_involutions(P.factors[0], spec.args[0])
        for name, t in base:
            if name != "id":
                cands.append((f"{name}x{name}", P.embed(0, t.images[a]) + P.embed(1, t.images[b])))
    if spec is not None and spec.family == "product":
        P = G
        comps = P.components(P.elements())
        lists = [standard_involutions(f, s) for f, s in zip(P.factors, spec.args)]
        for combo in itertools.islice(itertools.product(*lists), 64):
            if all(name == "id" for name, _ in combo):
                continue
            img = sum(P.embed(k, t.images[c]) for k, ((_, t), c) in enumerate(zip(combo, comps)))
            cands.append(("x".join(name for name, _ in combo), img))
    cands.extend(_inner_involutions(G))
    seen = set()
    out = []
    for name, img in cands:
        img = np.asarray(img, dtype=np.int64)
        key = img.tobytes()
        if key in seen:
            continue
        seen.add(key)
        theta = Automorphism(G, img, name=name)
        if not theta.is_involution:
            continue
        out.append((name, theta))
    return out


def involution_by_name(G, name):
    for n, t in standard_involutions(G):
        if n == name:
            return t
    names = ", ".join(n for n, _ in standard_involutions(G))
    raise UnknownInvolutionError(f"no standard involution named {name!r} for {G.name}; "
                                 f"available: {names}")


def all_involutions(G, budget=200_000, cap=None):
    """(list of Automorphism, complete flag) by exhaustive search; names kept
    from the standard catalog where the images agree."""
    found = find_involutive_automorphisms(G, budget=budget, cap=cap)
    names = {t.images.tobytes(): n for n, t in standard_involutions(G)}
    for t in found:
        t.name = names.get(t.images.tobytes(), t.name)
    return list(found), found.complete


# ------------------------------------------------------------------- corpora


def odd_corpus():
    """Odd-order groups on which the odd-order results are checked."""
    specs = ["heisenberg:3", "heisenberg:5", "heisenberg:7", "frobenius:7:3", "frobenius:19:3"]
    specs += [f"cyclic:{n}" for n in range(1, 82, 2)]
    specs += [
        "product:(heisenberg:3),(cyclic:3)",
        "product:(heisenberg:3),(cyclic:5)",
        "product:(frobenius:7:3),(cyclic:3)",
        "product:(frobenius:7:3),(cyclic:5)",
        "product:(frobenius:7:3),(frobenius:7:3)",
        "product:(heisenberg:5),(cyclic:3)",
        "product:(frobenius:19:3),(cyclic:3)",
        "product:(cyclic:3),(cyclic:3),(cyclic:3)",
        "product:(cyclic:9),(cyclic:3)",
        "product:(cyclic:5),(cyclic:5)",
        "product:(frobenius:7:3),(heisenberg:3)",
    ]
    return specs


def abelian_types(max_order):
    """Canonical abelian:... specs (invariant factors n1 | n2 | ...) up to max_order."""
    from sympy import factorint
    from sympy.utilities.iterables import partitions

    out = []
    for n in range(1, max_order + 1):
        fac = factorint(n)
        per_prime = []
        for p, e in sorted(fac.items()):
            parts = []
            for part in partitions(e):
                exps = sorted([k for k, c in part.items() for _ in range(c)], reverse=True)
                parts.append(exps)
            per_prime.append((p, parts))
        for choice in itertools.product(*[parts for _, parts in per_prime]):
            width = max((len(c) for c in choice), default=0)
            factors = [1] * width
            for (p, _), exps in zip(per_prime, choice):
                for i, e in enumerate(exps):
                    factors[i] *= p ** e
            factors = sorted(factors) or [1]
            out.append("abelian:" + ":".join(map(str, factors)))
    return out


def chartab_corpus():
    """Catalog groups (order <= 30000) whose character tables are certified."""
    return [
        "cyclic:1", "cyclic:2", "cyclic:12", "dihedral:5", "dihedral:12", "quaternion:8",
        "quaternion:16", "dicyclic:3", "symmetric:3", "symmetric:4", "symmetric:5",
        "symmetric:6", "symmetric:7", "alternating:5", "alternating:6", "alternating:7",
        "gl:2:3", "gl:2:5", "gl:2:7", "gl:2:11", "gl:2:13", "sl:2:3", "sl:2:5", "sl:2:7",
        "sl:2:11", "sl:2:13", "gl:3:2", "sl:3:3", "heisenberg:3", "heisenberg:5",
        "heisenberg:7", "frobenius:7:3", "frobenius:19:3", "frobenius:13:4",
        "product:(heisenberg:3),(cyclic:2)", "double:(symmetric:3)", "double:(gl:2:3)",
        "semidirect:(heisenberg:3),(cyclic:2):0", "abelian:2:4:8", "alternating:8",
        "gl:3:3", "sl:2:17", "sl:2:19", "sl:2:23", "sl:2:29", "heisenberg:11",
        "frobenius:31:5", "dihedral:100", "double:(alternating:5)", "abelian:3:9:9",
    ]


def _unit_roots(m):
    return [u for u in range(m) if np.gcd(u, m) == 1 and (u * u) % m == 1 % m]


def abelian_involution_catalog(G):
    """Monomial involutions of an AbelianGroup, up to permuting equal factors.

    On each run of equal moduli, the first 2r factors are swapped in pairs
    and the rest are scaled by square roots of 1 (non-decreasing), for
    every r. Used where exhaustive search is out of budget.
    """
    if not isinstance(G, AbelianGroup):
        raise TypeError("abelian catalog needs an AbelianGroup")
    mods = G.moduli
    runs = [list(g) for _, g in itertools.groupby(range(len(mods)), key=lambda i: mods[i])]
    per_run = []
    for run in runs:
        m = mods[run[0]]
        roots = _unit_roots(m)
        opts = []
        for r in range(len(run) // 2 + 1):
            rest = len(run) - 2 * r
            for scal in itertools.combinations_with_replacement(roots, rest):
                opts.append((r, scal))
        per_run.append(opts)
    comps = G._split(G.elements())
    out = []
    seen = set()
    for choice in itertools.product(*per_run):
        new = [None] * len(mods)
        for run, (r, scal) in zip(runs, choice):
            m = mods[run[0]]
            for k in range(r):
                a, b = run[2 * k], run[2 * k + 1]
                new[a], new[b] = comps[b], comps[a]
            for i, u in zip(run[2 * r:], scal):
                new[i] = comps[i] * u % m
        img = G._join(new)
        key = img.tobytes()
        if key in seen:
            continue
        seen.add(key)
        out.append(Automorphism(G, img, name=f"monomial:{len(out)}"))
    return out
