"""Executable property suites over the default corpora.

Each suite returns a SuiteResult with per-check pass/total counts, the first
failing instance (enough to replay it), and a list of numeric outputs used
for determinism digests.
"""
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import config
from .catalog import (abelian_involution_catalog, abelian_types, all_involutions,
                      build, chartab_corpus, involution_by_name, odd_corpus,
                      order_formula, parse_group_spec, standard_involutions)
from .chartab import character_table, invariant_dimension, table_of
from .clifford import (clifford_stabilizer, factorization_expected,
                       main_theorem_trace, mackey_invariants, tensor_factorize)
from .cohomology import (check_action_laws, coboundaries, gamma_inv_cosets,
                         h1_extension_bounds, h1_kernel, h1_s2, h2_fp_dimension,
                         h2_fp_dimension_full, h2_lemma_checks, involutions_of_order_two)
from .errors import PreconditionError, VerificationError
from .groups import (center, derived_subgroup, factorize, find_involutive_automorphisms,
                     generate_subgroup, p_radical)
from .pairs import (SymmetricPair, gelfand_kazhdan_check, lapid_prasad_check,
                    nu, polar_check)

SUITES = ("odd", "h1", "h2", "clifford", "mackey", "kernel", "main")


@dataclass
class SuiteResult:
    suite: str
    counts: dict = field(default_factory=dict)
    failure: dict = None
    notes: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def record(self, check, ok, instance=None):
        c = self.counts.setdefault(check, [0, 0])
        c[1] += 1
        if ok:
            c[0] += 1
        elif self.failure is None:
            self.failure = {"suite": self.suite, "check": check, "instance": instance}
        return ok

    @property
    def ok(self):
        return all(p == t for p, t in self.counts.values())

    def digest(self):
        blob = json.dumps(self.values, sort_keys=True, default=int).encode()
        return hashlib.sha256(blob).hexdigest()

    def to_json(self):
        return {"suite": self.suite, "ok": self.ok,
                "checks": {k: {"passed": v[0], "total": v[1]} for k, v in self.counts.items()},
                "failure": self.failure, "notes": self.notes, "digest": self.digest()}

    def lines(self):
        out = []
        for k, (p, t) in self.counts.items():
            out.append(f"[{self.suite}] {k}: {'PASS' if p == t else 'FAIL'} {p}/{t}")
        out.extend(f"[{self.suite}] note: {n}" for n in self.notes)
        return out


def _specs(specs, default):
    return list(specs) if specs else list(default)


# ------------------------------------------------------------------ odd order

ODD_SEARCH_CAP = 10_000


def odd_suite(specs=None):
    """Gelfand, Gelfand-Kazhdan, polar decomposition, Lapid-Prasad and H^1
    triviality on odd groups, over every involution found by exhaustive search."""
    res = SuiteResult("odd")
    for spec in _specs(specs, odd_corpus()):
        G = build(spec)
        if G.order % 2 == 0:
            raise PreconditionError(f"{spec} has even order")
        found = find_involutive_automorphisms(G, cap=ODD_SEARCH_CAP)
        res.record("enumeration_complete", found.complete, {"spec": spec})
        character_table(G)
        for k, theta in enumerate(found):
            inst = {"spec": spec, "theta_index": k, "theta": theta.name}
            pair = SymmetricPair(G, theta)
            v = nu(pair)
            res.record("gelfand", v <= 1, inst)
            gk, _ = gelfand_kazhdan_check(pair)
            res.record("gelfand_kazhdan", gk, inst)
            pc = polar_check(pair)
            res.record("polar", not any(pc.values()), dict(inst, failures=pc))
            lp = all(r.dual_twist_equal for r in lapid_prasad_check(pair) if r.distinguished)
            res.record("lapid_prasad", lp, inst)
            h = len(h1_s2(G, theta))
            res.record("h1_trivial", h == 1, dict(inst, h1=h))
            res.values.append([spec, k, v, h, theta.fixed_subgroup().order])
    return res


# ------------------------------------------------------------------------ H^1

ABELIAN_BUDGET = 600


def abelian_catalog_involutions(G):
    """Monomial catalog plus the standard involutions, deduplicated."""
    cands = abelian_involution_catalog(G) + [t for _, t in standard_involutions(G)]
    uniq = {t.images.tobytes(): t for t in cands}
    return sorted(uniq.values(), key=lambda t: tuple(t.images))


def _is_two_group(spec):
    n = order_formula(parse_group_spec(spec))
    return n > 1 and n & (n - 1) == 0


def h1_suite(max_abelian=1024, specs=None, small=None, budget=ABELIAN_BUDGET):
    """|H^1| <= |A_2| on abelian groups; action laws and the coboundary orbit
    on small pairs.

    Every abelian type is checked on its monomial catalog. Every involution
    of A splits over the 2-primary and odd parts with H^1 of the odd part
    trivial, so the 2-primary types are also run through exhaustive search
    where it finishes within ``budget`` nodes.
    """
    res = SuiteResult("h1")
    types = _specs(specs, abelian_types(max_abelian))
    for spec in types:
        G = build(spec, cache=False)
        a2 = involutions_of_order_two(G)
        for k, theta in enumerate(abelian_catalog_involutions(G)):
            h = len(h1_s2(G, theta))
            res.record("abelian_bound", h <= a2,
                       {"spec": spec, "theta_index": k, "h1": h, "a2": a2})
            res.values.append([spec, k, h])
    twos = [s for s in types if _is_two_group(s)]
    full = 0
    for spec in twos:
        G = build(spec, cache=False)
        found = find_involutive_automorphisms(G, budget=budget, cap=max(G.order, 1))
        if not found.complete:
            continue
        full += 1
        a2 = involutions_of_order_two(G)
        for k, theta in enumerate(found):
            h = len(h1_s2(G, theta))
            res.record("abelian_bound_exhaustive", h <= a2,
                       {"spec": spec, "theta_index": k, "h1": h, "a2": a2})
            res.values.append([spec, "all", k, h])
    res.notes.append(f"abelian types: {len(types)} on the monomial catalog; 2-primary "
                     f"types with exhaustive search: {full} of {len(twos)}")
    for spec in _specs(small, ["symmetric:3", "symmetric:4", "gl:2:3", "quaternion:8",
                               "dihedral:6", "heisenberg:3", "double:(symmetric:3)"]):
        G = build(spec)
        for name, theta in standard_involutions(G):
            inst = {"spec": spec, "theta": name}
            res.record("action_laws", check_action_laws(G, theta), inst)
            hs = h1_s2(G, theta)
            triv = np.sort(hs.z[hs.labels == hs.trivial_class])
            res.record("coboundary_orbit", np.array_equal(triv, coboundaries(G, theta)), inst)
            res.values.append([spec, name, len(hs)])
    # subgroup and quotient bounds over theta-invariant normal subgroups
    for spec in _specs(small, ["symmetric:4", "gl:2:3", "quaternion:8", "dihedral:6",
                               "heisenberg:3", "double:(symmetric:3)"]):
        G = build(spec)
        invs = find_involutive_automorphisms(G, budget=budget * 100)
        normals = {}
        for N in [center(G), derived_subgroup(G)] + [p_radical(G, q) for q in (2, 3)]:
            if 1 < N.order < G.order:
                normals[N.members.tobytes()] = N
        for N in normals.values():
            for k, theta in enumerate(invs):
                if not theta.preserves(N):
                    continue
                r = h1_extension_bounds(G, N, theta, invs)
                inst = {"spec": spec, "kernel_order": N.order, "theta_index": k}
                res.record("subgroup_bound", r["subgroup_ok"], inst)
                res.record("quotient_bound", r["quotient_ok"], inst)
                res.values.append([spec, N.order, k, r["h1_G"], r["h1_N"], r["h1_Q"], r["max_tau"]])
    return res


# ------------------------------------------------------------------------ H^2

H2_ORACLES = [
    ("cyclic:2", 2, 1), ("cyclic:4", 2, 1), ("cyclic:3", 2, 0), ("cyclic:9", 3, 1),
    ("product:(cyclic:3),(cyclic:3)", 3, 3), ("abelian:2:2", 2, 3),
    ("quaternion:8", 2, 2), ("symmetric:3", 3, 0), ("symmetric:3", 2, 1),
    ("alternating:5", 5, 0), ("alternating:5", 3, 0), ("alternating:5", 2, 1),
]


def _small_extensions(limit=20):
    """(spec, N, p) with N a normal subgroup and one of the coprimality
    hypotheses of the H^2 comparison satisfied; everything within the h2 cap."""
    cap = config.get_caps().h2
    pool = ["symmetric:3", "symmetric:4", "dihedral:4", "dihedral:5", "dihedral:6",
            "dihedral:9", "quaternion:8", "dicyclic:3", "dicyclic:5", "frobenius:7:3",
            "heisenberg:3", "alternating:4", "cyclic:6", "cyclic:12", "abelian:2:6",
            "product:(symmetric:3),(cyclic:2)", "product:(cyclic:3),(symmetric:3)",
            "frobenius:13:3", "frobenius:13:4", "gl:2:3", "sl:2:3", "dihedral:10"]
    out = []
    for spec in pool:
        G = build(spec)
        if G.order > cap:
            continue
        normals = [center(G), derived_subgroup(G)]
        normals += [p_radical(G, q) for q in sorted(factorize(G.order))]
        seen = set()
        for N in normals:
            if N.order in (1, G.order) or N in seen:
                continue
            seen.add(N)
            for p in sorted(set(factorize(G.order)) | {2, 3}):
                q = G.order // N.order
                if N.order % p and q % p:
                    continue
                if N.order % p == 0 and q % p == 0:
                    continue
                out.append((spec, N, p))
                if len(out) >= limit:
                    return out
    return out


def h2_suite(limit=20):
    res = SuiteResult("h2")
    for spec, p, want in H2_ORACLES:
        G = build(spec)
        d = h2_fp_dimension(G, p)
        res.record("oracle", d == want, {"spec": spec, "p": p, "dim": d, "expected": want})
        res.values.append([spec, p, d])
    for spec, p in [("symmetric:3", 3), ("cyclic:4", 2), ("quaternion:8", 2), ("abelian:2:2", 2)]:
        G = build(spec)
        a, b = h2_fp_dimension(G, p), h2_fp_dimension_full(G, p)
        res.record("reduced_vs_full", a == b, {"spec": spec, "p": p, "reduced": a, "full": b})
    exts = _small_extensions(limit)
    for spec, N, p in exts:
        G = build(spec)
        out = h2_lemma_checks(G, N, p)
        res.record("restriction_inflation", out["ok"],
                   {"spec": spec, "normal_order": N.order, "p": p, "detail": out})
        res.values.append([spec, N.order, p, out["dim_middle"]])
    res.notes.append(f"{len(exts)} extensions checked")
    return res


# ------------------------------------------------------------------- Clifford


def clifford_suite(max_order=2000, specs=None):
    """Ind sigma = rho with N = Rad_p over every irreducible; tensor
    factorization whenever its hypotheses hold."""
    res = SuiteResult("clifford")
    undecided = 0
    default = [s for s in chartab_corpus() + odd_corpus()
               if (order_formula(parse_group_spec(s)) or 0) <= max_order]
    for spec in dict.fromkeys(_specs(specs, default)):
        G = build(spec)
        tab = character_table(G)
        for p in sorted(factorize(G.order)):
            N = p_radical(G, p)
            if N.order == 1:
                continue
            expected = factorization_expected(G, N, p)
            undecided += expected is None
            for k, rho in enumerate(tab.irreducibles):
                inst = {"spec": spec, "p": p, "rho": k}
                try:
                    cl = clifford_stabilizer(G, N, rho)
                    ok = True
                except VerificationError as e:
                    ok = False
                    inst["error"] = str(e)
                res.record("induction", ok, inst)
                if ok:
                    res.values.append([spec, p, k, cl.delta.order, cl.sigma.degree])
                if expected:
                    try:
                        fac = tensor_factorize(G, N, rho, p)
                    except PreconditionError:
                        continue
                    res.record("factorization", fac is not None, inst)
    res.notes.append(f"factorization undecided (quotient above h2 cap) on {undecided} (group, p)")
    return res


# --------------------------------------------------------------- random draws

MACKEY_POOL = ["symmetric:3", "symmetric:4", "dihedral:5", "dihedral:6", "quaternion:8",
               "gl:2:3", "sl:2:3", "heisenberg:3", "frobenius:7:3", "alternating:4",
               "alternating:5", "double:(symmetric:3)", "product:(heisenberg:3),(cyclic:2)",
               "semidirect:(heisenberg:3),(cyclic:2):0", "dicyclic:3", "symmetric:5"]


def _draw_pair(rng, pool):
    spec = pool[int(rng.integers(len(pool)))]
    G = build(spec)
    thetas = standard_involutions(G)
    name, theta = thetas[int(rng.integers(len(thetas)))]
    return spec, G, name, theta


def mackey_suite(draws=500, seed=0, pool=None):
    """Double-coset sum against the direct invariant dimension of Ind sigma."""
    res = SuiteResult("mackey")
    rng = np.random.default_rng(seed)
    pool = pool or MACKEY_POOL
    for i in range(draws):
        spec, G, name, theta = _draw_pair(rng, pool)
        gens = [int(x) for x in rng.integers(0, G.order, int(rng.integers(1, 3)))]
        D = generate_subgroup(G, gens)
        dtab = table_of(D, character_table(G))
        j = int(rng.integers(len(dtab)))
        sigma = dtab.irreducibles[j]
        total, parts = mackey_invariants(G, D, sigma, theta, check=False)
        from .chartab import induce
        direct = invariant_dimension(induce(sigma, G), theta.fixed_subgroup())
        res.record("mackey", total == direct,
                   {"draw": i, "spec": spec, "theta": name, "delta_gens": gens, "sigma": j,
                    "sum": total, "direct": direct})
        res.values.append([i, spec, name, D.order, j, total])
    return res


def kernel_suite(draws=100, seed=1, pool=None):
    """|D\\G^inv/G^theta| against the kernel of H^1(D) -> H^1(G) for random
    theta-stable D."""
    res = SuiteResult("kernel")
    rng = np.random.default_rng(seed)
    pool = pool or MACKEY_POOL
    for i in range(draws):
        spec, G, name, theta = _draw_pair(rng, pool)
        xs = [int(x) for x in rng.integers(0, G.order, int(rng.integers(1, 3)))]
        D = generate_subgroup(G, xs + [int(theta.images[x]) for x in xs])
        a = gamma_inv_cosets(G, D, theta, check=False)
        b = h1_kernel(G, D, theta)
        res.record("kernel_identity", a == b,
                   {"draw": i, "spec": spec, "theta": name, "gens": xs, "cosets": a, "kernel": b})
        res.values.append([i, spec, name, D.order, a])
    return res


# ----------------------------------------------------------------- main trace

# (spec, involution name, p); odd groups, groups with Rad_p = 1, and mixed
# semidirect instances with nontrivial Rad_p and even part
MAIN_INSTANCES = [
    ("heisenberg:3", "antidiagonal-transpose", 3),
    ("heisenberg:5", "diag:+-+", 5),
    ("frobenius:7:3", "diag:+-", 7),
    ("frobenius:7:3", "diag:+-", 3),
    ("product:(heisenberg:3),(cyclic:3)", "antidiagonal-transposexinversion", 3),
    ("symmetric:4", "inner:0", 3),
    ("gl:2:3", "transpose-inverse", 3),
    ("alternating:5", "inner:0", 5),
    ("symmetric:3", "id", 5),
    ("semidirect:(heisenberg:3),(cyclic:2):0", "inner:0", 3),
    ("semidirect:(heisenberg:3),(cyclic:2):1", "inner:0", 3),
    ("semidirect:(heisenberg:3),(cyclic:2):7", "inner:0", 3),
    ("product:(heisenberg:3),(cyclic:2)", "antidiagonal-transposexid", 3),
    ("semidirect:(cyclic:9),(cyclic:2):0", "inner:0", 3),
    ("semidirect:(frobenius:7:3),(cyclic:2):0", "id", 7),
    ("semidirect:(heisenberg:3),(cyclic:4):0", "id", 3),
    ("dihedral:15", "inner:0", 5),
]


def main_suite(instances=None, spec=None, p=None):
    """Nine-step trace on every irreducible of each instance. With ``spec``
    (and ``p``) the trace runs over every standard involution of that group."""
    res = SuiteResult("main")
    if spec is not None:
        G = build(spec)
        ps = [p] if p else [q for q in sorted(factorize(G.order)) if q % 2]
        instances = [(spec, name, q) for name, _ in standard_involutions(G) for q in ps]
    for spec_, name, q in instances or MAIN_INSTANCES:
        G = build(spec_)
        theta = involution_by_name(G, name)
        for k, rho in enumerate(character_table(G).irreducibles):
            inst = {"spec": spec_, "theta": name, "p": q, "rho": k}
            try:
                rep = main_theorem_trace(G, theta, rho, q)
                ok = True
            except VerificationError as e:
                ok = False
                inst.update(step=e.step, trace=e.instance)
            res.record("trace", ok, inst)
            if ok:
                res.values.append([spec_, name, q, k, rep.early_exit,
                                   [s["values"] for s in rep.steps]])
                for s in rep.steps:
                    if s["step"] == 8:
                        res.record("kernel_identity", s["ok"], inst)
    return res


def run_suite(name, **kw):
    fn = {"odd": odd_suite, "h1": h1_suite, "h2": h2_suite, "clifford": clifford_suite,
          "mackey": mackey_suite, "kernel": kernel_suite, "main": main_suite}[name]
    return fn(**kw)
