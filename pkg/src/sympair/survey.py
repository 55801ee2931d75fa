"""Cross-prime surveys: instantiate a family at several primes and record
nu and mu over an involution policy.

Work is split into (prime, involution) cells, optionally spread over a
process pool; rows are assembled afterwards in prime order so the output
does not depend on scheduling.
"""
import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .catalog import all_involutions, build, parse_group_spec, standard_involutions
from .chartab import character_table
from .errors import CapExceededError, ParameterDomainError
from .pairs import SymmetricPair, mu, nu

CSV_COLUMNS = ["p", "spec", "order", "classes", "involutions", "nu", "mu", "policy",
               "status", "wall_time"]


def _fill(template, p):
    return template.format(p=p) if "{p}" in template else f"{template}:{p}"


def instantiate(template, p):
    """'gl:2' -> 'gl:2:p'; a template containing '{p}' is formatted instead."""
    return parse_group_spec(_fill(template, p)).render()


def _involutions(G, policy):
    """(list of (label, Automorphism), policy label), cached on the group so
    the cells of one row share a single search."""
    key = ("survey_involutions", policy)
    if key not in G._cache:
        G._cache[key] = _select_involutions(G, policy)
    return G._cache[key]


def _select_involutions(G, policy):
    if policy == "all":
        found, complete = all_involutions(G)
        return [(t.name, t) for t in found], "true-max" if complete else "catalog-max"
    cat = standard_involutions(G)
    if policy == "standard":
        return cat, "catalog-max"
    chosen = [(n, t) for n, t in cat if n == policy]
    return chosen, f"single:{policy}"


def _cell(spec, policy, k):
    """nu and mu for the k-th involution of ``spec`` under ``policy``."""
    t0 = time.perf_counter()
    G = build(spec)
    character_table(G)
    thetas, _ = _involutions(G, policy)
    name, theta = thetas[k]
    pair = SymmetricPair(G, theta)
    return {"theta": name, "nu": nu(pair), "mu": mu(pair),
            "fixed_order": pair.fixed.order, "seconds": time.perf_counter() - t0}


@dataclass
class SurveyResult:
    template: str
    policy: str
    rows: list = field(default_factory=list)
    cells: list = field(default_factory=list)

    @property
    def summary(self):
        done = [r for r in self.rows if r["status"] == "ok"]
        if not done:
            return {"rows": len(self.rows), "computed": 0}
        first = done[0]
        nus = [r["nu"] for r in done]
        mus = [r["mu"] for r in done]
        return {
            "rows": len(self.rows),
            "computed": len(done),
            "skipped": len(self.rows) - len(done),
            "smallest_p": first["p"],
            "nu_at_smallest_p": first["nu"],
            "mu_at_smallest_p": first["mu"],
            "nu_max": max(nus),
            "mu_max": max(mus),
            "nu_constant": len(set(nus)) == 1,
            "mu_constant": len(set(mus)) == 1,
            "max_equals_smallest_p": max(nus) == first["nu"] and max(mus) == first["mu"],
        }

    def to_json(self, timings=True):
        rows = self.rows if timings else [{k: v for k, v in r.items() if k != "wall_time"}
                                          for r in self.rows]
        cells = self.cells if timings else [{k: v for k, v in c.items() if k != "seconds"}
                                            for c in self.cells]
        return {"template": self.template, "policy": self.policy, "columns": CSV_COLUMNS,
                "rows": rows, "cells": cells, "summary": self.summary}

    def dumps(self, timings=True):
        return json.dumps(self.to_json(timings), sort_keys=True, indent=1)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            for r in self.rows:
                w.writerow({k: ("" if r.get(k) is None else r[k]) for k in CSV_COLUMNS})


def run_survey(template, primes, policy="standard", jobs=1):
    res = SurveyResult(template, policy)
    plan = []
    for p in sorted(primes):
        try:
            spec = instantiate(template, p)
        except ParameterDomainError:
            spec = _fill(template, p)
        row = {"p": p, "spec": spec, "order": None, "classes": None, "involutions": 0,
               "nu": None, "mu": None, "policy": None, "status": "ok", "wall_time": 0.0}
        t0 = time.perf_counter()
        try:
            G = build(spec)  # re-raises the domain error for an out-of-range p
            thetas, label = _involutions(G, policy)
            row.update(order=G.order, classes=len(G.classes().reps),
                       involutions=len(thetas), policy=label)
            if not thetas:
                row["status"] = f"skipped: no involution named {policy}"
        except (CapExceededError, ParameterDomainError) as e:
            # one prime outside a family's range or caps must not sink the survey
            row["status"] = f"skipped: {e}"
        row["wall_time"] = time.perf_counter() - t0
        res.rows.append(row)
        if row["status"] == "ok":
            plan.extend((len(res.rows) - 1, spec, k) for k in range(len(thetas)))

    if jobs > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(_cell, spec, policy, k) for _, spec, k in plan]
            outs = [f.result() for f in futs]
    else:
        outs = [_cell(spec, policy, k) for _, spec, k in plan]

    for (i, spec, k), out in zip(plan, outs):
        row = res.rows[i]
        row["nu"] = max(row["nu"] or 0, out["nu"])
        row["mu"] = max(row["mu"] or 0, out["mu"])
        row["wall_time"] += out["seconds"]
        res.cells.append(dict(out, p=row["p"], spec=spec, index=k))
    for row in res.rows:
        row["wall_time"] = round(row["wall_time"], 3)
    for c in res.cells:
        c["seconds"] = round(c["seconds"], 3)
    return res
