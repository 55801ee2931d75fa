"""sympair command line.

Exit codes: 0 success, 2 cap or spec errors, 3 failed assertions or checks.
Options can also come from ``--config FILE``: one flag per line, same
spelling as on the command line, '#' comments. Explicit flags win.
"""
import argparse
import json
import shlex
import sys
import time
from pathlib import Path

from . import config
from .catalog import (all_involutions, build, involution_by_name, parse_group_spec,
                      standard_involutions)
from .chartab import character_table
from .cohomology import h1_s2, h2_fp_dimension
from .errors import CapExceededError, ConfigError, SympairError, VerificationError
from .pairs import SymmetricPair, multiplicity_report


def _write_json(path, obj):
    if path:
        Path(path).write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _select(G, selector):
    """[(name, Automorphism)], policy label for an involution selector."""
    if selector == "all":
        found, complete = all_involutions(G)
        return [(t.name, t) for t in found], "true-max" if complete else "catalog-max"
    cat = standard_involutions(G)
    if selector == "standard":
        return cat, "catalog-max"
    return [(selector, involution_by_name(G, selector))], f"single:{selector}"


def cmd_table(args):
    G = build(args.spec)
    tab = character_table(G)
    tab.certify()
    print(tab.to_text())
    _write_json(args.out, tab.to_json())


def cmd_mult(args):
    G = build(args.spec)
    thetas, label = _select(G, args.theta)
    reports = []
    for name, theta in thetas:
        rep = multiplicity_report(SymmetricPair(G, theta, label=name),
                                  catalog_complete=label == "true-max")
        reports.append(rep.to_json())
        print(f"{G.name}  theta={name}  |G^theta|={theta.fixed_subgroup().order}"
              f"  nu={rep.nu}  mu={rep.mu}")
        if args.verbose:
            for i, r in enumerate(rep.rows):
                print(f"  X{i} deg={r['degree']} inv={r['inv_dim']} lp_ok={r['lp_ok']}")
    nu_max = max(r["nu"] for r in reports)
    mu_max = max(r["mu"] for r in reports)
    print(f"max over {len(reports)} involution(s) [{label}]: nu={nu_max} mu={mu_max}")
    _write_json(args.out, {"spec": G.name, "policy": label, "nu": nu_max, "mu": mu_max,
                           "reports": reports})


def cmd_h1(args):
    G = build(args.spec)
    thetas, label = _select(G, args.theta)
    out = []
    for name, theta in thetas:
        hs = h1_s2(G, theta)
        out.append(hs.to_json())
        print(f"{G.name}  theta={name}  |Z|={hs.z.size}  |H1|={len(hs)}")
    _write_json(args.out, {"spec": G.name, "policy": label, "results": out})


def cmd_h2(args):
    G = build(args.spec)
    d = h2_fp_dimension(G, args.p)
    print(f"dim H^2({G.name}, F_{args.p}) = {d}")
    _write_json(args.out, {"spec": G.name, "p": args.p, "dim": d})


def cmd_verify(args):
    from .verify import SUITES, run_suite

    names = SUITES if args.suite == "all" else (args.suite,)
    results = []
    for name in names:
        kw = {}
        if args.spec and name in ("odd", "h1", "clifford"):
            kw["specs"] = [parse_group_spec(s).render() for s in args.spec]
        if name == "main" and args.spec:
            if len(args.spec) != 1:
                raise SympairError("verify main takes a single --spec")
            kw.update(spec=parse_group_spec(args.spec[0]).render(), p=args.p)
        if name in ("mackey", "kernel"):
            if args.draws is not None:
                kw["draws"] = args.draws
            kw["seed"] = args.seed
        t0 = time.perf_counter()
        res = run_suite(name, **kw)
        for line in res.lines():
            print(line)
        print(f"[{name}] {'PASS' if res.ok else 'FAIL'} in {time.perf_counter() - t0:.1f}s")
        results.append(res)
    _write_json(args.out, {"suites": [r.to_json() for r in results],
                           "ok": all(r.ok for r in results)})
    bad = next((r for r in results if not r.ok), None)
    if bad is not None:
        print("first failing instance:", json.dumps(bad.failure, sort_keys=True, default=str),
              file=sys.stderr)
        return 3
    return 0


def cmd_survey(args):
    from .survey import CSV_COLUMNS, run_survey

    primes = [int(x) for x in args.primes.split(",") if x]
    res = run_survey(args.template, primes, policy=args.theta, jobs=args.jobs)
    print(",".join(CSV_COLUMNS))
    for r in res.rows:
        print(",".join("" if r[c] is None else str(r[c]) for c in CSV_COLUMNS))
    s = res.summary
    print("summary: " + json.dumps(s, sort_keys=True))
    if args.csv:
        res.write_csv(args.csv)
        if not args.no_plot:
            from .plotting import plot_survey

            plot_survey(res, args.png or str(Path(args.csv).with_suffix(".png")))
    elif args.png:
        from .plotting import plot_survey

        plot_survey(res, args.png)
    _write_json(args.out, res.to_json())


def build_parser():
    ap = argparse.ArgumentParser(prog="sympair", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="file of extra flags, one per line")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, theta=False):
        p.add_argument("--out", help="write JSON here")
        if theta:
            p.add_argument("--theta", default="standard",
                           help="all | standard | <involution name>")
        return p

    p = common(sub.add_parser("table", help="certified character table"))
    p.add_argument("spec")
    p.set_defaults(fn=cmd_table)

    p = common(sub.add_parser("mult", help="multiplicities nu and mu"), theta=True)
    p.add_argument("spec")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fn=cmd_mult)

    p = common(sub.add_parser("h1", help="twisted H^1(S_2, G)"), theta=True)
    p.add_argument("spec")
    p.set_defaults(fn=cmd_h1)

    p = common(sub.add_parser("h2", help="dim H^2(G, F_p)"))
    p.add_argument("spec")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(fn=cmd_h2)

    p = common(sub.add_parser("verify", help="run property suites"))
    p.add_argument("suite", choices=["odd", "h1", "h2", "clifford", "mackey", "kernel",
                                     "main", "all"])
    p.add_argument("--spec", action="append", help="restrict to these groups")
    p.add_argument("--p", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = common(sub.add_parser("survey", help="nu and mu across primes"), theta=True)
    p.add_argument("template", help="family prefix such as gl:2, or a spec with {p}")
    p.add_argument("--primes", default="3,5,7")
    p.add_argument("--csv")
    p.add_argument("--png", help="figure path (default: next to the CSV)")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_survey)
    return ap


def _expand_config(argv):
    """Splice flags from --config FILE in right after the subcommand."""
    argv = list(argv)
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            del argv[i:i + 2]
            break
        if a.startswith("--config="):
            path = a.split("=", 1)[1]
            del argv[i]
            break
    if path is None:
        return argv
    extra = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            extra.extend(shlex.split(line))
    cmds = {"table", "mult", "h1", "h2", "verify", "survey"}
    pos = next((i for i, a in enumerate(argv) if a in cmds), None)
    if pos is None:
        return extra + argv
    # positionals stay after the subcommand; config flags precede explicit ones
    head, rest = argv[:pos + 1], argv[pos + 1:]
    positional = []
    while rest and not rest[0].startswith("-"):
        positional.append(rest.pop(0))
    return head + positional + extra + rest


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        if config.ENV_ERROR:
            raise ConfigError(config.ENV_ERROR)
        args = build_parser().parse_args(_expand_config(argv))
        code = args.fn(args)
        return 0 if code is None else code
    except CapExceededError as e:
        print(f"sympair {argv[0] if argv else ''}: cap exceeded: {e}", file=sys.stderr)
        return e.exit_code
    except VerificationError as e:
        print(f"sympair {argv[0] if argv else ''}: verification failed at step {e.step}: {e}",
              file=sys.stderr)
        if e.instance is not None:
            print(json.dumps(e.instance, sort_keys=True, default=str), file=sys.stderr)
        return 3
    except SympairError as e:
        print(f"sympair {argv[0] if argv else ''}: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except AssertionError as e:
        print(f"sympair {argv[0] if argv else ''}: assertion failed: {e}", file=sys.stderr)
        return 3
    except FileNotFoundError as e:
        print(f"sympair: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
