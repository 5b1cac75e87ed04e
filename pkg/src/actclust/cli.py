"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 infeasible, 3 verification
mismatch (or counterexample ratio below threshold), 4 self-test failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import clustering
from .constraints import check_t, is_feasible, partition_cost, partition_problems, Partition, required_count
from .errors import InfeasibleError, InputError, RefusalError
from .instances import (CounterexampleSpec, load_instance, load_report, make_alternative_partition,
                        make_counterexample, run_to_report, save_instance, save_report)
from .minimizers import brute_force_best_partition

log = logging.getLogger("actclust")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_MISMATCH, EXIT_SELFTEST = 0, 1, 2, 3, 4
OUT_DIR_ENV = "ACTCLUST_OUT_DIR"
ALGORITHMS = ("gsa", "agsa", "agsa-multi", "two-opt", "parallel", "brute")


def default_out(name: str) -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / name


def _solve(algo, oracle, grouping, t, k, group):
    if algo == "gsa":
        run = clustering.gsa(oracle, k)
        run.params["t"] = t
        run.certificate = is_feasible(run.partition, grouping, t)
        run.feasible = run.certificate is not None
        return run
    if algo == "agsa":
        return clustering.actionable_gsa(oracle, grouping, group, t, k)
    if algo == "agsa-multi":
        return clustering.actionable_gsa_multigroup(oracle, grouping, t, k)
    if algo == "two-opt":
        if k != 2:
            raise InputError("two-opt always produces k=2 clusters")
        return clustering.optimal_two_clustering(oracle, grouping, t)
    if algo == "parallel":
        return clustering.parallel_split(oracle, grouping, t, k)
    start = oracle.calls
    best = brute_force_best_partition(oracle, k, grouping, t)
    return clustering.ClusteringRun("brute", {"k": k, "t": t, "group": None}, best.partition,
                                    best.cost, oracle.calls - start, [], best.certificate,
                                    best.certificate is not None)


def cmd_cluster(args) -> int:
    inst = load_instance(args.instance)
    t = check_t(inst.t if args.t is None else args.t)
    grouping = inst.grouping()
    group = grouping.index(args.group) if args.group is not None else 0
    oracle = inst.oracle()
    out = Path(args.out) if args.out else default_out(f"{args.algo}-report.json")
    try:
        run = _solve(args.algo, oracle, grouping, t, args.k, group)
    except InfeasibleError as exc:
        save_report({"algorithm": args.algo,
                     "params": {"k": args.k, "t": t, "group": args.group, "seed": args.seed},
                     "clusters": [], "cost": None, "oracle_calls": oracle.calls, "feasible": False,
                     "certificate": None, "degraded": False, "trace": [], "error": str(exc)}, out)
        print(f"infeasible: {exc}")
        print(f"report: {out}")
        return EXIT_INFEASIBLE
    report = run_to_report(run, grouping, seed=args.seed)
    save_report(report, out)
    cert = report["certificate"]
    print(f"algorithm: {run.algorithm}  k: {args.k}  t: {t}")
    print(f"clusters: {len(run.partition)}{'  (degraded)' if run.degraded else ''}")
    print(f"cost: {run.cost:.12g}")
    print("certificate: " + (f"group {cert['group']} in cluster {cert['cluster']} "
                             f"(fraction {cert['fraction']:.4g})" if cert else "none"))
    print(f"oracle calls: {run.oracle_calls}")
    print(f"report: {out}")
    return EXIT_OK if run.feasible else EXIT_INFEASIBLE


def cmd_counterexample(args) -> int:
    spec = CounterexampleSpec(n=args.n, t=args.t, eps=args.eps, k=args.k)
    inst, landmarks = make_counterexample(spec)
    grouping = inst.grouping()
    oracle = inst.oracle()
    out = Path(args.out) if args.out else default_out("counterexample-report.json")
    inst_path = out.with_name(out.stem + ".instance.json")
    save_instance(inst, inst_path)

    alt = make_alternative_partition(landmarks, spec.k)
    alt_cost = partition_cost(oracle, alt)
    try:
        run = clustering.actionable_gsa(oracle, grouping, 0, spec.t, spec.k)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    ratio = run.cost / alt_cost
    report = run_to_report(run, grouping)
    report["comparison"] = {
        "alternative_clusters": [sorted(b) for b in alt.blocks],
        "alternative_cost": alt_cost,
        "alternative_feasible": is_feasible(alt, grouping, spec.t) is not None,
        "ratio": ratio,
        "threshold": args.threshold,
    }
    save_report(report, out)
    print(f"instance: |V|={spec.n} t={spec.t} eps={spec.eps} k={spec.k} "
          f"(clique {len(landmarks['V1'])}, path {len(landmarks['V2'])})")
    print(f"actionable greedy cost: {run.cost:.12g}")
    print(f"alternative cost:       {alt_cost:.12g}")
    print(f"ratio: {ratio:.6g}  (threshold {args.threshold:g})")
    print(f"report: {out}")
    print(f"instance file: {inst_path}")
    return EXIT_OK if ratio >= args.threshold else EXIT_MISMATCH


def verify_report(inst, report) -> list[str]:
    """Differences between a report and a from-scratch recomputation; empty if consistent."""
    clusters = report["clusters"]
    problems = partition_problems(inst.n, clusters)
    if problems:
        return problems
    part = Partition(inst.n, clusters)
    oracle = inst.oracle()
    diffs = []
    cost = partition_cost(oracle, part)
    reported = report["cost"]
    if reported is None or abs(cost - reported) > oracle.tol * max(1.0, abs(cost)):
        diffs.append(f"cost: report {reported}, recomputed {cost}")
    params = report.get("params") or {}
    t = params.get("t")
    t = inst.t if t is None else t
    grouping = inst.grouping()
    feasible = is_feasible(part, grouping, t) is not None
    if bool(report["feasible"]) != feasible:
        diffs.append(f"feasible: report {report['feasible']}, recomputed {feasible}")
    cert = report["certificate"]
    if cert is not None:
        try:
            g = grouping.groups[grouping.index(cert["group"])]
            hit = len(set(clusters[cert["cluster"]]) & g)
        except (InputError, IndexError, KeyError, TypeError) as exc:
            diffs.append(f"certificate: unusable ({exc})")
        else:
            if hit < required_count(t, len(g)) or abs(hit / len(g) - cert["fraction"]) > 1e-12:
                diffs.append(f"certificate: cluster {cert['cluster']} holds {hit}/{len(g)} of "
                             f"group {cert['group']}, report says {cert['fraction']}")
    return diffs


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    report = load_report(args.report)
    if report.get("cost") is None:
        print("report records an infeasible run; nothing to verify")
        return EXIT_MISMATCH if report.get("feasible") else EXIT_OK
    diffs = verify_report(inst, report)
    if diffs:
        print("verification FAILED")
        for d in diffs:
            print(f"  {d}")
        return EXIT_MISMATCH
    print(f"verification passed: cost {report['cost']:.12g}, feasible={report['feasible']}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .battery import run_battery

    results = run_battery(seeds=args.seeds, n_max=args.n_max, k_max=args.k_max)
    out_dir = Path(args.out_dir) if args.out_dir else default_out("selftest-failures")
    failed = 0
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"{status}  {res.name}: {res.checked} checked, {res.skipped} skipped, "
              f"{len(res.failures)} failed")
        for seed, message, inst in res.failures:
            failed += 1
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / f"{res.name.replace(' ', '_')}-seed{seed}.json"
            save_instance(inst, path)
            print(f"      seed {seed}: {message} (instance saved to {path})")
    print(f"{'all suites passed' if not failed else f'{failed} failure(s)'}")
    return EXIT_OK if not failed else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="actclust", description="Actionable symmetric submodular clustering")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cluster", help="cluster an instance file")
    c.add_argument("--instance", required=True)
    c.add_argument("--algo", required=True, choices=ALGORITHMS)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--t", type=float)
    c.add_argument("--group")
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_cluster)

    x = sub.add_parser("counterexample", help="reproduce the clique-plus-path counterexample")
    x.add_argument("--n", type=int, default=100)
    x.add_argument("--t", type=float, default=0.51)
    x.add_argument("--eps", type=float, default=0.01)
    x.add_argument("--k", type=int, default=10)
    x.add_argument("--threshold", type=float, default=1e4)
    x.add_argument("--out")
    x.set_defaults(func=cmd_counterexample)

    v = sub.add_parser("verify", help="recheck a report against its instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--report", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("selftest", help="run the seeded invariant battery")
    s.add_argument("--n-max", type=int, default=10)
    s.add_argument("--seeds", type=int, default=100)
    s.add_argument("--k-max", type=int, default=4)
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "k", 1) is not None and getattr(args, "k", 1) < 1:
        print("error: k must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, RefusalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
