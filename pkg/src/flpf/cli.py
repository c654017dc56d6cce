"""Command-line interface.

Subcommands: flpf (bound report), sweep (i.i.d. parameter sweep to CSV),
simulate (i.i.d. or adversarial runs), region (throughput-region
membership), examples (bundled end-to-end checks).

Exit codes: 0 success, 2 parse/validation error, 3 computation limit
exceeded, 4 check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import pooling, sim
from .errors import FlpfError, LimitExceeded, NetworkFileError
from .fading import from_iid_bernoulli
from .interference import interference_degree_graph
from .netfile import NetworkFile, parse_network, parse_rational

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_LIMIT = 3
EXIT_CHECK = 4


def data_path(name: str, data_dir=None) -> str:
    if data_dir is not None:
        return str(Path(data_dir) / name)
    return str(resources.files("flpf.data") / name)


def _parse_rates(g, text: str) -> dict:
    """Rates as 'a=1/3,b=0,...' or positional '1/3,0,...'."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if all("=" in p for p in parts):
        out = {}
        for p in parts:
            lab, _, val = p.partition("=")
            out[lab.strip()] = parse_rational(val.strip(), f"rates.{lab}")
        return out
    if len(parts) != g.num_links:
        raise NetworkFileError(
            f"expected {g.num_links} rates, got {len(parts)}", "rates"
        )
    return {
        link.label: parse_rational(p, f"rates[{i}]")
        for i, (link, p) in enumerate(zip(g.links, parts))
    }


def _parse_scaling(text: str):
    if text == "none":
        return "none"
    if text == "idegree":
        return "idegree"
    if text.startswith("gamma="):
        return ("gamma", parse_rational(text[6:], "scaling"))
    raise NetworkFileError(
        f"scaling must be none, idegree, or gamma=<rational>, got {text!r}",
        "scaling",
    )


def _parse_seeds(text: str) -> list[int]:
    if "," in text:
        return [int(s) for s in text.split(",") if s.strip()]
    return list(range(int(text)))


def _load(path: str) -> NetworkFile:
    return parse_network(path)


# -- flpf ---------------------------------------------------------------------


def cmd_flpf(args) -> int:
    nf = _load(args.network)
    g, f = nf.graph, nf.fading
    if args.subset:
        print(
            f"network: {g.num_links} links, interference degree "
            f"{interference_degree_graph(g)}, fading: {f.mode} "
            f"({f.support_size} states)"
        )
        subset = [s.strip() for s in args.subset.split(",")]
        val = pooling.subset_pooling_factor(g, f, subset)
        tag = " (vacuous: subset never active)" if val.vacuous else ""
        print(f"subset {','.join(subset)} pooling factor: {val.value}{tag}")
        if args.bounds and f.mode == "onoff":
            lb = pooling.column_sum_lower_bound(g, f, subset)
            print(f"column-sum lower bound: {lb.value}")
        exact, argmin = val.value, subset
    else:
        report = pooling.bound_report(g, f, exact=args.exact)
        argmin_text = (
            ",".join(l.label for l in report.argmin)
            if report.argmin
            else "(all subsets vacuous)"
        )
        if args.csv:
            print("links,interference_degree,exact,lower_min,inverse_degree,argmin")
            print(
                f"{g.num_links},{interference_degree_graph(g)},"
                f"{report.exact if report.exact is not None else ''},"
                f"{report.lower if report.lower is not None else ''},"
                f"{report.inverse_degree},"
                f"{argmin_text if report.exact is not None else ''}"
            )
        else:
            print(
                f"network: {g.num_links} links, interference degree "
                f"{interference_degree_graph(g)}, fading: {f.mode} "
                f"({f.support_size} states)"
            )
            if report.exact is not None:
                print(f"exact pooling factor: {report.exact}")
                print(f"  minimizing subset: {argmin_text}")
            if args.bounds:
                if report.lower is not None:
                    print(
                        f"column-sum lower bound (min over subsets): {report.lower}"
                    )
                print(f"inverse-degree lower bound: {report.inverse_degree}")
        exact = report.exact
        argmin = report.argmin
    if args.oracle_tol is not None and exact is not None and argmin:
        tol = Fraction(args.oracle_tol)
        lo, hi = pooling.subset_pooling_factor_bisection(g, f, argmin, tol)
        mid = (lo + hi) / 2
        err = abs(exact - mid)
        print(f"oracle interval: [{float(lo):.10f}, {float(hi):.10f}]")
        if err <= tol:
            print(f"oracle agreement: OK (|exact - midpoint| = {float(err):.3g})")
        else:
            print(f"oracle agreement: FAIL (|exact - midpoint| = {float(err):.3g})")
            return EXIT_CHECK
    return EXIT_OK


# -- sweep ----------------------------------------------------------------------


def _sweep_row(payload) -> str:
    network, p_str, exact = payload
    nf = _load(network)
    g = nf.graph
    p = Fraction(p_str)
    f = from_iid_bernoulli(g, p)
    lower_min, _ = pooling.min_column_sum_lower_bound(g, f)
    lower_full = pooling.column_sum_lower_bound(g, f, tuple(g.links))
    inv = pooling.inverse_degree_bound(g)
    exact_s = str(pooling.graph_pooling_factor(g, f)[0]) if exact else ""
    full_tag = "vacuous" if lower_full.vacuous else str(lower_full.value)
    return f"{p},{lower_min},{full_tag},{inv},{exact_s}"


def cmd_sweep(args) -> int:
    nf = _load(args.network)
    if nf.fading_spec.get("mode") != "iid":
        raise NetworkFileError("sweep needs a network with iid fading", "fading.mode")
    p0 = parse_rational(args.start, "--from")
    p1 = parse_rational(args.stop, "--to")
    step = parse_rational(args.step, "--step")
    if step <= 0 or p1 < p0:
        raise NetworkFileError("need --step > 0 and --to >= --from", "sweep")
    grid = []
    p = p0
    while p <= p1:
        grid.append((args.network, str(p), args.exact))
        p += step
    rows = _pool_map(_sweep_row, grid, args.workers)
    lines = ["p,lower_min,lower_full,inverse_degree,exact"] + rows
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _pool_map(fn, payloads, workers: int) -> list:
    """Bounded fan-out preserving input order; workers=1 stays in-process."""
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads))


# -- region ---------------------------------------------------------------------


def cmd_region(args) -> int:
    nf = _load(args.network)
    g, f = nf.graph, nf.fading
    rates = _parse_rates(g, args.rates) if args.rates else nf.rates
    if rates is None:
        raise NetworkFileError("no rates given (file or --rates)", "rates")
    scaling = _parse_scaling(args.scaling)
    verdict = pooling.region_membership(g, f, rates, scaling)
    pretty = " ".join(f"{l.label}={rates[l.label]}" for l in g.links)
    print(f"rates: {pretty}")
    print(f"scaling: {args.scaling}")
    inside = "inside closure" if verdict.inside else "outside"
    print(f"location: {verdict.location} ({inside})")
    if verdict.margin is not None:
        print(f"margin: {verdict.margin}")
    if verdict.certificate is not None:
        y, lhs, rhs = verdict.certificate
        ys = " ".join(f"{lab}={v}" for lab, v in y.items())
        print(f"certificate: y: {ys}")
        print(f"  y.rates = {lhs} > best attainable y-service = {rhs}")
    return EXIT_OK


# -- simulate ---------------------------------------------------------------------


def _trace_csv_path(base: str, seed: int) -> str:
    p = Path(base)
    return str(p.with_name(f"{p.stem}_seed{seed}{p.suffix or '.csv'}"))


def _simulate_one(payload) -> tuple[dict, str]:
    """One seeded run; self-contained so it can execute in a worker process."""
    nf = _load(payload["network"])
    g, f = nf.graph, nf.fading
    seed = payload["seed"]
    if payload["mode"] == "iid":
        tr = sim.run_iid(
            g, f, {k: Fraction(v) for k, v in payload["rates"].items()},
            payload["slots"], seed=seed,
            order=payload["order"], tie_break=payload["tie_break"],
        )
    else:
        d = nf.decomposition
        pattern = sim.build_adversarial_pattern(
            g, f, d["subset"], d["weights"], eps=Fraction(payload["eps"]),
            nu=d.get("target"), delta=d["delta"], surge=payload["surge"],
        )
        periods = max(1, math.ceil(payload["slots"] / pattern.period_slots))
        tr = sim.run_scripted(
            g, pattern, periods, seed=seed, tie_break=payload["tie_break"]
        )
    v = sim.stability_verdict(
        tr,
        slope_threshold=payload["slope_threshold"],
        stable_bound=payload["stable_bound"],
    )
    line = (
        f"seed {seed}: {v.verdict} (max queue {v.max_queue}, "
        f"slope {v.slope:.3e}/slot)"
    )
    rec = {
        "seed": seed,
        "mode": payload["mode"],
        "slots": tr.slots,
        "backend": tr.meta["backend"],
        **v.as_dict(),
    }
    if payload["mode"] == "adversarial" and tr.stride == 1:
        ends = tr.meta["frame_ends"]
        qs = tr.q[ends]
        equal = bool((qs.max(axis=1) == qs.min(axis=1)).all())
        rec["queues_equal_at_frame_boundaries"] = equal
        line += f", equal-queue boundaries: {'yes' if equal else 'NO'}"
    if payload["trace_csv"]:
        tr.to_csv(_trace_csv_path(payload["trace_csv"], seed))
    return rec, line


def cmd_simulate(args) -> int:
    nf = _load(args.network)
    g = nf.graph
    seeds = _parse_seeds(args.seeds)
    base = {
        "network": args.network,
        "mode": args.mode,
        "slots": args.slots,
        "order": args.order,
        "tie_break": args.tie_break,
        "surge": args.surge,
        "slope_threshold": args.slope_threshold,
        "stable_bound": args.stable_bound,
        "trace_csv": args.trace_csv,
    }
    if args.mode == "iid":
        rates = _parse_rates(g, args.rates) if args.rates else nf.rates
        if rates is None:
            raise NetworkFileError("iid mode needs rates (file or --rates)", "rates")
        base["rates"] = {k: str(v) for k, v in rates.items()}
    else:
        if nf.decomposition is None:
            raise NetworkFileError(
                "adversarial mode needs a decomposition block in the network file",
                "decomposition",
            )
        d = nf.decomposition
        eps = parse_rational(args.eps, "--eps") if args.eps else d["eps"]
        base["eps"] = str(eps)
        pattern = sim.build_adversarial_pattern(
            g, nf.fading, d["subset"], d["weights"], eps=eps,
            nu=d.get("target"), delta=d["delta"], surge=args.surge,
        )
        print(
            f"pattern: period {pattern.period_slots} slots, "
            f"{pattern.frames_per_period} frames, surge every "
            f"{pattern.surge_every or 'inf'} frames ({pattern.surge_mode}); "
            f"realized rate "
            + " ".join(
                f"{l.label}={r}" for l, r in zip(g.links, pattern.realized_rate)
            )
        )
    payloads = [dict(base, seed=seed) for seed in seeds]
    results = _pool_map(_simulate_one, payloads, args.workers)

    counts = {"stable": 0, "unstable": 0, "inconclusive": 0}
    records = []
    for rec, line in results:
        counts[rec["verdict"]] += 1
        records.append(rec)
        print(line)
    total = len(records)
    agg = max(counts, key=counts.get)
    print(f"aggregate: {counts[agg]}/{total} {agg}" if total else "no runs")
    if args.out:
        with open(args.out, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
        print(f"wrote verdicts to {args.out}")
    return EXIT_OK


# -- examples ----------------------------------------------------------------------


def _bundled_checks(data_dir=None):
    """Name, callable pairs; each callable returns (ok, detail)."""

    def hexagon():
        return _load(data_path("hexagon.json", data_dir))

    def path3():
        return _load(data_path("three_link_path.json", data_dir))

    def fourlink():
        return _load(data_path("four_link.json", data_dir))

    def multi3():
        return _load(data_path("three_link_multistate.json", data_dir))

    def chk_hexagon_exact():
        nf = hexagon()
        val, arg = pooling.graph_pooling_factor(nf.graph, nf.fading)
        ok = val == Fraction(2, 3) and len(arg) == 6
        return ok, f"no-fading pooling factor = {val}, minimizer size {len(arg)}"

    def chk_hexagon_fading_helps():
        nf = hexagon()
        f = from_iid_bernoulli(nf.graph, Fraction(1, 5))
        lo, _ = pooling.min_column_sum_lower_bound(nf.graph, f)
        return lo > Fraction(2, 3), f"lower bound at p=1/5 is {lo} > 2/3"

    def chk_hexagon_rare_on():
        nf = hexagon()
        f = from_iid_bernoulli(nf.graph, Fraction(1, 20))
        lo, _ = pooling.min_column_sum_lower_bound(nf.graph, f)
        return lo > Fraction(9, 10), f"lower bound at p=1/20 is {lo} > 9/10"

    def chk_path_exact():
        nf = path3()
        val, arg = pooling.graph_pooling_factor(nf.graph, nf.fading)
        ok = Fraction(3, 4) <= val <= Fraction(4, 5) and val < 1
        return ok, f"pooling factor = {val} in [3/4, 4/5], < 1"

    def chk_path_witness():
        nf = path3()
        ub = pooling.upper_bound_from_witness_pair(
            nf.graph, nf.fading, ["a", "b", "c"],
            [Fraction(1, 3)] * 3, [Fraction(5, 12)] * 3,
        )
        return ub == Fraction(4, 5), f"witness-pair bound = {ub}"

    def chk_path_non_averaging():
        nf = path3()
        g = nf.graph
        per_state = []
        for state, _ in nf.fading.states:
            single = type(nf.fading)(nf.fading.links, ((state, Fraction(1)),))
            per_state.append(pooling.graph_pooling_factor(g, single)[0])
        val, _ = pooling.graph_pooling_factor(g, nf.fading)
        ok = all(v == 1 for v in per_state) and val <= Fraction(4, 5) < 1
        return ok, (
            f"single-state factors {[str(v) for v in per_state]}, "
            f"faded factor {val} <= 4/5 < 1"
        )

    def chk_counterexample_region():
        nf = path3()
        lam = {"a": 0, "b": Fraction(5, 6), "c": 0}
        v1 = pooling.region_membership(nf.graph, nf.fading, lam, "idegree")
        v2 = pooling.region_membership(
            nf.graph, nf.fading, lam, ("gamma", Fraction(4, 5))
        )
        ok = v1.inside and v2.location == "exterior"
        return ok, (
            f"(0,5/6,0): {v1.location} of inverse-degree region, "
            f"{v2.location} of 4/5-scaled region"
        )

    def chk_multistate_matrix():
        from .fading import GlobalState, schedule_matrix_for_state

        nf = fourlink()
        mat = schedule_matrix_for_state(
            nf.graph, GlobalState((1, 2, 1, 0)), rows=nf.graph.links
        )
        want = ((1, 0, 1, 0), (0, 2, 0, 0))
        return mat.columns == want, f"columns {mat.columns}"

    def chk_multistate_factor():
        nf = multi3()
        val, _ = pooling.graph_pooling_factor(nf.graph, nf.fading)
        return 0 < val <= 1, f"multi-state pooling factor = {val}"

    return [
        ("hexagon-no-fading-exact-2/3", chk_hexagon_exact),
        ("hexagon-fading-raises-lower-bound", chk_hexagon_fading_helps),
        ("hexagon-rare-on-bound-near-1", chk_hexagon_rare_on),
        ("path-faded-factor-in-[3/4,4/5]", chk_path_exact),
        ("path-witness-pair-4/5", chk_path_witness),
        ("path-non-averaging", chk_path_non_averaging),
        ("counterexample-region-membership", chk_counterexample_region),
        ("multistate-matrix-values", chk_multistate_matrix),
        ("multistate-factor-in-(0,1]", chk_multistate_factor),
    ]


def cmd_examples(args) -> int:
    checks = _bundled_checks(args.data_dir)
    if args.list:
        for name, _ in checks:
            print(name)
        return EXIT_OK
    failures = 0
    for name, fn in checks:
        try:
            ok, detail = fn()
        except FlpfError as exc:
            ok, detail = False, f"error: {exc}"
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"[{status}] {name}: {detail}")
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_CHECK


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="flpf",
        description="Pooling factors and greedy scheduling under channel fading",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flpf", help="bound report for a network file")
    p.add_argument("network")
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--bounds", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--csv", action="store_true", help="emit the report as a CSV row")
    p.add_argument("--subset", help="comma list of link labels")
    p.add_argument("--oracle-tol", help="also run the bisection cross-check")
    p.set_defaults(fn=cmd_flpf)

    p = sub.add_parser("sweep", help="i.i.d. ON-probability sweep to CSV")
    p.add_argument("network")
    p.add_argument("--param", default="p", choices=["p"])
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="stop", required=True)
    p.add_argument("--step", required=True)
    p.add_argument("--exact", action="store_true", help="include the exact value (slow)")
    p.add_argument("--workers", type=int, default=1, help="worker pool size")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("simulate", help="run the slot simulator")
    p.add_argument("network")
    p.add_argument("--mode", choices=["iid", "adversarial"], default="iid")
    p.add_argument("--rates", help="a=1/3,b=0,... or positional list")
    p.add_argument("--slots", type=int, default=1_000_000)
    p.add_argument("--seeds", default="1", help="count, or comma list of seeds")
    p.add_argument("--order", default="service_first",
                   choices=["service_first", "arrival_first"])
    p.add_argument("--tie-break", default="low", choices=["low", "high"])
    p.add_argument("--surge", default="det", choices=["det", "prob"])
    p.add_argument("--eps", help="override the file's surge intensity")
    p.add_argument("--slope-threshold", type=float, default=1e-4)
    p.add_argument("--stable-bound", type=float, default=1000.0)
    p.add_argument("--workers", type=int, default=1, help="worker pool size")
    p.add_argument("--out", help="write one JSON object per run (JSONL)")
    p.add_argument("--trace-csv", help="per-run trace CSV path stem")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("region", help="throughput-region membership")
    p.add_argument("network")
    p.add_argument("--rates")
    p.add_argument("--scaling", default="none", help="none | gamma=<q> | idegree")
    p.set_defaults(fn=cmd_region)

    p = sub.add_parser("examples", help="run the bundled end-to-end checks")
    p.add_argument("--list", action="store_true")
    p.add_argument("--data-dir", help="override the bundled network directory")
    p.set_defaults(fn=cmd_examples)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "surge", None):
        args.surge = {"det": "deterministic", "prob": "probabilistic"}[args.surge]
    try:
        return args.fn(args)
    except LimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except NetworkFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FlpfError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
