"""Command-line entry point.

Subcommands: tail, phi, core, qbasic, ergm, census.  Exit status is 0 on
success, 2 on invalid input and 1 when a computation fails.  Outputs are
written atomically; stochastic runs echo the master seed in their header.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .cores import CoreParams, extract_core, is_seed
from .ergm import ErgmConfig, batch_means_stderr, ergm_mcmc, ergm_sweep
from .graph import EdgeListError, ErParams, read_edgelist, sample_er, triangle_stats, write_edgelist
from .local_limit import (
    NeighborhoodCensus,
    conditional_local_experiment,
    make_seed,
    neighborhood_census,
    sample_ugw_census,
)
from .qbasic import decompose_qbasic, extract_qbasic, validate_decomposition
from .tails import (
    CSV_HEADER,
    MAX_CLIQUE_R,
    clique_lower_bound,
    disjoint_triangles_lower_bound,
    exact_tail,
    is_clique_tail,
    mc_tail,
    smallest_clique_order,
)
from .variational import PhiQuery, clique_upper_bound, edge_lower_bound, phi_exact

log = logging.getLogger("sparsetri")


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        return repr(float(x))
    return str(x)


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def csv_text(header: list[str], rows: list[list], comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


# -- subcommands ------------------------------------------------------------


def cmd_tail(args) -> str:
    params = ErParams(args.n, args.lam)
    p = params.p
    if args.method == "exact":
        est = exact_tail(args.n, p, args.stat, args.k, allow_large=args.allow_large)
    elif args.method == "mc":
        est = mc_tail(args.n, p, args.stat, args.k, args.samples, args.seed)
    elif args.method == "is":
        r = args.r or min(MAX_CLIQUE_R, args.n, smallest_clique_order(args.k))
        est = is_clique_tail(args.n, p, args.k, r, args.samples, args.seed, args.stat)
    else:
        if args.stat == "T":
            est = clique_lower_bound(args.n, p, args.k)
        else:
            if args.k != int(args.k):
                raise UsageError("analytic V_T bound needs an integer k")
            est = disjoint_triangles_lower_bound(args.n, p, int(args.k), args.lam)
    for f in est.flags:
        log.info("%s", f)
    comment = f"master_seed={args.seed}" if args.method in ("mc", "is") else None
    return csv_text(CSV_HEADER, [est.csv_row()], comment)


def cmd_phi(args) -> str:
    q = PhiQuery(args.n, args.p, args.k, args.a, args.w)
    scale = 1.0 / math.log(args.log_base) if args.log_base else 1.0
    results = []
    if args.exact:
        results.append(phi_exact(args.n, args.p, args.k, args.a, cap=args.cap))
    if args.bounds or not args.exact:
        results.append(clique_upper_bound(q))
        if args.w <= 1:
            results.append(edge_lower_bound(q))
    rows = []
    for res in results:
        wf = ""
        if res.witness is not None and args.witness_dir:
            wf = str(Path(args.witness_dir) / f"phi_{res.method}.edges")
            Path(args.witness_dir).mkdir(parents=True, exist_ok=True)
            write_edgelist(res.witness, wf)
        for f in res.flags:
            log.info("%s: %s", res.method, f)
        rows.append([res.method, res.value * scale, "" if res.edges is None else res.edges, wf])
    return csv_text(["method", "value", "edges", "witness_file"], rows)


def cmd_core(args) -> str:
    g = read_edgelist(args.input)
    n = args.n or g.n
    if n < g.n:
        raise UsageError(f"--n {n} smaller than the graph's n={g.n}")
    if g.n < n:
        g = type(g)(n, g.edges())
    params = CoreParams(args.a, args.k, args.w, args.C, ErParams(n, args.lam))
    seed_cert = is_seed(g, params)
    core = extract_core(g, params)
    return json_text(
        {
            "params": {"a": args.a, "k": args.k, "w": args.w, "C": args.C, "lambda": args.lam, "n": n},
            "t_n": params.t_n,
            "edge_budget": params.edge_budget,
            "input": {
                "m": seed_cert.m,
                "expectation": seed_cert.expectation,
                "s1": seed_cert.s1,
                "s2": seed_cert.s2,
                "is_seed": seed_cert.is_seed,
            },
            "core": core.to_dict(),
            "accounting": {"drop_sum": math.fsum(core.drops), "steps_times_t_n": core.steps * core.t_n},
        }
    )


def cmd_qbasic(args) -> str:
    g = read_edgelist(args.input)
    h = extract_qbasic(g)
    d = decompose_qbasic(h)
    check = validate_decomposition(h, d)
    if not check:
        raise RuntimeError(f"decomposition failed validation: {check.field}: {check.message}")
    out = {"n": g.n, "q": triangle_stats(h).vt, "edges": [list(e) for e in h.edges()]}
    out.update(d.to_dict())
    return json_text(out)


def _parse_grid(text: str) -> list[float]:
    try:
        parts = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --beta-grid {text!r}") from None
    if not parts:
        raise UsageError("--beta-grid is empty")
    return parts


def cmd_ergm(args) -> str:
    betas = _parse_grid(args.beta_grid) if args.beta_grid else [args.beta]
    burn = args.burnin if args.burnin is not None else args.steps // 2
    comment = f"master_seed={args.seed}"
    if args.init == "both":
        rows = ergm_sweep(args.n, args.lam, betas, args.steps, burn, args.thin, args.seed)
        header = [
            "beta", "init", "mean_vt_frac", "stderr", "acceptance", "stream",
        ]
        out = []
        for i, r in enumerate(rows):
            out.append([r.beta, "empty", r.mean_empty, r.stderr_empty, r.acceptance_empty, f"sweep/{i}/empty"])
            out.append([r.beta, "complete", r.mean_complete, r.stderr_complete, r.acceptance_complete, f"sweep/{i}/complete"])
            if r.mixing_warning:
                log.warning("beta=%g: %s", r.beta, "; ".join(r.notes))
        return csv_text(header, out, comment)
    header = ["beta", "init", "mean_vt_frac", "stderr", "acceptance", "stream"]
    out, trace_rows = [], []
    for i, beta in enumerate(betas):
        cfg = ErgmConfig(args.n, args.lam, beta, args.steps, burn, args.thin, args.seed, args.init, stream=("cli", i))
        tr = ergm_mcmc(cfg)
        frac = tr.vt_fraction
        out.append([beta, args.init, float(frac.mean()), batch_means_stderr(frac), tr.acceptance, f"cli/{i}"])
        trace_rows.extend([beta, j, int(v), int(e)] for j, (v, e) in enumerate(zip(tr.vt, tr.edges)))
    if args.trace:
        write_atomic(args.trace, csv_text(["beta", "record", "vt", "edges"], trace_rows, comment))
    return csv_text(header, out, comment)


def cmd_census(args) -> str:
    sources = [x is not None for x in (args.input, args.er, args.ugw)]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --input, --er, --ugw")
    meta = {"master_seed": args.seed}
    if args.ugw is not None:
        census = sample_ugw_census(args.ugw, args.depth, args.samples, args.seed)
    elif args.input is not None:
        g = read_edgelist(args.input)
        census = neighborhood_census(g, args.depth, args.vertex_sample, args.seed)
    else:
        try:
            n_txt, lam_txt = args.er.split(",")
            n, lam = int(n_txt), float(lam_txt)
        except ValueError:
            raise UsageError(f"--er expects 'n,lambda', got {args.er!r}") from None
        if args.condition_T is not None:
            exp = conditional_local_experiment(
                n, lam, args.condition_T, args.depth, args.samples, args.seed, max_tries=args.max_tries
            )
            census = exp.census_cond
            meta.update({"tv_to_unconditioned": exp.tv, "tv_to_ugw": exp.ugw_tv, "tries": exp.tries})
        else:
            census = NeighborhoodCensus(args.depth)
            gseed = make_seed(args.seed, "census-er")
            params = ErParams(n, lam)
            for i in range(args.samples):
                census.merge(neighborhood_census(sample_er(params, gseed, stream=i), args.depth))
    out = census.to_dict()
    out.update(meta)
    return json_text(out)


# -- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker cap; computations are sequential")
    common.add_argument("-v", "--verbose", action="count", default=0)

    ap = argparse.ArgumentParser(prog="sparsetri", description="Triangle counts and their tails in sparse random graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tail", parents=[common], help="tail probability of T or V_T")
    t.add_argument("--stat", choices=["T", "VT"], required=True)
    t.add_argument("--n", type=_positive_int, required=True)
    t.add_argument("--lambda", dest="lam", type=float, required=True)
    t.add_argument("--k", type=float, required=True)
    t.add_argument("--method", choices=["exact", "mc", "is", "analytic"], default="exact")
    t.add_argument("--samples", type=_positive_int, default=100_000)
    t.add_argument("--r", type=int, default=None, help="planted clique order for --method is")
    t.add_argument("--allow-large", action="store_true", help="permit exact enumeration at n=8")
    t.set_defaults(func=cmd_tail)

    p = sub.add_parser("phi", parents=[common], help="variational problem and its bounds")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--w", type=float, default=0.0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--bounds", action="store_true")
    p.add_argument("--cap", type=int, default=6)
    p.add_argument("--log-base", type=float, default=None, help="display values in this log base")
    p.add_argument("--witness-dir", default=None)
    p.set_defaults(func=cmd_phi)

    c = sub.add_parser("core", parents=[common], help="seed check and core extraction")
    c.add_argument("--input", required=True)
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--k", type=float, required=True)
    c.add_argument("--w", type=float, required=True)
    c.add_argument("--C", type=float, default=6.0)
    c.add_argument("--lambda", dest="lam", type=float, required=True)
    c.add_argument("--n", type=int, default=None, help="ambient vertex count (default: the file's n)")
    c.set_defaults(func=cmd_core)

    q = sub.add_parser("qbasic", parents=[common], help="q-basic extraction and decomposition")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_qbasic)

    e = sub.add_parser("ergm", parents=[common], help="V_T-tilted random graph MCMC")
    e.add_argument("--n", type=_positive_int, required=True)
    e.add_argument("--lambda", dest="lam", type=float, required=True)
    grp = e.add_mutually_exclusive_group(required=True)
    grp.add_argument("--beta", type=float)
    grp.add_argument("--beta-grid", help="comma-separated beta values")
    e.add_argument("--steps", type=_positive_int, default=1_000_000)
    e.add_argument("--burnin", type=int, default=None, help="default: half the steps")
    e.add_argument("--thin", type=_positive_int, default=100)
    e.add_argument("--init", choices=["empty", "complete", "both"], default="both")
    e.add_argument("--trace", default=None, help="CSV file for the thinned trace")
    e.set_defaults(func=cmd_ergm)

    s = sub.add_parser("census", parents=[common], help="rooted neighbourhood census")
    s.add_argument("--input", default=None)
    s.add_argument("--er", default=None, metavar="N,LAMBDA")
    s.add_argument("--ugw", type=float, default=None, metavar="LAMBDA")
    s.add_argument("--depth", type=int, default=1)
    s.add_argument("--samples", type=_positive_int, default=1, help="graphs (or trees for --ugw)")
    s.add_argument("--vertex-sample", type=_positive_int, default=None)
    s.add_argument("--condition-T", dest="condition_T", type=float, default=None)
    s.add_argument("--max-tries", type=_positive_int, default=10_000_000, help="rejection sampling cap")
    s.set_defaults(func=cmd_census)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.func(args)
        write_atomic(args.output, text)
    except EdgeListError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
