"""Command-line front end: graph generation, analysis, verification, sweeps.

Exit codes: 0 success, 1 validation error, 2 hypothesis violation,
3 numerical failure, 4 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from . import generators
from .errors import CliqueWalkError, UsageError
from .graph_core import (
    CliqueRegularGraph,
    graph_sha256,
    load_graph_json,
    save_graph_json,
)
from .mixing_theory import (
    CaseLabel,
    MixingReport,
    PartialGeometryParams,
    Regime,
    check_case_bounds,
    check_walk_hypotheses,
    analyze_summary,
    delta_from_epsilon,
    latin_crossover_report,
    pg_mixing_report,
    qk_growth_rate_closed_form,
)
from .spectrum import multiplicity_clusters, spectral_summary, spectrum_of
from .walk_engine import (
    empirical_mixing_rate,
    lifted_k_step,
    monte_carlo,
    qk_empirical_growth,
    run_verification,
    simple_walk_matrix,
    transition_matrix,
)

GENERATOR_FAMILIES = (
    "cycle", "prism", "petersen", "random-regular", "rook",
    "latin", "mols-graph", "line-graph",
)


class _Parser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting with code 2."""

    def error(self, message):
        raise UsageError(message)


def _load_with_doc(path: str) -> tuple[CliqueRegularGraph, dict]:
    """Graph plus the document actually stored in the file (for hashing)."""
    crg = load_graph_json(path)
    with open(path) as fh:
        doc = json.load(fh)
    return crg, doc


def _provenance(doc: dict | None = None, seed: int | None = None) -> dict:
    out = {"tool": "cliquewalk", "version": __version__}
    if doc is not None:
        out["graph_sha256"] = graph_sha256(doc)
    if seed is not None:
        out["seed"] = seed
    return out


def _emit_json(payload: dict, out=None) -> None:
    (out or sys.stdout).write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _emit_table(rows: list[dict], out=None) -> None:
    """Aligned-column plain-text table; one dict per row."""
    fh = out or sys.stdout
    if not rows:
        return
    cols = list(rows[0].keys())
    text = [[_fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(t[i]) for t in text)) for i, c in enumerate(cols)]
    fh.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for t in text:
        fh.write("  ".join(v.ljust(w) for v, w in zip(t, widths)).rstrip() + "\n")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _build_family(args) -> tuple[CliqueRegularGraph, dict]:
    fam = args.family
    if fam == "cycle":
        if args.n is None:
            raise UsageError("cycle needs --n")
        return generators.cycle(args.n), {"family": fam, "n": args.n}
    if fam == "prism":
        if args.n is None:
            raise UsageError("prism needs --n")
        return generators.prism(args.n), {"family": fam, "n": args.n}
    if fam == "petersen":
        return generators.petersen(), {"family": fam}
    if fam == "random-regular":
        if args.n is None or args.d is None or args.seed is None:
            raise UsageError("random-regular needs --n, --d and --seed")
        crg = generators.random_regular(args.n, args.d, args.seed)
        return crg, {"family": fam, "n": args.n, "d": args.d, "seed": args.seed}
    if fam == "rook":
        if args.side is None:
            raise UsageError("rook needs --side")
        return generators.rook_graph(args.side), {"family": fam, "side": args.side}
    if fam == "latin":
        if args.square_file:
            sq = generators.load_latin_square(args.square_file)
            meta = {"family": fam, "square_file": args.square_file}
        else:
            if args.order is None:
                raise UsageError("latin needs --order (or --square-file)")
            sq = generators.latin_square_cyclic(args.order)
            meta = {"family": fam, "order": sq.order, "square": "cyclic"}
        return generators.latin_square_graph(sq), meta
    if fam == "mols-graph":
        if args.order is None or args.t is None:
            raise UsageError("mols-graph needs --order (prime) and --t")
        squares = generators.mols_prime(args.order, args.t)
        crg = generators.ols_graph(squares)
        return crg, {"family": fam, "order": args.order, "t": args.t}
    if fam == "line-graph":
        host = args.host or "complete"
        hn = args.host_n
        if host == "complete":
            if hn is None:
                raise UsageError("line-graph --host complete needs --host-n")
            h = generators.complete_graph(hn)
        elif host == "cycle":
            if hn is None:
                raise UsageError("line-graph --host cycle needs --host-n")
            h = generators.cycle(hn).graph
        elif host == "petersen":
            h = generators.petersen().graph
        else:
            raise UsageError(f"unknown line-graph host {host!r}")
        crg = generators.line_graph(h)
        return crg, {"family": fam, "host": host, "host_n": hn}
    raise UsageError(f"unknown family {fam!r}")


def cmd_generate(args) -> int:
    crg, meta = _build_family(args)
    doc = save_graph_json(crg, args.out, meta=meta)
    sys.stdout.write(
        f"wrote {args.out}: n={crg.n} d={crg.d} l={crg.l} "
        f"sha256={graph_sha256(doc)[:16]}\n"
    )
    return 0


def _report_payload(crg: CliqueRegularGraph, report: MixingReport, doc: dict,
                    extra: dict | None = None) -> dict:
    payload = {
        "provenance": _provenance(doc),
        "graph": {
            "n": crg.n,
            "d": crg.d,
            "l": crg.l,
            "degree": crg.degree,
            "connected": crg.flags.connected,
            "bipartite": crg.flags.bipartite,
            "complete": crg.flags.complete,
        },
        "report": report.as_dict(),
    }
    if extra:
        payload.update(extra)
    return payload


def cmd_analyze(args) -> int:
    crg, doc = _load_with_doc(args.graph)
    check_walk_hypotheses(crg.flags)
    spec = spectrum_of(crg)
    delta = delta_from_epsilon(args.eps, crg.d)
    summary = spectral_summary(spec, crg.d, crg.l, delta)
    report = analyze_summary(summary, crg.d, crg.l, args.eps, crg.flags)
    extra = {
        "spectrum": {
            "lambda1": spec.lambda1,
            "lambda2": spec.lambda2,
            "lambda_n": spec.lambda_n,
            "clusters": [[v, m] for v, m in multiplicity_clusters(spec)],
        },
        "summary": {
            "lambda_prime": summary.lambda_prime,
            "lambda_of_delta": summary.lambda_of_delta,
            "lambda_hat_of_delta": summary.lambda_hat_of_delta,
            "has_minus_d": summary.has_minus_d,
        },
    }
    if report.case_label not in (None, CaseLabel.UNCLASSIFIED):
        extra["case_bounds"] = check_case_bounds(report, summary).as_dict()
    payload = _report_payload(crg, report, doc, extra)
    if args.format == "json":
        _emit_json(payload)
    else:
        rows = [{"quantity": k, "value": v} for k, v in report.as_dict().items()
                if not isinstance(v, (dict, list))]
        _emit_table(rows)
    return 0


def cmd_verify(args) -> int:
    crg = load_graph_json(args.graph)
    rep = run_verification(crg, args.eps, args.k_max)
    for c in rep.checks:
        status = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
        line = f"[{status}] {c.name}"
        if c.detail:
            line += f" ({c.detail})"
        sys.stdout.write(line + "\n")
    if not rep.passed:
        sys.stdout.write("verification FAILED\n")
        return 3
    sys.stdout.write("verification passed\n")
    return 0


def _parse_grid(spec_str: str) -> list[float]:
    """Either comma-separated values or start:stop:count."""
    if ":" in spec_str:
        parts = spec_str.split(":")
        if len(parts) != 3:
            raise UsageError("grid must be start:stop:count or comma list")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError("grid count must be >= 1")
        if count == 1:
            return [start]
        stepw = (stop - start) / (count - 1)
        return [start + i * stepw for i in range(count)]
    vals = [float(x) for x in spec_str.split(",") if x.strip() != ""]
    if not vals:
        raise UsageError("empty eps grid")
    return vals


def cmd_sweep(args) -> int:
    crg = load_graph_json(args.graph)
    check_walk_hypotheses(crg.flags)
    grid = _parse_grid(args.grid)
    hi = 1.0 / crg.d
    for eps in grid:
        if not 0.0 <= eps <= hi + 1e-12:
            raise UsageError(f"eps {eps} outside [0, 1/{crg.d}]")
    spec = spectrum_of(crg)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("eps,delta,regime,rho_tilde,empirical_rate,rho_simple,rho_nbrw\n")
        for eps in grid:
            delta = delta_from_epsilon(eps, crg.d)
            summary = spectral_summary(spec, crg.d, crg.l, delta)
            report = analyze_summary(summary, crg.d, crg.l, eps)
            emp = ""
            if args.k_max > 0:
                emp = f"{empirical_mixing_rate(crg, eps, args.k_max).rate:.12g}"
            out.write(
                f"{eps:.12g},{delta:.12g},{report.regime.value},"
                f"{_csv(report.rho_tilde)},{emp},{_csv(report.rho_simple)},"
                f"{_csv(report.rho_nbrw)}\n"
            )
    finally:
        if args.out:
            out.close()
    return 0


def _csv(v) -> str:
    return "" if v is None else f"{v:.12g}"


def cmd_compare(args) -> int:
    if args.graph:
        crg, doc = _load_with_doc(args.graph)
        check_walk_hypotheses(crg.flags)
        spec = spectrum_of(crg)
        delta = delta_from_epsilon(args.eps, crg.d)
        summary = spectral_summary(spec, crg.d, crg.l, delta)
        report = analyze_summary(summary, crg.d, crg.l, args.eps, crg.flags)
        extra = {}
        if report.case_label not in (None, CaseLabel.UNCLASSIFIED):
            extra["case_bounds"] = check_case_bounds(report, summary).as_dict()
        payload = _report_payload(crg, report, doc, extra)
    else:
        if args.d is None or args.l is None:
            raise UsageError("compare needs a graph file or both --d and --l")
        from .mixing_theory import comparison_constants
        consts = comparison_constants(args.d, args.l)
        payload = {
            "provenance": _provenance(),
            "d": args.d,
            "l": args.l,
            "constants": consts.as_dict(),
        }
    if args.format == "json":
        _emit_json(payload)
    else:
        flat = payload.get("constants") or payload["report"]
        _emit_table([{"quantity": k, "value": v} for k, v in flat.items()
                     if not isinstance(v, (dict, list))])
    return 0


def cmd_pg(args) -> int:
    params = PartialGeometryParams(K=args.K, R=args.R, T=args.T)
    report = pg_mixing_report(params, eps=args.eps)
    payload = {
        "provenance": _provenance(),
        "params": {"K": args.K, "R": args.R, "T": args.T},
        "report": report.as_dict(),
    }
    if args.format == "json":
        _emit_json(payload)
    else:
        _emit_table([{"quantity": k, "value": v} for k, v in report.as_dict().items()
                     if not isinstance(v, (dict, list))])
    return 0


def cmd_latin_crossover(args) -> int:
    if args.l_min > args.l_max:
        raise UsageError("need --l-min <= --l-max")
    rows = []
    for l in range(args.l_min, args.l_max + 1):
        rep = latin_crossover_report(l)
        rows.append({
            "l": l,
            "rho_tilde": rep.rho_tilde,
            "rho_nbrw": rep.rho_nbrw,
            "ratio": rep.ratio_nbrw,
            "faster": rep.ratio_nbrw < 1.0,
        })
    if args.format == "json":
        _emit_json({"provenance": _provenance(), "rows": rows})
    else:
        _emit_table(rows)
    return 0


def cmd_lemma(args) -> int:
    ys = _parse_grid(args.y_grid)
    rows = []
    for y in ys:
        closed = qk_growth_rate_closed_form(y, args.d, args.l, args.delta)
        emp = qk_empirical_growth(y, args.d, args.l, args.delta, args.k_max)
        rows.append({
            "y": y,
            "closed_form": closed,
            "empirical": emp,
            "rel_err": abs(emp - closed) / closed,
        })
    if args.format == "json":
        _emit_json({"provenance": _provenance(), "rows": rows})
    else:
        _emit_table(rows)
    return 0


def cmd_simulate(args) -> int:
    crg, doc = _load_with_doc(args.graph)
    res = monte_carlo(crg, args.eps, args.start, args.k, args.trials, args.seed,
                      workers=args.workers)
    payload = {
        "provenance": _provenance(doc, seed=args.seed),
        "histogram": res.as_dict(),
    }
    if crg.n <= 400:
        if args.eps >= 1.0 / crg.d - 1e-12:
            exact = simple_walk_matrix(crg, args.k)[args.start]
        else:
            exact = transition_matrix(crg, args.eps, args.k)[args.start]
        dev = np.abs(res.dist - exact)
        payload["exact"] = exact.tolist()
        payload["max_abs_deviation"] = float(dev.max())
    _emit_json(payload)
    return 0


def cmd_rate(args) -> int:
    crg, doc = _load_with_doc(args.graph)
    check_walk_hypotheses(crg.flags)
    spec = spectrum_of(crg)
    delta = delta_from_epsilon(args.eps, crg.d)
    summary = spectral_summary(spec, crg.d, crg.l, delta)
    report = analyze_summary(summary, crg.d, crg.l, args.eps)
    est = empirical_mixing_rate(crg, args.eps, args.k_max)
    payload = {
        "provenance": _provenance(doc),
        "eps": args.eps,
        "empirical_rate": est.rate,
        "diagnostics": est.diagnostics,
        "rho_tilde": report.rho_tilde,
        "regime": report.regime.value,
    }
    if report.rho_tilde:
        payload["relative_error"] = abs(est.rate - report.rho_tilde) / report.rho_tilde
    _emit_json(payload)
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="cliquewalk", description=__doc__)
    p.add_argument("--version", action="version", version=f"cliquewalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a graph JSON file")
    g.add_argument("--family", required=True, choices=GENERATOR_FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--side", type=int, help="rook grid side")
    g.add_argument("--order", type=int, help="latin square order")
    g.add_argument("--t", type=int, help="number of orthogonal squares")
    g.add_argument("--host", choices=("complete", "cycle", "petersen"))
    g.add_argument("--host-n", type=int)
    g.add_argument("--square-file")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="spectrum, rates, case classification")
    a.add_argument("graph")
    a.add_argument("--eps", type=float, default=0.0)
    a.add_argument("--format", choices=("json", "table"), default="json")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="cross-route and oracle checks")
    v.add_argument("graph")
    v.add_argument("--eps", type=float, default=0.0)
    v.add_argument("--k-max", type=int, default=10)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="rates over an eps grid, CSV")
    s.add_argument("graph")
    s.add_argument("--grid", required=True, help="start:stop:count or comma list")
    s.add_argument("--k-max", type=int, default=100,
                   help="empirical-rate steps; 0 skips the empirical column")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="comparison constants / case bounds")
    c.add_argument("graph", nargs="?")
    c.add_argument("--eps", type=float, default=0.0)
    c.add_argument("--d", type=int)
    c.add_argument("--l", type=int)
    c.add_argument("--format", choices=("json", "table"), default="json")
    c.set_defaults(func=cmd_compare)

    q = sub.add_parser("pg", help="partial geometry pg(K,R,T) closed-form report")
    q.add_argument("--K", type=int, required=True)
    q.add_argument("--R", type=int, required=True)
    q.add_argument("--T", type=int, required=True)
    q.add_argument("--eps", type=float, default=0.0)
    q.add_argument("--format", choices=("json", "table"), default="json")
    q.set_defaults(func=cmd_pg)

    lc = sub.add_parser("latin-crossover", help="Latin-square ratio table")
    lc.add_argument("--l-min", type=int, default=4)
    lc.add_argument("--l-max", type=int, default=22)
    lc.add_argument("--format", choices=("json", "table"), default="table")
    lc.set_defaults(func=cmd_latin_crossover)

    lm = sub.add_parser("lemma", help="scalar growth rate: closed form vs empirical")
    lm.add_argument("--d", type=int, required=True)
    lm.add_argument("--l", type=int, required=True)
    lm.add_argument("--delta", type=float, default=0.0)
    lm.add_argument("--y-grid", required=True, help="start:stop:count or comma list")
    lm.add_argument("--k-max", type=int, default=2000)
    lm.add_argument("--format", choices=("json", "table"), default="table")
    lm.set_defaults(func=cmd_lemma)

    m = sub.add_parser("simulate", help="Monte-Carlo walk histogram, JSON")
    m.add_argument("graph")
    m.add_argument("--eps", type=float, default=0.0)
    m.add_argument("--start", type=int, default=0)
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--trials", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--workers", type=int, default=1)
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("rate", help="empirical mixing rate vs closed form")
    r.add_argument("graph")
    r.add_argument("--eps", type=float, default=0.0)
    r.add_argument("--k-max", type=int, default=200)
    r.set_defaults(func=cmd_rate)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliqueWalkError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
