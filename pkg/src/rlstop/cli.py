"""Command-line entry point: ``rlstop {dist,rule-a,rule-b,simulate,reproduce}``.

Exit codes: 0 success, 1 usage error, 2 table reproduction mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import shlex
import sys

from . import prob_core as pc
from .reproduce import all_normal_rows_match, reproduce
from .rule_a import (BoundSpec, CostModel, RuleAConfig, analyze_rule_a, resolve_bound,
                     rewards_ratio, success_probability)
from .rule_b import RuleBConfig, analyze_rule_b
from .simulator import SimulationConfig, simulate

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(value, digits):
    if isinstance(value, float) and digits is not None:
        return f"{value:.{digits}f}"
    return str(value)


def render(payload: dict, rows: list[dict], fmt: str, digits: dict | None = None) -> str:
    """Render a command result as text, json or csv."""
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    digits = digits or {}
    if len(rows) == 1:
        return "".join(f"{k}: {_fmt(v, digits.get(k))}\n" for k, v in rows[0].items())
    cols = list(rows[0])
    cells = [[_fmt(r[c], digits.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


# -- argument helpers -------------------------------------------------------

def _model(args):
    return pc.RewardModel(args.p)


def _bound_spec(args):
    given = [(k, v) for k, v in (("absolute", args.bound_abs), ("additive", args.bound_add),
                                 ("multiplicative", args.bound_mult)) if v is not None]
    if len(given) > 1:
        raise UsageError("--bound-abs, --bound-add and --bound-mult are mutually exclusive")
    if not given:
        return None
    return BoundSpec(**dict(given))


def _add_p(sp):
    sp.add_argument("--p", type=float, required=True, help="probability of a positive reward")


def _add_format(sp):
    sp.add_argument("--format", choices=("text", "json", "csv"), default="text")


def _add_rule_a_flags(sp, need_bound):
    _add_p(sp)
    sp.add_argument("--r", type=int, required=True, help="positive rewards that end an episode")
    sp.add_argument("--rho-star", type=float, default=0.5,
                    help="success fraction, e.g. 0.3, 0.5 or 0.7 (default 0.5)")
    group = sp.add_argument_group("bound (negative-reward count)")
    group.add_argument("--bound-abs", type=int, help="bound b given directly")
    group.add_argument("--bound-add", type=float, help="b = round(E[W_r] + d)")
    group.add_argument("--bound-mult", type=float, help="b = round(alpha * E[W_r])")
    sp.add_argument("--cost", type=float, default=None if not need_bound else 1.0,
                    help="cost per observation")
    sp.set_defaults(need_bound=need_bound)


# -- commands ---------------------------------------------------------------

def cmd_dist(args):
    model, spec = _model(args), pc.WaitingTimeSpec(args.r)
    out = {}
    if args.mean:
        out["mean"] = pc.nb_mean(model, spec)
    if args.variance:
        out["variance"] = pc.nb_variance(model, spec)
    if args.pmf_at is not None:
        out["pmf"] = pc.nb_pmf(model, spec, args.pmf_at)
    if args.cdf_at is not None:
        out["cdf"] = pc.nb_cdf(model, spec, args.cdf_at)
    if args.pgf_at is not None:
        out["pgf"] = pc.pgf_eval(model, spec, args.pgf_at)
    if not out:
        out = {"mean": pc.nb_mean(model, spec), "variance": pc.nb_variance(model, spec)}
    row = {"p": model.p, "r": spec.r, **out}
    payload = {"command": "dist", "p": model.p, "r": spec.r, "k": args.pmf_at,
               "b": args.cdf_at, "z": args.pgf_at, "results": out}
    if args.format == "text" and len(out) == 1:
        digits = args.digits if args.digits is not None else _dist_digits(next(iter(out)))
        return f"{_fmt(next(iter(out.values())), digits)}\n", EXIT_OK
    digits = {k: (args.digits if args.digits is not None else _dist_digits(k)) for k in out}
    return render(payload, [row], args.format, digits), EXIT_OK


def _dist_digits(name):
    return 2 if name in ("mean", "variance") else 3 if name == "cdf" else None


def cmd_rule_a(args):
    model = _model(args)
    config = RuleAConfig(args.r, args.rho_star)
    spec = _bound_spec(args)
    if spec is None:
        raise UsageError("one of --bound-abs, --bound-add, --bound-mult is required")
    report = analyze_rule_a(model, config, CostModel(args.cost), spec)
    row = {
        "p": model.p, "r": config.r, "rho_star": config.rho_star,
        "bound_kind": spec.kind, "bound_param": spec.value, "c": args.cost,
        "rewards_ratio": rewards_ratio(model),
        "success_probability": success_probability(model, config),
        "expected_negatives": report.expected_negatives,
        "resolved_bound": report.resolved_bound,
        "exceedance_exact": report.exceedance_exact,
        "exceedance_approx": report.exceedance_approx,
        "approx_error": report.approx_error,
        "min_cost": report.min_cost,
        "max_cost_at_bound": report.max_cost_at_bound,
    }
    digits = {"expected_negatives": 2, "exceedance_exact": 3, "exceedance_approx": 3,
              "approx_error": 3, "success_probability": 4, "rewards_ratio": 4}
    if args.digits is not None:
        digits = dict.fromkeys(row, args.digits)
    payload = {"command": "rule-a", **row}
    return render(payload, [row], args.format, digits), EXIT_OK


def cmd_rule_b(args):
    model, config = _model(args), RuleBConfig(args.m)
    rep = analyze_rule_b(config, model)
    payload = {
        "command": "rule-b", "m": rep.m, "h": config.h, "p": rep.p,
        "success_prob": rep.success_prob, "failure_prob": rep.failure_prob,
        "length_min": rep.length_min, "length_max": rep.length_max,
        "per_length_probs": [{"k": k, "observation": 4 * rep.m + 1 - k, "f_k": f}
                             for k, f in rep.per_length_probs],
    }
    digits = args.digits if args.digits is not None else 4
    if args.format == "text":
        head = {k: payload[k] for k in ("m", "h", "p", "success_prob", "failure_prob",
                                        "length_min", "length_max")}
        text = render(payload, [head], "text", {"success_prob": digits, "failure_prob": digits})
        table = render(payload, payload["per_length_probs"], "text", {"f_k": args.digits or 6})
        return text + "\n" + table, EXIT_OK
    rows = [{"m": rep.m, "p": rep.p, "success_prob": rep.success_prob,
             "failure_prob": rep.failure_prob, "length_min": rep.length_min,
             "length_max": rep.length_max, **fk} for fk in payload["per_length_probs"]]
    return render(payload, rows, args.format), EXIT_OK


def cmd_simulate(args):
    model = _model(args)
    bound = None
    cost = CostModel(args.cost) if args.cost is not None else None
    if args.rule == "rule-a":
        rule = RuleAConfig(args.r, args.rho_star)
        spec = _bound_spec(args)
        if spec is not None:
            bound = resolve_bound(spec, model, rule)
        params = {"p": model.p, "r": rule.r, "rho_star": rule.rho_star, "bound": bound}
    else:
        rule = RuleBConfig(args.m)
        params = {"p": model.p, "m": rule.m, "h": rule.h}
    cfg = SimulationConfig(args.n, args.seed, model, rule, bound=bound, cost=cost)
    summary = simulate(cfg, workers=args.workers)

    empirical = {"success_rate": summary.empirical_success_rate,
                 "mean_negatives": summary.empirical_mean_negatives,
                 "var_negatives": summary.empirical_var_negatives}
    if summary.empirical_exceedance is not None:
        empirical["exceedance"] = summary.empirical_exceedance
    if summary.mean_cost is not None:
        empirical["mean_cost"] = summary.mean_cost
    quantities = []
    for name, value in empirical.items():
        analytic = summary.analytic.get(name)
        quantities.append({
            "quantity": name, "empirical": value, "analytic": analytic,
            "abs_deviation": None if analytic is None else abs(value - analytic),
        })
    payload = {"command": "simulate", "rule": summary.rule, "n_episodes": summary.n_episodes,
               "seed": summary.seed, "params": params, "quantities": quantities}
    if summary.length_counts is not None:
        payload["length_counts"] = {str(k): v for k, v in summary.length_counts.items()}
    if args.format == "text":
        head = f"rule {summary.rule}  n={summary.n_episodes}  seed={summary.seed}  " + \
            "  ".join(f"{k}={v}" for k, v in params.items()) + "\n\n"
        text = head + render(payload, quantities, "text",
                             dict.fromkeys(("empirical", "analytic", "abs_deviation"),
                                           args.digits or 6))
        if summary.length_counts:
            text += "\nlength  episodes\n" + "".join(
                f"{k:<6}  {v}\n" for k, v in summary.length_counts.items())
        return text, EXIT_OK
    rows = [{"rule": summary.rule, "n_episodes": summary.n_episodes, "seed": summary.seed, **q}
            for q in quantities]
    return render(payload, rows, args.format), EXIT_OK


def cmd_reproduce(args):
    results = reproduce(args.table)
    ok = all_normal_rows_match(results)
    records = []
    for res in results:
        rec = {"row": res.label, "status": "anomalous" if res.anomalous else "normal",
               "match": res.ok}
        for cell in res.cells:
            rec[f"{cell.column}_printed"] = cell.printed
            rec[f"{cell.column}_computed"] = cell.computed
            rec[f"{cell.column}_ok"] = cell.ok
        for key in ("b_printed", "b_used", "b_rule", "err_from_rounded"):
            if key in res.extra:
                rec[key] = res.extra[key]
        rec["note"] = res.note
        records.append(rec)
    n_cells = sum(len(r.cells) for r in results if not r.anomalous)
    n_ok = sum(c.ok for r in results if not r.anomalous for c in r.cells)
    anomalies = [{"row": r.label, "note": r.note,
                  "candidates": {str(b): v for b, v in r.extra.get("candidates", {}).items()}}
                 for r in results if r.anomalous]
    payload = {"command": "reproduce", "table": args.table, "all_match": ok,
               "cells_matched": n_ok, "cells_checked": n_cells, "rows": records,
               "anomalies": anomalies}
    code = EXIT_OK if ok else EXIT_MISMATCH
    if args.format != "text":
        return render(payload, records, args.format), code
    return _reproduce_text(args.table, results, n_ok, n_cells, anomalies), code


def _reproduce_text(table, results, n_ok, n_cells, anomalies):
    places = 4 if table == "II" else 3
    lines = [f"Table {table}: recomputed vs printed (tolerance: half a unit in the last place)", ""]
    for res in results:
        parts = []
        for cell in res.cells:
            d = 2 if cell.column == "mean" else places
            mark = "ok" if cell.ok else "MISMATCH"
            parts.append(f"{cell.column} {cell.printed:.{d}f}/{cell.computed:.{d + 2}f} {mark}")
        tag = " [anomalous]" if res.anomalous else ""
        lines.append(f"{res.label:<28} " + "  ".join(parts) + tag)
        if "err_from_rounded" in res.extra:
            b_rule = res.extra["b_rule"]
            if b_rule != res.extra["b_printed"]:
                lines.append(f"{'':<28} rounding rule gives b={b_rule}")
            if not res.cells[-1].ok:
                lines.append(f"{'':<28} printed Err equals |P_b - P_b_exact| of the rounded "
                             f"columns ({res.extra['err_from_rounded']:.3f})")
    lines += ["", f"non-anomalous cells matched: {n_ok}/{n_cells}"]
    for a in anomalies:
        lines.append(f"anomaly {a['row']}: {a['note']}")
        for b, vals in a["candidates"].items():
            lines.append(f"    b={b}: P_b={vals['P_b']:.3f}  P_b_exact={vals['P_b_exact']:.3f}")
    return "\n".join(lines) + "\n"


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rlstop", description=__doc__.splitlines()[0])
    parser.add_argument("--batch", metavar="FILE",
                        help="run one command per line from FILE ('#' starts a comment)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("dist", help="negative-binomial waiting-time quantities")
    _add_p(sp)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--mean", action="store_true")
    sp.add_argument("--variance", action="store_true")
    sp.add_argument("--pmf-at", type=int, metavar="K")
    sp.add_argument("--cdf-at", type=int, metavar="B")
    sp.add_argument("--pgf-at", type=float, metavar="Z")
    sp.add_argument("--digits", type=int)
    _add_format(sp)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("rule-a", help="fixed positive-count stopping rule report")
    _add_rule_a_flags(sp, need_bound=True)
    sp.add_argument("--digits", type=int)
    _add_format(sp)
    sp.set_defaults(func=cmd_rule_a)

    sp = sub.add_parser("rule-b", help="race-to-threshold stopping rule report")
    _add_p(sp)
    sp.add_argument("--m", type=int, required=True, help="threshold is h = 2m + 1")
    sp.add_argument("--digits", type=int)
    _add_format(sp)
    sp.set_defaults(func=cmd_rule_b)

    sp = sub.add_parser("simulate", help="Monte Carlo check of either rule")
    rules = sp.add_subparsers(dest="rule", required=True, parser_class=_Parser)
    for name in ("rule-a", "rule-b"):
        rp = rules.add_parser(name)
        if name == "rule-a":
            _add_rule_a_flags(rp, need_bound=False)
        else:
            _add_p(rp)
            rp.add_argument("--m", type=int, required=True)
            rp.add_argument("--cost", type=float, help="cost per observation")
        rp.add_argument("--n", type=int, default=100_000, help="episodes (default 100000)")
        rp.add_argument("--seed", type=int, default=0)
        rp.add_argument("--workers", type=int, default=1)
        rp.add_argument("--digits", type=int)
        _add_format(rp)
        rp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("reproduce", help="recompute a published table")
    sp.add_argument("--table", choices=("I", "II"), required=True)
    _add_format(sp)
    sp.set_defaults(func=cmd_reproduce)
    return parser


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.batch:
            if args.command:
                raise UsageError("--batch cannot be combined with a command")
            return _run_batch(args.batch, stdout, stderr)
        if not args.command:
            raise UsageError(parser.format_usage().strip())
        text, code = args.func(args)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"rlstop: error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(text)
    return code


def _run_batch(path, stdout, stderr) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read batch file: {exc}") from exc
    worst = EXIT_OK
    for line in lines:
        argv = shlex.split(line, comments=True)
        if argv:
            worst = max(worst, run(argv, stdout, stderr))
    return worst


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
