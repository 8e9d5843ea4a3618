"""Command-line driver.

Exit status: 0 on success, 1 on a domain error (violated precondition,
refused enumeration, exceeded budget, failed oracle comparison), 2 on a
configuration or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import ca_core, events, mixing, oracle
from .errors import AddcaError, ParseError
from .mixing import ActionIndex, LatticePoint, LatticeRect

CSV_HEADER = ["i", "j", "count", "width", "value_decimal", "deviation_num", "deviation_den"]
LATTICE_COMMANDS = {"correlate", "cesaro", "weakmix", "strongmix"}


class ConfigError(Exception):
    """Bad command-line configuration (exit status 2)."""


@dataclass
class RunConfig:
    command: str
    rule: str
    events: dict[str, str] = field(default_factory=dict)
    i: int = 0
    j: int = 0
    p: int | None = None
    n: int | None = None
    along: list[tuple[int, int]] = field(default_factory=list)
    fmt: str = "text"
    out: str | None = None
    cap: int = 4096
    budget: int = oracle.DEFAULT_BUDGET
    workers: int | None = None
    max_len: int = 3
    max_i: int = 3
    max_j: int = 2
    b_offset: int = 0
    limit: int | None = None


def _frac(x: Fraction) -> str:
    return str(x)


def _dec(x: Fraction) -> str:
    return format(float(x), ".12g")


def _measure_fields(mu: events.ExactMeasure) -> dict:
    return {"value": str(mu), "value_decimal": mu.decimal()}


def _word_text(w, m: int) -> str:
    return "".join(map(str, w.symbols)) if m <= 10 else ",".join(map(str, w.symbols))


def _point_json(pt: LatticePoint) -> dict:
    return {"i": pt.i, "j": pt.j, "count": pt.value.count, "width": pt.value.width,
            "value": str(pt.value), "value_decimal": pt.value.decimal(),
            "deviation": _frac(pt.deviation)}


def _points_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pt in points:
        writer.writerow([pt.i, pt.j, pt.value.count, pt.value.width, pt.value.decimal(),
                         pt.deviation.numerator, pt.deviation.denominator])
    return buf.getvalue()


def parse_along(text: str) -> list[tuple[int, int]]:
    """Parse an index list ``i,j;i,j;...``."""
    out = []
    for part in text.replace(" ", "").split(";"):
        if not part:
            continue
        try:
            i, j = (int(v) for v in part.split(","))
        except ValueError:
            raise ParseError(f"malformed index {part!r} in {text!r}") from None
        out.append((i, j))
    if not out:
        raise ParseError("index list is empty")
    return out


def _event(cfg: RunConfig, name: str, m: int) -> events.AffineEvent:
    spec = cfg.events.get(name)
    if spec is None:
        raise ConfigError(f"command {cfg.command!r} requires --{name}")
    return events.parse_event(spec, m)


def _rect(cfg: RunConfig) -> LatticeRect:
    if cfg.p is None or cfg.n is None:
        raise ConfigError(f"command {cfg.command!r} requires --p and --n")
    if cfg.p < 1 or cfg.n < 1:
        raise ConfigError("--p and --n must be >= 1")
    return LatticeRect(cfg.p, cfg.n)


def _report_json(rep: mixing.MixingReport) -> dict:
    return {
        "rule": rep.rule, "A": rep.A, "B": rep.B,
        "rect": {"p": rep.rect.p, "n": rep.rect.n},
        "product": _frac(rep.product),
        "cesaro_value": _frac(rep.cesaro_value),
        "cesaro_deviation": _frac(rep.cesaro_deviation),
        "weak_sum": _frac(rep.weak_sum),
        "strong_tail": str(rep.strong_tail),
        "strong_deviation": _frac(rep.strong_deviation),
        "tail_bound": _frac(rep.tail_bound),
        "thresholds": rep.thresholds,
        "reference_bounds": rep.reference_bounds,
        "lattice": [_point_json(pt) for pt in rep.points],
    }


def _cmd_preimage(cfg, rule):
    E = _event(cfg, "event", rule.m)
    pre = mixing.action_preimage(rule, ActionIndex(cfg.i, cfg.j), E)
    mu = events.measure(pre)
    words = events.blocks(pre, cfg.cap)
    data = {"command": "preimage", "rule": ca_core.format_rule(rule),
            "event": events.format_event(E), "i": cfg.i, "j": cfg.j,
            "window": [pre.window_lo, pre.window_hi], "count": len(words),
            "measure": str(mu), "measure_decimal": mu.decimal(),
            "blocks": [_word_text(w, rule.m) for w in words]}
    lines = [f"preimage of {data['event']} at (i,j)=({cfg.i},{cfg.j}) "
             f"on window [{pre.window_lo},{pre.window_hi}]",
             f"blocks: {len(words)}", f"measure: {mu} ({mu.decimal()})"]
    lines += [f"  {w}" for w in words]
    return data, lines, None


def _cmd_measure(cfg, rule):
    E = _event(cfg, "event", rule.m)
    target = mixing.action_preimage(rule, ActionIndex(cfg.i, cfg.j), E)
    mu = events.measure(target)
    data = {"command": "measure", "rule": ca_core.format_rule(rule),
            "event": events.format_event(E), "i": cfg.i, "j": cfg.j,
            "measure": str(mu), "measure_decimal": mu.decimal()}
    return data, [str(mu)], None


def _cmd_correlate(cfg, rule):
    A, B = _event(cfg, "A", rule.m), _event(cfg, "B", rule.m)
    idx = ActionIndex(cfg.i, cfg.j)
    value, dev = mixing.correlation(rule, A, B, idx)
    pt = LatticePoint(idx.i, idx.j, value, dev)
    data = {"command": "correlate", "rule": ca_core.format_rule(rule),
            "A": events.format_event(A), "B": events.format_event(B),
            "i": idx.i, "j": idx.j, "value": str(value),
            "value_decimal": value.decimal(), "deviation": _frac(dev)}
    return data, [f"value: {value} ({value.decimal()})", f"deviation: {dev}"], [pt]


def _cmd_cesaro(cfg, rule):
    A, B = _event(cfg, "A", rule.m), _event(cfg, "B", rule.m)
    rep = mixing.cesaro_report(rule, A, B, _rect(cfg), cfg.workers)
    data = {"command": cfg.command, **_report_json(rep)}
    lines = [f"rule {rep.rule}  A {rep.A}  B {rep.B}  rect p={rep.rect.p} n={rep.rect.n}",
             f"mu(A)mu(B):       {rep.product}",
             f"cesaro value:     {rep.cesaro_value} ({_dec(rep.cesaro_value)})",
             f"cesaro deviation: {rep.cesaro_deviation} ({_dec(rep.cesaro_deviation)})",
             f"weak sum:         {rep.weak_sum} ({_dec(rep.weak_sum)})",
             f"tail bound:       {rep.tail_bound} ({_dec(rep.tail_bound)})",
             f"corner value:     {rep.strong_tail}  deviation {rep.strong_deviation}",
             f"thresholds i*(j): {rep.thresholds}",
             f"reference b+s+j*lo-a: {rep.reference_bounds}"]
    return data, lines, rep.points


def _cmd_weakmix(cfg, rule):
    if cfg.fmt == "text":
        A, B = _event(cfg, "A", rule.m), _event(cfg, "B", rule.m)
        rect = _rect(cfg)
        rep = mixing.cesaro_report(rule, A, B, rect, cfg.workers)
        lines = [f"weak sum: {rep.weak_sum} ({_dec(rep.weak_sum)})",
                 f"tail bound: {rep.tail_bound} ({_dec(rep.tail_bound)})"]
        return {}, lines, rep.points
    return _cmd_cesaro(cfg, rule)


def _cmd_strongmix(cfg, rule):
    A, B = _event(cfg, "A", rule.m), _event(cfg, "B", rule.m)
    if not cfg.along:
        raise ConfigError("strongmix requires --along")
    indices = [ActionIndex(i, j) for i, j in cfg.along]
    points = mixing.correlation_grid(rule, A, B, indices, cfg.workers)
    rows = []
    for pt in points:
        thr = mixing.disjoint_threshold(rule, A, B, pt.j)
        rows.append({**_point_json(pt), "threshold": thr, "beyond_threshold": pt.i >= thr})
    data = {"command": "strongmix", "rule": ca_core.format_rule(rule),
            "A": events.format_event(A), "B": events.format_event(B), "probe": rows}
    lines = [f"({r['i']},{r['j']}) value {r['value']} deviation {r['deviation']} "
             f"i*={r['threshold']}" for r in rows]
    return data, lines, points


def _cmd_threshold(cfg, rule):
    A, B = _event(cfg, "A", rule.m), _event(cfg, "B", rule.m)
    thr = mixing.disjoint_threshold(rule, A, B, cfg.j)
    ref = mixing.reference_bound(rule, A, B, cfg.j)
    data = {"command": "threshold", "rule": ca_core.format_rule(rule),
            "A": events.format_event(A), "B": events.format_event(B), "j": cfg.j,
            "threshold": thr, "reference_bound": ref}
    return data, [f"i* = {thr}", f"b+s+j*lo-a = {ref}"], None


def _cmd_search(cfg, rule):
    found = mixing.search_nonfactorizing(rule, cfg.max_len, cfg.max_j, cfg.b_offset)
    shown = found if cfg.limit is None else found[:cfg.limit]
    rows = [{"A": events.format_event(w.A), "B": events.format_event(w.B),
             "j": w.j, "deviation": _frac(w.deviation)} for w in shown]
    data = {"command": "search-nonfactor", "rule": ca_core.format_rule(rule),
            "max_len": cfg.max_len, "max_j": cfg.max_j, "b_offset": cfg.b_offset,
            "total": len(found), "witnesses": rows}
    lines = [f"{len(found)} nonfactorizing triples"]
    lines += [f"  A={r['A']} B={r['B']} j={r['j']} deviation={r['deviation']}" for r in rows]
    return data, lines, None


def oracle_check(rule: ca_core.AdditiveRule, max_len: int, max_i: int, max_j: int,
                 budget: int) -> dict:
    """Compare library results with brute force over a box of cases."""
    counts = {"preimage": [0, 0], "correlation": [0, 0], "surjectivity": [0, 0]}
    failures = []

    def record(kind, ok, detail):
        counts[kind][0 if ok else 1] += 1
        if not ok:
            failures.append(f"{kind}: {detail}")

    cyls = mixing.all_cylinders(rule.m, max_len)
    for A in cyls:
        for j in range(max_j + 1):
            pre = events.iterated_preimage(rule, A, j)
            want = oracle.brute_preimage(ca_core.power_rule(rule, j), A, budget) if j else None
            if want is not None:
                got = events.blocks(pre, max(1, len(want)))
                record("preimage", got == want, f"A={events.format_event(A)} j={j}")
        for B in cyls:
            for j in range(max_j + 1):
                for i in range(max_i + 1):
                    got, _ = mixing.correlation(rule, A, B, ActionIndex(i, j))
                    want = oracle.brute_correlation(rule, A, B, (i, j), budget)
                    record("correlation", got == want,
                           f"A={events.format_event(A)} B={events.format_event(B)} idx=({i},{j})")
    for probe in range(1, max_len + 1):
        ok = oracle.brute_surjectivity(rule, probe, budget) == ca_core.is_surjective(rule)
        record("surjectivity", ok, f"probe_len={probe}")
    return {"counts": {k: {"pass": v[0], "fail": v[1]} for k, v in counts.items()},
            "failures": failures}


def _cmd_oracle_check(cfg, rule):
    res = oracle_check(rule, cfg.max_len, cfg.max_i, cfg.max_j, cfg.budget)
    data = {"command": "oracle-check", "rule": ca_core.format_rule(rule), **res}
    lines = [f"{k}: {v['pass']} pass, {v['fail']} fail" for k, v in res["counts"].items()]
    lines += res["failures"]
    return data, lines, None


COMMANDS = {
    "preimage": _cmd_preimage,
    "measure": _cmd_measure,
    "correlate": _cmd_correlate,
    "cesaro": _cmd_cesaro,
    "weakmix": _cmd_weakmix,
    "strongmix": _cmd_strongmix,
    "threshold": _cmd_threshold,
    "search-nonfactor": _cmd_search,
    "oracle-check": _cmd_oracle_check,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if cfg.command not in COMMANDS:
            raise ConfigError(f"unknown command {cfg.command!r}")
        if cfg.fmt == "csv" and cfg.command not in LATTICE_COMMANDS:
            raise ConfigError(f"csv output is only available for {sorted(LATTICE_COMMANDS)}")
        rule = ca_core.parse_rule(cfg.rule)
        data, lines, points = COMMANDS[cfg.command](cfg, rule)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except AddcaError as exc:
        print(f"error: {exc}", file=stderr)
        return 1

    if cfg.fmt == "json":
        text = json.dumps(data, indent=2) + "\n"
    elif cfg.fmt == "csv":
        text = _points_csv(points)
    else:
        text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if cfg.command == "oracle-check" and failures_of(data):
        return 1
    return 0


def failures_of(data: dict) -> int:
    return sum(v["fail"] for v in data.get("counts", {}).values())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addca", description="Exact measure and mixing computations for additive CA over Z_m.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rule", required=True,
                        help='rule spec, e.g. "m=2;range=-2..2;coeffs=1,1,1,1,1"')
    common.add_argument("--format", dest="fmt", choices=["text", "json", "csv"], default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--cap", type=int, default=4096, help="block enumeration cap")
    common.add_argument("--budget", type=int, default=None,
                        help=f"oracle word budget (default ${oracle.BUDGET_ENV} or 2^20)")
    common.add_argument("--parallel", dest="workers", type=int, default=None, metavar="N",
                        help="evaluate lattice points with N worker processes")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("preimage", "blocks and measure of an action preimage")
    p.add_argument("--event", required=True)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)

    p = add("measure", "exact measure of an event (optionally its action preimage)")
    p.add_argument("--event", required=True)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=0)

    p = add("correlate", "correlation at a single index")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=0)

    for name, help_ in (("cesaro", "Cesaro average over a lattice rectangle"),
                        ("weakmix", "mean absolute deviation over a lattice rectangle")):
        p = add(name, help_)
        p.add_argument("--A", required=True)
        p.add_argument("--B", required=True)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--n", type=int, required=True)

    p = add("strongmix", "deviations along a list of indices")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--along", required=True, help='index list "i,j;i,j;..."')

    p = add("threshold", "disjoint-window threshold i* for a given j")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--j", type=int, default=0)

    p = add("search-nonfactor", "scan cylinder pairs for nonzero deviation at i = 0")
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--max-j", type=int, default=2)
    p.add_argument("--b-offset", type=int, default=0)
    p.add_argument("--limit", type=int, default=None, help="report only the first N witnesses")

    p = add("oracle-check", "compare library results with brute force in a box")
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--max-i", type=int, default=3)
    p.add_argument("--max-j", type=int, default=2)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    evs = {k: getattr(ns, k) for k in ("event", "A", "B") if getattr(ns, k, None) is not None}
    cfg = RunConfig(command=ns.command, rule=ns.rule, events=evs, fmt=ns.fmt, out=ns.out,
                    cap=ns.cap, workers=ns.workers,
                    budget=ns.budget if ns.budget is not None else oracle.default_budget())
    for name in ("i", "j", "p", "n", "max_len", "max_i", "max_j", "b_offset", "limit"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if getattr(ns, "along", None) is not None:
        cfg.along = parse_along(ns.along)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
