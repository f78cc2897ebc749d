"""``shiftlab`` command line.

Every command prints a report: ``# key: value`` header lines (command,
spec hash, level, status, timing, search nodes) followed by a results
section in CSV or JSON lines. The results section depends only on the
inputs and the budget, never on the thread count. ``--out`` writes the
results section alone to a file; ``--cert`` writes certificates that
``shiftlab verify`` re-checks.

Exit codes: 0 success, 1 verification failure, 2 counterexample found,
3 nothing found up to the searched scale, 4 budget exhausted, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from typing import Sequence

from . import certificates, specfile, zoo
from .admissible import Admissibility
from .config import DEFAULT_BUDGET, Config
from .entropy import (
    cyclic_microstate_count,
    entropy_series,
    independence_density,
    transfer_matrix_entropy,
)
from .errors import BudgetExceeded, EntropyUndefined, ShiftlabError, UsageError
from .shift import LocalMargin, SubshiftSpec, parse_level
from .tmp import (
    Counterexample,
    Inconclusive,
    NoneUpToScale,
    check_memory_set,
    find_interchangeable_pair,
    homoclinic_search,
    strong_tmp_scan,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_COUNTEREXAMPLE = 2
EXIT_NONE = 3
EXIT_BUDGET = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- descriptors ----------------------------------------------------------------


def parse_subset(spec: SubshiftSpec, text: str, cap: int) -> tuple:
    """``ball:n``, ``box:n`` or ``set:[...]`` into a canonical finite subset."""
    grp = spec.group
    kind, _, arg = text.strip().partition(":")
    if kind == "ball":
        return grp.ball(_nonneg(arg, text), cap)
    if kind == "box":
        n = _nonneg(arg, text)
        if n < 1:
            raise UsageError(f"box size must be positive in {text!r}")
        return grp.folner_window(n)
    if kind == "set":
        try:
            items = json.loads(arg)
        except json.JSONDecodeError:
            raise UsageError(f"set descriptor needs a JSON list: {text!r}") from None
        if not isinstance(items, list) or not items:
            raise UsageError(f"set descriptor needs a nonempty list: {text!r}")
        return grp.canonical({grp.parse_element(e) for e in items})
    raise UsageError(f"bad subset descriptor {text!r} (expected ball:n, box:n or set:[...])")


def _nonneg(arg: str, text: str) -> int:
    if not re.fullmatch(r"\d+", arg.strip()):
        raise UsageError(f"bad size in descriptor {text!r}")
    return int(arg)


def split_list(text: str) -> list:
    """Split on commas and semicolons that are not inside brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch in ",;" and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    return [s for s in out if s]


def load_spec(args) -> SubshiftSpec:
    ref = args.spec_opt or args.spec
    if not ref:
        raise UsageError("no subshift given (a file path, or zoo:<name>)")
    if ref.startswith("zoo:"):
        return zoo.get(ref[4:]).spec
    return specfile.load(ref)


# -- reports ----------------------------------------------------------------------


class Report:
    def __init__(self, argv: Sequence[str], spec: SubshiftSpec | None = None, level=None):
        self.meta: list = [("command", "shiftlab " + " ".join(argv))]
        if spec is not None:
            self.meta.append(("spec", spec.name or "-"))
            self.meta.append(("spec_hash", specfile.spec_hash(spec)))
        if level is not None:
            self.meta.append(("level", str(level)))
        self.lines: list = []
        self.certs: list = []
        self.status = "ok"
        self.code = EXIT_OK
        self.nodes = None
        self.start = time.perf_counter()

    def csv(self, header, rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if x is None else (repr(x) if isinstance(x, float) else x) for x in r])
        self.lines.extend(buf.getvalue().splitlines())

    def json(self, obj) -> None:
        self.lines.append(specfile.canonical_json(obj))

    def cert(self, spec, result) -> dict:
        c = certificates.encode(spec, result)
        self.certs.append(c)
        self.json(c)
        return c

    @property
    def results(self) -> str:
        return "".join(line + "\n" for line in self.lines)

    def render(self) -> str:
        meta = list(self.meta)
        meta.append(("status", self.status))
        meta.append(("wall_time", f"{time.perf_counter() - self.start:.3f}s"))
        if self.nodes is not None:
            meta.append(("nodes", str(self.nodes)))
        head = "".join(f"# {k}: {v}\n" for k, v in meta)
        return head + "# results\n" + self.results


# -- commands ---------------------------------------------------------------------


def _config(args) -> Config:
    if args.threads is not None and args.threads < 1:
        raise UsageError("--threads must be at least 1")
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    kw = {"budget": args.budget}
    if args.threads is not None:
        kw["threads"] = args.threads
    return Config(**kw)


def cmd_count(args, argv):
    spec = load_spec(args)
    config = _config(args)
    level = parse_level(args.level)
    rep = Report(argv, spec, level)
    subsets = [(d, parse_subset(spec, d, config.ball_cap)) for d in split_list(args.F)]
    adm = Admissibility(spec, level, config, method=args.method)
    rows = []
    try:
        for d, sites in subsets:
            rows.append((d, len(sites), adm.count(sites, method=None if args.method == "auto" else args.method)))
    except BudgetExceeded as exc:
        rows.append((d, len(sites), None))
        rep.status = f"budget exhausted (partial count {exc.partial})"
        rep.code = EXIT_BUDGET
    rep.nodes = adm.budget.used
    rep.csv(["support", "size", "count"], rows)
    return rep


def cmd_entropy(args, argv):
    spec = load_spec(args)
    config = _config(args)
    level = parse_level(args.level)
    rep = Report(argv, spec, level)
    windows = []
    for w in split_list(args.windows):
        if re.fullmatch(r"\d+", w):
            windows.append(int(w))
        else:
            windows.append((w, parse_subset(spec, w, config.ball_cap)))
    oracle = None
    if args.oracle:
        try:
            oracle = transfer_matrix_entropy(spec)
        except EntropyUndefined:
            oracle = None
    try:
        series = entropy_series(spec, windows, level, config)
    except BudgetExceeded as exc:
        rep.status = f"budget exhausted ({exc})"
        rep.code = EXIT_BUDGET
        return rep
    rep.meta.append(("series", series.label))
    header = ["window", "size", "count", "rate"] + (["oracle"] if args.oracle else [])
    rows = [list(r) + ([oracle] if args.oracle else []) for r in series.rows]
    rep.csv(header, rows)
    return rep


def _emit_verdict(rep, spec, v):
    if isinstance(v, Counterexample):
        rep.cert(spec, v)
        return "counterexample", EXIT_COUNTEREXAMPLE
    grp = spec.group
    obj = {
        "kind": v.kind,
        "level": str(v.level),
        "inner": [grp.format(g) for g in v.inner],
        "outer": [grp.format(g) for g in v.outer],
        "window": [grp.format(g) for g in v.window],
    }
    if isinstance(v, Inconclusive):
        obj["note"] = v.note
        rep.json(obj)
        return "inconclusive", EXIT_BUDGET
    rep.json(obj)
    return "holds", EXIT_OK


def cmd_tmp(args, argv):
    spec = load_spec(args)
    config = _config(args)
    level = parse_level(args.level)
    rep = Report(argv, spec, level)
    if args.scan:
        if not args.margin:
            raise UsageError("--scan needs --margin")
        margin = parse_subset(spec, args.margin, config.ball_cap)
        supports = [parse_subset(spec, d, config.ball_cap) for d in split_list(args.scan)]
        scan = strong_tmp_scan(spec, margin, supports, args.growth, level, args.side, config)
        codes = []
        for _, v in scan.results:
            codes.append(_emit_verdict(rep, spec, v)[1])
        code = EXIT_COUNTEREXAMPLE if EXIT_COUNTEREXAMPLE in codes else (EXIT_BUDGET if EXIT_BUDGET in codes else EXIT_OK)
        rep.meta.append(("margin_side", "A·F" if args.side == "right" else "F·A"))
    else:
        if not (args.A and args.B and args.window):
            raise UsageError("tmp needs --A, --B and --window (or --margin with --scan)")
        inner = parse_subset(spec, args.A, config.ball_cap)
        outer = parse_subset(spec, args.B, config.ball_cap)
        window = parse_subset(spec, args.window, config.ball_cap)
        v = check_memory_set(spec, inner, outer, window, level, config)
        _, code = _emit_verdict(rep, spec, v)
    rep.status = {EXIT_OK: "holds at this scale", EXIT_COUNTEREXAMPLE: "counterexample", EXIT_BUDGET: "inconclusive (budget)"}[code]
    rep.code = code
    return rep


def _none(rep, spec, result):
    grp = spec.group
    params = {}
    for k, v in result.params.items():
        params[k] = [grp.format(g) for g in v] if isinstance(v, tuple) else v
    rep.json({"kind": "none", "what": result.what, "level": str(result.level), "params": params})
    rep.status = f"no {result.what} up to this scale"
    rep.code = EXIT_NONE


def cmd_asym(args, argv):
    spec = load_spec(args)
    config = _config(args)
    level = parse_level(args.level)
    rep = Report(argv, spec, level)
    inner = parse_subset(spec, args.A, config.ball_cap)
    window = parse_subset(spec, args.window, config.ball_cap)
    try:
        res = find_interchangeable_pair(spec, inner, window, level, config, method=args.method)
    except BudgetExceeded as exc:
        rep.status = f"budget exhausted ({exc})"
        rep.code = EXIT_BUDGET
        return rep
    if isinstance(res, NoneUpToScale):
        _none(rep, spec, res)
    else:
        rep.cert(spec, res)
        rep.status = "interchangeable pair found"
    return rep


def cmd_homoclinic(args, argv):
    spec = load_spec(args)
    config = _config(args)
    rep = Report(argv, spec, LocalMargin(0))
    try:
        res = homoclinic_search(spec, args.background, args.radius, args.margin, config, method=args.method)
    except BudgetExceeded as exc:
        rep.status = f"budget exhausted ({exc})"
        rep.code = EXIT_BUDGET
        return rep
    if isinstance(res, NoneUpToScale):
        _none(rep, spec, res)
    else:
        rep.cert(spec, res)
        rep.status = "homoclinic witness found"
    return rep


def cmd_indep(args, argv):
    spec = load_spec(args)
    config = _config(args)
    level = parse_level(args.level)
    rep = Report(argv, spec, level)
    cyl = []
    for c in args.cylinder or []:
        try:
            pairs = json.loads(c)
        except json.JSONDecodeError:
            raise UsageError(f"--cylinder needs a JSON list of [element, symbol] pairs: {c!r}") from None
        cyl.append(spec.pattern(pairs))
    for s in split_list(args.symbols or ""):
        cyl.append(spec.pattern([[spec.group.format(spec.group.identity), s]]))
    if not cyl:
        raise UsageError("give cylinders with --symbols or --cylinder")
    ambient = parse_subset(spec, args.F, config.ball_cap)
    res = independence_density(spec, cyl, ambient, level, config)
    rep.nodes = res.nodes
    rep.cert(spec, res)
    rep.json({"kind": "density", "size": len(res.best), "ambient": len(res.ambient), "density": res.density, "exact": res.exact})
    if not res.exact:
        rep.status = "budget exhausted (density is a lower bound)"
        rep.code = EXIT_BUDGET
    return rep


def cmd_microstates(args, argv):
    spec = load_spec(args)
    rep = Report(argv, spec)
    rows = []
    for n in split_list(args.n):
        if not re.fullmatch(r"\d+", n):
            raise UsageError(f"bad cycle length {n!r}")
        m = cyclic_microstate_count(spec, int(n), args.beta)
        rows.append((m.n, m.beta, m.count, m.rate))
    rep.csv(["n", "beta", "count", "rate"], rows)
    return rep


def cmd_verify(args, argv):
    rep = Report(argv)
    try:
        certs = certificates.read(args.certificate)
    except OSError as exc:
        raise UsageError(f"cannot read {args.certificate}: {exc.strerror}") from None
    except certificates.CertificateError as exc:
        rep.json({"line": None, "ok": False, "message": str(exc)})
        rep.status = "rejected"
        rep.code = EXIT_VERIFY
        return rep
    if not certs:
        raise UsageError("no certificates in the file")
    bad = 0
    for i, c in enumerate(certs, 1):
        ok, msg = certificates.verify(c, _config(args))
        bad += not ok
        rep.json({"line": i, "ok": ok, "message": msg})
    rep.status = "all verified" if not bad else f"{bad} rejected"
    rep.code = EXIT_OK if not bad else EXIT_VERIFY
    return rep


def cmd_zoo(args, argv):
    rep = Report(argv)
    if args.action == "list":
        rep.csv(["name", "group", "summary"], [(e.name, e.spec.group.name, e.summary) for e in zoo.ZOO.values()])
    else:
        if not args.name:
            raise UsageError("zoo dump needs an entry name")
        entry = zoo.get(args.name)
        rep.meta.append(("spec_hash", specfile.spec_hash(entry.spec)))
        rep.lines.extend(specfile.dumps(entry.spec).splitlines())
    return rep


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search-node budget")
    common.add_argument("--out", help="write the results section to this file")
    common.add_argument("--cert", help="write certificates (JSON lines) to this file")
    withspec = argparse.ArgumentParser(add_help=False, parents=[common])
    withspec.add_argument("spec", nargs="?", help="subshift file, or zoo:<name>")
    withspec.add_argument("--spec", dest="spec_opt", help="subshift file, or zoo:<name>")
    leveled = argparse.ArgumentParser(add_help=False)
    leveled.add_argument("--level", default="margin:0", help="margin:<r> or exact-z")

    p = _Parser(prog="shiftlab", description="Pattern counting, splicing checks and witnesses for subshifts.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("count", parents=[withspec, leveled], help="count admissible patterns")
    s.add_argument("--F", required=True, help="supports: ball:n, box:n or set:[...], comma separated")
    s.add_argument("--method", choices=("auto", "dfs", "linear"), default="auto")
    s.set_defaults(run=cmd_count)

    s = sub.add_parser("entropy", parents=[withspec, leveled], help="pattern-count rates per window")
    s.add_argument("--windows", required=True, help="box sizes and/or descriptors, comma separated")
    s.add_argument("--oracle", action="store_true", help="add the transfer-matrix entropy (Z only)")
    s.set_defaults(run=cmd_entropy)

    s = sub.add_parser("tmp", parents=[withspec, leveled], help="memory-set check or strong scan")
    s.add_argument("--A", help="inner set")
    s.add_argument("--B", help="candidate memory set")
    s.add_argument("--window", help="window")
    s.add_argument("--margin", help="margin F for --scan (must contain the identity)")
    s.add_argument("--scan", help="inner sets to scan, comma separated")
    s.add_argument("--growth", type=int, default=1, help="window = memory set grown by B_growth")
    s.add_argument("--side", choices=("right", "left"), default="right", help="right: A·F, left: F·A")
    s.set_defaults(run=cmd_tmp)

    s = sub.add_parser("asym", parents=[withspec, leveled], help="interchangeable-pattern search")
    s.add_argument("--A", required=True)
    s.add_argument("--window", required=True)
    s.add_argument("--method", choices=("auto", "dfs", "linear"), default="auto")
    s.set_defaults(run=cmd_asym)

    s = sub.add_parser("homoclinic", parents=[withspec], help="finitely supported perturbation of a constant point")
    s.add_argument("--background", default="0", help="background symbol")
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--margin", type=int, default=None, help="default: the rule diameter")
    s.add_argument("--method", choices=("auto", "dfs", "linear"), default="auto")
    s.set_defaults(run=cmd_homoclinic)

    s = sub.add_parser("indep", parents=[withspec, leveled], help="independence density")
    s.add_argument("--symbols", help="one-site cylinders at the identity, comma separated")
    s.add_argument("--cylinder", action="append", help="cylinder as JSON [[element, symbol], ...]; repeatable")
    s.add_argument("--F", required=True, help="ambient set descriptor")
    s.set_defaults(run=cmd_indep)

    s = sub.add_parser("microstates", parents=[withspec], help="labelings of the n-cycle (Z only)")
    s.add_argument("--n", required=True, help="cycle lengths, comma separated")
    s.add_argument("--beta", type=int, default=0, help="allowed violations")
    s.set_defaults(run=cmd_microstates)

    s = sub.add_parser("verify", parents=[common], help="re-check a certificate file")
    s.add_argument("certificate")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("zoo", parents=[common], help="list or dump built-in systems")
    s.add_argument("action", choices=("list", "dump"))
    s.add_argument("name", nargs="?")
    s.set_defaults(run=cmd_zoo)
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rep = args.run(args, argv)
    except UsageError as exc:
        print(f"shiftlab: error: {exc}", file=stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"shiftlab: budget exhausted: {exc}", file=stderr)
        return EXIT_BUDGET
    except ShiftlabError as exc:
        print(f"shiftlab: error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(rep.render())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rep.results)
    if args.cert and rep.certs:
        certificates.write(args.cert, rep.certs)
    return rep.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
