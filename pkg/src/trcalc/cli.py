"""Command-line front end.

Subcommands:

  trcalc chart {tr,filtration,gr,theorem1,mackey,e3alg,r1} ...
      closed-form charts as JSON/CSV/ASCII tables
  trcalc descent verify ...
      run the exact dimension-0 Witt row and the symbolic page-2 engine,
      compare against the oracle charts; exit 0 iff every cell passes
  trcalc golden {record,check} --path DIR
      write / re-verify the built-in golden chart suite byte-for-byte

Exit codes: 0 success, 1 verification failure, 2 usage error.  The env var
TRCALC_THREADS (positive integer) caps the fan-out over independent
multidegree jobs.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import cobar, oracle, reps, witt
from .chartfile import ChartFile
from .cobar import CollapseViolation


class UsageError(Exception):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _threads() -> int:
    raw = os.environ.get("TRCALC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"TRCALC_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("TRCALC_THREADS must be >= 1")
    return n


def _validate_common(args) -> None:
    if not _is_prime(args.p):
        raise UsageError(f"--p must be prime, got {args.p}")
    if args.r < 1:
        raise UsageError("--r must be >= 1")


def _emit(cf: ChartFile, fmt: str, out: str | None) -> None:
    cf.finalize()
    if fmt == "json":
        text = cf.to_json()
    elif fmt == "csv":
        text = cf.to_csv()
    elif fmt == "ascii":
        text = cf.to_ascii()
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _multidegrees(nvars: int, max_weight: int):
    if nvars == 0:
        yield ()
        return
    for first in range(max_weight + 1):
        for rest in _multidegrees(nvars - 1, max_weight - first):
            yield (first,) + rest


# --------------------------------------------------------------------------
# chart
# --------------------------------------------------------------------------


def cmd_chart(args) -> int:
    _validate_common(args)
    if args.max_dim < 0 or args.max_weight < 0:
        raise UsageError("window bounds must be >= 0")
    p, r, nv = args.p, args.r, args.vars
    spec = {
        "subcommand": f"chart {args.target}",
        "p": p,
        "r": r,
        "vars": nv,
        "max_weight": args.max_weight,
        "max_dim": args.max_dim,
    }
    cf = ChartFile(spec=spec, engine="oracle")

    if args.target == "mackey":
        for dim in range(0, args.max_dim + 1, 2):
            mc = reps.w_mackey(r, dim, p)
            if not mc.check_relations():
                raise AssertionError("Mackey relations failed")
            for level in range(1, r + 1):
                labels = []
                if level < r:
                    labels.append(f"res{level + 1}->{level}=1")
                    labels.append(f"tr{level}->{level + 1}={p}")
                cf.add_cell((level,), dim, mc.groups[level].exponents, labels)
        spec["levels"] = r
        _emit(cf, args.format, args.out)
        return 0

    if args.target == "e3alg":
        dmax = args.denom_max
        if dmax < 0:
            raise UsageError("--denom-max must be >= 0")
        spec["denom_max"] = dmax
        den = p**dmax
        for ell in range(0, args.max_dim // 2 + 1):
            for num in range(0, (args.max_weight) * den + 1):
                s = Fraction(num, den)
                e = oracle.e3alg_chart(p, r, ell, s)
                if e:
                    cf.add_cell((num,), 2 * ell, (e,), (f"z{ell}^({num}/{p}^{dmax})",))
        _emit(cf, args.format, args.out)
        return 0

    def cell_fn(deg, n):
        if args.target == "tr":
            return oracle.tr_chart(p, r, nv, deg, n), oracle.tr_labels(p, r, nv, deg, n)
        if args.target == "filtration":
            return oracle.filtration_chart(p, r, nv, args.i, deg, n), ()
        if args.target == "gr":
            return oracle.gr_chart(p, r, nv, args.i, deg, n), ()
        if args.target == "theorem1":
            if nv != 1:
                raise UsageError("theorem1 charts are one-variable")
            return oracle.theorem1_chart(p, r, args.i, deg[0], n), ()
        if args.target == "r1":
            if r != 1:
                raise UsageError("r1 charts need --r 1")
            return oracle.r1_chart(p, deg[0] if deg else 0, n), ()
        raise UsageError(f"unknown chart target {args.target!r}")

    if args.target in ("filtration", "gr", "theorem1"):
        spec["i"] = args.i

    degs = list(_multidegrees(nv, args.max_weight))

    def build(deg):
        out = []
        for n in range(args.max_dim + 1):
            g, labels = cell_fn(deg, n)
            if not g.is_trivial:
                out.append((deg, n, g.exponents, labels))
        return out

    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        for rows in ex.map(build, degs):
            for deg, n, exps, labels in rows:
                cf.add_cell(deg, n, exps, labels)
    _emit(cf, args.format, args.out)
    return 0


# --------------------------------------------------------------------------
# descent
# --------------------------------------------------------------------------


def _descent_one(p, r, deg, kmax, denom, max_dim):
    """Verify one multidegree; returns (cells, ok)."""
    cells = []
    ok = True
    nvars = len(deg)
    if nvars == 1:
        d = deg[0]
        c = cobar.dim0_complex(p, r, d, kmax, denom)
        h = c.homology_all()
        expected0 = oracle.tr_chart(p, r, 1, deg, 0)
        for k, g in enumerate(h):
            good = (g == expected0) if k == 0 else g.is_trivial
            ok &= good
            cells.append(
                {
                    "deg": list(deg),
                    "dim": -k,
                    "exps": list(g.exponents),
                    "labels": [f"H^{k}(witt-row)", "ok" if good else "FAIL"],
                }
            )
    try:
        page = cobar.multivar_e2(p, r, deg, (0, max_dim))
        report = cobar.compare(page, p, r, deg, (0, max_dim))
    except CollapseViolation as exc:
        cells.append(
            {"deg": list(deg), "dim": 0, "exps": [], "labels": ["collapse-violation", str(exc)]}
        )
        return cells, False
    ok &= report.ok
    for c in report.cells:
        cells.append(
            {
                "deg": list(c.deg),
                "dim": c.dim,
                "exps": list(c.got),
                "labels": ["ok" if c.ok else f"FAIL expected {list(c.expected)}"],
            }
        )
    return cells, ok


def cmd_descent(args) -> int:
    _validate_common(args)
    if args.weight is not None and args.deg is not None:
        raise UsageError("give either --weight or --deg, not both")
    if args.weight is not None:
        degs = [(args.weight,)]
    elif args.deg is not None:
        try:
            degs = [tuple(int(x) for x in args.deg.split(","))]
        except ValueError as exc:
            raise UsageError("--deg must be a comma-separated integer list") from exc
    else:
        raise UsageError("descent verify needs --weight or --deg")
    if any(x < 0 for x in degs[0]):
        raise UsageError("weights must be >= 0")
    denom = args.denom if args.denom is not None else args.r - 1
    if denom < args.r - 1:
        raise UsageError("--denom must be >= r-1")
    kmax = args.kmax if args.kmax is not None else sum(degs[0]) + 2
    if kmax < 1:
        raise UsageError("--kmax must be >= 1")
    max_dim = args.max_dim if args.max_dim is not None else 2 * sum(degs[0]) + 4

    spec = {
        "subcommand": "descent verify",
        "p": args.p,
        "r": args.r,
        "deg": list(degs[0]),
        "kmax": kmax,
        "denom": denom,
        "max_dim": max_dim,
    }
    cf = ChartFile(spec=spec, engine="compare")
    all_ok = True
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        for cells, ok in ex.map(
            lambda deg: _descent_one(args.p, args.r, deg, kmax, denom, max_dim), degs
        ):
            all_ok &= ok
            for c in cells:
                cf.add_cell(c["deg"], c["dim"], c["exps"], c["labels"])
    _emit(cf, args.format, args.out)
    if not all_ok:
        failing = [c for c in cf.cells if any(l.startswith(("FAIL", "collapse")) for l in c["labels"])]
        print(f"descent verify: {len(failing)} failing cells", file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------
# golden
# --------------------------------------------------------------------------


def _golden_jobs() -> list[tuple[str, list[str]]]:
    """The built-in deterministic golden suite (name, argv)."""
    return [
        ("chart_tr_p2_r3", ["chart", "tr", "--p", "2", "--r", "3", "--vars", "1",
                            "--max-weight", "8", "--max-dim", "12"]),
        ("chart_tr_p3_r1", ["chart", "tr", "--p", "3", "--r", "1", "--vars", "1",
                            "--max-weight", "6", "--max-dim", "8"]),
        ("chart_tr_p2_r2_vars2", ["chart", "tr", "--p", "2", "--r", "2", "--vars", "2",
                                  "--max-weight", "4", "--max-dim", "8"]),
        ("chart_filtration_p2_r2_i2", ["chart", "filtration", "--p", "2", "--r", "2",
                                       "--vars", "1", "--i", "2", "--max-weight", "6",
                                       "--max-dim", "10"]),
        ("chart_mackey_r4", ["chart", "mackey", "--p", "2", "--r", "4", "--max-dim", "4"]),
        ("chart_e3alg_p2_r3", ["chart", "e3alg", "--p", "2", "--r", "3", "--max-weight", "3",
                               "--max-dim", "8", "--denom-max", "2"]),
        ("descent_p2_r2_w3_N1", ["descent", "verify", "--p", "2", "--r", "2", "--weight", "3",
                                 "--kmax", "5", "--denom", "1", "--max-dim", "10"]),
        ("descent_p2_r2_w3_N2", ["descent", "verify", "--p", "2", "--r", "2", "--weight", "3",
                                 "--kmax", "5", "--denom", "2", "--max-dim", "10"]),
    ]


def cmd_golden(args) -> int:
    path = Path(args.path)
    if args.mode == "record":
        path.mkdir(parents=True, exist_ok=True)
    if not path.is_dir():
        raise UsageError(f"golden path {path} is not a directory")
    bad = []
    for name, argv in _golden_jobs():
        target = path / f"{name}.json"
        tmp = path / f".{name}.json.tmp"
        code = main(argv + ["--format", "json", "--out", str(tmp)])
        if code not in (0, 1):
            raise UsageError(f"golden job {name} failed to run")
        text = tmp.read_text()
        tmp.unlink()
        if args.mode == "record":
            target.write_text(text)
        else:
            if not target.exists():
                bad.append((name, "missing golden file"))
                continue
            want = target.read_text()
            if want != text:
                # locate the first differing cell for the diff listing
                try:
                    a = ChartFile.from_json(want).cells
                    b = ChartFile.from_json(text).cells
                    diff = [c for c in a if c not in b] + [c for c in b if c not in a]
                    bad.append((name, f"{len(diff)} differing cells: {diff[:4]}"))
                except Exception:
                    bad.append((name, "byte mismatch"))
    if args.mode == "check" and bad:
        for name, msg in bad:
            print(f"golden mismatch [{name}]: {msg}", file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trcalc", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    chart = sub.add_parser("chart", help="closed-form coefficient charts")
    chart.add_argument("target", choices=["tr", "filtration", "gr", "theorem1",
                                          "mackey", "e3alg", "r1"])
    chart.add_argument("--p", type=int, required=True)
    chart.add_argument("--r", type=int, required=True)
    chart.add_argument("--vars", type=int, default=1)
    chart.add_argument("--max-weight", type=int, default=6)
    chart.add_argument("--max-dim", type=int, default=10)
    chart.add_argument("--i", type=int, default=0, help="filtration index")
    chart.add_argument("--denom-max", type=int, default=2,
                       help="e3alg: largest denominator exponent")
    chart.add_argument("--format", choices=["json", "csv", "ascii"], default="json")
    chart.add_argument("--out", default=None)
    chart.set_defaults(func=cmd_chart)

    descent = sub.add_parser("descent", help="descent spectral sequence verification")
    dsub = descent.add_subparsers(dest="descent_mode", required=True)
    verify = dsub.add_parser("verify")
    verify.add_argument("--p", type=int, required=True)
    verify.add_argument("--r", type=int, required=True)
    verify.add_argument("--weight", type=int, default=None)
    verify.add_argument("--deg", type=str, default=None,
                        help="comma-separated multidegree (several variables)")
    verify.add_argument("--kmax", type=int, default=None)
    verify.add_argument("--denom", type=int, default=None,
                        help="denominator level N (default r-1)")
    verify.add_argument("--max-dim", type=int, default=None)
    verify.add_argument("--format", choices=["json", "csv", "ascii"], default="json")
    verify.add_argument("--out", default=None)
    verify.set_defaults(func=cmd_descent)

    golden = sub.add_parser("golden", help="golden-file regression suite")
    golden.add_argument("mode", choices=["record", "check"])
    golden.add_argument("--path", required=True)
    golden.add_argument("--format", choices=["json"], default="json")
    golden.add_argument("--out", default=None)
    golden.set_defaults(func=cmd_golden)

    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
