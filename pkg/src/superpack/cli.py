"""Command-line interface: ``superpack <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 verification or
certification failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import certifier, family, lattice, optimizer, reference
from .errors import SolverError

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_NUMERIC = 0, 1, 2, 3
GRID_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(v):
    """Round floats (also inside lists/dicts) to 12 significant digits."""
    if isinstance(v, float):
        return float(f"{v:.12g}") if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_g(x) for x in v]
    if isinstance(v, dict):
        return {k: _g(x) for k, x in v.items()}
    return v


def parse_grid(text: str) -> list[float]:
    """``start:step:end`` (end included when on the grid) or a single value.

    A comma-separated list of values is accepted too.
    """
    text = text.strip()
    try:
        if ":" not in text:
            return [float(t) for t in text.split(",") if t.strip()]
        parts = [float(t) for t in text.split(":")]
    except ValueError:
        raise UsageError(f"malformed p grid {text!r}") from None
    if len(parts) != 3:
        raise UsageError(f"p grid needs start:step:end, got {text!r}")
    start, step, end = parts
    if not step > 0 or end < start:
        raise UsageError(f"p grid {text!r} needs step > 0 and end >= start")
    n = (end - start) / step
    k = int(math.floor(n + GRID_TOL))
    vals = [round(start + i * step, 12) for i in range(k + 1)]
    if abs(n - round(n)) * step <= GRID_TOL:
        vals[-1] = end
    return vals


def _single_p(args, file_p):
    if args.p is not None:
        ps = parse_grid(args.p)
        if len(ps) != 1:
            raise UsageError("this command takes a single p")
        return ps[0]
    if file_p is None:
        raise UsageError("no p given (use --p or a basis file with a 'p' field)")
    return file_p


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load(path):
    try:
        return lattice.load_basis(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# commands ------------------------------------------------------------------


def cmd_density(args) -> int:
    B, fp = _load(args.file)
    p = _single_p(args, fp)
    rep = lattice.verify_packing(B, p, args.tol)
    out = {
        "density": lattice.density(B, p),
        "det": abs(B.det),
        "neighbors": lattice.count_neighbors(B, p, args.tol),
        "verified": rep.is_packing,
    }
    _emit(json.dumps(_g(out), indent=2), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    B, fp = _load(args.file)
    p = _single_p(args, fp)
    rep = lattice.verify_packing(B, p, args.tol)
    out = {"p": p, **rep.to_dict(), "neighbors": lattice.count_neighbors(B, p, args.tol)}
    _emit(json.dumps(_g(out), indent=2), args.out)
    return EXIT_OK if rep.is_packing else EXIT_FAIL


def cmd_search(args) -> int:
    if args.p is None:
        raise UsageError("search needs --p")
    p = _single_p(args, None)
    cfg = optimizer.SearchConfig(
        restarts=args.restarts,
        seed=args.seed,
        newton_tol=args.tol if args.tol_given else optimizer.SearchConfig.newton_tol,
        jobs=args.jobs,
    )
    found = optimizer.random_search(args.case, p, cfg)
    _emit(optimizer.results_to_json(found), args.out)
    if not found:
        print("no verified packing lattice found", file=sys.stderr)
    return EXIT_OK


def cmd_family(args) -> int:
    ps = parse_grid(args.p or "1:0.1:1.5")
    rows = family.family_table(ps, neighbor_tol=args.tol)
    _emit(family.table_to_csv(rows), args.out)
    bad = [r for r in rows if not r.ok]
    for r in bad:
        print(f"p={r.p:.12g}: {r.error}", file=sys.stderr)
    return EXIT_NUMERIC if bad else EXIT_OK


def _auto_entries(args):
    if args.p:
        parts = args.p.split(":")
        if len(parts) != 3:
            raise UsageError("--auto takes --p start:step:end")
        try:
            start, step, end = (float(t) for t in parts)
        except ValueError:
            raise UsageError(f"malformed p grid {args.p!r}") from None
    else:
        start, step, end = 1.0, 0.01, certifier.P_COVER_END
    try:
        res = certifier.auto_schedule(start, end, step, allow_beyond=args.allow_beyond)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not res.complete:
        print(f"auto schedule reached p = {res.reached:.12g} of {end:.12g}", file=sys.stderr)
    return res.entries, res.complete


def cmd_certify(args) -> int:
    complete = True
    if args.auto and args.schedule:
        raise UsageError("--auto and --schedule are exclusive")
    if args.auto:
        entries, complete = _auto_entries(args)
    elif args.schedule:
        try:
            entries = certifier.read_schedule(args.schedule)
        except OSError as exc:
            raise UsageError(f"cannot read {args.schedule}: {exc.strerror}") from None
        except ValueError as exc:
            raise UsageError(f"{args.schedule}: {exc}") from None
    else:
        entries = certifier.appendix_schedule()
    if not entries:
        raise UsageError("empty schedule")
    try:
        chain = certifier.certify_schedule(entries, jobs=args.jobs)
        rows, ok, msg = chain.rows, True, None
    except certifier.CertificationError as exc:
        rows, ok, msg = exc.rows, False, str(exc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = certifier.certificate_lines(rows)
    _emit("\n".join(lines), args.out)
    summary = json.loads(lines[-1])
    if msg:
        print(msg, file=sys.stderr)
    if summary["covered"]:
        a, b = summary["covered"]
        print(
            f"covered [{a:.12g}, {b:.12g}] with {len(rows)} rows; "
            "each passing row gives a solution unique in the ball B(center, eps)",
            file=sys.stderr,
        )
    return EXIT_OK if ok and complete else EXIT_FAIL


def _regime_rows(regime: int):
    if regime == 1:
        ps = sorted(reference.FAMILY_DENSITY)
        rows = family.family_table(ps)
        for r in rows:
            yield {
                "p": r.p,
                "density": r.density,
                "published": reference.FAMILY_DENSITY[r.p],
                "prior": reference.O1_DENSITY[r.p],
                "neighbors": r.neighbors,
            }
    else:
        end = family.family_table([reference.LOG2_3])[0]
        yield {
            "p": reference.LOG2_3,
            "density": end.density,
            "published": reference.CASE_I_DENSITY[reference.LOG2_3],
            "prior": reference.O0_DENSITY[reference.LOG2_3],
            "neighbors": end.neighbors,
        }
        for p in sorted(reference.CASE_I_BASES):
            B = reference.table_basis(p)
            rep = lattice.verify_packing(B, p, lattice.TABLE_TOL)
            yield {
                "p": p,
                "density": lattice.density(B, p) if rep.is_packing else None,
                "published": reference.CASE_I_DENSITY[p],
                "prior": reference.O0_DENSITY[p],
                "neighbors": lattice.count_neighbors(B, p, lattice.TABLE_TOL),
            }


def cmd_table(args) -> int:
    fields = ("p", "density", "published", "prior", "neighbors")
    lines = [",".join(fields)]
    ok = True
    for rec in _regime_rows(args.regime):
        ok &= rec["density"] is not None
        lines.append(
            ",".join(
                "" if rec[f] is None else (str(rec[f]) if isinstance(rec[f], int) else f"{rec[f]:.12g}")
                for f in fields
            )
        )
    _emit("\n".join(lines), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="superpack", description="Lattice packings of 3D superballs.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def common(sp, tol_default):
        sp.add_argument("--p", help="exponent, or grid start:step:end")
        sp.add_argument("--tol", type=float, default=None, help=f"tolerance (default {tol_default:g})")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.set_defaults(tol_default=tol_default)

    for name, help_ in (("density", "density, |det| and neighbors of a basis"),
                        ("verify", "decide whether a basis is a packing lattice")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="basis file (JSON or 9 floats)")
        common(sp, lattice.DEFAULT_TOL)

    sp = sub.add_parser("search", help="random-restart Newton search")
    common(sp, optimizer.SearchConfig.newton_tol)
    sp.add_argument("--case", choices=("1", "2", "3"), default="3")
    sp.add_argument("--restarts", type=int, default=optimizer.SearchConfig.restarts)
    sp.add_argument("--seed", type=int, default=optimizer.DEFAULT_SEED)
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("family", help="family table as CSV")
    common(sp, lattice.DEFAULT_TOL)

    sp = sub.add_parser("certify", help="interval certificate of the family")
    common(sp, 0.0)
    sp.add_argument("--schedule", help="CSV p0,x0,y0,z0,eps,peps (default: built-in)")
    sp.add_argument("--auto", action="store_true", help="generate the schedule adaptively")
    sp.add_argument("--allow-beyond", action="store_true", help="let --auto go past p = 1.58")
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("table", help="density table for regime 1 or 2")
    sp.add_argument("--regime", type=int, choices=(1, 2), default=1)
    sp.add_argument("--out")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "tol"):
        args.tol_given = args.tol is not None
        if args.tol is None:
            args.tol = args.tol_default
    if getattr(args, "jobs", 1) < 1 or getattr(args, "restarts", 1) < 1:
        print("superpack: error: --jobs and --restarts must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    handler = globals()[f"cmd_{args.command}"]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"superpack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"superpack: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # malformed input: parse errors, singular bases, bad tolerances
        print(f"superpack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
