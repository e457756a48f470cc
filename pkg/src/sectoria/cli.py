"""Command-line front end: ``sectoria regions|numrange|verify|euler``.

Exit codes: 0 when everything checked passes, 1 on a verification failure,
2 on a usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
from pathlib import Path
import sys
import tempfile

import numpy as np

from .errors import CertificationFailure, SectoriaError
from .numrange import DEFAULT_ANGLES, compute_hull, hull_in_region
from .regions import Family, RegionSpec, boundary_samples, check_angle, contains, parse_family
from .report import dumps, to_jsonable
from .sectorial import SectorialMatrix, random_sectorial
from .semigroup import euler_error_table
from .suite import GROUPS, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_FAMILIES = "L,Omega,Q,D,C"

_SVG_COLORS = {
    Family.LSET: "#1b9e77",
    Family.OMEGA: "#d95f02",
    Family.QSET: "#7570b3",
    Family.DSET: "#e7298a",
    Family.CSET: "#66a61e",
    Family.BSET: "#e6ab02",
    Family.UNIT_DISK: "#666666",
}


class InputError(SectoriaError, ValueError):
    """Malformed user input (files or flag values)."""


def fmt(x: float) -> str:
    """Shortest round-trip decimal form; ``-0.0`` is written as ``0.0``."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return repr(x)


# -- MatrixFile ---------------------------------------------------------------

def parse_matrix(data) -> np.ndarray:
    """Decode a MatrixFile object ``{"n": n, "entries": [[[re, im], ...], ...]}``."""
    if not isinstance(data, dict):
        raise InputError("matrix file must hold a JSON object")
    missing = {"n", "entries"} - set(data)
    if missing:
        raise InputError(f"matrix file is missing {', '.join(sorted(missing))}")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    rows = data["entries"]
    if not isinstance(rows, list) or len(rows) != n:
        raise InputError(f"entries must be a list of {n} rows")
    A = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"row {i} must hold {n} [re, im] pairs")
        for j, pair in enumerate(row):
            ok = (isinstance(pair, list) and len(pair) == 2
                  and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair))
            if not ok:
                raise InputError(f"entry ({i}, {j}) must be a [re, im] pair of numbers")
            re, im = float(pair[0]), float(pair[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise InputError(f"entry ({i}, {j}) is not finite")
            A[i, j] = complex(re, im)
    return A


def load_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_matrix(data)


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {"n": int(A.shape[0]),
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A]}


# -- output --------------------------------------------------------------------

class Outputs:
    """Write files through temporaries and publish them together.

    Nothing appears at the target paths unless every file was produced; on
    any error the temporaries are removed.
    """

    def __init__(self):
        self._pending: list = []

    def __enter__(self):
        return self

    def add(self, path, text: str) -> None:
        path = Path(path)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        self._pending.append((tmp, path))
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            for tmp, path in self._pending:
                os.replace(tmp, path)
        else:
            for tmp, _ in self._pending:
                if os.path.exists(tmp):
                    os.unlink(tmp)
        return False


def _emit(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        with Outputs() as out:
            out.add(path, text)


def _alpha(args, required: bool = True):
    if getattr(args, "alpha_deg", None) is not None:
        return check_angle(math.radians(args.alpha_deg))
    if args.alpha is None:
        if required:
            raise InputError("an angle is required (--alpha or --alpha-deg)")
        return None
    return check_angle(args.alpha)


# -- regions ---------------------------------------------------------------------

def regions_csv(boundaries: list, alpha: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "alpha", "param", "re", "im"])
    for b in boundaries:
        for p, z in zip(b.params, b.points):
            w.writerow([b.spec.family.value, fmt(alpha), fmt(p), fmt(z.real), fmt(z.imag)])
    return buf.getvalue()


def regions_svg(boundaries: list, alpha: float) -> str:
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.15 -1.15 2.3 2.3" width="600" height="600">',
        f"<title>region boundaries, alpha = {fmt(alpha)}</title>",
        '<rect x="-1.15" y="-1.15" width="2.3" height="2.3" fill="white"/>',
        '<g stroke="#bbbbbb" stroke-width="0.004">',
        '<line x1="-1.15" y1="0" x2="1.15" y2="0"/>',
        '<line x1="0" y1="-1.15" x2="0" y2="1.15"/>',
        "</g>",
    ]
    for b in boundaries:
        # SVG y grows downwards, so flip the imaginary axis
        pts = " ".join(f"{z.real:.6f},{-z.imag + 0.0:.6f}" for z in b.points)
        color = _SVG_COLORS[b.spec.family]
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="0.008" points="{pts}">'
                     f"<title>{b.spec.family.value}</title></polyline>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_regions(args) -> int:
    alpha = _alpha(args)
    families = [parse_family(f) for f in args.families.split(",") if f.strip()]
    if not families:
        raise InputError("no families given")
    if Family.SECTOR in families:
        raise InputError("the sector is unbounded and cannot be traced")
    if args.samples < 4:
        raise InputError("--samples must be at least 4")
    boundaries = []
    for fam in families:
        b = boundary_samples(RegionSpec(fam, alpha), args.samples)
        bad = ~np.asarray(contains(b.spec, b.points, tol=1e-9))
        if np.any(bad):
            z = b.points[np.argmax(bad)]
            print(f"sectoria: boundary point {z} of {b.spec} fails its own membership test", file=sys.stderr)
            return EXIT_FAIL
        boundaries.append(b)
    with Outputs() as out:
        out.add(args.out_csv, regions_csv(boundaries, alpha))
        if args.svg:
            out.add(args.svg, regions_svg(boundaries, alpha))
    return EXIT_OK


# -- numrange --------------------------------------------------------------------

def cmd_numrange(args) -> int:
    A = load_matrix(args.matrix)
    if args.angles < 3:
        raise InputError("--angles must be at least 3")
    spec = None
    if args.region:
        fam = parse_family(args.region)
        alpha = 0.0 if fam is Family.UNIT_DISK else _alpha(args)
        spec = RegionSpec(fam, alpha)
    hull = compute_hull(A, args.angles)
    report = {
        "n": A.shape[0],
        "angles": args.angles,
        "gap": hull.gap,
        "support_values": hull.support_values,
        "support_points": hull.support_points,
        "outer_vertices": hull.outer_vertices,
    }
    passed = True
    if spec is not None:
        r = hull_in_region(hull, spec, args.tol)
        report["containment"] = r
        passed = r.passed
    report["pass"] = passed
    _emit(args.out, json.dumps(to_jsonable(report)) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


# -- verify ----------------------------------------------------------------------

def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.config}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
        data.pop("out", None)
    for key in ("seed", "dims", "alphas", "trials", "angles", "instances"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    try:
        return RunConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad config: {exc}") from exc


def cmd_verify(args) -> int:
    config = build_config(args)
    groups = set(args.only) if args.only else None
    if groups and not groups <= {g.number for g in GROUPS}:
        raise InputError(f"--only takes group numbers 1..{len(GROUPS)}")
    report = run_suite(config, groups)
    summary = []
    for name, checks in report.groups().items():
        failed = sum(not c.passed for c in checks)
        vacuous = sum(c.status == "vacuous" for c in checks)
        summary.append({"group": name, "checks": len(checks), "failed": failed, "vacuous": vacuous,
                        "pass": failed == 0})
        if not args.quiet:
            verdict = "PASS" if failed == 0 else "FAIL"
            extra = f", {vacuous} vacuous" if vacuous else ""
            print(f"{verdict}  {name} ({len(checks)} checks, {failed} failed{extra})", file=sys.stderr)
    doc = {"pass": report.passed, "config": config.to_dict(), "summary": summary,
           "checks": report.to_dict()["checks"]}
    if args.out:
        _emit(args.out, dumps(doc))
    return EXIT_OK if report.passed else EXIT_FAIL


# -- euler -----------------------------------------------------------------------

def euler_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "error", "bound", "ratio"])
    for r in report.rows:
        w.writerow([r.n, fmt(r.error), fmt(r.bound), fmt(r.ratio)])
    w.writerow(["slope", fmt(report.slope), "", ""])
    return buf.getvalue()


def cmd_euler(args) -> int:
    alpha = _alpha(args)
    if args.t < 0 or not math.isfinite(args.t):
        raise InputError("--t must be a finite non-negative number")
    if not 1 <= args.nmin <= args.nmax:
        raise InputError("need 1 <= --nmin <= --nmax")
    if args.matrix:
        try:
            Sm = SectorialMatrix.certify(load_matrix(args.matrix), alpha)
        except CertificationFailure as exc:
            raise InputError(str(exc)) from exc
    else:
        if args.dim < 1:
            raise InputError("--dim must be positive")
        Sm = random_sectorial(args.dim, alpha, args.seed)
    if args.powers_of_two:
        ns = [2**k for k in range(args.nmax.bit_length()) if args.nmin <= 2**k <= args.nmax]
        if not ns:
            raise InputError("no power of two lies in [--nmin, --nmax]")
    else:
        ns = range(args.nmin, args.nmax + 1)
    report = euler_error_table(Sm, args.t, ns)
    for r in report.rows:
        if not (math.isfinite(r.error) and r.error >= 0 and math.isfinite(r.ratio)):
            print(f"sectoria: non-finite Euler error at n = {r.n}", file=sys.stderr)
            return EXIT_FAIL
    _emit(args.out, euler_csv(report))
    return EXIT_OK if report.passed else EXIT_FAIL


# -- argument parsing -------------------------------------------------------------

def _add_alpha(p, help_text="semi-angle in radians, 0 <= alpha < pi/2"):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float, help=help_text)
    g.add_argument("--alpha-deg", type=float, help="semi-angle in degrees")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sectoria", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regions", help="boundary traces of the region family (CSV, optional SVG)")
    _add_alpha(p)
    p.add_argument("--families", default=DEFAULT_FAMILIES, help=f"comma-separated (default {DEFAULT_FAMILIES})")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("numrange", help="certified enclosure of W(A) for a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--angles", type=int, default=DEFAULT_ANGLES)
    p.add_argument("--region", help="region to test containment against")
    _add_alpha(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", help="report path (default stdout)")
    p.set_defaults(func=cmd_numrange)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--config", help="JSON file with run configuration keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--alphas", type=_float_list)
    p.add_argument("--trials", type=int)
    p.add_argument("--angles", type=int)
    p.add_argument("--instances", type=int)
    p.add_argument("--only", type=_int_list, help="run only these group numbers")
    p.add_argument("--out", help="JSON report path ('-' for stdout)")
    p.add_argument("--quiet", action="store_true", help="no per-group summary on stderr")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("euler", help="Euler approximation error table (CSV)")
    p.add_argument("--dim", type=int, default=4)
    _add_alpha(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, default=1024)
    p.add_argument("--powers-of-two", action="store_true", help="only n = 2^k")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--matrix", help="use this MatrixFile instead of a random generator")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_euler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"sectoria: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sectoria: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationFailure as exc:
        print(f"sectoria: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
