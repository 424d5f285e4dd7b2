"""Command-line interface: dimensions, bases, splits, lifts, operators, verification.

Exit codes: 0 success, 1 computational failure or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .exterior_poly import InvalidDescriptor, PolyForm, check_range
from .gmt import (
    GradeRange,
    HodgeTuple,
    PreconditionError,
    lift_hodge_tuple,
    mt_dim_formula,
    mt_space,
    phi_split,
)
from .linalg import DimensionCapExceeded, set_dimension_cap
from .operators import d, dstar, laplacian
from .spaces import (
    harmonic_kernel,
    hodge_dim_formula,
    hodge_space,
    uvw_decomposition,
)
from .verify import resolve_suite, run_suite

OPS = {"d": d, "dstar": dstar, "laplacian": laplacian}
SPACES = ("hodge", "mt", "kerdelta", "U", "V", "W")


class UsageError(Exception):
    pass


def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _read_json(path: str | None):
    if path is None:
        raise UsageError("--input is required")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _single_or_range(args) -> str:
    """'s' for a single grade, 'range' for (r,p,q); exactly one must be given."""
    has_s = args.s is not None
    has_rng = any(getattr(args, n) is not None for n in ("r", "p", "q"))
    if has_s and has_rng:
        raise UsageError("give either --s or --r/--p/--q, not both")
    if has_s:
        return "s"
    if has_rng:
        _need(args, "r", "p", "q")
        return "range"
    raise UsageError("give --s or --r/--p/--q")


def _check_mk(args) -> None:
    _need(args, "m", "k")
    if args.m < 1 or args.k < 0:
        raise InvalidDescriptor(f"need m >= 1 and k >= 0, got m={args.m}, k={args.k}")


def _check_s(m: int, s: int) -> None:
    if not 0 <= s <= m:
        raise InvalidDescriptor(f"grade s={s} outside 0..{m}")


# ---------------------------------------------------------------------------
# commands


def cmd_dims(args) -> int:
    _check_mk(args)
    m, k = args.m, args.k
    if _single_or_range(args) == "s":
        _check_s(m, args.s)
        label = f"H^{args.s}_{k}(R^{m})"
        formula = hodge_dim_formula(k, m, args.s)
        computed = (lambda: hodge_space(m, k, args.s).dim)
    else:
        check_range(m, args.r, args.p, args.q)
        rng = GradeRange(args.r, args.p, args.q)
        label = f"MT^({args.r},{args.p},{args.q})_{k}(R^{m})"
        formula = mt_dim_formula(k, m, rng)
        computed = (lambda: mt_space(m, k, rng).dim)
    if not args.both:
        print(f"{label}\t{formula}")
        return 0
    rank = computed()
    flag = "match" if rank == formula else "MISMATCH"
    print(f"{label}\tformula {formula}\trank {rank}\t{flag}")
    return 0 if rank == formula else 1


def cmd_basis(args) -> int:
    _check_mk(args)
    m, k = args.m, args.k
    kind = args.space
    if kind == "mt":
        if _single_or_range(args) != "range":
            raise UsageError("--space mt needs --r/--p/--q")
        sub = mt_space(m, k, GradeRange(args.r, args.p, args.q))
    else:
        if _single_or_range(args) != "s":
            raise UsageError(f"--space {kind} needs --s")
        _check_s(m, args.s)
        if kind == "hodge":
            sub = hodge_space(m, k, args.s)
        elif kind == "kerdelta":
            sub = harmonic_kernel(m, k, args.s)
        else:
            sub = getattr(uvw_decomposition(m, k, args.s), kind.lower())
    _write(_dump(sub.to_json()), args.out)
    if args.out not in (None, "-"):
        print(f"{kind}\tdim {sub.dim}\t{args.out}", file=sys.stderr)
    return 0


def _range_for(args, data) -> GradeRange:
    if any(getattr(args, n) is not None for n in ("r", "p", "q")):
        _need(args, "r", "p", "q")
        return GradeRange(args.r, args.p, args.q)
    if isinstance(data, dict) and "range" in data:
        return GradeRange.from_json(data["range"])
    raise UsageError("grade range missing: give --r/--p/--q or a 'range' entry in the input")


def _form_from(data) -> PolyForm:
    if isinstance(data, dict) and "form" in data:
        data = data["form"]
    try:
        return PolyForm.from_json(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"input is not a form: {exc}") from None


def cmd_split(args) -> int:
    data = _read_json(args.input)
    f = _form_from(data)
    rng = _range_for(args, data).check(f.m)
    kernel_part, image_part = phi_split(f, rng)
    out = {
        "range": rng.to_json(),
        "kernel_part": [
            {"grade": g, "form": c.to_json()} for g, c in zip(rng.grades, kernel_part)
        ],
        "image_part": image_part.to_json(),
    }
    _write(_dump(out), args.out)
    return 0


def cmd_lift(args) -> int:
    data = _read_json(args.input)
    if isinstance(data, dict) and "image_part" in data:
        data = data["image_part"]
    try:
        t = HodgeTuple.from_json(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"input is not a Hodge tuple: {exc}") from None
    lifted = lift_hodge_tuple(t)
    if args.with_kernel:
        parent = _read_json(args.input)
        for part in parent.get("kernel_part", ()):
            lifted = lifted + PolyForm.from_json(part["form"])
    _write(_dump(lifted.to_json()), args.out)
    return 0


def cmd_apply(args) -> int:
    f = _form_from(_read_json(args.input))
    for name in args.op or ():
        f = OPS[name](f)
    _write(_dump(f.to_json()), args.out)
    return 0


def cmd_verify(args) -> int:
    try:
        resolve_suite(args.suite)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    for name in ("m_max", "k_max", "m_min", "samples", "threads"):
        v = getattr(args, name)
        if v is not None and v < (1 if name in ("threads", "m_min", "m_max") else 0):
            raise UsageError(f"--{name.replace('_', '-')} out of range: {v}")
    report = run_suite(
        args.suite,
        m_max=args.m_max,
        k_max=args.k_max,
        m_min=args.m_min,
        seed=args.seed,
        samples=args.samples,
        threads=args.threads,
    )
    text = report.to_csv() if args.format == "csv" else report.to_json()
    _write(text, args.out)
    summ = report.summary
    print(
        "suite {}: {} checks, {} pass, {} fail, {} skip".format(
            args.suite, summ["total"], summ["pass"], summ["fail"], summ["skip"]
        ),
        file=sys.stderr,
    )
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _add_params(p, rng=True):
    p.add_argument("--m", type=int, help="ambient dimension")
    p.add_argument("--k", type=int, help="homogeneity degree")
    p.add_argument("--s", type=int, help="form grade")
    if rng:
        p.add_argument("--r", type=int)
        p.add_argument("--p", type=int)
        p.add_argument("--q", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgepoly",
        description="Exact polynomial solutions of Hodge-de Rham and Moisil-Theodoresco systems.",
    )
    parser.add_argument("--dim-cap", type=int, default=None, help="ambient-dimension cap")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="dimension of H^s_k or MT^(r,p,q)_k")
    _add_params(p)
    p.add_argument("--both", action="store_true", help="also compute the rank and compare")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("basis", help="write a canonical basis as JSON")
    _add_params(p)
    p.add_argument("--space", required=True, choices=SPACES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("split", help="split an MT element into kernel and image parts")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--r", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("lift", help="lift a Hodge tuple to an MT element")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument(
        "--with-kernel",
        action="store_true",
        help="for split output: add the kernel part back, reassembling the original form",
    )
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("apply", help="apply d, dstar or laplacian (repeatable, in order)")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--op", action="append", choices=sorted(OPS))
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--threads", type=int, help="worker processes (default: HODGEPOLY_THREADS or CPU count)")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.dim_cap is not None:
        set_dimension_cap(args.dim_cap)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except InvalidDescriptor as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return 2
    except DimensionCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        if args.dim_cap is not None:
            set_dimension_cap(None)


if __name__ == "__main__":
    sys.exit(main())
