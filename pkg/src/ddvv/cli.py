"""Command-line driver.

Exit codes: 0 ok / inequality holds, 1 internal error or failed check,
2 bad input.

CSV written by ``search`` has the columns
    trial, seed, ratio, defect, kind
where ``ratio`` is lhs/bound of the trial's final tuple, ``defect`` is
bound - lhs and ``kind`` is the equality classification at --tol.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import __version__
from .documents import DocumentError, dumps, finite, load, shape_document, tuple_document
from .geometry import (
    DomainError,
    ShapeOperatorSet,
    curvature_report,
    ellipse_circle_test,
    equality_shape_ops,
)
from .inequality import defect
from .matrix_core import (
    DimensionError,
    GroupElement,
    MatrixTuple,
    SymmetryClass,
    ValidationError,
    act,
    norm_sum,
    random_group_element,
    random_orthogonal,
)
from .normal_form import (
    detect,
    detect_shape_equality,
    make_skew_quaternionic,
    make_skew_triple3,
    make_symmetric_pair,
)
from .search import SearchConfig, ascend_ratio, fuzz_inequality, fuzz_samples, trial_rng
from .translation import (
    SimplexConfig,
    SimplexRegion,
    g_epsilon_member,
    simplex_max,
    spectral_frame,
    sym_basis,
    translation_check,
    f_eval,
    vectorize,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CSV_COLUMNS = ["trial", "seed", "ratio", "defect", "kind"]


class InputError(Exception):
    pass


def _report(args, results: dict, digest: str | None = None) -> dict:
    return {
        "command": args.command,
        "argv": list(args.argv),
        "input_digest": digest,
        "tool_version": __version__,
        "seed": args.seed,
        "tolerances": {"tol": args.tol},
        "results": results,
    }


def _flatten(prefix: str, obj, out: list[str]):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else k, obj[k], out)
    else:
        out.append(f"{prefix}: {obj}")


def _emit(args, report: dict, rows: list[dict] | None = None):
    report = finite(report)
    if args.output == "json":
        sys.stdout.write(dumps(report))
    elif args.output == "csv" and rows is not None:
        sys.stdout.write(_csv_text(rows))
    else:
        lines: list[str] = []
        _flatten("", report, lines)
        sys.stdout.write("\n".join(lines) + "\n")


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _load_kind(path, kind: str):
    try:
        obj, digest = load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except DocumentError as exc:
        raise InputError(str(exc)) from exc
    want = MatrixTuple if kind == "tuple" else ShapeOperatorSet
    if not isinstance(obj, want):
        raise InputError(f"{path}: expected a {kind!r} document")
    return obj, digest


# --- subcommands -------------------------------------------------------------------


def cmd_check(args) -> int:
    t, digest = _load_kind(args.input, "tuple")
    rep = defect(t)
    holds = rep.defect >= -args.tol * max(1.0, rep.bound)
    results = rep.as_dict() | {"holds": holds}
    _emit(args, _report(args, results, digest))
    return EXIT_OK if holds else EXIT_FAIL


def cmd_geom(args) -> int:
    s, digest = _load_kind(args.input, "shape_ops")
    if s.n < 2:
        raise InputError("curvature quantities need n >= 2")
    rep = curvature_report(s)
    results = rep.as_dict()
    holds = rep.wintgen_defect >= -args.tol * rep.scale
    results["holds"] = holds
    if s.n == 2:
        results["ellipse_is_circle"] = ellipse_circle_test(s, args.tol)
    _emit(args, _report(args, results, digest))
    return EXIT_OK if holds else EXIT_FAIL


def cmd_translate(args) -> int:
    t, digest = _load_kind(args.input, "tuple")
    if t.symmetry is not SymmetryClass.SYMMETRIC:
        raise InputError("translate needs a symmetric tuple")
    v = vectorize(t)
    fr = spectral_frame(v)
    r1, r2 = translation_check(t)
    ns = norm_sum(t)
    limit = 1e-8 * (1.0 + ns * ns)
    results = {
        "B": v.B.tolist(),
        "spectrum": fr.x.tolist(),
        "Q": fr.Q.tolist(),
        "residual_norm": r1,
        "residual_comm": r2,
        "f_value": f_eval(fr.Q, fr.x, v.basis),
        "ok": r1 <= limit and r2 <= limit,
    }
    _emit(args, _report(args, results, digest))
    return EXIT_OK if results["ok"] else EXIT_FAIL


def cmd_normal_form(args) -> int:
    obj, digest = load_any(args.input)
    if isinstance(obj, ShapeOperatorSet):
        res, lams = detect_shape_equality(obj, args.tol)
        results = res.as_dict() | {"lambda1": lams[0], "lambda2": lams[1], "lambda3": lams[2]}
    else:
        if obj.symmetry is SymmetryClass.SKEW and obj.n < 3:
            raise InputError("skew normal forms need n >= 3")
        results = detect(obj, args.tol).as_dict()
    _emit(args, _report(args, results, digest))
    return EXIT_OK


def load_any(path):
    try:
        return load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except DocumentError as exc:
        raise InputError(str(exc)) from exc


def _row(trial: int, seed: int, t: MatrixTuple, tol: float) -> dict:
    rep = defect(t)
    kind = detect(t, tol).kind.value if (t.symmetry is SymmetryClass.SYMMETRIC or t.n >= 3) else "NotEquality"
    return {"trial": trial, "seed": seed, "ratio": rep.ratio, "defect": rep.defect, "kind": kind}


def cmd_search(args) -> int:
    try:
        cfg = SearchConfig(
            n=args.n,
            m=args.m,
            symmetry=args.symmetry,
            trials=args.trials,
            seed=args.seed,
            max_iters=args.iters,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rows = []
    if args.mode == "fuzz":
        summary = fuzz_inequality(cfg)
        samples = fuzz_samples(cfg)
        for i, mats in enumerate(samples):
            rows.append(_row(i, args.seed, MatrixTuple(mats, cfg.symmetry), args.tol))
        results = summary.as_dict()
        ok = summary.ok
    else:
        if cfg.symmetry is SymmetryClass.SKEW and cfg.n <= 2:
            raise InputError("ascent needs n >= 3 for skew tuples")
        res = ascend_ratio(cfg)
        for rec in res.per_trial:
            rows.append(_row(rec["trial"], args.seed, MatrixTuple(rec["mats"], cfg.symmetry), args.tol))
        results = res.as_dict()
        ok = res.best_ratio <= 1.0 + 1e-7
    csv_text = _csv_text(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(csv_text)
    _emit(args, _report(args, results), rows)
    return EXIT_OK if ok else EXIT_FAIL


def _q_matrix(args, N: int):
    if args.q == "identity":
        return np.eye(N)
    if args.q == "haar":
        return random_orthogonal(N, args.seed, special=True)
    if not args.q_file:
        raise InputError("--q file needs --q-file PATH")
    try:
        import json

        with open(args.q_file) as fh:
            Q = np.array(json.load(fh)["matrix"], dtype=float)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read Q from {args.q_file}: {exc}") from exc
    if Q.shape != (N, N) or np.abs(Q.T @ Q - np.eye(N)).max() > 1e-9 or np.linalg.det(Q) < 0:
        raise InputError(f"Q must be a {N}x{N} special orthogonal matrix")
    return Q


def cmd_fmax(args) -> int:
    if args.n < 1:
        raise InputError("n must be positive")
    basis = sym_basis(args.n)
    N = basis.N
    Q = _q_matrix(args, N)
    try:
        region = SimplexRegion(N, args.epsilon)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    cfg = SimplexConfig(starts=args.starts, seed=args.seed)
    res = simplex_max(Q, region, cfg, basis)
    mem = g_epsilon_member(Q, args.epsilon, cfg, basis)
    results = {
        "N": N,
        "epsilon": args.epsilon,
        "q": args.q,
        "max_value": res.value,
        "maximizer": res.x.tolist(),
        "method": res.method,
        "gradient_value": res.gradient_value,
        "oracle_value": res.oracle_value,
        "converged": res.converged,
        "member": mem.member,
        "margin": mem.margin,
    }
    _emit(args, _report(args, results))
    return EXIT_OK


def cmd_gen(args) -> int:
    fam = args.family
    try:
        if fam == "sympair":
            obj = make_symmetric_pair(args.n, args.m, args.mu)
        elif fam == "skew3":
            obj = make_skew_triple3(args.m, args.lam)
        elif fam == "skewquat":
            obj = make_skew_quaternionic(args.n, args.m, args.lam)
        else:
            obj = equality_shape_ops(args.n, args.m, args.mu, args.lam1, args.lam2, args.lam3, args.c)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.conjugate:
        if isinstance(obj, ShapeOperatorSet):
            g = random_group_element(obj.n, obj.m, args.seed)
            obj = ShapeOperatorSet(act(g, obj.as_tuple()).mats, obj.c)
        else:
            obj = act(random_group_element(obj.n, obj.m, args.seed), obj)
    doc = shape_document(obj) if isinstance(obj, ShapeOperatorSet) else tuple_document(obj)
    text = dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="tolerance (default 1e-8)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    p.add_argument("--output", choices=["text", "json", "csv"], default=argparse.SUPPRESS, help="report format (default text)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="ddvv",
        description="Check commutator-norm inequalities, curvature invariants and their equality cases.",
        epilog=f"search CSV columns: {', '.join(CSV_COLUMNS)}. Exit codes: 0 ok, 1 failure, 2 bad input.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="defect of a matrix tuple")
    p.add_argument("input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("geom", parents=[common], help="curvature invariants of shape operators")
    p.add_argument("input")
    p.set_defaults(func=cmd_geom)

    p = sub.add_parser("translate", parents=[common], help="polynomial translation of a symmetric tuple")
    p.add_argument("input")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("normal-form", parents=[common], help="equality normal form detection")
    p.add_argument("input")
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser(
        "search",
        parents=[common],
        help="fuzz or ratio-ascent campaign",
        description=f"CSV columns: {', '.join(CSV_COLUMNS)}",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--symmetry", choices=["symmetric", "skew"], default="symmetric")
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--mode", choices=["ascend", "fuzz"], default="ascend")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("fmax", parents=[common], help="maximize f_Q over the truncated simplex")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--q", default="identity", choices=["identity", "haar", "file"])
    p.add_argument("--q-file", help="JSON file with key 'matrix' (for --q file)")
    p.add_argument("--starts", type=int, default=64)
    p.set_defaults(func=cmd_fmax)

    p = sub.add_parser("gen", parents=[common], help="write an equality fixture")
    p.add_argument("--family", required=True, choices=["sympair", "skew3", "skewquat", "shape-eq"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--lam1", type=float, default=0.0)
    p.add_argument("--lam2", type=float, default=0.0)
    p.add_argument("--lam3", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--conjugate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol = getattr(args, "tol", 1e-8)
    args.seed = getattr(args, "seed", 0)
    args.output = getattr(args, "output", "text")
    args.argv = argv
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DimensionError, ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
