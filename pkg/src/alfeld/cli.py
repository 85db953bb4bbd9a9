"""Command-line interface.  Exit codes: 0 success, 2 validation failure, 1 internal error."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import acceptance
from .dimension import dim_shape, dimension_report, minimal_table, schenck_dim
from .dofs import build_global_dofs, build_local_dofs
from .exact import parse_rational
from .geometry import BUILTIN_MESHES, Mesh, alfeld_split, builtin_mesh, load_mesh, reference_simplex
from .multiindex import (
    Cell,
    ElementConfig,
    check_assumption,
    decomposition_pair,
    refined_decomposition,
)
from .reporting import dumps, format_table
from .spline_space import continuity_check, dimension_oracle, unisolvence_check


class ValidationFailure(Exception):
    """A well-formed request whose answer is negative; carries the report to print."""

    def __init__(self, report):
        self.report = report


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return _int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 1..4, got {text!r}") from None


def _point(text: str) -> tuple:
    try:
        return tuple(parse_rational(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from None


def _add_element(p: argparse.ArgumentParser, need_b: bool = True) -> None:
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=_int_list, required=True, help="continuity vector, e.g. 1,1")
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=need_b)
    g.add_argument("--b", type=int)
    g.add_argument("--rho", type=int)


def _add_mesh(p: argparse.ArgumentParser, default: str | None = None) -> None:
    p.add_argument("--mesh", default=default, help=f"mesh file or builtin name ({', '.join(BUILTIN_MESHES)})")
    p.add_argument("--split-point", type=_point, default=None, help="rational coordinates, e.g. 1/3,1/3")


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, default=None, help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alfeld", description="C^r elements on the Alfeld split, in exact arithmetic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-assumption", help="validate element parameters")
    _add_element(p)
    _add_out(p)

    p = sub.add_parser("decompose", help="export the multi-index decompositions")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=_int_list, required=True)
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--b", type=int)
    g.add_argument("--rho", type=int)
    p.add_argument("--refined", action="store_true", help="treat r, k as (rbar, kbar) of a single refined decomposition")
    _add_out(p)

    p = sub.add_parser("dofs", help="list the degrees of freedom")
    _add_element(p)
    _add_mesh(p)
    _add_out(p)

    for name, helptext in (("unisolvence", "exact unisolvence of one cell"), ("oracle-dim", "nullspace dimension")):
        p = sub.add_parser(name, help=helptext)
        _add_element(p)
        _add_mesh(p)
        if name == "oracle-dim":
            p.add_argument("--no-supersmoothness", action="store_true")
            p.add_argument("--no-split-point", action="store_true")
        _add_out(p)

    p = sub.add_parser("dimension", help="dimension formulas")
    _add_element(p)
    p.add_argument("--mesh", default=None)
    p.add_argument("--N", type=_int_list, default=None, help="face counts N_0,...,N_d")
    _add_out(p)

    p = sub.add_parser("tables", help="minimal parameter tables")
    p.add_argument("--d", type=_range, default=list(range(1, 5)))
    p.add_argument("--m", type=_range, default=list(range(1, 4)))
    p.add_argument("--format", choices=("json", "text"), default="json")
    _add_out(p)

    p = sub.add_parser("continuity", help="inter-element continuity on a mesh")
    _add_element(p)
    _add_mesh(p, default="two-triangles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=5)
    _add_out(p)

    p = sub.add_parser("verify-all", help="replay the acceptance suite")
    p.add_argument("--suite", choices=("desk",), default="desk")
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    return parser


def _config(args, validate: bool = True) -> ElementConfig:
    if len(args.r) != args.d:
        raise ValueError(f"--r has {len(args.r)} entries but --d is {args.d}")
    config = ElementConfig.create(args.d, args.r, args.k, b=args.b, rho=args.rho)
    if validate:
        config.require_valid()
    return config


def _mesh(args, d: int) -> Mesh:
    if args.mesh is None:
        return reference_simplex(d)
    if args.mesh in BUILTIN_MESHES:
        mesh = builtin_mesh(args.mesh)
    else:
        mesh = load_mesh(args.mesh)
    if mesh.d != d:
        raise ValueError(f"mesh dimension {mesh.d} does not match --d {d}")
    return mesh


def _cells(cells: list[Cell], group: str) -> list[dict]:
    return [{"group": group, "cell": c.label.as_dict(), "indices": [list(a) for a in c.indices]} for c in cells]


def cmd_check_assumption(args):
    if len(args.r) != args.d:
        raise ValueError(f"--r has {len(args.r)} entries but --d is {args.d}")
    b = args.b if args.b is not None else args.k - args.rho
    verdict = check_assumption(args.d, args.r, args.k, b)
    report = {
        "config": {"d": args.d, "r": args.r, "k": args.k, "b": b, "rho": args.k - b},
        "valid": verdict.valid,
        "violated": verdict.violated,
    }
    if not verdict.valid:
        raise ValidationFailure(report)
    return report


def cmd_decompose(args):
    if args.refined:
        return _cells(refined_decomposition(args.d, args.r, args.k), "refined")
    if args.b is None and args.rho is None:
        raise ValueError("give --b or --rho, or --refined")
    config = _config(args)
    boundary, interior = decomposition_pair(config)
    return _cells(boundary, "boundary") + _cells(interior, "interior")


def _dof_dict(i: int, dof) -> dict:
    return {
        "id": i,
        "kind": dof.kind,
        "site": {"dim": dof.site_dim, "vertices": list(dof.site)},
        "n": dof.n,
        "theta": list(dof.theta),
        "sigma_or_beta": list(dof.sigma if dof.sigma is not None else dof.beta or ()),
        "label": dof.label.as_dict() if dof.label else None,
    }


def cmd_dofs(args):
    config = _config(args)
    mesh = _mesh(args, config.d)
    if len(mesh.cells) == 1:
        dofs = build_local_dofs(config, mesh, 0)
    else:
        dofs = build_global_dofs(config, mesh).dofs
    return [_dof_dict(i, dof) for i, dof in enumerate(dofs)]


def _element_report(config: ElementConfig, **extra) -> dict:
    report = {
        "config": config.as_dict(),
        "matrix_size": None,
        "nonsingular": None,
        "oracle_dim": None,
        "formula_dim": None,
        "agree": None,
        "jumps": [],
    }
    report.update(extra)
    return report


def cmd_unisolvence(args):
    config = _config(args)
    mesh = _mesh(args, config.d)
    uni = unisolvence_check(config, mesh, 0, args.split_point)
    oracle = dimension_oracle(config, alfeld_split(mesh, 0, args.split_point))
    formula = dim_shape(config)[0]
    report = _element_report(
        config,
        matrix_size=uni.matrix_size,
        nonsingular=uni.nonsingular,
        oracle_dim=oracle,
        formula_dim=formula,
        agree=oracle == formula == uni.matrix_size,
        blocks={
            "boundary_nonsingular": uni.boundary_block_nonsingular,
            "interior_nonsingular": uni.interior_block_nonsingular,
            "low_faces_annihilate": uni.low_faces_annihilate,
            "cross_block_zero": uni.cross_block_zero,
        },
    )
    if not (uni.nonsingular and report["agree"]):
        raise ValidationFailure(report)
    return report


def cmd_oracle_dim(args):
    config = _config(args)
    mesh = _mesh(args, config.d)
    split = alfeld_split(mesh, 0, args.split_point)
    ss, sp = not args.no_supersmoothness, not args.no_split_point
    oracle = dimension_oracle(config, split, ss, sp)
    if ss and sp:
        formula = dim_shape(config)[0]
    elif not ss and not sp:
        formula = schenck_dim(config.d, config.r[0], config.k)
    else:
        formula = None
    report = _element_report(
        config,
        oracle_dim=oracle,
        formula_dim=formula,
        agree=None if formula is None else oracle == formula,
        constraints={"supersmoothness": ss, "split_point": sp},
    )
    if report["agree"] is False:
        raise ValidationFailure(report)
    return report


def cmd_dimension(args):
    config = _config(args)
    N = args.N
    if args.mesh is not None:
        N = list(_mesh(args, config.d).face_counts())
    return dimension_report(config, N)


def cmd_tables(args):
    rows = minimal_table(args.d, args.m)
    if args.format == "text":
        return format_table(rows)
    return rows


def cmd_continuity(args):
    config = _config(args)
    mesh = _mesh(args, config.d)
    rep = continuity_check(config, mesh, trials=args.trials, seed=args.seed)
    merged: dict = {}
    for trial in rep.jumps:
        for j in trial:
            key = (j.face, j.order)
            merged[key] = merged.get(key, True) and j.zero
    report = _element_report(
        config,
        jumps=[{"face": list(f), "order": n, "zero": z} for (f, n), z in merged.items()],
        trials=rep.trials,
        seed=args.seed,
        agree=rep.all_zero,
        defect_detected=rep.defect_detected,
    )
    if not rep.all_zero or not rep.defect_detected:
        raise ValidationFailure(report)
    return report


def cmd_verify_all(args):
    report = acceptance.verify_all(args.seed)
    if not report["passed"]:
        raise ValidationFailure(report)
    return report


COMMANDS = {
    "check-assumption": cmd_check_assumption,
    "decompose": cmd_decompose,
    "dofs": cmd_dofs,
    "unisolvence": cmd_unisolvence,
    "oracle-dim": cmd_oracle_dim,
    "dimension": cmd_dimension,
    "tables": cmd_tables,
    "continuity": cmd_continuity,
    "verify-all": cmd_verify_all,
}


def _emit(payload, out: Path | None) -> None:
    text = payload if isinstance(payload, str) else dumps(payload)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = COMMANDS[args.command](args)
    except ValidationFailure as exc:
        _emit(exc.report, args.out)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(payload, args.out)
    return 0


def main() -> None:
    sys.exit(run())
