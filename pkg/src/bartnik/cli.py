"""
Construct and verify charged extensions of minimal Bartnik data.

Subcommands:
  eigen    First eigenpair of -Δ + K for a metric CSV
  path     Build and normalize the metric path; report κ, α, β
  rn       Dump a Reissner–Nordström profile
  collar   Assemble the collar and dump its fields and slices
  glue     Bridge two profile CSVs
  build    Run the full construction and write the extension
  verify   Re-check a dumped extension

Exit codes: 0 pass, 1 usage or I/O, 2 admissibility, 3 construction,
4 verification.

Example:
  charged-extension build --config runs/round.toml --out-dir output
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import config
from .collar_builder import (
    assemble_collar,
    collar_dec_field,
    eigen_path,
    select_amplitude,
    select_epsilon,
    selection_report,
)
from .config import GridSection, RunConfig, load_run_config
from .errors import BartnikError
from .exporters import (
    plain,
    read_extension,
    read_metric_csv,
    read_profile_csv,
    run_directory,
    write_collar,
    write_extension,
    write_json,
    write_path,
    write_profile_csv,
)
from .glue_bend import BridgeSpec, glue_profiles
from .pipeline import (
    build_extension,
    build_path,
    check_admissibility,
    collar_fields,
    failure_report,
    input_from_config,
    verify_fields,
)
from .rotsym_core import RNParams, rn_profile
from .sphere_geometry import ConformalData, first_eigenpair, make_grid


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    # ---- --out-dir ----
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path("output"),
        help="Directory that receives run folders (default: output)",
    )
    # ---- --ntheta ----
    parser.add_argument(
        "--ntheta", type=int, help="Colatitude nodes (overrides the run file)"
    )
    # ---- --nt ----
    parser.add_argument(
        "--nt", type=int, help="Path nodes (overrides the run file)"
    )
    # ---- --ds ----
    parser.add_argument(
        "--ds", type=float, help="Radial step (overrides the run file)"
    )
    # ---- --json ----
    parser.add_argument(
        "--json",
        action="store_true",
        help="Print the resulting report as JSON",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    eigen = sub.add_parser("eigen", help="First eigenpair of a metric CSV")
    eigen.add_argument("metric", type=Path, help="theta,q,p or theta,w CSV")
    eigen.add_argument(
        "--radius", type=float, default=1.0, help="r_o of a theta,w CSV"
    )

    for name, text in (
        ("path", "Build and normalize the metric path"),
        ("collar", "Assemble and dump the collar"),
        ("build", "Run the full construction"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument(
            "--config", type=Path, required=True, help="TOML run file"
        )

    rn = sub.add_parser("rn", help="Dump a Reissner–Nordström profile")
    rn.add_argument("--mass", type=float, required=True)
    rn.add_argument("--charge", type=float, default=0.0)
    rn.add_argument(
        "--s-max", type=float, default=10.0, help="Extent from the horizon"
    )

    glue = sub.add_parser("glue", help="Bridge two profile CSVs")
    glue.add_argument("left", type=Path, help="Inner profile CSV")
    glue.add_argument("right", type=Path, help="Outer profile CSV")
    glue.add_argument("--charge", type=float, default=0.0)

    verify = sub.add_parser("verify", help="Re-check a dumped extension")
    verify.add_argument("dump", type=Path, help="Extension dump directory")
    verify.add_argument(
        "--rigidity",
        action="store_true",
        help="Accept zero DEC margins (exact Reissner–Nordström data)",
    )
    return parser.parse_args(argv)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Load the run file and apply command-line grid overrides."""
    cfg = load_run_config(args.config)
    overrides = {
        k: getattr(args, k)
        for k in ("ntheta", "nt", "ds")
        if getattr(args, k) is not None
    }
    if overrides:
        grid = GridSection.model_validate(
            {**cfg.grid.model_dump(), **overrides}
        )
        cfg = cfg.model_copy(update={"grid": grid})
    return cfg


def emit(args: argparse.Namespace, report) -> None:
    if args.json:
        print(json.dumps(plain(report), indent=2, ensure_ascii=False))


# ==== Subcommands ====


def run_eigen(args: argparse.Namespace) -> int:
    grid = make_grid(args.ntheta or config.NTHETA_DEFAULT)
    loaded = read_metric_csv(args.metric, grid, args.radius)
    metric = loaded.metric() if isinstance(loaded, ConformalData) else loaded
    pair = first_eigenpair(metric)
    print(f"λ₁ = {pair.value:.12g} (residual {pair.residual:.2e})")
    emit(args, {"lambda1": pair.value, "residual": pair.residual})
    return config.EXIT_PASS


def run_path(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    data = input_from_config(cfg, cfg.grid.ntheta)
    path = build_path(data, cfg.grid.nt, cfg.grid.theta_cut)
    out = run_directory(args.out_dir, cfg.name) / "path"
    write_path(path, out)
    print(f"κ={path.kappa:.10g}, α={path.alpha:.10g}, β={path.beta:.10g}")
    print(f"Path saved to: {out}")
    emit(args, {"kappa": path.kappa, "alpha": path.alpha, "beta": path.beta})
    return config.EXIT_PASS


def run_rn(args: argparse.Namespace) -> int:
    params = RNParams(args.mass, args.charge)
    pr = rn_profile(params, args.s_max, args.ds or config.DS_DEFAULT)
    out = run_directory(args.out_dir, f"rn-m{args.mass}-q{args.charge}")
    write_profile_csv(pr, out / "profile.csv")
    print(f"r_+ = {params.r_plus:.12g}; profile saved to: {out}")
    emit(args, {"mass": params.mass, "charge": params.charge})
    return config.EXIT_PASS


def run_collar(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    data = input_from_config(cfg, cfg.grid.ntheta)
    path = build_path(data, cfg.grid.nt, cfg.grid.theta_cut)
    gate = check_admissibility(data, path=path)
    out = run_directory(args.out_dir, cfg.name)
    write_json(gate, out / "gate.json")
    if not gate["passed"]:
        print(f"✗ admissibility: {gate['violated']}")
        emit(args, gate)
        return config.EXIT_ADMISSIBILITY
    q = data.charge
    eig = eigen_path(path)
    amplitude = select_amplitude(eig, q, path.alpha, path.kappa, path.r_o)
    eps, masses = select_epsilon(
        data.mass, amplitude, float(eig.u[-1].mean()), path.r_o, q
    )
    block = assemble_collar(path, eig, amplitude, eps, q)
    margin = collar_dec_field(block)
    write_collar(collar_fields(block, mass=data.mass), out, margin)
    selection = selection_report(block, masses, data.mass)
    write_json(selection, out / "selection.json")
    print(f"✓ collar {amplitude=:.6g}, {eps=:.6g}; saved to: {out}")
    emit(args, selection)
    return config.EXIT_PASS


def run_glue(args: argparse.Namespace) -> int:
    left = read_profile_csv(args.left, args.charge)
    right = read_profile_csv(args.right, args.charge)
    glued = glue_profiles(BridgeSpec(left, right, args.charge, args.ds))
    name = f"glue-{args.left.stem}-{args.right.stem}"
    out = run_directory(args.out_dir, name)
    write_profile_csv(glued.profile, out / "profile.csv")
    write_json(glued.report, out / "junctions.json")
    print(f"✓ bridge of length {glued.translation.length:.6g}")
    print(f"Profile saved to: {out}")
    emit(args, glued.report)
    return config.EXIT_PASS


def run_build(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    data = input_from_config(cfg, cfg.grid.ntheta)
    out = run_directory(args.out_dir, cfg.name)
    try:
        ext, report = build_extension(
            data,
            nt=cfg.grid.nt,
            ds=cfg.grid.ds,
            theta_cut=cfg.grid.theta_cut,
            tolerances=cfg.tolerances,
        )
    except BartnikError as e:
        write_json(failure_report(e), out / "report.json")
        raise
    write_extension(ext, report, out)
    print(f"Extension saved to: {out}")
    emit(args, report)
    if not report["passed"]:
        return config.EXIT_VERIFICATION
    return config.EXIT_PASS


def run_verify(args: argparse.Namespace) -> int:
    fields = read_extension(args.dump)
    report = verify_fields(fields, strict=not args.rigidity)
    failed = [k for k, v in report["flags"].items() if not v]
    if failed:
        print(f"✗ verification failed: {failed}")
    else:
        print(f"✓ verified, gap {report['gap']:.6g}")
    emit(args, report)
    if failed:
        return config.EXIT_VERIFICATION
    return config.EXIT_PASS


COMMANDS = {
    "eigen": run_eigen,
    "path": run_path,
    "rn": run_rn,
    "collar": run_collar,
    "glue": run_glue,
    "build": run_build,
    "verify": run_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return config.EXIT_PASS if e.code in (0, None) else config.EXIT_USAGE

    # ==== Run ====
    try:
        res = COMMANDS[args.command](args)
    except BartnikError as e:
        print(f"✗ {type(e).__name__} [{e.stage}]: {e}")
        if args.json:
            print(json.dumps(plain(failure_report(e)), indent=2))
        return e.exit_code
    except OSError as e:
        print(f"✗ {e}")
        return config.EXIT_USAGE
    return res


if __name__ == "__main__":
    sys.exit(main())
