#!/usr/bin/env python3
"""
Build extensions of one boundary for masses approaching its lower bound.

For a run file, this script runs the full construction at the masses
m_k = bound * (1 + 10^-k) for k = 1..--steps, where bound is the charged
Hawking mass of the boundary. It writes one extension dump per mass and a
``sweep.csv`` table with the Bartnik gap of each run, so the upper bound m
can be seen closing in on the lower bound.
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List

import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from bartnik import config  # noqa: E402
from bartnik.config import load_run_config  # noqa: E402
from bartnik.errors import BartnikError  # noqa: E402
from bartnik.exporters import run_directory, write_extension  # noqa: E402
from bartnik.pipeline import (  # noqa: E402
    BartnikDataInput,
    build_extension,
    input_from_config,
)
from bartnik.rotsym_core import minimal_bartnik_bound  # noqa: E402


def parse_args() -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    # ---- --config ----
    parser.add_argument(
        "--config", type=Path, required=True, help="TOML run file"
    )
    # ---- --steps ----
    parser.add_argument(
        "--steps",
        type=int,
        default=3,
        help="Number of masses, each ten times closer to the bound",
    )
    # ---- --out-dir ----
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path("output"),
        help="Directory that receives the sweep (default: output)",
    )
    # ---- --dry-run ----
    parser.add_argument(
        "-n",
        "--dry-run",
        action="store_true",
        help="Show the masses without building",
    )
    return parser.parse_args()


def sweep_masses(bound: float, steps: int) -> List[float]:
    """bound * (1 + 10^-k) for k = 1..steps."""
    return [bound * (1.0 + 10.0 ** (-k)) for k in range(1, steps + 1)]


def run_one(
    data: BartnikDataInput, mass: float, cfg, out_dir: Path
) -> Dict[str, object]:
    trial = BartnikDataInput(data.metric, data.charge, mass, data.conformal)
    try:
        ext, report = build_extension(
            trial,
            nt=cfg.grid.nt,
            ds=cfg.grid.ds,
            theta_cut=cfg.grid.theta_cut,
            tolerances=cfg.tolerances,
        )
    except BartnikError as e:
        print(f"  ✗ m={mass:.10g}: {type(e).__name__}: {e}")
        return {"mass": mass, "passed": False, "gap": None, "error": str(e)}
    write_extension(ext, report, out_dir / f"m-{mass:.10g}")
    return {
        "mass": mass,
        "passed": report["passed"],
        "gap": report["gap"],
        "error": "",
    }


def main() -> None:
    args = parse_args()
    cfg = load_run_config(args.config)
    data = input_from_config(cfg, cfg.grid.ntheta)
    bound = minimal_bartnik_bound(data.r_o, data.charge)
    masses = sweep_masses(bound, args.steps)
    print(f"Boundary bound: {bound:.12g}")

    if args.dry_run:
        print("DRY RUN - No extension will be built")
        for m in masses:
            print(f"Would build m={m:.12g}")
        return

    # ==== Sweep ====
    out = run_directory(args.out_dir, f"{cfg.name}-sweep")
    rows = []
    for i, m in enumerate(masses, 1):
        print(f"[{i}/{len(masses)}] m={m:.12g}")
        rows.append(run_one(data, m, cfg, out))

    # ==== Summary ====
    table = pd.DataFrame(rows)
    table.to_csv(out / "sweep.csv", index=False, float_format="%.17g")
    print(table.to_string(index=False))
    print(f"Sweep saved to: {out}")
    if not table["passed"].all():
        sys.exit(config.EXIT_VERIFICATION)


if __name__ == "__main__":
    main()
