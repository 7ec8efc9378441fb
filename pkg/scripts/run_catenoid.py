"""Catenoid form finding: area convergence for P1-on-P2 and isoparametric P2.

Runs the refinement study of configs/catenoid.ini (and the iso-P2
variant), writes CSV tables and prints the fitted orders.
"""
import argparse
import logging
import time
from pathlib import Path

from tdcshell.config import load_config
from tdcshell.scenarios import run_convergence_study

HERE = Path(__file__).resolve().parent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--out", type=Path, default=Path("out/catenoid"))
    ap.add_argument("--skip-iso", action="store_true", help="only the P1-on-P2 study")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    runs = [("p1_on_p2", HERE / "configs" / "catenoid.ini")]
    if not args.skip_iso:
        runs.append(("iso_p2", HERE / "configs" / "catenoid_iso_p2.ini"))
    for tag, path in runs:
        cfg = load_config(path)
        t0 = time.perf_counter()
        table = run_convergence_study(cfg, args.levels, args.out / tag)
        print(f"== {tag} ({time.perf_counter() - t0:.1f} s)")
        print(table.to_csv(), end="")
        print(table.summary())


if __name__ == "__main__":
    main()
