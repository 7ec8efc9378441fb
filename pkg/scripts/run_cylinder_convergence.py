"""Conservative-load tube: L2-norm convergence of normal and tangential displacement.

Errors are measured against an overkill solve two refinements beyond the
finest level. With the default four levels this takes a few minutes.
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
    ap.add_argument("--config", type=Path, default=HERE / "configs" / "cylinder_load.ini")
    ap.add_argument("--levels", type=int, default=None)
    ap.add_argument("--out", type=Path, default=Path("out/cylinder"))
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    cfg = load_config(args.config)
    t0 = time.perf_counter()

    def progress(k, table):
        print(f"level {k} done after {time.perf_counter() - t0:.1f} s", flush=True)

    table = run_convergence_study(cfg, args.levels, args.out, on_level=progress)
    print(table.to_csv(), end="")
    print(table.summary())


if __name__ == "__main__":
    main()
