"""Follower-pressure inflation of the oblate spheroid up to 4.8 kPa.

Prints the deformed equatorial and polar radii after each pressure
increment together with the Newton iteration count, and writes VTK
snapshots at the configured pressures.
"""
import argparse
from pathlib import Path

from tdcshell.config import load_config
from tdcshell.scenarios import run_pressure_sweep

HERE = Path(__file__).resolve().parent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=HERE / "configs" / "spheroid_pressure.ini")
    ap.add_argument("--out", type=Path, default=Path("out/spheroid"))
    args = ap.parse_args(argv)
    cfg = load_config(args.config)
    print(f"{'p [Pa]':>8} {'r_eq [m]':>12} {'r_pole [m]':>12} {'Newton':>6}")

    def step(p, res):
        print(f"{p:8.0f} {res.max_radius[-1]:12.6f} {res.min_radius[-1]:12.6f} "
              f"{res.iterations[-1]:6d}", flush=True)

    res = run_pressure_sweep(cfg, args.out, on_step=step)
    print(f"written: {', '.join(str(p) for p in res.files)}")


if __name__ == "__main__":
    main()
