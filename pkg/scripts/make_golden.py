"""Regenerate tests/data/golden_values.txt from the reference oracles.

Each line: name, value (15 significant digits), residual of the defining
equation, generation date.
"""
import argparse
import datetime
import math
from pathlib import Path

from tdcshell.oracles import catenoid_reference, spheroid_area, spheroid_area_closed_form

DEFAULT = Path(__file__).resolve().parents[1] / "tests" / "data" / "golden_values.txt"


def golden_rows():
    a, area, res = catenoid_reference(0.5, 0.3)
    quad = spheroid_area(1.0, 0.5)
    closed = spheroid_area_closed_form(1.0, 0.5)
    return [
        ("catenoid_a_R0.5_h0.3", a, res),
        ("catenoid_area_R0.5_h0.3", area, res),
        ("spheroid_area_1_0.5", quad, quad - closed),
        ("cylinder_lateral_area_R0.5_H0.6", 0.6 * math.pi, 0.0),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT)
    args = ap.parse_args(argv)
    today = datetime.date.today().isoformat()
    lines = ["# name value residual date"]
    lines += [f"{n} {v:.15g} {r:.3e} {today}" for n, v, r in golden_rows()]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))


if __name__ == "__main__":
    main()
