"""Scan the rotation angle of the strict return map and report where the
prescribed-angle deformation can be built.

For each alpha the required front area, the smallest area reachable by a
front with line angle alpha*theta between the two endpoints, and the outcome
of ``build_example5`` are printed as CSV.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from engelflex.errors import EngelError
from engelflex.rigidity import build_example5, deformation_residual, example5_area_identity


@dataclass
class ScanConfig:
    alpha_min: float = 0.1
    alpha_max: float = 3.0
    steps: int = 30
    r: float = 1.0
    samples: int = 2048


def scan(cfg: ScanConfig):
    for alpha in np.linspace(cfg.alpha_min, cfg.alpha_max, cfg.steps):
        rhs, poly = example5_area_identity(alpha, cfg.r)
        row = {"alpha": alpha, "required_area": rhs, "identity_residual": abs(rhs - poly)}
        try:
            d = build_example5(alpha, cfg.r, cfg.samples)
            row.update(status="ok", defect=d.closure_defect, residual=deformation_residual(d))
        except EngelError as e:
            row.update(status=e.token, defect=float("nan"), residual=float("nan"))
        yield row


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(ScanConfig()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    cfg = ScanConfig(**vars(p.parse_args(argv)))
    fields = ["alpha", "required_area", "identity_residual", "status", "defect", "residual"]
    w = csv.DictWriter(sys.stdout, fields)
    w.writeheader()
    for row in scan(cfg):
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
