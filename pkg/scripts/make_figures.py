"""Write SVG drawings of the main constructions into a directory.

Produces the scaling-map teardrop, the rotation-map deformation at a right
angle, a non-strict linear return map deformation, an admissible five-cusp
front, and a segment with two inserted Reidemeister-I loops.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from engelflex.fronts import Front, admissible_front, insert_r1_loop
from engelflex.models import linear_contactomorphism
from engelflex.plotting import plot_svg
from engelflex.rigidity import build_example4, build_example5, prop7_deform


@dataclass
class FigureConfig:
    out: Path = Path("figures")
    seed: int = 0


def figures(cfg: FigureConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    s = np.linspace(0, 1, 2048)
    seg = Front(s, np.column_stack([s, 0.1 * s]), slope_bound=1.0)
    seg = insert_r1_loop(seg, 0.3, 0.001, window=(0.1, 0.45))
    seg = insert_r1_loop(seg, 0.75, -0.001, window=(0.55, 0.95))
    items = {
        "scaling_map_teardrop.svg": build_example4(0.05),
        "rotation_map_right_angle.svg": build_example5(np.pi / 2),
        "nonstrict_return_map.svg": prop7_deform(linear_contactomorphism(np.diag([2.0, 1.0]))),
        "admissible_five_cusps.svg": admissible_front(5, np.random.default_rng(cfg.seed)),
        "segment_with_r1_loops.svg": seg,
    }
    return [plot_svg(obj, cfg.out / name) for name, obj in items.items()]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("figures"))
    p.add_argument("--seed", type=int, default=0)
    for path in figures(FigureConfig(**vars(p.parse_args(argv)))):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
