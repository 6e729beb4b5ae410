"""Signed-area statistics of seeded admissible fronts by cusp count.

Generates fronts whose Legendrian line turns monotonically through pi with an
odd number of alternating cusps, runs the positive-area certificate on each,
and prints the count, minimum and median area per cusp count together with
the smallest three-cusp remainder.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from engelflex.fronts import admissible_front, positive_area_certificate, signed_area


@dataclass
class AreaConfig:
    fronts: int = 100
    cusps: tuple[int, ...] = (3, 5, 7, 9)
    samples: int = 2048
    seed: int = 0


def run(cfg: AreaConfig) -> dict[int, dict]:
    rng = np.random.default_rng(cfg.seed)
    stats = {}
    for n in cfg.cusps:
        areas, finals = [], []
        for _ in range(cfg.fronts):
            f = admissible_front(n, rng, cfg.samples)
            areas.append(signed_area(f))
            finals.append(positive_area_certificate(f).final_area)
        stats[n] = {
            "count": len(areas),
            "min_area": float(np.min(areas)),
            "median_area": float(np.median(areas)),
            "min_final": float(np.min(finals)),
            "all_positive": bool(np.all(np.array(areas) > 0)),
        }
    return stats


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fronts", type=int, default=100)
    p.add_argument("--cusps", type=int, nargs="+", default=[3, 5, 7, 9])
    p.add_argument("--samples", type=int, default=2048)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args(argv)
    cfg = AreaConfig(a.fronts, tuple(a.cusps), a.samples, a.seed)
    stats = run(cfg)
    print("cusps,count,min_area,median_area,min_three_cusp_area,all_positive")
    for n, s in stats.items():
        print(f"{n},{s['count']},{s['min_area']:.4g},{s['median_area']:.4g},{s['min_final']:.4g},{s['all_positive']}")
    return 0 if all(s["all_positive"] for s in stats.values()) else 1


if __name__ == "__main__":
    raise SystemExit(main())
