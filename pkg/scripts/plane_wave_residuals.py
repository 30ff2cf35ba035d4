#!/usr/bin/env python3
"""Maxwell residuals of the built-in vacuum plane wave and its broken variants.

The exact wave converges at second order as the step halves; the controls
with a wrong dispersion relation or impedance settle at a non-zero floor.

    python scripts/plane_wave_residuals.py --steps 2e-2 1e-2 5e-3 2.5e-3
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from covariant_em.exterior import KForm, Metric, constant_field
from covariant_em.fields import maxwell_residuals, plane_wave


@dataclass
class WaveConfig:
    propagation: tuple[float, float, float] = (0.6, 0.8, 0.0)
    polarization: int = 3
    frequency: float = 2.0
    point: tuple[float, ...] = (0.3, -0.2, 0.5, 0.1)
    steps: list[float] = field(default_factory=lambda: [2e-2, 1e-2, 5e-3, 2.5e-3])


VARIANTS = {
    "exact": {},
    "dispersion x1.3": {"dispersion_factor": 1.3},
    "impedance x0.7": {"impedance_factor": 0.7},
}


def run(cfg: WaveConfig) -> dict[str, list[tuple[float, float]]]:
    eta = Metric.minkowski()
    j = constant_field(KForm.zero(3))
    x = np.array(cfg.point)
    out = {}
    for name, kwargs in VARIANTS.items():
        F, G = plane_wave(propagation=list(cfg.propagation), polarization=cfg.polarization,
                          frequency=cfg.frequency, **kwargs)
        rows = []
        for h in cfg.steps:
            r1, r2 = maxwell_residuals(F, G, j, x, h, eta)
            rows.append((r1.norm(), r2.norm()))
        out[name] = rows
    return out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=float, nargs="+", default=[2e-2, 1e-2, 5e-3, 2.5e-3])
    p.add_argument("--frequency", type=float, default=2.0)
    args = p.parse_args(argv)
    cfg = WaveConfig(frequency=args.frequency, steps=args.steps)
    for name, rows in run(cfg).items():
        print(name)
        prev = None
        for h, (dF, dG) in zip(cfg.steps, rows):
            order = "" if prev is None else \
                f"  order {math.log2(prev[0] / dF):.3f} / {math.log2(prev[1] / dG):.3f}"
            print(f"  h={h:<9.3g} |dF|={dF:.3e}  |d*G|={dG:.3e}{order}")
            prev = (dF, dG)
    return 0


if __name__ == "__main__":
    sys.exit(main())
