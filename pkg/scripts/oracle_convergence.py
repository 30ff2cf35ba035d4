#!/usr/bin/env python3
"""Error of the metric-variation oracle against the closed-form tensors.

For seeded random states of each medium kind, compares the finite-difference
tensor with abraham_T (v_tethered) and minkowski_sym_T (metric_independent)
over a ladder of steps and reports the observed convergence order.

    python scripts/oracle_convergence.py --states 3 --steps 1e-2 5e-3 2.5e-3 1e-3
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from covariant_em import constitutive as con
from covariant_em import stress as st
from covariant_em.exterior import NATURAL
from covariant_em.sampling import field_scale, random_form, random_medium, random_metric


@dataclass
class ConvergenceConfig:
    seed: int = 0
    states: int = 2
    steps: list[float] = field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3, 1.25e-3])
    richardson: bool = False
    kinds: tuple[str, ...] = con.KINDS


def run(cfg: ConvergenceConfig) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for kind in cfg.kinds:
        for i in range(cfg.states):
            g = random_metric(rng)
            m = random_medium(rng, kind, g, NATURAL)
            F = random_form(rng, 2, field_scale(NATURAL))
            exact = {
                "v_tethered": st.abraham_T(F, m, g).components,
                "metric_independent": st.minkowski_sym_T(F, con.apply_Z(m, F, g), g).components,
            }
            for response, T in exact.items():
                errs = []
                for h in cfg.steps:
                    spec = st.VariationSpec(h=h, richardson=cfg.richardson)
                    approx = st.metric_variation_oracle(F, m, g, response, spec).components
                    errs.append(float(np.max(np.abs(approx - T)) / np.max(np.abs(T))))
                orders = [math.log(a / b) / math.log(h1 / h2)
                          for a, b, h1, h2 in zip(errs, errs[1:], cfg.steps, cfg.steps[1:])]
                rows.append({"kind": kind, "state": i, "response": response,
                             "errors": errs, "orders": orders})
    return rows


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--states", type=int, default=2)
    p.add_argument("--steps", type=float, nargs="+", default=[1e-2, 5e-3, 2.5e-3, 1.25e-3])
    p.add_argument("--richardson", action="store_true")
    args = p.parse_args(argv)
    cfg = ConvergenceConfig(args.seed, args.states, args.steps, args.richardson)
    print(f"{'kind':<18}{'response':<20}" + "".join(f"h={h:<10.3g}" for h in cfg.steps) + "orders")
    for row in run(cfg):
        errs = "".join(f"{e:<12.3e}" for e in row["errors"])
        orders = " ".join(f"{o:.2f}" for o in row["orders"])
        print(f"{row['kind']:<18}{row['response']:<20}{errs}{orders}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
