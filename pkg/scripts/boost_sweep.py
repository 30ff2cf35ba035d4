#!/usr/bin/env python3
"""Cross-coupling blocks seen by boosted observers of an isotropic medium.

A medium that is purely dielectric/magnetic at rest acquires d-b and h-e
coupling for a moving observer unless eps * mu = 1.  Writes one CSV row per
(eps, mu, beta) with the Frobenius norm of the cross blocks.

    python scripts/boost_sweep.py --eps 2 4 --mu 1 --betas 0:0.9:0.05 --out sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from covariant_em import constitutive as con
from covariant_em.cli import parse_beta
from covariant_em.exterior import NATURAL, Metric
from covariant_em.fields import Observer, lorentz_boost


@dataclass
class SweepConfig:
    eps: list[float] = field(default_factory=lambda: [2.0])
    mu: list[float] = field(default_factory=lambda: [1.0])
    betas: list[float] = field(default_factory=lambda: parse_beta("0:0.9:0.1"))
    axis: int = 1


def cross_norm(eps: float, mu: float, beta: float, axis: int) -> tuple[float, dict]:
    eta = Metric.minkowski()
    rest = np.array([1.0, 0.0, 0.0, 0.0])
    Zt = con.as_rank4(con.isotropic(eps, mu, rest, eta, NATURAL), eta)
    L = lorentz_boost(beta, axis)
    obs = Observer(np.linalg.inv(L)[:, 0], eta)
    blocks = con.frame_blocks(con.effective_zetas(Zt, obs, eta, NATURAL), L)
    return math.sqrt(np.sum(blocks["db"] ** 2) + np.sum(blocks["he"] ** 2)), blocks


def run(cfg: SweepConfig, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["eps", "mu", "beta", "cross_norm", "de_perp", "hb_perp"])
    perp = 2 if cfg.axis != 2 else 1
    for eps in cfg.eps:
        for mu in cfg.mu:
            for beta in cfg.betas:
                norm, blocks = cross_norm(eps, mu, beta, cfg.axis)
                de = blocks["de"][perp - 1, perp - 1]
                hb = blocks["hb"][perp - 1, perp - 1]
                writer.writerow([eps, mu, beta, repr(norm), repr(float(de)), repr(float(hb))])


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eps", type=float, nargs="+", default=[2.0])
    p.add_argument("--mu", type=float, nargs="+", default=[1.0])
    p.add_argument("--betas", default="0:0.9:0.1")
    p.add_argument("--axis", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--out")
    args = p.parse_args(argv)
    cfg = SweepConfig(args.eps, args.mu, parse_beta(args.betas), args.axis)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            run(cfg, fh)
    else:
        run(cfg, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
