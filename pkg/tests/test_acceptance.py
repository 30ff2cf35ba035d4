"""Acceptance criteria 1-11, each at its stated sample count and tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary (see conftest.py) and by ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from boost_oracle import boosted_blocks  # noqa: E402

from covariant_em import constitutive as con  # noqa: E402
from covariant_em import exterior as ext  # noqa: E402
from covariant_em import stress as st  # noqa: E402
from covariant_em.exterior import NATURAL, SI, KForm, Metric, constant_field  # noqa: E402
from covariant_em.fields import (  # noqa: E402
    Observer,
    decompose_F,
    decompose_G,
    frame_fields,
    lorentz_boost,
    maxwell_residuals,
    plane_wave,
    reconstruct_F,
    reconstruct_G,
)
from covariant_em.sampling import (  # noqa: E402
    field_scale,
    random_form,
    random_medium,
    random_metric,
    random_observer,
    random_spatial,
)

LINES: list[str] = []
MEDIA = ("vacuum", "isotropic", "anisotropic", "magneto_electric")


def record(number: int, title: str, passed: bool, detail: str) -> bool:
    LINES.append(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
    return passed


def rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300))


def rng_for(number: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([2024, number]))


def medium_state(rng, kind, k=NATURAL):
    g = random_metric(rng)
    m = random_medium(rng, kind, g, k)
    return g, m, random_form(rng, 2, field_scale(k))


# ---------------------------------------------------------------- 1


def test_criterion_01_hodge_involution():
    rng = rng_for(1)
    cases = [(random_metric(rng), [random_form(rng, k) for k in range(5)]) for _ in range(1000)]
    t0 = time.perf_counter()
    worst = 0.0
    for g, forms in cases:
        for k, w in enumerate(forms):
            sign = -((-1) ** (k * (4 - k)))
            back = ext.hodge(ext.hodge(w, g), g)
            worst = max(worst, np.max(np.abs(back.components - sign * w.components)) / w.norm())
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    assert record(1, "Hodge involution, k = 0..4, 1000 metrics", ok,
                  f"max |**w - sign w|/|w| = {worst:.2e} (<= 1e-12), {elapsed:.2f} s (< 1 s)")


# ---------------------------------------------------------------- 2


def test_criterion_02_decomposition_roundtrips():
    rng = rng_for(2)
    cases = []
    for i in range(1000):
        k = NATURAL if i % 2 else SI
        g = random_metric(rng)  # generic non-diagonal Lorentzian metrics
        obs = random_observer(rng, g)
        s = field_scale(k)
        cases.append((k, obs, random_spatial(rng, obs, s), random_spatial(rng, obs, s / k.c),
                      random_spatial(rng, obs), random_spatial(rng, obs, k.c),
                      random_form(rng, 2, s)))
    t0 = time.perf_counter()
    worst = 0.0
    for k, obs, e, b, d, h, F in cases:
        e2, b2 = decompose_F(reconstruct_F(e, b, obs, k), obs, k)
        d2, h2 = decompose_G(reconstruct_G(d, h, obs, k), obs, k)
        F2 = reconstruct_F(*decompose_F(F, obs, k), obs, k)
        worst = max(worst, rel(e2.components, e.components), rel(b2.components, b.components),
                    rel(d2.components, d.components), rel(h2.components, h.components),
                    rel(F2.components, F.components))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    assert record(2, "decomposition round trips, 1000 states", ok,
                  f"max rel = {worst:.2e} (<= 1e-12), {elapsed:.2f} s (< 1 s)")


# ---------------------------------------------------------------- 3


def test_criterion_03_comoving_constitutive_consistency():
    rng = rng_for(3)
    worst = {}
    for kind in MEDIA:
        w = 0.0
        for i in range(500):
            k = NATURAL if i % 2 else SI
            g, m, F = medium_state(rng, kind, k)
            obs = Observer(m.V, g) if m.V is not None else random_observer(rng, g)
            d, h = decompose_G(con.apply_Z(m, F, g), obs, k)
            d2, h2 = con.comoving_dh(m, *decompose_F(F, obs, k), g)
            w = max(w, rel(d.components, d2.components), rel(h.components, h2.components))
        worst[kind] = w
    ok = max(worst.values()) <= 1e-12
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert record(3, "comoving constitutive consistency, 4 x 500", ok, f"max rel {detail} (<= 1e-12)")


# ---------------------------------------------------------------- 4


def test_criterion_04_vacuum_degeneracy():
    rng = rng_for(4)
    worst_s = worst_t = 0.0
    for i in range(500):
        k = NATURAL if i % 2 else SI
        g = random_metric(rng)
        F = random_form(rng, 2, field_scale(k))
        m = con.vacuum(k)
        G = con.apply_Z(m, F, g)
        obs = random_observer(rng, g)
        # s scaled by eps0 |F|^2, the size of each of its terms
        worst_s = max(worst_s, st.s_form(F, G, obs.U, g).norm() / (k.eps0 * F.norm() ** 2))
        worst_t = max(worst_t, rel(st.abraham_T(F, m, g).components,
                                   st.minkowski_sym_T(F, G, g).components))
    ok = worst_s <= 1e-14 and worst_t <= 1e-13
    assert record(4, "vacuum degeneracy, 500 F", ok,
                  f"|s| scaled = {worst_s:.1e} (<= 1e-14), A - M rel = {worst_t:.1e} (<= 1e-13)")


# ---------------------------------------------------------------- 5


def test_criterion_05_difference_law():
    rng = rng_for(5)
    worst = 0.0
    for i in range(500):
        k = NATURAL if i % 2 else SI
        g, m, F = medium_state(rng, "magneto_electric", k)
        G = con.apply_Z(m, F, g)
        A = st.abraham_T(F, m, g)
        gap = A - st.minkowski_sym_T(F, G, g)
        s = st.s_form(F, G, m.V, g).components
        Vt = g.components @ m.V
        half = 0.5 * (np.outer(Vt, s) + np.outer(s, Vt))
        worst = max(worst, np.max(np.abs(gap - half)) / A.norm())
    ok = worst <= 1e-12
    assert record(5, "difference law, 500 self-adjoint magneto-electric states", ok,
                  f"max |gap - sym(V~ s)|/|T| = {worst:.1e} (<= 1e-12)")


# ---------------------------------------------------------------- 6


def test_criterion_06_comoving_form_equivalence():
    rng = rng_for(6)
    worst = 0.0
    for i in range(500):
        k = NATURAL if i % 2 else SI
        g, m, F = medium_state(rng, "magneto_electric", k)
        ff = frame_fields(F, con.apply_Z(m, F, g), Observer(m.V, g), k)
        worst = max(worst, rel(st.comoving_T(ff, m.V, g).components,
                               st.abraham_T(F, m, g).components))
    ok = worst <= 1e-12
    assert record(6, "comoving form equals Abraham tensor, 500 states", ok,
                  f"max rel = {worst:.1e} (<= 1e-12)")


# ---------------------------------------------------------------- 7


def test_criterion_07_variational_oracle():
    rng = rng_for(7)
    states = [(kind,) + medium_state(rng, kind) for kind in MEDIA for _ in range(5)]
    t0 = time.perf_counter()
    agree = 0.0
    ratio_dev = 0.0
    for kind, g, m, F in states:
        G = con.apply_Z(m, F, g)
        targets = {"v_tethered": st.abraham_T(F, m, g).components,
                   "metric_independent": st.minkowski_sym_T(F, G, g).components}
        for response, exact in targets.items():
            T = st.metric_variation_oracle(F, m, g, response, st.VariationSpec(h=1e-4))
            agree = max(agree, rel(T.components, exact))
            errs = [np.max(np.abs(st.metric_variation_oracle(
                F, m, g, response, st.VariationSpec(h=h)).components - exact))
                for h in (1e-3, 5e-4, 2.5e-4)]
            for a, b in zip(errs, errs[1:]):
                ratio_dev = max(ratio_dev, abs(a / b / 4.0 - 1.0))
    elapsed = time.perf_counter() - t0
    ok = agree <= 1e-6 and ratio_dev <= 0.15 and elapsed < 10.0
    assert record(7, "metric-variation oracle, 20 states x 2 responses", ok,
                  f"max rel at h = 1e-4 {agree:.1e} (<= 1e-6), h^2 ratio deviation "
                  f"{ratio_dev:.1e} (<= 0.15), {elapsed:.1f} s (< 10 s)")


# ---------------------------------------------------------------- 8


def test_criterion_08_frame_dependent_cross_blocks():
    eta = Metric.minkowski()
    rest = np.array([1.0, 0, 0, 0])
    Zt = con.as_rank4(con.isotropic(2.0, 1.0, rest, eta, NATURAL), eta)
    out = {}
    for beta in (0.0, 0.3):
        L = lorentz_boost(beta, 1)
        obs = Observer(np.linalg.inv(L)[:, 0], eta)
        blocks = con.frame_blocks(con.effective_zetas(Zt, obs, eta, NATURAL), L)
        oracle = boosted_blocks(2.0, 1.0, L)
        cross = math.sqrt(np.sum(blocks["db"] ** 2) + np.sum(blocks["he"] ** 2))
        diff = max(np.max(np.abs(blocks[n] - oracle[n])) for n in con.BLOCKS)
        out[beta] = (cross, diff)
    ok = out[0.0][0] <= 1e-12 and out[0.3][0] > 1e-3 and out[0.3][1] <= 1e-10
    assert record(8, "frame dependence of cross blocks (eps = 2, mu = 1)", ok,
                  f"beta 0 cross norm {out[0.0][0]:.1e} (<= 1e-12); beta 0.3 cross norm "
                  f"{out[0.3][0]:.4f} (> 1e-3), oracle diff {out[0.3][1]:.1e} (<= 1e-10)")


# ---------------------------------------------------------------- 9


def _residuals(F, G, h, x):
    r1, r2 = maxwell_residuals(F, G, constant_field(KForm.zero(3)), x, h, Metric.minkowski())
    return r1.norm(), r2.norm()


def test_criterion_09_maxwell_residual_order():
    x = np.array([0.3, -0.2, 0.5, 0.1])
    steps = (1e-2, 5e-3, 2.5e-3)
    F, G = plane_wave(propagation=[0.6, 0.8, 0.0], polarization=3, frequency=2.0)
    norms = [_residuals(F, G, h, x) for h in steps]
    orders = [math.log2(norms[i][j] / norms[i + 1][j]) for j in (0, 1) for i in range(2)]
    Fb, Gb = plane_wave(propagation=[0.6, 0.8, 0.0], polarization=3, frequency=2.0,
                        dispersion_factor=1.3)
    broken = [max(_residuals(Fb, Gb, h, x)) for h in steps]
    ok = all(abs(p - 2.0) <= 0.2 for p in orders) and min(broken) > 1e-2 \
        and broken[-1] > 0.9 * broken[0]
    assert record(9, "Maxwell residual convergence, oblique vacuum plane wave", ok,
                  f"orders {', '.join(f'{p:.3f}' for p in orders)} (2.0 +- 0.2); broken "
                  f"dispersion residual {broken[0]:.3f} -> {broken[-1]:.3f} (stays away from 0)")


# ---------------------------------------------------------------- 10


def test_criterion_10_energy_momentum_projections():
    rng = rng_for(10)
    worst_u = worst_p = 0.0
    for _ in range(500):
        g, m, F = medium_state(rng, "magneto_electric", NATURAL)
        obs = Observer(m.V, g)
        ff = frame_fields(F, con.apply_Z(m, F, g), obs, NATURAL)
        T = st.comoving_T(ff, m.V, g)
        gi = g.inverse
        u = 0.5 * (ff.e.components @ gi @ ff.d.components + ff.h.components @ gi @ ff.b.components)
        worst_u = max(worst_u, abs(st.energy_density(T, obs) - u) / T.norm())
        S = st.poynting(ff.e, ff.h, m.V, g)
        worst_p = max(worst_p, np.max(np.abs(st.momentum_density(T, obs).components
                                             - S.components)) / T.norm())
    ok = worst_u <= 1e-12 and worst_p <= 1e-12
    assert record(10, "energy and momentum projections, 500 states", ok,
                  f"T(V,V) rel {worst_u:.1e}, momentum vs S~ rel {worst_p:.1e} (<= 1e-12)")


# ---------------------------------------------------------------- 11


def test_criterion_11_cli_determinism():
    cmd = [sys.executable, "-m", "covariant_em", "verify", "all", "--seed", "42"]
    runs = [subprocess.run(cmd, capture_output=True, timeout=300) for _ in range(2)]
    codes = [r.returncode for r in runs]
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    ok = codes == [0, 0] and same
    assert record(11, "CLI determinism, verify all --seed 42", ok,
                  f"exit codes {codes}, reports byte-identical: {same} "
                  f"({len(runs[0].stdout)} bytes)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
