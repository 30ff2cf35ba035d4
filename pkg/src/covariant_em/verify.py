"""Seeded invariant suites behind ``covem verify``.

Each check draws from its own generator, seeded from (seed, crc32(name)),
so a check gives the same result whether it runs alone or inside ``all``.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constitutive as con
from . import exterior as ext
from . import fields as fl
from . import stress as st
from .exterior import NATURAL, SI, KForm, Metric
from .sampling import (
    field_scale,
    random_form,
    random_medium,
    random_metric,
    random_observer,
    random_spatial,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    suite: str
    violation: float
    threshold: float
    samples: int

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.violation) and self.violation <= self.threshold)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "suite": self.suite,
            "samples": self.samples,
            "violation": float(self.violation),
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    threshold: float
    samples: int
    run: Callable[[np.random.Generator, int], float]


def rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


CHECKS: list[Check] = []


def check(suite: str, threshold: float, samples: int):
    def register(fn):
        CHECKS.append(Check(fn.__name__, suite, threshold, samples, fn))
        return fn
    return register


# exterior algebra ----------------------------------------------------------

@check("exterior", 1e-12, 200)
def hodge_involution(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        for k in range(5):
            w = random_form(rng, k)
            sign = (-1) ** (k * (4 - k)) * -1
            worst = max(worst, rel(ext.hodge(ext.hodge(w, g), g).components,
                                   sign * w.components))
    return worst


@check("exterior", 1e-12, 200)
def hodge_inner_product(rng, n):
    """a ^ *b = <a, b> vol with <,> computed without the star."""
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        k = int(rng.integers(0, 5))
        a, b = random_form(rng, k), random_form(rng, k)
        lhs = ext.wedge(a, ext.hodge(b, g)).scalar
        rhs = ext.inner(a, b, g) * g.sqrt_abs_det
        worst = max(worst, abs(lhs - rhs) / max(a.norm() * b.norm() * g.sqrt_abs_det, 1e-300))
    return worst


@check("exterior", 1e-12, 50)
def hodge_orientation(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        star1 = ext.hodge(KForm(0, [1.0]), g).scalar
        worst = max(worst, abs(star1 - g.sqrt_abs_det) / g.sqrt_abs_det)
    return worst


@check("exterior", 1e-12, 200)
def duality_pairing(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        k = int(rng.integers(0, 5))
        a, b = random_form(rng, k), random_form(rng, k)
        worst = max(worst, rel(ext.wedge(a, ext.hodge(b, g)).components,
                               ext.wedge(b, ext.hodge(a, g)).components))
    return worst


@check("exterior", 1e-12, 200)
def graded_commutativity(rng, n):
    worst = 0.0
    for _ in range(n):
        p = int(rng.integers(0, 5))
        q = int(rng.integers(0, 5 - p))
        a, b = random_form(rng, p), random_form(rng, q)
        worst = max(worst, rel(ext.wedge(a, b).components,
                               (-1) ** (p * q) * ext.wedge(b, a).components))
    return worst


@check("exterior", 1e-12, 200)
def interior_leibniz(rng, n):
    worst = 0.0
    for _ in range(n):
        p = int(rng.integers(1, 4))
        q = int(rng.integers(1, 5 - p))
        a, b = random_form(rng, p), random_form(rng, q)
        X = rng.normal(size=4)
        lhs = ext.interior(X, ext.wedge(a, b))
        rhs = ext.wedge(ext.interior(X, a), b) + (-1) ** p * ext.wedge(a, ext.interior(X, b))
        worst = max(worst, rel(lhs.components, rhs.components))
    return worst


@check("exterior", 1e-12, 200)
def sharp_flat_roundtrip(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        w = random_form(rng, 1)
        worst = max(worst, rel(ext.flat(ext.sharp(w, g), g).components, w.components))
    return worst


def _poly_field(coeffs: np.ndarray, degree: int) -> ext.FormField:
    """Components quadratic in x: c0 + C1 x + x^T C2 x per component."""
    c0, c1, c2 = coeffs

    def f(x):
        return KForm(degree, c0 + c1 @ x + np.einsum("nij,i,j->n", c2, x, x))

    return ext.FormField(f, degree)


@check("exterior", 1e-6, 10)
def d_squared_zero(rng, n):
    worst = 0.0
    for _ in range(n):
        k = int(rng.integers(0, 3))
        m = len(ext.BASIS[k])
        coeffs = (rng.normal(size=m), rng.normal(size=(m, 4)), rng.normal(size=(m, 4, 4)))
        f = _poly_field(coeffs, k)
        df = ext.FormField(lambda x: ext.ext_deriv_fd(f, x, 1e-3), k + 1)
        x = rng.normal(size=4)
        ddf = ext.ext_deriv_fd(df, x, 1e-3)
        worst = max(worst, ddf.norm() / max(ext.ext_deriv_fd(f, x, 1e-3).norm(), 1.0))
    return worst


# observer decomposition ----------------------------------------------------

@check("fields", 1e-12, 200)
def decomposition_roundtrip(rng, n):
    worst = 0.0
    for i in range(n):
        k = SI if i % 4 == 0 else NATURAL
        g = random_metric(rng)
        obs = random_observer(rng, g)
        F = random_form(rng, 2, field_scale(k))
        e, b = fl.decompose_F(F, obs, k)
        worst = max(worst, rel(fl.reconstruct_F(e, b, obs, k).components, F.components))
        d, h = fl.decompose_G(k.eps0 * F, obs, k)
        worst = max(worst, rel(fl.reconstruct_G(d, h, obs, k).components,
                               k.eps0 * F.components))
        e0, b0 = random_spatial(rng, obs), random_spatial(rng, obs, 1 / k.c)
        e1, b1 = fl.decompose_F(fl.reconstruct_F(e0, b0, obs, k), obs, k)
        worst = max(worst, rel(e1.components, e0.components),
                    rel(k.c * b1.components, k.c * b0.components))
    return worst


@check("fields", 1e-12, 200)
def frame_fields_spatial(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        obs = random_observer(rng, g)
        F = random_form(rng, 2)
        for a in fl.decompose_F(F, obs, NATURAL):
            worst = max(worst, abs(float(obs.U @ a.components)) / max(F.norm(), 1e-300))
    return worst


@check("fields", 1e-12, 100)
def vacuum_dh_relation(rng, n):
    worst = 0.0
    k = SI
    for _ in range(n):
        g = random_metric(rng)
        obs = random_observer(rng, g)
        F = random_form(rng, 2, field_scale(k))
        e, b = fl.decompose_F(F, obs, k)
        d, h = fl.decompose_G(k.eps0 * F, obs, k)
        worst = max(worst, rel(d.components, k.eps0 * e.components),
                    rel(h.components, b.components / k.mu0))
    return worst


@check("fields", 1e-12, 100)
def frame_covariance(rng, n):
    """Decomposing boosted F with the boosted observer carries (e, b) by L."""
    worst = 0.0
    g = Metric.minkowski()
    for _ in range(n):
        obs = random_observer(rng, g)
        L = fl.lorentz_boost(rng.uniform(-0.9, 0.9), int(rng.integers(1, 4)))
        F = random_form(rng, 2)
        e, b = fl.decompose_F(F, obs, NATURAL)
        obs2 = fl.Observer(L @ obs.U, g)
        e2, b2 = fl.decompose_F(fl.transform_form(F, L), obs2, NATURAL)
        worst = max(worst, rel(e2.components, fl.transform_form(e, L).components),
                    rel(b2.components, fl.transform_form(b, L).components))
    return worst


@check("fields", 0.2, 1)
def plane_wave_order(rng, n):
    """|measured order - 2| for the vacuum plane wave residuals."""
    x = rng.uniform(-1, 1, 4)
    Ff, Gf = fl.plane_wave(polarization=[0.0, 0.0, 1.0],
                           propagation=[0.6, 0.8, 0.0], frequency=2.0)
    zero = ext.constant_field(KForm.zero(3))
    g = Metric.minkowski()
    worst = 0.0
    for which in (0, 1):
        errs = [fl.maxwell_residuals(Ff, Gf, zero, x, h, g)[which].norm()
                for h in (0.02, 0.01, 0.005)]
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        worst = max(worst, *(abs(o - 2.0) for o in orders))
    return worst


# constitutive relations ----------------------------------------------------

@check("constitutive", 1e-12, 100)
def comoving_consistency(rng, n):
    worst = 0.0
    for i in range(n):
        k = SI if i % 5 == 0 else NATURAL
        g = random_metric(rng)
        for kind in con.KINDS:
            m = random_medium(rng, kind, g, k)
            obs = fl.Observer(m.V, g) if m.V is not None else random_observer(rng, g)
            F = random_form(rng, 2, field_scale(k))
            d, h = fl.decompose_G(con.apply_Z(m, F, g), obs, k)
            d0, h0 = con.comoving_dh(m, *fl.decompose_F(F, obs, k), g)
            worst = max(worst, rel(d.components, d0.components),
                        rel(h.components, h0.components))
    return worst


@check("constitutive", 1e-12, 100)
def self_adjoint_constructor(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        for kind in ("isotropic", "anisotropic", "magneto_electric"):
            m = random_medium(rng, kind, g, NATURAL)
            worst = max(worst, con.check_self_adjoint(con.as_rank4(m, g), g)[1])
    return worst


@check("constitutive", 1e-12, 100)
def rank4_faithful(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        m = random_medium(rng, "magneto_electric", g, NATURAL, self_adjoint=False)
        Zt = con.as_rank4(m, g)
        F = random_form(rng, 2)
        worst = max(worst, rel(Zt(F).components, con.apply_Z(m, F, g).components))
    return worst


@check("constitutive", 1e-12, 50)
def vacuum_frame_independence(rng, n):
    worst = 0.0
    for _ in range(n):
        g = random_metric(rng)
        obs = random_observer(rng, g)
        z = con.effective_zetas(con.as_rank4(con.vacuum(NATURAL), g), obs, g, NATURAL)
        P = obs.projector()
        worst = max(worst, rel(z["de"].components, P), rel(z["hb"].components, P),
                    np.max(np.abs(z["db"].components)), np.max(np.abs(z["he"].components)))
    return worst


@check("constitutive", 1e-12, 1)
def boost_continuity(rng, n):
    """Cross blocks vanish at beta = 0, grow continuously, are O(1) at 0.3."""
    g = Metric.minkowski()
    m = con.isotropic(2.0, 1.0, [1.0, 0, 0, 0], g, NATURAL)
    Zt = con.as_rank4(m, g)
    norms = []
    for beta in (0.0, 1e-3, 1e-2, 0.1, 0.3, 0.9):
        z = con.effective_zetas(Zt, fl.boosted_observer(beta, 1, g), g, NATURAL)
        norms.append(np.linalg.norm(z["db"].components) + np.linalg.norm(z["he"].components))
    violation = norms[0]
    if not (norms[4] > 1e-3 and all(a < b for a, b in zip(norms[:-1], norms[1:]))):
        violation = max(violation, 1.0)
    return violation


# stress-energy --------------------------------------------------------------

def _state(rng, kind, k=NATURAL, g=None):
    g = g or random_metric(rng)
    m = random_medium(rng, kind, g, k)
    F = random_form(rng, 2, field_scale(k))
    return g, m, F, con.apply_Z(m, F, g)


@check("stress", 1e-13, 200)
def vacuum_degeneracy(rng, n):
    worst = 0.0
    for _ in range(n):
        g, m, F, G = _state(rng, "vacuum")
        obs = random_observer(rng, g)
        s = st.s_form(F, G, obs.U, g)
        worst = max(worst, s.norm() / (F.norm() * G.norm()),
                    rel(st.abraham_T(F, m, g).components,
                        st.minkowski_sym_T(F, G, g).components))
    return worst


@check("stress", 1e-12, 200)
def difference_law(rng, n):
    worst = 0.0
    for _ in range(n):
        g, m, F, G = _state(rng, "magneto_electric")
        s = st.s_form(F, G, m.V, g).components
        Vt = ext.flat(m.V, g).components
        gap = st.abraham_T(F, m, g) - st.minkowski_sym_T(F, G, g)
        expected = 0.5 * (np.outer(Vt, s) + np.outer(s, Vt))
        worst = max(worst, rel(gap, expected) * rel_scale(gap, st.abraham_T(F, m, g)))
    return worst


def rel_scale(part, whole) -> float:
    """Express a difference relative to the full tensor rather than the gap."""
    p = max(np.max(np.abs(part)), 1e-300)
    return min(1.0, p / max(whole.norm(), 1e-300))


@check("stress", 1e-12, 200)
def comoving_equivalence(rng, n):
    worst = 0.0
    for i in range(n):
        kind = con.KINDS[1 + i % 3]
        g, m, F, G = _state(rng, kind, SI if i % 7 == 0 else NATURAL)
        ff = fl.frame_fields(F, G, fl.Observer(m.V, g), m.constants)
        worst = max(worst, rel(st.abraham_T(F, m, g).components,
                               st.comoving_T(ff, m.V, g).components))
    return worst


@check("stress", 1e-12, 200)
def energy_momentum_projection(rng, n):
    worst = 0.0
    for i in range(n):
        g, m, F, G = _state(rng, con.KINDS[1 + i % 3])
        obs = fl.Observer(m.V, g)
        ff = fl.frame_fields(F, G, obs, NATURAL)
        T = st.abraham_T(F, m, g)
        energy = 0.5 * (g.inverse_dot(ff.e, ff.d) + g.inverse_dot(ff.h, ff.b))
        S = st.poynting(ff.e, ff.h, m.V, g)
        worst = max(worst, abs(st.energy_density(T, obs) - energy) / T.norm(),
                    rel(st.momentum_density(T, obs).components, S.components)
                    * rel_scale(S.components, T))
    return worst


@check("stress", 1e-10, 100)
def tensoriality(rng, n):
    worst = 0.0
    g = Metric.minkowski()
    for _ in range(n):
        _, m, F, _ = _state(rng, "magneto_electric", g=g)
        L = fl.lorentz_boost(rng.uniform(-0.8, 0.8), int(rng.integers(1, 4)))
        Linv = np.linalg.inv(L)
        T = st.abraham_T(F, m, g).components
        # boosted state: every ingredient carried by L
        zetas = {
            name: con.SpatialLinearMap(Linv.T @ z.components @ L.T, L @ m.V)
            for name, z in m.zetas.items()
        }
        m2 = con.magneto_electric(zetas["de"], zetas["db"], zetas["he"], zetas["hb"],
                                  L @ m.V, g, NATURAL)
        T2 = st.abraham_T(fl.transform_form(F, L), m2, g).components
        worst = max(worst, rel(T2, Linv.T @ T @ Linv))
    return worst


# variational oracle ---------------------------------------------------------

@check("oracle", 1e-6, 4)
def oracle_agreement(rng, n):
    worst = 0.0
    for i in range(n):
        for kind in con.KINDS:
            g, m, F, G = _state(rng, kind)
            va = st.metric_variation_oracle(F, m, g, "v_tethered")
            mi = st.metric_variation_oracle(F, m, g, "metric_independent")
            worst = max(worst, rel(va.components, st.abraham_T(F, m, g).components),
                        rel(mi.components, st.minkowski_sym_T(F, G, g).components))
    return worst


@check("oracle", 0.15, 2)
def oracle_convergence(rng, n):
    """Relative deviation of the error ratio under h -> h/2 from 4."""
    worst = 0.0
    for _ in range(n):
        g, m, F, G = _state(rng, "magneto_electric")
        T = st.abraham_T(F, m, g).components
        errs = [
            np.max(np.abs(st.metric_variation_oracle(
                F, m, g, "v_tethered", st.VariationSpec(h=h)).components - T))
            for h in (1e-3, 5e-4, 2.5e-4)
        ]
        for a, b in zip(errs[:-1], errs[1:]):
            worst = max(worst, abs(a / b / 4.0 - 1.0))
    return worst


SUITES = {
    "exterior": ("exterior",),
    "hodge": ("exterior",),
    "fields": ("fields",),
    "constitutive": ("constitutive",),
    "stress": ("stress",),
    "oracle": ("oracle",),
    "all": ("exterior", "fields", "constitutive", "stress", "oracle"),
}


def run_suite(suite: str, seed: int) -> list[CheckResult]:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    selected = SUITES[suite]
    results = []
    for chk in CHECKS:
        if chk.suite not in selected:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(chk.name.encode())]))
        violation = chk.run(rng, chk.samples)
        results.append(CheckResult(chk.name, chk.suite, violation, chk.threshold, chk.samples))
    return results
