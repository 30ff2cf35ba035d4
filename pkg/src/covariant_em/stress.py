"""Electromagnetic stress-energy tensors in a linear medium.

Two tensors are built from the same state (F, G = Z(F), medium velocity V):

* ``abraham_T``: Z responds to the metric through V~ and the Hodge star;
* ``minkowski_sym_T``: Z is held metric independent, no V appears.

Sign convention: the 3- and 4-form duals appearing in T, s and the
Poynting form are taken with ``top_star``, the Hodge star with the sign
for which *vol = +1.  With the package-wide ``hodge`` (where *vol = -1)
these expressions would carry the opposite signs; ``top_star`` is what
makes the covariant tensor, its comoving form and the metric-variation
derivative agree term by term (see ``metric_variation_oracle``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import exterior as ext
from .constitutive import (
    ConstitutiveModel,
    ConstitutiveTensor,
    SpatialLinearMap,
    apply_Z,
    as_rank4,
)
from .exterior import Constants, KForm, Metric
from .fields import FrameFields, Observer

SYMMETRY_RTOL = 1e-12
RESPONSES = ("v_tethered", "metric_independent")

# dLambda/dt = ORACLE_SCALE * sqrt|g| / c * T^{ab} dg_ab, fixed once on vacuum
ORACLE_SCALE = -0.5
MAX_CONDITION = 1e6


def top_star(w: KForm, g: Metric) -> KForm:
    """Hodge dual of a 3- or 4-form, sign chosen so that *vol = +1."""
    if w.degree < 3:
        raise ValueError("top_star acts on 3- and 4-forms only")
    return -ext.hodge(w, g)


@dataclass(frozen=True)
class StressEnergy:
    components: np.ndarray
    metric: Metric

    def __post_init__(self):
        T = np.array(self.components, dtype=float)
        if T.shape != (4, 4):
            raise ValueError("stress-energy tensor must be 4x4")
        scale = max(np.max(np.abs(T)), 1e-300)
        asym = np.max(np.abs(T - T.T)) / scale
        if asym > SYMMETRY_RTOL:
            raise ValueError(f"stress-energy tensor is not symmetric ({asym:.2e})")
        T.flags.writeable = False
        object.__setattr__(self, "components", T)

    def __call__(self, X, Y) -> float:
        return float(np.asarray(X) @ self.components @ np.asarray(Y))

    def __sub__(self, other: "StressEnergy") -> np.ndarray:
        return self.components - other.components

    def trace(self) -> float:
        return float(np.sum(self.metric.inverse * self.components))

    def norm(self) -> float:
        return float(np.max(np.abs(self.components)))


def lagrangian(F: KForm, m: ConstitutiveModel, g: Metric, k: Constants | None = None) -> KForm:
    """Lambda = F ^ *Z(F) / (2c)."""
    k = k or m.constants
    return ext.wedge(F, ext.hodge(apply_Z(m, F, g), g)) / (2 * k.c)


def s_form(F: KForm, G: KForm, V, g: Metric) -> KForm:
    """s = *(i_V F ^ i_V *G ^ V~ + i_V *F ^ i_V G ^ V~); zero in vacuum."""
    obs = Observer(V, g)
    Vt = obs.coframe
    iF, iG = ext.interior(obs.U, F), ext.interior(obs.U, G)
    iSF = ext.interior(obs.U, ext.hodge(F, g))
    iSG = ext.interior(obs.U, ext.hodge(G, g))
    three = ext.wedge(ext.wedge(iF, iSG), Vt) + ext.wedge(ext.wedge(iSF, iG), Vt)
    return top_star(three, g)


def poynting(e: KForm, h: KForm, V, g: Metric) -> KForm:
    """S~ = *(V~ ^ e ^ h)."""
    obs = Observer(V, g)
    obs.require_spatial("e", e)
    obs.require_spatial("h", h)
    return top_star(ext.wedge(ext.wedge(obs.coframe, e), h), g)


def _symmetric_part(F: KForm, G: KForm, g: Metric) -> np.ndarray:
    X = ext.contract_pair(F, G, g)
    trace = top_star(ext.wedge(F, ext.hodge(G, g)), g).scalar
    return 0.5 * (X + X.T - trace * g.components)


def minkowski_sym_T(F: KForm, G: KForm, g: Metric) -> StressEnergy:
    """1/2 i_a G (x) i^a F + 1/2 i_a F (x) i^a G - 1/2 *(F ^ *G) g."""
    return StressEnergy(_symmetric_part(F, G, g), g)


def abraham_T(F: KForm, m: ConstitutiveModel, g: Metric) -> StressEnergy:
    G = apply_Z(m, F, g)
    T = _symmetric_part(F, G, g)
    if m.kind != "vacuum":
        s = s_form(F, G, m.V, g).components
        Vt = ext.flat(m.V, g).components
        T = T + 0.5 * (np.outer(Vt, s) + np.outer(s, Vt))
    return StressEnergy(T, g)


def comoving_T(ff: FrameFields, V, g: Metric) -> StressEnergy:
    """The manifestly symmetric form in terms of fields measured at V.

    The Poynting term is divided by c so every term is an energy density.
    """
    obs = Observer(V, g)
    for name in ("e", "b", "d", "h"):
        obs.require_spatial(name, getattr(ff, name))
    e, b, d, h = (x.components for x in (ff.e, ff.b, ff.d, ff.h))
    gi, gg = g.inverse, g.components
    Vt = obs.coframe.components
    S = poynting(ff.e, ff.h, V, g).components / ff.constants.c
    scalar = float(e @ gi @ d + h @ gi @ b)
    T = (
        -0.5 * (np.outer(e, d) + np.outer(d, e))
        - 0.5 * (np.outer(h, b) + np.outer(b, h))
        + 0.5 * scalar * (gg + 2.0 * np.outer(Vt, Vt))
        + np.outer(Vt, S) + np.outer(S, Vt)
    )
    return StressEnergy(T, g)


def energy_density(T: StressEnergy, obs: Observer) -> float:
    return T(obs.U, obs.U)


def momentum_density(T: StressEnergy, obs: Observer, g: Metric | None = None) -> KForm:
    """Spatial part of -T(U, .); equals S~/c for a comoving observer."""
    g = g or obs.g
    row = KForm(1, -(obs.U @ T.components))
    return Observer(obs.U, g).project(row)


def _symmetric_basis() -> list[np.ndarray]:
    out = []
    for a in range(4):
        for b in range(a, 4):
            D = np.zeros((4, 4))
            D[a, b] = D[b, a] = 1.0
            out.append(D)
    return out


@dataclass(frozen=True)
class VariationSpec:
    """Metric perturbation directions and central-difference settings."""

    h: float = 1e-4
    richardson: bool = False
    directions: Sequence[np.ndarray] = field(default_factory=_symmetric_basis)
    tethering: str = "vector"

    def __post_init__(self):
        if not 1e-6 <= self.h <= 1e-2:
            raise ValueError(f"step h = {self.h} outside [1e-6, 1e-2]")
        if len(self.directions) != 10:
            raise ValueError("exactly 10 symmetric directions are required")
        for D in self.directions:
            D = np.asarray(D, dtype=float)
            if D.shape != (4, 4) or np.max(np.abs(D - D.T)) > 0:
                raise ValueError("perturbation directions must be symmetric 4x4")
        if self.tethering not in ("vector", "covector"):
            raise ValueError("tethering must be 'vector' or 'covector'")


class OracleConditioningError(ValueError):
    pass


def _perturbed_model(m: ConstitutiveModel, g: Metric, gp: Metric,
                     tethering: str) -> ConstitutiveModel:
    if tethering == "vector" or m.kind == "vacuum":
        return m.retether(gp)
    # exploration only: keep V~ = g(V, -) fixed, recover V from g'
    Vt = g.components @ m.V
    Vnew = gp.inverse @ Vt
    Vnew = Vnew / np.sqrt(-gp.dot(Vnew, Vnew))
    zetas = {n: SpatialLinearMap(z.components, Vnew) for n, z in m.zetas.items()}
    return replace(m, V=Vnew, zetas=zetas, metric=gp)


def action_density(F: KForm, m: ConstitutiveModel, g: Metric, gp: Metric,
                   response: str, tethering: str = "vector",
                   frozen: ConstitutiveTensor | None = None) -> float:
    """Lambda evaluated at the perturbed metric gp under a response model.

    ``frozen`` may carry as_rank4(m, g) to avoid rebuilding it per call.
    """
    k = m.constants
    if response == "v_tethered":
        G = apply_Z(_perturbed_model(m, g, gp, tethering), F, gp)
    elif response == "metric_independent":
        # the 6x6 matrix G_ab <- F_cd, materialized at the base metric
        G = (frozen or as_rank4(m, g))(F)
    else:
        raise ValueError(f"unknown response {response!r}")
    return ext.wedge(F, ext.hodge(G, gp)).scalar / (2 * k.c)


def directional_derivative(F, m, g, response, delta, h, richardson=False,
                           tethering="vector", frozen=None) -> float:
    if response == "metric_independent" and frozen is None:
        frozen = as_rank4(m, g)

    def central(step):
        plus = action_density(F, m, g, g.perturbed(delta, step), response,
                              tethering, frozen)
        minus = action_density(F, m, g, g.perturbed(delta, -step), response,
                               tethering, frozen)
        return (plus - minus) / (2 * step)

    d1 = central(h)
    if not richardson:
        return d1
    return (4.0 * central(h / 2) - d1) / 3.0


def metric_variation_oracle(F: KForm, m: ConstitutiveModel, g: Metric,
                            response: str,
                            spec: VariationSpec | None = None) -> StressEnergy:
    """Stress-energy tensor from finite differences of Lambda(g + t dg).

    Only constant perturbations at a point are used: Lambda contains no
    derivatives of g, so no integration-by-parts terms arise.  The tensor
    is recovered from the 10 directional derivatives
        dLambda/dt = ORACLE_SCALE sqrt|g|/c T^{ab} dg_ab.
    """
    spec = spec or VariationSpec()
    if response not in RESPONSES:
        raise ValueError(f"unknown response {response!r}")
    k = m.constants
    pairs = _symmetric_basis()
    # rows: directions; columns: the independent T^{ab}, a <= b
    A = np.array([[np.sum(np.asarray(D) * P) for P in pairs] for D in spec.directions])
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise OracleConditioningError(
            f"perturbation directions are ill-conditioned (cond = {cond:.3e})"
        )
    frozen = as_rank4(m, g) if response == "metric_independent" else None
    rhs = np.array([
        directional_derivative(F, m, g, response, D, spec.h, spec.richardson,
                               spec.tethering, frozen)
        for D in spec.directions
    ])
    unique = np.linalg.solve(A, rhs) * k.c / (ORACLE_SCALE * g.sqrt_abs_det)
    Tup = sum(value * P for value, P in zip(unique, pairs))
    return StressEnergy(g.components @ Tup @ g.components, g)
