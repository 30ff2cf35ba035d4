"""Linear, pointwise constitutive models G = Z(F).

A medium is described by its 4-velocity V and four spatial maps on 1-forms
(zeta_de, zeta_db, zeta_he, zeta_hb) so that a comoving observer measures

    d = zeta_de(e) + zeta_db(b),    h = zeta_he(e) + zeta_hb(b).

Covariantly, with e = i_V F and b = i_V *F / c,

    Z(F) = zeta_de(e)^V~ + zeta_db(b)^V~ - *(zeta_he(e)/c ^ V~) - *(zeta_hb(b)/c ^ V~).

The c factors are placed so that the comoving relation above holds in SI
units as well as in natural units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from . import exterior as ext
from .exterior import BASIS, Constants, KForm, Metric
from .fields import (
    Observer,
    decompose_F,
    decompose_G,
    reconstruct_F,
)

Scalar = Union[float, Callable[[np.ndarray], float]]
KINDS = ("vacuum", "isotropic", "anisotropic", "magneto_electric")
BLOCKS = ("de", "db", "he", "hb")
SPATIAL_MAP_TOL = 1e-12


@dataclass(frozen=True)
class SpatialLinearMap:
    """A map on 1-forms, (zeta a)_i = M[i, j] a_j, spatial relative to V."""

    components: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        M = np.array(self.components, dtype=float)
        if M.shape != (4, 4):
            raise ValueError("spatial map must be 4x4")
        M.flags.writeable = False
        object.__setattr__(self, "components", M)
        object.__setattr__(self, "V", np.asarray(self.V, dtype=float))

    def __call__(self, a: KForm) -> KForm:
        return KForm(1, self.components @ a.components)

    def violation(self, g: Metric) -> float:
        """Largest of |zeta(V~)| and |i_V zeta(.)|, relative to |M|."""
        M = self.components
        scale = max(np.max(np.abs(M)), 1e-300)
        Vt = g.components @ self.V
        return float(max(np.max(np.abs(M @ Vt)), np.max(np.abs(self.V @ M))) / scale)

    def contravariant(self, g: Metric) -> np.ndarray:
        """K^{ij} = g^{ik} M_k^j, the bilinear form on 1-forms."""
        return g.inverse @ self.components

    @classmethod
    def zero(cls, V) -> "SpatialLinearMap":
        return cls(np.zeros((4, 4)), V)

    @classmethod
    def project(cls, matrix, V, g: Metric) -> "SpatialLinearMap":
        """Make any 4x4 map spatial by sandwiching it between projectors."""
        P = Observer(V, g).projector()
        return cls(P @ np.asarray(matrix, dtype=float) @ P, V)

    @classmethod
    def symmetric(cls, matrix, V, g: Metric) -> "SpatialLinearMap":
        """Spatial map whose contravariant form is symmetric.

        ``matrix`` is read as a contravariant bilinear form; only its
        symmetric part is used.
        """
        K0 = np.asarray(matrix, dtype=float)
        K0 = 0.5 * (K0 + K0.T)
        Pv = Observer(V, g).projector().T
        return cls(g.components @ (Pv @ K0 @ Pv.T), V)

    @classmethod
    def scaled_identity(cls, scale: float, V, g: Metric) -> "SpatialLinearMap":
        return cls(scale * Observer(V, g).projector(), V)

    def adjoint(self, g: Metric) -> "SpatialLinearMap":
        """Adjoint with respect to g^{-1}: K -> K^T."""
        K = self.contravariant(g)
        return SpatialLinearMap(g.components @ K.T, self.V)


@dataclass(frozen=True)
class ConstitutiveModel:
    """A medium at a point (or, before ``evaluate_at``, over a region).

    ``params`` keeps the scalar inputs (eps, mu) of the isotropic variant,
    which may be callables of the coordinates; ``zetas`` holds the four
    spatial maps once the model is pointwise.
    """

    kind: str
    V: np.ndarray | None
    constants: Constants
    zetas: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    metric: Metric | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown medium kind {self.kind!r}")
        if self.kind != "vacuum" and self.V is None:
            raise ValueError(f"{self.kind} medium requires a 4-velocity V")
        if self.V is not None:
            object.__setattr__(self, "V", np.asarray(self.V, dtype=float))
        if self.kind == "isotropic" and self.is_pointwise:
            if self.params["mu"] == 0:
                raise ValueError("relative permeability mu must be non-zero")
        for name, zeta in self.zetas.items():
            if not np.allclose(zeta.V, self.V, rtol=0, atol=1e-15):
                raise ValueError(f"zeta_{name} refers to a different V")

    @property
    def is_pointwise(self) -> bool:
        return not any(callable(v) for v in self.params.values())

    def zeta(self, block: str) -> SpatialLinearMap:
        if self.kind == "vacuum":
            raise ValueError("the vacuum model carries no zeta maps")
        if not self.is_pointwise:
            raise ValueError("call evaluate_at(x) before using an inhomogeneous model")
        return self.zetas.get(block) or SpatialLinearMap.zero(self.V)

    def evaluate_at(self, x) -> "ConstitutiveModel":
        """Pointwise model with every scalar field evaluated at x."""
        if self.is_pointwise:
            return self
        x = np.asarray(x, dtype=float)
        params = {k: (v(x) if callable(v) else v) for k, v in self.params.items()}
        return isotropic(params["eps"], params["mu"], self.V, self.metric,
                         self.constants)

    def retether(self, g: Metric) -> "ConstitutiveModel":
        """Same zeta components and V direction, V renormalized under g."""
        if self.kind == "vacuum":
            return replace(self, metric=g)
        V = self.V / math.sqrt(-g.dot(self.V, self.V))
        zetas = {n: SpatialLinearMap(z.components, V) for n, z in self.zetas.items()}
        return replace(self, V=V, zetas=zetas, metric=g)

    def observer(self, g: Metric) -> Observer:
        return Observer(self.V, g)


def vacuum(k: Constants) -> ConstitutiveModel:
    return ConstitutiveModel("vacuum", None, k)


def isotropic(eps: Scalar, mu: Scalar, V, g: Metric, k: Constants) -> ConstitutiveModel:
    """d = eps0 eps e and h = b/(mu0 mu) for a comoving observer."""
    V = np.asarray(V, dtype=float)
    params = {"eps": eps, "mu": mu}
    if callable(eps) or callable(mu):
        return ConstitutiveModel("isotropic", V, k, params=params, metric=g)
    if mu == 0:
        raise ValueError("relative permeability mu must be non-zero")
    zetas = {
        "de": SpatialLinearMap.scaled_identity(k.eps0 * eps, V, g),
        "hb": SpatialLinearMap.scaled_identity(1.0 / (k.mu0 * mu), V, g),
    }
    return ConstitutiveModel("isotropic", V, k, zetas=zetas, params=params, metric=g)


def _require_spatial_maps(zetas: dict, g: Metric):
    for name, zeta in zetas.items():
        violation = zeta.violation(g)
        if violation > SPATIAL_MAP_TOL:
            raise ValueError(f"zeta_{name} is not spatial (violation {violation:.3e})")


def anisotropic(zeta_de: SpatialLinearMap, zeta_hb: SpatialLinearMap, V, g: Metric,
                k: Constants) -> ConstitutiveModel:
    _require_spatial_maps({"de": zeta_de, "hb": zeta_hb}, g)
    return ConstitutiveModel(
        "anisotropic", V, k, zetas={"de": zeta_de, "hb": zeta_hb}, metric=g
    )


def magneto_electric(zeta_de, zeta_db, zeta_he, zeta_hb, V, g: Metric,
                     k: Constants) -> ConstitutiveModel:
    zetas = {"de": zeta_de, "db": zeta_db, "he": zeta_he, "hb": zeta_hb}
    _require_spatial_maps(zetas, g)
    return ConstitutiveModel("magneto_electric", V, k, zetas=zetas, metric=g)


def self_adjoint_magneto_electric(K_de, K_db, K_hb, V, g: Metric,
                                  k: Constants) -> ConstitutiveModel:
    """Magneto-electric medium whose Z is self-adjoint.

    K_de and K_hb are read as contravariant forms and symmetrized; zeta_he
    is fixed by zeta_he = -adjoint(zeta_db), i.e. K_he = -K_db^T.  The
    relation was found by scanning the asymmetry of the pairing
    F1 ^ *Z(F2) over sign and transpose choices.
    """
    zde = SpatialLinearMap.symmetric(K_de, V, g)
    zhb = SpatialLinearMap.symmetric(K_hb, V, g)
    zdb = SpatialLinearMap.project(g.components @ np.asarray(K_db, float), V, g)
    zhe = SpatialLinearMap(-zdb.adjoint(g).components, V)
    return magneto_electric(zde, zdb, zhe, zhb, V, g, k)


def _require_pointwise_unit(m: ConstitutiveModel, g: Metric) -> Observer:
    if not m.is_pointwise:
        raise ValueError("call evaluate_at(x) before using an inhomogeneous model")
    return Observer(m.V, g)


def apply_Z(m: ConstitutiveModel, F: KForm, g: Metric) -> KForm:
    ext._require_degree(F, 2)
    k = m.constants
    if m.kind == "vacuum":
        return k.eps0 * F
    obs = _require_pointwise_unit(m, g)
    Vt = obs.coframe
    e = ext.interior(obs.U, F)
    b = ext.interior(obs.U, ext.hodge(F, g)) / k.c
    d = m.zeta("de")(e) + m.zeta("db")(b)
    h = m.zeta("he")(e) + m.zeta("hb")(b)
    return ext.wedge(d, Vt) - ext.hodge(ext.wedge(h / k.c, Vt), g)


def comoving_dh(m: ConstitutiveModel, e: KForm, b: KForm,
                g: Metric | None = None) -> tuple[KForm, KForm]:
    k = m.constants
    if m.kind == "vacuum":
        return k.eps0 * e, b / k.mu0
    obs = Observer(m.V, g or m.metric)
    obs.require_spatial("e", e)
    obs.require_spatial("b", b)
    d = m.zeta("de")(e) + m.zeta("db")(b)
    h = m.zeta("he")(e) + m.zeta("hb")(b)
    return d, h


@dataclass(frozen=True)
class ConstitutiveTensor:
    """Z as a 6x6 matrix acting on lexicographic 2-form components."""

    matrix: np.ndarray
    metric: Metric
    constants: Constants

    def __call__(self, F: KForm) -> KForm:
        return KForm(2, self.matrix @ F.components)

    def to_array(self) -> np.ndarray:
        """Z_{ab}^{cd} with G_{ab} = 1/2 Z_{ab}^{cd} F_{cd}."""
        out = np.zeros((4, 4, 4, 4))
        for j, idx in enumerate(BASIS[2]):
            col = KForm(2, self.matrix[:, j]).to_array()
            c, d = idx
            out[:, :, c, d] = col
            out[:, :, d, c] = -col
        return out

    @classmethod
    def from_array(cls, Z, metric: Metric, constants: Constants) -> "ConstitutiveTensor":
        Z = np.asarray(Z, dtype=float)
        cols = [KForm.from_array(Z[:, :, c, d]).components for c, d in BASIS[2]]
        return cls(np.array(cols).T, metric, constants)


def two_form_basis() -> list[KForm]:
    return [KForm(2, np.eye(6)[i]) for i in range(6)]


def as_rank4(m: ConstitutiveModel, g: Metric) -> ConstitutiveTensor:
    cols = [apply_Z(m, B, g).components for B in two_form_basis()]
    return ConstitutiveTensor(np.array(cols).T, g, m.constants)


def pairing_matrix(Zt: ConstitutiveTensor, g: Metric) -> np.ndarray:
    """P[i, j] = B_i ^ *Z(B_j) over the 2-form basis (dx0123 coefficient)."""
    basis = two_form_basis()
    duals = [ext.hodge(Zt(B), g) for B in basis]
    return np.array([[ext.wedge(Bi, D).scalar for D in duals] for Bi in basis])


def check_self_adjoint(Zt: ConstitutiveTensor, g: Metric,
                       tol: float = 1e-12) -> tuple[bool, float]:
    """Returns (passed, max asymmetry relative to the largest pairing)."""
    P = pairing_matrix(Zt, g)
    scale = np.max(np.abs(P))
    if scale == 0:
        return True, 0.0
    violation = float(np.max(np.abs(P - P.T)) / scale)
    return violation <= tol, violation


def spatial_coframe(obs: Observer) -> list[KForm]:
    """Three 1-forms spanning the annihilator of U (projected dx^1..dx^3)."""
    return [obs.project(KForm.basis(i)) for i in (1, 2, 3)]


def effective_zetas(Zt: ConstitutiveTensor, obs: Observer, g: Metric,
                    k: Constants) -> dict[str, SpatialLinearMap]:
    """The four zeta maps that observer ``obs`` would infer from Z."""
    sigma = spatial_coframe(obs)
    zero = KForm.zero(1)
    outputs = {name: [] for name in BLOCKS}
    for s in sigma:
        d, h = decompose_G(Zt(reconstruct_F(s, zero, obs, k)), obs, k)
        outputs["de"].append(d.components)
        outputs["he"].append(h.components)
        d, h = decompose_G(Zt(reconstruct_F(zero, s, obs, k)), obs, k)
        outputs["db"].append(d.components)
        outputs["hb"].append(h.components)
    # columns: the three spatial inputs plus U~, which every map sends to 0
    inputs = np.column_stack([s.components for s in sigma] + [obs.coframe.components])
    inv = np.linalg.inv(inputs)
    result = {}
    for name in BLOCKS:
        images = np.column_stack(outputs[name] + [np.zeros(4)])
        result[name] = SpatialLinearMap(images @ inv, obs.U)
    return result


def frame_blocks(zetas: dict[str, SpatialLinearMap], L: np.ndarray) -> dict[str, np.ndarray]:
    """3x3 spatial blocks of each zeta in flat coordinates x' = L x.

    Meaningful when the zetas are spatial for the observer at rest in the
    primed coordinates; row and column 0 then vanish.
    """
    Linv = np.linalg.inv(L)
    return {name: (Linv.T @ z.components @ L.T)[1:, 1:] for name, z in zetas.items()}


def random_model(kind: str, rng: np.random.Generator, g: Metric, k: Constants,
                 V=None, self_adjoint: bool = True) -> ConstitutiveModel:
    """A random pointwise medium of the given kind (used by the checks)."""
    if kind == "vacuum":
        return vacuum(k)
    if V is None:
        V = Observer.normalized(
            np.concatenate([[1.0], rng.uniform(-0.4, 0.4, 3)]), g
        ).U
    if kind == "isotropic":
        return isotropic(rng.uniform(1, 5), rng.uniform(0.5, 3), V, g, k)

    def spd():
        A = rng.normal(size=(4, 4))
        return A @ A.T + 4 * np.eye(4)

    if kind == "anisotropic":
        zde = SpatialLinearMap.symmetric(k.eps0 * spd(), V, g)
        zhb = SpatialLinearMap.symmetric(spd() / k.mu0, V, g)
        return anisotropic(zde, zhb, V, g, k)
    if kind == "magneto_electric":
        cross = rng.normal(size=(4, 4)) * math.sqrt(k.eps0 / k.mu0)
        if self_adjoint:
            return self_adjoint_magneto_electric(
                k.eps0 * spd(), cross, spd() / k.mu0, V, g, k
            )
        return magneto_electric(
            SpatialLinearMap.project(k.eps0 * rng.normal(size=(4, 4)), V, g),
            SpatialLinearMap.project(g.components @ cross, V, g),
            SpatialLinearMap.project(g.components @ rng.normal(size=(4, 4))
                                     * math.sqrt(k.eps0 / k.mu0), V, g),
            SpatialLinearMap.project(rng.normal(size=(4, 4)) / k.mu0, V, g),
            V, g, k,
        )
    raise ValueError(f"unknown medium kind {kind!r}")
