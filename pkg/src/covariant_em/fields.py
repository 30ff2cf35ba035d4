"""Observer-relative split of the Maxwell and excitation 2-forms.

For a unit timelike observer U:

    e = i_U F,   c b = i_U *F,          F = e ^ U~ - *(c b ^ U~)
    d = i_U G,   h/c = i_U *G,          G = d ^ U~ - *((h/c) ^ U~)

where U~ = g(U, -).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exterior as ext
from .exterior import Constants, FormField, KForm, Metric

UNIT_TOL = 1e-12
SPATIAL_TOL = 1e-9
MIN_STEP = 1e-10


@dataclass(frozen=True)
class Observer:
    U: np.ndarray
    g: Metric
    tol: float = UNIT_TOL

    def __post_init__(self):
        U = np.array(self.U, dtype=float)
        if U.shape != (4,):
            raise ValueError("observer 4-velocity must have 4 components")
        norm = self.g.dot(U, U)
        if abs(norm + 1.0) > self.tol:
            raise ValueError(f"observer is not unit timelike: g(U,U) = {norm!r}")
        if U[0] <= 0:
            raise ValueError("observer must be future-pointing (U^0 > 0)")
        U.flags.writeable = False
        object.__setattr__(self, "U", U)

    @classmethod
    def normalized(cls, U, g: Metric) -> "Observer":
        """Rescale an arbitrary timelike vector to unit length."""
        U = np.asarray(U, dtype=float)
        norm = g.dot(U, U)
        if norm >= 0:
            raise ValueError("vector is not timelike")
        return cls(U / math.sqrt(-norm), g)

    @classmethod
    def from_three_velocity(cls, v, g: Metric, k: Constants) -> "Observer":
        """Observer moving with coordinate 3-velocity v (x0 = c t)."""
        v = np.asarray(v, dtype=float)
        if g.is_flat() and np.linalg.norm(v) >= k.c:
            raise ValueError(f"|v| = {np.linalg.norm(v)} is not below c")
        U = np.concatenate([[1.0], v / k.c])
        if g.dot(U, U) >= 0:
            raise ValueError("3-velocity is not subluminal for this metric")
        return cls.normalized(U, g)

    @property
    def coframe(self) -> KForm:
        """U~ = g(U, -)."""
        return ext.flat(self.U, self.g)

    def is_spatial(self, a: KForm, tol: float = SPATIAL_TOL) -> bool:
        return abs(float(self.U @ a.components)) <= tol * max(a.norm(), 1e-300)

    def require_spatial(self, name: str, a: KForm, tol: float = SPATIAL_TOL):
        ext._require_degree(a, 1)
        if a.norm() == 0.0:
            return
        if not self.is_spatial(a, tol):
            raise ValueError(
                f"{name} is not spatial: i_U {name} = {float(self.U @ a.components)!r}"
            )

    def projector(self) -> np.ndarray:
        """Matrix of a -> a + a(U) U~ on 1-form components."""
        return np.eye(4) + np.outer(self.coframe.components, self.U)

    def project(self, a: KForm) -> KForm:
        return KForm(1, self.projector() @ a.components)


@dataclass(frozen=True)
class FrameFields:
    """e, b, d, h measured by one observer."""

    e: KForm
    b: KForm
    d: KForm
    h: KForm
    observer: Observer
    constants: Constants

    def __post_init__(self):
        for name in ("e", "b", "d", "h"):
            self.observer.require_spatial(name, getattr(self, name))


def decompose_F(F: KForm, obs: Observer, k: Constants) -> tuple[KForm, KForm]:
    ext._require_degree(F, 2)
    e = ext.interior(obs.U, F)
    b = ext.interior(obs.U, ext.hodge(F, obs.g)) / k.c
    return e, b


def reconstruct_F(e: KForm, b: KForm, obs: Observer, k: Constants) -> KForm:
    obs.require_spatial("e", e)
    obs.require_spatial("b", b)
    Ut = obs.coframe
    return ext.wedge(e, Ut) - ext.hodge(ext.wedge(k.c * b, Ut), obs.g)


def decompose_G(G: KForm, obs: Observer, k: Constants) -> tuple[KForm, KForm]:
    ext._require_degree(G, 2)
    d = ext.interior(obs.U, G)
    h = k.c * ext.interior(obs.U, ext.hodge(G, obs.g))
    return d, h


def reconstruct_G(d: KForm, h: KForm, obs: Observer, k: Constants) -> KForm:
    obs.require_spatial("d", d)
    obs.require_spatial("h", h)
    Ut = obs.coframe
    return ext.wedge(d, Ut) - ext.hodge(ext.wedge(h / k.c, Ut), obs.g)


def frame_fields(F: KForm, G: KForm, obs: Observer, k: Constants) -> FrameFields:
    e, b = decompose_F(F, obs, k)
    d, h = decompose_G(G, obs, k)
    return FrameFields(e, b, d, h, obs, k)


def maxwell_residuals(
    Ffield: FormField,
    Gfield: FormField,
    jfield: FormField,
    x,
    h: float,
    g: Metric,
    richardson: bool = False,
) -> tuple[KForm, KForm]:
    """Residuals (dF, d*G - j) at x for a constant metric g."""
    if h < MIN_STEP:
        raise ValueError(f"step {h} below cancellation guard {MIN_STEP}")
    if Ffield.degree != 2 or Gfield.degree != 2 or jfield.degree != 3:
        raise ValueError("expected F, G as 2-form fields and j as a 3-form field")
    r1 = ext.ext_deriv_fd(Ffield, x, h, richardson)
    starG = Gfield.map(lambda G: ext.hodge(G, g), 2)
    r2 = ext.ext_deriv_fd(starG, x, h, richardson) - jfield(np.asarray(x, float))
    return r1, r2


def _axis_vector(axis) -> np.ndarray:
    if np.ndim(axis) == 0:
        if int(axis) not in (1, 2, 3):
            raise ValueError("axis index must be 1, 2 or 3")
        v = np.zeros(3)
        v[int(axis) - 1] = 1.0
        return v
    v = np.asarray(axis, dtype=float)
    if v.shape != (3,) or np.linalg.norm(v) == 0:
        raise ValueError("axis must be an index 1..3 or a non-zero 3-vector")
    return v / np.linalg.norm(v)


def plane_wave(
    amplitude: float = 1.0,
    polarization=2,
    propagation=1,
    frequency: float = 1.0,
    k: Constants = ext.NATURAL,
    dispersion_factor: float = 1.0,
    impedance_factor: float = 1.0,
) -> tuple[FormField, FormField]:
    """Vacuum plane wave in Minkowski coordinates (x0 = c t).

    F = E0 cos(phase) (dx0 - s n.dx) ^ p.dx with phase = (w/c)(x0 - q n.x),
    where n is the propagation direction and p the polarization (axis
    indices 1..3 or 3-vectors; p is made orthogonal to n).  A rest observer
    sees e = E0 cos(phase) p.dx and |e| = c|b|.  ``dispersion_factor`` (q)
    and ``impedance_factor`` (s) other than 1 break the field equations and
    serve as negative controls.  Returns (F field, G = eps0 F field).

    Central differences are exact up to rounding for a wave along a
    coordinate axis; use an oblique ``propagation`` to see the O(h^2) error.
    """
    n = _axis_vector(propagation)
    p = _axis_vector(polarization)
    p = p - (p @ n) * n
    if np.linalg.norm(p) < 1e-12:
        raise ValueError("polarization must not be parallel to propagation")
    p /= np.linalg.norm(p)
    wavenumber = frequency / k.c
    shape = ext.wedge(
        KForm(1, np.concatenate([[1.0], -impedance_factor * n])),
        KForm(1, np.concatenate([[0.0], p])),
    )

    def F(x):
        phase = wavenumber * (x[0] - dispersion_factor * (n @ x[1:]))
        return amplitude * math.cos(phase) * shape

    Ffield = FormField(F, 2)
    return Ffield, Ffield.map(lambda w: k.eps0 * w, 2)


def lorentz_boost(beta: float, axis: int = 1) -> np.ndarray:
    """Boost matrix L (x' = L x) to the frame moving with speed beta (units of c)."""
    if not abs(beta) < 1:
        raise ValueError("|beta| must be below 1")
    if axis not in (1, 2, 3):
        raise ValueError("boost axis must be 1, 2 or 3")
    gamma = 1.0 / math.sqrt(1.0 - beta * beta)
    L = np.eye(4)
    L[0, 0] = L[axis, axis] = gamma
    L[0, axis] = L[axis, 0] = -gamma * beta
    return L


def boosted_observer(beta: float, axis: int, g: Metric) -> Observer:
    """Flat-space observer at rest in the frame reached by lorentz_boost."""
    return Observer(np.linalg.inv(lorentz_boost(beta, axis))[:, 0], g)


def rest_frame_boost(U) -> np.ndarray:
    """Pure Minkowski boost L with L U = (1, 0, 0, 0)."""
    U = np.asarray(U, dtype=float)
    gamma = U[0]
    v = U[1:] / gamma
    L = np.eye(4)
    L[0, 0] = gamma
    L[0, 1:] = L[1:, 0] = -gamma * v
    speed2 = v @ v
    if speed2 > 0:
        L[1:, 1:] += (gamma - 1.0) * np.outer(v, v) / speed2
    return L


def transform_form(w: KForm, L: np.ndarray) -> KForm:
    """Components of w in coordinates x' = L x."""
    Linv = np.linalg.inv(L)
    arr = w.to_array()
    for axis in range(arr.ndim):
        arr = np.moveaxis(np.tensordot(Linv.T, arr, axes=(1, axis)), 0, axis)
    return KForm.from_array(arr)
