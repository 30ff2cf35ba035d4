"""Seeded random states for the invariant checks and the test suite."""

from __future__ import annotations

import numpy as np

from . import exterior as ext
from .constitutive import KINDS, ConstitutiveModel, random_model
from .exterior import Constants, KForm, Metric
from .fields import Observer

MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


def random_frame(rng: np.random.Generator, spread: float = 0.25) -> np.ndarray:
    return np.eye(4) + spread * rng.normal(size=(4, 4))


def random_metric(rng: np.random.Generator, spread: float = 0.25) -> Metric:
    """A^T eta A for a random near-identity A: Lorentzian and non-diagonal."""
    while True:
        A = random_frame(rng, spread)
        if abs(np.linalg.det(A)) > 0.3:
            return Metric(A.T @ MINKOWSKI @ A)


def random_observer(rng: np.random.Generator, g: Metric, max_speed: float = 0.6) -> Observer:
    # unit timelike vector in a g-orthonormal frame, mapped to coordinates
    eig, vec = np.linalg.eigh(g.components)
    order = np.argsort(eig)
    eig, vec = eig[order], vec[:, order]
    frame = vec / np.sqrt(np.abs(eig))  # columns: g-orthonormal vectors
    v = rng.uniform(-1, 1, 3)
    v *= rng.uniform(0, max_speed) / max(np.linalg.norm(v), 1e-12)
    gamma = 1.0 / np.sqrt(1.0 - v @ v)
    U = frame @ (gamma * np.concatenate([[1.0], v]))
    if U[0] < 0:
        U = -U
    return Observer.normalized(U, g)


def random_form(rng: np.random.Generator, degree: int, scale: float = 1.0) -> KForm:
    return KForm(degree, scale * rng.normal(size=len(ext.BASIS[degree])))


def random_spatial(rng: np.random.Generator, obs: Observer, scale: float = 1.0) -> KForm:
    return obs.project(random_form(rng, 1, scale))


def field_scale(k: Constants) -> float:
    """Typical |F| so that eps0 F^2 is of order one."""
    return 1.0 / np.sqrt(k.eps0)


def random_medium(rng: np.random.Generator, kind: str, g: Metric, k: Constants,
                  self_adjoint: bool = True) -> ConstitutiveModel:
    if kind not in KINDS:
        raise ValueError(f"unknown medium kind {kind!r}")
    V = None if kind == "vacuum" else random_observer(rng, g).U
    return random_model(kind, rng, g, k, V=V, self_adjoint=self_adjoint)
