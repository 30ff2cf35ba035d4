"""Scenario files: parsing, validation and resolution into library objects.

A scenario is a YAML (or JSON) mapping with schema ``covariant-em/1``::

    schema: covariant-em/1
    constants: natural            # or si, or {c: ..., eps0: ...}
    metric: {preset: minkowski}   # or {diagonal: [4]} or {components: 4x4}
    medium:
      kind: isotropic             # vacuum | isotropic | anisotropic | magneto_electric
      velocity: [0.1, 0, 0]       # 3-velocity (same units as c), or four_velocity: [4]
      eps: 2.0
      mu: 1.0
    field:                        # exactly one of the three forms
      plane_wave: {amplitude: 1, polarization: 2, propagation: 1, frequency: 1}
    observers:
      - velocity: [0, 0, 0]
    point: [0, 0, 0, 0]

Resolution fills every default and writes velocities as explicit unit
4-velocities, so the echo of a resolved config parses back to itself.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import constitutive as con
from .exterior import NATURAL, SI, Constants, KForm, Metric
from .fields import Observer, plane_wave, reconstruct_F

SCHEMA = "covariant-em/1"
REPORT_SCHEMA = "covariant-em-report/1"
FIELD_KINDS = ("constant_F", "plane_wave", "frame")
ZETA_KEYS = ("zeta_de", "zeta_db", "zeta_he", "zeta_hb")


class ConfigError(ValueError):
    """A scenario file that violates the schema; ``path`` names the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Scenario:
    config: dict          # resolved, canonical form
    constants: Constants
    metric: Metric
    medium: con.ConstitutiveModel
    F: KForm
    observers: tuple[Observer, ...]
    point: np.ndarray

    @property
    def G(self) -> KForm:
        return con.apply_Z(self.medium, self.F, self.metric)


def load_config(path: str | Path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        if str(path).endswith(".json"):
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("<file>", f"cannot parse: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("<root>", "scenario must be a mapping")
    return data


def _floats(value, shape, path) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, f"expected numbers, got {value!r}") from exc
    if arr.shape != shape:
        raise ConfigError(path, f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(path, "non-finite value")
    return arr


def _constants(spec, path="constants") -> Constants:
    if spec in (None, "natural"):
        return NATURAL
    if spec == "si":
        return SI
    if isinstance(spec, dict):
        try:
            return Constants(float(spec["c"]), float(spec["eps0"]), str(spec.get("name", "custom")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(path, f"need positive c and eps0 ({exc})") from exc
    raise ConfigError(path, f"unknown constants {spec!r}")


def _metric(spec, path="metric") -> Metric:
    spec = spec or {"preset": "minkowski"}
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(path, "give exactly one of preset, diagonal, components")
    (key, value), = spec.items()
    try:
        if key == "preset":
            if value != "minkowski":
                raise ConfigError(f"{path}.preset", f"unknown preset {value!r}")
            return Metric.minkowski()
        if key == "diagonal":
            return Metric.diagonal(_floats(value, (4,), f"{path}.diagonal"))
        if key == "components":
            return Metric(_floats(value, (4, 4), f"{path}.components"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}.{key}", str(exc)) from exc
    raise ConfigError(path, f"unknown metric key {key!r}")


def _velocity(spec, g: Metric, k: Constants, path: str) -> Observer:
    if not isinstance(spec, dict):
        raise ConfigError(path, "expected {velocity: [3]} or {four_velocity: [4]}")
    try:
        if "four_velocity" in spec:
            U = _floats(spec["four_velocity"], (4,), f"{path}.four_velocity")
            if abs(g.dot(U, U) + 1.0) > 1e-9:
                raise ConfigError(f"{path}.four_velocity",
                                  f"not unit timelike: g(U,U) = {g.dot(U, U)!r}")
            # already unit to rounding: keep the given components verbatim
            if abs(g.dot(U, U) + 1.0) <= 1e-14:
                return Observer(U, g, tol=1e-14)
            return Observer.normalized(U, g)
        if "velocity" in spec:
            v = _floats(spec["velocity"], (3,), f"{path}.velocity")
            return Observer.from_three_velocity(v, g, k)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(path, "expected velocity or four_velocity")


def _zeta(value, V, g, path) -> con.SpatialLinearMap:
    """4x4 mixed components, or a 3x3 block on dx1..dx3; made spatial."""
    arr = np.array(value, dtype=float) if value is not None else np.zeros((4, 4))
    if arr.shape == (3, 3):
        full = np.zeros((4, 4))
        full[1:, 1:] = arr
        arr = full
    arr = _floats(arr, (4, 4), path)
    spatial = con.SpatialLinearMap(arr, V)
    if spatial.violation(g) <= 1e-14:
        return spatial
    return con.SpatialLinearMap.project(arr, V, g)


def _medium(spec, g: Metric, k: Constants, path="medium") -> tuple[con.ConstitutiveModel, dict]:
    if spec is not None and not isinstance(spec, dict):
        raise ConfigError(path, "expected a mapping")
    spec = dict(spec or {"kind": "vacuum"})
    kind = spec.get("kind", "vacuum")
    if kind not in con.KINDS:
        raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}")
    allowed = {"vacuum": set(), "isotropic": {"eps", "mu"},
               "anisotropic": {"zeta_de", "zeta_hb"},
               "magneto_electric": set(ZETA_KEYS) | {"self_adjoint"}}[kind]
    if kind != "vacuum":
        allowed |= {"velocity", "four_velocity"}
    unknown = sorted(set(spec) - allowed - {"kind"})
    if unknown:
        raise ConfigError(path, f"keys {unknown} not valid for a {kind} medium")
    if kind == "vacuum":
        return con.vacuum(k), {"kind": "vacuum"}
    if "velocity" not in spec and "four_velocity" not in spec:
        spec["velocity"] = [0.0, 0.0, 0.0]  # at rest in the chart
    V = _velocity(spec, g, k, path).U
    resolved: dict[str, Any] = {"kind": kind, "four_velocity": V.tolist()}
    try:
        if kind == "isotropic":
            eps, mu = float(spec.get("eps", 1.0)), float(spec.get("mu", 1.0))
            if mu == 0:
                raise ConfigError(f"{path}.mu", "relative permeability must be non-zero")
            resolved.update(eps=eps, mu=mu)
            return con.isotropic(eps, mu, V, g, k), resolved
        zetas = {}
        for key in ZETA_KEYS:
            if kind == "anisotropic" and key in ("zeta_db", "zeta_he"):
                continue
            if key == "zeta_he" and spec.get("self_adjoint"):
                if key in spec:
                    raise ConfigError(f"{path}.{key}", "derived when self_adjoint is set")
                continue
            zetas[key] = _zeta(spec.get(key), V, g, f"{path}.{key}")
        if spec.get("self_adjoint"):
            # de and hb must be symmetric as bilinear forms on 1-forms
            for key in ("zeta_de", "zeta_hb"):
                K = zetas[key].contravariant(g)
                if np.max(np.abs(K - K.T)) > 1e-14 * max(np.max(np.abs(K)), 1e-300):
                    zetas[key] = con.SpatialLinearMap.symmetric(K, V, g)
            zetas["zeta_he"] = con.SpatialLinearMap(
                -zetas["zeta_db"].adjoint(g).components, V)
        for key in ZETA_KEYS:
            if key in zetas:
                resolved[key] = zetas[key].components.tolist()
        if kind == "anisotropic":
            return con.anisotropic(zetas["zeta_de"], zetas["zeta_hb"], V, g, k), resolved
        return con.magneto_electric(*(zetas[key] for key in ZETA_KEYS), V, g, k), resolved
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _field(spec, g: Metric, k: Constants, point, path="field") -> tuple[KForm, dict]:
    if not isinstance(spec, dict):
        raise ConfigError(path, "field specification is required")
    present = [key for key in FIELD_KINDS if key in spec]
    unknown = sorted(set(spec) - set(FIELD_KINDS))
    if unknown:
        raise ConfigError(path, f"unknown field keys {unknown}")
    if len(present) != 1:
        raise ConfigError(path, f"exactly one field specification required, got {present}")
    key = present[0]
    value = spec[key]
    if key == "constant_F":
        F = KForm(2, _floats(value, (6,), f"{path}.constant_F"))
        return F, {"constant_F": F.components.tolist()}
    if key == "plane_wave":
        if not isinstance(value, dict):
            raise ConfigError(f"{path}.plane_wave", "expected a mapping")
        params = {
            "amplitude": float(value.get("amplitude", 1.0)),
            "polarization": value.get("polarization", 2),
            "propagation": value.get("propagation", 1),
            "frequency": float(value.get("frequency", 1.0)),
        }
        if not g.is_flat():
            raise ConfigError(f"{path}.plane_wave", "plane waves need the Minkowski metric")
        try:
            Ff, _ = plane_wave(k=k, **params)
        except ValueError as exc:
            raise ConfigError(f"{path}.plane_wave", str(exc)) from exc
        return Ff(point), {"plane_wave": params}
    if key == "frame":
        if not isinstance(value, dict):
            raise ConfigError(f"{path}.frame", "expected a mapping")
        obs = _velocity(value.get("observer", {"velocity": [0, 0, 0]}), g, k,
                        f"{path}.frame.observer")
        e = KForm(1, _floats(value.get("e", [0] * 4), (4,), f"{path}.frame.e"))
        b = KForm(1, _floats(value.get("b", [0] * 4), (4,), f"{path}.frame.b"))
        try:
            F = reconstruct_F(e, b, obs, k)
        except ValueError as exc:
            raise ConfigError(f"{path}.frame", str(exc)) from exc
        return F, {"frame": {"e": e.components.tolist(), "b": b.components.tolist(),
                             "observer": {"four_velocity": obs.U.tolist()}}}
    raise AssertionError(key)


def _constants_echo(k: Constants):
    if k == NATURAL:
        return "natural"
    if k == SI:
        return "si"
    return {"c": k.c, "eps0": k.eps0, "name": k.name}


def resolve(raw: dict) -> Scenario:
    raw = copy.deepcopy(raw)
    schema = raw.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError("schema", f"unsupported schema {schema!r}, expected {SCHEMA}")
    known = {"schema", "constants", "metric", "medium", "field", "observers", "point",
             "boost_axis", "name"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError("<root>", f"unknown keys {unknown}")
    k = _constants(raw.get("constants"))
    g = _metric(raw.get("metric"))
    point = _floats(raw.get("point", [0.0] * 4), (4,), "point")
    medium, medium_echo = _medium(raw.get("medium"), g, k)
    F, field_echo = _field(raw.get("field"), g, k, point)
    obs_specs = raw.get("observers") or [{"velocity": [0.0, 0.0, 0.0]}]
    if not isinstance(obs_specs, list):
        raise ConfigError("observers", "expected a list")
    observers = tuple(_velocity(o, g, k, f"observers[{i}]") for i, o in enumerate(obs_specs))
    axis = raw.get("boost_axis", 1)
    if axis not in (1, 2, 3):
        raise ConfigError("boost_axis", "must be 1, 2 or 3")
    config = {
        "schema": SCHEMA,
        "name": str(raw.get("name", "")),
        "constants": _constants_echo(k),
        "metric": {"components": g.components.tolist()},
        "medium": medium_echo,
        "field": field_echo,
        "observers": [{"four_velocity": o.U.tolist()} for o in observers],
        "point": point.tolist(),
        "boost_axis": axis,
    }
    return Scenario(config, k, g, medium, F, observers, point)


def load_scenario(path: str | Path) -> Scenario:
    return resolve(load_config(path))
