"""Pointwise exterior algebra on a 4-dimensional Lorentzian vector space.

Conventions used throughout the package:

* signature (-,+,+,+), coordinate index 0 is timelike;
* orientation: the Levi-Civita symbol has ``eps[0,1,2,3] = +1`` and
  ``hodge(1) = sqrt|g| dx0^dx1^dx2^dx3``;
* a k-form stores its C(4,k) independent components in lexicographic order
  of the increasing index tuples, and expands to a full antisymmetric array
  with ``w[i0, i1, ...]`` equal to the stored component for increasing
  indices.

Every downstream sign (Poynting direction, the s-form, b) inherits these
choices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DIM = 4
ALGEBRA_RTOL = 1e-12
DET_TOL = 1e-10


def _perm_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


BASIS: dict[int, tuple[tuple[int, ...], ...]] = {
    k: tuple(itertools.combinations(range(DIM), k)) for k in range(DIM + 1)
}
_INDEX: dict[tuple[int, ...], int] = {
    idx: n for k in BASIS for n, idx in enumerate(BASIS[k])
}

def _expansion(k: int) -> np.ndarray:
    """Matrix taking stored components to the flattened full array."""
    E = np.zeros((DIM**k, len(BASIS[k])))
    for n, idx in enumerate(BASIS[k]):
        for perm in itertools.permutations(range(k)):
            flat_index = np.ravel_multi_index(tuple(idx[p] for p in perm), (DIM,) * k) if k else 0
            E[flat_index, n] = _perm_sign(perm)
    return E


_EXPAND = {k: _expansion(k) for k in range(DIM + 1)}
_COMPRESS = {
    k: np.array([np.ravel_multi_index(idx, (DIM,) * k) if k else 0 for idx in BASIS[k]],
                dtype=int)
    for k in range(DIM + 1)
}

# Levi-Civita symbol; the hodge star reads this module global at call time.
_EPS = np.zeros((DIM,) * DIM)
for _p in itertools.permutations(range(DIM)):
    _EPS[_p] = _perm_sign(_p)


# For each sorted multi-index I of degree k: the position of its complement
# in BASIS[4 - k] and the flat index of (I, I^c) into _EPS.
_COMPLEMENT = {}
for _k in range(DIM + 1):
    _targets, _flat = [], []
    for _idx in BASIS[_k]:
        _rest = tuple(i for i in range(DIM) if i not in _idx)
        _targets.append(BASIS[DIM - _k].index(_rest))
        _flat.append(np.ravel_multi_index(_idx + _rest, (DIM,) * DIM))
    _COMPLEMENT[_k] = (np.array(_targets, dtype=int), np.array(_flat, dtype=int))


def levi_civita() -> np.ndarray:
    return _EPS.copy()


@dataclass(frozen=True)
class Constants:
    """Physical constants; ``mu0`` is always derived from ``c`` and ``eps0``."""

    c: float = 299792458.0
    eps0: float = 8.8541878128e-12
    name: str = "si"

    def __post_init__(self):
        if not (self.c > 0 and self.eps0 > 0):
            raise ValueError("c and eps0 must be positive")

    @property
    def mu0(self) -> float:
        return 1.0 / (self.eps0 * self.c**2)

    @classmethod
    def si(cls) -> "Constants":
        return cls()

    @classmethod
    def natural(cls) -> "Constants":
        return cls(c=1.0, eps0=1.0, name="natural")


SI = Constants.si()
NATURAL = Constants.natural()


class Metric:
    """Lorentzian metric at a point, with cached inverse and sqrt|det g|."""

    def __init__(self, components):
        g = np.array(components, dtype=float)
        if g.shape != (DIM, DIM):
            raise ValueError(f"metric must be 4x4, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("metric has non-finite components")
        scale = max(np.max(np.abs(g)), 1.0)
        if np.max(np.abs(g - g.T)) > 1e-14 * scale:
            raise ValueError("metric is not symmetric")
        g = 0.5 * (g + g.T)
        det = np.linalg.det(g)
        if abs(det) < DET_TOL:
            raise ValueError(f"degenerate metric, |det g| = {abs(det):.3e}")
        eig = np.linalg.eigvalsh(g)
        if not (eig[0] < 0 < eig[1]):
            raise ValueError(
                f"metric signature must be (-,+,+,+), eigenvalues {eig}"
            )
        self.components = g
        self.inverse = np.linalg.inv(g)
        self.det = det
        self.sqrt_abs_det = math.sqrt(abs(det))
        self.components.flags.writeable = False
        self.inverse.flags.writeable = False
        self._compound = {}

    def compound_inverse(self, k: int) -> np.ndarray:
        """k x k minors of g^-1 over sorted multi-indices: w^I = M[I, J] w_J."""
        if k not in self._compound:
            if k == 0:
                M = np.ones((1, 1))
            else:
                idx = np.array(BASIS[k])
                M = np.linalg.det(self.inverse[idx[:, None, :, None], idx[None, :, None, :]])
            M.flags.writeable = False
            self._compound[k] = M
        return self._compound[k]

    @classmethod
    def minkowski(cls) -> "Metric":
        return cls(np.diag([-1.0, 1.0, 1.0, 1.0]))

    @classmethod
    def diagonal(cls, entries) -> "Metric":
        return cls(np.diag(np.asarray(entries, dtype=float)))

    def perturbed(self, delta, t: float) -> "Metric":
        return Metric(self.components + t * np.asarray(delta, dtype=float))

    def dot(self, X, Y) -> float:
        return float(np.asarray(X) @ self.components @ np.asarray(Y))

    def inverse_dot(self, a: "KForm", b: "KForm") -> float:
        """g^{-1}(a, b) for two 1-forms."""
        _require_degree(a, 1)
        _require_degree(b, 1)
        return float(a.components @ self.inverse @ b.components)

    def is_flat(self, atol: float = 1e-14) -> bool:
        return bool(
            np.allclose(self.components, np.diag([-1.0, 1, 1, 1]), rtol=0, atol=atol)
        )

    def __repr__(self):
        return f"Metric({self.components.tolist()})"


@dataclass(frozen=True)
class KForm:
    """A k-form at a point, holding its C(4,k) independent components."""

    degree: int
    components: np.ndarray = field(repr=True)

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise ValueError(f"degree must be in 0..4, got {self.degree}")
        comps = np.array(self.components, dtype=float).reshape(-1)
        if comps.shape != (len(BASIS[self.degree]),):
            raise ValueError(
                f"a {self.degree}-form has {len(BASIS[self.degree])} components,"
                f" got {comps.shape[0]}"
            )
        comps.flags.writeable = False
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, degree: int) -> "KForm":
        return cls(degree, np.zeros(len(BASIS[degree])))

    @classmethod
    def basis(cls, *indices: int) -> "KForm":
        """The basis form dx^i ^ dx^j ^ ... (indices in any order)."""
        k = len(indices)
        if len(set(indices)) != k:
            return cls.zero(k)
        order = sorted(indices)
        comps = np.zeros(len(BASIS[k]))
        comps[_INDEX[tuple(order)]] = _perm_sign([order.index(i) for i in indices])
        return cls(k, comps)

    @classmethod
    def from_array(cls, array) -> "KForm":
        """Compress a full antisymmetric array (antisymmetry is assumed)."""
        arr = np.asarray(array, dtype=float)
        return cls(arr.ndim, arr.reshape(-1)[_COMPRESS[arr.ndim]])

    def to_array(self) -> np.ndarray:
        k = self.degree
        return (_EXPAND[k] @ self.components).reshape((DIM,) * k)

    @property
    def scalar(self) -> float:
        """The single stored component of a 0- or 4-form."""
        if self.degree not in (0, 4):
            raise ValueError("scalar is defined for 0- and 4-forms only")
        return float(self.components[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __add__(self, other: "KForm") -> "KForm":
        _same_degree(self, other)
        return KForm(self.degree, self.components + other.components)

    def __sub__(self, other: "KForm") -> "KForm":
        _same_degree(self, other)
        return KForm(self.degree, self.components - other.components)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, -self.components)

    def __mul__(self, scalar: float) -> "KForm":
        return KForm(self.degree, float(scalar) * self.components)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "KForm":
        return KForm(self.degree, self.components / float(scalar))

    def allclose(self, other: "KForm", rtol=ALGEBRA_RTOL, atol=0.0) -> bool:
        _same_degree(self, other)
        scale = max(self.norm(), other.norm())
        return bool(np.max(np.abs(self.components - other.components), initial=0.0)
                    <= atol + rtol * scale)


def _same_degree(a: KForm, b: KForm):
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")


def _require_degree(w: KForm, k: int):
    if w.degree != k:
        raise ValueError(f"expected a {k}-form, got degree {w.degree}")


# splits of each increasing index tuple into (p-part, q-part) with the sign
# of the shuffle permutation
def _shuffles(p: int, q: int):
    out = []
    for n, idx in enumerate(BASIS[p + q]):
        terms = []
        for left_pos in itertools.combinations(range(p + q), p):
            right_pos = tuple(i for i in range(p + q) if i not in left_pos)
            sign = _perm_sign(left_pos + right_pos)
            left = tuple(idx[i] for i in left_pos)
            right = tuple(idx[i] for i in right_pos)
            terms.append((sign, _INDEX[left], _INDEX[right]))
        out.append(terms)
    return out


_SHUFFLES = {
    (p, q): _shuffles(p, q)
    for p in range(DIM + 1)
    for q in range(DIM + 1 - p)
}


def wedge(a: KForm, b: KForm) -> KForm:
    p, q = a.degree, b.degree
    if p + q > DIM:
        raise ValueError(f"wedge of degrees {p} and {q} exceeds dimension 4")
    ac, bc = a.components, b.components
    comps = [
        sum(s * ac[i] * bc[j] for s, i, j in terms)
        for terms in _SHUFFLES[(p, q)]
    ]
    return KForm(p + q, np.array(comps))


def interior(X, w: KForm) -> KForm:
    """Contract the vector X into the first slot of w."""
    if w.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    X = np.asarray(X, dtype=float)
    arr = np.tensordot(X, w.to_array(), axes=(0, 0))
    return KForm.from_array(arr)


def flat(X, g: Metric) -> KForm:
    return KForm(1, g.components @ np.asarray(X, dtype=float))


def sharp(w: KForm, g: Metric) -> np.ndarray:
    _require_degree(w, 1)
    return g.inverse @ w.components


_RAISE_SUBSCRIPTS = {
    1: "ia,a->i",
    2: "ia,jb,ab->ij",
    3: "ia,jb,kc,abc->ijk",
    4: "ia,jb,kc,ld,abcd->ijkl",
}


def raise_all(arr: np.ndarray, g: Metric) -> np.ndarray:
    k = arr.ndim
    if k == 0:
        return arr
    return np.einsum(_RAISE_SUBSCRIPTS[k], *([g.inverse] * k), arr, optimize=k > 2)


def volume_tensor(g: Metric) -> np.ndarray:
    return g.sqrt_abs_det * _EPS


def hodge(w: KForm, g: Metric) -> KForm:
    """(*w)_{b..} = (1/k!) w^{a..} sqrt|g| eps_{a.. b..}."""
    # over sorted multi-indices the 1/k! cancels: (*w)_{I^c} = sqrt|g| eps_{I I^c} w^I
    k = w.degree
    up = g.compound_inverse(k) @ w.components
    targets, flat = _COMPLEMENT[k]
    res = np.empty(len(BASIS[DIM - k]))
    res[targets] = g.sqrt_abs_det * _EPS.reshape(-1)[flat] * up
    return KForm(DIM - k, res)


def volume_form(g: Metric) -> KForm:
    return KForm(4, [g.sqrt_abs_det])


def inner(a: KForm, b: KForm, g: Metric) -> float:
    """Induced inner product (1/k!) a_{i..} b^{i..}; a ^ *b = inner * vol."""
    _same_degree(a, b)
    k = a.degree
    A = a.to_array()
    B = raise_all(b.to_array(), g)
    return float(np.sum(A * B) / math.factorial(k))


def contract_pair(a: KForm, b: KForm, g: Metric) -> np.ndarray:
    """The rank-2 array (i_a A) (x) (i^a B) for 2-forms: A_{cb} g^{cd} B_{de}."""
    _require_degree(a, 2)
    _require_degree(b, 2)
    return a.to_array().T @ g.inverse @ b.to_array()


def outer(a: KForm, b: KForm) -> np.ndarray:
    _require_degree(a, 1)
    _require_degree(b, 1)
    return np.outer(a.components, b.components)


@dataclass(frozen=True)
class FormField:
    """A form-valued field: coordinates -> KForm of a fixed degree."""

    func: Callable[[np.ndarray], KForm]
    degree: int
    chart: str = "cartesian"

    def __call__(self, x) -> KForm:
        w = self.func(np.asarray(x, dtype=float))
        if w.degree != self.degree:
            raise ValueError(
                f"field declared degree {self.degree} but returned {w.degree}"
            )
        return w

    def map(self, op: Callable[[KForm], KForm], degree: int) -> "FormField":
        return FormField(lambda x: op(self(x)), degree, self.chart)


def constant_field(w: KForm, chart: str = "cartesian") -> FormField:
    return FormField(lambda x: w, w.degree, chart)


def _partials(f: FormField, x: np.ndarray, h: float) -> np.ndarray:
    """Central-difference partials, shape (4, C(4,k))."""
    rows = []
    for a in range(DIM):
        step = np.zeros(DIM)
        step[a] = h
        rows.append((f(x + step).components - f(x - step).components) / (2 * h))
    return np.array(rows)


def ext_deriv_fd(f: FormField, x, h: float = 1e-4, richardson: bool = False) -> KForm:
    """Exterior derivative of a form field at x by central differences.

    Second-order accurate; with ``richardson=True`` the h and h/2 estimates
    are combined to cancel the leading O(h^2) term.
    """
    k = f.degree
    if k >= DIM:
        raise ValueError("exterior derivative of a 4-form does not exist in 4D")
    if not h > 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    dw = _partials(f, x, h)
    if richardson:
        dw = (4.0 * _partials(f, x, h / 2) - dw) / 3.0
    comps = np.zeros(len(BASIS[k + 1]))
    for n, idx in enumerate(BASIS[k + 1]):
        total = 0.0
        for i, a in enumerate(idx):
            rest = idx[:i] + idx[i + 1:]
            total += (-1) ** i * dw[a, _INDEX[rest]]
        comps[n] = total
    return KForm(k + 1, comps)
