"""The five integration domains: coordinates, membership and integrands.

Every domain is parameterised by a flat vector of real coordinates.  The
layout is: diagonal coordinates first (when the structure has a special
diagonal), then the strict upper triangle in row-major order, four reals per
quaternion.  All batched functions take ``coords`` of shape ``(..., real_dim)``.

Every member point has quaternion entries of norm at most 1, so the cube
``[-1, 1]^real_dim`` bounds each domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import qarray
from .closed_forms import FormulaFamily
from .quaternion import QMatrix

KINDS = ("RI", "RII", "RIII", "SYM", "RIV")

# discriminant values in [-DISC_CLAMP, 0) are rounding noise and treated as 0
DISC_CLAMP = 1e-12

_STRUCTURE = {
    "RI": "general",
    "RII": "hermitian",
    "RIII": "anti_hermitian",
    "SYM": "symmetric",
    "RIV": "general",
}

_FAMILY_DOMAIN = {
    "J_rect": "RI",
    "K_rect": "RI",
    "H_herm": "RII",
    "I_herm": "RII",
    "J_sym": "SYM",
    "K_anti": "RIII",
    "L_four": "RIV",
}


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    n: int
    m: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {KINDS}")
        if int(self.n) != self.n or self.n < 1 or int(self.m) != self.m or self.m < 1:
            raise ValueError(f"shape must be positive integers, got m={self.m}, n={self.n}")
        if self.kind != "RI" and self.m != 1:
            raise ValueError(f"{self.kind} takes only n")

    @property
    def real_dim(self) -> int:
        m, n = self.m, self.n
        return {
            "RI": 4 * m * n,
            "RII": n * (2 * n - 1),
            "RIII": n * (2 * n + 1),
            "SYM": 2 * n * (n + 1),
            "RIV": 4 * n,
        }[self.kind]

    @property
    def box_halfwidth(self) -> float:
        return 1.0

    @property
    def box_volume(self) -> float:
        return (2.0 * self.box_halfwidth) ** self.real_dim

    @property
    def matrix_shape(self) -> tuple[int, int]:
        if self.kind == "RI":
            return (self.m, self.n)
        if self.kind == "RIV":
            return (1, self.n)
        return (self.n, self.n)

    @property
    def structure(self) -> str:
        return _STRUCTURE[self.kind]

    def label(self) -> str:
        if self.kind == "RI":
            return f"RI({self.m},{self.n})"
        return f"{self.kind}({self.n})"


def RI(m: int, n: int) -> DomainSpec:
    return DomainSpec("RI", n=n, m=m)


def RII(n: int) -> DomainSpec:
    return DomainSpec("RII", n=n)


def RIII(n: int) -> DomainSpec:
    return DomainSpec("RIII", n=n)


def SYM(n: int) -> DomainSpec:
    return DomainSpec("SYM", n=n)


def RIV(n: int) -> DomainSpec:
    return DomainSpec("RIV", n=n)


def domain_of(family: FormulaFamily) -> DomainSpec:
    kind = _FAMILY_DOMAIN[family.tag]
    return DomainSpec(kind, n=family.n, m=family.m if kind == "RI" else 1)


# coordinates <-> matrices ---------------------------------------------------


def _check_len(spec: DomainSpec, coords: np.ndarray) -> None:
    if coords.shape[-1] != spec.real_dim:
        raise ValueError(f"{spec.label()} needs {spec.real_dim} coordinates, got {coords.shape[-1]}")


def materialize_batch(spec: DomainSpec, coords) -> np.ndarray:
    """Structured matrices ``(..., rows, cols, 4)`` from coordinate vectors."""
    c = np.asarray(coords, dtype=float)
    _check_len(spec, c)
    batch = c.shape[:-1]
    if spec.kind in ("RI", "RIV"):
        r, k = spec.matrix_shape
        return c.reshape(batch + (r, k, 4))
    n = spec.n
    out = np.zeros(batch + (n, n, 4))
    idx = np.arange(n)
    if spec.kind == "RII":
        out[..., idx, idx, 0] = c[..., :n]
        pos = n
    elif spec.kind == "RIII":
        out[..., idx, idx, 1:] = c[..., : 3 * n].reshape(batch + (n, 3))
        pos = 3 * n
    else:
        out[..., idx, idx, :] = c[..., : 4 * n].reshape(batch + (n, 4))
        pos = 4 * n
    iu, ju = np.triu_indices(n, 1)
    upper = c[..., pos:].reshape(batch + (len(iu), 4))
    out[..., iu, ju, :] = upper
    if spec.kind == "RII":
        out[..., ju, iu, :] = qarray.qconj(upper)
    elif spec.kind == "RIII":
        out[..., ju, iu, :] = -qarray.qconj(upper)
    else:
        out[..., ju, iu, :] = upper
    return out


def coordinates_batch(spec: DomainSpec, mats) -> np.ndarray:
    """Inverse of :func:`materialize_batch` (reads diagonal and upper triangle)."""
    a = np.asarray(mats, dtype=float)
    batch = a.shape[:-3]
    if spec.kind in ("RI", "RIV"):
        return a.reshape(batch + (spec.real_dim,))
    n = spec.n
    idx = np.arange(n)
    if spec.kind == "RII":
        diag = a[..., idx, idx, 0]
    elif spec.kind == "RIII":
        diag = a[..., idx, idx, 1:].reshape(batch + (3 * n,))
    else:
        diag = a[..., idx, idx, :].reshape(batch + (4 * n,))
    iu, ju = np.triu_indices(n, 1)
    upper = a[..., iu, ju, :].reshape(batch + (4 * len(iu),))
    return np.concatenate([diag, upper], axis=-1)


def materialize(spec: DomainSpec, coords) -> QMatrix:
    c = np.asarray(coords, dtype=float)
    if c.ndim != 1:
        raise ValueError("materialize takes a single coordinate vector")
    return QMatrix(materialize_batch(spec, c), spec.structure)


def coordinates(spec: DomainSpec, point: QMatrix) -> np.ndarray:
    if point.shape != spec.matrix_shape:
        raise ValueError(f"{spec.label()} expects shape {spec.matrix_shape}, got {point.shape}")
    return coordinates_batch(spec, point.data)


# defining forms ---------------------------------------------------------------


def _eye(n: int) -> np.ndarray:
    e = np.zeros((n, n, 4))
    e[np.arange(n), np.arange(n), 0] = 1.0
    return e


def _gram(q: np.ndarray) -> np.ndarray:
    return qarray.qmatmul(q, qarray.adjoint(q))


def defining_form(spec: DomainSpec, q: np.ndarray) -> np.ndarray:
    """The Hermitian matrix whose positivity defines membership.

    RI and SYM use ``I - Q Q*`` (for symmetric Q this is ``I - Q conj(Q)``),
    RII uses ``I - Q^2`` and RIII uses ``I + Q^2``.  Products are not
    re-symmetrised: the pivot routine reads only the lower triangle and the
    real diagonal.
    """
    if spec.kind == "RIV":
        raise ValueError("RIV is defined by a scalar inequality, see rIV_terms")
    r = q.shape[-3]
    if spec.kind in ("RI", "SYM"):
        return _eye(r) - _gram(q)
    sq = qarray.qmatmul(q, q)
    return _eye(r) - sq if spec.kind == "RII" else _eye(r) + sq


def rIV_terms(q: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(s, d, ok)`` for row vectors ``q`` of shape ``(..., 1, n, 4)``.

    ``s`` is the squared length, ``d`` the clamped discriminant
    ``s^2 - |sum q_i^2|^2`` and ``ok`` is False where the raw discriminant fell
    below ``-DISC_CLAMP``.
    """
    v = q[..., 0, :, :]
    s = np.sum(v**2, axis=(-2, -1))
    t = np.sum(qarray.qmul(v, v), axis=-2)
    d = s * s - qarray.qnorm_sq(t)
    ok = d >= -DISC_CLAMP
    return s, np.where(d > 0, d, 0.0), ok


def contains_batch(spec: DomainSpec, coords) -> np.ndarray:
    q = materialize_batch(spec, coords)
    if spec.kind == "RIV":
        s, d, ok = rIV_terms(q)
        return ok & (1.0 - s > np.sqrt(d))
    mask, _ = qarray.positive_definite_det(defining_form(spec, q))
    return mask


def contains(spec: DomainSpec, point) -> bool:
    """Membership of one point, given as a QMatrix or a coordinate vector."""
    data = point.data if isinstance(point, QMatrix) else materialize_batch(spec, point)
    if data.shape[-3:-1] != spec.matrix_shape:
        raise ValueError(f"{spec.label()} expects shape {spec.matrix_shape}")
    return bool(contains_batch(spec, coordinates_batch(spec, data)))


# integrands --------------------------------------------------------------------


def _power(base: np.ndarray, p: Fraction) -> np.ndarray:
    if p == 0:
        return np.ones_like(base)
    if p.denominator == 1:
        return base ** int(p)
    with np.errstate(divide="ignore"):
        return np.exp(float(p) * np.log(base))


def integrand_batch(family: FormulaFamily, coords) -> np.ndarray:
    """Integrand values; zero outside the domain for the bounded families.

    The unbounded families (K_rect, H_herm) are evaluated everywhere.
    """
    spec = domain_of(family)
    q = materialize_batch(spec, coords)
    tag = family.tag
    if tag == "L_four":
        s, d, ok = rIV_terms(q)
        root = np.sqrt(d)
        lo = 1.0 - s - root
        hi = 1.0 - s + root
        inside = ok & (lo > 0)
        lo = np.where(inside, lo, 1.0)
        hi = np.where(inside, hi, 1.0)
        return np.where(inside, _power(lo, family.alpha) * _power(hi, family.beta), 0.0)
    if tag == "K_rect":
        h = _eye(q.shape[-3]) + _gram(q)
    elif tag == "H_herm":
        h = _eye(q.shape[-3]) + qarray.qmatmul(q, q)
    else:
        h = defining_form(spec, q)
    if tag in ("K_rect", "H_herm"):
        # I + (positive semidefinite) has all pivots >= 1
        det = np.prod(qarray.hermitian_pivots(h), axis=-1)
        return _power(det, -family.alpha)
    mask, det = qarray.positive_definite_det(h)
    det = np.where(mask, det, 1.0)
    return np.where(mask, _power(det, family.lam), 0.0)


def integrand(family: FormulaFamily, point) -> float:
    """Integrand at one point, without the domain indicator.

    Raises ``ValueError`` when the base is not positive and the exponent is
    not an integer, which means the point lies outside the domain.
    """
    spec = domain_of(family)
    data = point.data if isinstance(point, QMatrix) else materialize_batch(spec, point)
    if data.shape != spec.matrix_shape + (4,):
        raise ValueError(f"{spec.label()} expects shape {spec.matrix_shape}")
    tag = family.tag
    if tag == "L_four":
        s, d, _ = rIV_terms(data)
        root = math.sqrt(float(d))
        factors = [(1.0 - float(s) - root, family.alpha), (1.0 - float(s) + root, family.beta)]
    else:
        r = data.shape[0]
        if tag == "K_rect":
            h = _eye(r) + _gram(data)
            p = -family.alpha
        elif tag == "H_herm":
            h = _eye(r) + qarray.qmatmul(data, data)
            p = -family.alpha
        else:
            h = defining_form(spec, data)
            p = family.lam
        base = float(np.prod(qarray.hermitian_pivots(h)))
        factors = [(base, p)]
    out = 1.0
    for base, p in factors:
        if p == 0:
            continue
        if base <= 0 and p.denominator != 1:
            raise ValueError(f"base {base:.6g} is not positive; point lies outside the domain")
        if base == 0 and p < 0:
            raise ValueError("integrand is singular at this point")
        out *= base ** int(p) if p.denominator == 1 else math.exp(float(p) * math.log(base))
    return out
