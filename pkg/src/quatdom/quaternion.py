"""Quaternions, quaternionic matrices and their complex embedding.

A quaternion ``w + x i + y j + z k`` is written ``c1 + j c2`` with
``c1 = w + x i`` and ``c2 = y - z i``; it embeds as the 2x2 complex block
``[[c1, -conj(c2)], [c2, conj(c1)]]``.  Matrices embed blockwise.

Determinants of Hermitian quaternionic matrices follow the Moore/Study
convention: ``qdet(H) = sqrt(det(embed(H)))``.  For a 1x1 matrix this is the
real entry itself, and left multiplication by ``G`` on quaternionic m-vectors
has real Jacobian ``qdet(G G*)^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qarray

__all__ = [
    "Quaternion",
    "QMatrix",
    "STRUCTURES",
    "quat_mul",
    "conj",
    "norm_sq",
    "embed_scalar",
    "embed_matrix",
    "unembed_matrix",
    "qmat_mul",
    "adjoint",
    "solve",
    "inverse",
    "qdet_hermitian",
    "cholesky",
    "is_positive_definite",
    "schur_det_split",
    "NotPositiveDefinite",
]

STRUCTURE_TOL = 1e-12
PIVOT_TOL = 1e-12
STRUCTURES = ("general", "hermitian", "anti_hermitian", "symmetric")


class NotPositiveDefinite(ValueError):
    pass


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = (float(t) for t in a)
        return cls(w, x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    def __rmul__(self, other):
        s = float(other)
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    def __truediv__(self, other):
        if isinstance(other, Quaternion):
            return self * other.inverse()
        s = float(other)
        return Quaternion(self.w / s, self.x / s, self.y / s, self.z / s)

    def __add__(self, other):
        o = _as_quaternion(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_quaternion(other)
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        return _as_quaternion(other) - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self) -> float:
        return math.sqrt(self.norm_sq())

    def inverse(self) -> "Quaternion":
        n = self.norm_sq()
        if n == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() / n

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return abs(self - _as_quaternion(other)) <= tol

    def __str__(self):
        return f"{self.w:g}{self.x:+g}i{self.y:+g}j{self.z:+g}k"


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def _as_quaternion(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    return Quaternion(float(v))


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def norm_sq(q: Quaternion) -> float:
    return q.norm_sq()


def embed_scalar(q: Quaternion) -> np.ndarray:
    """2x2 complex image of ``q``; ``det(embed_scalar(q)) == norm_sq(q)``."""
    return qarray.embed(q.as_array())


class QMatrix:
    """Dense immutable m x n quaternionic matrix with a structure tag.

    The tag is validated once at construction and trusted afterwards.
    """

    __slots__ = ("_data", "structure")

    def __init__(self, data, structure: str = "general"):
        arr = np.array(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ValueError(f"expected an (m, n, 4) array, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("empty quaternionic matrices are not supported")
        if structure not in STRUCTURES:
            raise ValueError(f"unknown structure tag {structure!r}")
        if structure != "general":
            _check_structure(arr, structure)
        arr.setflags(write=False)
        self._data = arr
        self.structure = structure

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence], structure: str = "general") -> "QMatrix":
        data = [[_as_quaternion(q).as_array() for q in row] for row in rows]
        return cls(data, structure)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data, "hermitian")

    @classmethod
    def column(cls, entries: Iterable) -> "QMatrix":
        return cls.from_entries([[q] for q in entries])

    @classmethod
    def row(cls, entries: Iterable) -> "QMatrix":
        return cls.from_entries([list(entries)])

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape[0], self._data.shape[1]

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_array(self._data[i, j])

    def with_structure(self, structure: str) -> "QMatrix":
        return QMatrix(self._data, structure)

    def adjoint(self) -> "QMatrix":
        return adjoint(self)

    def transpose(self) -> "QMatrix":
        tag = self.structure if self.structure in ("symmetric",) else "general"
        return QMatrix(np.swapaxes(self._data, 0, 1), tag)

    def conj(self) -> "QMatrix":
        """Entrywise conjugate (no transpose)."""
        return QMatrix(qarray.qconj(self._data))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        return qmat_mul(self, other)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self._data + _data_of(other))

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self._data - _data_of(other))

    def __neg__(self):
        return QMatrix(-self._data, self.structure)

    def __mul__(self, scalar):
        if isinstance(scalar, Quaternion):
            return QMatrix(qarray.qmul(self._data, scalar.as_array()))
        return QMatrix(self._data * float(scalar), self.structure)

    def __rmul__(self, scalar):
        if isinstance(scalar, Quaternion):
            return QMatrix(qarray.qmul(scalar.as_array(), self._data))
        return self * scalar

    def allclose(self, other: "QMatrix", tol: float = 1e-12) -> bool:
        return self.shape == other.shape and np.allclose(self._data, other._data, atol=tol, rtol=0)

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self._data**2)))

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.shape == other.shape and np.array_equal(self._data, other._data)

    __hash__ = None

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols}, {self.structure})"


def _data_of(m) -> np.ndarray:
    return m.data if isinstance(m, QMatrix) else np.asarray(m, dtype=float)


def _check_structure(arr: np.ndarray, structure: str) -> None:
    m, n, _ = arr.shape
    if m != n:
        raise ValueError(f"{structure} matrices must be square, got {m}x{n}")
    scale = max(1.0, float(np.max(np.abs(arr))))
    tol = STRUCTURE_TOL * scale
    t = np.swapaxes(arr, 0, 1)
    if structure == "hermitian":
        err = np.max(np.abs(arr - qarray.qconj(t)))
    elif structure == "anti_hermitian":
        err = np.max(np.abs(arr + qarray.qconj(t)))
    else:
        err = np.max(np.abs(arr - t))
    if err > tol:
        raise ValueError(f"matrix is not {structure} (deviation {err:.3g})")


def qmat_mul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return QMatrix(qarray.qmatmul(a.data, b.data))


def adjoint(a: QMatrix) -> QMatrix:
    tag = {"hermitian": "hermitian", "anti_hermitian": "anti_hermitian"}.get(a.structure, "general")
    return QMatrix(qarray.adjoint(a.data), tag)


def embed_matrix(a: QMatrix) -> np.ndarray:
    """2m x 2n complex matrix, multiplicative and adjoint-compatible."""
    return qarray.embed_matrix(a.data)


def unembed_matrix(c: np.ndarray, structure: str = "general") -> QMatrix:
    return QMatrix(qarray.unembed_matrix(np.asarray(c)), structure)


def solve(a: QMatrix, b: QMatrix) -> QMatrix:
    """X with ``a @ X == b`` (a square and nonsingular)."""
    if a.rows != a.cols or a.cols != b.rows:
        raise ValueError(f"cannot solve {a.shape} against {b.shape}")
    x = np.linalg.solve(embed_matrix(a), embed_matrix(b))
    return unembed_matrix(x)


def inverse(a: QMatrix) -> QMatrix:
    if a.rows != a.cols:
        raise ValueError("only square matrices are invertible")
    return unembed_matrix(np.linalg.inv(embed_matrix(a)))


def _require_hermitian(h: QMatrix) -> None:
    if h.rows != h.cols:
        raise ValueError("expected a square matrix")
    if h.structure != "hermitian":
        _check_structure(h.data, "hermitian")


def qdet_hermitian(h: QMatrix) -> float:
    """Moore determinant: positive square root of the embedded determinant.

    A 1x1 matrix returns its real entry unchanged.
    """
    _require_hermitian(h)
    if h.rows == 1:
        return float(h.data[0, 0, 0])
    d = np.linalg.det(embed_matrix(h))
    d_re = float(d.real)
    scale = max(1.0, float(np.max(np.abs(h.data)))) ** (2 * h.rows)
    if d_re < -1e-9 * scale:
        raise ValueError(f"embedded determinant is negative ({d_re:.3g}); input is not Hermitian")
    return math.sqrt(max(d_re, 0.0))


def cholesky(h: QMatrix) -> QMatrix:
    """Lower-triangular ``G`` with positive real diagonal and ``G @ G* == h``.

    Raises :class:`NotPositiveDefinite` when a pivot drops below
    ``PIVOT_TOL`` times the largest diagonal entry.
    """
    _require_hermitian(h)
    n = h.rows
    a = h.data
    scale = max(float(np.max(np.abs(a[np.arange(n), np.arange(n), 0]))), np.finfo(float).tiny)
    g = np.zeros((n, n, 4))
    for j in range(n):
        pivot = a[j, j, 0] - float(np.sum(g[j, :j] ** 2))
        if not pivot > PIVOT_TOL * scale:
            raise NotPositiveDefinite(f"pivot {j} is {pivot:.3g}")
        gjj = math.sqrt(pivot)
        g[j, j, 0] = gjj
        for i in range(j + 1, n):
            acc = a[i, j].copy()
            for k in range(j):
                acc -= qarray.qmul(g[i, k], qarray.qconj(g[j, k]))
            g[i, j] = acc / gjj
    return QMatrix(g)


def is_positive_definite(h: QMatrix) -> bool:
    try:
        cholesky(h)
    except NotPositiveDefinite:
        return False
    return True


def schur_det_split(m: QMatrix, block_size: int) -> tuple[float, float]:
    """Split ``m = [[A, P*], [P, l]]`` with ``A`` of size ``block_size``.

    Returns ``(qdet(A), s)`` where ``s = l - P A^-1 P*``; ``s`` is the real
    corner scalar when the corner is 1x1 and its Moore determinant otherwise.
    ``qdet(m) == qdet(A) * s`` for positive-definite ``m``.
    """
    _require_hermitian(m)
    n = m.rows
    if not 0 < block_size < n:
        raise ValueError(f"block size must lie in 1..{n - 1}")
    d = m.data
    a = QMatrix(d[:block_size, :block_size], "hermitian")
    p = QMatrix(d[block_size:, :block_size])
    l = QMatrix(d[block_size:, block_size:], "hermitian")
    emb = embed_matrix(a)
    if abs(np.linalg.det(emb)) < 1e-300 or np.linalg.cond(emb) > 1e14:
        raise ValueError("leading block is singular")
    s = l - p @ solve(a, adjoint(p))
    if s.rows == 1:
        return qdet_hermitian(a), float(s.data[0, 0, 0])
    s = QMatrix((s.data + qarray.adjoint(s.data)) / 2, "hermitian")
    return qdet_hermitian(a), qdet_hermitian(s)
