"""Vectorised quaternion kernels on plain numpy arrays.

Quaternions live in the trailing axis of length 4 as ``(w, x, y, z)``.
Matrices are ``(..., rows, cols, 4)``.  These are the hot paths of the Monte
Carlo engine, so everything broadcasts over leading batch axes.
"""

import numpy as np

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


def qmul(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(a):
    return np.asarray(a) * _CONJ


def qnorm_sq(a):
    return np.sum(np.asarray(a) ** 2, axis=-1)


def qmatmul(a, b):
    """Batched quaternionic matrix product, entry products kept in order.

    Works component-wise: each of the 16 real products is a batched real
    matmul on contiguous arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.shape[-3] != a.shape[-2]:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    aw, ax, ay, az = np.ascontiguousarray(np.moveaxis(a, -1, 0))
    bw, bx, by, bz = np.ascontiguousarray(np.moveaxis(b, -1, 0))
    return np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )


def adjoint(a):
    return qconj(np.swapaxes(np.asarray(a), -3, -2))


def embed(q):
    q = np.asarray(q, dtype=float)
    c1 = q[..., 0] + 1j * q[..., 1]
    c2 = q[..., 2] - 1j * q[..., 3]
    out = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = c1
    out[..., 0, 1] = -np.conj(c2)
    out[..., 1, 0] = c2
    out[..., 1, 1] = np.conj(c1)
    return out


def embed_matrix(a):
    a = np.asarray(a, dtype=float)
    m, n = a.shape[-3], a.shape[-2]
    blocks = embed(a)  # (..., m, n, 2, 2)
    blocks = np.swapaxes(blocks, -3, -2)  # (..., m, 2, n, 2)
    return blocks.reshape(a.shape[:-3] + (2 * m, 2 * n))


def unembed_matrix(c):
    c = np.asarray(c)
    m2, n2 = c.shape[-2], c.shape[-1]
    if m2 % 2 or n2 % 2:
        raise ValueError("complex image must have even dimensions")
    c1 = c[..., 0::2, 0::2]
    c2 = c[..., 1::2, 0::2]
    return np.stack([c1.real, c1.imag, c2.real, -c2.imag], axis=-1)


def hermitian_pivots(h):
    """Pivots of the LDL* factorisation of a batch of Hermitian matrices.

    Only the real part of the diagonal and the strict lower triangle are read.

    The product of the pivots is the Moore determinant; all pivots positive
    is equivalent to positive definiteness.  Batches that fail early produce
    non-finite trailing pivots, which callers mask out.
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[-2]
    d = np.empty(h.shape[:-3] + (n,))
    lower = {}
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for j in range(n):
            dj = h[..., j, j, 0].copy()
            for k in range(j):
                dj -= d[..., k] * qnorm_sq(lower[j, k])
            d[..., j] = dj
            for i in range(j + 1, n):
                acc = h[..., i, j, :].copy()
                for k in range(j):
                    acc -= d[..., k, None] * qmul(lower[i, k], qconj(lower[j, k]))
                lower[i, j] = acc / dj[..., None]
    return d


def positive_definite_det(h, tol=1e-12):
    """(mask, moore_det) for a batch of Hermitian matrices.

    A pivot passes when it exceeds ``tol`` times the largest diagonal modulus.
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[-2]
    diag = h[..., np.arange(n), np.arange(n), 0]
    scale = np.max(np.abs(diag), axis=-1)
    piv = hermitian_pivots(h)
    with np.errstate(invalid="ignore"):
        mask = np.all(piv > tol * scale[..., None], axis=-1)
    det = np.prod(np.where(mask[..., None], piv, 1.0), axis=-1)
    return mask, np.where(mask, det, 0.0)
