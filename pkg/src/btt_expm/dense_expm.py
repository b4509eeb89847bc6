"""Dense matrix exponentials.

Two uses: the small-block exponentials inside the FFT-diagonalized methods,
and the brute-force oracle that assembles the full structured matrix and
exponentiates it for validation at moderate sizes.

The kernel is scaling-and-squaring with a truncated Taylor sum: scale so the
inf-norm is at most 1/2, sum terms until the next term is below machine
epsilon relative to the running sum, square back.  For subgenerator input the
oracle first shifts by alpha*I so every Taylor term is nonnegative and the
summation is cancellation-free, then folds exp(-alpha) into the squaring.
"""

from __future__ import annotations

import math

import numpy as np

from .block_linalg import BlockVector, SubgeneratorSpec
from .errors import NumericalError

__all__ = [
    "expm_small",
    "expm_dense_oracle",
    "assemble_btt_dense",
    "assemble_circulant_dense",
    "assemble_eps_circulant_dense",
]

_MAX_TERMS = 200
_MU = float(np.finfo(np.float64).eps)


def _inf_norms(stack: np.ndarray) -> np.ndarray:
    return np.abs(stack).sum(axis=2).max(axis=1)


def _taylor_stack(b: np.ndarray) -> np.ndarray:
    """exp of every matrix in a stack, norms assumed <= 1/2."""
    nstack, m, _ = b.shape
    total = np.zeros_like(b)
    idx = np.arange(m)
    total[:, idx, idx] = 1.0
    term = total.copy()
    spare = np.empty_like(b)  # ping-pong buffer: keeps the product allocation-free
    for k in range(1, _MAX_TERMS + 1):
        np.matmul(term, b, out=spare)
        spare *= 1.0 / k
        term, spare = spare, term
        total += term
        if np.all(_inf_norms(term) <= _MU * _inf_norms(total)):
            return total
    raise NumericalError(f"matrix exponential Taylor sum did not converge in {_MAX_TERMS} terms")


def _scaling_steps(norm: float) -> int:
    if norm <= 0.5:
        return 0
    return int(math.ceil(math.log2(norm / 0.5)))


def _expm_stack(a: np.ndarray) -> np.ndarray:
    """exp of every matrix in an (N, m, m) stack, dtype preserved."""
    s = np.array([_scaling_steps(v) for v in _inf_norms(a)], dtype=np.int64)
    out = _taylor_stack(a / np.exp2(s.astype(np.float64))[:, None, None])
    for step in range(int(s.max()) if s.size else 0):
        mask = s > step
        out[mask] = out[mask] @ out[mask]
    return out


def expm_small(a) -> np.ndarray:
    """exp(a) for one dense square matrix via scaling-and-squaring Taylor."""
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    dtype = np.complex128 if arr.dtype.kind == "c" else np.float64
    arr = arr.astype(dtype)
    if not np.isfinite(arr).all():
        raise ValueError("matrix contains NaN or Inf entries")
    return _expm_stack(arr[None])[0]


def assemble_btt_dense(u: BlockVector) -> np.ndarray:
    """The full (n*m) x (n*m) upper-triangular block-Toeplitz matrix."""
    n, m = u.n, u.m
    out = np.zeros((n * m, n * m), dtype=u.dtype)
    for d in range(n):
        for i in range(n - d):
            out[i * m:(i + 1) * m, (i + d) * m:(i + d + 1) * m] = u.data[d]
    return out


def assemble_circulant_dense(u: BlockVector) -> np.ndarray:
    """The full (n*m) x (n*m) block-circulant matrix."""
    n, m = u.n, u.m
    out = np.empty((n * m, n * m), dtype=u.dtype)
    for i in range(n):
        for j in range(n):
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = u.data[(j - i) % n]
    return out


def assemble_eps_circulant_dense(u: BlockVector, epsilon: complex) -> np.ndarray:
    """The full block-eps-circulant matrix: wrapped blocks scaled by epsilon."""
    n, m = u.n, u.m
    epsilon = complex(epsilon)
    dtype = np.float64 if (u.is_real and epsilon.imag == 0) else np.complex128
    eps = epsilon.real if dtype == np.float64 else epsilon
    out = np.empty((n * m, n * m), dtype=dtype)
    for i in range(n):
        for j in range(n):
            blk = u.data[j - i] if j >= i else eps * u.data[n + j - i]
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = blk
    return out


def expm_dense_oracle(spec: SubgeneratorSpec, cap: int = 512, *,
                      min_scaling: int = 0) -> BlockVector:
    """First block-row of the exponential of the full triangular matrix,
    computed densely.  Only intended for validation: refuses n*m > cap.

    The shifted Taylor sum and the squarings are cancellation-free, so
    entries are accurate in the relative sense.  Entries fed exclusively by
    series orders beyond the truncation point are the exception; forcing
    extra scaling steps via ``min_scaling`` lets the squarings rebuild those
    high orders from accurately-summed low ones.
    """
    n, m = spec.n, spec.m
    if n * m > cap:
        raise ValueError(f"dense oracle refused: n*m = {n * m} exceeds cap {cap}")
    t = assemble_btt_dense(spec.u)
    shifted = t + spec.alpha * np.eye(n * m)
    s = max(_scaling_steps(float(np.abs(shifted).sum(axis=1).max())), min_scaling)
    out = _taylor_stack((shifted / 2.0 ** s)[None])[0]
    out *= math.exp(-spec.alpha / 2.0 ** s)
    spare = np.empty_like(out)
    for _ in range(s):
        np.matmul(out, out, out=spare)
        out, spare = spare, out
    row = out[:m].reshape(m, n, m).transpose(1, 0, 2)
    return BlockVector._wrap(np.ascontiguousarray(row))
