"""Exponentials of block-circulant and block-eps-circulant matrices.

Both families are block-diagonalized by the Fourier block transform (the
eps variant after a diagonal scaling by the powers of the n-th root of
epsilon), so the exponential reduces to n independent m x m exponentials in
the transformed domain plus two block transforms.  The n small exponentials
carry no ordering dependence and may be evaluated in parallel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .block_linalg import BlockVector
from .dense_expm import _expm_stack
from .fft_transforms import EpsilonScaling, get_plan, _transform_stack
from .structured_mul import _discard_imag

__all__ = ["exp_eps_circulant", "exp_circulant"]


def _exp_blocks(v: np.ndarray, threads: int) -> np.ndarray:
    if threads > 1 and v.shape[0] > 1:
        chunks = np.array_split(v, min(threads, v.shape[0]))
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(_expm_stack, chunks))
        return np.concatenate(parts, axis=0)
    return _expm_stack(v)


def _require_pow2(n: int) -> None:
    if n & (n - 1):
        raise ValueError(f"block length must be a power of two, got {n}")


def exp_eps_circulant(u: BlockVector, epsilon: complex, *, threads: int = 1,
                      allow_large_eps: bool = False) -> BlockVector:
    """First block-row Y of the exponential of the block-eps-circulant matrix
    with first block-row ``u``.

    ``|epsilon| <= 1`` is required unless ``allow_large_eps`` is set (the
    escape hatch used by parameter sweeps exploring larger magnitudes).
    """
    _require_pow2(u.n)
    epsilon = complex(epsilon)
    if epsilon == 0:
        raise ValueError("epsilon must be nonzero")
    if not allow_large_eps and abs(epsilon) > 1:
        raise ValueError(f"|epsilon| = {abs(epsilon)!r} > 1 (pass allow_large_eps to override)")

    plan = get_plan(u.n)
    es = EpsilonScaling(epsilon, u.n)
    z = u.data * es.powers[:, None, None]
    v = _transform_stack(z, plan, conj=True)        # F^H (x) I applied to the scaled blocks
    w = _exp_blocks(v, threads)
    y = _transform_stack(w, plan, conj=False)
    y *= 1.0 / u.n
    y *= es.inv_powers[:, None, None]
    return BlockVector._wrap(y)


def exp_circulant(u: BlockVector, *, threads: int = 1) -> BlockVector:
    """First block-row Y of the exponential of the block-circulant matrix with
    first block-row ``u``.  Real input yields a real result (imaginary
    roundoff is checked and discarded)."""
    _require_pow2(u.n)
    plan = get_plan(u.n)
    v = _transform_stack(u.data, plan, conj=True)
    w = _exp_blocks(v, threads)
    y = _transform_stack(w, plan, conj=False)
    y *= 1.0 / u.n
    if u.is_real:
        return BlockVector._wrap(_discard_imag(y))
    return BlockVector._wrap(y)
