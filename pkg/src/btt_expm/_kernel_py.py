"""Pure numpy radix-2 butterfly kernel.

Drop-in fallback for the compiled extension: transforms every row of a
C-contiguous (batch, n) complex array in place, using a precomputed root
table and bit-reversal permutation.  Passing the conjugated root table
yields the conjugate-transposed transform.
"""

import numpy as np


def fft_batch(data: np.ndarray, roots: np.ndarray, bitrev: np.ndarray) -> None:
    nbatch, n = data.shape
    if n == 1:
        return
    data[:] = data[:, bitrev]
    length = 2
    while length <= n:
        half = length >> 1
        tw = roots[np.arange(half) * (n // length)]
        view = data.reshape(nbatch, n // length, length)
        t = view[:, :, half:] * tw
        view[:, :, half:] = view[:, :, :half] - t
        view[:, :, :half] += t
        length <<= 1
