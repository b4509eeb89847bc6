# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled radix-2 butterfly kernel.

Same contract as `_kernel_py.fft_batch`: transforms every row of a
C-contiguous (batch, n) complex128 array in place given a precomputed root
table and bit-reversal permutation.
"""

import numpy as np


def fft_batch(double complex[:, ::1] data,
              double complex[::1] roots,
              Py_ssize_t[::1] bitrev):
    cdef Py_ssize_t nbatch = data.shape[0]
    cdef Py_ssize_t n = data.shape[1]
    cdef Py_ssize_t r, i, j, start, half, length, stride
    cdef double complex w, t
    cdef double complex[::1] tmp

    if n == 1:
        return
    tmp = np.empty(n, dtype=np.complex128)

    with nogil:
        for r in range(nbatch):
            for i in range(n):
                tmp[i] = data[r, bitrev[i]]
            for i in range(n):
                data[r, i] = tmp[i]
            length = 2
            while length <= n:
                half = length >> 1
                stride = n // length
                start = 0
                while start < n:
                    for j in range(half):
                        w = roots[j * stride]
                        t = w * data[r, start + half + j]
                        data[r, start + half + j] = data[r, start + j] - t
                        data[r, start + j] = data[r, start + j] + t
                    start += length
                length <<= 1
