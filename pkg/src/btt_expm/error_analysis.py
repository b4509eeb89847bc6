"""Evaluators for the error bounds that drive parameter selection and
validation: FFT roundoff bounds for the two circulant exponentials, the
eps-circulant approximation bound, the off-diagonal decay bound, the
circulant-embedding tail bound and the size function minimized to pick the
embedding length, and the Taylor truncation bound.

All evaluators are closed-form over-estimates; the tests check computed
errors against them on synthetic instances.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .block_linalg import SubgeneratorSpec, _row_norm

__all__ = [
    "RoundoffConstants",
    "default_constants",
    "phi_bound",
    "chi_bound",
    "eps_roundoff_bound",
    "circulant_roundoff_bound",
    "decay_bound",
    "eps_approx_bound",
    "embedding_bound_fK",
    "embedding_size_g",
    "taylor_truncation_bound",
]

_SQRT2 = math.sqrt(2.0)
_MU = float(np.finfo(np.float64).eps)


@dataclasses.dataclass(frozen=True)
class RoundoffConstants:
    """Constants of the first-order FFT roundoff analysis.

    ``tau`` is the relative accuracy constant of the small matrix
    exponential kernel; it depends on that algorithm and is caller-supplied
    (default heuristic: 10*m).
    """

    tau: float
    mu: float = _MU
    zeta: float = 1.0 + 2.0 * _SQRT2
    gamma: float = 4.0 * _SQRT2 + 1.0
    beta: float = 2.0 * _SQRT2


def default_constants(m: int, mu: float = _MU) -> RoundoffConstants:
    return RoundoffConstants(tau=10.0 * m, mu=mu)


def phi_bound(n: int, m: int, umax: float, ymax: float,
              consts: RoundoffConstants | None = None) -> float:
    """Roundoff amplification factor of the eps-circulant exponential: the
    computed block error is bounded by mu * m * phi / |eps|."""
    if consts is None:
        consts = default_constants(m)
    q = math.log2(n)
    return (m * n * (consts.zeta + consts.gamma * q) * umax
            + (consts.zeta + consts.gamma * math.sqrt(n) * q) * ymax
            + consts.tau)


def chi_bound(n: int, m: int, umax: float, ymax: float,
              consts: RoundoffConstants | None = None) -> float:
    """Roundoff factor of the plain circulant exponential: block error is
    bounded by mu * m * chi.  Always at most phi_bound (fewer terms)."""
    if consts is None:
        consts = default_constants(m)
    q = math.log2(n)
    return (m * n * consts.gamma * q * umax
            + consts.gamma * math.sqrt(n) * q * ymax
            + consts.tau)


def eps_roundoff_bound(phi: float, m: int, epsilon: complex, mu: float = _MU) -> float:
    """Total roundoff bound mu * m * phi / |eps| for the eps-circulant path."""
    return mu * m * phi / abs(complex(epsilon))


def circulant_roundoff_bound(chi: float, m: int, mu: float = _MU) -> float:
    """Total roundoff bound mu * m * chi for the circulant path."""
    return mu * m * chi


def decay_bound(alpha: float, n: int, sigma: float, i: int) -> float:
    """Bound on the row sums of block i of the exponential of a subgenerator
    with bandwidth n: exp(alpha*(sigma**(n-1) - 1)) * sigma**(-i)."""
    sigma = float(sigma)
    if sigma <= 1:
        raise ValueError(f"sigma must exceed 1, got {sigma}")
    try:
        return math.exp(alpha * (sigma ** (n - 1) - 1.0)) * sigma ** (-i)
    except OverflowError:
        return math.inf


def eps_approx_bound(l_norm: float, epsilon: complex) -> float:
    """Approximation error of replacing the triangular matrix by its
    eps-circulant: expm1(|eps| * l_norm), improving to
    expm1((|eps| * l_norm)**2) for pure-imaginary eps (where the real part of
    the computed row is taken)."""
    epsilon = complex(epsilon)
    t = abs(epsilon) * l_norm
    if epsilon.real == 0:
        t = t * t
    return math.expm1(t)


def embedding_bound_fK(alpha: float, l_norm: float, n: int, K: int, sigma: float) -> float:
    """Tail bound on the first n blocks of the K-circulant embedding error,
    valid for every sigma > 1."""
    sigma = float(sigma)
    if sigma <= 1:
        raise ValueError(f"sigma must exceed 1, got {sigma}")
    if K < n:
        raise ValueError(f"embedding length K = {K} must be at least n = {n}")
    try:
        return (math.expm1(l_norm)
                * math.exp(alpha * (sigma ** (n - 1) - 1.0))
                * sigma ** (-(K - n)) / (1.0 - 1.0 / sigma))
    except OverflowError:
        return math.inf


def embedding_size_g(alpha: float, l_norm: float, n: int, target_error: float,
                     sigma: float) -> float:
    """Smallest (real) embedding length that pushes the tail bound at this
    sigma below ``target_error``; minimizing over sigma gives the selection
    rule.  Returns -inf when l_norm is 0 (the embedding is then exact)."""
    sigma = float(sigma)
    if sigma <= 1:
        raise ValueError(f"sigma must exceed 1, got {sigma}")
    if target_error <= 0:
        raise ValueError("target_error must be positive")
    if l_norm == 0:
        return -math.inf
    try:
        num = (alpha * (sigma ** (n - 1) - 1.0)
               + math.log(sigma / (sigma - 1.0))
               + math.log(1.0 / target_error)
               + math.log(math.expm1(l_norm)))
    except OverflowError:
        return math.inf
    return num / math.log(sigma) + n


def taylor_truncation_bound(spec: SubgeneratorSpec, r: int) -> float:
    """Norm bound on the tail of the shifted Taylor series truncated after the
    term of degree r - 1, using the inf-norm of the shifted matrix in place of
    its spectral radius (a valid over-estimate)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    shifted = spec.u.data.copy()
    shifted[0] += spec.alpha * np.eye(spec.m)
    t = _row_norm(shifted)
    if t / (r + 1) >= 1:
        raise ValueError(
            f"norm {t!r} of the shifted matrix must be below r + 1 = {r + 1}")
    if t == 0:
        return 0.0
    return math.exp(r * math.log(t) - math.lgamma(r + 1)) / (1.0 - t / (r + 1))
