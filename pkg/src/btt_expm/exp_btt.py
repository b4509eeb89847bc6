"""Top-level methods for the exponential of a block-triangular block-Toeplitz
subgenerator.

Four routes, all returning the first block-row of the exponential:

* ``exp_btt_eps``: approximate by the eps-circulant exponential; a pure
  imaginary eps makes the error quadratic in |eps| after taking real parts.
* ``exp_btt_eps_averaged``: average the real parts over k rotated values of
  eps, cancelling the error terms below degree 2k.
* ``exp_btt_embedding``: embed into a K-circulant and keep the leading blocks;
  the error decays exponentially in K - n.
* ``exp_btt_taylor``: shifted Taylor series with structured products, summing
  only nonnegative terms.

Every route scales the input by 2**p so the decay rate is at most 1, and
squares the structured result p times at the end.  Inputs whose length is not
a power of two are zero-padded (the padded exponential contains the original
one as its leading principal part) and truncated on return.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import error_analysis as ea
from .block_linalg import BlockVector, SubgeneratorSpec, _row_norm
from .errors import NumericalError
from .exp_circulant import exp_circulant, exp_eps_circulant
from .structured_mul import btt_times_btt

__all__ = [
    "MethodConfig",
    "ExpResult",
    "scaling_exponent",
    "repeated_squaring",
    "exp_btt_eps",
    "exp_btt_eps_averaged",
    "exp_btt_embedding",
    "exp_btt_taylor",
    "select_epsilon",
    "select_embedding_K",
    "compute_exponential",
]

_MU = float(np.finfo(np.float64).eps)

METHODS = ("eps_circulant", "eps_averaged", "embedding", "taylor")

_REQUIRED_FIELDS = {
    "eps_circulant": ("epsilon",),
    "eps_averaged": ("theta_mag", "k"),
    "embedding": ("K",),
    "taylor": ("taylor_tol", "max_terms"),
}


@dataclasses.dataclass(frozen=True)
class MethodConfig:
    """Method selector plus exactly the parameters that method needs.

    ``use_scaling`` applies to the first three methods; the Taylor route
    derives its own scaling from the shifted leading block.
    """

    method: str
    epsilon: complex | None = None
    theta_mag: float | None = None
    k: int | None = None
    K: int | None = None
    taylor_tol: float | None = None
    max_terms: int | None = None
    use_scaling: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        required = _REQUIRED_FIELDS[self.method]
        for name in ("epsilon", "theta_mag", "k", "K", "taylor_tol", "max_terms"):
            value = getattr(self, name)
            if name in required and value is None:
                raise ValueError(f"method {self.method!r} requires {name}")
            if name not in required and value is not None:
                raise ValueError(f"method {self.method!r} does not take {name}")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be a positive integer")


@dataclasses.dataclass(frozen=True)
class ExpResult:
    """Computed first block-row plus provenance: which method, what scaling
    exponent was applied, and optional predicted error bounds."""

    y: BlockVector
    method_used: MethodConfig
    scaling_p: int
    predicted_bounds: dict[str, float] | None = None


def scaling_exponent(spec: SubgeneratorSpec) -> int:
    """p = floor(log2(alpha)) + 1, guaranteeing alpha / 2**p <= 1; zero when
    alpha is already at most 1 (nothing to scale down)."""
    if spec.alpha <= 1.0:
        return 0
    return int(math.floor(math.log2(spec.alpha))) + 1


def repeated_squaring(y: BlockVector, p: int) -> BlockVector:
    """Square the triangular block-Toeplitz matrix p times (first-row form)."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    for _ in range(p):
        y = btt_times_btt(y, y)
    return y


def _next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def _pad(arr: np.ndarray, length: int) -> np.ndarray:
    if arr.shape[0] == length:
        return arr.copy()
    out = np.zeros((length,) + arr.shape[1:], dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


def _finish(y: np.ndarray, p: int, n: int) -> BlockVector:
    # square at the padded power-of-two length, then truncate; the leading n
    # blocks of a triangular product never involve the padding blocks
    out = repeated_squaring(BlockVector._wrap(y), p)
    if out.n == n:
        return out
    return BlockVector._wrap(out.data[:n].copy())


def exp_btt_eps(spec: SubgeneratorSpec, epsilon: complex, use_scaling: bool = True,
                *, threads: int = 1, allow_large_eps: bool = False) -> ExpResult:
    """Approximate the exponential row via the eps-circulant exponential.

    Requires ``0 < |epsilon| < 1`` unless ``allow_large_eps`` is set.  The
    real part of the computed row is returned for any epsilon: the exact row
    is real, and for pure-imaginary epsilon dropping the imaginary part is
    what makes the approximation error quadratic in |epsilon|.
    """
    epsilon = complex(epsilon)
    if epsilon == 0:
        raise ValueError("epsilon must be nonzero")
    if not allow_large_eps and abs(epsilon) >= 1:
        raise ValueError(f"|epsilon| = {abs(epsilon)!r} must be below 1")

    p = scaling_exponent(spec) if use_scaling else 0
    sspec = spec.scaled(p)
    padded = _pad(sspec.u.data, _next_pow2(spec.n))
    yc = exp_eps_circulant(BlockVector._wrap(padded), epsilon, threads=threads,
                           allow_large_eps=allow_large_eps)
    y = _finish(np.ascontiguousarray(yc.data.real), p, spec.n)

    phi = ea.phi_bound(padded.shape[0], spec.m, float(np.abs(padded).max()), 1.0)
    bounds = {
        "approx": ea.eps_approx_bound(sspec.l_norm, epsilon),
        "roundoff": ea.eps_roundoff_bound(phi, spec.m, epsilon),
    }
    config = MethodConfig("eps_circulant", epsilon=epsilon, use_scaling=use_scaling)
    return ExpResult(y=y, method_used=config, scaling_p=p, predicted_bounds=bounds)


def exp_btt_eps_averaged(spec: SubgeneratorSpec, theta_mag: float, k: int,
                         use_scaling: bool = True, *, threads: int = 1,
                         allow_large_eps: bool = False) -> ExpResult:
    """Average the real parts of the eps-circulant rows over the k values
    eps_j = i**(1/k) * w_k**j * theta, cancelling error terms below degree 2k.
    The k computations are independent and run in parallel when threads > 1.
    """
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if not theta_mag > 0:
        raise ValueError("theta_mag must be positive")
    if not allow_large_eps and not theta_mag < 1:
        raise ValueError(f"theta_mag = {theta_mag!r} must be below 1")
    k = int(k)

    p = scaling_exponent(spec) if use_scaling else 0
    sspec = spec.scaled(p)
    padded = BlockVector._wrap(_pad(sspec.u.data, _next_pow2(spec.n)))
    root_i = cmath.exp(1j * math.pi / (2 * k))  # principal k-th root of i
    eps_list = [root_i * cmath.exp(2j * math.pi * j / k) * theta_mag for j in range(k)]

    def one(eps: complex) -> np.ndarray:
        return exp_eps_circulant(padded, eps, allow_large_eps=allow_large_eps).data.real

    if threads > 1 and k > 1:
        with ThreadPoolExecutor(max_workers=min(threads, k)) as pool:
            rows = list(pool.map(one, eps_list))
    else:
        rows = [one(eps) for eps in eps_list]
    mean = np.ascontiguousarray(sum(rows) / k)
    y = _finish(mean, p, spec.n)

    phi = ea.phi_bound(padded.n, spec.m, float(np.abs(padded.data).max()), 1.0)
    bounds = {
        "single_point_approx": ea.eps_approx_bound(sspec.l_norm, 1j * theta_mag),
        "roundoff": ea.eps_roundoff_bound(phi, spec.m, theta_mag),
    }
    config = MethodConfig("eps_averaged", theta_mag=theta_mag, k=k, use_scaling=use_scaling)
    return ExpResult(y=y, method_used=config, scaling_p=p, predicted_bounds=bounds)


def exp_btt_embedding(spec: SubgeneratorSpec, K: int, use_scaling: bool = True,
                      *, threads: int = 1) -> ExpResult:
    """Exponential row via embedding into a block-circulant of K blocks
    (rounded up to a power of two); the leading n blocks over-estimate the
    true ones by a tail that decays exponentially in K - n."""
    if K < spec.n:
        raise ValueError(f"K = {K} must be at least n = {spec.n}")
    K2 = _next_pow2(K)
    p = scaling_exponent(spec) if use_scaling else 0
    sspec = spec.scaled(p)
    embedded = BlockVector._wrap(_pad(sspec.u.data, K2))
    s = exp_circulant(embedded, threads=threads)
    lead = _pad(s.data[: spec.n], _next_pow2(spec.n))
    y = _finish(lead, p, spec.n)

    sigma_grid = 1.0 + np.geomspace(1e-3, 99.0, 80)
    f_min = min(ea.embedding_bound_fK(sspec.alpha, sspec.l_norm, spec.n, K2, s_)
                for s_ in sigma_grid)
    chi = ea.chi_bound(K2, spec.m, float(np.abs(embedded.data).max()), 1.0)
    bounds = {
        "tail": f_min,
        "roundoff": ea.circulant_roundoff_bound(chi, spec.m),
    }
    config = MethodConfig("embedding", K=K2, use_scaling=use_scaling)
    return ExpResult(y=y, method_used=config, scaling_p=p, predicted_bounds=bounds)


def _power_radius(a: np.ndarray, iters: int = 60) -> float:
    # Perron root estimate of a nonnegative matrix by power iteration
    x = np.ones(a.shape[0])
    radius = 0.0
    for _ in range(iters):
        y = a @ x
        top = float(y.max())
        if top == 0.0:
            return 0.0
        radius = top
        x = y / top
    return radius


def exp_btt_taylor(spec: SubgeneratorSpec, tol: float, max_terms: int = 200,
                   *, spectral_estimate: bool = False) -> ExpResult:
    """Exponential row via the shifted Taylor series.

    The leading block is shifted by alpha*I so the whole series is
    nonnegative; the scaling exponent comes from the inf-norm of the shifted
    leading block (or its spectral radius when ``spectral_estimate`` is set,
    which can save squarings for lopsided blocks).  Terms are added until the
    latest term is below ``tol`` relative to the running sum, else the method
    fails after ``max_terms``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_terms < 2:
        raise ValueError("max_terms must be at least 2")

    n, m = spec.n, spec.m
    alpha = spec.alpha
    n2 = _next_pow2(n)
    shifted = _pad(spec.u.data, n2)
    shifted[0] += alpha * np.eye(m)

    if spectral_estimate:
        rho = _power_radius(shifted[0])
    else:
        rho = float(np.abs(shifted[0]).sum(axis=1).max())
    p = int(math.floor(math.log2(rho))) + 1 if rho > 1.0 else 0
    v = shifted / 2.0 ** p
    vb = BlockVector._wrap(v.copy())

    w = v.copy()
    y = v.copy()
    y[0] += np.eye(m)
    converged = False
    for r in range(2, max_terms + 1):
        w = btt_times_btt(vb, BlockVector._wrap(w / r)).data
        y = y + w
        if _row_norm(w) < tol * _row_norm(y):
            converged = True
            break
    if not converged:
        raise NumericalError(
            f"Taylor series did not meet tol={tol!r} within {max_terms} terms")

    y = y * math.exp(-alpha / 2.0 ** p)
    result = _finish(np.ascontiguousarray(y), p, n)
    config = MethodConfig("taylor", taylor_tol=tol, max_terms=max_terms)
    return ExpResult(y=result, method_used=config, scaling_p=p, predicted_bounds=None)


def select_epsilon(spec: SubgeneratorSpec, imaginary: bool = True,
                   mu: float = _MU, tau: float | None = None) -> complex:
    """Magnitude of eps balancing approximation error against roundoff, using
    the substochastic bound 1 for the unknown output norms.  Pass the scaled
    instance (post-scaling norms are what the balance uses).  Returns
    i*|eps| when ``imaginary``.
    """
    m = spec.m
    if tau is None:
        tau = 10.0 * m
    if spec.l_norm == 0:
        # block-diagonal case: any eps is exact, pick a tiny default
        return 1j * mu ** (1.0 / 3.0)
    n2 = _next_pow2(spec.n)
    umax = float(np.abs(spec.u.data).max())
    consts = ea.RoundoffConstants(tau=tau, mu=mu)
    phi = ea.phi_bound(n2, m, umax, 1.0, consts)
    if imaginary:
        mag = (m * mu * phi / spec.l_norm ** 2) ** (1.0 / 3.0)
    else:
        mag = (m * mu * phi / spec.l_norm) ** 0.5
    # tiny l_norm can push the balance past 1; anything near 1 already makes
    # the approximation error negligible, so clamp into the valid range
    mag = min(mag, 0.9)
    return 1j * mag if imaginary else complex(mag)


def _golden_min(fn, lo: float, hi: float, iters: int = 200) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return c if fc <= fd else d


def select_embedding_K(spec: SubgeneratorSpec, target_error: float) -> int:
    """Smallest power-of-two embedding length whose tail bound can be pushed
    below ``target_error``, found by minimizing the size function over sigma
    (golden-section search on log sigma in [1e-6, 10])."""
    if not target_error > 0:
        raise ValueError("target_error must be positive")
    n = spec.n
    if spec.l_norm == 0:
        return _next_pow2(n)

    def g_of_log(t: float) -> float:
        return ea.embedding_size_g(spec.alpha, spec.l_norm, n, target_error, math.exp(t))

    t_star = _golden_min(g_of_log, 1e-6, 10.0)
    g_star = g_of_log(t_star)
    base = max(g_star, float(n))
    k = 1
    while k <= base:
        k <<= 1
    return k


def compute_exponential(spec: SubgeneratorSpec, config: MethodConfig, *,
                        threads: int = 1, allow_large_eps: bool = False) -> ExpResult:
    """Dispatch a MethodConfig to the matching method."""
    if config.method == "eps_circulant":
        return exp_btt_eps(spec, config.epsilon, config.use_scaling,
                           threads=threads, allow_large_eps=allow_large_eps)
    if config.method == "eps_averaged":
        return exp_btt_eps_averaged(spec, config.theta_mag, config.k,
                                    config.use_scaling, threads=threads,
                                    allow_large_eps=allow_large_eps)
    if config.method == "embedding":
        return exp_btt_embedding(spec, config.K, config.use_scaling, threads=threads)
    return exp_btt_taylor(spec, config.taylor_tol, config.max_terms)
