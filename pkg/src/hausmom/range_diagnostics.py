"""Range tests for moment sequences.

Two characterizations of the range of the moment map are implemented side
by side: the classical forward-difference criterion (bounded weighted sums
of the lambda_{N,m}) and the Picard-type condition through the inverse
triangular factor.  The bridge between them is the matrix identity
V_N^T V_N = T_N, which is verified here in exact rational arithmetic.

The (1-t)^alpha family spans the stable part of the range: its moment
sequences are positive, slowly decaying, and the inversion constant stays
bounded as long as alpha stays away from -1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, fsum

import numpy as np

from .exact_core import RationalMatrix, cholesky_factor_L, inverse_factor_Linv

__all__ = [
    "HausdorffStats",
    "StableFamilyMember",
    "forward_differences",
    "hausdorff_criterion",
    "build_RN",
    "build_DN",
    "tn_diagonal",
    "verify_TN_identity",
    "picard_partial_sums",
    "stable_family",
]


@dataclass(frozen=True)
class HausdorffStats:
    """One level of the forward-difference range criterion."""

    N: int
    lam: tuple  # lambda_{N,m}, m = 0..N
    criterion_value: object  # (N+1) sum of lambda^2; Fraction in exact mode
    picard_partial: object  # ||P_{N+1} Linv y||^2 over the same data window


@dataclass(frozen=True)
class StableFamilyMember:
    """g_alpha(t) = (1-t)^alpha with its moment sequence and norms."""

    alpha: float
    coeffs: np.ndarray
    l2_function_norm_sq: float
    hardy_norm_sq: float
    tail_bound: float


def _is_exact(y):
    return all(isinstance(v, (Fraction, int)) for v in y.values)


def forward_differences(y, m, n):
    """mu_{m,n} = sum_l (-1)^l C(n,l) y_{m+l+1}; exact for rational data."""
    if m < 0 or n < 0:
        raise ValueError("m and n must be >= 0")
    if m + n + 1 > y.n:
        raise ValueError(f"mu_({m},{n}) needs {m + n + 1} moments, have {y.n}")
    if _is_exact(y):
        return sum((-1) ** l * comb(n, l) * Fraction(y.values[m + l]) for l in range(n + 1))
    # the alternating sum loses ~n bits naively; fsum keeps one rounding
    return fsum((-1) ** l * comb(n, l) * float(y.values[m + l]) for l in range(n + 1))


def hausdorff_criterion(y, N):
    """lambda_{N,m} = C(N,m) mu_{m,N-m} and the level-N criterion value.

    Exact Fractions when the data is rational, compensated floats
    otherwise.  The Picard partial sum over the same N+1 data entries is
    reported alongside for comparison of the two range statistics.
    """
    if N + 1 > y.n:
        raise ValueError(f"level {N} needs {N + 1} moments, have {y.n}")
    lam = tuple(comb(N, m) * forward_differences(y, m, N - m) for m in range(N + 1))
    if _is_exact(y):
        crit = (N + 1) * sum(v * v for v in lam)
    else:
        crit = (N + 1) * fsum(v * v for v in lam)
    picard = _picard_partial(y, N + 1)
    return HausdorffStats(N=N, lam=lam, criterion_value=crit, picard_partial=picard)


def build_RN(N):
    """Upper-triangular backward-difference matrix, entries in {-1,0,1} times binomials.

    (R_N)_{i,j} = (-1)^(N-i) (-1)^(N-j) C(N-i, j-i) for j >= i.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return RationalMatrix(
        [
            [
                (-1) ** (N - i) * (-1) ** (N - j) * comb(N - i, j - i) if j >= i else 0
                for j in range(1, N + 1)
            ]
            for i in range(1, N + 1)
        ]
    )


def build_DN(N):
    """Diagonal sqrt(N) diag(C(N-1,i-1)), returned as (weight N, integer diagonal).

    The sqrt(N) stays symbolic so that squared identities remain rational.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    diag = RationalMatrix(
        [[comb(N - 1, i - 1) if i == j else 0 for j in range(1, N + 1)] for i in range(1, N + 1)]
    )
    return N, diag


def tn_diagonal(N):
    """Exact diagonal of T_N: t_k = C(N-1,k-1)/C(N-1+k,k-1)."""
    return [Fraction(comb(N - 1, k - 1), comb(N - 1 + k, k - 1)) for k in range(1, N + 1)]


def verify_TN_identity(N):
    """Check V_N^T V_N = T_N exactly, with V_N = D_N R_N L_N.

    Writing L_N = Ltilde diag(sqrt(2j-1)) and D_N^2 = N diag(C(N-1,i-1))^2,
    the identity is equivalent to the fully rational statement

        Ltilde^T R_N^T (N diag(C^2)) R_N Ltilde = diag(t_k / (2k-1)),

    which is what gets evaluated; returns (holds, residual matrix).
    """
    ltil = cholesky_factor_L(N).rational_part
    r = build_RN(N)
    weight, dmat = build_DN(N)
    d2 = RationalMatrix(
        [
            [weight * dmat[i, i] ** 2 if i == j else 0 for j in range(N)]
            for i in range(N)
        ]
    )
    gram = ltil.transpose() @ r.transpose() @ d2 @ r @ ltil
    target = RationalMatrix(
        [
            [tn_diag / (2 * (k + 1) - 1) if k == j else 0 for j in range(N)]
            for k, tn_diag in enumerate(tn_diagonal(N))
        ]
    )
    residual = gram - target
    return residual.is_zero(), residual


def _picard_partial(y, N):
    """||P_N Linv y||^2 = sum_{i<=N} (2i-1) inner_i^2, exact for rational y."""
    part = inverse_factor_Linv(N).rational_part
    if _is_exact(y):
        vals = [Fraction(v) for v in y.values[:N]]
        inners = [sum(part[i, j] * vals[j] for j in range(i + 1)) for i in range(N)]
        return sum((2 * i + 1) * v * v for i, v in enumerate(inners))
    vals = [float(v) for v in y.values[:N]]
    inners = [fsum(float(part[i, j]) * vals[j] for j in range(i + 1)) for i in range(N)]
    return fsum((2 * i + 1) * v * v for i, v in enumerate(inners))


def picard_partial_sums(y, N_list):
    """Rows (N, ||P_N Linv y||^2); monotone non-decreasing in N."""
    if max(N_list) > y.n:
        raise ValueError("largest level exceeds the available moments")
    return [{"N": N, "partial": _picard_partial(y, N)} for N in N_list]


def stable_family(alpha, J, tail_K=1_000_000):
    """The moment sequence of (1-t)^alpha, with its norms.

    coeffs holds y_j = C(alpha, j-1) (-1)^(j-1) for j <= J, all positive.
    hardy_norm_sq is the sum of C(alpha,k)^2 over all k, computed as a
    partial sum to tail_K plus an integral correction of the k^(-2(1+alpha))
    envelope; the correction itself is reported as tail_bound.
    """
    if not -0.5 < alpha < 0:
        raise ValueError("alpha must lie strictly inside (-1/2, 0)")
    if J < 1:
        raise ValueError("J must be >= 1")
    K = max(tail_K, J)
    k = np.arange(1, K, dtype=float)
    # |C(alpha,k)| via the ratio |c_k/c_{k-1}| = (k-1-alpha)/k, c_0 = 1
    absc = np.concatenate(([1.0], np.cumprod((k - 1.0 - alpha) / k)))
    coeffs = absc[:J].copy()
    s = 2.0 * (1.0 + alpha)
    partial = float(np.sum(absc**2))
    # integral of the power-law envelope from K - 1/2 onward
    last = K - 1.0
    tail = float(absc[-1] ** 2) * last**s * (last + 0.5) ** (1.0 - s) / (s - 1.0)
    return StableFamilyMember(
        alpha=float(alpha),
        coeffs=coeffs,
        l2_function_norm_sq=1.0 / (1.0 + 2.0 * alpha),
        hardy_norm_sq=partial + tail,
        tail_bound=tail,
    )
