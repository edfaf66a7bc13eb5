"""Shifted, normalized Legendre polynomials on [0, 1].

L_k(t) = sqrt(2k+1) P_k(2t - 1) form an orthonormal basis of L^2(0, 1);
coefficient vectors are 1-based in the sense that entry i holds the
coefficient of L_{i-1}, matching the row/column indexing of the
triangular moment factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from numpy.polynomial.legendre import leggauss


class QuadratureOrderError(ValueError):
    """Quadrature rule too weak for the requested projection."""


@dataclass(frozen=True)
class LegendreExpansion:
    """Coefficients (lambda_1 .. lambda_m) of L_0 .. L_{m-1}."""

    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=float))

    @property
    def m(self):
        return len(self.coefficients)

    def norm(self):
        # Parseval: the L2 norm of the expansion is the l2 norm of lambda
        return float(np.linalg.norm(self.coefficients))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int

    @classmethod
    def gauss(cls, npts, interval=(0.0, 1.0)):
        """Gauss-Legendre with npts nodes on the interval; exact to degree 2*npts-1."""
        x, w = leggauss(npts)
        a, b = interval
        return cls((b - a) / 2 * x + (a + b) / 2, (b - a) / 2 * w, 2 * npts - 1)

    @classmethod
    def composite(cls, npts, breakpoints):
        """Gauss-Legendre on each subinterval of the given partition of [0,1]."""
        pieces = [cls.gauss(npts, (a, b)) for a, b in zip(breakpoints[:-1], breakpoints[1:])]
        return cls(
            np.concatenate([p.nodes for p in pieces]),
            np.concatenate([p.weights for p in pieces]),
            2 * npts - 1,
        )

    @classmethod
    def endpoint_graded(cls, npts, levels=40):
        """Composite rule geometrically refined toward t = 1.

        For integrands whose derivative blows up at 1 (the (1-t)^alpha
        family) plain Gauss stalls; this splits [0,1] at 1 - 2^-l.
        """
        bps = [0.0] + [1.0 - 2.0 ** -l for l in range(1, levels + 1)] + [1.0]
        return cls.composite(npts, bps)


def legendre_eval(k, t):
    """L_k(t) via the stable three-term recurrence for P_k(2t-1)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > 1):
        raise ValueError("t must lie in [0, 1]")
    x = 2 * t_arr - 1
    if k == 0:
        out = np.ones_like(x)
    elif k == 1:
        out = x
    else:
        pkm1, pk = np.ones_like(x), x
        for j in range(2, k + 1):
            pkm1, pk = pk, ((2 * j - 1) * x * pk - (j - 1) * pkm1) / j
        out = pk
    out = sqrt(2 * k + 1) * out
    return out if out.shape else float(out)


def basis_matrix(m, t):
    """Rows L_0(t) .. L_{m-1}(t); one recurrence pass for all degrees."""
    t = np.asarray(t, dtype=float)
    x = 2 * t - 1
    out = np.empty((m, len(t)))
    out[0] = 1.0
    if m > 1:
        out[1] = sqrt(3) * x
    pkm1, pk = np.ones_like(x), x
    for k in range(2, m):
        pkm1, pk = pk, ((2 * k - 1) * x * pk - (k - 1) * pkm1) / k
        out[k] = sqrt(2 * k + 1) * pk
    return out


def default_rule(f, m, oversample=8):
    """Quadrature rule matched to f: honours breakpoints and the t=1 grading."""
    npts = m + oversample
    breakpoints = tuple(getattr(f, "breakpoints", ()) or ())
    if getattr(f, "singular_at_one", False):
        return QuadratureRule.endpoint_graded(npts)
    if breakpoints:
        bps = sorted({0.0, 1.0, *breakpoints})
        return QuadratureRule.composite(npts, bps)
    return QuadratureRule.gauss(npts)


def project(f, m, quad=None, tail_tol=None):
    """First m Legendre coefficients of f by quadrature.

    Exact (to roundoff) for polynomial f of degree < m with the default
    rule.  If ``tail_tol`` is given, a last coefficient exceeding it makes
    the rule suspect and raises QuadratureOrderError.
    """
    if quad is None:
        quad = default_rule(f, m)
    fv = np.asarray(f(quad.nodes), dtype=float)
    if fv.shape != quad.nodes.shape:
        fv = np.broadcast_to(fv, quad.nodes.shape)
    coeffs = basis_matrix(m, quad.nodes) @ (fv * quad.weights)
    if tail_tol is not None and abs(coeffs[-1]) > tail_tol:
        raise QuadratureOrderError(
            f"last coefficient {coeffs[-1]:.3e} exceeds tail tolerance {tail_tol:.3e}"
        )
    return LegendreExpansion(coeffs)


def expansion_eval(e, t):
    """Evaluate sum_i lambda_i L_{i-1}(t)."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or np.any(t_arr > 1):
        raise ValueError("t must lie in [0, 1]")
    vals = e.coefficients @ basis_matrix(e.m, t_arr)
    return vals if np.ndim(t) else float(vals[0])


def l2_distance(e1, e2):
    """Parseval distance; the shorter coefficient vector is zero-padded."""
    m = max(e1.m, e2.m)
    a = np.zeros(m)
    b = np.zeros(m)
    a[: e1.m] = e1.coefficients
    b[: e2.m] = e2.coefficients
    return float(np.linalg.norm(a - b))
