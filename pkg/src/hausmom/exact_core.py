"""Exact rational kernels for the Hilbert matrix and its triangular factors.

Everything in this module is exact: matrices are stored entrywise as
``fractions.Fraction`` and the irrational square-root factors of the
triangular operators are never materialized.  A factored triangular matrix
keeps its integer weights ``2k-1`` separate from the rational part, so all
product identities (Cholesky, inversion, Gram) can be verified with zero
residual even where the condition number grows like exp(3.5 n).

Only ``spectral_norm`` leaves the rational world: it runs power iteration
in mpmath at a configurable precision (default 256 bits), which is required
because the entries of the inverse Hilbert matrix grow roughly like
exp(3.5 n) and double precision is useless long before n = 65.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

import mpmath as mp
import numpy as np

# The entries 1/(i+j-1), the triangular factors and all diagnostics are
# plain reduced rationals; stdlib Fraction already guarantees gcd-reduced
# form and a positive denominator.
Rational = Fraction


class SpectralNormError(RuntimeError):
    """Power iteration failed to certify the requested tolerance."""

    def __init__(self, message, last_estimate=None, iterations=0):
        super().__init__(message)
        self.last_estimate = last_estimate
        self.iterations = iterations


class RationalMatrix:
    """Dense matrix of Fractions with exact arithmetic."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        self.entries = [[Fraction(x) for x in row] for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(row) != self.cols for row in self.entries):
            raise ValueError("ragged rows")

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        ot = list(zip(*other.entries))
        return RationalMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.entries]
        )

    def __sub__(self, other):
        return RationalMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def transpose(self):
        return RationalMatrix(list(zip(*self.entries)))

    def is_zero(self):
        return all(x == 0 for row in self.entries for x in row)

    def is_identity(self):
        return self == RationalMatrix.identity(self.rows)

    def to_float(self):
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def abs_row_sums(self):
        """Exact maximum absolute row sum (the matrix infinity-norm)."""
        return max(sum(abs(x) for x in row) for row in self.entries)

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols})"


class Side(Enum):
    SCALE_COLUMNS = "scale-columns"
    SCALE_ROWS = "scale-rows"


@dataclass(frozen=True)
class FactoredTriangular:
    """Lower-triangular matrix split as rational part times sqrt-weights.

    ``side == SCALE_COLUMNS`` represents ``rational_part @ diag(sqrt(w))``
    (the forward Cholesky factor of the Hilbert matrix), ``SCALE_ROWS``
    represents ``diag(sqrt(w)) @ rational_part`` (its inverse).  The
    weights are the odd integers 2k-1, kept as integers so that Gram
    products fold them back exactly.
    """

    rational_part: RationalMatrix
    diag_weights: tuple
    side: Side

    @property
    def n(self):
        return self.rational_part.rows

    def entry(self, i, j):
        """Float value of entry (i, j), 1-based, including the sqrt-weight."""
        r = self.rational_part[i - 1, j - 1]
        w = self.diag_weights[j - 1] if self.side is Side.SCALE_COLUMNS else self.diag_weights[i - 1]
        return float(r) * np.sqrt(w)

    def to_float(self):
        a = self.rational_part.to_float()
        s = np.sqrt(np.array(self.diag_weights, dtype=float))
        return a * s[np.newaxis, :] if self.side is Side.SCALE_COLUMNS else a * s[:, np.newaxis]

    def gram(self):
        """Exact Gram product with the weights folded in.

        For Ln (scale-columns) this is Ln Ln^T = Ltilde diag(w) Ltilde^T,
        which equals the Hilbert segment. For Ln^{-1} (scale-rows) it is
        (Ln^{-1})^T Ln^{-1} = M^T diag(w) M, the inverse Hilbert segment.
        """
        a = self.rational_part
        w = self.diag_weights
        if self.side is Side.SCALE_COLUMNS:
            rows = a.entries
            return RationalMatrix(
                [
                    [
                        sum(wk * rows[i][k] * rows[j][k] for k, wk in enumerate(w))
                        for j in range(a.rows)
                    ]
                    for i in range(a.rows)
                ]
            )
        cols = list(zip(*a.entries))
        return RationalMatrix(
            [
                [
                    sum(wk * cols[i][k] * cols[j][k] for k, wk in enumerate(w))
                    for j in range(a.cols)
                ]
                for i in range(a.cols)
            ]
        )


def hilbert_matrix(n):
    """Hilbert segment H_n with entries 1/(i+j-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return RationalMatrix(
        [[Fraction(1, i + j - 1) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


def cholesky_factor_L(n):
    """Triangular factor Ln of the Hilbert segment, H_n = Ln Ln^T.

    Entry (i,j) is sqrt(2(j-1)+1)/(i+j-1) * C(i-1,j-1)/C(i+j-2,j-1) for
    j <= i; the sqrt is kept factored as the column weight 2j-1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    part = [
        [
            Fraction(comb(i - 1, j - 1), (i + j - 1) * comb(i + j - 2, j - 1)) if j <= i else Fraction(0)
            for j in range(1, n + 1)
        ]
        for i in range(1, n + 1)
    ]
    return FactoredTriangular(RationalMatrix(part), tuple(2 * j - 1 for j in range(1, n + 1)), Side.SCALE_COLUMNS)


def inverse_factor_Linv(n):
    """Closed-form inverse factor, Ln^{-1} = diag(sqrt(2i-1)) @ M.

    M has the integer entries (-1)^(i+j) C(i-1,j-1) C(i+j-2,j-1); the
    row weight sqrt(2(i-1)+1) stays factored.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    part = [
        [
            Fraction((-1) ** (i + j) * comb(i - 1, j - 1) * comb(i + j - 2, j - 1)) if j <= i else Fraction(0)
            for j in range(1, n + 1)
        ]
        for i in range(1, n + 1)
    ]
    return FactoredTriangular(RationalMatrix(part), tuple(2 * i - 1 for i in range(1, n + 1)), Side.SCALE_ROWS)


def inverse_hilbert(n):
    """Exact inverse Hilbert segment, H_n^{-1} = M^T diag(2j-1) M."""
    return inverse_factor_Linv(n).gram()


def back_substitution_inverse(lfac):
    """Invert a scale-columns factored triangular by back substitution.

    Returns a scale-rows factored triangular with the same weight layout
    as :func:`inverse_factor_Linv`; used as the independent oracle for the
    closed-form inverse.  Writing Ln = Ltilde S with S = diag(sqrt(w)),
    Ln^{-1} = S^{-1} Ltilde^{-1} = S (S^{-2} Ltilde^{-1}); the rational
    part returned is diag(1/w) @ Ltilde^{-1}.
    """
    if lfac.side is not Side.SCALE_COLUMNS:
        raise ValueError("expected a scale-columns factor")
    n = lfac.n
    a = lfac.rational_part
    inv = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = 1 / a[j, j]
        for i in range(j + 1, n):
            s = sum(a[i, k] * inv[k][j] for k in range(j, i))
            inv[i][j] = -s / a[i, i]
    w = lfac.diag_weights
    part = [[inv[i][j] / w[i] for j in range(n)] for i in range(n)]
    return FactoredTriangular(RationalMatrix(part), w, Side.SCALE_ROWS)


def binomial(a, k):
    """Generalized binomial coefficient C(a, k) via the running product.

    Exact Fraction for integer or rational a; mpmath float (at the current
    working precision) for real a.  The product form avoids the Gamma-pole
    bookkeeping that quotients of Gamma values would need for a in (-1, 0).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if isinstance(a, numbers.Integral) or isinstance(a, Fraction):
        out = Fraction(1)
        a = Fraction(a)
        for j in range(k):
            out *= (a - j) / (j + 1)
        return out
    out = mp.mpf(1)
    a = mp.mpf(a)
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


def _to_mp_matrix(m):
    return mp.matrix([[mp.mpf(x.numerator) / mp.mpf(x.denominator) for x in row] for row in m.entries])


def spectral_norm(m, precision=256, tol=1e-20, max_iter=1000):
    """Largest eigenvalue of a symmetric PSD RationalMatrix.

    Power iteration in mpmath at ``precision`` bits, started from the
    all-ones vector.  Converged when the Rayleigh quotient's relative
    change and the relative residual ||Av - lv|| / (l ||v||) both drop
    below ``tol``; for symmetric matrices the residual bounds the
    eigenvalue error, so the result is certified to relative ``tol``.
    """
    if m.rows != m.cols:
        raise ValueError("matrix must be square")
    if tol <= 0:
        raise ValueError("tol must be positive")
    with mp.workprec(max(int(precision), 64)):
        a = _to_mp_matrix(m)
        n = m.rows
        if n == 1:
            return +a[0, 0]
        v = mp.matrix([mp.mpf(1)] * n)
        lam_prev = None
        for it in range(max_iter):
            w = a * v
            nv2 = mp.fsum(x * x for x in v)
            lam = mp.fsum(x * y for x, y in zip(v, w)) / nv2
            nw = mp.sqrt(mp.fsum(x * x for x in w))
            if nw == 0:
                return mp.mpf(0)
            resid = mp.sqrt(mp.fsum((y - lam * x) ** 2 for x, y in zip(v, w))) / mp.sqrt(nv2)
            v = w / nw
            if lam_prev is not None and lam > 0:
                if abs(lam - lam_prev) / lam < tol and resid / lam < tol:
                    return +lam
            lam_prev = lam
        raise SpectralNormError(
            f"power iteration did not certify tol={tol} in {max_iter} iterations",
            last_estimate=lam_prev,
            iterations=max_iter,
        )
