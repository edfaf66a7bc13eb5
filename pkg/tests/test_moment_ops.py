import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from hausmom.functions import abs_kink, constant, cubic_exp, monomial_witness, peak, polynomial
from hausmom.legendre import LegendreExpansion, project
from hausmom.moment_ops import (
    MomentSequence,
    SobolevBudget,
    adjoint_apply,
    exact_polynomial_moments,
    forward_from_expansion,
    forward_moments,
    h1_rate_check,
    projection_error,
    pseudoinverse,
    reconstruction_norm_sq_exact,
    sobolev_norm,
)


class TestForwardMoments:
    def test_constant(self):
        y = forward_moments(constant(1.0), 3)
        assert np.allclose(y.to_array(), [1.0, 0.5, 1 / 3])

    def test_monomial_witness(self):
        # moments of sqrt(i) t^i are sqrt(i)/(i+j)
        y = forward_moments(monomial_witness(4), 2)
        assert y.values[1] == pytest.approx(math.sqrt(4) / 6)

    def test_linear(self):
        y = forward_moments(polynomial((0, 1)), 2)
        assert np.allclose(y.to_array(), [0.5, 1 / 3])

    def test_polynomials_are_exact(self):
        y = exact_polynomial_moments((Fraction(1, 3), 0, Fraction(2)), 4)
        assert y.values[0] == Fraction(1, 3) + Fraction(2, 3)

    def test_operator_norm_witness(self):
        # ||A f|| <= sqrt(pi) ||f|| for every test function
        for f, norm in ((constant(1.0), 1.0), (polynomial((0, 1)), math.sqrt(1 / 3)),
                        (abs_kink(), math.sqrt(1 / 12))):
            y = forward_moments(f, 200)
            assert np.linalg.norm(y.to_array()) <= math.sqrt(math.pi) * norm + 1e-9

    def test_noncompactness_witness(self):
        # ||A x_i||^2 = i * psi'(i+1) exceeds i/(i+1) and increases to 1,
        # while each fixed component sqrt(i)/(i+j) goes to 0 with i
        norms = []
        for i in (10, 100, 1000):
            nsq = float(i * mp.polygamma(1, i + 1))
            assert nsq > i / (i + 1)
            norms.append(nsq)
        assert norms[0] < norms[1] < norms[2] < 1.0
        assert math.sqrt(1000) / (1000 + 1) < math.sqrt(10) / (10 + 1)


class TestForwardFromExpansion:
    def test_first_column(self):
        y = forward_from_expansion(LegendreExpansion([1.0]), 5)
        assert np.allclose(y.to_array(), [1 / j for j in range(1, 6)])

    def test_second_column(self):
        y = forward_from_expansion(LegendreExpansion([0.0, 1.0]), 2)
        assert y.values[0] == pytest.approx(0.0)
        assert y.values[1] == pytest.approx(math.sqrt(3) / 6)

    def test_agrees_with_quadrature_path(self):
        f = polynomial((0, 0, 1))
        a = forward_moments(f, 6).to_array()
        b = forward_from_expansion(project(f, 8), 6).to_array()
        assert np.allclose(a, b, atol=1e-9)


class TestAdjoint:
    def test_constant_sequence(self):
        y = MomentSequence.from_values([1.0, 0.0, 0.0])
        assert adjoint_apply(y, 0.4) == 1.0

    def test_two_terms(self):
        y = MomentSequence.from_values([1.0, 1.0])
        assert adjoint_apply(y, 0.5) == pytest.approx(1.5)

    def test_binomial_series(self):
        from hausmom.exact_core import binomial

        alpha = Fraction(-1, 4)
        vals = [float(binomial(alpha, j)) * (-1) ** j for j in range(200)]
        y = MomentSequence.from_values(vals)
        assert adjoint_apply(y, 0.5) == pytest.approx(0.5**-0.25, rel=1e-6)


class TestPseudoinverse:
    def test_recovers_constant(self):
        lam = pseudoinverse(exact_polynomial_moments((1,), 3))
        assert np.allclose(lam.coefficients, [1.0, 0.0, 0.0], atol=1e-14)

    def test_recovers_identity_map(self):
        lam = pseudoinverse(exact_polynomial_moments((0, 1), 2))
        assert np.allclose(lam.coefficients, [0.5, math.sqrt(3) / 6])

    def test_minimum_norm_quadratic_form(self):
        from hausmom.exact_core import inverse_hilbert

        rng = np.random.default_rng(3)
        for n in (2, 5, 8):
            v = [Fraction(x) for x in rng.uniform(-1, 1, n)]
            y = MomentSequence.from_values(v)
            hinv = inverse_hilbert(n)
            expect = sum(hinv[i, j] * v[i] * v[j] for i in range(n) for j in range(n))
            assert reconstruction_norm_sq_exact(y) == expect
            got = float(np.sum(pseudoinverse(y).coefficients ** 2))
            assert got == pytest.approx(float(expect), rel=1e-9)

    def test_deep_truncation_stays_exact(self):
        # double-precision Cholesky of the Hilbert segment dies near n=13;
        # the rational route does not
        n = 20
        lam = pseudoinverse(exact_polynomial_moments((1,), n))
        assert np.allclose(lam.coefficients, [1.0] + [0.0] * (n - 1), atol=1e-12)


class TestProjectionError:
    def test_polynomial_below_truncation(self):
        assert projection_error(polynomial((1, 2, 3)), 5) < 1e-10

    def test_linear_at_n1(self):
        assert projection_error(polynomial((0, 1)), 1) == pytest.approx(1 / math.sqrt(12))

    def test_nested_decay(self):
        f = cubic_exp()
        errs = [projection_error(f, n) for n in (2, 4, 8)]
        assert errs[0] > errs[1] > errs[2]


class TestSobolevNorm:
    def test_constant(self):
        assert sobolev_norm(constant(1.0), "H1") == pytest.approx(1.0)

    def test_linear_h1(self):
        assert sobolev_norm(polynomial((0, 1)), "H1") == pytest.approx(2 / math.sqrt(3))

    def test_linear_w1inf(self):
        assert sobolev_norm(polynomial((0, 1)), "W1inf") == pytest.approx(1.0)

    def test_missing_derivative(self):
        from hausmom.functions import g_alpha

        with pytest.raises(ValueError):
            sobolev_norm(g_alpha(-0.25), "H1")


class TestRateCheck:
    def test_linear_is_exact(self):
        rows = h1_rate_check(polynomial((0, 1)), SobolevBudget(E=1.2, kind="H1"), [2, 4])
        assert all(r["ok"] for r in rows)
        assert all(r["error"] < 1e-10 for r in rows)

    def test_kink_bound(self):
        f = abs_kink()
        e = sobolev_norm(f, "H1")
        rows = h1_rate_check(f, SobolevBudget(E=e * 1.001, kind="H1"), [4])
        assert rows[0]["error"] <= rows[0]["bound"]

    def test_budget_violation(self):
        with pytest.raises(ValueError, match="budget violated"):
            h1_rate_check(polynomial((0, 1)), SobolevBudget(E=0.1, kind="H1"), [2])

    def test_budget_kind_validation(self):
        with pytest.raises(ValueError):
            SobolevBudget(E=1.0, kind="H3")
        with pytest.raises(ValueError):
            SobolevBudget(E=-1.0)
