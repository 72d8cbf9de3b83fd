import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma, kv

from arstats.errors import InvalidParamsError, PauliViolation, QuadratureError
from arstats.measures import (
    MomentCase,
    QuadratureSpec,
    bessel_k,
    gram_matrix_r1,
    moment_residual,
    moment_rhs,
    semi_infinite,
    verify_simplex_identity,
)
from arstats.fock import SectorParams


def fermi(r, k):
    return SectorParams(r=r, s=-1, k=k)


def bose(r, k):
    return SectorParams(r=r, s=1, k=k)


def k_by_quad(nu, x):
    # integrand below e^-700 beyond t_max
    t_max = math.acosh(1 + (700 + nu * 20) / x) + 1

    def f(t):
        return 0.5 * (math.exp(nu * t - x * math.cosh(t)) + math.exp(-nu * t - x * math.cosh(t)))

    val, _ = quad(f, 0, t_max, epsabs=0, epsrel=1e-13, limit=400)
    return val


class TestBesselK:
    def test_reference_values(self):
        assert bessel_k(0, 1.0) == pytest.approx(0.4210244382407084, rel=1e-12)
        assert bessel_k(1, 1.0) == pytest.approx(0.6019072301972347, rel=1e-12)

    @pytest.mark.parametrize("nu", [0, 1, 2, 3, 5])
    @pytest.mark.parametrize("x", [0.05, 0.5, 1.0, 2.0, 7.5, 30.0])
    def test_against_adaptive_quadrature(self, nu, x):
        assert bessel_k(nu, x) == pytest.approx(k_by_quad(nu, x), rel=1e-10)

    def test_against_scipy_grid(self):
        xs = np.logspace(-3, np.log10(600), 200)
        for nu in range(0, 8):
            ref = kv(nu, xs)
            assert np.max(np.abs(bessel_k(nu, xs) / ref - 1)) < 1e-10

    def test_recurrence(self):
        for x in (0.5, 1.0, 2.0, 5.0):
            for nu in range(1, 6):
                lhs = bessel_k(nu + 1, x)
                rhs = bessel_k(nu - 1, x) + 2 * nu / x * bessel_k(nu, x)
                assert abs(lhs / rhs - 1) < 1e-9

    @pytest.mark.parametrize("nu", [0, 1])
    def test_asymptotic(self, nu):
        x = 50.0
        assert bessel_k(nu, x) * math.sqrt(2 * x / math.pi) * math.exp(x) == pytest.approx(1.0, rel=0.01)

    def test_shapes(self):
        grid = np.array([[0.5, 1.0], [2.0, 4.0]])
        out = bessel_k(2, grid)
        assert out.shape == (2, 2)
        assert out[1, 0] == bessel_k(2, 2.0)
        assert isinstance(bessel_k(2, 2.0), float)

    @pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
    def test_domain(self, x):
        with pytest.raises(InvalidParamsError):
            bessel_k(1, x)


class TestCases:
    def test_invariants(self):
        with pytest.raises(PauliViolation):
            MomentCase("projective", fermi(1, 2), (2,))
        with pytest.raises(InvalidParamsError):
            MomentCase("projective", bose(1, 2), (0,))
        with pytest.raises(InvalidParamsError):
            MomentCase("bessel", fermi(1, 2), (0,))
        with pytest.raises(InvalidParamsError):
            MomentCase("bessel", bose(3, 2), (0, 0, 0))
        with pytest.raises(InvalidParamsError):
            MomentCase("ball", bose(2, 2), (0, 0))
        with pytest.raises(InvalidParamsError):
            MomentCase("ball", bose(2, 3), (0,))
        with pytest.raises(InvalidParamsError):
            QuadratureSpec(nodes=1)

    @pytest.mark.parametrize("k", [2, 3, 5])
    @pytest.mark.parametrize("n", [0, 1, 2, 4])
    def test_bessel_rhs_gamma_identity(self, k, n):
        # int_0^inf x^(mu-1) K_nu(2x) dx = Gamma((mu+nu)/2) Gamma((mu-nu)/2) / 4
        mu, nu = k + 2 * n + 1, k - 1
        integral = gamma((mu + nu) / 2) * gamma((mu - nu) / 2) / 4
        lhs = 2 * math.pi * 2 / (math.pi * math.factorial(k - 1)) * integral
        assert lhs == pytest.approx(float(moment_rhs(MomentCase("bessel", bose(1, k), (n,)))), rel=1e-13)


class TestMoments:
    def test_projective_example(self):
        res = moment_residual(MomentCase("projective", fermi(1, 2), (0,)))
        assert res.rhs == 1.0
        assert res.lhs == pytest.approx(1.0, abs=1e-12)

    def test_ball_example(self):
        res = moment_residual(MomentCase("ball", bose(1, 2), (1,)))
        assert res.rhs == pytest.approx(1 / (4 * math.pi), rel=1e-15)
        assert res.lhs == pytest.approx(1 / (4 * math.pi), rel=1e-10)

    def test_bessel_example(self):
        res = moment_residual(MomentCase("bessel", bose(1, 2), (0,)))
        assert res.rhs == 1.0
        assert res.residual < 1e-10

    @pytest.mark.parametrize(
        "family,params,n",
        [("bessel", bose(1, 3), (2,)), ("ball", bose(1, 4), (3,)), ("projective", fermi(1, 5), (2,))],
    )
    def test_single_mode_by_adaptive_quadrature(self, family, params, n):
        k, (m,) = params.k, n
        if family == "bessel":
            f = lambda p: 2 * math.pi * 2 / (math.pi * math.factorial(k - 1)) * p ** (k - 1) * kv(k - 1, 2 * p) * p ** (2 * m + 1)
            ref = quad(f, 0, math.inf, epsrel=1e-12, limit=200)[0]
        elif family == "ball":
            f = lambda p: (k - 1) / math.pi * (1 - p * p) ** (k - 2) * p ** (2 * m + 1)
            ref = quad(f, 0, 1, epsrel=1e-13)[0]
        else:
            f = lambda x: k * (1 + x) ** (-(k + 1)) * x**m
            ref = quad(f, 0, math.inf, epsrel=1e-13)[0]
        res = moment_residual(MomentCase(family, params, n))
        assert res.lhs == pytest.approx(ref, rel=1e-9)
        assert res.residual < 1e-9

    @pytest.mark.parametrize(
        "family,params,n",
        [("bessel", bose(2, 3), (1, 2)), ("bessel", bose(2, 5), (2, 2)), ("ball", bose(2, 5), (3, 1)),
         ("ball", bose(2, 3), (0, 3)), ("projective", fermi(2, 6), (2, 1)), ("projective", fermi(2, 1), (0, 0))],
    )
    def test_two_mode_cases(self, family, params, n):
        assert moment_residual(MomentCase(family, params, n)).residual < 1e-10

    def test_divergent_projective_raises(self):
        case = MomentCase("projective", fermi(1, 2), (2,), validate=False)
        with pytest.raises(QuadratureError):
            moment_residual(case)

    def test_semi_infinite_rule(self):
        x, w = semi_infinite(64)
        assert np.sum(w * np.exp(-x)) == pytest.approx(1.0, rel=1e-12)


class TestSimplex:
    def test_examples(self):
        res = verify_simplex_identity(bose(1, 2), (0,))
        assert res.rhs == 1.0 and res.residual < 1e-14
        res = verify_simplex_identity(bose(2, 4), (1, 0))
        assert res.rhs == pytest.approx(1 / 24, rel=1e-15)
        assert res.residual < 1e-14
        assert verify_simplex_identity(bose(1, 2), (1,)).lhs == pytest.approx(0.5, rel=1e-14)

    def test_needs_k_above_r(self):
        with pytest.raises(InvalidParamsError):
            verify_simplex_identity(bose(2, 2), (0, 0))

    def test_dirichlet_oracle(self):
        # Dirichlet integral: prod Gamma(a_i) / Gamma(sum a_i) with a = (n+1, k-r)
        params, n = bose(2, 6), (2, 3)
        a = [v + 1 for v in n] + [params.k - params.r]
        ref = math.prod(gamma(v) for v in a) / gamma(sum(a))
        assert verify_simplex_identity(params, n).lhs == pytest.approx(ref, rel=1e-12)


class TestGram:
    @pytest.mark.parametrize("family,params", [("bessel", bose(1, 2)), ("ball", bose(1, 3)), ("projective", fermi(1, 4))])
    def test_identity(self, family, params):
        g = gram_matrix_r1(family, params, 3)
        assert np.max(np.abs(g - np.eye(g.shape[0]))) < 1e-10

    def test_needs_one_mode(self):
        with pytest.raises(InvalidParamsError):
            gram_matrix_r1("ball", bose(2, 3), 2)
