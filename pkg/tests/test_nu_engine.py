import cmath

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hulthen_dirac import nu_engine as nu
from hulthen_dirac.errors import AmbiguousBranch, DegreeViolation, NotPerfectSquare, UnsupportedSigmaClass
from hulthen_dirac.hulthen import PotentialSpec, Variant, map_to_nu, bound_state_branch
from hulthen_dirac.suite import oscillator_levels


def oscillator(eps_tilde):
    return nu.validate_problem(nu.Poly2(1), nu.Poly2(eps_tilde, 0, -1), nu.Poly2())


# Hulthen instance: q = 1, alpha = 1, V0 = 2.5, m = 1, E = 0.6
# eps = 0.8, beta = 3 + 2.5i, v = 1 - 5i
HULTHEN = PotentialSpec(2.5, 1.0, 1.0, 1.0, Variant.REAL)
E_INST = 0.6


@pytest.fixture
def hulthen_problem():
    return map_to_nu(HULTHEN, E_INST)


def test_instance_parameters(hulthen_problem):
    _, p = hulthen_problem
    assert p.eps == pytest.approx(0.8)
    assert p.beta == pytest.approx(3 + 2.5j)
    assert p.v == pytest.approx(1 - 5j)


class TestValidate:
    def test_oscillator_is_valid(self):
        prob = oscillator(3.0)
        assert prob.sigma.degree() == 0

    def test_hulthen_form_is_valid(self, hulthen_problem):
        prob, _ = hulthen_problem
        assert prob.sigma.isclose(nu.Poly2(0, 1, -1))
        assert prob.tau_tilde.isclose(nu.Poly2(1, -1, 0))

    def test_quadratic_tau_tilde_rejected(self):
        with pytest.raises(DegreeViolation):
            nu.validate_problem(nu.Poly2(1), nu.Poly2(1), nu.Poly2(0, 0, 1))

    def test_zero_sigma_rejected(self):
        with pytest.raises(DegreeViolation):
            nu.validate_problem(nu.Poly2(), nu.Poly2(1), nu.Poly2())

    def test_product_above_degree_two_rejected(self):
        with pytest.raises(DegreeViolation):
            nu.Poly2(0, 1, 1) * nu.Poly2(0, 1, 0)


class TestKCandidates:
    def test_oscillator_single_k(self):
        assert nu.k_candidates(oscillator(5.0)) == [pytest.approx(5.0)]

    def test_hulthen_pair(self, hulthen_problem):
        prob, _ = hulthen_problem
        ks = sorted(nu.k_candidates(prob), key=lambda k: k.real)
        assert ks[0] == pytest.approx(2.2 + 6.5j, abs=1e-12)
        assert ks[1] == pytest.approx(3.8 - 1.5j, abs=1e-12)

    def test_hulthen_pair_discriminant_zero(self, hulthen_problem):
        prob, _ = hulthen_problem
        for k in nu.k_candidates(prob):
            u = nu.under_root(prob, k)
            assert abs(u.c1**2 - 4 * u.c0 * u.c2) <= 1e-10 * u.scale() ** 2

    def test_exponential_pair(self):
        spec = PotentialSpec(2.5, 0.0, 1.0, 1.0, Variant.EXPONENTIAL)
        prob, p = map_to_nu(spec, 0.3)
        ks = nu.k_candidates(prob)
        for target in (p.beta + 2j * p.delta * p.eps, p.beta - 2j * p.delta * p.eps):
            assert min(abs(k - target) for k in ks) < 1e-12


class TestPiCandidates:
    def test_oscillator(self):
        plus, minus = nu.pi_candidates(oscillator(5.0), 5.0)
        assert {plus.c1, minus.c1} == {1, -1}
        assert plus.c0 == minus.c0 == 0

    def test_hulthen_lower_k(self, hulthen_problem):
        # pi = -s/2 +/- [(1.3 - 2.5i)s - 0.8], i.e. the two forms below
        prob, _ = hulthen_problem
        pis = nu.pi_candidates(prob, 2.2 + 6.5j)
        targets = [nu.Poly2(0.8, -(1.8 - 2.5j)), nu.Poly2(-0.8, 0.8 - 2.5j)]
        for t in targets:
            assert any(p.isclose(t, 1e-12) for p in pis)

    def test_exponential_lower_k(self):
        spec = PotentialSpec(2.5, 0.0, 1.0, 1.0, Variant.EXPONENTIAL)
        prob, p = map_to_nu(spec, 0.3)
        pis = nu.pi_candidates(prob, p.beta - 2j * p.delta * p.eps)
        for t in (nu.Poly2(-p.eps, 1j * p.delta), nu.Poly2(p.eps, -1j * p.delta)):
            assert any(q.isclose(t, 1e-12) for q in pis)

    def test_inconsistent_k_rejected(self):
        with pytest.raises(NotPerfectSquare):
            nu.pi_candidates(oscillator(5.0), 4.0)


class TestAssemble:
    def test_oscillator_branches(self):
        prob = oscillator(5.0)
        down = nu.assemble_branch(prob, 5.0, nu.Poly2(0, -1))
        assert down.tau.isclose(nu.Poly2(0, -2)) and down.admissible
        assert down.lam == pytest.approx(4.0)
        up = nu.assemble_branch(prob, 5.0, nu.Poly2(0, 1))
        assert not up.admissible

    def test_hulthen_branch(self, hulthen_problem):
        prob, _ = hulthen_problem
        b = nu.assemble_branch(prob, 2.2 + 6.5j, nu.Poly2(0.8, -(1.8 - 2.5j)))
        assert b.tau.isclose(nu.Poly2(2.6, -(4.6 - 5j)), 1e-12)
        assert b.lam == pytest.approx(0.4 + 9j)
        assert b.admissible
        assert nu.eigen_lambda(b, 1) == pytest.approx(4.6 - 5j)
        assert nu.eigen_lambda(b, 0) == 0

    def test_branch_identities(self, hulthen_problem):
        prob, _ = hulthen_problem
        for b in nu.enumerate_branches(prob):
            assert b.tau.isclose(prob.tau_tilde + b.pi * 2, 1e-12)
            assert b.lam == pytest.approx(b.k + b.pi.c1, rel=1e-12)


class TestSelect:
    def test_oscillator_default(self):
        b = nu.select_branch(nu.enumerate_branches(oscillator(5.0)))
        assert b.k == pytest.approx(5.0) and b.pi.c1 == pytest.approx(-1)

    def test_hulthen_default_is_bound_state_branch(self, hulthen_problem):
        prob, p = hulthen_problem
        b = nu.select_branch(nu.enumerate_branches(prob))
        ref = bound_state_branch(prob, HULTHEN, p)
        assert b.k == pytest.approx(ref.k) and b.pi.isclose(ref.pi)
        assert b.tau.isclose(nu.Poly2(2.6, -(4.6 - 5j)), 1e-12)

    def test_tie_is_ambiguous(self):
        pi = nu.Poly2(0, -1)
        b = nu.NUBranch(1, pi, nu.Poly2(0, -2), 0, 1, True)
        c = nu.NUBranch(2, pi, nu.Poly2(1, -2 + 1j), 0, -1, True)
        with pytest.raises(AmbiguousBranch):
            nu.select_branch([b, c])

    def test_none_admissible_is_ambiguous(self):
        b = nu.NUBranch(1, nu.Poly2(0, 1), nu.Poly2(0, 2), 0, 1, False)
        with pytest.raises(AmbiguousBranch):
            nu.select_branch([b])

    def test_explicit_index_ignores_admissibility(self):
        b = nu.NUBranch(1, nu.Poly2(0, 1), nu.Poly2(0, 2), 0, 1, False)
        assert nu.select_branch([b], "explicit_index", 0) is b


def test_oscillator_quantization():
    levels = oscillator_levels(10)
    assert np.max(np.abs(levels - (2 * np.arange(11) + 1))) <= 1e-12


def test_oscillator_lambda3():
    b = nu.select_branch(nu.enumerate_branches(oscillator(7.0)))
    assert nu.eigen_lambda(b, 3) == pytest.approx(6.0)


class TestWeights:
    def test_hulthen_weight_and_phi(self, hulthen_problem):
        prob, p = hulthen_problem
        b = bound_state_branch(prob, HULTHEN, p)
        w = nu.pearson_weight(b, prob)
        assert w.kind == "power_power"
        assert w.A == pytest.approx(2 * p.eps) and w.B == pytest.approx(p.v / p.q_eff)
        f = nu.phi_factor(b, prob)
        assert f.A == pytest.approx(p.eps) and f.B == pytest.approx((p.v + p.q_eff) / (2 * p.q_eff))

    def test_exponential_weight_and_phi(self):
        spec = PotentialSpec(2.5, 0.0, 1.0, 1.0, Variant.EXPONENTIAL)
        prob, p = map_to_nu(spec, 0.3)
        b = bound_state_branch(prob, spec, p)
        w = nu.pearson_weight(b, prob)
        assert w.kind == "power_exp"
        assert w.A == pytest.approx(2 * p.eps) and w.B == pytest.approx(-2j * p.delta)
        f = nu.phi_factor(b, prob)
        assert f.A == pytest.approx(p.eps) and f.B == pytest.approx(-1j * p.delta)

    def test_tau_equal_sigma_prime_gives_constant_weight(self):
        prob = nu.validate_problem(nu.Poly2(0, 1, -1), nu.Poly2(), nu.Poly2(1, -2))
        b = nu.assemble_branch(prob, 0, nu.Poly2())
        w = nu.pearson_weight(b, prob)
        assert w.A == 0 and w.B == 0
        f = nu.phi_factor(b, prob)
        assert f.A == 0 and f.B == 0

    def test_unsupported_sigma(self):
        prob = oscillator(1.0)
        b = nu.select_branch(nu.enumerate_branches(prob))
        with pytest.raises(UnsupportedSigmaClass):
            nu.pearson_weight(b, prob)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.5, 4), st.sampled_from([1.0, -1.0, 2.0]), st.floats(0.5, 2),
           st.floats(-0.9, 0.9), st.floats(-0.5, 0.5))
    def test_pearson_equation(self, V0, q, alpha, Er, Ei):
        spec = PotentialSpec(V0, q, alpha, 1.0, Variant.REAL)
        prob, p = map_to_nu(spec, complex(Er, Ei))
        b = bound_state_branch(prob, spec, p)
        w = nu.pearson_weight(b, prob)
        rng = np.random.default_rng(0)
        s = (rng.uniform(0.05, 0.45, 20) + 1j * rng.uniform(-0.2, 0.2, 20)) / abs(q)
        # (sigma rho)' - tau rho = rho [sigma' + sigma (log rho)' - tau]
        rel = np.abs(prob.sigma.deriv()(s) + prob.sigma(s) * w.log_derivative(s) - b.tau(s))
        assert np.max(rel / np.maximum(np.abs(b.tau(s)), 1.0)) <= 1e-10


def _symbolic_rodrigues(n, A, B, q):
    s = sp.symbols("s")
    rho = s**A * (1 - q * s) ** B
    sigma = s * (1 - q * s)
    expr = sp.diff(sigma**n * rho, s, n) / rho
    return sp.lambdify(s, sp.simplify(expr), "numpy")


@pytest.mark.parametrize("n", range(6))
def test_rodrigues_matches_jacobi(n):
    A, B, q = sp.Rational(3, 4), sp.Rational(-1, 3), 1
    weight = nu.WeightSpec("power_power", complex(A), complex(B), complex(q))
    ref = nu.rodrigues_polynomial(None, weight, n)
    assert ref.family == "jacobi"
    f = _symbolic_rodrigues(n, A, B, q)
    s = np.linspace(0.1, 0.9, 7)
    ratio = f(s) / ref(s)
    assert np.max(np.abs(ratio - ratio[0])) <= 1e-9 * abs(ratio[0])


@pytest.mark.parametrize("n", range(6))
def test_rodrigues_matches_laguerre(n):
    s = sp.symbols("s")
    A, B = sp.Rational(1, 2), sp.Rational(-3, 2)
    rho = s**A * sp.exp(B * s)
    f = sp.lambdify(s, sp.simplify(sp.diff(s**n * rho, s, n) / rho), "numpy")
    ref = nu.rodrigues_polynomial(None, nu.WeightSpec("power_exp", 0.5, -1.5), n)
    x = np.linspace(0.2, 3.0, 7)
    ratio = f(x) / ref(x)
    assert np.max(np.abs(ratio - ratio[0])) <= 1e-9 * abs(ratio[0])


def test_rodrigues_degree_zero_and_legendre():
    w = nu.WeightSpec("power_power", 0, 0, 1)
    assert nu.rodrigues_polynomial(None, w, 0)(0.3) == pytest.approx(1)
    p2 = nu.rodrigues_polynomial(None, w, 2)
    z = 1 - 2 * 0.3
    assert p2(0.3) == pytest.approx((3 * z * z - 1) / 2)


def test_linear_sqrt_principal():
    r = nu.linear_sqrt(nu.Poly2(4, 4, 1))  # (z + 2)^2
    assert r.isclose(nu.Poly2(2, 1)) or r.isclose(nu.Poly2(-2, -1))
    assert r.c1 == pytest.approx(cmath.sqrt(1))
