"""Nikiforov-Uvarov reduction for equations of generalized hypergeometric type.

The target equation is

    phi'' + tau_tilde/sigma * phi' + sigma_tilde/sigma**2 * phi = 0

with deg(sigma), deg(sigma_tilde) <= 2 and deg(tau_tilde) <= 1, all with
complex coefficients.  The substitution phi = varphi * y reduces it to
sigma*y'' + tau*y' + lambda*y = 0, whose polynomial solutions follow from a
Rodrigues formula with the Pearson weight rho, (sigma*rho)' = tau*rho.

Everything here is a pure function of immutable values.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import special
from .errors import (
    AmbiguousBranch,
    DegreeViolation,
    NoSolution,
    NotPerfectSquare,
    UnsupportedSigmaClass,
)

ZERO_RTOL = 1e-12
SQUARE_RTOL = 1e-10
K_MERGE_NOISE = 64 * 2.220446049250313e-16


@dataclass(frozen=True)
class Poly2:
    """c0 + c1*z + c2*z**2 with complex coefficients."""

    c0: complex = 0j
    c1: complex = 0j
    c2: complex = 0j

    def __post_init__(self):
        for name in ("c0", "c1", "c2"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def coeffs(self) -> tuple[complex, complex, complex]:
        return (self.c0, self.c1, self.c2)

    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def degree(self, rtol: float = ZERO_RTOL) -> int:
        """Degree with coefficients below rtol*max|c| treated as zero; -1 for the zero polynomial."""
        big = self.scale()
        if big == 0.0:
            return -1
        for d in (2, 1, 0):
            if abs(self.coeffs[d]) > rtol * big:
                return d
        return -1  # pragma: no cover

    def __call__(self, z):
        return self.c0 + z * (self.c1 + z * self.c2)

    def deriv(self) -> "Poly2":
        return Poly2(self.c1, 2 * self.c2, 0)

    def __add__(self, other: "Poly2") -> "Poly2":
        return Poly2(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Poly2") -> "Poly2":
        return Poly2(*(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        if isinstance(other, Poly2):
            prod = np.convolve(self.coeffs, other.coeffs)
            if any(abs(c) > ZERO_RTOL * max(1.0, abs(prod).max()) for c in prod[3:]):
                raise DegreeViolation("product exceeds degree 2")
            return Poly2(*prod[:3])
        return Poly2(*(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> "Poly2":
        return self * -1

    def isclose(self, other: "Poly2", rtol: float = 1e-12) -> bool:
        scale = max(self.scale(), other.scale(), 1e-300)
        return (self - other).scale() <= rtol * scale


@dataclass(frozen=True)
class NUProblem:
    sigma: Poly2
    sigma_tilde: Poly2
    tau_tilde: Poly2


@dataclass(frozen=True)
class NUBranch:
    k: complex
    pi: Poly2
    tau: Poly2
    lam: complex
    sqrt_sign: Literal[1, -1]
    admissible: bool
    sigma_pp: complex = 0j

    @property
    def tau_prime(self) -> complex:
        return self.tau.c1


@dataclass(frozen=True)
class WeightSpec:
    """rho(s) = s**A (1 - q_node*s)**B  (power_power)  or  s**A exp(B*s)  (power_exp).

    Powers use the principal branch of the logarithm.
    """

    kind: Literal["power_power", "power_exp"]
    A: complex
    B: complex
    q_node: complex | None = None

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        if self.kind == "power_power":
            return s**self.A * (1 - self.q_node * s) ** self.B
        return s**self.A * np.exp(self.B * s)

    def log_derivative(self, s):
        s = np.asarray(s, dtype=complex)
        if self.kind == "power_power":
            return self.A / s - self.q_node * self.B / (1 - self.q_node * s)
        return self.A / s + self.B


@dataclass(frozen=True)
class ClassicalPolyRef:
    """A classical polynomial in an affine image z = z0 + z1*s of the NU variable.

    family "jacobi" carries params (a, b); family "laguerre" carries (a,).
    Normalization is the standard one for the family.
    """

    family: Literal["jacobi", "laguerre"]
    n: int
    params: tuple[complex, ...]
    z0: complex
    z1: complex

    def argument(self, s):
        return self.z0 + self.z1 * np.asarray(s, dtype=complex)

    def __call__(self, s):
        z = self.argument(s)
        if self.family == "jacobi":
            a, b = self.params
            return special.jacobi_p(self.n, a, b, z)
        (a,) = self.params
        return special.laguerre_l(self.n, a, z)


def validate_problem(sigma: Poly2, sigma_tilde: Poly2, tau_tilde: Poly2) -> NUProblem:
    if sigma.degree() < 0:
        raise DegreeViolation("sigma is the zero polynomial")
    if sigma_tilde.degree() > 2:  # pragma: no cover - Poly2 caps at 2
        raise DegreeViolation("deg sigma_tilde > 2")
    if tau_tilde.degree() > 1:
        raise DegreeViolation(f"deg tau_tilde = {tau_tilde.degree()} > 1")
    return NUProblem(sigma, sigma_tilde, tau_tilde)


def _base_poly(problem: NUProblem) -> Poly2:
    """((sigma' - tau_tilde)/2)**2 - sigma_tilde, the k-independent part under the root."""
    half = (problem.sigma.deriv() - problem.tau_tilde) * 0.5
    return half * half - problem.sigma_tilde


def under_root(problem: NUProblem, k: complex) -> Poly2:
    return _base_poly(problem) + problem.sigma * k


def _discriminant(p: Poly2) -> complex:
    return p.c1 * p.c1 - 4 * p.c2 * p.c0


def k_candidates(problem: NUProblem) -> list[complex]:
    """Values of k that make the quadratic under the square root a perfect square."""
    p = _base_poly(problem)
    s = problem.sigma
    # disc(p + k*s) = A k^2 + B k + C
    A = s.c1 * s.c1 - 4 * s.c2 * s.c0
    B = 2 * p.c1 * s.c1 - 4 * p.c2 * s.c0 - 4 * p.c0 * s.c2
    C = p.c1 * p.c1 - 4 * p.c2 * p.c0
    scale = max(abs(A), abs(B), abs(C))
    if scale == 0.0:
        raise NoSolution("discriminant vanishes identically in k; every k works")
    if abs(A) <= ZERO_RTOL * scale:
        if abs(B) <= ZERO_RTOL * scale:
            raise NoSolution("discriminant equation in k is a nonzero constant")
        return [-C / B]
    disc = B * B - 4 * A * C
    # a double root is only resolved to ~sqrt(rounding); merge when disc is noise
    if abs(disc) <= K_MERGE_NOISE * (abs(B) ** 2 + 4 * abs(A * C)):
        return [-B / (2 * A)]
    root = cmath.sqrt(disc)
    # pick the sign that avoids cancellation, then use Vieta for the partner
    qq = -0.5 * (B + root) if abs(B + root) >= abs(B - root) else -0.5 * (B - root)
    if qq == 0:
        return [0j]
    return [qq / A, C / qq]


def linear_sqrt(p: Poly2) -> Poly2:
    """r(z) with r**2 == p, for a quadratic p of zero discriminant (principal root)."""
    scale = p.scale()
    if scale == 0.0:
        return Poly2()
    if abs(_discriminant(p)) > SQUARE_RTOL * scale * scale:
        raise NotPerfectSquare(f"discriminant {_discriminant(p)!r} is not zero")
    if abs(p.c2) > ZERO_RTOL * scale:
        r2 = cmath.sqrt(p.c2)
        return Poly2(p.c1 / (2 * r2), r2, 0)
    if abs(p.c1) > ZERO_RTOL * scale:  # pragma: no cover - caught by the discriminant test
        raise NotPerfectSquare("linear polynomial has no polynomial square root")
    return Poly2(cmath.sqrt(p.c0), 0, 0)


def pi_candidates(problem: NUProblem, k: complex) -> tuple[Poly2, Poly2]:
    """The two pi(z) = (sigma' - tau_tilde)/2 +/- r(z); '+' first."""
    r = linear_sqrt(under_root(problem, k))
    half = (problem.sigma.deriv() - problem.tau_tilde) * 0.5
    return half + r, half - r


def assemble_branch(problem: NUProblem, k: complex, pi: Poly2, sqrt_sign: int = 1) -> NUBranch:
    tau = problem.tau_tilde + pi * 2
    lam = k + pi.c1
    return NUBranch(k=complex(k), pi=pi, tau=tau, lam=lam, sqrt_sign=sqrt_sign,
                    admissible=tau.c1.real < 0, sigma_pp=2 * problem.sigma.c2)


def enumerate_branches(problem: NUProblem) -> list[NUBranch]:
    """All (k, +/-) combinations, at most four."""
    out = []
    for k in k_candidates(problem):
        plus, minus = pi_candidates(problem, k)
        out.append(assemble_branch(problem, k, plus, 1))
        out.append(assemble_branch(problem, k, minus, -1))
    return out


def select_branch(
    branches: Sequence[NUBranch],
    policy: Literal["default", "explicit_index"] = "default",
    index: int | None = None,
) -> NUBranch:
    """Pick a branch.

    ``default`` keeps the branches with Re(tau') < 0 and returns the one
    whose Re(tau') is most negative; zero admissible branches, or a tie for the
    most negative value, raise AmbiguousBranch.  ``explicit_index`` returns
    ``branches[index]`` whatever its admissibility.
    """
    if not branches:
        raise AmbiguousBranch("no branches given")
    if policy == "explicit_index":
        if index is None:
            raise ValueError("explicit_index policy needs an index")
        return branches[index]
    if policy != "default":
        raise ValueError(f"unknown policy {policy!r}")
    ok = sorted((b for b in branches if b.admissible), key=lambda b: b.tau_prime.real)
    if not ok:
        raise AmbiguousBranch("no branch has Re(tau') < 0")
    if len(ok) > 1:
        a, b = ok[0].tau_prime.real, ok[1].tau_prime.real
        if abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1.0):
            raise AmbiguousBranch(f"{len(ok)} admissible branches tie at Re(tau') = {a}")
    return ok[0]


def eigen_lambda(branch: NUBranch, n: int) -> complex:
    """lambda_n = -n tau' - n(n-1)/2 sigma''."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return -n * branch.tau_prime - 0.5 * n * (n - 1) * branch.sigma_pp


def _sigma_class(sigma: Poly2) -> tuple[str, complex, complex | None]:
    """Return (kind, c1, q) for sigma = c1*s*(1 - q*s) or sigma = c1*s."""
    scale = sigma.scale()
    if abs(sigma.c0) > ZERO_RTOL * scale or abs(sigma.c1) <= ZERO_RTOL * scale:
        raise UnsupportedSigmaClass(f"sigma {sigma} is not of the form c*s*(1 - q*s) or c*s")
    if abs(sigma.c2) <= ZERO_RTOL * scale:
        return "power_exp", sigma.c1, None
    return "power_power", sigma.c1, -sigma.c2 / sigma.c1


def _integrate_over_sigma(numer: Poly2, sigma: Poly2) -> WeightSpec:
    """Exponents of exp(int numer/sigma ds) for a numerator of degree <= 1."""
    kind, c1, q = _sigma_class(sigma)
    if numer.degree() > 1:
        raise UnsupportedSigmaClass("numerator must be at most linear")
    if kind == "power_exp":
        return WeightSpec("power_exp", numer.c0 / c1, numer.c1 / c1)
    return WeightSpec("power_power", numer.c0 / c1, -numer(1 / q) / c1, q)


def pearson_weight(branch: NUBranch, problem: NUProblem) -> WeightSpec:
    """rho with (sigma*rho)' = tau*rho, i.e. rho'/rho = (tau - sigma')/sigma."""
    return _integrate_over_sigma(branch.tau - problem.sigma.deriv(), problem.sigma)


def phi_factor(branch: NUBranch, problem: NUProblem) -> WeightSpec:
    """varphi with varphi'/varphi = pi/sigma."""
    return _integrate_over_sigma(branch.pi, problem.sigma)


def rodrigues_polynomial(branch: NUBranch, weight: WeightSpec, n: int) -> ClassicalPolyRef:
    """Identify rho**-1 d^n/ds^n (sigma**n rho) with a classical polynomial.

    power_power weights give Jacobi P_n^(A, B)(1 - 2 q s); power_exp weights
    give Laguerre L_n^(A)(-B s).  The Rodrigues constant is absorbed into the
    standard normalization of the family.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if weight.kind == "power_power":
        return ClassicalPolyRef("jacobi", n, (weight.A, weight.B), 1.0, -2 * weight.q_node)
    if weight.kind == "power_exp":
        return ClassicalPolyRef("laguerre", n, (weight.A,), 0.0, -weight.B)
    raise UnsupportedSigmaClass(f"unknown weight kind {weight.kind!r}")
