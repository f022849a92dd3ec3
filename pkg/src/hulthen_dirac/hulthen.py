"""Dirac equation with the generalized Hulthen potential family.

Units: hbar = c = 1, energies in units of the mass m.  The stored potential
parameters (V0, q, alpha) are always the real base values.  Each complexified
variant is obtained from the real one by a substitution that is applied inside
the operations:

    pt      alpha -> i alpha
    pseudo  V0 -> i V0, q -> i q, alpha -> i alpha
    exp     q = 0 (screened exponential well)

so the same formulas serve all variants.  Square roots and powers use the
principal branch throughout.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from . import nu_engine as nu
from . import special
from .errors import (
    AmbiguousBranch,
    DegenerateShape,
    EmptyWindow,
    NotApplicable,
    PoleAtS,
    PoleAtX,
)

POLE_TOL = 1e-12
QUANTIZATION_TOL = 1e-8
REALITY_TOL = 1e-10
BRANCH_RTOL = 1e-10


class Variant(str, Enum):
    REAL = "real"
    PT = "pt"
    PSEUDO = "pseudo"
    EXPONENTIAL = "exp"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        aliases = {
            "real": cls.REAL, "hermitian": cls.REAL,
            "pt": cls.PT, "pt-symmetric": cls.PT, "ptsymmetric": cls.PT,
            "pseudo": cls.PSEUDO, "pseudo-hermitian": cls.PSEUDO, "ph": cls.PSEUDO,
            "pseudohermitian": cls.PSEUDO,
            "exp": cls.EXPONENTIAL, "exponential": cls.EXPONENTIAL, "q0": cls.EXPONENTIAL,
        }
        try:
            return aliases[name.lower()]
        except KeyError:
            raise ValueError(f"unknown variant {name!r}") from None


@dataclass(frozen=True)
class PotentialSpec:
    V0: float
    q: float
    alpha: float
    m: float = 1.0
    variant: Variant = Variant.REAL

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        for name in ("V0", "q", "alpha", "m"):
            val = getattr(self, name)
            if isinstance(val, complex) or not math.isfinite(val):
                raise ValueError(f"{name} must be a finite real number, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.variant is Variant.EXPONENTIAL and self.q != 0:
            raise ValueError("the exponential variant requires q = 0")
        if self.variant is not Variant.EXPONENTIAL and self.q == 0:
            raise ValueError(f"variant {self.variant.value} requires q != 0")

    def effective(self) -> tuple[complex, complex, complex]:
        """(V0, q, alpha) after the variant's complexification."""
        V0, q, a = complex(self.V0), complex(self.q), complex(self.alpha)
        if self.variant is Variant.PT:
            return V0, q, 1j * a
        if self.variant is Variant.PSEUDO:
            return 1j * V0, 1j * q, 1j * a
        return V0, q, a

    def s_of_x(self, x):
        """s = exp(-alpha_eff x)."""
        alpha_e = self.effective()[2]
        return np.exp(-alpha_e * np.asarray(x, dtype=float))


# -- potential ---------------------------------------------------------------

def potential_value(spec: PotentialSpec, x):
    """V(x) in the variant's own closed form (cos/sin form for pt and pseudo)."""
    xx = np.asarray(x, dtype=float)
    V0, q, a = spec.V0, spec.q, spec.alpha
    if spec.variant in (Variant.REAL, Variant.EXPONENTIAL):
        e = np.exp(-a * xx)
        den = 1 - q * e
        num = -V0 * e
        scale = np.maximum(1.0, np.abs(q * e))
    elif spec.variant is Variant.PT:
        c, s = np.cos(a * xx), np.sin(a * xx)
        den = q * q - 2 * q * c + 1
        num = V0 * (q - c + 1j * s)
        scale = q * q + 1
    else:
        c, s = np.cos(a * xx), np.sin(a * xx)
        den = q * q - 2 * q * s + 1
        num = V0 * (q - s - 1j * c)
        scale = q * q + 1
    if np.any(np.abs(den) <= POLE_TOL * scale):
        raise PoleAtX("potential denominator vanishes on the requested x")
    out = (num / den).astype(complex)
    return complex(out) if np.ndim(x) == 0 else out


def potential_value_substituted(spec: PotentialSpec, x):
    """V(x) = -V0 e^{-alpha x}/(1 - q e^{-alpha x}) with the complexified parameters."""
    V0, q, _ = spec.effective()
    s = spec.s_of_x(x)
    den = 1 - q * s
    if np.any(np.abs(den) <= POLE_TOL * np.maximum(1.0, np.abs(q * s))):
        raise PoleAtX("potential denominator vanishes on the requested x")
    out = -V0 * s / den
    return complex(out) if np.ndim(x) == 0 else out


def potential_linear_approx(spec: PotentialSpec) -> tuple[float, float]:
    """(shift, slope) of V near x = 0 for small alpha*x."""
    if spec.q == 1:
        raise DegenerateShape("q = 1: the potential has a pole at x = 0")
    shift = spec.V0 / (spec.q - 1)
    slope = spec.V0 * spec.alpha / (spec.q - 1) ** 2
    return shift, slope


# -- NU mapping --------------------------------------------------------------

@dataclass(frozen=True)
class HypergeometricParams:
    E: complex
    V0_eff: complex
    q_eff: complex
    alpha_eff: complex
    gamma_q: complex
    beta: complex
    eps2: complex
    eps: complex
    v: complex
    a_param: float
    delta: complex
    E_tilde: complex
    V1: complex
    V2: complex

    def kappa(self, n: int) -> complex:
        """kappa_n = q alpha (n + 1) - i V0 with the effective parameters."""
        return self.q_eff * self.alpha_eff * (n + 1) - 1j * self.V0_eff


def hypergeometric_params(spec: PotentialSpec, E: complex) -> HypergeometricParams:
    V0, q, a = spec.effective()
    E = complex(E)
    m = spec.m
    eps2 = -(E * E - m * m) / (a * a)
    gamma_q = 1j * q * V0 / a + V0 * V0 / (a * a)
    return HypergeometricParams(
        E=E,
        V0_eff=V0,
        q_eff=q,
        alpha_eff=a,
        gamma_q=gamma_q,
        beta=1j * V0 / a + 2 * V0 * E / (a * a),
        eps2=eps2,
        eps=cmath.sqrt(eps2),
        v=q - 2j * V0 / a,
        a_param=spec.q - 2 * spec.V0 / spec.alpha,
        delta=V0 / a,
        E_tilde=E * E - m * m,
        V1=V0 * V0 + 1j * q * a * V0,
        V2=1j * a * V0 + 2 * E * V0,
    )


def map_to_nu(spec: PotentialSpec, E: complex) -> tuple[nu.NUProblem, HypergeometricParams]:
    """The s = exp(-alpha x) form of the upper-component equation as an NU problem."""
    p = hypergeometric_params(spec, E)
    q = p.q_eff
    if spec.variant is Variant.EXPONENTIAL:
        problem = nu.validate_problem(
            nu.Poly2(0, 1, 0),
            nu.Poly2(-p.eps2, p.beta, p.delta * p.delta),
            nu.Poly2(1, 0, 0),
        )
    else:
        problem = nu.validate_problem(
            nu.Poly2(0, 1, -q),
            nu.Poly2(-p.eps2, p.beta + 2 * q * p.eps2, p.gamma_q - q * p.beta - q * q * p.eps2),
            nu.Poly2(1, -q, 0),
        )
    return problem, p


def bound_state_target(spec: PotentialSpec, p: HypergeometricParams, eps: complex) -> tuple[complex, nu.Poly2]:
    """(k, pi) of the branch used for the bound states, for a chosen root eps of eps2."""
    if spec.variant is Variant.EXPONENTIAL:
        return p.beta - 2j * p.delta * eps, nu.Poly2(eps, -1j * p.delta, 0)
    q = p.q_eff
    return p.beta - p.v * eps, nu.Poly2(eps, -0.5 * (q + p.v + 2 * q * eps), 0)


def bound_state_branch(problem: nu.NUProblem, spec: PotentialSpec, p: HypergeometricParams,
                       eps: complex | None = None) -> nu.NUBranch:
    """The bound-state branch, built from its (k, pi) and checked against the NU conditions.

    The branch is assembled directly from k = beta - v eps rather than picked
    from re-solved roots of the discriminant: those roots are only resolved to
    ~sqrt(rounding) wherever the two k values nearly coincide (v eps -> 0).
    The check is that (pi - (sigma' - tau~)/2)^2 equals the under-root
    quadratic at that k.
    """
    eps = p.eps if eps is None else complex(eps)
    k_t, pi_t = bound_state_target(spec, p, eps)
    u = nu.under_root(problem, k_t)
    half = (problem.sigma.deriv() - problem.tau_tilde) * 0.5
    r = pi_t - half
    mismatch = (r * r - u).scale()
    scale = max(1.0, u.scale(), (r * r).scale())
    if mismatch > BRANCH_RTOL * scale:
        raise AmbiguousBranch(f"k = {k_t}, pi = {pi_t} does not satisfy the NU conditions "
                              f"(mismatch {mismatch:.3e})")
    lead_r, lead_u = (r.c1, u.c2) if abs(u.c2) >= abs(u.c0) else (r.c0, u.c0)
    sqrt_sign = 1 if abs(lead_r - cmath.sqrt(lead_u)) <= abs(lead_r + cmath.sqrt(lead_u)) else -1
    return nu.assemble_branch(problem, k_t, pi_t, sqrt_sign)


def quantization_mismatch(spec: PotentialSpec, E: complex, n: int, eps: complex | None = None) -> complex:
    """lambda(E) - lambda_n(E) on the bound-state branch; eps defaults to the principal root."""
    problem, p = map_to_nu(spec, E)
    branch = bound_state_branch(problem, spec, p, eps)
    return branch.lam - nu.eigen_lambda(branch, n)


# -- spectra -----------------------------------------------------------------

@dataclass(frozen=True)
class BoundState:
    """A closed-form level.

    branch_sign is +1/-1 for the upper/lower sign of the +/- (or -/+)
    in the variant's energy formula.  eps_sign records which root of eps**2
    satisfies the quantization condition at this energy: +1 for the principal
    root, -1 for its negative.  ``discrepant`` is set only when neither root
    satisfies it.
    """

    spec: PotentialSpec
    n: int
    energy: complex
    branch_sign: int
    is_real_spectrum: bool
    params_at_E: HypergeometricParams
    eps_sign: int = 1
    discrepant: bool = False
    residual: complex = 0j
    note: str = ""

    @property
    def eps(self) -> complex:
        return self.eps_sign * self.params_at_E.eps

    @property
    def branch(self) -> str:
        return "plus" if self.branch_sign > 0 else "minus"

    def with_energy(self, E: complex) -> "BoundState":
        """Same labels at a different energy (used to probe residual sensitivity)."""
        return replace(self, energy=complex(E), params_at_E=hypergeometric_params(self.spec, E))


def _sign(branch_sign) -> int:
    if branch_sign in (1, "+", "plus", "upper"):
        return 1
    if branch_sign in (-1, "-", "minus", "lower"):
        return -1
    raise ValueError(f"branch_sign must be plus or minus, got {branch_sign!r}")


def reality_condition(spec: PotentialSpec, n: int) -> bool:
    """4 q^2 m^2 <= V0^2 - (q alpha (n+1) - V0)^2, boundary included."""
    q, m, V0 = spec.q, spec.m, spec.V0
    kt = q * spec.alpha * (n + 1) - V0
    lhs = 4 * q * q * m * m
    rhs = V0 * V0 - kt * kt
    return lhs <= rhs + 1e-12 * max(lhs, V0 * V0, 1.0)


def _variant_energy(spec: PotentialSpec, n: int, sg: int) -> complex:
    q, m, V0, a = spec.q, spec.m, spec.V0, spec.alpha
    if spec.variant is Variant.REAL:
        kappa = q * a * (n + 1) - 1j * V0
        den = V0 * V0 + kappa * kappa
        if den == 0:
            raise DegenerateShape("V0^2 + kappa_n^2 = 0")
        return V0 / (2 * q) + sg * 1j * kappa * cmath.sqrt(1 / (4 * q * q) - m * m / den)
    if spec.variant is Variant.PT:
        lead = q * a * (n + 1) - V0
    else:
        lead = V0 - q * a * (n + 1)
    den = V0 * V0 - lead * lead
    if den == 0:
        raise DegenerateShape("V0^2 = (q alpha (n+1) - V0)^2: energy formula is singular")
    return V0 / (2 * q) - sg * lead * cmath.sqrt(1 / (4 * q * q) - m * m / den)


def energy_substituted(spec: PotentialSpec, n: int, branch_sign) -> complex:
    """The real-potential formula with the variant's complexified parameters inserted."""
    sg = _sign(branch_sign)
    V0, q, a = spec.effective()
    kappa = q * a * (n + 1) - 1j * V0
    return V0 / (2 * q) + sg * 1j * kappa * cmath.sqrt(1 / (4 * q * q) - spec.m ** 2 / (V0 * V0 + kappa * kappa))


def energy_closed_form(spec: PotentialSpec, n: int, branch_sign) -> BoundState:
    """Closed-form level n, certified against the quantization condition."""
    if spec.variant is Variant.EXPONENTIAL:
        raise NotApplicable("no closed-form spectrum for q = 0; use the numerical route")
    if n < 0:
        raise ValueError("n must be nonnegative")
    sg = _sign(branch_sign)
    E = _variant_energy(spec, n, sg)
    params = hypergeometric_params(spec, E)
    if spec.variant is Variant.REAL:
        is_real = abs(E.imag) <= REALITY_TOL * max(spec.m, 1e-300)
    else:
        is_real = reality_condition(spec, n)
    res_plus = quantization_mismatch(spec, E, n, params.eps)
    if abs(res_plus) < QUANTIZATION_TOL:
        return BoundState(spec, n, E, sg, is_real, params, 1, False, res_plus)
    res_minus = quantization_mismatch(spec, E, n, -params.eps)
    if abs(res_minus) < QUANTIZATION_TOL:
        note = ("satisfies the quantization condition with -eps (the partner root "
                "introduced when the condition is squared)")
        if spec.variant is Variant.REAL and (-params.eps).real < 0:
            note += "; Re(eps) < 0 so the upper component grows as x -> +inf"
        return BoundState(spec, n, E, sg, is_real, params, -1, False, res_minus, note)
    return BoundState(spec, n, E, sg, is_real, params, 1, True, res_plus,
                      f"quantization residual {abs(res_plus):.3e} / {abs(res_minus):.3e} for +eps / -eps")


def spectrum(spec: PotentialSpec, levels) -> list[BoundState]:
    return [energy_closed_form(spec, n, sg) for n in levels for sg in (1, -1)]


def _require_window_variant(spec: PotentialSpec) -> None:
    if spec.variant not in (Variant.PT, Variant.PSEUDO):
        raise NotApplicable("bound-state windows exist for the pt and pseudo variants only")


def _window_halfwidth(spec: PotentialSpec) -> float:
    disc = spec.V0 ** 2 - 4 * spec.q ** 2 * spec.m ** 2
    if disc < 0:
        raise EmptyWindow(f"V0^2 = {spec.V0**2} < 4 q^2 m^2 = {4 * spec.q**2 * spec.m**2}")
    return math.sqrt(disc)


def bound_window(spec: PotentialSpec) -> range:
    """Levels n with real energies: V0 - S <= q alpha (n+1) <= V0 + S, S = sqrt(V0^2 - 4q^2m^2)."""
    _require_window_variant(spec)
    S = _window_halfwidth(spec)
    qa = spec.q * spec.alpha
    lo, hi = sorted(((spec.V0 - S) / qa - 1, (spec.V0 + S) / qa - 1))
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    n_min = max(0, math.ceil(lo - slack))
    n_max = math.floor(hi + slack)
    return range(n_min, max(n_min, n_max + 1))


def alpha_window(spec: PotentialSpec, n: int) -> tuple[float, float]:
    """Range of alpha for which level n has a real energy."""
    _require_window_variant(spec)
    S = _window_halfwidth(spec)
    qn = spec.q * (n + 1)
    lo, hi = sorted(((spec.V0 - S) / qn, (spec.V0 + S) / qn))
    if hi <= 0:
        raise EmptyWindow(f"no positive alpha gives a real level n = {n}")
    return max(lo, 0.0), hi


def critical_coupling(spec: PotentialSpec, n: int) -> float:
    """Smallest V0 giving a real level n at fixed (q, alpha, m)."""
    _require_window_variant(spec)
    qa = spec.q * spec.alpha * (n + 1)
    return qa / 2 + 2 * spec.q * spec.m ** 2 / (spec.alpha * (n + 1))


# -- eigenfunctions ----------------------------------------------------------

Jet = tuple  # (f, df/ds, d2f/ds2) as arrays


def _jmul(f: Jet, g: Jet) -> Jet:
    return (f[0] * g[0], f[1] * g[0] + f[0] * g[1], f[2] * g[0] + 2 * f[1] * g[1] + f[0] * g[2])


def _jadd(*fs: Jet) -> Jet:
    return tuple(sum(parts) for parts in zip(*fs))


def _jscale(c, f: Jet) -> Jet:
    return tuple(c * part for part in f)


def _jpow_s(s, e) -> Jet:
    v = s**e
    return (v, e * v / s, e * (e - 1) * v / (s * s))


def _jpow_lin(s, Q, g) -> Jet:
    w = 1 - Q * s
    v = w**g
    return (v, -Q * g * v / w, Q * Q * g * (g - 1) * v / (w * w))


def _jexp(s, c) -> Jet:
    v = np.exp(c * s)
    return (v, c * v, c * c * v)


def _jjacobi(n, a, b, s, Q) -> Jet:
    z = 1 - 2 * Q * s
    return (special.jacobi_p(n, a, b, z),
            -2 * Q * special.jacobi_p_deriv(n, a, b, z, 1),
            4 * Q * Q * special.jacobi_p_deriv(n, a, b, z, 2))


def _jhyp(a, b, c, s) -> Jet:
    z = c * s
    return (special.hyp1f1(a, b, z),
            c * special.hyp1f1_deriv(a, b, z, 1),
            c * c * special.hyp1f1_deriv(a, b, z, 2))


@dataclass(frozen=True)
class SpinorEval:
    s: np.ndarray
    x: np.ndarray | None
    upper: np.ndarray
    lower: np.ndarray  # m * theta


@dataclass(frozen=True)
class SpinorState:
    """Upper component phi and the product m*theta as functions of s (or x).

    Global constant fixed to 1.  ``upper_jet``/``lower_jet`` return the value
    with its first and second s-derivatives.
    """

    spec: PotentialSpec
    E: complex
    n: int
    eps: complex
    upper_jet: Callable = field(repr=False)
    lower_jet: Callable = field(repr=False)

    boundary_g: complex | None = None

    def __call__(self, x=None, *, s=None) -> SpinorEval:
        """Values at x or s.

        At s = 1/Q both components vanish when Re g > 1 (the lower one
        carries an extra 1/(1 - Q s)); otherwise PoleAtS is raised.
        """
        if (x is None) == (s is None):
            raise ValueError("give exactly one of x or s")
        xs = None
        if x is not None:
            xs = np.asarray(x, dtype=float)
            s = self.spec.s_of_x(xs)
        s = np.asarray(s, dtype=complex)
        if self.boundary_g is None:
            with np.errstate(divide="ignore", invalid="ignore"):
                return SpinorEval(s, xs, self.upper_jet(s)[0], self.lower_jet(s)[0])
        Q = self.spec.effective()[1]
        at_pole = np.abs(1 - Q * s) <= POLE_TOL * np.maximum(1.0, np.abs(Q * s))
        if not np.any(at_pole):
            return SpinorEval(s, xs, self.upper_jet(s)[0], self.lower_jet(s)[0])
        if self.boundary_g.real <= 1:
            raise PoleAtS("1 - Q s vanishes and Re g <= 1: lower component is singular "
                          "(upper_values gives the upper component alone)")
        upper = np.zeros(s.shape, dtype=complex)
        lower = np.zeros(s.shape, dtype=complex)
        rest = s[~at_pole]
        if rest.size:
            upper[~at_pole] = self.upper_jet(rest)[0]
            lower[~at_pole] = self.lower_jet(rest)[0]
        return SpinorEval(s, xs, upper, lower)

    def upper_values(self, s):
        """Upper component alone, with the boundary zero at s = 1/Q when Re g > 0."""
        s = np.asarray(s, dtype=complex)
        if self.boundary_g is None:
            return self.upper_jet(s)[0]
        Q = self.spec.effective()[1]
        at_pole = np.abs(1 - Q * s) <= POLE_TOL * np.maximum(1.0, np.abs(Q * s))
        if np.any(at_pole) and self.boundary_g.real <= 0:
            raise PoleAtS("1 - Q s vanishes and Re g <= 0: upper component is singular")
        out = np.zeros(s.shape, dtype=complex)
        if np.any(~at_pole):
            out[~at_pole] = self.upper_jet(s[~at_pole])[0]
        return out

    def x_derivatives(self, x):
        """phi, phi_x, phi_xx, m*theta, (m*theta)_x at real positions x."""
        a = self.spec.effective()[2]
        s = self.spec.s_of_x(x)
        u, us, uss = self.upper_jet(s)
        t, ts, _ = self.lower_jet(s)
        return u, -a * s * us, a * a * (s * s * uss + s * us), t, -a * s * ts


def spinor_exponents(spec: PotentialSpec, state: BoundState) -> dict:
    """(e, g, A, B, Q) of phi = s^e (1 - Q s)^g P_n^(A,B)(1 - 2 Q s)."""
    p = state.params_at_E
    q, v = p.q_eff, p.v
    eps = state.eps
    return {"e": eps, "g": (v + q) / (2 * q), "A": 2 * eps, "B": v / q, "Q": q}


def _check_pole(s, Q):
    if np.any(np.abs(1 - Q * s) <= POLE_TOL * np.maximum(1.0, np.abs(Q * s))):
        raise PoleAtS("1 - Q s vanishes on the requested points")


def spinor_state(spec: PotentialSpec, state: BoundState) -> SpinorState:
    """Closed-form spinor for a level from energy_closed_form."""
    if spec.variant is Variant.EXPONENTIAL:
        raise NotApplicable("use q0_state for the exponential variant")
    if state.spec != spec:
        raise ValueError("state belongs to a different potential")
    p = state.params_at_E
    V0, q, a = p.V0_eff, p.q_eff, p.alpha_eff
    E, n = state.energy, state.n
    ex = spinor_exponents(spec, state)
    e, g, A, B, Q = ex["e"], ex["g"], ex["A"], ex["B"], ex["Q"]
    v = p.v

    def upper_jet(s):
        s = np.asarray(s, dtype=complex)
        _check_pole(s, Q)
        return _jmul(_jmul(_jpow_s(s, e), _jpow_lin(s, Q, g)), _jjacobi(n, A, B, s, Q))

    c_p = E + 1j * a * (n + e + v / q + 1)
    c_r = V0 + 1j * a * (v + q) / 2
    c_h = -1j * a * (n + 2 * e + v / q + 1)

    def lower_jet(s):
        s = np.asarray(s, dtype=complex)
        _check_pole(s, Q)
        w = 1 - Q * s
        ratio = (s / w, 1 / (w * w), 2 * Q / (w * w * w))
        P = _jjacobi(n, A, B, s, Q)
        P_shift = _jjacobi(n, A, B + 1, s, Q)
        one = (np.ones_like(s), np.zeros_like(s), np.zeros_like(s))
        bracket = _jadd(_jmul(_jadd(_jscale(c_p, one), _jscale(c_r, ratio)), P), _jscale(c_h, P_shift))
        return _jmul(_jmul(_jpow_s(s, e), _jpow_lin(s, Q, g)), bracket)

    return SpinorState(spec, E, n, e, upper_jet, lower_jet, g)


def q0_kummer_parameters(spec: PotentialSpec, E: complex, eps: complex) -> tuple[complex, complex]:
    """(a, b) of the 1F1 in the q = 0 upper component."""
    p = hypergeometric_params(spec, E)
    return 0.5 + eps + 1j * p.beta / (2 * p.delta), 1 + 2 * eps


def q0_state(spec: PotentialSpec, E: complex, eps_sign: int = 1) -> SpinorState:
    """Upper and lower components of the q = 0 problem at energy E (not quantized)."""
    if spec.variant is not Variant.EXPONENTIAL:
        raise NotApplicable("q0_state needs the exponential variant")
    E = complex(E)
    p = hypergeometric_params(spec, E)
    eps = eps_sign * p.eps
    delta, alpha, V0 = p.delta, p.alpha_eff, p.V0_eff
    ka, kb = q0_kummer_parameters(spec, E, eps)
    c = 2j * delta
    # lower component written with a' = eps + iE/alpha, equal to ka
    a2 = eps + 1j * E / alpha

    def upper_jet(s):
        s = np.asarray(s, dtype=complex)
        return _jmul(_jmul(_jpow_s(s, eps), _jexp(s, -1j * delta)), _jhyp(ka, kb, c, s))

    def lower_jet(s):
        s = np.asarray(s, dtype=complex)
        lead = _jmul(_jpow_s(s, eps), _jexp(s, -1j * delta))
        s_j = (s, np.ones_like(s), np.zeros_like(s))
        first = _jscale(E - 1j * alpha * eps, _jhyp(a2, 2 * eps + 1, c, s))
        second = _jscale(2 * V0 / (2 * eps + 1) * a2, _jmul(s_j, _jhyp(a2 + 1, 2 * eps + 2, c, s)))
        return _jmul(lead, _jadd(first, second))

    return SpinorState(spec, E, -1, eps, upper_jet, lower_jet)


def l2_norm(state: SpinorState, x_min: float, x_max: float, n_points: int = 2001) -> float:
    """sqrt(int |phi|^2 + |theta|^2 dx) over [x_min, x_max] by the trapezoid rule (plotting aid)."""
    x = np.linspace(x_min, x_max, n_points)
    ev = state(x)
    m = state.spec.m
    dens = np.abs(ev.upper) ** 2 + (np.abs(ev.lower / m) ** 2 if m else 0.0)
    return float(np.sqrt(trapezoid(dens, x)))
