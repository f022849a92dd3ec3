"""Independent checks of closed-form spectra and spinors.

The quantization condition lambda(E) = lambda_n(E) is treated as ground truth:
closed-form energy formulas are validated against it, and the closed-form
spinors are checked against both the second-order equation for the upper
component and the first-order Dirac system itself.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .errors import EigensolverFailure, NoConvergence, PoleAtS
from .hulthen import (
    POLE_TOL,
    PotentialSpec,
    SpinorState,
    Variant,
    hypergeometric_params,
    map_to_nu,
    potential_value,
    q0_state,
    quantization_mismatch,
)

MAX_SECANT_ITER = 200
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    max_rel: float
    worst_point: complex
    n_points: int


def _report(residual, terms, points) -> ResidualReport:
    residual = np.abs(np.asarray(residual))
    scale = max(float(np.max(np.abs(t))) for t in terms)
    i = int(np.argmax(residual))
    max_abs = float(residual[i])
    return ResidualReport(max_abs, max_abs / scale if scale > 0 else 0.0,
                          complex(np.asarray(points).ravel()[i]), int(residual.size))


def quantization_residual(spec: PotentialSpec, E: complex, n: int, eps_sign: int = 1) -> complex:
    """lambda(E) - lambda_n(E); zero certifies E as level n for that root of eps^2."""
    p = hypergeometric_params(spec, E)
    return quantization_mismatch(spec, E, n, eps_sign * p.eps)


@dataclass(frozen=True)
class RootResult:
    E: complex
    eps: complex
    eps_sign: int
    residual: complex
    iterations: int


def _energy_from_eps(spec: PotentialSpec, eps: complex, near: complex) -> complex:
    alpha = spec.effective()[2]
    r = cmath.sqrt(spec.m ** 2 - alpha * alpha * eps * eps)
    return r if abs(r - near) <= abs(-r - near) else -r


def _contour_derivatives(f, z0: complex, radius: float, n_nodes: int = 16) -> tuple[complex, complex]:
    """First and second derivatives of an analytic f at z0 from samples on a circle."""
    w = np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes)
    vals = np.array([f(z0 + radius * wk) for wk in w])
    c1 = np.mean(vals * w**-1) / radius
    c2 = np.mean(vals * w**-2) / radius**2
    return complex(c1), complex(2 * c2)


def quantization_root(spec: PotentialSpec, n: int, seed: complex, eps_sign: int = 1,
                      max_iter: int = MAX_SECANT_ITER) -> RootResult:
    """Solve the quantization condition for level n by a complex secant iteration.

    The unknown is eps rather than E: E(eps) = +/- sqrt(m^2 - alpha^2 eps^2) is
    smooth through the threshold E = m, where the residual as a function of E
    has a square-root branch point.  The sign of E follows the seed.  The
    first step is offset into the complex plane so that a real seed can reach
    a complex root.

    At the edge of a bound-state window the two levels merge into a double
    root, where rounding limits the secant to about sqrt(machine eps).  The
    converged point is then polished by Newton steps on the derivative of the
    residual (a simple root there), with derivatives from a Cauchy contour.
    """
    seed = complex(seed)
    p = hypergeometric_params(spec, seed)
    scale = 1.0 + abs(p.beta)
    tol = 1e-14 * scale

    def energy(eps, near):
        return _energy_from_eps(spec, eps, near)

    def resid(eps, near):
        E = energy(eps, near)
        return quantization_mismatch(spec, E, n, eps), E

    e0 = eps_sign * p.eps
    r0, E0 = resid(e0, seed)
    if abs(r0) <= tol:
        return RootResult(E0, e0, eps_sign, r0, 1)
    e1 = e0 + 1e-4 * (1 + 1j) * max(1.0, abs(e0))
    r1, E1 = resid(e1, E0)
    trail = [(E0, r0), (E1, r1)]
    it = 2
    converged = False
    while it <= max_iter:
        if r1 == r0:
            converged = abs(r1) <= 1e-6 * scale
            break
        e0, r0, (e1) = e1, r1, e1 - r1 * (e1 - e0) / (r1 - r0)
        r1, E1 = resid(e1, E1)
        trail.append((E1, r1))
        it += 1
        if not abs(E1) <= DIVERGENCE_FACTOR * (1.0 + abs(seed) + spec.m):
            raise NoConvergence(f"secant iteration for level {n} diverged", trail[-5:])
        if abs(r1) <= tol or abs(e1 - e0) <= 4e-16 * max(1.0, abs(e1)):
            converged = True
            break
    if not converged:
        raise NoConvergence(f"secant iteration for level {n} did not converge", trail[-5:])

    e1, r1, E1 = _polish_double_root(lambda z: resid(z, E1), e1, r1, E1, tol)

    p1 = hypergeometric_params(spec, E1)
    sign = 1 if abs(e1 - p1.eps) <= abs(e1 + p1.eps) else -1
    return RootResult(E1, e1, sign, r1, it)


def _polish_double_root(fun, e, r, E, tol):
    """Newton on R' when R' nearly vanishes at the secant result (a merged pair of roots)."""
    radius = 1e-3 * max(1.0, abs(e))
    d1, d2 = _contour_derivatives(lambda t: fun(t)[0], e, radius)
    if d2 == 0 or abs(d1 / d2) > radius:
        return e, r, E  # simple root: the secant result stands
    z = e
    for _ in range(8):
        step = d1 / d2
        z -= step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
        d1, d2 = _contour_derivatives(lambda t: fun(t)[0], z, radius)
    rz, Ez = fun(z)
    if abs(rz) <= max(10 * abs(r), tol):
        return z, rz, Ez
    return e, r, E


def _check_s_grid(s, Q):
    if np.any(np.abs(s) == 0):
        raise PoleAtS("s = 0 is a singular point")
    if Q is not None and np.any(np.abs(1 - Q * s) <= POLE_TOL * np.maximum(1.0, np.abs(Q * s))):
        raise PoleAtS("1 - Q s vanishes on the grid")


def ode_residual(spec: PotentialSpec, state: SpinorState, s_points,
                 form: Literal["s", "x"] = "s", E: complex | None = None) -> ResidualReport:
    """Residual of the second-order equation for the upper component.

    form "s": sigma^2 phi'' + sigma tau_tilde phi' + sigma_tilde phi on the
    hypergeometric-type form.  form "x": phi_xx + [E~ + V1 f^2 + V2 f] phi
    with f = s/(1 - q s) and x-derivatives from the chain rule.
    E overrides the energy in the equation while the function stays fixed,
    which is how the sensitivity of the check to a wrong eigenvalue is probed.
    """
    s = np.asarray(s_points, dtype=complex)
    problem, p = map_to_nu(spec, state.E if E is None else E)
    Q = None if spec.variant is Variant.EXPONENTIAL else p.q_eff
    _check_s_grid(s, Q)
    u, us, uss = state.upper_jet(s)
    if form == "s":
        sig = problem.sigma(s)
        terms = (sig * sig * uss, sig * problem.tau_tilde(s) * us, problem.sigma_tilde(s) * u)
    elif form == "x":
        a = p.alpha_eff
        fx = s if Q is None else s / (1 - Q * s)
        terms = (a * a * (s * s * uss + s * us), p.E_tilde * u, p.V1 * fx * fx * u, p.V2 * fx * u)
        if Q is None:  # q = 0: V1 = V0^2 exactly
            terms = terms[:2] + (p.V0_eff ** 2 * fx * fx * u,) + terms[3:]
    else:
        raise ValueError(f"unknown form {form!r}")
    return _report(sum(terms), terms, s)


def coupled_residual(spec: PotentialSpec, state: SpinorState, x_points,
                     E: complex | None = None) -> tuple[ResidualReport, ResidualReport]:
    """Residuals of the two first-order equations at real positions x.

    r1 = i phi' + (E - V) phi - m theta
    r2 = m * [-i theta' + (E - V) theta - m phi]   (multiplied by m to allow m = 0)
    V is the variant's closed-form potential; E overrides the energy as in ode_residual.
    """
    x = np.asarray(x_points, dtype=float)
    V = potential_value(spec, x)
    u, ux, _, t, tx = state.x_derivatives(x)
    E, m = (state.E if E is None else complex(E)), spec.m
    terms1 = (1j * ux, (E - V) * u, -t)
    terms2 = (-1j * tx, (E - V) * t, -m * m * u)
    return _report(sum(terms1), terms1, x), _report(sum(terms2), terms2, x)


SymmetryKind = Literal["pt", "pseudo_p", "pt_shifted"]


def reflect(spec: PotentialSpec, kind: SymmetryKind, x):
    """Image of x under the reflection of the requested symmetry.

    pt:         x -> -x
    pseudo_p:   x -> pi/(2 alpha) - x
    pt_shifted: x -> pi/alpha - x   (reflection about x = pi/(2 alpha))
    """
    x = np.asarray(x, dtype=float)
    if kind == "pt":
        return -x
    if kind == "pseudo_p":
        return math.pi / (2 * spec.alpha) - x
    if kind == "pt_shifted":
        return math.pi / spec.alpha - x
    raise ValueError(f"unknown symmetry kind {kind!r}")


def symmetry_check(spec: PotentialSpec, kind: SymmetryKind, x_points) -> ResidualReport:
    """max |conj(V(reflected x)) - V(x)| over the grid."""
    x = np.asarray(x_points, dtype=float)
    V = potential_value(spec, x)
    Vr = np.conj(potential_value(spec, reflect(spec, kind, x)))
    return _report(Vr - V, (V, Vr), x)


# -- finite-difference Dirac eigensolver -------------------------------------
#
# The first-order system  E phi = -i phi' + V phi + m theta,
#                         E theta = i theta' + V theta + m phi
# is rotated to u = (phi + theta)/sqrt2, w = (phi - theta)/sqrt2:
#
#     E u = (V + m) u - i w'
#     E w = (V - m) w - i u'
#
# so the derivative couples u and w only.  u lives on the integer nodes with
# u = 0 at both ends, w on the half nodes.  Every difference is then centred
# over one cell (second order) and no null mode of the difference operator
# survives, which removes the doublers of the collocated scheme.  Staggering
# was chosen over a Wilson term because it adds no mass-like parameter.
# Interleaving w_{1/2}, u_1, w_{3/2}, ..., u_{N-1}, w_{N-1/2} makes the matrix
# tridiagonal with size 2N - 1.


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int
    staggered: bool = True

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be smaller than x_max")
        if int(self.n_points) != self.n_points or self.n_points < 8:
            raise ValueError("n_points must be an integer >= 8")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_points


@dataclass(frozen=True)
class NumericSpectrum:
    eigenvalues: np.ndarray  # sorted by real part, then imaginary part
    h: float
    boundary: str = "dirichlet_upper"
    doubling_filtered: bool = True

    def bound_states(self, m: float, tol: float = 1e-9) -> np.ndarray:
        """Real eigenvalues strictly inside the gap (-m, m)."""
        ev = self.eigenvalues
        keep = (np.abs(ev.imag) <= tol * max(m, 1.0)) & (np.abs(ev.real) < m * (1 - tol))
        return ev[keep].real

    def positive(self, tol: float = 1e-9) -> np.ndarray:
        ev = self.eigenvalues
        return ev[(ev.real > tol) & (np.abs(ev.imag) <= tol)].real


def _potential_on(spec: PotentialSpec, x, free: bool) -> np.ndarray:
    if free:
        return np.zeros(np.shape(x), dtype=complex)
    return np.asarray(potential_value(spec, x), dtype=complex)


def dirac_matrix(spec: PotentialSpec, grid: GridSpec, free: bool = False):
    """(diagonal, superdiagonal, subdiagonal) of the discretized Hamiltonian.

    Staggered: interleaved (w, u) unknowns as described above.  Collocated
    (grid.staggered False): u and w share the interior nodes and the derivative
    is the two-cell central difference, which leaves a spurious doubler branch.
    """
    N, h, m = grid.n_points, grid.h, spec.m
    if grid.staggered:
        x_int = grid.x_min + h * np.arange(1, N)
        x_half = grid.x_min + h * (np.arange(N) + 0.5)
        diag = np.empty(2 * N - 1, dtype=complex)
        diag[0::2] = _potential_on(spec, x_half, free) - m
        diag[1::2] = _potential_on(spec, x_int, free) + m
        upper = np.full(2 * N - 2, -1j / h)
        return diag, upper, np.conj(upper)
    # collocated: unknowns (u_j, w_j) at interior nodes j = 1..N-1, zero outside
    x_int = grid.x_min + h * np.arange(1, N)
    V = _potential_on(spec, x_int, free)
    n = N - 1
    H = np.zeros((2 * n, 2 * n), dtype=complex)
    idx = np.arange(n)
    H[idx, idx] = V + m
    H[n + idx, n + idx] = V - m
    k = np.arange(n - 1)
    for off in (0, n):  # -i D acting from the partner component
        src = n - off
        H[off + k, src + k + 1] = -1j / (2 * h)
        H[off + k + 1, src + k] = 1j / (2 * h)
    return H


def fd_dirac_spectrum(spec: PotentialSpec, grid: GridSpec, method: Literal["auto", "dense"] = "auto",
                      free: bool = False) -> NumericSpectrum:
    """All eigenvalues of the discretized Dirac operator on [x_min, x_max].

    For a real potential the staggered matrix is Hermitian tridiagonal; a
    diagonal unitary similarity makes it real symmetric with off-diagonals 1/h
    and the LAPACK tridiagonal solver is used.  Complex potentials, the
    collocated control, and method="dense" use the dense general eigensolver
    (Hessenberg reduction and shifted QR).  ``free`` drops the potential.
    """
    try:
        if grid.staggered:
            diag, upper, lower = dirac_matrix(spec, grid, free)
            if method == "auto" and np.all(diag.imag == 0):
                ev = sla.eigvalsh_tridiagonal(diag.real, np.abs(upper)).astype(complex)
            else:
                H = np.diag(diag) + np.diag(upper, 1) + np.diag(lower, -1)
                ev = sla.eigvals(H, overwrite_a=True, check_finite=False)
        else:
            H = dirac_matrix(spec, grid, free)
            if method == "auto" and np.allclose(H, H.conj().T, rtol=0, atol=0):
                ev = sla.eigvalsh(H).astype(complex)
            else:
                ev = sla.eigvals(H, overwrite_a=True, check_finite=False)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise EigensolverFailure(f"eigenvalue iteration failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise EigensolverFailure("eigensolver returned non-finite values")
    ev = ev[np.lexsort((ev.imag, ev.real))]
    return NumericSpectrum(ev, grid.h, "dirichlet_upper", grid.staggered)


# -- q = 0 half-line oracle --------------------------------------------------

def q0_boundary_ratio(spec: PotentialSpec, E: float) -> complex:
    """theta/phi at x = 0 for the decaying q = 0 solution at energy E in (-m, m).

    u = (phi + theta)/sqrt2 vanishes at x = 0 exactly when this ratio is -1.
    For real E in the gap |theta| = |phi| there, so the condition reduces to
    Im(ratio) = 0 with Re(ratio) < 0.
    """
    st = q0_state(spec, E, eps_sign=1)
    ev = st(s=np.array([1.0 + 0j]))
    return complex(ev.lower[0] / (spec.m * ev.upper[0]))


def q0_half_line_levels(spec: PotentialSpec, n_scan: int = 400, gap_margin: float = 1e-6) -> np.ndarray:
    """Levels of the q = 0 problem on x >= 0 with u(0) = 0, by bracketing the boundary ratio."""
    if spec.variant is not Variant.EXPONENTIAL:
        raise ValueError("the half-line oracle needs the exponential variant")
    m = spec.m
    Es = np.linspace(-m * (1 - gap_margin), m * (1 - gap_margin), n_scan)
    ratios = np.array([q0_boundary_ratio(spec, E) for E in Es])
    g = ratios.imag
    out = []
    for i in range(n_scan - 1):
        if g[i] == 0 or g[i] * g[i + 1] < 0:
            if ratios[i].real >= 0 and ratios[i + 1].real >= 0:
                continue
            root = brentq(lambda E: q0_boundary_ratio(spec, E).imag, Es[i], Es[i + 1],
                          xtol=1e-14, rtol=1e-15)
            if q0_boundary_ratio(spec, root).real < 0:
                out.append(root)
    return np.unique(np.round(np.array(out), 13))
