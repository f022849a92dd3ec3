"""The invariant suite behind ``hulthen-dirac verify`` and the acceptance tests.

Each group returns a list of Check records carrying the measured value, the
tolerance and the comparison.  ``tol_scale`` multiplies every upper-bound
tolerance, so a tiny factor forces failures (used to test the exit status).
Checks marked ``gating=False`` record documented findings: they are reported
but do not decide the exit status of ``verify``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import nu_engine as nu
from . import special
from .errors import EmptyWindow
from .hulthen import (
    PotentialSpec,
    Variant,
    alpha_window,
    bound_window,
    energy_closed_form,
    map_to_nu,
    bound_state_branch,
    spinor_state,
)
from .verification import (
    GridSpec,
    coupled_residual,
    fd_dirac_spectrum,
    ode_residual,
    quantization_root,
    symmetry_check,
)

SEED = 20240611


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    measured: float
    tolerance: float
    op: str = "<="  # measured op tolerance
    gating: bool = True
    detail: str = ""

    @property
    def passed(self) -> bool:
        m, t = self.measured, self.tolerance
        return {"<=": m <= t, "<": m < t, ">": m > t, ">=": m >= t, "==": m == t}[self.op]

    def line(self) -> str:
        status = "PASS" if self.passed else ("FAIL" if self.gating else "FINDING")
        text = f"[{status}] C{self.criterion} {self.name}: {self.measured:.3e} {self.op} {self.tolerance:.3e}"
        return text + (f"  ({self.detail})" if self.detail else "")


# -- shared grids ------------------------------------------------------------

GRID_VARIANTS = (Variant.REAL, Variant.PT, Variant.PSEUDO)
GRID_Q = (1.0, -1.0, 2.0)
GRID_ALPHA = (1.0, 1.5, 2.0)
GRID_V0 = (2.5, 4.0)
MAX_LEVELS = 4


def grid_specs():
    for var, q, a, V0 in itertools.product(GRID_VARIANTS, GRID_Q, GRID_ALPHA, GRID_V0):
        yield PotentialSpec(V0, q, a, 1.0, var)


def grid_levels(spec: PotentialSpec) -> list[int]:
    """Levels checked for one grid point: the bound window (pt/pseudo) or n < 4 (real)."""
    if spec.variant is Variant.REAL:
        return list(range(MAX_LEVELS))
    try:
        return list(bound_window(spec))[:MAX_LEVELS]
    except EmptyWindow:
        return []


def grid_states():
    for spec in grid_specs():
        for n in grid_levels(spec):
            for sg in (1, -1):
                yield spec, energy_closed_form(spec, n, sg)


def residual_grids(spec: PotentialSpec, n_points: int = 200):
    """(s grid, x grid) for the residual checks.

    s spans (0.01, 0.99)/|Q|.  For the real variant x is the image of that s
    grid; for pt/pseudo x covers one period at cell centres, avoiding the
    poles of the potential.
    """
    Q = abs(spec.effective()[1])
    s = np.linspace(0.01, 0.99, n_points) / Q
    if spec.variant is Variant.REAL:
        x = -np.log(s) / spec.alpha
    else:
        x = (np.arange(n_points) + 0.5) * (2 * math.pi / spec.alpha) / n_points
    return s, x


# -- criterion groups --------------------------------------------------------

def check_windows(tol_scale: float = 1.0) -> list[Check]:
    spec = PotentialSpec(2.5, 1.0, 1.0, 1.0, Variant.PT)
    expected = {0: (1.0, 4.0), 1: (0.5, 2.0), 2: (1 / 3, 4 / 3)}
    err = max(abs(a - b) for n, ref in expected.items() for a, b in zip(alpha_window(spec, n), ref))
    return [Check(1, "alpha windows n=0,1,2 at V0=2.5", err, 1e-12 * tol_scale)]


def check_oracle_agreement(tol_scale: float = 1.0) -> list[Check]:
    worst, n_states, discrepant = 0.0, 0, 0
    for spec, st in grid_states():
        n_states += 1
        if st.discrepant:
            discrepant += 1
            continue
        seed = st.energy + 1e-3 * (1 + 0.5j)
        root = quantization_root(spec, st.n, seed, eps_sign=st.eps_sign)
        worst = max(worst, abs(root.E - st.energy))
    return [
        Check(2, "max |quantization_root - closed form|", worst, 1e-8 * tol_scale,
              detail=f"{n_states} states"),
        Check(2, "unexplained discrepant states", discrepant, 0, "=="),
    ]


def check_residuals(tol_scale: float = 1.0, dE: float = 1e-3) -> list[Check]:
    worst = {"ode": 0.0, "r1": 0.0, "r2": 0.0}
    sens_min, sens_below, slope_min = math.inf, 0, math.inf
    n_states = 0
    for spec, st in grid_states():
        n_states += 1
        state = spinor_state(spec, st)
        s, x = residual_grids(spec)
        worst["ode"] = max(worst["ode"], ode_residual(spec, state, s).max_rel)
        c1, c2 = coupled_residual(spec, state, x)
        worst["r1"] = max(worst["r1"], c1.max_rel)
        worst["r2"] = max(worst["r2"], c2.max_rel)

        def perturbed(d, key):
            E = st.energy + d * spec.m
            reports = [ode_residual(spec, state, s, E=E), *coupled_residual(spec, state, x, E=E)]
            return max(getattr(r, key) for r in reports)

        sens = perturbed(dE, "max_rel")
        sens_min = min(sens_min, sens)
        sens_below += sens <= 1e-4
        # growth is read off max_abs: max_rel saturates at 1 for states whose
        # unperturbed terms all vanish (e.g. phi = const at E = m)
        lo, hi = perturbed(1e-6, "max_abs"), perturbed(1e-2, "max_abs")
        slope_min = min(slope_min, math.log10(hi / lo) / 4.0)
    return [
        Check(3, "ode residual max_rel", worst["ode"], 1e-8 * tol_scale, "<", detail=f"{n_states} states"),
        Check(3, "coupled r1 max_rel", worst["r1"], 1e-8 * tol_scale, "<"),
        Check(3, "coupled r2 max_rel", worst["r2"], 1e-8 * tol_scale, "<"),
        Check(3, "residual growth order in dE over [1e-6, 1e-2]", slope_min, 1.0 - 1e-3, ">="),
        Check(3, "min max_rel with E shifted by 1e-3 m", sens_min, 1e-4, ">", gating=False,
              detail=f"{sens_below} of {n_states} states at or below 1e-4"),
    ]


def reality_grid(n_side: int = 100):
    """(V0, alpha) grid straddling the reality boundary of level 0 at q = 1, m = 1."""
    return np.linspace(1.5, 4.0, n_side), np.linspace(0.2, 2.9, n_side)


def check_reality_boundary(tol_scale: float = 1.0) -> list[Check]:
    V0s, alphas = reality_grid()
    flag_miss = energy_miss = 0
    n_real = on_line = 0
    for V0, a in itertools.product(V0s, alphas):
        spec = PotentialSpec(V0, 1.0, a, 1.0, Variant.PT)
        kt = spec.q * a - V0
        inside = 4 * spec.q**2 * spec.m**2 <= V0 * V0 - kt * kt
        n_real += inside
        # on q alpha (n+1) = V0 the closed-form energy is V0/2q, real on either side
        degenerate = abs(kt) <= 1e-12 * V0
        on_line += degenerate
        for sg in (1, -1):
            st = energy_closed_form(spec, 0, sg)
            flag_miss += st.is_real_spectrum != inside
            if not degenerate:
                energy_miss += (abs(st.energy.imag) <= 1e-10) != inside
    spec = PotentialSpec(2.5, 1.0, 1.0, 1.0, Variant.PT)
    coincide = 0.0
    for a in alpha_window(spec, 0):
        edge = PotentialSpec(2.5, 1.0, a, 1.0, Variant.PT)
        Ep, Em = (energy_closed_form(edge, 0, sg).energy for sg in (1, -1))
        coincide = max(coincide, abs(Ep - Em), abs(Ep - 1.25), abs(Em - 1.25))
    return [
        Check(4, "is_real flag misclassifications", flag_miss, 0, "==",
              detail=f"{n_real} of {V0s.size * alphas.size} grid points inside"),
        Check(4, "Im(E) = 0 misclassifications", energy_miss, 0, "==",
              detail=f"{on_line} points on q alpha = V0 excluded"),
        Check(4, "branch coincidence at V0/2q on window edges", coincide, 1e-10 * tol_scale),
    ]


def check_symmetry(tol_scale: float = 1.0, n_sets: int = 10) -> list[Check]:
    rng = np.random.default_rng(SEED)
    pt = pseudo = shifted = 0.0
    control = math.inf
    for _ in range(n_sets):
        V0, q, a = rng.uniform(0.5, 5.0), rng.uniform(-3.0, 3.0), rng.uniform(0.2, 3.0)
        x = rng.uniform(-5.0, 5.0, 100)
        pt = max(pt, symmetry_check(PotentialSpec(V0, q, a, 1.0, Variant.PT), "pt", x).max_abs)
        ph = PotentialSpec(V0, q, a, 1.0, Variant.PSEUDO)
        pseudo = max(pseudo, symmetry_check(ph, "pseudo_p", x).max_abs)
        shifted = max(shifted, symmetry_check(ph, "pt_shifted", x).max_rel)
        xr = rng.uniform(0.1, 5.0, 100)
        real = PotentialSpec(V0, q if abs(q) > 0.1 else 1.0, a, 1.0, Variant.REAL)
        control = min(control, symmetry_check(real, "pt", xr).max_abs / V0)
    return [
        Check(5, "PT reflection x -> -x, pt variant", pt, 1e-13 * tol_scale, "<"),
        Check(5, "P reflection x -> pi/(2 alpha) - x, pseudo variant", pseudo, 1e-13 * tol_scale, "<",
              gating=False, detail="this reflection is not a symmetry of the pseudo potential"),
        Check(5, "reflection x -> pi/alpha - x, pseudo variant (max_rel)", shifted, 1e-13 * tol_scale, "<"),
        Check(5, "real variant PT control, max_abs / V0", control, 0.1, ">"),
    ]


def oscillator_levels(n_max: int = 10) -> np.ndarray:
    """eps~_n from sigma = 1, tau~ = 0, sigma~ = eps~ - z^2 through the full NU pipeline."""
    out = []
    for n in range(n_max + 1):
        def mismatch(e):
            prob = nu.validate_problem(nu.Poly2(1, 0, 0), nu.Poly2(e, 0, -1), nu.Poly2(0, 0, 0))
            branch = nu.select_branch(nu.enumerate_branches(prob), "default")
            return branch.lam - nu.eigen_lambda(branch, n)

        # the mismatch is affine in eps~: two evaluations fix the root
        f0, f1 = mismatch(0.0), mismatch(1.0)
        out.append(-f0 / (f1 - f0))
    return np.array(out)


def hulthen_instance_errors(rng: np.random.Generator, n_points: int = 5) -> dict[str, float]:
    """Largest deviations of the NU pipeline from the closed Hulthen forms at random points."""
    err = dict.fromkeys(("k", "tau", "lambda", "weight", "phi"), 0.0)
    for _ in range(n_points):
        spec = PotentialSpec(rng.uniform(1.0, 4.0), float(rng.choice([1.0, -1.0, 2.0])),
                             rng.uniform(0.5, 2.0), 1.0, Variant.REAL)
        E = complex(rng.uniform(-0.9, 0.9), rng.uniform(-0.5, 0.5))
        prob, p = map_to_nu(spec, E)
        q, v, eps, beta = p.q_eff, p.v, p.eps, p.beta
        ks = nu.k_candidates(prob)
        err["k"] = max(err["k"], *(min(abs(k - t) for k in ks) for t in (beta + v * eps, beta - v * eps)))
        b = bound_state_branch(prob, spec, p)
        tau_t = nu.Poly2(1 + 2 * eps, -(2 * q + v + 2 * q * eps), 0)
        lam_t = beta - 0.5 * (v + q) - (v + q) * eps
        err["tau"] = max(err["tau"], (b.tau - tau_t).scale())
        err["lambda"] = max(err["lambda"], abs(b.lam - lam_t))
        w = nu.pearson_weight(b, prob)
        err["weight"] = max(err["weight"], abs(w.A - 2 * eps), abs(w.B - v / q))
        f = nu.phi_factor(b, prob)
        err["phi"] = max(err["phi"], abs(f.A - eps), abs(f.B - (v + q) / (2 * q)))
    return err


def check_nu_engine(tol_scale: float = 1.0) -> list[Check]:
    osc = oscillator_levels()
    osc_err = float(np.max(np.abs(osc - (2 * np.arange(osc.size) + 1))))
    err = hulthen_instance_errors(np.random.default_rng(SEED))
    checks = [Check(6, "oscillator eps~_n = 2n+1, n <= 10", osc_err, 1e-12 * tol_scale)]
    for key, label in (("k", "k = beta +/- v eps"), ("tau", "tau of the bound-state branch"),
                       ("lambda", "lambda of the bound-state branch"),
                       ("weight", "weight exponents (2 eps, v/q)"),
                       ("phi", "phi exponents (eps, (v+q)/2q)")):
        checks.append(Check(6, f"Hulthen instance {label}", err[key], 1e-12 * tol_scale))
    return checks


def random_jacobi_triples(rng: np.random.Generator, count: int = 50):
    for _ in range(count):
        a = complex(rng.uniform(-0.9, 3.0), rng.uniform(-2.0, 2.0))
        b = complex(rng.uniform(-0.9, 3.0), rng.uniform(-2.0, 2.0))
        z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0))
        yield a, b, z


def jacobi_dual_path_error(rng) -> float:
    """Recurrence vs explicit sum, relative to the absolute sum of the explicit terms."""
    worst = 0.0
    for a, b, z in random_jacobi_triples(rng):
        for n in range(9):
            rec = special.jacobi_p(n, a, b, z)
            ref = special.jacobi_p_sum(n, a, b, z)
            mag = sum(abs(special.gbinom(n + a, n - k) * special.gbinom(n + b, k)
                          * ((z - 1) / 2) ** k * ((z + 1) / 2) ** (n - k)) for k in range(n + 1))
            worst = max(worst, abs(rec - ref) / max(mag, 1e-300))
    return worst


def jacobi_derivative_error(rng, h: float = 1e-3) -> float:
    """Derivative identity vs a fourth-order central difference, relative."""
    worst = 0.0
    for a, b, z in random_jacobi_triples(rng):
        for n in range(1, 9):
            d = special.jacobi_p_deriv(n, a, b, z)
            f = [special.jacobi_p(n, a, b, z + k * h) for k in (-2, -1, 1, 2)]
            fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
            worst = max(worst, abs(d - fd) / max(abs(d), 1.0))
    return worst


def kummer_error(rng, count: int = 50) -> float:
    """|M(a;b;z) - e^z M(b-a;b;-z)| relative to |M(a;b;z)|."""
    worst = 0.0
    for _ in range(count):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = complex(rng.uniform(0.5, 3), rng.uniform(-2, 2))
        z = 10.0 * math.sqrt(rng.uniform()) * complex(np.exp(1j * rng.uniform(0, 2 * math.pi)))
        lhs = special.hyp1f1(a, b, z)
        rhs = np.exp(z) * special.hyp1f1(b - a, b, -z)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return worst


def check_special(tol_scale: float = 1.0) -> list[Check]:
    return [
        Check(7, "Jacobi recurrence vs explicit sum", jacobi_dual_path_error(np.random.default_rng(SEED)),
              1e-11 * tol_scale),
        Check(7, "Jacobi derivative identity vs finite differences",
              jacobi_derivative_error(np.random.default_rng(SEED + 1)), 1e-8 * tol_scale),
        Check(7, "1F1 Kummer transformation", kummer_error(np.random.default_rng(SEED + 2)), 1e-10 * tol_scale),
        Check(7, "1F1(1;2;1) = e - 1", abs(special.hyp1f1(1, 2, 1) - (math.e - 1)), 1e-14 * tol_scale),
    ]


# -- finite differences ------------------------------------------------------

FREE_L = 10.0
Q0_SPEC = PotentialSpec(2.5, 0.0, 1.0, 1.0, Variant.EXPONENTIAL)
Q0_DOMAIN = (0.0, 40.0)


def free_box_error(n_points: int) -> float:
    spec = PotentialSpec(0.0, 0.0, 1.0, 1.0, Variant.EXPONENTIAL)
    ev = fd_dirac_spectrum(spec, GridSpec(-FREE_L, FREE_L, n_points), free=True).positive()
    return abs(ev[0] - math.sqrt(1 + (math.pi / (2 * FREE_L)) ** 2))


def massless_doublers(staggered: bool = True, n_points: int = 2000, n_modes: int = 20) -> int:
    """Eigenvalues in the low band that are not matched one-to-one with j pi/(2L).

    A doubler shows up as a second eigenvalue within half a level spacing of a
    physical mode (or as an unmatched eigenvalue).
    """
    spec = PotentialSpec(0.0, 0.0, 1.0, 0.0, Variant.EXPONENTIAL)
    grid = GridSpec(-FREE_L, FREE_L, n_points, staggered)
    ev = fd_dirac_spectrum(spec, grid, free=True).eigenvalues.real
    spacing = math.pi / (2 * FREE_L)
    band = ev[np.abs(ev) <= (n_modes + 0.5) * spacing]
    j = np.rint(band / spacing)
    close = np.abs(band - j * spacing) < 0.5 * spacing
    counts = np.bincount((j[close] + n_modes).astype(int), minlength=2 * n_modes + 1)
    return int(np.sum(~close) + np.sum(np.abs(counts - 1)))


def q0_levels(n_points: int) -> np.ndarray:
    grid = GridSpec(*Q0_DOMAIN, n_points)
    return fd_dirac_spectrum(Q0_SPEC, grid).bound_states(Q0_SPEC.m)


# levels of the q = 0 well at (V0, alpha, m) = (2.5, 1, 1) on [0, 40], N = 4000
Q0_PINNED = np.array([0.554980179])


def check_fd(tol_scale: float = 1.0) -> list[Check]:
    errs = [free_box_error(N) for N in (1000, 2000, 4000)]
    order = min(math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2]))
    coarse, fine = q0_levels(4000), q0_levels(8000)
    stable = float(np.max(np.abs(coarse - fine))) if coarse.size == fine.size else math.inf
    pinned = (float(np.max(np.abs(coarse - Q0_PINNED))) if coarse.size == Q0_PINNED.size else math.inf)
    return [
        Check(8, "free box lowest level error, N=2000", errs[1], 2e-4 * tol_scale),
        Check(8, "free box convergence order", order, 1.9, ">="),
        Check(8, "massless doublers (staggered)", massless_doublers(True), 0, "=="),
        Check(8, "q=0 levels N=4000 vs N=8000", stable, 1e-4 * tol_scale,
              detail=f"{coarse.size} levels"),
        Check(8, "q=0 levels vs pinned table", pinned, 1e-8 * tol_scale),
    ]


GROUPS: dict[int, Callable[..., list[Check]]] = {
    1: check_windows,
    2: check_oracle_agreement,
    3: check_residuals,
    4: check_reality_boundary,
    5: check_symmetry,
    6: check_nu_engine,
    7: check_special,
    8: check_fd,
}


def run_suite(tol_scale: float = 1.0, groups=None) -> list[Check]:
    out = []
    for key in sorted(GROUPS if groups is None else groups):
        out.extend(GROUPS[key](tol_scale=tol_scale))
    return out
