"""Mean-field ground states of the trimer.

The reduced ground-state energy per unit of N_a*Omega, as a function of the
transformed variables x_n on the open cube |x_n| < g/2, is

    E(x) = sum_n [ C*x_n^2 - 1/2*sqrt(1 - 4*x_n^2/g^2) + 2*B*x_n*x_{n+1} ]

with periodic indices and the coefficients from :mod:`dicke_trimer.model`.
Three kinds of minima occur: the trivial x = 0 (normal phase, NP), a uniform
configuration (normal superradiant phase, NSP, two-fold degenerate) and a
frustrated one with one site carrying opposite sign and twice the amplitude
of the other two (FSP, six-fold degenerate).

Note on the frustrated stationarity conditions: the two-variable reduction
used here is the gradient of E restricted to the (x1, x2, x2) pattern.  See
docs/frustrated_stationarity.md for the derivation and for why the naive
per-site elimination produces a non-stationary root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    FSP,
    NP,
    NSP,
    ModelParams,
    alpha_from_x,
    b_tilde,
    c_tilde,
    coefficients,
    critical_couplings,
    x_from_alpha,
)


class DomainError(ValueError):
    """A coordinate left the physical domain |x_n| < g/2."""


class ConvergenceError(RuntimeError):
    """Newton iteration failed to converge; carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class MeanFieldState:
    """One candidate mean-field configuration.

    alpha : signed rescaled cavity coherences (phi absorbed as the sign)
    x     : transformed variables, x = S @ alpha
    theta : Bloch polar angles in (pi/2, 3*pi/2), cos(theta) < 0
    phi   : azimuthal angles, fixed to 0 under the signed-alpha convention
    """

    alpha: np.ndarray
    x: np.ndarray
    theta: np.ndarray
    phi: np.ndarray


@dataclass(frozen=True)
class PhaseResult:
    """A solved ground state: label, energy, and the full degenerate orbit."""

    label: str
    energy: float
    degeneracy: int
    representative: MeanFieldState
    all_minima: list = field(default_factory=list)
    coexistent: bool = False


def _check_domain(x, g):
    if np.any(np.abs(x) >= 0.5 * g):
        raise DomainError(f"|x_n| >= g/2 is unphysical (g={g}, x={np.asarray(x)})")


def state_from_x(x, params: ModelParams) -> MeanFieldState:
    """Build the full state (coherences and angles) from the x variables."""
    x = np.asarray(x, dtype=float)
    _check_domain(x, params.g)
    alpha = alpha_from_x(x, params)
    # sin(theta) = -2x/g with cos(theta) on the negative branch
    theta = math.pi + np.arcsin(2.0 * x / params.g)
    return MeanFieldState(alpha=alpha, x=x, theta=theta, phi=np.zeros(3))


def energy(x, params: ModelParams) -> float:
    """Reduced ground-state energy E(x); hard error outside |x_n| < g/2."""
    x = np.asarray(x, dtype=float)
    g = params.g
    _check_domain(x, g)
    c = coefficients(params)
    root = np.sqrt(1.0 - 4.0 * x * x / (g * g))
    return float(
        np.sum(c.C_tilde * x * x - 0.5 * root + 2.0 * c.B_tilde * x * np.roll(x, -1))
    )


def gradient(x, params: ModelParams) -> np.ndarray:
    """Analytic dE/dx_n."""
    x = np.asarray(x, dtype=float)
    g = params.g
    _check_domain(x, g)
    c = coefficients(params)
    root = np.sqrt(1.0 - 4.0 * x * x / (g * g))
    return (
        2.0 * c.C_tilde * x
        + 2.0 * x / (g * g * root)
        + 2.0 * c.B_tilde * (np.roll(x, 1) + np.roll(x, -1))
    )


def hessian(x, params: ModelParams) -> np.ndarray:
    """Analytic 3x3 Hessian of E."""
    x = np.asarray(x, dtype=float)
    g = params.g
    _check_domain(x, g)
    c = coefficients(params)
    u = 4.0 * x * x / (g * g)
    root = np.sqrt(1.0 - u)
    diag = 2.0 * c.C_tilde + (2.0 / (g * g)) * (1.0 / root + u / root**3)
    H = np.full((3, 3), 2.0 * c.B_tilde)
    np.fill_diagonal(H, diag)
    return H


# ---------------------------------------------------------------------------
# degenerate orbits

def _orbit(x, tol=1e-9):
    """Distinct configurations under cyclic permutation and global sign flip."""
    x = np.asarray(x, dtype=float)
    out = []
    for sign in (1.0, -1.0):
        for shift in range(3):
            cand = sign * np.roll(x, shift)
            if not any(np.max(np.abs(cand - c)) < tol for c in out):
                out.append(cand)
    return out


def _canonical(configs):
    """Lexicographically smallest (x1, x2, x3) among degenerate minima."""
    return min(configs, key=tuple)


def _phase_result(label, x, params, coexistent=False):
    configs = _orbit(x)
    configs.sort(key=tuple)
    states = [state_from_x(c, params) for c in configs]
    return PhaseResult(
        label=label,
        energy=energy(configs[0], params),
        degeneracy=len(configs),
        representative=states[0],
        all_minima=states,
        coexistent=coexistent,
    )


def solve_np(params: ModelParams) -> PhaseResult:
    """The trivial x = 0 solution; energy -3/2 regardless of parameters."""
    state = state_from_x(np.zeros(3), params)
    return PhaseResult(label=NP, energy=-1.5, degeneracy=1,
                       representative=state, all_minima=[state])


# ---------------------------------------------------------------------------
# uniform (NSP) branch

def nsp_alpha(params: ModelParams) -> float:
    """Closed-form uniform coherence amplitude; 0.0 at or below onset."""
    g, J1, J2 = params.g, params.J1, params.J2
    denom = g * g - 2.0 * (J2 + 2.0 * J1 * J2)
    radicand = 1.0 / (1.0 + 2.0 * J1) ** 2 - 1.0 / denom**2
    if denom <= 0.0 or radicand <= 0.0:
        return 0.0
    return 0.5 * g * math.sqrt(radicand)


def solve_nsp(params: ModelParams) -> PhaseResult:
    """Translational-symmetric superradiant solution, or NP below its onset."""
    a = nsp_alpha(params)
    if a == 0.0:
        return solve_np(params)
    x = (1.0 + 2.0 * params.J1) * a
    return _phase_result(NSP, np.array([x, x, x]), params)


# ---------------------------------------------------------------------------
# frustrated (FSP) branch

def asymptotic_fsp(params: ModelParams, g: float | None = None) -> MeanFieldState:
    """Leading-order frustrated solution near the finite-momentum onset.

    x = (-2t, t, t) with t = sqrt((1-J2)*g_c_plus*(g - g_c_plus)/3); exact
    zeros at g = g_c_plus.  Used as a Newton seed and as an acceptance
    reference for the |g - g_c|^(1/2) scaling.
    """
    if g is None:
        g = params.g
    gcp = critical_couplings(params).g_c_plus
    dg = max(g - gcp, 0.0)
    t = math.sqrt((1.0 - params.J2) * gcp * dg / 3.0)
    return state_from_x(np.array([-2.0 * t, t, t]), params.replace(g=g))


def fsp_residual(x1: float, x2: float, params: ModelParams) -> np.ndarray:
    """Stationarity residual of the (x1, x2, x2) pattern (dE/dx1, dE/dx2)."""
    return gradient(np.array([x1, x2, x2]), params)[:2]


def _fsp_newton(x1, x2, params, tol=1e-12, max_iter=200, max_halvings=50):
    """Damped Newton on the two-variable frustrated stationarity system."""
    g = params.g
    u = np.array([x1, x2], dtype=float)
    res = fsp_residual(u[0], u[1], params)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm < tol:
            return u
        H = hessian(np.array([u[0], u[1], u[1]]), params)
        J = np.array([
            [H[0, 0], H[0, 1] + H[0, 2]],
            [H[1, 0], H[1, 1] + H[1, 2]],
        ])
        try:
            step = np.linalg.solve(J, res)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian in frustrated Newton solve",
                                   residual=norm)
        lam = 1.0
        for _ in range(max_halvings):
            trial = u - lam * step
            if np.max(np.abs(trial)) < 0.5 * g:
                trial_res = fsp_residual(trial[0], trial[1], params)
                trial_norm = np.max(np.abs(trial_res))
                if trial_norm < norm:
                    u, res, norm = trial, trial_res, trial_norm
                    break
            lam *= 0.5
        else:
            raise ConvergenceError(
                f"frustrated Newton stalled at residual {norm:.3e}", residual=norm)
    raise ConvergenceError(
        f"frustrated Newton did not converge, residual {norm:.3e}", residual=norm)


def _is_fsp_minimum(x1, x2, params, tol=1e-9):
    """True if (x1, x2, x2) is a frustrated local minimum of the full energy."""
    if x1 * x2 >= 0.0:
        return False
    H = hessian(np.array([x1, x2, x2]), params)
    return bool(np.linalg.eigvalsh(H)[0] > -tol)


def _fsp_multistart(params: ModelParams):
    """Multistart search for the frustrated local minimum of the (x1, x2, x2)
    restricted energy; returns (x1, x2) or None.

    Needed where the uniform phase condenses first (g_c_minus < g_c_plus): the
    frustrated minimum is then born at finite amplitude via a fold between
    g_c_plus and the first-order point, disconnected from the branch that
    emerges continuously at g_c_plus (which stays a saddle).
    """
    from scipy.optimize import minimize

    g = params.g

    def e2(u):
        return energy(np.array([u[0], u[1], u[1]]), params)

    bound = 0.4999 * g
    candidates = []
    for a in np.linspace(-0.45 * g, -0.05 * g, 5):
        for b in np.linspace(0.05 * g, 0.45 * g, 5):
            res = minimize(e2, np.array([a, b]), method="L-BFGS-B",
                           bounds=[(-bound, bound)] * 2,
                           options={"ftol": 1e-15, "gtol": 1e-10})
            try:
                u = _fsp_newton(res.x[0], res.x[1], params)
            except ConvergenceError:
                continue
            x1, x2 = float(u[0]), float(u[1])
            if x1 > 0.0 > x2:
                x1, x2 = -x1, -x2
            if not _is_fsp_minimum(x1, x2, params):
                continue
            if any(abs(x1 - c[0]) < 1e-8 and abs(x2 - c[1]) < 1e-8
                   for c in candidates):
                continue
            candidates.append((x1, x2))
    if not candidates:
        return None
    return min(candidates, key=lambda c: energy(np.array([c[0], c[1], c[1]]), params))


def _solve_fsp_branch(params: ModelParams, seed=None) -> PhaseResult:
    """Frustrated minimum branch for g > g_c_plus, ignoring the B sign.

    Needed internally to trace the branch through the first-order point,
    where B changes sign while the branch persists.
    """
    g = params.g
    gcp = critical_couplings(params).g_c_plus
    if g <= gcp:
        raise ValueError(f"frustrated branch requires g > g_c_plus={gcp}, got g={g}")
    if seed is not None:
        x1, x2 = float(seed[0]), float(seed[1])
        sol = _fsp_newton(x1, x2, params)
    else:
        dg = g - gcp
        try:
            if dg <= 5e-2:
                st = asymptotic_fsp(params)
                sol = _fsp_newton(st.x[0], st.x[1], params)
            else:
                # continuation in g from just above onset, asymptotic seed first
                dgs = np.geomspace(1e-3, dg, 30)
                st = asymptotic_fsp(params, g=gcp + dgs[0])
                u = np.array([st.x[0], st.x[1]])
                for step_dg in dgs:
                    u = _fsp_newton(u[0], u[1], params.replace(g=gcp + step_dg))
                sol = u
        except ConvergenceError:
            sol = None
    x1, x2 = (None, None) if sol is None else sol
    if sol is not None and x1 > 0.0 > x2:
        # the orbit contains the canonical sign pattern; normalise to it
        x1, x2 = -x1, -x2
    if sol is None or not _is_fsp_minimum(x1, x2, params):
        # continuation landed on a saddle (or failed): fold-born minimum
        found = _fsp_multistart(params)
        if found is None:
            raise ConvergenceError(
                f"no frustrated local minimum at g={g} (J1={params.J1}, "
                f"J2={params.J2}); the branch may not exist yet",
                residual=math.inf)
        x1, x2 = found
    return _phase_result(FSP, np.array([x1, x2, x2]), params)


def solve_fsp(params: ModelParams, seed=None) -> PhaseResult:
    """Frustrated superradiant ground state for g > g_c_plus and B_tilde > 0."""
    if b_tilde(params) <= 0.0:
        raise ValueError("frustrated phase requires B_tilde > 0")
    return _solve_fsp_branch(params, seed=seed)


# ---------------------------------------------------------------------------
# dispatch

_B_COEXIST_TOL = 1e-12


def solve_ground_state(params: ModelParams) -> PhaseResult:
    """Global mean-field ground state at one parameter point.

    Dispatch: g <= g_c gives the NP; above it the sign of B_tilde selects
    the uniform (B < 0) or frustrated (B > 0) branch.  |B| below 1e-12 is
    treated as first-order coexistence: both branches are solved and the
    lower-energy one is returned with ``coexistent=True``.
    """
    cc = critical_couplings(params)
    if params.g <= cc.g_c:
        return solve_np(params)
    B = b_tilde(params)
    if abs(B) < _B_COEXIST_TOL:
        nsp = solve_nsp(params)
        fsp = _solve_fsp_branch(params)
        best = nsp if nsp.energy <= fsp.energy else fsp
        return PhaseResult(
            label=best.label, energy=best.energy, degeneracy=best.degeneracy,
            representative=best.representative, all_minima=best.all_minima,
            coexistent=True,
        )
    if B < 0.0:
        return solve_nsp(params)
    return solve_fsp(params)


# ---------------------------------------------------------------------------
# monotonic-method root analysis

@dataclass(frozen=True)
class RootStructure:
    """Roots of f(x) = k on (-g/2, g/2) and the monotonicity of f."""

    monotonic: bool
    roots: tuple
    turning_points: tuple


def _monotone_fn(params: ModelParams):
    g, J1, J2 = params.g, params.J1, params.J2
    a = (g * g + J2 - J1 * J2) / (1.0 - J1)

    def f(x):
        return a * x - x / np.sqrt(1.0 - 4.0 * x * x / (g * g))

    def fprime(x):
        u = 4.0 * x * x / (g * g)
        root = np.sqrt(1.0 - u)
        return a - (1.0 / root + u / root**3)

    return f, fprime


def root_structure(params: ModelParams, k: float, scan_points: int = 4001) -> RootStructure:
    """Classify the roots of the per-site stationarity function f(x) = k.

    f(x) = (g^2 + J2 - J1*J2)*x/(1-J1) - x/sqrt(1 - 4*x^2/g^2) is monotonic
    for g < g_c_plus and develops two symmetric turning points above it.
    Roots are located by a dense sign-change scan refined with brentq.
    """
    from scipy.optimize import brentq

    g = params.g
    f, fprime = _monotone_fn(params)
    gcp = critical_couplings(params).g_c_plus
    monotonic = params.g <= gcp

    lo, hi = -0.5 * g * (1 - 1e-12), 0.5 * g * (1 - 1e-12)
    xs = np.linspace(lo, hi, scan_points)
    vals = f(xs) - k
    roots = []
    exact = np.flatnonzero(vals == 0.0)
    for i in exact:
        roots.append(float(xs[i]))
    sign_change = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    for i in sign_change:
        roots.append(float(brentq(lambda x: f(x) - k, xs[i], xs[i + 1], xtol=1e-14)))
    roots = sorted(set(round(r, 13) for r in roots))

    turning = ()
    if not monotonic:
        # fprime(0) > 0 and fprime -> -inf at the edges: one zero on each side
        xt = brentq(fprime, 1e-16, hi, xtol=1e-14)
        turning = (-xt, xt)
    return RootStructure(monotonic=monotonic, roots=tuple(roots), turning_points=turning)


# ---------------------------------------------------------------------------
# atom-hopping-only special case (independent route)

def _atom_only_energy(alpha, g, J2):
    alpha = np.asarray(alpha, dtype=float)
    root = np.sqrt(1.0 - 4.0 * alpha * alpha / (g * g))
    return float(np.sum(-alpha * alpha - 0.5 * root
                        + (2.0 * J2 / (g * g)) * alpha * np.roll(alpha, -1)))


def _atom_only_gradient(alpha, g, J2):
    alpha = np.asarray(alpha, dtype=float)
    root = np.sqrt(1.0 - 4.0 * alpha * alpha / (g * g))
    return (-2.0 * alpha + 2.0 * alpha / (g * g * root)
            + (2.0 * J2 / (g * g)) * (np.roll(alpha, 1) + np.roll(alpha, -1)))


def solve_atom_only(params: ModelParams) -> PhaseResult:
    """Ground state of the J1 = 0 model by direct minimisation over alpha.

    With the photon hopping off the x variables coincide with alpha and the
    reduced energy per site is -a^2 - 1/2*sqrt(1 - 4a^2/g^2) plus the
    (2*J2/g^2) a_n a_{n+1} coupling.  Solved here with scipy local descent
    from pattern seeds, deliberately not reusing the general-x machinery,
    so it can serve as a cross-check of solve_ground_state at J1 = 0.
    """
    from scipy.optimize import minimize

    if params.J1 != 0.0:
        raise ValueError(f"atom-only solver requires J1 = 0, got J1={params.J1}")
    g, J2 = params.g, params.J2
    amax = 0.5 * g * (1.0 - 1e-10)
    a0 = 0.45 * g
    seeds = [np.zeros(3)]
    for base in (np.array([1.0, 1.0, 1.0]), np.array([-2.0, 1.0, 1.0]) / 2.0,
                 np.array([-1.0, 1.0, 1.0])):
        for s in (1.0, -1.0):
            seeds.append(s * a0 * base)

    best = None
    for seed in seeds:
        res = minimize(
            _atom_only_energy, np.clip(seed, -amax, amax), args=(g, J2),
            jac=_atom_only_gradient, method="L-BFGS-B",
            bounds=[(-amax, amax)] * 3,
            options={"ftol": 1e-16, "gtol": 1e-12},
        )
        if best is None or res.fun < best.fun:
            best = res
    alpha = best.x
    # polish with a few Newton steps on the analytic gradient
    for _ in range(50):
        u = 4.0 * alpha * alpha / (g * g)
        root = np.sqrt(1.0 - u)
        grad = _atom_only_gradient(alpha, g, J2)
        if np.max(np.abs(grad)) < 1e-13:
            break
        diag = -2.0 + (2.0 / (g * g)) * (1.0 / root + u / root**3)
        H = np.full((3, 3), 2.0 * J2 / (g * g))
        np.fill_diagonal(H, diag)
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            break
        trial = alpha - step
        if np.max(np.abs(trial)) >= amax:
            break
        alpha = trial

    amp = np.max(np.abs(alpha))
    if amp < 1e-8:
        return solve_np(params)
    uniform = np.max(np.abs(alpha - alpha.mean())) < 1e-8 * max(amp, 1.0)
    label = NSP if uniform else FSP
    configs = _orbit(alpha)
    configs.sort(key=tuple)
    states = [state_from_x(c, params) for c in configs]  # x == alpha at J1=0
    return PhaseResult(
        label=label,
        energy=_atom_only_energy(configs[0], g, J2),
        degeneracy=len(configs),
        representative=states[0],
        all_minima=states,
    )
