"""Quadratic fluctuation Hamiltonian and its symplectic spectrum.

Quadrature ordering is fixed as r = (q1..q3, p1..p3, Q1..Q3, P1..P3), with
q, p the cavity and Q, P the atomic quadratures, so that H = 1/2 r^T M r.
Excitation energies are the symplectic (Williamson) eigenvalues of M,
extracted as the positive imaginary parts of eig(J @ M) with J the standard
symplectic form for this ordering.  The analytic normal-phase spectrum (see
docs/normal_phase_spectrum.md for the derivation) provides an independent
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, critical_couplings, first_order_point
from .meanfield import MeanFieldState, PhaseResult, gradient, solve_ground_state, state_from_x

_STATIONARITY_TOL = 1e-8
_CRITICAL_TOL = 1e-10
_PAIRING_TOL = 1e-9


class UnstableBackgroundError(ValueError):
    """The quadratic form is not positive semidefinite (wrong phase assignment)."""


@dataclass(frozen=True)
class QuadraticForm:
    """12x12 symmetric quadratic form over (q, p, Q, P) about a background."""

    M: np.ndarray
    background: MeanFieldState
    params: ModelParams


@dataclass(frozen=True)
class SpectrumResult:
    """Excitation energies sorted ascending (same energy units as omega).

    momentum_labels is set for the analytic normal-phase route only: a tuple
    of (k, branch) per energy with branch in {"-", "+"}.
    soft_mode_gap is the smallest energy; ``critical`` flags a gap below 1e-10.
    """

    energies: np.ndarray
    soft_mode_gap: float
    momentum_labels: tuple | None = None
    critical: bool = False


def _adjacency():
    A = np.ones((3, 3)) - np.eye(3)
    return A


def build_quadratic(background: MeanFieldState, params: ModelParams) -> QuadraticForm:
    """Assemble the fluctuation matrix M about a stationary background.

    Blocks: omega/2 photon diagonal, -Omega/(2 cos theta_n) atom diagonal,
    2*lambda*cos(theta_n) q-Q cross terms (phi absorbed into signed alpha),
    Jbar1 photon hopping on both q and p, Jbar2 atom hopping on P and on Q
    weighted by cos(theta_n)*cos(theta_{n+1}).
    """
    resid = np.max(np.abs(gradient(background.x, params)))
    if resid > _STATIONARITY_TOL:
        raise ValueError(
            f"background is not stationary (|grad|={resid:.3e}); "
            "the linear fluctuation term would not vanish"
        )
    omega, Omega = params.omega, params.Omega
    lam = params.lam
    cth = np.cos(background.theta)

    A = _adjacency()
    Mqq = omega * np.eye(3) + params.Jbar1 * A
    Mpp = Mqq.copy()
    MQQ = np.diag(-Omega / cth) + params.Jbar2 * A * np.outer(cth, cth)
    MPP = np.diag(-Omega / cth) + params.Jbar2 * A
    MqQ = np.diag(2.0 * lam * cth)

    Z = np.zeros((3, 3))
    M = np.block([
        [Mqq, Z, MqQ, Z],
        [Z, Mpp, Z, Z],
        [MqQ, Z, MQQ, Z],
        [Z, Z, Z, MPP],
    ])
    return QuadraticForm(M=M, background=background, params=params)


def symplectic_form() -> np.ndarray:
    """Standard symplectic form for the (q1..3, p1..3, Q1..3, P1..3) ordering."""
    J = np.zeros((12, 12))
    I3 = np.eye(3)
    J[0:3, 3:6] = I3
    J[3:6, 0:3] = -I3
    J[6:9, 9:12] = I3
    J[9:12, 6:9] = -I3
    return J


def symplectic_eigenvalues(form: QuadraticForm) -> SpectrumResult:
    """Six positive symplectic eigenvalues of M, sorted ascending.

    M must be positive semidefinite; a negative eigenvalue beyond the
    critical tolerance signals an unstable (mislabelled) background.
    """
    M = form.M
    scale = np.max(np.abs(M))
    min_eig = np.linalg.eigvalsh(M)[0]
    if min_eig < -_CRITICAL_TOL * max(scale, 1.0):
        raise UnstableBackgroundError(
            f"quadratic form has negative eigenvalue {min_eig:.3e}: unstable background"
        )
    w = np.linalg.eigvals(symplectic_form() @ M)
    if np.max(np.abs(w.real)) > _PAIRING_TOL * max(scale, 1.0):
        raise UnstableBackgroundError(
            "eigenvalues of J@M are not purely imaginary: unstable background"
        )
    pos = np.sort(w.imag[w.imag > 0.0])
    if len(pos) < 6:
        # zero modes at criticality: pad the missing pairs with exact zeros
        pos = np.concatenate([np.zeros(6 - len(pos)), pos])
    energies = pos[:6] if len(pos) > 6 else pos
    gap = float(energies[0])
    return SpectrumResult(
        energies=energies,
        soft_mode_gap=gap,
        critical=gap < _CRITICAL_TOL * max(scale, 1.0),
    )


def analytic_np_spectrum(params: ModelParams) -> SpectrumResult:
    """Closed-form normal-phase spectrum per momentum k in {0, +-2pi/3}.

    eps_pm(k)^2 = [w_k^2 + W_k^2 +- sqrt((w_k^2 - W_k^2)^2 + 16 lam^2 w_k W_k)]/2
    with w_k = omega + 2*Jbar1*cos k and W_k = Omega + 2*Jbar2*cos k.  The
    lower branch vanishes exactly at 4*lam^2 = w_k*W_k, i.e. at g_c.
    """
    lam = params.lam
    out = []
    for k in (0.0, 2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0):
        wk = params.omega + 2.0 * params.Jbar1 * math.cos(k)
        Wk = params.Omega + 2.0 * params.Jbar2 * math.cos(k)
        disc = math.sqrt((wk * wk - Wk * Wk) ** 2 + 16.0 * lam * lam * wk * Wk)
        for branch, sign in (("-", -1.0), ("+", 1.0)):
            e2 = 0.5 * (wk * wk + Wk * Wk + sign * disc)
            if e2 < -1e-12:
                raise ValueError(
                    f"eps_{branch}(k={k:.4f})^2 = {e2:.3e} < 0: past criticality"
                )
            out.append((math.sqrt(max(e2, 0.0)), k, branch))
    out.sort()
    energies = np.array([e for e, _, _ in out])
    labels = tuple((k, branch) for _, k, branch in out)
    gap = float(energies[0])
    return SpectrumResult(
        energies=energies, soft_mode_gap=gap,
        momentum_labels=labels, critical=gap < _CRITICAL_TOL,
    )


def soft_mode_gap(params: ModelParams, result: PhaseResult | None = None) -> float:
    """Smallest excitation energy about the ground state at these parameters."""
    if result is None:
        result = solve_ground_state(params)
    form = build_quadratic(result.representative, params)
    return symplectic_eigenvalues(form).soft_mode_gap


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law fit of a gap or order parameter."""

    exponent: float
    r_squared: float
    prefactor: float


def fit_power_law(dg: np.ndarray, values: np.ndarray) -> ExponentFit:
    """Slope of log(values) versus log(dg) with the coefficient of determination."""
    dg = np.asarray(dg, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0.0):
        raise ValueError("power-law fit requires strictly positive values")
    lx, ly = np.log(dg), np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return ExponentFit(exponent=float(slope), r_squared=r2, prefactor=math.exp(intercept))


def fit_critical_exponent(
    params: ModelParams,
    side: str,
    g_crit: float | None = None,
    window=(1e-6, 1e-3),
    n_points: int = 13,
) -> ExponentFit:
    """Power-law exponent of the soft-mode gap approaching a critical point.

    side is "below" (normal phase) or "above" (superradiant side); g_crit
    defaults to the realised critical coupling for these hoppings.  Errors
    out if the fit window would cross the first-order point g_L.
    """
    if side not in ("below", "above"):
        raise ValueError(f"side must be 'below' or 'above', got {side!r}")
    if g_crit is None:
        g_crit = critical_couplings(params).g_c
    sgn = 1.0 if side == "above" else -1.0
    dgs = np.geomspace(window[0], window[1], n_points)

    gL = first_order_point(params)
    if gL is not None:
        lo, hi = sorted((g_crit, g_crit + sgn * window[1]))
        if lo - 1e-15 <= gL <= hi + 1e-15:
            raise ValueError(
                f"fit window [{lo}, {hi}] crosses the first-order point g_L={gL}"
            )

    gaps = []
    for dg in dgs:
        p = params.replace(g=g_crit + sgn * dg)
        if side == "below":
            bg = state_from_x(np.zeros(3), p)
            gaps.append(symplectic_eigenvalues(build_quadratic(bg, p)).soft_mode_gap)
        else:
            gaps.append(soft_mode_gap(p))
    return fit_power_law(dgs, np.array(gaps))
