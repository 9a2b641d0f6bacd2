"""Characteristic-ensemble solver for the coarsening transport system.

The survival function obeys a transport equation whose characteristics
satisfy dx/ds = -[1 - (x/L(s))^(1/3)], with the nonlocal parameter L fixed
by the flux balance L^(1/3) = (1/3) int x^(-2/3) w dx / w(0,t).  Values of w
ride the characteristics unchanged, so the state is a label/position pair
per characteristic; L over each short interval is resolved by fixed-point
iteration on the path L(s), which is a contraction for small enough steps.

Characteristics reaching x = 0 are dissolving clusters; their labels and
exit times are logged, and the label currently arriving at the origin
reconstructs w(0,t) and hence the mean cluster volume Lambda = mass/w(0,t).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import cellquad
from .errors import ExtinctionError
from .profiles import SurvivalProfile, BetaProfile, beta_from_profile, _derivative_nonuniform


def drift(x, L):
    return -(1.0 - np.cbrt(np.asarray(x, float) / L))


def _phi_of_u(u):
    # time-to-origin integrand antiderivative, in units of 3L
    return -0.5 * u * u - u - np.log1p(-u)


def exit_time_frozen(x, L):
    """Time for a characteristic at x < L to reach 0 with L held fixed."""
    x = np.asarray(x, float)
    u = np.cbrt(np.clip(x, 0.0, None) / L)
    with np.errstate(invalid="ignore"):
        out = np.where(u < 1.0, 3.0 * L * _phi_of_u(np.minimum(u, 1.0 - 1e-15)), np.inf)
    return out


def _analytic_descent(x, L, ds):
    """Advance x < L by ds with L frozen, by inverting the exit-time map.

    Exact for frozen L; returns positions (entries that would cross 0 must
    have been screened out by the caller).
    """
    u = np.minimum(np.cbrt(x / L), 1.0 - 1e-15)
    target = _phi_of_u(u) - ds / (3.0 * L)
    # start from u itself: the map is increasing and convex, so Newton
    # descends monotonically onto the root
    un = np.where(target <= 0, 0.0, u)
    live = target > 0
    for _ in range(60):
        f = _phi_of_u(un) - target
        fp = un * un / (1.0 - un)
        step = np.where(live & (fp > 0), f / np.maximum(fp, 1e-300), 0.0)
        new = un - step
        un = np.where(new <= 0.0, 0.5 * un, new)
        if np.max(np.abs(step)) < 1e-16:
            break
    return L * un**3


def _rk4(x, s, ds, L_of_s):
    k1 = drift(x, L_of_s(s))
    k2 = drift(x + 0.5 * ds * k1, L_of_s(s + 0.5 * ds))
    k3 = drift(x + 0.5 * ds * k2, L_of_s(s + 0.5 * ds))
    k4 = drift(x + ds * k3, L_of_s(s + ds))
    return x + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class SolverConfig:
    delta: float = 0.05          # step length as a fraction of the current L
    tol: float = 1e-8            # Picard tolerance relative to L
    max_picard: int = 50
    n_cheb: int = 8              # Chebyshev panels per Picard interval
    nsub: int = 2                # integrator substeps per panel
    extinction_floor: int = 16
    max_halvings: int = 6


@dataclass
class Ensemble:
    """Surviving characteristics plus exit history."""

    labels: np.ndarray           # initial positions y_i (immutable)
    pos: np.ndarray              # current positions x_i(t), increasing
    w: np.ndarray                # w0(y_i), carried unchanged
    initial: SurvivalProfile
    beta0: Callable              # beta function of the initial data
    jac: np.ndarray = None       # dx/dy along each characteristic
    t: float = 0.0
    exit_t: list = field(default_factory=lambda: [0.0])
    exit_y: list = field(default_factory=lambda: [0.0])
    exit_jac: list = field(default_factory=lambda: [1.0])

    def __post_init__(self):
        if self.jac is None:
            self.jac = np.ones_like(self.pos)

    def copy(self) -> "Ensemble":
        return Ensemble(labels=self.labels, pos=self.pos.copy(), w=self.w,
                        initial=self.initial, beta0=self.beta0,
                        jac=self.jac.copy(), t=self.t,
                        exit_t=list(self.exit_t), exit_y=list(self.exit_y),
                        exit_jac=list(self.exit_jac))

    @property
    def n_alive(self) -> int:
        return len(self.pos)


def make_ensemble(profile: SurvivalProfile, beta0: Optional[Callable] = None) -> Ensemble:
    """Seed one characteristic per grid node with positive position."""
    if beta0 is None:
        b = beta_from_profile(profile)
        ok = ~b.low_confidence
        bx, bv = b.grid[ok], b.values[ok]

        def beta0(x):
            return np.interp(x, bx, bv)

    mask = profile.grid > 0
    return Ensemble(labels=profile.grid[mask].copy(), pos=profile.grid[mask].copy(),
                    w=profile.values[mask].copy(), initial=profile, beta0=beta0)


def _speed(x, L):
    # magnitude of the drift; the Jacobian dx/dy along a characteristic is
    # proportional to it while L is frozen, since d(ln J)/ds = v'(x) = d(ln|v|)/ds
    return np.maximum(np.abs(1.0 - np.cbrt(np.asarray(x, float) / L)), 1e-12)


def _advance(ens: Ensemble, s0: float, s1: float, L_of_s, nsub: int) -> None:
    """March survivors from absolute time s0 to s1, logging exits in place."""
    n_steps = max(nsub, 1)
    ss = np.linspace(s0, s1, n_steps + 1)
    for a, b in zip(ss[:-1], ss[1:]):
        ds = b - a
        x = ens.pos
        L_a = float(L_of_s(a))
        tte = exit_time_frozen(x, L_a)
        exiting = tte <= ds
        if np.any(exiting):
            order = np.argsort(tte[exiting])
            ens.exit_t.extend((a + tte[exiting][order]).tolist())
            ens.exit_y.extend(ens.labels[exiting][order].tolist())
            # |v| = 1 at the origin, so J there is J / |v(x)|
            ens.exit_jac.extend(
                (ens.jac[exiting] / _speed(x[exiting], L_a))[order].tolist())
            keep = ~exiting
            ens.labels = ens.labels[keep]
            ens.pos = ens.pos[keep]
            ens.w = ens.w[keep]
            ens.jac = ens.jac[keep]
            x = ens.pos
        if len(x) == 0:
            ens.t = b
            continue
        L_mid = float(L_of_s(a + 0.5 * ds))
        low = x < 0.9 * L_mid
        out = np.empty_like(x)
        if np.any(low):
            out[low] = _analytic_descent(x[low], L_mid, ds)
        if np.any(~low):
            out[~low] = _rk4(x[~low], a, ds, L_of_s)
        ens.jac = ens.jac * _speed(out, L_mid) / _speed(x, L_mid)
        ens.pos = out
        ens.t = b


def boundary_label(ens: Ensemble, L: float, t: Optional[float] = None) -> float:
    """Label currently arriving at x = 0, by exit-time interpolation."""
    t = ens.t if t is None else t
    t0, y0 = ens.exit_t[-1], ens.exit_y[-1]
    if ens.n_alive == 0:
        return y0
    t1 = t + float(exit_time_frozen(ens.pos[0], L))
    y1 = float(ens.labels[0])
    if not np.isfinite(t1) or t1 <= t0:
        return y0
    return y0 + (y1 - y0) * (t - t0) / (t1 - t0)


def boundary_jacobian(ens: Ensemble, L: float, t: Optional[float] = None) -> float:
    """dx/dy of the characteristic currently at the origin.

    Interpolated in log between the last logged exit and the projected exit
    of the first survivor; its reciprocal is the slope dF/dx of the label
    map at x = 0.
    """
    t = ens.t if t is None else t
    t0, j0 = ens.exit_t[-1], ens.exit_jac[-1]
    if ens.n_alive == 0:
        return j0
    t1 = t + float(exit_time_frozen(ens.pos[0], L))
    j1 = float(ens.jac[0]) / float(_speed(ens.pos[0], L))
    if not np.isfinite(t1) or t1 <= t0 or not j0 > 0 or not j1 > 0:
        return j0
    lj = np.log(j0) + (np.log(j1) - np.log(j0)) * (t - t0) / (t1 - t0)
    return float(np.exp(lj))


def _augmented_state(ens: Ensemble, w0b: float):
    x = np.concatenate(([0.0], ens.pos))
    w = np.concatenate(([w0b], np.minimum(ens.w, w0b)))
    return x, w


def _phi_primitive(u):
    # int_0^u phi(s) ds = sum_{k>=3} u^(k+1)/(k(k+1)); closed form cancels
    # below u = 0.25, so switch to the series there
    u = np.asarray(u, float)
    k = np.arange(3, 61).reshape(-1, 1)
    series = np.sum(u ** (k + 1) / (k * (k + 1)), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = -u**3 / 6 - u**2 / 2 + u + (1.0 - u) * np.log1p(-u)
    return np.where(u < 0.25, series, closed)


def _phi_u2_primitive(u):
    # int_0^u phi(s) s^2 ds = sum_{k>=3} u^(k+3)/(k(k+3))
    u = np.asarray(u, float)
    k = np.arange(3, 61).reshape(-1, 1)
    return np.sum(u ** (k + 3) / (k * (k + 3)), axis=0)


def _theta_cell_integrals(x, w, L):
    """(flux, mass) integrals over the cells of x, with w linear in the
    frozen-L time-to-origin on each cell.

    The label map has a cube-root cusp at the origin that a linear-in-x cell
    model cannot follow; in the time-to-origin parameter the transported
    profile is smooth, and both int x^(-2/3) w dx and int w dx stay
    elementary.  Requires x < L throughout.
    """
    u = np.minimum(np.cbrt(x / L), 1.0 - 1e-12)
    theta = 3.0 * L * _phi_of_u(u)
    dtheta = np.diff(theta)
    slope = np.where(dtheta > 0, np.diff(w) / np.where(dtheta > 0, dtheta, 1.0), 0.0)
    d13 = 3.0 * np.diff(np.cbrt(x))
    dphi = np.diff(_phi_primitive(u))
    flux = np.sum(w[:-1] * d13 + slope * (9.0 * L ** (4.0 / 3.0) * dphi - theta[:-1] * d13))
    dx = np.diff(x)
    dpsi = np.diff(_phi_u2_primitive(u))
    mass = np.sum(w[:-1] * dx + slope * (9.0 * L * L * dpsi - theta[:-1] * dx))
    return float(flux), float(mass)


def _origin_split(x, L):
    # cells fully below L/8 get the time-parametrized model
    k = int(np.searchsorted(x, 0.125 * L))
    return max(min(k, len(x) - 1), 1)


def l_from_state(ens: Ensemble, w0b: float, L_guess: Optional[float] = None) -> float:
    """L from the flux balance, exact per cell for the linear representative.

    With L_guess given, cells near the origin switch to the time-to-origin
    model of the integrand, which removes the cusp bias of the linear cells.
    """
    if ens.n_alive == 0:
        raise ExtinctionError("no surviving characteristics")
    x, w = _augmented_state(ens, w0b)
    if L_guess is not None and L_guess > 0 and x[1] < 0.125 * L_guess:
        k = _origin_split(x, L_guess)
        flux, _ = _theta_cell_integrals(x[:k + 1], w[:k + 1], L_guess)
        third = (flux + cellquad.power_total(x[k:], w[k:], -2.0 / 3.0)) / (3.0 * w0b)
    else:
        third = cellquad.power_total(x, w, -2.0 / 3.0) / (3.0 * w0b)
    return float(third**3)


def _state_L(ens: Ensemble, L_guess: float) -> tuple[float, float, float]:
    """Self-consistent (L, y_b, w0b) at the ensemble's current time."""
    L = L_guess
    for _ in range(40):
        yb = boundary_label(ens, L)
        w0b = float(ens.initial.w_at(yb))
        L_new = l_from_state(ens, w0b, L_guess=L)
        if abs(L_new - L) < 1e-13 * max(L, 1.0):
            L = L_new
            break
        L = L_new
    yb = boundary_label(ens, L)
    return L, yb, float(ens.initial.w_at(yb))


@dataclass
class PicardStats:
    iterations: int
    first_correction: float
    ratios: list
    converged: bool


def picard_solve_interval(ens: Ensemble, dt: float, L0: float,
                          cfg: SolverConfig) -> tuple[Ensemble, "CubicSpline", PicardStats]:
    """Resolve L(s) on [t, t+dt] by fixed-point iteration from L == L0.

    Each sweep transports a scratch copy of the ensemble through the current
    L path and re-evaluates L at Chebyshev nodes of the interval; the map is
    a contraction for dt small compared to L.
    """
    t0 = ens.t
    j = np.arange(cfg.n_cheb + 1)
    nodes = t0 + dt * 0.5 * (1.0 - np.cos(np.pi * j / cfg.n_cheb))
    L_vals = np.full(len(nodes), L0)
    diffs = []
    scratch = None
    converged = False
    for _ in range(cfg.max_picard):
        path = CubicSpline(nodes, L_vals, bc_type="natural")
        scratch = ens.copy()
        new_vals = [L0]
        ok = True
        for a, b in zip(nodes[:-1], nodes[1:]):
            _advance(scratch, a, b, path, cfg.nsub)
            if scratch.n_alive < cfg.extinction_floor:
                raise ExtinctionError(
                    f"survivor count fell below {cfg.extinction_floor} at t={b:g}"
                )
            L_here, _, _ = _state_L(scratch, float(path(b)))
            new_vals.append(L_here)
            if not np.isfinite(L_here) or L_here <= 0:
                ok = False
                break
        if not ok:
            break
        new_vals = np.array(new_vals)
        diff = float(np.max(np.abs(new_vals - L_vals)))
        diffs.append(diff)
        L_vals = new_vals
        if diff < cfg.tol * L0:
            converged = True
            break
    ratios = [diffs[i + 1] / diffs[i] for i in range(len(diffs) - 1) if diffs[i] > 0]
    stats = PicardStats(
        iterations=len(diffs),
        first_correction=diffs[0] if diffs else 0.0,
        ratios=ratios,
        converged=converged,
    )
    return scratch, CubicSpline(nodes, L_vals, bc_type="natural"), stats


@dataclass
class Snapshot:
    t: float
    tau: float
    labels: np.ndarray
    pos: np.ndarray
    w: np.ndarray
    y_b: float
    w0b: float
    L: float
    Lambda: float
    jac: Optional[np.ndarray] = None   # dx/dy at the surviving nodes

    def profile(self) -> SurvivalProfile:
        x, w = np.concatenate(([0.0], self.pos)), np.concatenate(([self.w0b], np.minimum(self.w, self.w0b)))
        return SurvivalProfile(x, w)


@dataclass
class CoarseningTrace:
    t: list = field(default_factory=list)
    tau: list = field(default_factory=list)
    L: list = field(default_factory=list)
    Lambda: list = field(default_factory=list)
    E: list = field(default_factory=list)
    beta0: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    gamma: list = field(default_factory=list)

    def as_arrays(self) -> dict:
        return {k: np.array(getattr(self, k)) for k in
                ("t", "tau", "L", "Lambda", "E", "beta0", "mass", "gamma")}

    def save(self, path: str | Path) -> None:
        with Path(path).open("w") as f:
            f.write("t,tau,L,Lambda,E,beta0,mass,gamma\n")
            for row in zip(self.t, self.tau, self.L, self.Lambda, self.E,
                           self.beta0, self.mass, self.gamma):
                f.write(",".join(f"{v:.17g}" for v in row) + "\n")


@dataclass
class RunResult:
    trace: CoarseningTrace
    snapshots: list
    ensemble: Ensemble
    picard: list                 # PicardStats per accepted global step
    terminated: str = "t_final"

    def summary(self) -> dict:
        return {
            "T_final": self.trace.t[-1] if self.trace.t else 0.0,
            "steps": len(self.picard),
            "picard_iters_total": int(sum(p.iterations for p in self.picard)),
            "terminated": self.terminated,
        }


def _record(trace: CoarseningTrace, ens: Ensemble, L: float, yb: float, w0b: float) -> None:
    x, w = _augmented_state(ens, w0b)
    # the tail beyond the last survivor stretches with the label-map Jacobian
    tail = ens.initial._tail_mass * (float(ens.jac[-1]) if len(ens.jac) else 1.0)
    if len(x) > 1 and x[1] < 0.125 * L:
        k = _origin_split(x, L)
        _, near = _theta_cell_integrals(x[:k + 1], w[:k + 1], L)
        mass = near + float(np.trapezoid(w[k:], x[k:])) + tail
    else:
        mass = float(np.trapezoid(w, x)) + tail
    lam = mass / w0b
    energy = (2.0 / 3.0) * cellquad.power_total(x, w, -1.0 / 3.0)
    # slope of the label map at the origin: reciprocal of the transported
    # Jacobian; one-sided differences are useless here because dF/dx has a
    # cube-root cusp inherited from the drift gradient
    fp0 = 1.0 / boundary_jacobian(ens, L)
    h0b = float(ens.initial.h_at(yb))
    beta_origin = float(ens.beta0(yb)) * fp0 * mass / h0b if h0b > 0 else 0.0
    if trace.t:
        dtau = (ens.t - trace.t[-1]) * 0.5 * (1.0 / lam + 1.0 / trace.Lambda[-1])
        tau = trace.tau[-1] + dtau
    else:
        tau = 0.0
    trace.t.append(ens.t)
    trace.tau.append(tau)
    trace.L.append(L)
    trace.Lambda.append(lam)
    trace.E.append(energy)
    trace.beta0.append(beta_origin)
    trace.mass.append(mass)
    trace.gamma.append(lam / L)


def advance_global(profile: SurvivalProfile, t_final: float,
                   cfg: SolverConfig = SolverConfig(),
                   beta0: Optional[Callable] = None,
                   snapshot_times: tuple = ()) -> RunResult:
    """Evolve to t_final with steps dt = delta * L, Picard-resolving each."""
    ens = make_ensemble(profile, beta0)
    trace = CoarseningTrace()
    snapshots: list[Snapshot] = []
    picard_log: list[PicardStats] = []
    L, yb, w0b = _state_L(ens, l_from_state(ens, profile.w0))
    _record(trace, ens, L, yb, w0b)
    pending = sorted(snapshot_times)
    terminated = "t_final"

    def maybe_snapshot():
        nonlocal pending
        while pending and ens.t >= pending[0] - 1e-12:
            snapshots.append(Snapshot(
                t=ens.t, tau=trace.tau[-1], labels=ens.labels.copy(),
                pos=ens.pos.copy(), w=ens.w.copy(), y_b=yb, w0b=w0b,
                L=L, Lambda=trace.Lambda[-1], jac=ens.jac.copy(),
            ))
            pending = pending[1:]

    maybe_snapshot()
    while ens.t < t_final - 1e-12:
        dt = min(cfg.delta * L, t_final - ens.t)
        stats = None
        for _ in range(cfg.max_halvings + 1):
            try:
                advanced, _, stats = picard_solve_interval(ens, dt, L, cfg)
            except ExtinctionError:
                terminated = "extinction"
                break
            if stats.converged:
                break
            dt *= 0.5
        if terminated == "extinction" or stats is None or not stats.converged:
            if terminated != "extinction":
                terminated = "picard_failure"
            break
        ens = advanced
        picard_log.append(stats)
        L, yb, w0b = _state_L(ens, L)
        _record(trace, ens, L, yb, w0b)
        maybe_snapshot()
    return RunResult(trace=trace, snapshots=snapshots, ensemble=ens,
                     picard=picard_log, terminated=terminated)


# ---------------------------------------------------------------------------
# diagnostics on traces and snapshots


def coarsening_identity_check(trace: CoarseningTrace, floor: float = 1e-8) -> dict:
    """Centered-difference d(Lambda)/dt against the recorded beta(0,t).

    The denominator floor keeps the relative error meaningful for stationary
    data where both sides vanish identically.
    """
    a = trace.as_arrays()
    t, lam, b = a["t"], a["Lambda"], a["beta0"]
    if len(t) < 3:
        raise ValueError("trace too short")
    dl = (lam[2:] - lam[:-2]) / (t[2:] - t[:-2])
    bmid = b[1:-1]
    rel = np.abs(dl - bmid) / np.maximum(np.abs(bmid), floor)
    return {
        "max_rel_error": float(np.max(rel)),
        "frac_within_2pct": float(np.mean(rel <= 0.02)),
        "rel_errors": rel,
        "t_mid": t[1:-1],
    }


def beta_along_flow(snap: Snapshot, initial: SurvivalProfile,
                    beta0: Callable) -> tuple[BetaProfile, BetaProfile]:
    """beta(.,t) via the transported form and via direct differentiation.

    Transported form: beta(x,t) = beta0(F(x,t)) * dF/dx * h(x,t) / h0(F(x,t)),
    with F the label map and h the current tail mass.
    """
    x = np.concatenate(([0.0], snap.pos))
    y = np.concatenate(([snap.y_b], snap.labels))
    w = np.concatenate(([snap.w0b], np.minimum(snap.w, snap.w0b)))
    fp = _derivative_nonuniform(x, y)
    # the analytic tail beyond the last survivor is the initial tail mass
    # stretched by the local Jacobian dx/dy of the label map
    j_end = float(snap.jac[-1]) if snap.jac is not None and len(snap.jac) else 1.0
    h_cur = cellquad.linear_suffix(x, w) + initial._tail_mass * j_end
    h0 = initial.h_at(y)
    ok = h0 > 0
    vals = np.where(ok, beta0(y) * fp * h_cur / np.where(ok, h0, 1.0), 0.0)
    low = np.zeros(len(x), dtype=bool)
    low[-2:] = True
    # near a compact support end the node spacing collapses toward the ulp
    # of the position values, which quantizes the difference quotient dF/dx;
    # flag nodes whose adjacent gaps cannot support ~1e-7 slope accuracy
    gaps = np.diff(x)
    tiny = gaps < 1e7 * np.finfo(float).eps * np.maximum(x[1:], 1.0)
    low[1:] |= tiny
    low[:-1] |= tiny
    transported = BetaProfile(grid=x, values=vals, support_end=float(x[-1]), low_confidence=low)
    direct = beta_from_profile(snap.profile())
    return transported, direct


def g_profile(snap: Snapshot) -> tuple[np.ndarray, np.ndarray]:
    """The damping rate g(x,t) of the beta transport equation at survivor nodes.

    g = (1/(3 L^(1/3))) [x^(-2/3) - int_x x'^(-2/3) w / int_x w]; nonnegative
    because the kernel is decreasing.
    """
    x, w = snap.pos, np.minimum(snap.w, snap.w0b)
    S = cellquad.power_suffix(x, w, -2.0 / 3.0)
    H = cellquad.linear_suffix(x, w)
    ok = H > 0
    g = np.where(ok, x ** (-2.0 / 3.0) - S / np.where(ok, H, 1.0), 0.0)
    g = g / (3.0 * np.cbrt(snap.L))
    return x[ok], g[ok]


def normalized_view(snap: Snapshot) -> tuple[np.ndarray, np.ndarray]:
    """(y, w*) with y = x/Lambda and w* = Lambda * w; w*(0) = mass."""
    y = np.concatenate(([0.0], snap.pos)) / snap.Lambda
    ws = snap.Lambda * np.concatenate(([snap.w0b], np.minimum(snap.w, snap.w0b)))
    return y, ws


def dyadic_intervals(y: np.ndarray, w_star: np.ndarray, n_levels: int = 14) -> np.ndarray:
    """Lengths |I_N| between the levels where w* falls through 2^(-N).

    Returns NaN where a level is unresolved by the data.
    """
    w0 = w_star[0]
    out = np.full(n_levels, np.nan)
    levels = w0 * 2.0 ** (-np.arange(n_levels + 1, dtype=float))
    ys = np.interp(-levels, -w_star, y, left=np.nan, right=np.nan)
    for n in range(n_levels):
        if np.isfinite(ys[n]) and np.isfinite(ys[n + 1]):
            out[n] = ys[n + 1] - ys[n]
    return out


def dyadic_report(snaps: list, n_levels: int = 14) -> dict:
    """Interval lengths and adjacent ratios per snapshot, in rescaled time."""
    rows = []
    for snap in snaps:
        y, ws = normalized_view(snap)
        lens = dyadic_intervals(y, ws, n_levels)
        rows.append({"tau": snap.tau, "lengths": lens,
                     "ratios": lens[:-1] / lens[1:]})
    return {"snapshots": rows}


def save_summary(result: RunResult, path: str | Path, scenario: str = "",
                 violations: Optional[list] = None) -> None:
    data = result.summary()
    data["model"] = "lsw"
    data["scenario"] = scenario
    data["violations"] = violations or []
    Path(path).write_text(json.dumps(data, indent=2) + "\n")
