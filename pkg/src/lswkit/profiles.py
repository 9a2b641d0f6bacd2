"""Survival functions on nonuniform grids, their tail mass and beta transform.

The central object is :class:`SurvivalProfile`: a nonincreasing integrable
function ``w`` sampled on a strictly increasing grid starting at 0, extended
beyond the last node by an analytic tail model (compact cutoff, exponential
or power decay).  All moments and singular integrals are evaluated with the
exact per-cell formulas from :mod:`lswkit.cellquad`, so identities such as
mass conservation hold to rounding error for the piecewise-linear
representative.

The beta function of a profile is ``beta = h'' h / (h')**2`` where ``h`` is
the tail mass of ``w``; it is the contraction-rate observable driving every
bound in the rest of the package.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import special

from . import cellquad
from .errors import (
    DegenerateProfileError,
    InconsistentBetaError,
    NonIntegrableTailError,
    UnsupportedOperationError,
)

FMT = "%.17g"


@dataclass(frozen=True)
class TailModel:
    """Analytic continuation of a profile beyond its last grid node."""

    kind: str  # "compact" | "exponential" | "power"
    param: float = 0.0  # decay rate (exponential) or exponent p (power)

    def __post_init__(self):
        if self.kind not in ("compact", "exponential", "power"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == "exponential" and not self.param > 0:
            raise NonIntegrableTailError("exponential tail requires rate > 0")
        if self.kind == "power" and not self.param > 1:
            raise NonIntegrableTailError("power tail requires exponent p > 1")

    @classmethod
    def compact(cls) -> "TailModel":
        return cls("compact")

    @classmethod
    def exponential(cls, rate: float) -> "TailModel":
        return cls("exponential", float(rate))

    @classmethod
    def power(cls, p: float) -> "TailModel":
        return cls("power", float(p))


def _tail_power_integral(tail: TailModel, xm: float, wm: float, s: float) -> float:
    """Exact integral of x^s * w(x) over (xm, infinity) for the tail model."""
    if tail.kind == "compact" or wm == 0.0:
        return 0.0
    if tail.kind == "exponential":
        lam = tail.param
        # wm * exp(lam*xm) * Gamma(s+1, lam*xm) / lam^{s+1}
        u = lam * xm
        g = special.gammaincc(s + 1.0, u) * special.gamma(s + 1.0)
        return float(wm * np.exp(u) * g / lam ** (s + 1.0))
    p = tail.param
    if p <= s + 1.0:
        raise NonIntegrableTailError(
            f"power tail p={p} cannot support moment with kernel exponent {s}"
        )
    return float(wm * xm ** (s + 1.0) / (p - s - 1.0))


class SurvivalProfile:
    """Nonincreasing integrable w on [0, inf) with piecewise-linear body.

    Immutable after construction; all operations are pure.
    """

    __slots__ = ("grid", "values", "tail", "__dict__")

    def __init__(self, grid, values, tail: TailModel = TailModel.compact()):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 2:
            raise DegenerateProfileError("grid and values must be matching 1-d arrays")
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise DegenerateProfileError("grid must be strictly increasing from 0")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DegenerateProfileError("values must be finite and nonnegative")
        if np.any(np.diff(values) > 1e-12 * values[0]):
            raise DegenerateProfileError("values must be nonincreasing")
        if not values[0] > 0:
            raise DegenerateProfileError("w(0) must be positive")
        values = np.minimum.accumulate(values)  # scrub rounding-level increases
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tail", tail)
        if tail.kind != "compact" and values[-1] == 0.0:
            object.__setattr__(self, "tail", TailModel.compact())

    # -- basic geometry -------------------------------------------------

    @property
    def w0(self) -> float:
        return float(self.values[0])

    @cached_property
    def sup_x(self) -> float:
        """The essential sup of the associated random variable, ||X||_inf."""
        if self.tail.kind != "compact":
            return np.inf
        nz = np.nonzero(self.values > 0)[0]
        last = nz[-1]
        return float(self.grid[min(last + 1, len(self.grid) - 1)]) if self.values[-1] == 0 else float(self.grid[-1])

    @cached_property
    def _tail_mass(self) -> float:
        xm, wm = float(self.grid[-1]), float(self.values[-1])
        if self.tail.kind == "compact" or wm == 0.0:
            return 0.0
        if self.tail.kind == "exponential":
            return wm / self.tail.param
        return wm * xm / (self.tail.param - 1.0)

    @cached_property
    def _suffix_mass(self) -> np.ndarray:
        return cellquad.linear_suffix(self.grid, self.values) + self._tail_mass

    @cached_property
    def mass(self) -> float:
        """Total integral of w, i.e. the first moment of the cluster density."""
        return float(self._suffix_mass[0])

    @cached_property
    def mean(self) -> float:
        """<X> for the variable with survival function w/w(0)."""
        return self.mass / self.w0

    def w_at(self, x):
        """Evaluate w (piecewise-linear body plus analytic tail)."""
        x = np.asarray(x, dtype=float)
        body = np.interp(x, self.grid, self.values)
        xm, wm = self.grid[-1], self.values[-1]
        if self.tail.kind == "exponential":
            tail = wm * np.exp(-self.tail.param * (x - xm))
        elif self.tail.kind == "power":
            tail = wm * np.power(xm / np.maximum(x, xm), self.tail.param)
        else:
            tail = np.zeros_like(body)
        out = np.where(x > xm, tail, body)
        return float(out) if out.ndim == 0 else out

    def h_at(self, x):
        """Tail mass h(x) = integral of w over (x, infinity); exact per cell."""
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, len(self.grid) - 2)
        x0 = self.grid[idx]
        x1 = self.grid[idx + 1]
        w0 = self.values[idx]
        wx = np.interp(np.minimum(x, self.grid[-1]), self.grid, self.values)
        # remaining piece of the containing cell
        part = 0.5 * (wx + self.values[idx + 1]) * (x1 - np.minimum(x, x1))
        body = part + self._suffix_mass[idx + 1] - self._tail_mass
        xm, wm = self.grid[-1], self.values[-1]
        if self.tail.kind == "exponential":
            lam = self.tail.param
            tail = np.where(x > xm, wm * np.exp(-lam * (x - xm)) / lam, self._tail_mass)
            out = np.where(x > xm, tail, body + self._tail_mass)
        elif self.tail.kind == "power":
            p = self.tail.param
            tail = np.where(x > xm, wm * xm ** p * np.power(np.maximum(x, xm), 1.0 - p) / (p - 1.0), self._tail_mass)
            out = np.where(x > xm, tail, body + self._tail_mass)
        else:
            out = np.where(x > xm, 0.0, body)
        return float(out) if out.ndim == 0 else out

    def survival(self, x):
        return self.w_at(x) / self.w0

    def quantile(self, q: float) -> float:
        """Largest x with w(x)/w(0) >= q (exact piecewise-linear inversion)."""
        if not 0 < q <= 1:
            raise ValueError("quantile level must be in (0, 1]")
        target = q * self.w0
        if target <= self.values[-1]:
            xm, wm = float(self.grid[-1]), float(self.values[-1])
            if self.tail.kind == "exponential":
                return xm + np.log(wm / target) / self.tail.param
            if self.tail.kind == "power":
                return xm * (wm / target) ** (1.0 / self.tail.param)
            return xm
        # values nonincreasing: search on the reversed array
        rev = self.values[::-1]
        j = len(self.values) - 1 - np.searchsorted(rev, target, side="left")
        j = int(np.clip(j, 0, len(self.values) - 2))
        w0, w1 = self.values[j], self.values[j + 1]
        if w1 == w0:
            return float(self.grid[j + 1])
        frac = (w0 - target) / (w0 - w1)
        return float(self.grid[j] + frac * (self.grid[j + 1] - self.grid[j]))

    # -- integrals ------------------------------------------------------

    def power_integral(self, s: float) -> float:
        """Exact integral of x^s * w(x) dx over (0, infinity), s > -1."""
        body = cellquad.power_total(self.grid, self.values, s)
        return body + _tail_power_integral(self.tail, float(self.grid[-1]), float(self.values[-1]), s)

    def partial_mass(self, y: float) -> float:
        """Integral of w over (0, y)."""
        return self.mass - self.h_at(y)

    def moment(self, alpha: float) -> float:
        """<X^alpha> for alpha in (0, 1]; singular cell at 0 in closed form."""
        if not 0 < alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if alpha == 1.0:
            return self.mean
        return alpha * self.power_integral(alpha - 1.0) / self.w0

    def energy(self) -> float:
        """E = integral x^{2/3} c dx, via the integrated-by-parts form."""
        return (2.0 / 3.0) * self.power_integral(-1.0 / 3.0)

    def dilate(self, lam: float) -> "SurvivalProfile":
        """Profile of the dilated variable lam * X (same values, scaled grid)."""
        if not lam > 0:
            raise ValueError("dilation factor must be positive")
        tail = self.tail
        if tail.kind == "exponential":
            tail = TailModel.exponential(tail.param / lam)
        return SurvivalProfile(self.grid * lam, self.values, tail)

    def scale_values(self, c: float) -> "SurvivalProfile":
        return SurvivalProfile(self.grid, self.values * c, self.tail)

    def view(self) -> "RandomVariableView":
        return RandomVariableView(mean=self.mean, sup=self.sup_x, quantile=self.quantile)

    # -- serialization ---------------------------------------------------

    def save(self, csv_path: str | Path) -> None:
        csv_path = Path(csv_path)
        with csv_path.open("w") as f:
            f.write("x,w\n")
            for x, w in zip(self.grid, self.values):
                f.write(f"{x:.17g},{w:.17g}\n")
        sidecar = {
            "tail_model": self.tail.kind,
            "params": {"param": self.tail.param},
            "mass": self.mass,
        }
        csv_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")

    @classmethod
    def load(cls, csv_path: str | Path) -> "SurvivalProfile":
        csv_path = Path(csv_path)
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
        sidecar_path = csv_path.with_suffix(".json")
        tail = TailModel.compact()
        if sidecar_path.exists():
            meta = json.loads(sidecar_path.read_text())
            tail = TailModel(meta["tail_model"], float(meta["params"]["param"]))
        return cls(data[:, 0], data[:, 1], tail)


@dataclass(frozen=True)
class RandomVariableView:
    """Moment/quantile view of the variable X with P(X > x) = w(x)/w(0)."""

    mean: float
    sup: float
    quantile: object


@dataclass(frozen=True)
class TailMass:
    """Sampled tail mass h of a profile, h(x) = integral of w beyond x."""

    grid: np.ndarray
    values: np.ndarray
    profile: SurvivalProfile

    def h_at(self, x):
        return self.profile.h_at(x)


@dataclass(frozen=True)
class BetaProfile:
    """Sampled beta function on [0, ||X||_inf)."""

    grid: np.ndarray
    values: np.ndarray
    support_end: float  # ||X||_inf of the source variable (may be inf)
    low_confidence: np.ndarray  # mask: endpoint nodes where h'' estimation degenerates

    @property
    def sup(self) -> float:
        return float(np.max(self.values[~self.low_confidence]))

    @property
    def inf(self) -> float:
        return float(np.min(self.values[~self.low_confidence]))

    def at(self, x):
        return np.interp(x, self.grid, self.values)

    def save(self, csv_path: str | Path) -> None:
        with Path(csv_path).open("w") as f:
            f.write("x,beta\n")
            for x, b in zip(self.grid, self.values):
                f.write(f"{x:.17g},{b:.17g}\n")


@dataclass(frozen=True)
class RegularVariationEstimate:
    exponent: float
    residual: float
    oscillatory: bool
    n_nodes: int


@dataclass(frozen=True)
class FisherInformation:
    direct: float          # integral of (h')^2 / h
    beta_form: float       # integral of (h'^2/h)(1-beta) plus boundary term
    boundary_term: float   # -h'(0) = w(0), our convention for profiles on [0, inf)

    @property
    def discrepancy(self) -> float:
        return abs(self.direct - self.beta_form) / max(abs(self.direct), 1e-300)


# ---------------------------------------------------------------------------
# operations


def integrate_tail(profile: SurvivalProfile) -> TailMass:
    """Tail mass h on the profile grid; exact for the piecewise-linear body."""
    h = profile.h_at(profile.grid)
    return TailMass(grid=profile.grid, values=h, profile=profile)


def _derivative_nonuniform(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Three-point derivative on a nonuniform grid, one-sided at the ends."""
    d = np.empty_like(y)
    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    d[1:-1] = (
        -hp / (hm * (hm + hp)) * y[:-2]
        + (hp - hm) / (hm * hp) * y[1:-1]
        + hm / (hp * (hm + hp)) * y[2:]
    )
    h0, h1 = x[1] - x[0], x[2] - x[1]
    d[0] = (
        -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0]
        + (h0 + h1) / (h0 * h1) * y[1]
        - h0 / (h1 * (h0 + h1)) * y[2]
    )
    hn, hn1 = x[-1] - x[-2], x[-2] - x[-3]
    d[-1] = (
        (2 * hn + hn1) / (hn * (hn + hn1)) * y[-1]
        - (hn + hn1) / (hn * hn1) * y[-2]
        + hn / (hn1 * (hn + hn1)) * y[-3]
    )
    return d


def beta_from_profile(profile: SurvivalProfile) -> BetaProfile:
    """beta = h'' h / (h')^2 with h' = -w exact and h'' by finite differences."""
    w = profile.values
    pos = np.nonzero(w > 0)[0]
    if len(pos) < 3:
        raise DegenerateProfileError("need at least 3 nodes with w > 0 to estimate beta")
    last = pos[-1]
    if np.any(w[: last + 1] <= 0):
        raise DegenerateProfileError("w vanishes inside its support")
    x = profile.grid[: last + 1]
    wv = w[: last + 1]
    h = profile.h_at(x)
    c = -_derivative_nonuniform(x, wv)  # h'' = c, the cluster density
    beta = c * h / wv**2
    # endpoint nodes: one-sided h'' estimate meets the modeled tail, so the
    # quotient is unreliable there for every tail kind
    low = np.zeros(len(x), dtype=bool)
    low[-2:] = True
    # nodes packed tighter than ~1e7 ulp: the difference quotient is
    # quantized by position rounding (deep quantile nodes near a support
    # end with a fractional-power profile collapse onto each other)
    gaps = np.diff(x)
    tiny = gaps < 1e7 * np.finfo(float).eps * np.maximum(np.abs(x[1:]), 1.0)
    low[1:] |= tiny
    low[:-1] |= tiny
    return BetaProfile(grid=x, values=beta, support_end=profile.sup_x, low_confidence=low)


def beta_envelope(profile: SurvivalProfile, beta: Optional[BetaProfile] = None,
                  level: float = 2.0**-8) -> tuple[float, float]:
    """(inf, sup) of beta over the whole support, tail included.

    Grid nodes below ``level * w(0)`` are dropped: the finite-difference
    estimate there is dominated by grid-transition noise.  The analytic tail
    carries a known constant beta (1 for exponential decay, p/(p-1) for a
    power tail), which is where the supremum typically lives.
    """
    if beta is None:
        beta = beta_from_profile(profile)
    nb = len(beta.grid)
    resolved = (profile.values[:nb] >= profile.w0 * level) & ~beta.low_confidence
    vals = beta.values[resolved]
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if profile.tail.kind == "exponential" and profile.values[-1] > 0:
        lo, hi = min(lo, 1.0), max(hi, 1.0)
    elif profile.tail.kind == "power" and profile.values[-1] > 0:
        bt = profile.tail.param / (profile.tail.param - 1.0)
        lo, hi = min(lo, bt), max(hi, bt)
    return lo, hi


def profile_from_beta(beta: BetaProfile, mean: float) -> SurvivalProfile:
    """Reconstruct w from its beta function and mean.

    Uses the explicit survival formula: with D(x) = mean - x + int_0^x beta,
    w(x)/w(0) = mean / D(x) * exp(-int_0^x dz / D(z)).  The reciprocal integral
    is exact for piecewise-linear D, which keeps the reconstruction stable as
    D -> 0 at a compact support end.
    """
    if not mean > 0:
        raise ValueError("mean must be positive")
    x = np.asarray(beta.grid, dtype=float)
    b = np.asarray(beta.values, dtype=float)
    if np.any(b < -1e-12):
        raise InconsistentBetaError("beta must be nonnegative")
    bint = np.concatenate(([0.0], np.cumsum(0.5 * (b[:-1] + b[1:]) * np.diff(x))))
    d = mean - x + bint
    if d[0] <= 0 or np.any(d[:-1] <= 0):
        k = int(np.nonzero(d <= 0)[0][0])
        raise InconsistentBetaError(
            f"denominator <X> - x + int(beta) vanishes at grid node {k} (x={x[k]:g}) "
            "before the declared support end"
        )
    grid = x
    if d[-1] <= 0:
        grid = x.copy()
        grid[-1] = x[-2] + (x[-1] - x[-2]) * d[-2] / (d[-2] - d[-1]) * (1 - 1e-12)
        d = d.copy()
        d[-1] = mean - grid[-1] + bint[-2] + 0.5 * (b[-2] + b[-1]) * (grid[-1] - x[-2])
    q = cellquad.reciprocal_linear_cumulative(grid, d)
    w = mean / d * np.exp(-q)
    b_end = b[-1]
    if np.isfinite(beta.support_end) or d[-1] < 1e-9 * mean:
        tail = TailModel.compact()
        if w[-1] > 1e-9 * w[0]:
            # extrapolate the support end where D would vanish
            x_end = grid[-1] + d[-1] / max(1.0 - b_end, 1e-9)
            grid = np.append(grid, x_end)
            w = np.append(w, 0.0)
    elif b_end > 1.05:
        tail = TailModel.power(b_end / (b_end - 1.0))
    else:
        tail = TailModel.exponential(1.0 / d[-1])
    return SurvivalProfile(grid, w, tail)


def moment(profile: SurvivalProfile, alpha: float) -> float:
    return profile.moment(alpha)


def energy(profile: SurvivalProfile) -> float:
    return profile.energy()


def regular_variation_exponent(
    profile: SurvivalProfile,
    decades: float = 3.0,
    min_nodes: int = 30,
    oscillation_threshold: float = 0.05,
) -> RegularVariationEstimate:
    """Estimate the regular-variation exponent of w at its compact support end.

    Regresses k(xi) = -log P(X > x) against xi = -log(||X||_inf - x) over the
    last few decades of xi; the residual is the RMS deviation of local slopes
    from the fitted slope, which flags oscillatory (non-convergent) tails.
    """
    if not np.isfinite(profile.sup_x):
        raise UnsupportedOperationError("regular variation requires compact support")
    a = profile.sup_x
    mask = (profile.values > 0) & (profile.grid < a) & (profile.grid > 0)
    x = profile.grid[mask]
    s = profile.values[mask] / profile.w0
    xi = -np.log(a - x)
    k = -np.log(s)
    order = np.argsort(xi)
    xi, k = xi[order], k[order]
    lo = xi[-1] - decades * np.log(10.0)
    win = xi >= lo
    if np.count_nonzero(win) < min_nodes:
        win = np.ones(len(xi), dtype=bool)
    xi, k = xi[win], k[win]
    if len(xi) < 3:
        raise UnsupportedOperationError("too few resolvable nodes near the support end")
    slope, _ = np.polyfit(xi, k, 1)
    local = np.diff(k) / np.diff(xi)
    residual = float(np.sqrt(np.mean((local - slope) ** 2)))
    return RegularVariationEstimate(
        exponent=float(max(slope, 0.0)),
        residual=residual,
        oscillatory=residual > oscillation_threshold,
        n_nodes=len(xi),
    )


def fisher_information(tail: TailMass) -> FisherInformation:
    """Fisher information of h in both scalar forms.

    Direct form: J = int (h')^2 / h.  Alternative form: J = int (h'^2/h)(1-beta)
    plus the boundary term -h'(0) = w(0) (our convention for profiles supported
    on [0, inf): the integral of h'' telescopes to -h'(0) when h' -> 0 at the
    support end).
    """
    prof = tail.profile
    w = prof.values
    h = tail.values
    pos = h > 0
    if not pos[0]:
        raise DegenerateProfileError("h must be positive at 0")
    x = prof.grid[pos]
    f = w[pos] ** 2 / h[pos]
    if np.count_nonzero(~pos) and len(x) >= 2:
        # extrapolate the 0/0 endpoint of w^2/h from the last two interior nodes
        x = np.append(x, prof.grid[~pos][0])
        f = np.append(f, max(f[-1] + (f[-1] - f[-2]), 0.0))
    body = float(np.trapezoid(f, x))
    xm, wm = float(prof.grid[-1]), float(prof.values[-1])
    tail_direct = 0.0
    tail_beta = 0.0
    if prof.tail.kind == "exponential" and wm > 0:
        tail_direct = wm  # int lam*wm*exp(-lam(x-xm)) dx
        # beta = 1 on an exponential tail: no contribution to the beta form
    elif prof.tail.kind == "power" and wm > 0:
        p = prof.tail.param
        tail_direct = wm * (p - 1.0) / p
        tail_beta = -wm / p  # beta = p/(p-1) on the tail
    direct = body + tail_direct
    beta = beta_from_profile(prof)
    fb = np.interp(beta.grid, x, f) * (1.0 - beta.values)
    body_beta = float(np.trapezoid(fb, beta.grid))
    boundary = prof.w0
    return FisherInformation(
        direct=direct,
        beta_form=body_beta + tail_beta + boundary,
        boundary_term=boundary,
    )
