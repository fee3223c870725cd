"""Plateau calculus for degree-one circle lifts: monotone envelopes, the
sup-window interpolation between them, plateau detection, and the forced
(fibre-wise) version of the interpolated map.

For a sampled lift G the two envelopes are
    G_plus(x)  = sup of G over [x-1, x]      (smallest monotone majorant)
    G_minus(x) = inf of G over [x, x+1]      (largest monotone minorant)
and the interpolation at parameter t in [0,1] is
    Phi_t(x) = sup of G over [x-t, x],   G_t = (Phi_t)_minus,
which runs monotonically from G_minus at t=0 to G_plus at t=1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .circlecore import (
    DEFAULT_GRID_M,
    TWO_PI,
    FibreFamily,
    GridFunction,
    IntervalSetMod1,
    canonicalize_intervals,
    interp_lift,
    sliding_extremum,
)
from .errors import InvalidArgumentError, NotMonotoneError

#: per-edge rise below which consecutive grid samples count as flat
PLATEAU_RISE_TOL = 1e-9

#: minimum number of flat grid edges for a run to count as a plateau
PLATEAU_MIN_CELLS = 4


@dataclass(frozen=True)
class EnvelopePair:
    minus: GridFunction
    plus: GridFunction
    source: GridFunction


@dataclass(frozen=True)
class HomotopyMap:
    """The monotone interpolant G_t on a grid, with its plateau set.

    theta is set when this is a single fibre of a forced family (the forcing
    constant is baked into the sampled values).
    """

    t: float
    g_t: GridFunction
    phi_t: GridFunction
    plateaus: IntervalSetMod1
    theta: float | None = None

    def __call__(self, x: float) -> float:
        return interp_lift(self.g_t.values, self.g_t.m, x)

    def fibre_lift(self, theta, x):
        # theta is carried for interface symmetry; the grid already includes it
        return self(x)


def envelope(g: GridFunction, sign: str) -> GridFunction:
    """Monotone envelope of a sampled lift; sign is "plus" or "minus"."""
    if sign == "plus":
        return sliding_extremum(g, 1.0, "sup")
    if sign == "minus":
        return sliding_extremum(g, 1.0, "inf")
    raise InvalidArgumentError(f"sign must be 'plus' or 'minus', got {sign!r}")


def envelope_pair(g: GridFunction) -> EnvelopePair:
    return EnvelopePair(minus=envelope(g, "minus"), plus=envelope(g, "plus"), source=g)


def phi_t(g: GridFunction, t: float) -> GridFunction:
    if not (0.0 <= t <= 1.0):
        raise InvalidArgumentError("homotopy parameter t must lie in [0, 1]")
    if t == 0.0:
        return g
    return sliding_extremum(g, t, "sup")


def detect_plateaus(
    g_t: GridFunction,
    tol: float = PLATEAU_RISE_TOL,
    min_cells: int = PLATEAU_MIN_CELLS,
) -> IntervalSetMod1:
    """Maximal circular grid runs on which the sampled map is flat.

    A grid edge is flat when its rise is <= tol; runs shorter than min_cells
    edges are discarded as grid noise. Windowed extrema reuse identical
    samples across a true plateau, so genuine flats have exactly zero rise
    and a tight tolerance keeps endpoint smear at the one-cell level.
    """
    if g_t.monotone_violation() > PLATEAU_RISE_TOL:
        raise NotMonotoneError("plateau detection requires a monotone grid")
    v, m = g_t.values, g_t.m
    rises = np.empty(m)
    rises[: m - 1] = np.diff(v)
    rises[m - 1] = (v[0] + 1.0) - v[m - 1]
    flat = rises <= tol
    if flat.all():
        # a degree-one lift cannot be globally flat; treat as one full arc
        return IntervalSetMod1(((0.0, 1.0),))
    if not flat.any():
        return IntervalSetMod1()
    # scan circularly starting just past a non-flat edge
    start = int(np.argmin(flat))
    arcs = []
    run_start = None
    for offset in range(1, m + 1):
        i = (start + offset) % m
        if flat[i]:
            if run_start is None:
                run_start = i
                run_len = 1
            else:
                run_len += 1
        else:
            if run_start is not None and run_len >= min_cells:
                arcs.append((run_start / m, (run_start + run_len) / m))
            run_start = None
    if run_start is not None and run_len >= min_cells:
        arcs.append((run_start / m, (run_start + run_len) / m))
    if not arcs:
        return IntervalSetMod1()
    return canonicalize_intervals(arcs)


def homotopy_map(g: GridFunction, t: float, tol: float = PLATEAU_RISE_TOL) -> HomotopyMap:
    """Build G_t = (Phi_t)_minus with its detected plateau set."""
    phi = phi_t(g, t)
    gt = envelope(phi, "minus")
    plateaus = detect_plateaus(gt, tol=tol)
    return HomotopyMap(t=t, g_t=gt, phi_t=phi, plateaus=plateaus)


# ---------------------------------------------------------------------------
# exact plateau data for the Arnold family
# ---------------------------------------------------------------------------


def arnold_plateau_exact(tau: float, alpha: float, t: float):
    """Closed-form-grade plateau data (height c, endpoints p < q) of the
    unforced Arnold interpolant at parameter t, or None when the one-hump
    bracketing does not apply (very large alpha or degenerate t).

    Uses G(x) = x + tau + (alpha/2pi) sin(2pi x), whose unique interior local
    max sits at x_M = arccos(-1/alpha)/2pi. The interpolant equals G outside
    [p, q] and the constant c on it.
    """
    if alpha <= 1.0 or t <= 0.0:
        return None

    def G(x):
        return x + tau + (alpha / TWO_PI) * math.sin(TWO_PI * x)

    x_M = math.acos(-1.0 / alpha) / TWO_PI
    x_m = 1.0 - x_M
    try:
        res = minimize_scalar(
            lambda z: max(G(z), G(z - t)),
            bounds=(x_M + t, x_M + 1.0),
            method="bounded",
            options={"xatol": 1e-15},
        )
        c = min(float(res.fun), G(x_M))
        if c >= G(x_M) - 1e-15:
            c = G(x_M)
            p = x_M
        else:
            # increasing branch through [x_M - 1 + eps, x_M]
            p = brentq(lambda x: G(x) - c, x_m - 1.0, x_M, xtol=1e-15)
        q = brentq(lambda x: G(x) - c, x_m, x_M + 1.0, xtol=1e-15)
    except ValueError:
        return None
    if not (p < q and q - p < 1.0):
        return None
    return float(c), float(p), float(q)


def arnold_gt_exact(c: float, p: float, q: float, tau: float, alpha: float, x: float) -> float:
    """Evaluate the unforced Arnold interpolant exactly: G off [p, q], the
    plateau constant c on it (degree-one periodic)."""
    k = math.floor(x - p)
    r = x - k  # r in [p, p+1)
    if r <= q:
        return c + k
    return r + tau + (alpha / TWO_PI) * math.sin(TWO_PI * r) + k


def arnold_gt_exact_inverse(
    c: float, p: float, q: float, tau: float, alpha: float, y: float
) -> float:
    """Leftmost x with the exact interpolant >= y (bisection to float limit)."""

    def gt(x):
        return arnold_gt_exact(c, p, q, tau, alpha, x)

    lo = y - (tau + alpha / TWO_PI) - 2.0
    hi = y - tau + alpha / TWO_PI + 2.0
    while gt(lo) >= y:
        lo -= 1.0
    while gt(hi) < y:
        hi += 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if gt(mid) >= y:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# forced maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ForcedMonotoneMap:
    """Fibre-wise monotone interpolant of a forced family.

    For the Arnold family the additive forcing commutes with the windowed
    extrema, so the unforced grid is computed once and every fibre is a
    constant shift of it; the plateau set is theta-independent.
    """

    family: FibreFamily
    t: float
    m: int
    base: HomotopyMap
    exact: tuple[float, float, float] | None = None

    @property
    def plateaus(self) -> IntervalSetMod1:
        return self.base.plateaus

    def forcing(self, theta: float) -> float:
        if self.family.kind == "arnold":
            return self.family.beta * math.sin(TWO_PI * theta)
        return 0.0

    def fibre_lift(self, theta: float, x: float) -> float:
        if self.family.kind == "arnold":
            return self.base(x) + self.forcing(theta)
        return self.fibre_homotopy(theta)(x)

    def exact_fibre_lift(self, theta: float, x: float) -> float:
        c, p, q = self.exact
        return (
            arnold_gt_exact(c, p, q, self.family.tau, self.family.alpha, x)
            + self.forcing(theta)
        )

    def fibre_homotopy(self, theta: float) -> HomotopyMap:
        if self.family.kind == "arnold":
            shift = self.forcing(theta)
            g = self.base.g_t
            phi = self.base.phi_t
            return HomotopyMap(
                t=self.t,
                g_t=GridFunction(g.m, g.values + shift, lipschitz=g.lipschitz),
                phi_t=GridFunction(phi.m, phi.values + shift, lipschitz=phi.lipschitz),
                plateaus=self.base.plateaus,
                theta=theta,
            )
        fibre_grid = self.family.fibre_grid(theta, self.m)
        hm = homotopy_map(fibre_grid, self.t)
        return HomotopyMap(
            t=hm.t, g_t=hm.g_t, phi_t=hm.phi_t, plateaus=hm.plateaus, theta=theta
        )


def forced_map(family: FibreFamily, t: float, m: int = DEFAULT_GRID_M) -> ForcedMonotoneMap:
    if not (0.0 <= t <= 1.0):
        raise InvalidArgumentError("homotopy parameter t must lie in [0, 1]")
    base = homotopy_map(family.unforced_grid(m), t)
    exact = None
    if family.kind == "arnold" and family.alpha > 1.0 and t > 0.0:
        exact = arnold_plateau_exact(family.tau, family.alpha, t)
    return ForcedMonotoneMap(family=family, t=t, m=m, base=base, exact=exact)


def gt_values(fmap: ForcedMonotoneMap, x: np.ndarray) -> np.ndarray:
    """Vectorized lift values of the unforced interpolant (exact branch when
    available, grid interpolation otherwise)."""
    x = np.asarray(x, dtype=float)
    if fmap.exact is not None and fmap.family.kind == "arnold":
        c, p, q = fmap.exact
        tau, alpha = fmap.family.tau, fmap.family.alpha
        k = np.floor(x - p)
        r = x - k
        smooth = r + tau + (alpha / TWO_PI) * np.sin(TWO_PI * r)
        return np.where(r <= q, c + k, smooth + k)
    gv = fmap.base.g_t.values
    m = fmap.m
    k = np.floor(x)
    r = x - k
    s = r * m
    j = s.astype(np.int64)
    np.clip(j, 0, m - 1, out=j)
    frac = s - j
    gv_ext = np.concatenate([gv, [gv[0] + 1.0]])
    return gv_ext[j] + frac * (gv_ext[j + 1] - gv_ext[j]) + k
