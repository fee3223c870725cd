"""Circle arithmetic substrate: mod-1 coordinates, half-open arc algebra,
grid-sampled lifts, windowed extrema, and monotone inversion.

Everything here is pure and immutable; the dynamical modules build on it.
Arcs are half-open [a, b) so unions and complements are exact set operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .errors import InvalidArgumentError, NotMonotoneError

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0

#: default x-grid resolution per fibre
DEFAULT_GRID_M = 1 << 14

#: tolerance for real-equality comparisons unless an operation states otherwise
EQ_TOL = 1e-9

TWO_PI = 2.0 * math.pi


def wrap_mod1(x: float) -> float:
    """Reduce a real to the fundamental domain [0, 1)."""
    if not math.isfinite(x):
        raise InvalidArgumentError(f"wrap_mod1: non-finite input {x!r}")
    r = x - math.floor(x)
    if r >= 1.0:  # possible when x is a tiny negative number
        r -= 1.0
    return r


def circle_distance(a: float, b: float) -> float:
    """Shorter-arc distance on the circle."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def is_rational_surrogate(omega: float, max_denominator: int = 10**6) -> bool:
    """True when the float is exactly a rational with small denominator.

    Used to reject driving frequencies like 0.5 that are rational not merely
    as every float is, but at a denominator the dynamics would lock onto.
    """
    f = Fraction(omega)
    return f.limit_denominator(max_denominator) == f


# ---------------------------------------------------------------------------
# interval sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSetMod1:
    """Canonical finite union of disjoint half-open arcs [a, b) on the circle.

    Invariants: 0 <= a_i < b_i <= 1, sorted by a_i, no adjacency or overlap.
    """

    arcs: tuple[tuple[float, float], ...] = ()

    def measure(self) -> float:
        return float(sum(b - a for a, b in self.arcs))

    def is_empty(self) -> bool:
        return not self.arcs

    def contains(self, x: float) -> bool:
        x = wrap_mod1(x)
        for a, b in self.arcs:
            if a <= x < b:
                return True
        return False

    def largest_arc(self) -> tuple[float, float]:
        """Widest arc, merging across the 0/1 seam when both sides touch it."""
        if not self.arcs:
            raise InvalidArgumentError("largest_arc of empty set")
        arcs = list(self.arcs)
        # a wrapped arc appears as [0, b0) + [a_last, 1); report it joined
        if len(arcs) >= 2 and arcs[0][0] == 0.0 and arcs[-1][1] == 1.0:
            a, b = arcs[-1][0], arcs[0][1] + 1.0
            joined = [(a, b)] + arcs[1:-1]
            best = max(joined, key=lambda ab: ab[1] - ab[0])
            return best
        return max(arcs, key=lambda ab: ab[1] - ab[0])


def canonicalize_intervals(raw: Iterable[tuple[float, float]]) -> IntervalSetMod1:
    """Normalise raw (a, b) pairs (interpreted mod 1, b - a in (0, 1]) into
    sorted disjoint half-open arcs; arcs crossing 1 are split."""
    pieces: list[tuple[float, float]] = []
    for a, b in raw:
        width = b - a
        if not (0.0 < width <= 1.0 + 1e-15):
            raise InvalidArgumentError(
                f"canonicalize_intervals: pair ({a}, {b}) must satisfy 0 < b - a <= 1"
            )
        if width >= 1.0 - 1e-15 and width <= 1.0 + 1e-15:
            return IntervalSetMod1(((0.0, 1.0),))
        a0 = wrap_mod1(a)
        b0 = a0 + width
        if b0 <= 1.0:
            pieces.append((a0, b0))
        else:
            pieces.append((a0, 1.0))
            pieces.append((0.0, b0 - 1.0))
    if not pieces:
        return IntervalSetMod1()
    pieces.sort()
    merged = [pieces[0]]
    for a, b in pieces[1:]:
        la, lb = merged[-1]
        if a <= lb:  # overlap or exact adjacency merges
            merged[-1] = (la, max(lb, b))
        else:
            merged.append((a, b))
    # seam merge: [.., 1) followed by [0, ..) stay distinct arcs (half-open
    # representation), except the full-circle case
    if len(merged) == 1 and merged[0] == (0.0, 1.0):
        return IntervalSetMod1(((0.0, 1.0),))
    total = sum(b - a for a, b in merged)
    if total >= 1.0:
        return IntervalSetMod1(((0.0, 1.0),))
    return IntervalSetMod1(tuple(merged))


def complement_intervals(s: IntervalSetMod1) -> IntervalSetMod1:
    if not s.arcs:
        return IntervalSetMod1(((0.0, 1.0),))
    if s.arcs == ((0.0, 1.0),):
        return IntervalSetMod1()
    out: list[tuple[float, float]] = []
    prev_end = 0.0
    for a, b in s.arcs:
        if a > prev_end:
            out.append((prev_end, a))
        prev_end = b
    if prev_end < 1.0:
        out.append((prev_end, 1.0))
    return IntervalSetMod1(tuple(out))


def intersect_intervals(s: IntervalSetMod1, t: IntervalSetMod1) -> IntervalSetMod1:
    out = []
    for a, b in s.arcs:
        for c, d in t.arcs:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return IntervalSetMod1(tuple(sorted(out)))


def union_intervals(s: IntervalSetMod1, t: IntervalSetMod1) -> IntervalSetMod1:
    if not s.arcs:
        return t
    if not t.arcs:
        return s
    return canonicalize_intervals(list(s.arcs) + list(t.arcs))


# ---------------------------------------------------------------------------
# grid functions and families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FibrePoint:
    theta: float
    x: float

    def __post_init__(self):
        if not (0.0 <= self.theta < 1.0):
            raise InvalidArgumentError("FibrePoint.theta must lie in [0,1)")


@dataclass(frozen=True)
class GridFunction:
    """m uniform samples of a lift on the x-grid {i/m}, with a Lipschitz bound
    for converting grid extrema into two-sided brackets."""

    m: int
    values: np.ndarray
    lipschitz: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.m,):
            raise InvalidArgumentError("GridFunction: values must have shape (m,)")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, x: float) -> float:
        """Linear interpolation with degree-one periodic extension."""
        return interp_lift(self.values, self.m, x)

    def monotone_violation(self) -> float:
        """Largest sampled decrease (0 for a non-decreasing grid)."""
        v = self.values
        d = np.diff(v)
        worst = float(-min(d.min(initial=0.0), (v[0] + 1.0) - v[-1]))
        return max(worst, 0.0)


def interp_lift(values: np.ndarray, m: int, x: float) -> float:
    """Evaluate the grid lift at a real x: interpolate on [0,1), shift by
    the integer part (degree-one periodicity)."""
    k = math.floor(x)
    r = x - k
    s = r * m
    j = int(s)
    if j >= m:  # r rounded up to 1.0
        return float(values[0] + 1.0 + k)
    frac = s - j
    hi = values[j + 1] if j + 1 < m else values[0] + 1.0
    return float(values[j] + frac * (hi - values[j]) + k)


@dataclass(frozen=True)
class FibreFamily:
    """Parameterised family of lifted fibre maps over an irrational rotation.

    kind="arnold": F_theta(x) = x + tau + (alpha/2pi) sin(2pi x) + beta sin(2pi theta).
    kind="tabulated": fibre grids supplied by `table` (callable theta -> GridFunction).
    """

    omega: float = GOLDEN_MEAN
    kind: str = "arnold"
    tau: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    table: Callable[[float], GridFunction] | None = None
    lipschitz: float = field(default=0.0)

    def __post_init__(self):
        if not (0.0 < self.omega < 1.0):
            raise InvalidArgumentError("omega must lie in (0,1)")
        if is_rational_surrogate(self.omega):
            raise InvalidArgumentError(
                "omega is exactly rational with small denominator; pick an irrational surrogate"
            )
        if self.kind not in ("arnold", "tabulated"):
            raise InvalidArgumentError(f"unknown family kind {self.kind!r}")
        if self.kind == "tabulated" and self.table is None:
            raise InvalidArgumentError("tabulated family needs a table callable")
        if self.lipschitz == 0.0 and self.kind == "arnold":
            object.__setattr__(
                self, "lipschitz", 1.0 + abs(self.alpha) + TWO_PI * abs(self.beta)
            )

    # -- evaluation ---------------------------------------------------------

    def fibre_lift(self, theta: float, x: float) -> float:
        if self.kind == "arnold":
            return (
                x
                + self.tau
                + (self.alpha / TWO_PI) * math.sin(TWO_PI * x)
                + self.beta * math.sin(TWO_PI * theta)
            )
        return self.table(wrap_mod1(theta))(x)

    def fibre_lift_array(self, theta, x):
        """Vectorised fibre lift; theta and x broadcast together."""
        theta = np.asarray(theta, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.kind == "arnold":
            return (
                x
                + self.tau
                + (self.alpha / TWO_PI) * np.sin(TWO_PI * x)
                + self.beta * np.sin(TWO_PI * theta)
            )
        out = np.empty(np.broadcast(theta, x).shape)
        it = np.nditer([theta, x, out], op_flags=[["readonly"], ["readonly"], ["writeonly"]])
        for th, xx, oo in it:
            oo[...] = self.table(wrap_mod1(float(th)))(float(xx))
        return out

    def unforced_grid(self, m: int = DEFAULT_GRID_M) -> GridFunction:
        """Samples of the unforced lift (theta-forcing stripped for arnold)."""
        if self.kind == "arnold":
            i = np.arange(m) / m
            vals = i + self.tau + (self.alpha / TWO_PI) * np.sin(TWO_PI * i)
            return GridFunction(m, vals, lipschitz=1.0 + abs(self.alpha))
        return self.table(0.0)

    def fibre_grid(self, theta: float, m: int = DEFAULT_GRID_M) -> GridFunction:
        if self.kind == "arnold":
            base = self.unforced_grid(m)
            return GridFunction(
                m,
                base.values + self.beta * math.sin(TWO_PI * theta),
                lipschitz=base.lipschitz,
            )
        return self.table(wrap_mod1(theta))


# ---------------------------------------------------------------------------
# windowed extrema
# ---------------------------------------------------------------------------


def sliding_extremum(g: GridFunction, window: float, kind: str) -> GridFunction:
    """Windowed extremum of a sampled lift.

    kind="sup": sup of g over the trailing window [x - window, x].
    kind="inf": inf of g over the leading window [x, x + window].
    The periodic extension shifts values by the winding (g(x-1) = g(x) - 1),
    so a full unit window reproduces the monotone envelopes. O(m).
    """
    if not (0.0 <= window <= 1.0):
        raise InvalidArgumentError("window must lie in [0, 1]")
    m, v = g.m, g.values
    k = int(math.floor(window * m + 1e-9))
    if window != 0.0 and k < 1:
        raise InvalidArgumentError("window shorter than one grid cell (w*m >= 1 required)")
    if k == 0:
        return g
    w = k + 1  # samples in the closed window
    if kind == "sup":
        ext = np.concatenate([v - 1.0, v])
        out = maximum_filter1d(
            ext, size=w, origin=(w - 1) // 2, mode="constant", cval=-np.inf
        )[m:]
    elif kind == "inf":
        ext = np.concatenate([v, v + 1.0])
        out = minimum_filter1d(
            ext, size=w, origin=-(w // 2), mode="constant", cval=np.inf
        )[:m]
    else:
        raise InvalidArgumentError(f"kind must be 'sup' or 'inf', got {kind!r}")
    return GridFunction(m, out, lipschitz=g.lipschitz)


def naive_sliding_extremum(g: GridFunction, window: float, kind: str) -> GridFunction:
    """Quadratic reference scan with the same window/extension semantics."""
    if not (0.0 <= window <= 1.0):
        raise InvalidArgumentError("window must lie in [0, 1]")
    m, v = g.m, g.values
    k = int(math.floor(window * m + 1e-9))
    if k == 0:
        return g
    out = np.empty(m)
    for i in range(m):
        if kind == "sup":
            idx = np.arange(i - k, i + 1)
        else:
            idx = np.arange(i, i + k + 1)
        shift = np.floor_divide(idx, m)
        samples = v[idx - shift * m] + shift
        out[i] = samples.max() if kind == "sup" else samples.min()
    return GridFunction(m, out, lipschitz=g.lipschitz)


# ---------------------------------------------------------------------------
# monotone inversion
# ---------------------------------------------------------------------------


def check_monotone_lift(f: Callable[[float], float], samples: int = 256, tol: float = EQ_TOL):
    xs = np.arange(samples + 1) / samples
    vals = [f(float(x)) for x in xs]
    for i in range(samples):
        if vals[i + 1] < vals[i] - tol:
            raise NotMonotoneError(
                f"fibre map decreases by {vals[i] - vals[i+1]:.3e} near x={xs[i]:.6f}"
            )


def monotone_lift_inverse(
    f: Callable[[float], float],
    y: float,
    *,
    width_stop: float = 1e-12,
    max_iter: int = 80,
) -> float:
    """Leftmost x with f(x) >= y for a continuous monotone degree-one lift.

    Plain bisection; degree-one periodicity supplies the bracket. With
    width_stop = 0 the bisection runs to adjacent floats.
    """
    # displacement f(x) - x is periodic; bracket using its sampled range
    xs = np.arange(33) / 32.0
    disp = [f(float(x)) - float(x) for x in xs]
    lo = y - max(disp) - 1e-9
    hi = y - min(disp) + 1e-9
    # establish invariant f(lo) < y <= f(hi); widen defensively if sampling lied
    for _ in range(8):
        if f(lo) < y:
            break
        lo -= 1.0
    for _ in range(8):
        if f(hi) >= y:
            break
        hi += 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) >= y:
            hi = mid
        else:
            lo = mid
        if hi - lo < width_stop:
            break
    return hi


def monotone_preimage(
    obj,
    theta: float | None,
    s: IntervalSetMod1,
    *,
    width_stop: float = 1e-12,
    check: bool = True,
) -> IntervalSetMod1:
    """Preimage {x mod 1 : f(x) mod 1 in s} of an arc set under a monotone
    non-decreasing fibre lift, one bisection per arc endpoint.

    `obj` is a FibreFamily (with theta), a map exposing fibre_lift, or a bare
    callable lift when theta is None.
    """
    if callable(obj) and not hasattr(obj, "fibre_lift"):
        f = obj
    else:
        f = lambda x: obj.fibre_lift(theta, x)  # noqa: E731
    if check:
        check_monotone_lift(f)
    if not s.arcs:
        return IntervalSetMod1()
    if s.arcs == ((0.0, 1.0),):
        return IntervalSetMod1(((0.0, 1.0),))
    f0 = f(0.0)
    out: list[tuple[float, float]] = []
    for a, b in s.arcs:
        # lift copies A + n that the image of [0, 1) can reach
        for n in range(math.floor(f0 - b), math.ceil(f0 + 1.0 - a) + 1):
            lo = monotone_lift_inverse(f, a + n, width_stop=width_stop)
            hi = monotone_lift_inverse(f, b + n, width_stop=width_stop)
            lo_c, hi_c = max(lo, 0.0), min(hi, 1.0)
            if hi_c > lo_c:
                out.append((lo_c, hi_c))
    if not out:
        return IntervalSetMod1()
    return canonicalize_intervals(out)
