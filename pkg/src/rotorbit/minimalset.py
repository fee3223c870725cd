"""Minimal sets with a prescribed rotation number: plateau-avoiding survivor
sets, omega-limit orbit clouds, uniform-rotation verification, dispersal
diagnostics, and the curve-crossing certificate for essential boundedness.

The cloud construction runs the monotone interpolant's generalized inverse
backward from the survivor seed and reverses the result. The reversed
sequence is a genuine forward orbit of the interpolant that never meets a
plateau interior (the leftmost-inverse lands on plateau edges at worst), so
it is simultaneously an orbit of the full map; forward iteration from any
finite-depth survivor point leaves the plateau-avoiding set after a few
dozen steps and cannot satisfy the orbit-coincidence bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels as kernels
from .circlecore import (
    DEFAULT_GRID_M,
    TWO_PI,
    FibreFamily,
    IntervalSetMod1,
    canonicalize_intervals,
    complement_intervals,
    intersect_intervals,
    monotone_lift_inverse,
    wrap_mod1,
)
from .errors import (
    ContinuationFailureError,
    DepthInsufficientError,
    InvalidArgumentError,
    NumericDegeneracyError,
    PropertyViolationError,
)
from .plateau import ForcedMonotoneMap, arnold_gt_exact_inverse, forced_map, gt_values

MAX_SURVIVOR_DEPTH = 60


@dataclass(frozen=True)
class SurvivorSet:
    depth: int
    set: IntervalSetMod1
    theta0: float

    def measure(self) -> float:
        return self.set.measure()


@dataclass(frozen=True)
class MinimalSetCloud:
    points: np.ndarray  # (M, 2) columns theta, x mod 1
    target_rho: float
    t: float
    burn_in: int
    theta0: float
    x0: float

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class UniformRotationReport:
    max_deviation: float
    n: int
    target_rho: float
    passed: bool


@dataclass(frozen=True)
class SdsmReport:
    gamma_gap: float | None = None
    crossing_ok: bool | None = None
    band: IntervalSetMod1 | None = None
    gamma_closure: float | None = None
    gamma_max_jump: float | None = None
    component_stats: tuple[tuple[int, int], ...] | None = None
    n_components: int | None = None
    frac_single_fibre: float | None = None
    max_extent: int | None = None
    grid: tuple[int, int] | None = None
    interval_property_ok: bool | None = None
    interval_checks_passed: int | None = None
    interval_checks_total: int | None = None
    gamma_values: np.ndarray | None = field(default=None, repr=False)


def combine_sdsm_reports(crossing: SdsmReport, components: SdsmReport) -> SdsmReport:
    return SdsmReport(
        gamma_gap=crossing.gamma_gap,
        crossing_ok=crossing.crossing_ok,
        band=crossing.band,
        gamma_closure=crossing.gamma_closure,
        gamma_max_jump=crossing.gamma_max_jump,
        gamma_values=crossing.gamma_values,
        component_stats=components.component_stats,
        n_components=components.n_components,
        frac_single_fibre=components.frac_single_fibre,
        max_extent=components.max_extent,
        grid=components.grid,
        interval_property_ok=components.interval_property_ok,
        interval_checks_passed=components.interval_checks_passed,
        interval_checks_total=components.interval_checks_total,
    )


# ---------------------------------------------------------------------------
# survivor search
# ---------------------------------------------------------------------------


def _fibre_inverse(fmap: ForcedMonotoneMap, theta: float):
    """Full-float-precision leftmost inverse of the fibre lift at theta."""
    if fmap.exact is not None and fmap.family.kind == "arnold":
        c, p, q = fmap.exact
        tau, alpha = fmap.family.tau, fmap.family.alpha
        shift = fmap.forcing(theta)

        def inv(y: float) -> float:
            return arnold_gt_exact_inverse(c, p, q, tau, alpha, y - shift)

        return inv
    fibre = fmap.fibre_homotopy(theta)

    def inv(y: float) -> float:
        return monotone_lift_inverse(fibre, y, width_stop=0.0, max_iter=200)

    return inv


def _preimage_arcs(inv, f0: float, s: IntervalSetMod1) -> IntervalSetMod1:
    """Preimage of an arc set under a monotone lift given its leftmost
    inverse; endpoints are padded outward by one ulp so arcs kept by the
    survivor recursion cannot vanish from rounding alone."""
    if not s.arcs:
        return IntervalSetMod1()
    if s.arcs == ((0.0, 1.0),):
        return IntervalSetMod1(((0.0, 1.0),))
    out = []
    for a, b in s.arcs:
        for n in range(math.floor(f0 - b), math.ceil(f0 + 1.0 - a) + 1):
            lo = np.nextafter(inv(a + n), -np.inf)
            hi = np.nextafter(inv(b + n), np.inf)
            lo_c, hi_c = max(lo, 0.0), min(hi, 1.0)
            if hi_c > lo_c:
                out.append((float(lo_c), float(hi_c)))
    if not out:
        return IntervalSetMod1()
    return canonicalize_intervals(out)


def survivor_search(fmap: ForcedMonotoneMap, theta0: float, depth: int) -> SurvivorSet:
    """x-values at theta0 whose first `depth` iterates all avoid plateau
    interiors, via the backward interval recursion
        A_depth = complement(U at theta_depth),
        A_j     = complement(U at theta_j)  intersect  h_j^{-1}(A_{j+1}).
    """
    if depth < 0 or depth > MAX_SURVIVOR_DEPTH:
        raise InvalidArgumentError(f"depth must lie in [0, {MAX_SURVIVOR_DEPTH}]")
    omega = fmap.family.omega

    def plateau_at(theta: float) -> IntervalSetMod1:
        if fmap.family.kind == "arnold":
            return fmap.plateaus
        return fmap.fibre_homotopy(theta).plateaus

    theta_j = wrap_mod1(theta0 + depth * omega)
    survivor = complement_intervals(plateau_at(theta_j))
    for j in range(depth - 1, -1, -1):
        theta_j = wrap_mod1(theta0 + j * omega)
        inv = _fibre_inverse(fmap, theta_j)
        f0 = fmap.fibre_lift(theta_j, 0.0)
        pre = _preimage_arcs(inv, f0, survivor)
        survivor = intersect_intervals(complement_intervals(plateau_at(theta_j)), pre)
        if survivor.is_empty():
            raise NumericDegeneracyError(
                f"survivor set empty at depth {depth - j} of {depth}; "
                "a plateau-avoiding point always exists, so tolerances are off"
            )
    if survivor.is_empty():
        raise NumericDegeneracyError("survivor set empty at depth 0")
    return SurvivorSet(depth=depth, set=survivor, theta0=wrap_mod1(theta0))


# ---------------------------------------------------------------------------
# omega-limit cloud
# ---------------------------------------------------------------------------


def omega_limit_cloud(
    family: FibreFamily,
    t: float,
    theta0: float,
    survivor: SurvivorSet,
    burn_in: int,
    M: int,
    m: int = DEFAULT_GRID_M,
    target_rho: float = math.nan,
    coincidence_tol: float = 1e-6,
    fmap: ForcedMonotoneMap | None = None,
) -> MinimalSetCloud:
    """Sample the omega-limit set of the plateau-avoiding orbit through the
    survivor seed: M recorded points of the interpolant orbit ending at the
    seed, built backward (module docstring), with the full-map/interpolant
    agreement verified at every recorded point.
    """
    if survivor.set.is_empty():
        raise InvalidArgumentError("survivor set is empty")
    if family.kind != "arnold":
        raise InvalidArgumentError("cloud construction is implemented for the arnold family")
    if fmap is None:
        fmap = forced_map(family, t, m)
    a, b = survivor.set.largest_arc()
    x0 = wrap_mod1(0.5 * (a + b))
    theta0 = wrap_mod1(theta0)

    total = burn_in + M
    ks = np.arange(1, total + 1, dtype=float)
    thetas_back = (theta0 - ks * family.omega) % 1.0
    forcing = family.beta * np.sin(TWO_PI * thetas_back)
    if fmap.exact is not None:
        c, p, q = fmap.exact
        xs_back = kernels.backward_orbit_exact(
            c, p, q, family.tau, family.alpha, forcing, x0
        )
    else:
        xs_back = kernels.backward_orbit_grid(fmap.base.g_t.values, forcing, x0)

    # forward chronology: deepest preimage first, seed last
    xs = np.concatenate([xs_back[::-1], [x0]])
    ths = np.concatenate([thetas_back[::-1], [theta0]])
    xs_rec = xs[total - M + 1 :]
    ths_rec = ths[total - M + 1 :]

    # agreement of the full map and the interpolant along the recorded orbit
    full_vals = family.fibre_lift_array(ths_rec, xs_rec)
    t_vals = gt_values(fmap, xs_rec) + family.beta * np.sin(TWO_PI * ths_rec)
    coincidence = float(np.abs(full_vals - t_vals).max())
    if coincidence > coincidence_tol:
        raise DepthInsufficientError(
            f"orbit coincidence violated: |F - F_t| reaches {coincidence:.3e} "
            f"> {coincidence_tol:g}; increase survivor depth / grid resolution"
        )

    # internal consistency: each recorded point maps onto its successor
    succ = t_vals[:-1] % 1.0
    gap = np.abs(succ - xs_rec[1:])
    gap = np.minimum(gap, 1.0 - gap)
    if float(gap.max()) > 1e-9:
        raise NumericDegeneracyError(
            f"backward-orbit inversion inconsistent by {gap.max():.3e}"
        )

    return MinimalSetCloud(
        points=np.column_stack([ths_rec, xs_rec]),
        target_rho=target_rho,
        t=t,
        burn_in=burn_in,
        theta0=theta0,
        x0=x0,
    )


def cloud_for_rotation(
    family: FibreFamily,
    target_rho: float,
    depth: int = 40,
    burn_in: int = 2000,
    M: int = 20000,
    n: int = 10**5,
    K: int = 50,
    seed: int = 0,
    m: int = DEFAULT_GRID_M,
    tol_rho: float = 1e-4,
    theta0: float = 0.0,
    interval=None,
):
    """End-to-end pipeline: tune t to the target rotation number, run the
    survivor search, and sample the omega-limit cloud. Returns
    (cloud, fmap, t_search_result). Falls back to a fine grid when no exact
    plateau solve is available, keeping the coincidence check attainable."""
    from .rotation import find_t_for_rho

    tres = find_t_for_rho(
        family, target_rho, tol_rho=tol_rho, n=n, K=K, seed=seed, m=m, interval=interval
    )
    fmap = forced_map(family, tres.t, m)
    if (
        fmap.exact is None
        and family.kind == "arnold"
        and not fmap.plateaus.is_empty()
        and m < (1 << 20)
    ):
        fmap = forced_map(family, tres.t, 1 << 20)
    survivor = survivor_search(fmap, theta0, depth)
    cloud = omega_limit_cloud(
        family,
        tres.t,
        theta0,
        survivor,
        burn_in,
        M,
        m=fmap.m,
        target_rho=tres.achieved_rho,
        fmap=fmap,
    )
    return cloud, fmap, tres


def uniform_rotation_check(
    cloud: MinimalSetCloud,
    fmap: ForcedMonotoneMap,
    n: int = 10**4,
    sample: int = 10**3,
    tol: float = 5e-3,
) -> UniformRotationReport:
    """Displacement rate of the interpolant orbit over n steps from a cloud
    subsample; deviation from the cloud's target rotation number."""
    if len(cloud) == 0:
        raise InvalidArgumentError("empty cloud")
    from .rotation import ensemble_orbit_lifts  # local import, no cycle at module load

    idx = np.unique(np.linspace(0, len(cloud) - 1, sample).astype(np.int64))
    th0 = cloud.points[idx, 0].copy()
    x0 = cloud.points[idx, 1].copy()
    lifts = ensemble_orbit_lifts(fmap, th0, x0, [n])[n]
    dev = np.abs((lifts - x0) / n - cloud.target_rho)
    max_dev = float(dev.max())
    return UniformRotationReport(
        max_deviation=max_dev, n=n, target_rho=cloud.target_rho, passed=max_dev <= tol
    )


# ---------------------------------------------------------------------------
# dispersal diagnostics
# ---------------------------------------------------------------------------


def _torus_components(occ: np.ndarray) -> tuple[np.ndarray, int]:
    """Label connected components with 8-neighbour connectivity wrapping in
    both directions (scipy labels the plane; seams are merged afterwards)."""
    structure = np.ones((3, 3), dtype=int)
    labels, n = ndimage.label(occ, structure=structure)
    if n == 0:
        return labels, 0
    parent = np.arange(n + 1)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    n_th, n_x = occ.shape
    for j in range(n_x):
        if occ[0, j]:
            for dj in (-1, 0, 1):
                if occ[n_th - 1, (j + dj) % n_x]:
                    union(labels[0, j], labels[n_th - 1, (j + dj) % n_x])
    for i in range(n_th):
        if occ[i, 0]:
            for di in (-1, 0, 1):
                if occ[(i + di) % n_th, n_x - 1]:
                    union(labels[i, 0], labels[(i + di) % n_th, n_x - 1])
    # compress to consecutive ids
    roots = {}
    remap = np.zeros(n + 1, dtype=np.int64)
    for lbl in range(1, n + 1):
        r = find(lbl)
        if r not in roots:
            roots[r] = len(roots) + 1
        remap[lbl] = roots[r]
    return remap[labels], len(roots)


def _circular_extent(cols: np.ndarray, n_th: int) -> int:
    """Cells in the smallest circular column interval covering the set."""
    cols = np.unique(cols)
    if cols.size == n_th:
        return n_th
    gaps = np.diff(cols)
    wrap_gap = cols[0] + n_th - cols[-1]
    max_gap = max(int(gaps.max(initial=0)), int(wrap_gap))
    return n_th - max_gap + 1


def sdsm_diagnostics(
    cloud: MinimalSetCloud,
    grid: tuple[int, int] = (1024, 1024),
    spot_checks: int = 32,
    delta: float = 0.02,
) -> SdsmReport:
    """Rasterise the cloud and report dispersal proxies: the per-component
    theta-extent histogram (single-fibre components show extent 1 cell at the
    given resolution; the histogram is resolution-indexed and meant to be
    re-checked at doubled resolution), and local-interval spot checks on the
    theta-projection of small balls."""
    if len(cloud) < 10**4:
        raise InvalidArgumentError("cloud too small for diagnostics (need >= 1e4 points)")
    n_th, n_x = grid
    if n_th * n_x > 4096 * 4096:
        raise InvalidArgumentError("grid larger than 4096^2")
    th = cloud.points[:, 0]
    x = cloud.points[:, 1]
    it = np.minimum((th * n_th).astype(np.int64), n_th - 1)
    ix = np.minimum((x * n_x).astype(np.int64), n_x - 1)
    occ = np.zeros((n_th, n_x), dtype=bool)
    occ[it, ix] = True

    labels, n_comp = _torus_components(occ)
    extents = []
    if n_comp > 0:
        comp_cells = np.flatnonzero(labels)
        comp_ids = labels.ravel()[comp_cells]
        rows = comp_cells // n_x
        order = np.argsort(comp_ids, kind="stable")
        comp_ids, rows = comp_ids[order], rows[order]
        bounds = np.searchsorted(comp_ids, np.arange(1, n_comp + 2))
        for ci in range(n_comp):
            cols = rows[bounds[ci] : bounds[ci + 1]]
            extents.append(_circular_extent(cols, n_th))
    extents = np.asarray(extents, dtype=np.int64)
    hist: dict[int, int] = {}
    for e in extents:
        hist[int(e)] = hist.get(int(e), 0) + 1
    stats = tuple(sorted(hist.items()))
    frac_single = float((extents <= 1).sum() / extents.size) if extents.size else 0.0

    # local-interval spot checks
    idx = np.unique(np.linspace(0, len(cloud) - 1, spot_checks).astype(np.int64))
    passed = 0
    for i in idx:
        th0, x0 = th[i], x[i]
        dth = np.abs(th - th0)
        dth = np.minimum(dth, 1.0 - dth)
        dx = np.abs(x - x0)
        dx = np.minimum(dx, 1.0 - dx)
        inside = (dth <= delta) & (dx <= delta)
        if not inside.any():
            continue
        rel = ((th[inside] - (th0 - delta)) % 1.0 * n_th).astype(np.int64)
        width_cells = int(math.ceil(2 * delta * n_th)) + 1
        occ_bins = np.zeros(width_cells + 1, dtype=bool)
        occ_bins[np.minimum(rel, width_cells)] = True
        # longest run of occupied bins inside the window
        best = run = 0
        for o in occ_bins:
            run = run + 1 if o else 0
            best = max(best, run)
        if best / n_th >= delta / 4.0:
            passed += 1
    total_checks = int(idx.size)
    return SdsmReport(
        component_stats=stats,
        n_components=int(n_comp),
        frac_single_fibre=frac_single,
        max_extent=int(extents.max()) if extents.size else 0,
        grid=(n_th, n_x),
        interval_property_ok=(passed >= math.ceil(0.9 * total_checks)),
        interval_checks_passed=passed,
        interval_checks_total=total_checks,
    )


# ---------------------------------------------------------------------------
# crossing certificate
# ---------------------------------------------------------------------------


def gamma_crossing_certificate(
    family: FibreFamily,
    t: float,
    n_theta: int = 4096,
    m: int = DEFAULT_GRID_M,
    fmap: ForcedMonotoneMap | None = None,
) -> SdsmReport:
    """Continuation of the solution curve F_{t,theta}(gamma) = mid-band over
    the base circle. gamma_gap is the vertical span |gamma(1/4) - gamma(3/4)|;
    a span >= 2 means the curve meets two consecutive integer translates of a
    horizontal line, which certifies that the complement of the band and the
    curve is essentially bounded (no unbounded planar component can dodge
    both)."""
    if family.kind != "arnold":
        raise InvalidArgumentError("crossing certificate needs the arnold family")
    if n_theta % 4 != 0:
        raise InvalidArgumentError("n_theta must be divisible by 4")
    if fmap is None:
        fmap = forced_map(family, t, m)
    band = fmap.plateaus
    if band.is_empty():
        raise InvalidArgumentError(
            "no plateau band at this t (alpha > 1 required for the certificate)"
        )
    if band.measure() >= 1.0 - 1e-12:
        raise PropertyViolationError("plateau band must have length < 1")
    a, b = band.largest_arc()
    mid = wrap_mod1(0.5 * (a + b))

    if fmap.exact is not None:
        c, p, q = fmap.exact

        def inv(y: float) -> float:
            return arnold_gt_exact_inverse(c, p, q, family.tau, family.alpha, y)

    else:
        base = fmap.base

        def inv(y: float) -> float:
            return monotone_lift_inverse(base, y, width_stop=0.0, max_iter=200)

    thetas = np.arange(n_theta + 1) / n_theta
    targets = mid - family.beta * np.sin(TWO_PI * thetas)
    gamma = np.empty(n_theta + 1)
    gamma[0] = inv(float(targets[0]))
    max_jump = 0.0
    for i in range(1, n_theta + 1):
        y_raw = inv(float(targets[i]))
        y = y_raw + round(gamma[i - 1] - y_raw)
        jump = abs(y - gamma[i - 1])
        if jump > 0.5:
            raise ContinuationFailureError(
                f"curve continuation jumped {jump:.3f} at theta={thetas[i]:.6f}; "
                "refine the theta grid"
            )
        max_jump = max(max_jump, jump)
        gamma[i] = y
    gap = float(abs(gamma[n_theta // 4] - gamma[3 * n_theta // 4]))
    closure = float(abs(gamma[n_theta] - gamma[0]))
    return SdsmReport(
        gamma_gap=gap,
        crossing_ok=gap >= 2.0 - 1e-6,
        band=band,
        gamma_closure=closure,
        gamma_max_jump=max_jump,
        gamma_values=gamma,
    )
