"""Topological-entropy machinery: Bowen-style orbit metrics, greedy
separated/cover counts over low-discrepancy samples, the k-fold cover lift,
the ln 2 / N spread certificate with itinerary verification, and the
linear-growth check for fibre-monotone dynamics.

All separated/cover counts are one-sided bounds computed on finite samples:
the greedy maximal separated set gives a lower bound S_lower for the true
separated count, and the epsilon-balls around its members cover the sample,
so the same cardinality doubles as the cover upper bound R_upper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .circlecore import (
    DEFAULT_GRID_M,
    GOLDEN_MEAN,
    TWO_PI,
    FibreFamily,
    FibrePoint,
    circle_distance,
    wrap_mod1,
)
from .errors import (
    CertificateFailureError,
    InconsistentCertificateError,
    InvalidArgumentError,
    NumericDegeneracyError,
)
from .minimalset import MinimalSetCloud, cloud_for_rotation
from .plateau import ForcedMonotoneMap, forced_map, gt_values
from .rotation import ensemble_initial_conditions, rotation_interval

SCOPES = ("ambient", "fibre", "cover", "cloud")
HORIZON_CAP = 1000
DEFAULT_COVER_DEGREE = 4


@dataclass(frozen=True)
class OrbitSegment:
    start: FibrePoint
    length: int
    states: tuple[tuple[float, float], ...]  # (theta, x mod 1) along the orbit


@dataclass(frozen=True)
class SeparationCount:
    n: int
    eps: float
    S_lower: int
    R_upper: int
    scope: str
    sample: int
    seed: int


@dataclass(frozen=True)
class CoverLift:
    """Dynamics lifted to the k-fold circle R/kZ over the same base: the
    fibre displacement is 1-periodic in x, so it transfers verbatim."""

    family: FibreFamily
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidArgumentError("cover degree k must be >= 1")

    def fibre_map(self, theta, xhat):
        base = np.mod(xhat, 1.0)
        disp = self.family.fibre_lift_array(
            np.broadcast_to(np.asarray(theta, float), np.shape(base)), base
        ) - base
        return np.mod(xhat + disp, float(self.k))

    def project(self, xhat):
        return np.mod(xhat, 1.0)


@dataclass(frozen=True)
class EntropyCertificate:
    rho1: float
    rho2: float
    epsilon: float
    N: int
    lower_bound: float
    itinerary_counts: tuple[int, ...]
    theta_bin: int
    n_theta_bins: int
    theta: float
    x1: float
    x2: float
    t1: float
    t2: float
    k: int = DEFAULT_COVER_DEGREE


@dataclass(frozen=True)
class GrowthReport:
    horizons: tuple[int, ...]
    counts: tuple[int, ...]
    eps: float
    scope: str
    sse_linear: float
    sse_exponential: float
    rate: float
    linear_wins: bool
    passed: bool


# ---------------------------------------------------------------------------
# orbit metric
# ---------------------------------------------------------------------------


def orbit_segment(family: FibreFamily, start: FibrePoint, length: int) -> OrbitSegment:
    if length < 0:
        raise InvalidArgumentError("length must be >= 0")
    th, x = start.theta, start.x
    states = [(th, x)]
    for _ in range(length):
        x = wrap_mod1(family.fibre_lift(th, x))
        th = wrap_mod1(th + family.omega)
        states.append((th, x))
    return OrbitSegment(start=start, length=length, states=tuple(states))


def orbit_metric(a: FibrePoint, b: FibrePoint, n: int, family: FibreFamily) -> float:
    """max over steps 0..n of max(d(theta, theta'), d(x, x')) along orbits."""
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    sa = orbit_segment(family, a, n).states
    sb = orbit_segment(family, b, n).states
    d = 0.0
    for (tha, xa), (thb, xb) in zip(sa, sb):
        d = max(d, circle_distance(tha, thb), circle_distance(xa, xb))
    return d


# ---------------------------------------------------------------------------
# greedy separated / cover counts
# ---------------------------------------------------------------------------


def _family_step(family: FibreFamily):
    omega = family.omega
    if family.kind == "arnold":
        tau, alpha, beta = family.tau, family.alpha, family.beta

        def step(th, x):
            disp = tau + (alpha / TWO_PI) * np.sin(TWO_PI * x) + beta * np.sin(TWO_PI * th)
            return (th + omega) % 1.0, (x + disp) % 1.0

        return step

    def step(th, x):
        nxt = family.fibre_lift_array(th, np.mod(x, 1.0))
        return (th + omega) % 1.0, np.mod(nxt, 1.0)

    return step


def _fmap_step(fmap: ForcedMonotoneMap):
    omega = fmap.family.omega
    beta = fmap.family.beta if fmap.family.kind == "arnold" else 0.0

    def step(th, x):
        vals = gt_values(fmap, np.mod(x, 1.0))
        if fmap.family.kind == "arnold":
            vals = vals + beta * np.sin(TWO_PI * th)
        return (th + omega) % 1.0, np.mod(vals, 1.0)

    return step


def _cover_step(lift: CoverLift):
    omega = lift.family.omega
    k = float(lift.k)
    family = lift.family

    def step(th, xhat):
        base = np.mod(xhat, 1.0)
        disp = family.fibre_lift_array(th, base) - base
        return (th + omega) % 1.0, np.mod(xhat + disp, k)

    return step


def _orbit_tracks(step, th0, x0, n):
    P = th0.size
    TH = np.empty((n + 1, P))
    X = np.empty((n + 1, P))
    th, x = th0.astype(float).copy(), x0.astype(float).copy()
    for i in range(n + 1):
        TH[i] = th
        X[i] = x
        if i < n:
            th, x = step(th, x)
    return TH, X


def _fibre_sample(sample: int, seed: int, theta0: float):
    rng = np.random.default_rng(seed)
    jitter = rng.uniform(0.0, 1.0 / sample)
    x = (np.arange(sample) * GOLDEN_MEAN + jitter) % 1.0
    th = np.full(sample, wrap_mod1(theta0))
    return th, x


def separation_counts(
    obj,
    scope: str,
    n: int,
    eps: float,
    sample: int = 2000,
    seed: int = 0,
    theta0: float = 0.0,
    cloud: MinimalSetCloud | None = None,
) -> SeparationCount:
    """Greedy (f, n, eps)-separated set over a deterministic low-discrepancy
    sample. scope: 'ambient' (points over the whole torus), 'fibre' (one
    theta), 'cover' (obj is a CoverLift; the ambient base sample embedded at
    sheet zero, so base and cover runs share candidates and the k-fold cover
    bound R_cover <= k*R_base applies), 'cloud' (subsample of a given
    MinimalSetCloud).
    """
    if scope not in SCOPES:
        raise InvalidArgumentError(f"scope must be one of {SCOPES}")
    if eps <= 0.0:
        raise InvalidArgumentError("eps must be positive")
    if n < 0:
        raise InvalidArgumentError("n must be >= 0")
    if sample < 1 or sample > 10**6:
        raise InvalidArgumentError("sample budget must lie in [1, 1e6]")

    circ_x = 1.0
    if isinstance(obj, CoverLift):
        if scope != "cover":
            raise InvalidArgumentError("a CoverLift implies scope='cover'")
        step = _cover_step(obj)
        circ_x = float(obj.k)
        th0, x0 = ensemble_initial_conditions(sample, seed)
    elif isinstance(obj, ForcedMonotoneMap):
        step = _fmap_step(obj)
        if scope == "fibre":
            th0, x0 = _fibre_sample(sample, seed, theta0)
        elif scope == "ambient":
            th0, x0 = ensemble_initial_conditions(sample, seed)
        elif scope == "cloud":
            if cloud is None or len(cloud) == 0:
                raise InvalidArgumentError("scope='cloud' needs a non-empty cloud")
            idx = np.unique(np.linspace(0, len(cloud) - 1, sample).astype(np.int64))
            th0 = cloud.points[idx, 0].copy()
            x0 = cloud.points[idx, 1].copy()
        else:
            raise InvalidArgumentError("scope='cover' needs a CoverLift")
    elif isinstance(obj, FibreFamily):
        step = _family_step(obj)
        if scope == "ambient":
            th0, x0 = ensemble_initial_conditions(sample, seed)
        elif scope == "fibre":
            th0, x0 = _fibre_sample(sample, seed, theta0)
        elif scope == "cloud":
            if cloud is None or len(cloud) == 0:
                raise InvalidArgumentError("scope='cloud' needs a non-empty cloud")
            idx = np.unique(np.linspace(0, len(cloud) - 1, sample).astype(np.int64))
            th0 = cloud.points[idx, 0].copy()
            x0 = cloud.points[idx, 1].copy()
        else:
            raise InvalidArgumentError("scope='cover' needs a CoverLift")
    else:
        raise InvalidArgumentError("obj must be a FibreFamily, ForcedMonotoneMap or CoverLift")

    if (n + 1) * th0.size > 5 * 10**7:
        raise InvalidArgumentError("orbit budget (n+1)*candidates exceeds 5e7")
    TH, X = _orbit_tracks(step, th0, x0, n)
    accepted = kernels.greedy_separated(TH, X, eps, circ_x)
    count = int(accepted.size)
    return SeparationCount(
        n=n, eps=eps, S_lower=count, R_upper=count, scope=scope,
        sample=int(th0.size), seed=seed,
    )


def cover_lift(family: FibreFamily, k: int = DEFAULT_COVER_DEGREE) -> CoverLift:
    return CoverLift(family=family, k=k)


# ---------------------------------------------------------------------------
# spread certificate
# ---------------------------------------------------------------------------


def _bin_representative(cloud: MinimalSetCloud, b: int, n_bins: int) -> float:
    th = cloud.points[:, 0]
    x = cloud.points[:, 1]
    inside = np.floor(th * n_bins).astype(np.int64) == b
    centre = (b + 0.5) / n_bins
    dist = np.abs(th[inside] - centre)
    order = np.lexsort((x[inside], dist))
    return float(x[inside][order[0]])


def _first_spread_horizon(
    family: FibreFamily, theta: float, x1: float, x2: float, cap: int
) -> int | None:
    """Smallest N <= cap with lift spread F^N(x1) - F^N(x2) > 4, single pass."""
    y1, y2, th = x1, x2, theta
    for step in range(1, cap + 1):
        y1 = family.fibre_lift(th, y1)
        y2 = family.fibre_lift(th, y2)
        th = wrap_mod1(th + family.omega)
        if y1 - y2 > 4.0:
            return step
    return None


def entropy_certificate(
    family: FibreFamily,
    rho1_target: float,
    rho2_target: float,
    tol: float = 1e-4,
    n: int = 10**5,
    K: int = 50,
    seed: int = 0,
    m: int = DEFAULT_GRID_M,
    n_bins: int = 512,
    depth: int = 40,
    burn_in: int = 2000,
    M: int = 20000,
    n_max: int = 5,
) -> EntropyCertificate:
    """Positive-entropy certificate from two minimal sets with separated
    rotation numbers: representatives x2 - 1 < x1 < x2 in a shared theta-bin
    (x1 from the faster set) whose lift orbits spread past the 4-fold cover
    circumference at some horizon N give the bound ln 2 / N.
    """
    gap = rho2_target - rho1_target
    if gap < 0.05:
        raise InvalidArgumentError("need rho2_target - rho1_target >= 0.05")
    interval = rotation_interval(family, n=n, K=K, seed=seed, m=m)
    pad = max(tol, 1e-9)
    if rho1_target < interval.lo - pad or rho2_target > interval.hi + pad:
        raise CertificateFailureError(
            f"targets [{rho1_target}, {rho2_target}] not inside the realised "
            f"rotation interval [{interval.lo:.9f}, {interval.hi:.9f}]"
        )

    cloud1, _, tres1 = cloud_for_rotation(
        family, rho1_target, depth=depth, burn_in=burn_in, M=M,
        n=n, K=K, seed=seed, m=m, tol_rho=tol, interval=interval,
    )
    cloud2, _, tres2 = cloud_for_rotation(
        family, rho2_target, depth=depth, burn_in=burn_in, M=M,
        n=n, K=K, seed=seed, m=m, tol_rho=tol, interval=interval,
    )
    rho1, rho2 = tres1.achieved_rho, tres2.achieved_rho
    epsilon = 0.25 * (rho2 - rho1)

    bins1 = np.bincount(
        np.floor(cloud1.points[:, 0] * n_bins).astype(np.int64), minlength=n_bins
    )
    bins2 = np.bincount(
        np.floor(cloud2.points[:, 0] * n_bins).astype(np.int64), minlength=n_bins
    )
    occupancy = np.minimum(bins1, bins2)
    b = int(np.argmax(occupancy))
    if occupancy[b] == 0:
        raise NumericDegeneracyError("no theta-bin shared by both clouds")
    theta = (b + 0.5) / n_bins

    x1 = _bin_representative(cloud2, b, n_bins)  # faster minimal set
    x2 = _bin_representative(cloud1, b, n_bins)
    if x2 <= x1:
        x2 += 1.0
    if not (x2 - 1.0 < x1 < x2):
        raise NumericDegeneracyError("representatives coincide; cannot order x2-1 < x1 < x2")

    N = _first_spread_horizon(family, theta, x1, x2, HORIZON_CAP)
    if N is None:
        raise CertificateFailureError(
            f"orbit spread never exceeded 4 within {HORIZON_CAP} steps "
            "(parameters too close to the monotone regime)"
        )
    analytic_cap = math.floor(10.0 / (rho2 - rho1)) + 1
    if N > math.ceil(1.2 * analytic_cap):
        raise CertificateFailureError(
            f"empirical horizon N={N} exceeds the analytic bound {analytic_cap} "
            "with 20% slack"
        )

    cert = EntropyCertificate(
        rho1=rho1, rho2=rho2, epsilon=epsilon, N=N, lower_bound=math.log(2.0) / N,
        itinerary_counts=(), theta_bin=b, n_theta_bins=n_bins, theta=theta,
        x1=x1, x2=float(x2 % 1.0), t1=tres1.t, t2=tres2.t,
    )
    counts = itinerary_count(cert, family, n_max=n_max)
    return EntropyCertificate(
        rho1=rho1, rho2=rho2, epsilon=epsilon, N=N, lower_bound=math.log(2.0) / N,
        itinerary_counts=tuple(counts), theta_bin=b, n_theta_bins=n_bins, theta=theta,
        x1=x1, x2=float(x2 % 1.0), t1=tres1.t, t2=tres2.t,
    )


def itinerary_count(
    cert: EntropyCertificate,
    family: FibreFamily,
    n_max: int = 5,
    dense: int = 1 << 18,
    surj_dense: int = 1 << 16,
) -> list[int]:
    """Number of realised itineraries through the unit intervals [0,1] and
    [2,3] of the 4-fold cover at position multiples of the certified horizon,
    counted on a dense sample; the N-step image of every unit interval is
    first checked to sweep the whole cover circle."""
    if n_max < 0 or n_max > 8:
        raise InvalidArgumentError("n_max must lie in [0, 8]")
    k = cert.k
    N = cert.N
    theta = cert.theta
    omega = family.omega

    # surjectivity of each N-step block on every unit interval
    for block in range(n_max + 1):
        th_start = wrap_mod1(theta + block * N * omega)
        for i in range(k):
            xs = i - 1.0 + np.arange(surj_dense + 1) / surj_dense
            th = th_start
            ys = xs.astype(float)
            for _ in range(N):
                ys = family.fibre_lift_array(np.full(ys.shape, th), ys)
                th = wrap_mod1(th + omega)
            spread = float(ys.max() - ys.min())
            if spread <= float(k):
                raise InconsistentCertificateError(
                    f"N-step image of unit interval {i} at block {block} spreads "
                    f"only {spread:.3f} <= {k}; certificate horizon is inconsistent"
                )

    # itinerary codes on a dense sample of the cover circle
    xs = (np.arange(dense) + 0.5) * (k / dense)
    th = theta
    z = np.mod(xs, float(k))
    codes = np.zeros(dense, dtype=np.int64)
    alive = np.ones(dense, dtype=bool)
    counts = []
    for level in range(n_max + 1):
        in_low = z <= 1.0
        in_high = (z >= 2.0) & (z <= 3.0)
        alive &= in_low | in_high
        codes = codes | (in_high.astype(np.int64) << level)
        mask = (1 << (level + 1)) - 1
        counts.append(int(np.unique(codes[alive] & mask).size))
        if level == n_max:
            break
        for _ in range(N):
            base = np.mod(z, 1.0)
            disp = family.fibre_lift_array(np.full(dense, th), base) - base
            z = np.mod(z + disp, float(k))
            th = wrap_mod1(th + omega)
    return counts


# ---------------------------------------------------------------------------
# growth-model check
# ---------------------------------------------------------------------------


def _growth_fit(horizons, counts):
    narr = np.asarray(horizons, dtype=float)
    S = np.asarray(counts, dtype=float)
    A = np.column_stack([np.ones_like(narr), narr])
    logS = np.log(S)
    lin_coef, *_ = np.linalg.lstsq(A, S, rcond=None)
    lin_pred = np.clip(A @ lin_coef, 1.0, None)
    sse_lin = float(((np.log(lin_pred) - logS) ** 2).sum())
    exp_coef, *_ = np.linalg.lstsq(A, logS, rcond=None)
    sse_exp = float(((A @ exp_coef - logS) ** 2).sum())
    rate_coef, *_ = np.linalg.lstsq(A, np.log(S / (narr + 1.0)), rcond=None)
    return sse_lin, sse_exp, float(rate_coef[1])


def monotone_entropy_check(
    obj,
    eps: float = 0.05,
    horizons: tuple[int, ...] = (10, 20, 40, 80),
    sample: int = 2000,
    seed: int = 0,
    theta0: float = 0.0,
    family: FibreFamily | None = None,
    fmap: ForcedMonotoneMap | None = None,
    rate_tol: float = 0.01,
) -> GrowthReport:
    """Separated-count growth check: single-fibre counts for a fibre-monotone
    map (or counts restricted to a cloud) should fit linear growth, with the
    normalised exponential rate (slope of log(S/(n+1))) at most rate_tol.

    A cloud restriction is iterated under the monotone interpolant the cloud
    was built with (the two maps agree on the minimal set, and the
    interpolant keeps numerically perturbed orbits on it; the full map's
    ambient expansion would amplify rounding off the set within a few dozen
    steps)."""
    horizons = tuple(int(h) for h in horizons)
    if len(horizons) < 4:
        raise InvalidArgumentError("need at least 4 horizons for the growth fit")
    if any(h < 0 for h in horizons) or list(horizons) != sorted(set(horizons)):
        raise InvalidArgumentError("horizons must be strictly increasing and >= 0")

    if isinstance(obj, MinimalSetCloud):
        if fmap is None:
            if family is None:
                raise InvalidArgumentError(
                    "cloud restriction needs the interpolant (fmap) or the family"
                )
            fmap = forced_map(family, obj.t, DEFAULT_GRID_M)
        scope = "cloud"
        counts = [
            separation_counts(
                fmap, "cloud", h, eps, sample=sample, seed=seed, cloud=obj
            ).S_lower
            for h in horizons
        ]
    elif isinstance(obj, ForcedMonotoneMap):
        scope = "fibre"
        counts = [
            separation_counts(
                obj, "fibre", h, eps, sample=sample, seed=seed, theta0=theta0
            ).S_lower
            for h in horizons
        ]
    else:
        raise InvalidArgumentError("obj must be a ForcedMonotoneMap or MinimalSetCloud")

    sse_lin, sse_exp, rate = _growth_fit(horizons, counts)
    linear_wins = sse_lin <= sse_exp
    return GrowthReport(
        horizons=horizons,
        counts=tuple(counts),
        eps=eps,
        scope=scope,
        sse_linear=sse_lin,
        sse_exponential=sse_exp,
        rate=rate,
        linear_wins=linear_wins,
        passed=bool(linear_wins and rate <= rate_tol),
    )
