"""Pure numpy/python kernels; reference semantics for the compiled backend.

Every function here must produce bit-identical output to its _kernels_c
counterpart. Where the compiled code calls libm sin inside a loop
(backward_orbit_exact), this file calls math.sin, which binds to the same
libm; everywhere else transcendentals arrive precomputed from the caller.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def ensemble_steps(gv_ext, r, w, forcing):
    """Advance an ensemble of monotone-grid-map orbits through one forcing block.

    gv_ext: (m+1,) grid lift samples with the wrap value gv[0]+1 appended.
    r, w:   (K,) mod-1 positions and float winding counts, updated in place.
    forcing: (steps, K) additive fibre forcing per step per member.
    """
    m = gv_ext.shape[0] - 1
    steps = forcing.shape[0]
    for s in range(steps):
        sm = r * m
        j = sm.astype(np.int64)
        frac = sm - j
        lo = gv_ext[j]
        hi = gv_ext[j + 1]
        val = lo + frac * (hi - lo) + forcing[s]
        fl = np.floor(val)
        w += fl
        r[:] = val - fl
        over = r >= 1.0
        if over.any():
            r[over] -= 1.0
            w[over] += 1.0


def backward_orbit_exact(c, p, q, tau, alpha, forcing, x_end):
    """Backward orbit of the exact Arnold interpolant via its generalized
    inverse (leftmost solution), one bisection to float limit per step.

    forcing: (nsteps,) additive fibre forcing at each backward step.
    Returns (nsteps,) mod-1 positions, deepest step last.
    """
    a2p = alpha / TWO_PI
    nsteps = forcing.shape[0]
    out = np.empty(nsteps)
    y = x_end

    def gt(x):
        k = math.floor(x - p)
        rr = x - k
        if rr <= q:
            return c + k
        return rr + tau + a2p * math.sin(TWO_PI * rr) + k

    for s in range(nsteps):
        z = y - forcing[s]
        lo = z - (tau + a2p) - 2.0
        hi = z - tau + a2p + 2.0
        while gt(lo) >= z:
            lo -= 1.0
        while gt(hi) < z:
            hi += 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if gt(mid) >= z:
                hi = mid
            else:
                lo = mid
        x = hi - math.floor(hi)
        out[s] = x
        y = x
    return out


def backward_orbit_grid(gv, forcing, x_end):
    """Backward orbit of a monotone grid lift via searchsorted inversion with
    an in-cell linear solve. forcing as in backward_orbit_exact."""
    m = gv.shape[0]
    base = gv[0]
    nsteps = forcing.shape[0]
    out = np.empty(nsteps)
    y = x_end
    for s in range(nsteps):
        z = y - forcing[s]
        k = math.floor(z - base)
        zr = z - k
        if zr < base:
            k -= 1
            zr += 1.0
        elif zr >= base + 1.0:
            k += 1
            zr -= 1.0
        j = int(np.searchsorted(gv, zr, side="left"))
        if j == 0:
            x = 0.0
        elif j >= m:
            lo_v = gv[m - 1]
            hi_v = base + 1.0
            x = (m - 1 + (zr - lo_v) / (hi_v - lo_v)) / m
        else:
            lo_v = gv[j - 1]
            hi_v = gv[j]
            if hi_v > lo_v:
                x = (j - 1 + (zr - lo_v) / (hi_v - lo_v)) / m
            else:
                x = j / m
        x = x - math.floor(x)
        out[s] = x
        y = x
    return out


def greedy_separated(th_orbits, x_orbits, eps, circ_x):
    """Greedy pass selecting orbit indices pairwise >= eps apart in the
    max-over-time product metric (theta circular mod 1, x circular mod circ_x).

    th_orbits, x_orbits: (n+1, P) orbit coordinate arrays.
    Returns an int64 index array of the accepted candidates, in index order.
    """
    P = th_orbits.shape[1]
    accepted = []
    for cand in range(P):
        blocked = False
        tc = th_orbits[:, cand]
        xc = x_orbits[:, cand]
        for a in accepted:
            dth = np.abs(tc - th_orbits[:, a]) % 1.0
            np.minimum(dth, 1.0 - dth, out=dth)
            dx = np.abs(xc - x_orbits[:, a]) % circ_x
            np.minimum(dx, circ_x - dx, out=dx)
            np.maximum(dth, dx, out=dth)
            if dth.max() < eps:
                blocked = True
                break
        if not blocked:
            accepted.append(cand)
    return np.asarray(accepted, dtype=np.int64)
