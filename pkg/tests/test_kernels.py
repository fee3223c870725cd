"""Bit-identical parity between the compiled and pure-python kernel backends."""
import importlib
import math

import numpy as np
import pytest

from rotorbit import _kernels
from rotorbit._kernels import _impl_py

_c = None
try:
    _c = importlib.import_module("rotorbit._kernels._kernels_c")
except ImportError:
    pass

needs_c = pytest.mark.skipif(_c is None, reason="compiled backend not built")


def _monotone_lift_samples(rng, m):
    """Random strictly monotone degree-one lift sampled on j/m."""
    x = np.arange(m) / m
    a = rng.uniform(0.0, 0.95)
    phase = rng.uniform(0.0, 1.0)
    off = rng.uniform(-2.0, 2.0)
    return x + off + (a / (2.0 * math.pi)) * np.sin(2.0 * math.pi * (x + phase))


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class TestBackendSelection:
    def test_active_backend_is_declared(self):
        assert _kernels.BACKEND in ("c", "python")
        assert callable(_kernels.ensemble_steps)

    @needs_c
    def test_compiled_backend_available_here(self):
        assert _kernels.BACKEND == "c"


@needs_c
class TestParity:
    def test_ensemble_steps(self):
        rng = np.random.default_rng(1)
        for m in (16, 64, 257):
            gv = _monotone_lift_samples(rng, m)
            gv_ext = _readonly(np.append(gv, gv[0] + 1.0))
            K, steps = 33, 40
            r0 = rng.uniform(0.0, 1.0, K)
            w0 = np.floor(rng.uniform(-3.0, 3.0, K))
            forcing = _readonly(rng.uniform(-0.7, 0.7, (steps, K)))
            r1, w1 = r0.copy(), w0.copy()
            _impl_py.ensemble_steps(gv_ext, r1, w1, forcing)
            r2, w2 = r0.copy(), w0.copy()
            _c.ensemble_steps(gv_ext, r2, w2, forcing)
            assert r1.tobytes() == r2.tobytes()
            assert w1.tobytes() == w2.tobytes()

    def test_backward_orbit_exact(self):
        rng = np.random.default_rng(2)
        for _ in range(12):
            tau = rng.uniform(0.0, 1.0)
            alpha = rng.uniform(1.05, 4.0)
            # plateau data of the Arnold upper envelope for this (tau, alpha)
            from rotorbit.plateau import arnold_plateau_exact

            c, p, q = arnold_plateau_exact(tau, alpha, 1.0)
            forcing = _readonly(rng.uniform(-0.5, 0.5, 60))
            x_end = rng.uniform(0.0, 1.0)
            o1 = _impl_py.backward_orbit_exact(c, p, q, tau, alpha, forcing, x_end)
            o2 = _c.backward_orbit_exact(c, p, q, tau, alpha, forcing, x_end)
            assert o1.tobytes() == o2.tobytes()

    def test_backward_orbit_grid(self):
        rng = np.random.default_rng(3)
        for m in (32, 128, 1024):
            gv = _readonly(_monotone_lift_samples(rng, m))
            forcing = _readonly(rng.uniform(-0.5, 0.5, 50))
            x_end = rng.uniform(0.0, 1.0)
            o1 = _impl_py.backward_orbit_grid(gv, forcing, x_end)
            o2 = _c.backward_orbit_grid(gv, forcing, x_end)
            assert o1.tobytes() == o2.tobytes()

    def test_greedy_separated(self):
        rng = np.random.default_rng(4)
        for circ_x, P, n in ((1.0, 80, 5), (4.0, 120, 9), (1.0, 200, 0)):
            th = _readonly(rng.uniform(0.0, 1.0, (n + 1, P)))
            x = _readonly(rng.uniform(0.0, circ_x, (n + 1, P)))
            for eps in (0.01, 0.1, 0.4):
                i1 = _impl_py.greedy_separated(th, x, eps, circ_x)
                i2 = np.asarray(_c.greedy_separated(th, x, eps, circ_x))
                assert i1.tolist() == i2.tolist()


class TestGreedySemantics:
    def test_matches_quadratic_reference(self):
        rng = np.random.default_rng(5)
        th = rng.uniform(0.0, 1.0, (4, 30))
        x = rng.uniform(0.0, 1.0, (4, 30))
        eps = 0.15

        def circ(a, b, c):
            d = np.abs(a - b) % c
            return np.minimum(d, c - d)

        accepted = []
        for cand in range(30):
            ok = True
            for a in accepted:
                d = np.maximum(
                    circ(th[:, cand], th[:, a], 1.0), circ(x[:, cand], x[:, a], 1.0)
                )
                if d.max() < eps:
                    ok = False
                    break
            if ok:
                accepted.append(cand)
        got = _kernels.greedy_separated(th, x, eps, 1.0)
        assert list(got) == accepted
        # result is pairwise separated and maximal in greedy order
        for i, a in enumerate(accepted):
            for b in accepted[:i]:
                d = np.maximum(
                    circ(th[:, a], th[:, b], 1.0), circ(x[:, a], x[:, b], 1.0)
                ).max()
                assert d >= eps

    def test_duplicate_points_collapse_to_one(self):
        th = np.zeros((3, 10))
        x = np.full((3, 10), 0.25)
        assert list(_kernels.greedy_separated(th, x, 0.05, 1.0)) == [0]


class TestHighLevelBackendAgreement:
    """The public API must give identical numbers under either backend; this
    is enforced end-to-end by running a worker with ROTORBIT_PURE=1."""

    def test_rotation_interval_identical(self, tmp_path):
        import json
        import os
        import subprocess
        import sys

        script = tmp_path / "probe.py"
        script.write_text(
            "import json, sys\n"
            "import rotorbit as rb\n"
            "from rotorbit import _kernels\n"
            "fam = rb.FibreFamily(kind='arnold', tau=0.2, alpha=1.5, beta=1.5)\n"
            "ri = rb.rotation_interval(fam, n=20000, K=10, seed=0, m=2048)\n"
            "print(json.dumps({'backend': _kernels.BACKEND,\n"
            "                  'lo': ri.lo.hex(), 'hi': ri.hi.hex()}))\n"
        )
        outs = {}
        for pure in ("0", "1"):
            env = dict(os.environ, ROTORBIT_PURE=pure)
            r = subprocess.run(
                [sys.executable, str(script)], capture_output=True, text=True, env=env,
            )
            assert r.returncode == 0, r.stderr
            outs[pure] = json.loads(r.stdout)
        if _c is not None:
            assert outs["0"]["backend"] == "c"
        assert outs["1"]["backend"] == "python"
        assert outs["0"]["lo"] == outs["1"]["lo"]
        assert outs["0"]["hi"] == outs["1"]["hi"]
