"""Compiled kernels against the pure-Python fallback paths."""

import math
import os
import random
import subprocess
import sys

import pytest

from nullhelix import _backend, jets
from nullhelix.jets import Jet


def _reference_mul(a, b):
    n = min(len(a), len(b))
    return tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n))


requires_compiled = pytest.mark.skipif(
    _backend.kernels is None, reason="compiled kernels not available"
)


@requires_compiled
def test_kernel_mul_matches_reference():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randrange(1, 7)
        a = tuple(rng.uniform(-3, 3) for _ in range(n))
        b = tuple(rng.uniform(-3, 3) for _ in range(n))
        assert _backend.kernels.mul(a, b) == _reference_mul(a, b)


@requires_compiled
def test_kernel_transcendentals_match_generic():
    """Generic duck-typed path and compiled path agree bitwise.

    Wrapping the coefficients in inner constant jets forces the generic path
    while computing the same numbers.
    """
    rng = random.Random(4)

    def lift(x):
        return Jet(tuple(Jet.constant(c, 0) for c in x.coeffs))

    def unlift(x):
        return tuple(c.coeffs[0] for c in x.coeffs)

    for _ in range(25):
        n = rng.randrange(1, 6)
        coeffs = [rng.uniform(0.3, 2.0)] + [rng.uniform(-1, 1) for _ in range(n)]
        x = Jet(coeffs)
        assert unlift(jets.exp(lift(x))) == jets.exp(x).coeffs
        assert unlift(jets.log(lift(x))) == jets.log(x).coeffs
        assert unlift(jets.sqrt(lift(x))) == jets.sqrt(x).coeffs
        assert unlift(jets.sin(lift(x))) == jets.sin(x).coeffs
        assert unlift(jets.cos(lift(x))) == jets.cos(x).coeffs
        assert unlift(jets.sinh(lift(x))) == jets.sinh(x).coeffs
        assert unlift(jets.cosh(lift(x))) == jets.cosh(x).coeffs
        y = Jet([rng.uniform(-2, 2) for _ in range(n + 1)])
        assert unlift(lift(y) / lift(x)) == (y / x).coeffs
        assert unlift(lift(y) * lift(x)) == (y * x).coeffs


@requires_compiled
def test_rk4_kernel_matches_python_loop(flat3):
    from nullhelix import helix as hx

    spec = hx.HelixSpec(0.2, 1.1, -0.4, (0, 0, 0), (1, 0, 1),
                        (-0.5, 0, 0.5), (0, 1, 0), metric=flat3)
    state = tuple(spec.initial_point + spec.zeta0 + spec.n0 + spec.w0)
    fast = _backend.kernels.rk4_frame_flat(state, spec.h, spec.k1, spec.k2,
                                           1e-3, 500)
    # force the generic python loop
    y = list(state)
    for _ in range(500):
        a = hx._rhs(flat3, spec.h, spec.k1, spec.k2, y)
        b = hx._rhs(flat3, spec.h, spec.k1, spec.k2,
                    [y[i] + 0.5e-3 * a[i] for i in range(12)])
        c = hx._rhs(flat3, spec.h, spec.k1, spec.k2,
                    [y[i] + 0.5e-3 * b[i] for i in range(12)])
        d = hx._rhs(flat3, spec.h, spec.k1, spec.k2,
                    [y[i] + 1e-3 * c[i] for i in range(12)])
        y = [y[i] + 1e-3 * (a[i] + 2 * b[i] + 2 * c[i] + d[i]) / 6.0
             for i in range(12)]
    assert max(abs(p - q) for p, q in zip(fast, y)) < 1e-13


def test_pure_fallback_selected_via_env(tmp_path):
    """NULLHELIX_PURE=1 picks the fallback and reproduces the same numbers."""
    script = (
        "import nullhelix, math\n"
        "from nullhelix import jets\n"
        "from nullhelix.semimetric import MetricField\n"
        "from nullhelix.nullframe import NullCurve, build_frame, curvatures_at\n"
        "g = MetricField.diag([-1, -1, 1])\n"
        "c = NullCurve.position(g, ['cos(t)', 'sin(t)', 't'], (0.0, 7.0))\n"
        "fr = build_frame(c, 1.25)\n"
        "cs = curvatures_at(c, fr, 1.25)\n"
        "print(nullhelix.BACKEND)\n"
        "print(repr((cs.h, cs.k1, cs.k2)))\n"
        "print(repr(jets.exp(jets.Jet.variable(0.3, 5)).coeffs))\n"
    )
    env = dict(os.environ)
    env.pop("NULLHELIX_PURE", None)
    out_fast = subprocess.run([sys.executable, "-c", script], env=env,
                              capture_output=True, text=True, check=True).stdout
    env["NULLHELIX_PURE"] = "1"
    out_pure = subprocess.run([sys.executable, "-c", script], env=env,
                              capture_output=True, text=True, check=True).stdout
    lines_fast = out_fast.splitlines()
    lines_pure = out_pure.splitlines()
    assert lines_pure[0] == "pure"
    assert lines_fast[1:] == lines_pure[1:]
