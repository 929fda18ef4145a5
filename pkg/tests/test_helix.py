import math
import random

import pytest

from nullhelix import helix as hx
from nullhelix import nullframe as nf
from nullhelix.helix import (
    GramDriftError,
    HelixSpec,
    constancy_report,
    cubic_identity_residual,
    extract_curvatures,
    metric_identity_suite,
    synthesize,
)
from nullhelix.nullframe import NullCurve, build_frame, curvatures_at, frame_field

from conftest import random_helix_spec, uniform_grid

TWO_PI = 2.0 * math.pi


def test_spec_validates_initial_frame(flat3):
    with pytest.raises(ValueError, match="Gram"):
        HelixSpec(0.0, 1.0, -0.5, (0, 0, 0), (0, 1, 1), (0, -0.5, 0.5), (-1, 0.2, 0),
                  metric=flat3)


def test_synthesize_reproduces_circle_helix(c1_spec):
    grid = uniform_grid(0.0, 1.0, 11)
    trace = synthesize(c1_spec, grid, step=1e-3)
    x = trace.points[-1]
    assert x == pytest.approx((math.cos(1.0), math.sin(1.0), 1.0), abs=1e-6)
    assert max(trace.gram_drift) < 1e-10


def test_synthesize_null_geodesic(flat3):
    spec = HelixSpec(0.0, 0.0, 0.0, (0, 0, 0), (1, 0, 1), (-0.5, 0, 0.5), (0, 1, 0),
                     metric=flat3)
    trace = synthesize(spec, uniform_grid(0.0, 2.0, 5), step=1e-2)
    assert trace.points[-1] == pytest.approx((2.0, 0.0, 2.0), abs=1e-12)
    for i in range(len(trace)):
        assert trace.zetas[i] == pytest.approx((1.0, 0.0, 1.0), abs=1e-12)
        assert trace.ws[i] == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)


def test_synthesize_argument_errors(c1_spec):
    with pytest.raises(ValueError, match="step"):
        synthesize(c1_spec, [0.0, 1.0], step=0.0)
    with pytest.raises(ValueError, match="step"):
        synthesize(c1_spec, [0.0, 1.0], step=-1e-3)
    with pytest.raises(ValueError, match="increasing"):
        synthesize(c1_spec, [0.0, 1.0, 0.5], step=1e-3)


def test_rk4_convergence_order(c1_spec):
    """Halving the step cuts the closed-form error by about 2^4."""
    errors = []
    for step in (0.02, 0.01):
        trace = synthesize(c1_spec, [0.0, 1.0], step=step)
        x = trace.points[-1]
        exact = (math.cos(1.0), math.sin(1.0), 1.0)
        errors.append(max(abs(a - b) for a, b in zip(x, exact)))
    order = math.log2(errors[0] / errors[1])
    assert order >= 3.7


def test_error_estimate_tracks_truncation(c1_spec):
    coarse = synthesize(c1_spec, [0.0, 1.0], step=0.05)
    fine = synthesize(c1_spec, [0.0, 1.0], step=0.01)
    assert coarse.err_est[-1] > fine.err_est[-1] > 0.0


def test_gram_drift_limit_enforced(flat3):
    spec = HelixSpec(0.0, 1.0, -0.5, (1, 0, 0), (0, 1, 1), (0, -0.5, 0.5), (-1, 0, 0),
                     metric=flat3)
    with pytest.raises(GramDriftError):
        # absurd step size destroys orthonormality quickly
        synthesize(spec, uniform_grid(0.0, 40.0, 5), step=2.0, drift_limit=1e-12)


def test_projection_restores_gram(c1_spec):
    base = synthesize(c1_spec, uniform_grid(0.0, 5.0, 51), step=1e-2)
    proj = synthesize(c1_spec, uniform_grid(0.0, 5.0, 51), step=1e-2,
                      project_every=10)
    assert max(proj.gram_drift) <= max(base.gram_drift) + 1e-15
    # zeta is untouched by projection
    assert proj.zetas[-1] == pytest.approx(base.zetas[-1], abs=1e-9)


def test_roundtrip_random_specs(flat3, rng):
    """Trace re-extraction recovers the spec constants (reduced-size variant)."""
    for _ in range(5):
        spec = random_helix_spec(rng, flat3)
        grid = uniform_grid(0.0, 2.0, 2001)
        trace = synthesize(spec, grid, step=1e-3)
        samples = extract_curvatures(trace)
        assert max(abs(s.h - spec.h) for s in samples) < 1e-6
        assert max(abs(s.k1 - spec.k1) for s in samples) < 1e-6
        assert max(abs(s.k2 - spec.k2) for s in samples) < 1e-6


def test_reseeded_extraction_keeps_k1_magnitude(flat3, rng):
    spec = random_helix_spec(rng, flat3)
    trace = synthesize(spec, uniform_grid(0.0, 2.0, 1001), step=1e-3)
    plain = extract_curvatures(trace)
    reseeded = extract_curvatures(trace, reseed=True)
    for a, b in zip(plain, reseeded):
        assert abs(a.k1) == pytest.approx(abs(b.k1), abs=1e-8)


def test_cubic_identity_on_circle_helix(c1_curve):
    for t in (0.3, 2.0, 4.7):
        fr = build_frame(c1_curve, t)
        cs = curvatures_at(c1_curve, fr, t)
        assert cs.h ** 2 + 2 * cs.k1 * cs.k2 == pytest.approx(-1.0, abs=1e-12)
        assert cubic_identity_residual(c1_curve, fr, cs, t) <= 1e-8


def test_cubic_identity_rejects_non_helix(flat3):
    c = NullCurve.tangent(flat3, ["cos(t^2)", "sin(t^2)", "1"], (0, 0, 0), (0.0, 3.0))
    fr = build_frame(c, 1.0)
    cs = curvatures_at(c, fr, 1.0)
    assert cubic_identity_residual(c, fr, cs, 1.0) > 0.01


def test_cubic_identity_geodesic_exact_zero(flat3):
    line = NullCurve.position(flat3, ["t", "0", "t"], (0.0, 5.0))
    fr = build_frame(line, 1.0)
    cs = curvatures_at(line, fr, 1.0)
    assert cubic_identity_residual(line, fr, cs, 1.0) == 0.0


def test_metric_identity_suite_circle(c1_curve):
    t = 2.2
    fr = build_frame(c1_curve, t)
    cs = curvatures_at(c1_curve, fr, t)
    rep = metric_identity_suite(c1_curve, fr, cs, t)
    assert rep.scalars == pytest.approx((-1.0, -0.25, -1.0, 0.5), abs=1e-9)
    assert rep.targets == pytest.approx((-1.0, -0.25, -1.0, 0.5), abs=1e-12)
    assert max(rep.deviations) <= 1e-9


def test_metric_identity_suite_geodesic(flat3):
    line = NullCurve.position(flat3, ["t", "0", "t"], (0.0, 5.0))
    fr = build_frame(line, 1.0)
    cs = curvatures_at(line, fr, 1.0)
    rep = metric_identity_suite(line, fr, cs, 1.0)
    assert rep.scalars == (0.0, 0.0, 0.0, 0.0)
    assert rep.targets == (0.0, 0.0, 0.0, 0.0)


def test_identity_suite_on_synthesized_trace(flat3):
    spec = HelixSpec(0.3, 1.0, 0.7, (0, 0, 0), (1, 0, 1), (-0.5, 0, 0.5), (0, 1, 0),
                     metric=flat3)
    trace = synthesize(spec, uniform_grid(0.0, 2.0, 1001), step=1e-3)
    reports = hx.identity_reports_from_trace(trace)
    assert reports
    first = reports[0]
    assert first.targets == pytest.approx((-1.0, -0.49, 1.4, -0.79), abs=1e-9)
    assert max(max(r.deviations) for r in reports) <= 1e-6


def test_cubic_along_synthesized_traces(flat3, rng):
    for _ in range(3):
        spec = random_helix_spec(rng, flat3)
        trace = synthesize(spec, uniform_grid(0.0, 2.0, 2001), step=1e-3)
        residuals = hx.cubic_residuals_from_trace(trace)
        assert max(r for _, r in residuals) <= 1e-6


def test_cubic_identity_accepts_trace_input(flat3, c1_spec):
    trace = synthesize(c1_spec, uniform_grid(0.0, 2.0, 2001), step=1e-3)
    samples = extract_curvatures(trace)
    mid = samples[len(samples) // 2]
    res = cubic_identity_residual(trace, None, mid, mid.t)
    assert res <= 1e-6
    with pytest.raises(ValueError, match="interior"):
        cubic_identity_residual(trace, None, mid, -5.0)


def test_constancy_report(c1_curve, flat3):
    frames = frame_field(c1_curve, uniform_grid(0.0, TWO_PI, 50))
    samples = [curvatures_at(c1_curve, f, f.t) for f in frames]
    rep = constancy_report(samples)
    assert rep["h"] <= 1e-9 and rep["k1"] <= 1e-9 and rep["k2"] <= 1e-9
    c = NullCurve.tangent(flat3, ["cos(t^2)", "sin(t^2)", "1"], (0, 0, 0), (0.1, 3.0))
    frames = frame_field(c, uniform_grid(0.5, 2.0, 40))
    samples = [curvatures_at(c, f, f.t) for f in frames]
    rep = constancy_report(samples)
    assert rep["k1"] == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(ValueError):
        constancy_report(samples[:1])
    with pytest.raises(ValueError):
        constancy_report([])


def test_frames_reconstructible_along_synthesized_traces(flat3, rng):
    """Converse scenario: a synthesized trace admits a valid frame everywhere.

    The policy construction applied to the traced tangents must produce
    vectors satisfying all six frame conditions at every sample.
    """
    from nullhelix.nullframe import NullFrame

    spec = random_helix_spec(rng, flat3)
    trace = synthesize(spec, uniform_grid(0.0, 2.0, 201), step=1e-3)
    ns, ws = hx._reseeded_frames(flat3, trace.points, trace.zetas,
                                 nf.ScreenPolicy())
    for i in range(len(trace.points)):
        frame = NullFrame(trace.times[i], trace.points[i], trace.zetas[i],
                          ns[i], ws[i])
        assert frame.max_gram_residual(flat3) <= 1e-9


def test_gram_drift_stays_tiny_without_projection(c1_spec):
    trace = synthesize(c1_spec, uniform_grid(0.0, 5.0, 251), step=1e-3)
    assert max(trace.gram_drift) < 1e-9


def test_gram_drift_bounded_by_linear_step4_growth(c1_spec):
    """Drift admits a modest envelope C * t * step^4 (projection off)."""
    for step in (1e-2, 5e-3):
        trace = synthesize(c1_spec, uniform_grid(0.0, 5.0, 51), step=step)
        for t, drift in zip(trace.times[1:], trace.gram_drift[1:]):
            assert drift <= 100.0 * t * step ** 4


def test_curved_chart_synthesis_matches_flat_in_disguise():
    """Same helix integrated on a curved-entry chart reduces correctly.

    The chart metric diag(-1, -1, 1 + x3^2) restricted to the plane x3 = 0
    has vanishing x3-motion only for curves with zeta3 = 0; instead compare a
    short integration against the pure-Python path on the flat chart, which
    exercises the curved right-hand side with nonzero connection terms.
    """
    from nullhelix.semimetric import MetricField

    g = MetricField.from_texts(
        3, [["-1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1 + x3^2"]]
    )
    spec = HelixSpec(0.0, 1.0, -0.5, (1.0, 0.0, 0.0), (0.0, 1.0, 1.0),
                     (0.0, -0.5, 0.5), (-1.0, 0.0, 0.0), metric=g)
    trace = synthesize(spec, uniform_grid(0.0, 0.5, 51), step=1e-3)
    assert max(trace.gram_drift) < 1e-8
    samples = extract_curvatures(trace)
    # frame equations hold with the requested constants on the curved chart
    assert max(abs(s.k1 - 1.0) for s in samples) < 1e-5
