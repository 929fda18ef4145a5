"""Constant-curvature null helices: synthesis by integration and identity checks.

The frame equations with constant (h, k1, k2) close into the first-order
system

    dx/dt    = zeta
    dzeta/dt = h zeta + k1 w - G(x) zeta zeta
    dn/dt    = -h n   + k2 w - G(x) zeta n
    dw/dt    = k2 zeta + k1 n - G(x) zeta w

with G the connection coefficients, integrated by classical fixed-step RK4.
A shadow integration at half step provides a Richardson error estimate per
sample.  Residual norms are always coordinate-Euclidean: the indefinite metric
can annihilate nonzero errors and must not certify smallness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import semimetric
from ._backend import kernels as _K
from .jets import const_term
from .nullframe import (
    CurvatureSample,
    NullCurve,
    NullFrame,
    ScreenPolicy,
    euclid_norm,
    _aligned_frame_jets,
)
from .semimetric import SemiMetric, bilinear

DRIFT_LIMIT = 1e-4
SPEC_GRAM_TOL = 1e-10


class GramDriftError(RuntimeError):
    """Frame orthonormality drifted past the configured hard limit."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class HelixSpec:
    """Constant curvature functions plus a valid initial frame."""

    h: float
    k1: float
    k2: float
    initial_point: tuple
    zeta0: tuple
    n0: tuple
    w0: tuple
    metric: SemiMetric

    def __post_init__(self):
        for name in ("initial_point", "zeta0", "n0", "w0"):
            object.__setattr__(self, name, tuple(float(c) for c in getattr(self, name)))
        frame = NullFrame(0.0, self.initial_point, self.zeta0, self.n0, self.w0)
        res = frame.max_gram_residual(self.metric)
        if res > SPEC_GRAM_TOL:
            raise ValueError(
                f"initial frame violates the Gram conditions by {res:.3e}"
            )

    @property
    def cubic_factor(self) -> float:
        return self.h * self.h + 2.0 * self.k1 * self.k2


@dataclass(frozen=True)
class HelixTrace:
    """Sampled trajectory of the integrated frame system."""

    spec: HelixSpec
    step: float
    times: tuple
    points: tuple
    zetas: tuple
    ns: tuple
    ws: tuple
    gram_drift: tuple
    err_est: tuple

    def frame_at(self, i: int) -> NullFrame:
        return NullFrame(self.times[i], self.points[i], self.zetas[i],
                         self.ns[i], self.ws[i])

    def __len__(self):
        return len(self.times)


def _rhs(metric: SemiMetric, h, k1, k2, state):
    x = state[0:3]
    z = state[3:6]
    n = state[6:9]
    w = state[9:12]
    gamma = metric.christoffel(list(x))
    out = [0.0] * 12
    for k in range(3):
        gz_z = sum(gamma[k][i][j] * z[i] * z[j] for i in range(3) for j in range(3))
        gz_n = sum(gamma[k][i][j] * z[i] * n[j] for i in range(3) for j in range(3))
        gz_w = sum(gamma[k][i][j] * z[i] * w[j] for i in range(3) for j in range(3))
        out[k] = z[k]
        out[3 + k] = h * z[k] + k1 * w[k] - gz_z
        out[6 + k] = -h * n[k] + k2 * w[k] - gz_n
        out[9 + k] = k2 * z[k] + k1 * n[k] - gz_w
    return out


def _rk4_steps(metric, h, k1, k2, state, dt, nsteps):
    if metric.is_constant and _K is not None:
        return list(_K.rk4_frame_flat(tuple(state), h, k1, k2, dt, nsteps))
    y = list(state)
    for _ in range(nsteps):
        a = _rhs(metric, h, k1, k2, y)
        b = _rhs(metric, h, k1, k2, [y[i] + 0.5 * dt * a[i] for i in range(12)])
        c = _rhs(metric, h, k1, k2, [y[i] + 0.5 * dt * b[i] for i in range(12)])
        d = _rhs(metric, h, k1, k2, [y[i] + dt * c[i] for i in range(12)])
        y = [y[i] + dt * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]) / 6.0 for i in range(12)]
    return y


def _project_frame(metric: SemiMetric, state):
    """Restore the Gram conditions for N and W, leaving zeta untouched."""
    x = state[0:3]
    z = state[3:6]
    n = list(state[6:9])
    w = list(state[9:12])
    g = metric.matrix_at(x)
    n = [c / bilinear(g, z, n) for c in n]
    nn = bilinear(g, n, n)
    n = [n[i] - 0.5 * nn * z[i] for i in range(3)]
    w = [w[i] - bilinear(g, w, n) * z[i] - bilinear(g, w, z) * n[i] for i in range(3)]
    w2 = -bilinear(g, w, w)
    if w2 <= 0.0:
        raise GramDriftError("projection lost the timelike screen direction", math.nan)
    scale = 1.0 / math.sqrt(w2)
    w = [c * scale for c in w]
    return state[0:6] + n + w


def _gram_drift(metric: SemiMetric, state) -> float:
    frame = NullFrame(0.0, tuple(state[0:3]), tuple(state[3:6]),
                      tuple(state[6:9]), tuple(state[9:12]))
    return frame.max_gram_residual(metric)


def synthesize(spec: HelixSpec, grid, step: float, project_every: int = 0,
               drift_limit: float = DRIFT_LIMIT) -> HelixTrace:
    """Integrate the frame system over a sample grid with fixed-step RK4.

    ``grid`` must be increasing; within each segment the step is
    ``span / ceil(span / step)`` so samples are hit exactly.  ``project_every``
    re-projects N and W every that many integration steps (0 disables).  A
    half-step shadow integration supplies the per-sample error estimate.
    """
    grid = [float(t) for t in grid]
    if len(grid) < 1:
        raise ValueError("grid must contain at least one sample")
    if step <= 0.0:
        raise ValueError("step must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    metric = spec.metric
    h, k1, k2 = spec.h, spec.k1, spec.k2
    state = list(spec.initial_point) + list(spec.zeta0) + list(spec.n0) + list(spec.w0)
    shadow = list(state)
    times, points, zetas, ns, ws, drifts, errs = [], [], [], [], [], [], []
    steps_done = 0

    def record(t, full, half):
        drift = _gram_drift(metric, full)
        if drift > drift_limit:
            raise GramDriftError(
                f"Gram drift {drift:.3e} exceeds {drift_limit} at t = {t}", t
            )
        times.append(t)
        points.append(tuple(full[0:3]))
        zetas.append(tuple(full[3:6]))
        ns.append(tuple(full[6:9]))
        ws.append(tuple(full[9:12]))
        drifts.append(drift)
        errs.append(
            math.sqrt(sum((a - b) ** 2 for a, b in zip(full, half))) / 15.0
        )

    record(grid[0], state, shadow)
    for ta, tb in zip(grid, grid[1:]):
        span = tb - ta
        nsub = max(1, int(math.ceil(span / step - 1e-12)))
        dt = span / nsub
        done = 0
        while done < nsub:
            chunk = nsub - done
            if project_every:
                until_proj = project_every - (steps_done % project_every)
                chunk = min(chunk, until_proj)
            state = _rk4_steps(metric, h, k1, k2, state, dt, chunk)
            shadow = _rk4_steps(metric, h, k1, k2, shadow, 0.5 * dt, 2 * chunk)
            done += chunk
            steps_done += chunk
            if project_every and steps_done % project_every == 0:
                state = _project_frame(metric, state)
                shadow = _project_frame(metric, shadow)
        record(tb, state, shadow)
    return HelixTrace(
        spec=spec, step=step, times=tuple(times), points=tuple(points),
        zetas=tuple(zetas), ns=tuple(ns), ws=tuple(ws),
        gram_drift=tuple(drifts), err_est=tuple(errs),
    )


# -- identity checks on closed-form / tangent-mode curves -----------------------


@dataclass(frozen=True)
class IdentityReport:
    """Cubic residual plus the four metric scalars against their targets."""

    t: float
    cubic_residual: float
    scalars: tuple
    targets: tuple
    deviations: tuple


def cubic_identity_residual(curve, frame: NullFrame,
                            sample: CurvatureSample, t: float,
                            policy: ScreenPolicy | None = None) -> float:
    """Euclidean norm of cov^3 zeta - (h^2 + 2 k1 k2) cov zeta at t.

    Accepts a closed-form/tangent-mode curve (exact jet route) or a
    synthesized trace (finite-difference stencil route; the residual is
    reported at the differentiable sample nearest to t).
    """
    factor = sample.h ** 2 + 2.0 * sample.k1 * sample.k2
    if isinstance(curve, HelixTrace):
        residuals = cubic_residuals_from_trace(curve, factor=factor)
        if not residuals:
            raise ValueError("trace too short for the cubic stencil")
        tt, value = min(residuals, key=lambda pair: abs(pair[0] - t))
        spacing = residuals[1][0] - residuals[0][0] if len(residuals) > 1 else 0.0
        if abs(tt - t) > max(spacing, 1e-12):
            raise ValueError(
                f"t = {t} is outside the differentiable interior of the trace"
            )
        return value
    policy = policy or ScreenPolicy()
    fj = _aligned_frame_jets(curve, frame, policy, order=5)
    metric = curve.metric
    c1 = semimetric.covariant_jets(fj.pos, fj.zeta, metric)
    c2 = semimetric.covariant_jets(fj.pos, c1, metric)
    c3 = semimetric.covariant_jets(fj.pos, c2, metric)
    resid = [const_term(c3[i]) - factor * const_term(c1[i]) for i in range(3)]
    return euclid_norm(resid)


def metric_identity_suite(curve: NullCurve, frame: NullFrame,
                          sample: CurvatureSample, t: float,
                          policy: ScreenPolicy | None = None) -> IdentityReport:
    """The four frame-equation metric scalars, their targets, and deviations."""
    policy = policy or ScreenPolicy()
    fj = _aligned_frame_jets(curve, frame, policy, order=5)
    metric = curve.metric
    w = fj.oriented_w()
    cz = semimetric.covariant_jets(fj.pos, fj.zeta, metric)
    cn = semimetric.covariant_jets(fj.pos, fj.n, metric)
    cw = semimetric.covariant_jets(fj.pos, w, metric)
    scalars = (
        const_term(bilinear(fj.gmat, cz, cz)),
        const_term(bilinear(fj.gmat, cn, cn)),
        const_term(bilinear(fj.gmat, cw, cw)),
        const_term(bilinear(fj.gmat, cz, cn)),
    )
    h, k1, k2 = sample.h, sample.k1, sample.k2
    targets = (-k1 * k1, -k2 * k2, 2.0 * k1 * k2, -h * h - k1 * k2)
    deviations = tuple(abs(s - t_) for s, t_ in zip(scalars, targets))
    cubic = cubic_identity_residual(curve, frame, sample, t, policy)
    return IdentityReport(t=t, cubic_residual=cubic, scalars=scalars,
                          targets=targets, deviations=deviations)


def constancy_report(samples) -> dict:
    """Max deviation of each curvature function from its first sample."""
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("constancy needs at least two curvature samples")
    first = samples[0]
    return {
        "h": max(abs(s.h - first.h) for s in samples),
        "k1": max(abs(s.k1 - first.k1) for s in samples),
        "k2": max(abs(s.k2 - first.k2) for s in samples),
    }


# -- finite-difference machinery on traces ---------------------------------------

# 7-point central first-derivative stencil (h^6 accurate)
_D1_OFFSETS = (-3, -2, -1, 1, 2, 3)
_D1_WEIGHTS = (-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0)
FD_RADIUS = 3


def _uniform_spacing(times) -> float:
    dt = times[1] - times[0]
    for a, b in zip(times, times[1:]):
        if abs((b - a) - dt) > 1e-9 * max(1.0, abs(dt)):
            raise ValueError("finite-difference extraction needs a uniform grid")
    return dt


def fd_derivative(values, dt):
    """Stencil first derivative of a sequence of vectors (interior only)."""
    m = len(values)
    dim = len(values[0])
    out = []
    for i in range(FD_RADIUS, m - FD_RADIUS):
        acc = [0.0] * dim
        for off, wgt in zip(_D1_OFFSETS, _D1_WEIGHTS):
            row = values[i + off]
            for d in range(dim):
                acc[d] += wgt * row[d]
        out.append(tuple(a / dt for a in acc))
    return out


def _covariant_sequence(metric: SemiMetric, points, zetas, fields, dt):
    """One covariant-derivative layer along a sampled curve (trims the edges)."""
    n = metric.dim
    deriv = fd_derivative(fields, dt)
    out = []
    for k, dv in enumerate(deriv):
        i = k + FD_RADIUS
        if metric.is_constant:
            out.append(dv)
            continue
        gamma = metric.christoffel(list(points[i]))
        z = zetas[i]
        v = fields[i]
        out.append(tuple(
            dv[a] + sum(gamma[a][b][c] * z[b] * v[c]
                        for b in range(n) for c in range(n))
            for a in range(n)
        ))
    return out


def extract_curvatures(trace: HelixTrace, policy: ScreenPolicy | None = None,
                       reseed: bool = False):
    """Curvature samples re-measured from a trace by finite differences.

    With ``reseed=False`` the traced frames are used directly, which tests
    whether the integrated trajectory still satisfies the frame equations with
    the requested constants.  With ``reseed=True`` the transversal and screen
    vectors are rebuilt per sample from the tangent via the screen policy;
    h and k2 are then policy-relative quantities, |k1| remains invariant.

    Frames of helices with a positive cubic factor grow exponentially, and the
    stencil's roundoff scales with (frame size)/(spacing); differencing at an
    effective spacing near 1e-2 keeps the extraction noise at its floor.
    """
    policy = policy or ScreenPolicy()
    metric = trace.spec.metric
    dt = _uniform_spacing(trace.times)
    stride = max(1, round(0.01 / dt))
    times = trace.times[::stride]
    points = trace.points[::stride]
    zetas = trace.zetas[::stride]
    dt = dt * stride
    if reseed:
        ns, ws = _reseeded_frames(metric, points, zetas, policy)
    else:
        ns, ws = trace.ns[::stride], trace.ws[::stride]
    cz = _covariant_sequence(metric, points, zetas, zetas, dt)
    cn = _covariant_sequence(metric, points, zetas, ns, dt)
    samples = []
    for k in range(len(cz)):
        i = k + FD_RADIUS
        g = metric.matrix_at(points[i])
        h = bilinear(g, cz[k], ns[i])
        k1 = -bilinear(g, cz[k], ws[i])
        k2 = -bilinear(g, cn[k], ws[i])
        samples.append(CurvatureSample(
            t=times[i], h=h, k1=k1, k2=k2,
            geodesic_type=abs(k1) < 1e-9,
        ))
    if reseed:
        # orientation rule: k1 >= 0 at the first generic sample
        for s in samples:
            if abs(s.k1) > policy.orient_tol:
                if s.k1 < 0.0:
                    samples = [
                        CurvatureSample(t=x.t, h=x.h, k1=-x.k1, k2=-x.k2,
                                        geodesic_type=x.geodesic_type)
                        for x in samples
                    ]
                break
    return samples


def _reseeded_frames(metric: SemiMetric, points, zetas, policy: ScreenPolicy):
    """Rebuild N, W per sample from the tangent alone (policy construction)."""
    from . import nullframe as nfmod

    ns, ws = [], []
    for p, z in zip(points, zetas):
        g = metric.matrix_at(p)
        gz = semimetric.mat_vec(g, list(z))
        seed = None
        for idx in policy.seed_indices(3):
            if abs(gz[idx]) > nfmod.SEED_TOL:
                seed = idx
                break
        if seed is None:
            raise nfmod.NoUsableSeedError("no usable screen seed along trace")
        phi = gz[seed]
        ntilde = [(1.0 if i == seed else 0.0) / phi for i in range(3)]
        nn = bilinear(g, ntilde, ntilde)
        n = [ntilde[i] - 0.5 * nn * z[i] for i in range(3)]
        gn = semimetric.mat_vec(g, n)
        w = [
            gz[1] * gn[2] - gz[2] * gn[1],
            gz[2] * gn[0] - gz[0] * gn[2],
            gz[0] * gn[1] - gz[1] * gn[0],
        ]
        w2 = -bilinear(g, w, w)
        if w2 <= 0.0:
            raise nfmod.ScreenSignatureError("screen not timelike along trace")
        scale = 1.0 / math.sqrt(w2)
        w = [c * scale for c in w]
        ns.append(tuple(n))
        ws.append(tuple(w))
    # continuity of the screen direction, then orientation by first sample
    sign = 1.0
    out_ws = [ws[0]]
    for prev, cur in zip(ws, ws[1:]):
        if sum(a * b for a, b in zip(prev, cur)) < 0.0:
            sign = -sign
        out_ws.append(tuple(sign * c for c in cur))
    return ns, out_ws


def cubic_residuals_from_trace(trace: HelixTrace, factor: float | None = None):
    """(t, residual) pairs for the cubic identity, finite-differenced.

    Three chained first-derivative stencils amplify roundoff by 1/dt per
    layer, so the trace is decimated to an effective spacing of about 1e-2
    before differencing; stencil truncation stays far below the noise floor.
    """
    metric = trace.spec.metric
    dt = _uniform_spacing(trace.times)
    stride = max(1, round(0.01 / dt))
    times = trace.times[::stride]
    points = trace.points[::stride]
    zetas = trace.zetas[::stride]
    dt = dt * stride
    if factor is None:
        factor = trace.spec.cubic_factor
    c1 = _covariant_sequence(metric, points, zetas, zetas, dt)
    r = FD_RADIUS
    c2 = _covariant_sequence(metric, points[r:-r], zetas[r:-r], c1, dt)
    c3 = _covariant_sequence(metric, points[2 * r:-2 * r], zetas[2 * r:-2 * r], c2, dt)
    out = []
    for k in range(len(c3)):
        i = k + 3 * r
        resid = [c3[k][a] - factor * c1[k + 2 * r][a] for a in range(3)]
        out.append((times[i], euclid_norm(resid)))
    return out


def identity_reports_from_trace(trace: HelixTrace):
    """Metric-identity reports along a trace, targets from extracted samples."""
    metric = trace.spec.metric
    dt = _uniform_spacing(trace.times)
    stride = max(1, round(0.01 / dt))
    points = trace.points[::stride]
    zetas = trace.zetas[::stride]
    ns = trace.ns[::stride]
    ws = trace.ws[::stride]
    dt = dt * stride
    cz = _covariant_sequence(metric, points, zetas, zetas, dt)
    cn = _covariant_sequence(metric, points, zetas, ns, dt)
    cw = _covariant_sequence(metric, points, zetas, ws, dt)
    samples = extract_curvatures(trace)
    cubics = dict(cubic_residuals_from_trace(trace))
    reports = []
    for k, sample in enumerate(samples):
        i = k + FD_RADIUS
        g = metric.matrix_at(points[i])
        scalars = (
            bilinear(g, cz[k], cz[k]),
            bilinear(g, cn[k], cn[k]),
            bilinear(g, cw[k], cw[k]),
            bilinear(g, cz[k], cn[k]),
        )
        targets = (
            -sample.k1 ** 2,
            -sample.k2 ** 2,
            2.0 * sample.k1 * sample.k2,
            -sample.h ** 2 - sample.k1 * sample.k2,
        )
        reports.append(IdentityReport(
            t=sample.t,
            cubic_residual=cubics.get(sample.t, math.nan),
            scalars=scalars,
            targets=targets,
            deviations=tuple(abs(s - t_) for s, t_ in zip(scalars, targets)),
        ))
    return reports
