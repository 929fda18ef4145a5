"""Null Frenet frames {zeta, N, W} along null curves of an index-2 chart.

Given a null curve with tangent zeta, the transversal N is built from a seed
vector V with g(zeta, V) != 0:

    Ntilde = V / g(zeta, V),      N = Ntilde - (1/2) g(Ntilde, Ntilde) zeta,

which enforces g(N, N) = 0 and g(zeta, N) = 1.  In dimension three the screen
complement of span{zeta, N} is the single line orthogonal to both, obtained as
the Euclidean cross product of the covectors g.zeta and g.N; it must be
timelike (the chart has index 2) and is normalised to g(W, W) = -1.  The
curvature functions follow from the frame equations:

    h  =  g(cov zeta, N),    k1 = -g(cov zeta, W),    k2 = -g(cov N, W),

where cov is the covariant derivative along the curve.  All frame algebra is
performed on jets, so the same construction yields the frame's own derivatives
in the curve parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import jets, semimetric
from .exprparse import eval_jet, parse
from .jets import Jet, const_term
from .semimetric import SemiMetric, bilinear, mat_vec

NULL_TOL = 1e-8
SEED_TOL = 1e-8
FRAME_TOL = 1e-9
GEODESIC_K1_TOL = 1e-9


class NotNullError(ValueError):
    """The curve's tangent fails the nullity check at a sample."""


class NoUsableSeedError(ValueError):
    """Every policy seed is g-orthogonal to the tangent."""


class ScreenSignatureError(ValueError):
    """The screen complement is not timelike: the chart is not index 2 here."""


class FrameDiscontinuityError(ValueError):
    """Neighbouring frames differ by more than a sign flip can repair."""


@dataclass(frozen=True)
class ScreenPolicy:
    """Deterministic screen construction: seed order, orientation, continuity.

    ``seeds`` are 0-based coordinate-axis indices tried in order; the first
    axis vector V with |g(zeta, V)| above the seed tolerance is used.  The
    orientation rule makes k1 >= 0 at the first sample where |k1| exceeds
    ``orient_tol``; between samples, sign flips of W are corrected.
    """

    seeds: tuple = (2, 0, 1)
    orient_tol: float = GEODESIC_K1_TOL

    @classmethod
    def from_names(cls, names) -> "ScreenPolicy":
        if isinstance(names, str):
            names = [n.strip() for n in names.split(",") if n.strip()]
        idx = []
        for name in names:
            if not (len(name) >= 2 and name[0] == "e" and name[1:].isdigit()):
                raise ValueError(f"seed names look like 'e3', got {name!r}")
            idx.append(int(name[1:]) - 1)
        return cls(seeds=tuple(idx))

    def seed_indices(self, dim: int):
        return [i for i in self.seeds if i < dim]


@dataclass(frozen=True)
class NullFrame:
    """Frame sample: two null directions and the unit timelike screen vector."""

    t: float
    point: tuple
    zeta: tuple
    n: tuple
    w: tuple

    def gram_residuals(self, metric: SemiMetric):
        g = metric.matrix_at(self.point)
        z, n, w = self.zeta, self.n, self.w
        return (
            bilinear(g, z, z),
            bilinear(g, n, n),
            bilinear(g, z, n) - 1.0,
            bilinear(g, n, w),
            bilinear(g, z, w),
            bilinear(g, w, w) + 1.0,
        )

    def max_gram_residual(self, metric: SemiMetric) -> float:
        return max(abs(r) for r in self.gram_residuals(metric))


@dataclass(frozen=True)
class CurvatureSample:
    t: float
    h: float
    k1: float
    k2: float
    geodesic_type: bool = False


class NullCurve:
    """A parametrized null curve on a 3D index-2 chart.

    ``position`` mode stores the coordinate components as expressions in t;
    ``tangent`` mode stores the tangent components and recovers positions by
    quadrature from an initial point (classical RK4 with step ``quad_step``).
    """

    def __init__(self, metric: SemiMetric, mode: str, components, domain,
                 initial=None, quad_step: float = 1e-3):
        if metric.dim != 3:
            raise ValueError("null curves require a 3-dimensional chart")
        if mode not in ("position", "tangent"):
            raise ValueError(f"unknown curve mode {mode!r}")
        t0, t1 = float(domain[0]), float(domain[1])
        if not t0 < t1:
            raise ValueError("empty domain")
        if mode == "tangent" and initial is None:
            raise ValueError("tangent mode requires an initial point")
        self.metric = metric
        self.mode = mode
        self.components = tuple(components)
        if len(self.components) != 3:
            raise ValueError("curve needs exactly 3 components")
        self.domain = (t0, t1)
        self.initial = None if initial is None else tuple(float(c) for c in initial)
        self.quad_step = float(quad_step)
        self._pos_cache: dict = {}
        p0 = self.position_at(t0)
        if metric.index_at(p0) != 2:
            raise ScreenSignatureError(
                f"metric has index {metric.index_at(p0)} at {p0}, need 2"
            )

    @classmethod
    def position(cls, metric, texts, domain) -> "NullCurve":
        comps = [parse(s, variables=frozenset(["t"])) for s in texts]
        return cls(metric, "position", comps, domain)

    @classmethod
    def tangent(cls, metric, texts, initial, domain, quad_step=1e-3) -> "NullCurve":
        comps = [parse(s, variables=frozenset(["t"])) for s in texts]
        return cls(metric, "tangent", comps, domain, initial=initial,
                   quad_step=quad_step)

    def _check_t(self, t: float):
        t0, t1 = self.domain
        if not (t0 - 1e-12 <= t <= t1 + 1e-12):
            raise ValueError(f"parameter {t} outside curve domain [{t0}, {t1}]")

    def zeta_jets(self, t: float, order: int):
        self._check_t(t)
        if self.mode == "tangent":
            tj = Jet.variable(float(t), order)
            return [jets_eval(c, tj, order) for c in self.components]
        tj = Jet.variable(float(t), order + 1)
        return [jets.dt(jets_eval(c, tj, order + 1)) for c in self.components]

    def position_jets(self, t: float, order: int):
        self._check_t(t)
        tj = Jet.variable(float(t), order)
        if self.mode == "position":
            return [jets_eval(c, tj, order) for c in self.components]
        base = self.position_at(t)
        zeta = self.zeta_jets(t, order - 1)
        return [jets.antiderivative(z, p) for z, p in zip(zeta, base)]

    def position_at(self, t: float):
        self._check_t(t)
        if self.mode == "position":
            tj = Jet.variable(float(t), 0)
            return tuple(const_term(jets_eval(c, tj, 0)) for c in self.components)
        key = round(float(t), 15)
        if key in self._pos_cache:
            return self._pos_cache[key]
        pos = self._quadrature(float(t))
        self._pos_cache[key] = pos
        return pos

    def _quadrature(self, t: float):
        t0 = self.domain[0]
        pos = list(self.initial)
        span = t - t0
        if span == 0.0:
            return tuple(pos)
        nsteps = max(1, int(math.ceil(abs(span) / self.quad_step)))
        dt = span / nsteps
        s = t0
        for _ in range(nsteps):
            k1 = self._zeta_value(s)
            kmid = self._zeta_value(s + 0.5 * dt)
            k4 = self._zeta_value(s + dt)
            for i in range(3):
                pos[i] += dt * (k1[i] + 4.0 * kmid[i] + k4[i]) / 6.0
            s += dt
        return tuple(pos)

    def _zeta_value(self, t: float):
        tj = Jet.variable(t, 0)
        return [const_term(jets_eval(c, tj, 0)) for c in self.components]


def jets_eval(expr, tjet, order):
    """Evaluate a curve-component expression over the parameter jet."""
    return eval_jet(expr, {"t": tjet}, order)


# -- frame construction ---------------------------------------------------------


def check_null(curve: NullCurve, t: float, tol: float = NULL_TOL) -> float:
    """|g(zeta, zeta)| at t; the caller compares against its tolerance."""
    z = [const_term(j) for j in curve.zeta_jets(t, 0)]
    p = curve.position_at(t)
    return abs(curve.metric.inner_at(p, z, z))


def _cross(a, b):
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


class _FrameJets:
    """Jet-valued frame data at one parameter value (internal)."""

    __slots__ = ("t", "pos", "zeta", "n", "w", "gmat", "seed_index", "sign")

    def __init__(self, t, pos, zeta, n, w, gmat, seed_index):
        self.t = t
        self.pos = pos
        self.zeta = zeta
        self.n = n
        self.w = w
        self.gmat = gmat
        self.seed_index = seed_index
        self.sign = 1.0

    def oriented_w(self):
        return [self.sign * c for c in self.w]

    def frame(self) -> NullFrame:
        return NullFrame(
            t=self.t,
            point=tuple(const_term(c) for c in self.pos),
            zeta=tuple(const_term(c) for c in self.zeta),
            n=tuple(const_term(c) for c in self.n),
            w=tuple(self.sign * const_term(c) for c in self.w),
        )


def _frame_jets(curve: NullCurve, t: float, policy: ScreenPolicy,
                order: int = 4, null_tol: float = NULL_TOL) -> _FrameJets:
    pos = curve.position_jets(t, order)
    zeta = [jets.dt(p) for p in pos]
    gmat = curve.metric.entry_values([p.truncated(order - 1) for p in pos])
    zz = const_term(bilinear(gmat, zeta, zeta))
    if abs(zz) > null_tol:
        raise NotNullError(f"g(zeta, zeta) = {zz:.3e} at t = {t}: curve not null")
    znorm = sum(const_term(z) ** 2 for z in zeta)
    if znorm < 1e-24:
        raise ValueError(f"vanishing tangent at t = {t}")
    gz = mat_vec(gmat, zeta)
    seed_index = None
    for idx in policy.seed_indices(3):
        if abs(const_term(gz[idx])) > SEED_TOL:
            seed_index = idx
            break
    if seed_index is None:
        raise NoUsableSeedError(
            f"no policy seed with |g(zeta, e_i)| > {SEED_TOL} at t = {t}"
        )
    phi = gz[seed_index]
    ntilde = [(1.0 if i == seed_index else 0.0) / phi for i in range(3)]
    nn = bilinear(gmat, ntilde, ntilde)
    n_vec = [ntilde[i] - 0.5 * nn * zeta[i] for i in range(3)]
    gn = mat_vec(gmat, n_vec)
    w_raw = _cross(gz, gn)
    w2 = -bilinear(gmat, w_raw, w_raw)
    if const_term(w2) <= 1e-18:
        raise ScreenSignatureError(
            f"screen complement not timelike at t = {t}: metric is not index 2"
        )
    scale = jets.sqrt(w2)
    w_vec = [w_raw[i] / scale for i in range(3)]
    return _FrameJets(t, pos, zeta, n_vec, w_vec, gmat, seed_index)


def _raw_k1(fj: _FrameJets, metric: SemiMetric) -> float:
    cz = semimetric.covariant_jets(fj.pos, fj.zeta, metric)
    return -const_term(bilinear(fj.gmat, cz, fj.w))


def _orient_single(fj: _FrameJets, metric: SemiMetric, policy: ScreenPolicy):
    k1 = _raw_k1(fj, metric)
    if abs(k1) > policy.orient_tol:
        if k1 < 0.0:
            fj.sign = -1.0
        return
    for c in fj.w:
        v = const_term(c)
        if abs(v) > 1e-9:
            if v < 0.0:
                fj.sign = -1.0
            return


def build_frame(curve: NullCurve, t: float, policy: ScreenPolicy | None = None,
                tol: float = FRAME_TOL) -> NullFrame:
    """Construct the frame at one parameter value (deterministic per policy)."""
    policy = policy or ScreenPolicy()
    fj = _frame_jets(curve, t, policy)
    _orient_single(fj, curve.metric, policy)
    frame = fj.frame()
    res = frame.max_gram_residual(curve.metric)
    if res > tol:
        raise ValueError(f"frame Gram residual {res:.3e} exceeds {tol} at t = {t}")
    return frame


def frame_field(curve: NullCurve, grid, policy: ScreenPolicy | None = None,
                tol: float = FRAME_TOL):
    """Per-sample frames with sign-continuity correction along the grid."""
    policy = policy or ScreenPolicy()
    grid = list(grid)
    if not grid:
        return []
    states = [_frame_jets(curve, t, policy) for t in grid]
    # continuity: undo sign flips of W between neighbours
    for prev, cur in zip(states, states[1:]):
        rawdot = sum(
            const_term(a) * const_term(b) for a, b in zip(prev.w, cur.w)
        )
        cur.sign = prev.sign if rawdot >= 0.0 else -prev.sign
    # global orientation: k1 >= 0 at the first generic sample
    flip = None
    for st in states:
        k1 = st.sign * _raw_k1(st, curve.metric)
        if abs(k1) > policy.orient_tol:
            flip = k1 < 0.0
            break
    if flip is None:
        first = states[0]
        for c in first.w:
            v = first.sign * const_term(c)
            if abs(v) > 1e-9:
                flip = v < 0.0
                break
        flip = bool(flip)
    if flip:
        for st in states:
            st.sign = -st.sign
    frames = [st.frame() for st in states]
    for a, b in zip(frames, frames[1:]):
        if sum(x * y for x, y in zip(a.w, b.w)) <= 0.0:
            raise FrameDiscontinuityError(
                f"screen direction jumps between t = {a.t} and t = {b.t}"
            )
    for fr in frames:
        res = fr.max_gram_residual(curve.metric)
        if res > tol:
            raise ValueError(
                f"frame Gram residual {res:.3e} exceeds {tol} at t = {fr.t}"
            )
    return frames


def _aligned_frame_jets(curve: NullCurve, frame: NullFrame,
                        policy: ScreenPolicy, order: int = 4) -> _FrameJets:
    fj = _frame_jets(curve, frame.t, policy, order=order)
    dot = sum(const_term(a) * b for a, b in zip(fj.w, frame.w))
    fj.sign = 1.0 if dot >= 0.0 else -1.0
    return fj


def curvatures_at(curve: NullCurve, frame: NullFrame, t: float,
                  policy: ScreenPolicy | None = None) -> CurvatureSample:
    """Curvature functions (h, k1, k2) of the frame at t."""
    policy = policy or ScreenPolicy()
    if abs(frame.t - t) > 1e-12:
        raise ValueError("frame was built at a different parameter value")
    fj = _aligned_frame_jets(curve, frame, policy)
    metric = curve.metric
    w = fj.oriented_w()
    cz = semimetric.covariant_jets(fj.pos, fj.zeta, metric)
    cn = semimetric.covariant_jets(fj.pos, fj.n, metric)
    h = const_term(bilinear(fj.gmat, cz, fj.n))
    k1 = -const_term(bilinear(fj.gmat, cz, w))
    k2 = -const_term(bilinear(fj.gmat, cn, w))
    return CurvatureSample(t=t, h=h, k1=k1, k2=k2,
                           geodesic_type=abs(k1) < GEODESIC_K1_TOL)


def frenet_residuals(curve: NullCurve, frame: NullFrame, sample: CurvatureSample,
                     t: float, policy: ScreenPolicy | None = None):
    """Coordinate components of the three frame-equation residuals at t.

    The derivative terms come from the smooth policy-built frame field (a
    single frame sample cannot be differentiated); the algebraic terms use the
    given frame's vectors, so a corrupted frame shows up in the residuals.
    """
    policy = policy or ScreenPolicy()
    fj = _aligned_frame_jets(curve, frame, policy)
    metric = curve.metric
    w = fj.oriented_w()
    cz = semimetric.covariant_jets(fj.pos, fj.zeta, metric)
    cn = semimetric.covariant_jets(fj.pos, fj.n, metric)
    cw = semimetric.covariant_jets(fj.pos, w, metric)
    h, k1, k2 = sample.h, sample.k1, sample.k2
    r1 = tuple(
        const_term(cz[i]) - h * frame.zeta[i] - k1 * frame.w[i]
        for i in range(3)
    )
    r2 = tuple(
        const_term(cn[i]) + h * frame.n[i] - k2 * frame.w[i]
        for i in range(3)
    )
    r3 = tuple(
        const_term(cw[i]) - k2 * frame.zeta[i] - k1 * frame.n[i]
        for i in range(3)
    )
    return r1, r2, r3


def euclid_norm(vec) -> float:
    return math.sqrt(sum(float(c) ** 2 for c in vec))
