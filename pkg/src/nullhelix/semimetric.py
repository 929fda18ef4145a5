"""Metric fields on a coordinate chart.

A chart metric is anything that can evaluate its entry matrix ``g_ij`` over
duck-typed coordinate scalars (floats or :class:`~nullhelix.jets.Jet`), so the
same Christoffel and covariant-derivative machinery serves closed-form metric
fields and numerically induced (pullback) metrics alike.  Derivatives of the
entries are taken by seeding a first-order jet in each coordinate direction,
never by finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exprparse, jets
from .jets import Jet, const_term

DET_TOL = 1e-10


class DegenerateMetricError(ValueError):
    """Metric determinant fell below the non-degeneracy tolerance."""


@dataclass(frozen=True)
class Signature:
    """Diagonal flat signature: ``signs`` are the metric's diagonal +-1 entries."""

    dim: int
    signs: tuple

    def __post_init__(self):
        if self.dim not in (3, 4):
            raise ValueError("signature dimension must be 3 or 4")
        if len(self.signs) != self.dim:
            raise ValueError("signs length must equal dim")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signature entries must be +-1")

    @property
    def index(self) -> int:
        """Number of negative directions (q)."""
        return sum(1 for s in self.signs if s == -1)


# -- small dense linear algebra over duck scalars -----------------------------


def mat_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * mat_det(minor)
        if j % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def mat_inverse(m, det=None):
    """Inverse by adjugate over the coefficient ring (dims up to 4)."""
    n = len(m)
    if det is None:
        det = mat_det(m)
    if n == 1:
        return [[1.0 / det]]
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [m[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = mat_det(minor)
            if (i + j) % 2 == 1:
                cof = -cof
            inv[j][i] = cof / det
    return inv


def mat_vec(m, v):
    return [sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m))]


def bilinear(g, x, y):
    acc = 0.0
    for i in range(len(x)):
        for j in range(len(y)):
            acc = acc + g[i][j] * x[i] * y[j]
    return acc


def _deriv_part(v):
    """First coefficient of a seeded order-1 evaluation (0 for constants)."""
    return v.coeffs[1] if isinstance(v, Jet) else 0.0


# -- metric protocol -----------------------------------------------------------


class SemiMetric:
    """Shared machinery on top of duck-typed entry evaluation."""

    dim: int
    is_constant: bool

    def entry_values(self, coords):
        raise NotImplementedError

    def _check_point(self, p):
        if len(p) != self.dim:
            raise ValueError(f"point has {len(p)} coordinates, chart has {self.dim}")

    def matrix_at(self, p):
        self._check_point(p)
        g = self.entry_values([float(c) for c in p])
        det = mat_det(g)
        if abs(det) <= DET_TOL:
            raise DegenerateMetricError(
                f"metric degenerate at {tuple(p)}: |det| = {abs(det):.3e}"
            )
        return g

    def inverse_at(self, p):
        g = self.matrix_at(p)
        return mat_inverse(g)

    def inner_at(self, p, x, y):
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError("vector dimension does not match the chart")
        return bilinear(self.matrix_at(p), [float(c) for c in x], [float(c) for c in y])

    def index_at(self, p) -> int:
        """Metric index (negative eigenvalue count) at a point."""
        eigs = np.linalg.eigvalsh(np.array(self.matrix_at(p), dtype=float))
        return int(np.count_nonzero(eigs < 0.0))

    def christoffel(self, coords):
        """Connection coefficients gamma[k][i][j] over duck coordinates.

        Entry derivatives come from first-order jets seeded per coordinate
        direction; passing jet-valued coordinates therefore yields the
        coefficients' own Taylor expansions along a curve.
        """
        n = self.dim
        if self.is_constant:
            return [[[0.0] * n for _ in range(n)] for _ in range(n)]
        g = self.entry_values(list(coords))
        det = mat_det(g)
        if abs(const_term(det)) <= DET_TOL:
            raise DegenerateMetricError("metric degenerate along evaluation")
        ginv = mat_inverse(g, det)
        # dg[l][i][j] = d g_ij / d x_l
        dg = []
        for l in range(n):
            seeded = [
                Jet((coords[m], 1.0 if m == l else 0.0)) for m in range(n)
            ]
            entries = self.entry_values(seeded)
            dg.append(
                [[_deriv_part(entries[i][j]) for j in range(n)] for i in range(n)]
            )
        gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    acc = None
                    for l in range(n):
                        term = ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                        acc = term if acc is None else acc + term
                    val = 0.5 * acc
                    gamma[k][i][j] = val
                    gamma[k][j][i] = val
        return gamma

    def christoffel_at(self, p):
        self._check_point(p)
        return self.christoffel([float(c) for c in p])


class MetricField(SemiMetric):
    """Closed-form metric: a symmetric matrix of expressions in x1..x_dim."""

    def __init__(self, dim: int, entries, signature: Signature | None = None):
        if not 2 <= dim <= 4:
            raise ValueError("chart dimension must be between 2 and 4")
        self.dim = dim
        self.entries = tuple(tuple(row) for row in entries)
        if len(self.entries) != dim or any(len(r) != dim for r in self.entries):
            raise ValueError("entries must form a dim x dim matrix")
        self.signature = signature
        self.is_constant = all(
            isinstance(e, exprparse.Num) for row in self.entries for e in row
        )
        self._coord_names = tuple(f"x{i + 1}" for i in range(dim))

    @classmethod
    def diag(cls, signs) -> "MetricField":
        signs = tuple(signs)
        sig = Signature(len(signs), signs)
        entries = [
            [
                exprparse.Num(float(signs[i]), str(signs[i]))
                if i == j
                else exprparse.Num(0.0, "0")
                for j in range(len(signs))
            ]
            for i in range(len(signs))
        ]
        return cls(len(signs), entries, signature=sig)

    @classmethod
    def from_texts(cls, dim: int, texts) -> "MetricField":
        allowed = frozenset(f"x{i + 1}" for i in range(dim))
        rows = [list(r) for r in texts]
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError("entries must form a dim x dim matrix")
        for i in range(dim):
            for j in range(i + 1, dim):
                if rows[i][j].strip() != rows[j][i].strip():
                    raise ValueError(f"metric not symmetric at ({i + 1},{j + 1})")
        entries = [
            [exprparse.parse(rows[i][j], variables=allowed) for j in range(dim)]
            for i in range(dim)
        ]
        return cls(dim, entries)

    @classmethod
    def from_dict(cls, doc: dict) -> "MetricField":
        """Load from the metric JSON schema ({"dim": n, "metric": {...}})."""
        if set(doc) != {"dim", "metric"}:
            raise ValueError("metric document must have exactly 'dim' and 'metric'")
        dim = doc["dim"]
        if not isinstance(dim, int):
            raise ValueError("'dim' must be an integer")
        spec = doc["metric"]
        kind = spec.get("type")
        if kind == "diag":
            if set(spec) != {"type", "signs"}:
                raise ValueError("diag metric takes exactly 'type' and 'signs'")
            signs = spec["signs"]
            if len(signs) != dim:
                raise ValueError("'signs' length must equal dim")
            return cls.diag(signs)
        if kind == "field":
            if set(spec) != {"type", "entries"}:
                raise ValueError("field metric takes exactly 'type' and 'entries'")
            return cls.from_texts(dim, spec["entries"])
        raise ValueError(f"unknown metric type {kind!r}")

    def entry_values(self, coords):
        env = dict(zip(self._coord_names, coords))
        return [
            [exprparse._eval(self.entries[i][j], env) for j in range(self.dim)]
            for i in range(self.dim)
        ]


# -- spec operations ------------------------------------------------------------


@dataclass(frozen=True)
class ChristoffelEval:
    """Connection coefficients gamma[k][i][j] at a chart point."""

    point: tuple
    gamma: tuple

    def __getitem__(self, kij):
        k, i, j = kij
        return self.gamma[k][i][j]


def metric_at(g: SemiMetric, p):
    return g.matrix_at(p)


def christoffel_at(g: SemiMetric, p) -> ChristoffelEval:
    gamma = g.christoffel_at(p)
    return ChristoffelEval(
        tuple(float(c) for c in p),
        tuple(tuple(tuple(row) for row in plane) for plane in gamma),
    )


def inner(g: SemiMetric, p, x, y) -> float:
    return g.inner_at(p, x, y)


def covariant_jets(pos_jets, field_jets, metric: SemiMetric):
    """Covariant derivative along a curve, at the jet level.

    ``pos_jets`` are the curve's coordinate jets in the parameter,
    ``field_jets`` the field's components along the curve.  The result's
    order drops by one; nesting therefore costs one order per application.
    """
    n = metric.dim
    zeta = [jets.dt(x) for x in pos_jets]
    out = [jets.dt(v) for v in field_jets]
    if metric.is_constant:
        return out
    gamma = metric.christoffel([x.truncated(x.order - 1) for x in pos_jets])
    for k in range(n):
        acc = out[k]
        for i in range(n):
            for j in range(n):
                acc = acc + gamma[k][i][j] * zeta[i] * field_jets[j]
        out[k] = acc
    return out


def covariant_along(pos_jets, field_jets, metric: SemiMetric):
    """Value of the covariant derivative (constant terms of the jets)."""
    return tuple(const_term(c) for c in covariant_jets(pos_jets, field_jets, metric))
