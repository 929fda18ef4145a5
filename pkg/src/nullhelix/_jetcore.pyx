# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for Taylor-coefficient arithmetic and flat-chart stepping.

Every function mirrors a generic pure-Python implementation in
``nullhelix.jets`` (coefficient kernels) or ``nullhelix.helix`` (integrator
step); the loops are written in the same summation order so that both
backends produce identical floating-point results.
"""

from libc.math cimport cos as ccos
from libc.math cimport cosh as ccosh
from libc.math cimport exp as cexp
from libc.math cimport log as clog
from libc.math cimport sin as csin
from libc.math cimport sinh as csinh
from libc.math cimport sqrt as csqrt

DEF MAXN = 8


cdef int _load(object a, double* buf) except -1:
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t i
    if n > MAXN:
        raise ValueError("jet order too large for compiled kernels")
    for i in range(n):
        buf[i] = a[i]
    return <int> n


cdef object _dump(double* buf, int n):
    cdef int i
    out = []
    for i in range(n):
        out.append(buf[i])
    return tuple(out)


def mul(a, b):
    cdef double x[MAXN]
    cdef double y[MAXN]
    cdef double z[MAXN]
    cdef int n = _load(a, x)
    _load(b, y)
    cdef int k, i
    cdef double acc
    for k in range(n):
        acc = 0.0
        for i in range(k + 1):
            acc += x[i] * y[k - i]
        z[k] = acc
    return _dump(z, n)


def div(a, b):
    cdef double x[MAXN]
    cdef double y[MAXN]
    cdef double z[MAXN]
    cdef int n = _load(a, x)
    _load(b, y)
    if y[0] == 0.0:
        raise ZeroDivisionError("division by zero constant term")
    cdef int k, j
    cdef double acc
    for k in range(n):
        acc = x[k]
        for j in range(1, k + 1):
            acc -= y[j] * z[k - j]
        z[k] = acc / y[0]
    return _dump(z, n)


def exp_(a):
    cdef double x[MAXN]
    cdef double e[MAXN]
    cdef int n = _load(a, x)
    cdef int k, j
    cdef double acc
    e[0] = cexp(x[0])
    for k in range(1, n):
        acc = 0.0
        for j in range(1, k + 1):
            acc += j * x[j] * e[k - j]
        e[k] = acc / k
    return _dump(e, n)


def log_(a):
    cdef double x[MAXN]
    cdef double l[MAXN]
    cdef int n = _load(a, x)
    if x[0] <= 0.0:
        raise ValueError("log of non-positive value")
    cdef int k, j
    cdef double acc
    l[0] = clog(x[0])
    for k in range(1, n):
        acc = k * x[k]
        for j in range(1, k):
            acc -= j * l[j] * x[k - j]
        l[k] = acc / (k * x[0])
    return _dump(l, n)


def sqrt_(a):
    cdef double x[MAXN]
    cdef double s[MAXN]
    cdef int n = _load(a, x)
    if x[0] < 0.0:
        raise ValueError("sqrt of negative value")
    if x[0] == 0.0 and n > 1:
        raise ValueError("sqrt of zero has no truncated series")
    cdef int k, j
    cdef double acc
    s[0] = csqrt(x[0])
    for k in range(1, n):
        acc = x[k]
        for j in range(1, k):
            acc -= s[j] * s[k - j]
        s[k] = acc / (2.0 * s[0])
    return _dump(s, n)


def sincos(a):
    cdef double x[MAXN]
    cdef double s[MAXN]
    cdef double c[MAXN]
    cdef int n = _load(a, x)
    cdef int k, j
    cdef double accs, accc
    s[0] = csin(x[0])
    c[0] = ccos(x[0])
    for k in range(1, n):
        accs = 0.0
        accc = 0.0
        for j in range(1, k + 1):
            accs += j * x[j] * c[k - j]
            accc += j * x[j] * s[k - j]
        s[k] = accs / k
        c[k] = -accc / k
    return _dump(s, n), _dump(c, n)


def sinhcosh(a):
    cdef double x[MAXN]
    cdef double s[MAXN]
    cdef double c[MAXN]
    cdef int n = _load(a, x)
    cdef int k, j
    cdef double accs, accc
    s[0] = csinh(x[0])
    c[0] = ccosh(x[0])
    for k in range(1, n):
        accs = 0.0
        accc = 0.0
        for j in range(1, k + 1):
            accs += j * x[j] * c[k - j]
            accc += j * x[j] * s[k - j]
        s[k] = accs / k
        c[k] = accc / k
    return _dump(s, n), _dump(c, n)


cdef void _frenet_rhs(double* y, double h, double k1, double k2, double* out):
    # y = (x[3], zeta[3], n[3], w[3]) on a chart with vanishing connection.
    cdef int i
    for i in range(3):
        out[i] = y[3 + i]
        out[3 + i] = h * y[3 + i] + k1 * y[9 + i]
        out[6 + i] = -h * y[6 + i] + k2 * y[9 + i]
        out[9 + i] = k2 * y[3 + i] + k1 * y[6 + i]


def rk4_frame_flat(state, double h, double k1, double k2, double dt, Py_ssize_t nsteps):
    """Advance (point, zeta, n, w) by nsteps classical RK4 steps of size dt."""
    cdef double y[12]
    cdef double k1v[12]
    cdef double k2v[12]
    cdef double k3v[12]
    cdef double k4v[12]
    cdef double tmp[12]
    cdef Py_ssize_t step
    cdef int i
    if len(state) != 12:
        raise ValueError("state must have 12 components")
    for i in range(12):
        y[i] = state[i]
    for step in range(nsteps):
        _frenet_rhs(y, h, k1, k2, k1v)
        for i in range(12):
            tmp[i] = y[i] + 0.5 * dt * k1v[i]
        _frenet_rhs(tmp, h, k1, k2, k2v)
        for i in range(12):
            tmp[i] = y[i] + 0.5 * dt * k2v[i]
        _frenet_rhs(tmp, h, k1, k2, k3v)
        for i in range(12):
            tmp[i] = y[i] + dt * k3v[i]
        _frenet_rhs(tmp, h, k1, k2, k4v)
        for i in range(12):
            y[i] = y[i] + dt * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]) / 6.0
    out = []
    for i in range(12):
        out.append(y[i])
    return tuple(out)
