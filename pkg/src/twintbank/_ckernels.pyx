# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Operation-for-operation mirror of _pykernels — same Horner recurrence on
explicit real/imaginary parts, same golden-section update — so the two
backends produce matching numbers.  Keep them in lockstep.
"""

import numpy as np

from libc.math cimport fabs

cdef double INVPHI = 0.6180339887498949  # (sqrt(5) - 1) / 2
cdef double TWO_PI = 6.283185307179586


cdef inline double _abs2(const double[::1] num, const double[::1] den,
                         double w) noexcept nogil:
    cdef double nre = 0.0, nim = 0.0, dre = 0.0, dim = 0.0, t
    cdef Py_ssize_t k
    for k in range(num.shape[0] - 1, -1, -1):
        t = -nim * w + num[k]
        nim = nre * w
        nre = t
    for k in range(den.shape[0] - 1, -1, -1):
        t = -dim * w + den[k]
        dim = dre * w
        dre = t
    return (nre * nre + nim * nim) / (dre * dre + dim * dim)


def eval_rational(num, den, omega):
    """N(j*omega) / D(j*omega) over an array of angular frequencies."""
    cdef const double[::1] n = np.ascontiguousarray(num, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(den, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef Py_ssize_t m = w.shape[0]
    out_re = np.empty(m, dtype=np.float64)
    out_im = np.empty(m, dtype=np.float64)
    cdef double[::1] ore = out_re
    cdef double[::1] oim = out_im
    cdef Py_ssize_t i, k
    cdef double nre, nim, dre, dim, t, ww, r, s
    with nogil:
        for i in range(m):
            ww = w[i]
            nre = 0.0
            nim = 0.0
            for k in range(n.shape[0] - 1, -1, -1):
                t = -nim * ww + n[k]
                nim = nre * ww
                nre = t
            dre = 0.0
            dim = 0.0
            for k in range(d.shape[0] - 1, -1, -1):
                t = -dim * ww + d[k]
                dim = dre * ww
                dre = t
            # Smith's algorithm, as libm and NumPy divide complex numbers.
            if fabs(dre) >= fabs(dim):
                r = dim / dre
                s = dre + dim * r
                ore[i] = (nre + nim * r) / s
                oim[i] = (nim - nre * r) / s
            else:
                r = dre / dim
                s = dre * r + dim
                ore[i] = (nre * r + nim) / s
                oim[i] = (nim * r - nre) / s
    return out_re + 1j * out_im


def abs2_at(num, den, double w):
    """|N/D|**2 at a single angular frequency."""
    cdef const double[::1] n = np.ascontiguousarray(num, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(den, dtype=np.float64)
    return _abs2(n, d, w)


def scan_max_abs2(num, den, omega):
    """Index of the largest |N/D|**2 on the grid (first index on ties)."""
    cdef const double[::1] n = np.ascontiguousarray(num, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(den, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef Py_ssize_t i, best = 0
    cdef double v, vbest = -1.0
    with nogil:
        for i in range(w.shape[0]):
            v = _abs2(n, d, w[i])
            if v > vbest:
                vbest = v
                best = i
    return best


def golden_max(num, den, double f_a, double f_b, double rel_tol):
    """Golden-section refinement of a magnitude peak on [f_a, f_b] Hz."""
    cdef const double[::1] n = np.ascontiguousarray(num, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(den, dtype=np.float64)
    cdef double a = f_a, b = f_b, c, e, fc, fd
    c = b - INVPHI * (b - a)
    e = a + INVPHI * (b - a)
    fc = _abs2(n, d, TWO_PI * c)
    fd = _abs2(n, d, TWO_PI * e)
    with nogil:
        while (b - a) > rel_tol * b:
            if fc > fd:
                b = e
                e = c
                fd = fc
                c = b - INVPHI * (b - a)
                fc = _abs2(n, d, TWO_PI * c)
            else:
                a = c
                c = e
                fc = fd
                e = a + INVPHI * (b - a)
                fd = _abs2(n, d, TWO_PI * e)
    return 0.5 * (a + b)
