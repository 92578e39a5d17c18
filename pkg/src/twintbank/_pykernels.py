"""Pure-Python/NumPy evaluation kernels.

Fallback used when the compiled extension is unavailable.  The two
backends mirror each other operation for operation — same Horner
recurrence on explicit real/imaginary parts, same golden-section update —
so switching backends does not move calibration results.  Any change here
must be made in _ckernels.pyx as well; the test suite cross-checks them.
"""

from __future__ import annotations

import numpy as np

INVPHI = 0.6180339887498949  # (sqrt(5) - 1) / 2
TWO_PI = 6.283185307179586


def _horner_reim(coeffs, omega):
    # acc <- acc * (j*omega) + c, tracked as separate re/im arrays.
    re = np.zeros_like(omega)
    im = np.zeros_like(omega)
    for c in reversed(tuple(coeffs)):
        re, im = -im * omega + c, re * omega
    return re, im


def eval_rational(num, den, omega):
    """N(j*omega) / D(j*omega) over an array of angular frequencies."""
    omega = np.asarray(omega, dtype=np.float64)
    nre, nim = _horner_reim(num, omega)
    dre, dim = _horner_reim(den, omega)
    # Smith's algorithm with the same operation order as the compiled
    # loop; both lanes are computed and np.where keeps the right one.
    big = np.abs(dre) >= np.abs(dim)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dim / dre
        s = dre + dim * r
        re1 = (nre + nim * r) / s
        im1 = (nim - nre * r) / s
        r = dre / dim
        s = dre * r + dim
        re2 = (nre * r + nim) / s
        im2 = (nim * r - nre) / s
    return np.where(big, re1, re2) + 1j * np.where(big, im1, im2)


def abs2_at(num, den, w):
    """|N/D|**2 at a single angular frequency."""
    nre = nim = 0.0
    for c in reversed(tuple(num)):
        nre, nim = -nim * w + c, nre * w
    dre = dim = 0.0
    for c in reversed(tuple(den)):
        dre, dim = -dim * w + c, dre * w
    return (nre * nre + nim * nim) / (dre * dre + dim * dim)


def scan_max_abs2(num, den, omega):
    """Index of the largest |N/D|**2 on the grid (first index on ties)."""
    omega = np.asarray(omega, dtype=np.float64)
    nre, nim = _horner_reim(num, omega)
    dre, dim = _horner_reim(den, omega)
    mag2 = (nre * nre + nim * nim) / (dre * dre + dim * dim)
    return int(np.argmax(mag2))


def golden_max(num, den, f_a, f_b, rel_tol):
    """Golden-section refinement of a magnitude peak on [f_a, f_b] Hz."""
    num = tuple(num)
    den = tuple(den)
    a = f_a
    b = f_b
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = abs2_at(num, den, TWO_PI * c)
    fd = abs2_at(num, den, TWO_PI * d)
    while (b - a) > rel_tol * b:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = abs2_at(num, den, TWO_PI * c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = abs2_at(num, den, TWO_PI * d)
    return 0.5 * (a + b)
