"""Closed-form model of the active bandpass twin-T stage.

One inverting opamp wrapped around a rearranged twin-T network gives a
third-order bandpass section:

    H(s) = -(b2 s**2 + b1 s) / (a3 s**3 + a2 s**2 + a1 s + 1)

with coefficients polynomial in the six component values.  When the two
T-arms are matched (r1 = r3, c1 = c3) a real pole cancels the network's
real zero and the section collapses to the classic second-order bandpass
with peak magnitude A at omega_n — the regime the production trimming
procedure starts from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ToolkitError
from .ratfunc import Polynomial, RationalFunction

_TWO_PI = 2.0 * math.pi

# Coarse log-spaced scan size and the relative frequency tolerance of the
# golden-section refinement in find_peak.
SCAN_POINTS = 512
REFINE_REL_TOL = 1e-6


class SpecialCaseError(ToolkitError):
    """Raised when the matched-arm reduction is applied to unmatched parts."""


class BoundaryPeakError(ToolkitError):
    """The coarse scan put the maximum at an interval endpoint, which means
    the search window does not contain the peak."""


@dataclass(frozen=True)
class TwinTParams:
    """The six component values of the bandpass twin-T, in ohms/farads."""

    r1: float
    r2: float
    r3: float
    c1: float
    c2: float
    c3: float

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "r3", "c1", "c2", "c3"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class CanonicalBandpass:
    """Second-order reduction: peak magnitude, peak frequency, quality."""

    gain_a: float
    omega_n: float
    q: float


@dataclass(frozen=True)
class PeakPoint:
    f_peak: float
    gain_db: float
    gain_linear: float


def coefficients(p: TwinTParams) -> RationalFunction:
    """Transfer function of the inverting twin-T bandpass stage.

    The minus sign of the inverting topology is carried in ``sign``; both
    polynomials are stored with the denominator constant term at 1.
    """
    b2 = p.r2 * p.r3 * p.c1 * p.c2 + p.r1 * p.r3 * p.c1 * (p.c2 + p.c3)
    b1 = (p.r2 + p.r3) * p.c2 + p.r3 * p.c1
    a3 = p.r1 * p.r2 * p.r3 * p.c1 * p.c2 * p.c3
    a2 = p.r1 * (p.r2 + p.r3) * p.c2 * p.c3
    a1 = p.r1 * (p.c2 + p.c3)
    return RationalFunction(
        Polynomial((0.0, b1, b2)),
        Polynomial((1.0, a1, a2, a3)),
        sign=-1,
    )


def canonical_special_case(p: TwinTParams) -> CanonicalBandpass:
    """Closed-form peak data for matched arms (r1 = r3, c1 = c3).

    omega_n = 1/sqrt(r1 r2 c1 c2),  q = sqrt(r2 c1 / (r1 c2)),
    A = r2/r1 + 1 + c1/c2.
    """
    if abs(p.r1 - p.r3) > 1e-9 * p.r1 or abs(p.c1 - p.c3) > 1e-9 * p.c1:
        raise SpecialCaseError(
            "matched-arm reduction needs r1 = r3 and c1 = c3 "
            f"(got r1={p.r1!r}, r3={p.r3!r}, c1={p.c1!r}, c3={p.c3!r})")
    omega_n = 1.0 / math.sqrt(p.r1 * p.r2 * p.c1 * p.c2)
    q = math.sqrt(p.r2 * p.c1 / (p.r1 * p.c2))
    gain_a = p.r2 / p.r1 + 1.0 + p.c1 / p.c2
    return CanonicalBandpass(gain_a=gain_a, omega_n=omega_n, q=q)


def initial_r2(f_c: float, r1: float, c1: float, c2: float) -> float:
    """Frequency-trimmer starting value that puts omega_n at f_c.

    Inverts omega_n = 1/sqrt(r1 r2 c1 c2) for r2.
    """
    for name, value in (("f_c", f_c), ("r1", r1), ("c1", c1), ("c2", c2)):
        if not value > 0.0:
            raise ValueError(f"{name} must be > 0, got {value!r}")
    return 1.0 / ((_TWO_PI * f_c) ** 2 * r1 * c1 * c2)


def find_peak(h: RationalFunction, f_lo: float, f_hi: float) -> PeakPoint:
    """Locate the magnitude peak of H(j 2*pi*f) on [f_lo, f_hi].

    512-point log-spaced coarse scan, then golden-section refinement of
    the bracketing pair to 1e-6 relative frequency tolerance.  A maximum
    landing on either endpoint raises BoundaryPeakError: the window does
    not contain the peak and any refined number would be meaningless.
    """
    if not (0.0 < f_lo < f_hi):
        raise ValueError(f"need 0 < f_lo < f_hi, got [{f_lo!r}, {f_hi!r}]")
    grid = np.exp(np.linspace(math.log(f_lo), math.log(f_hi), SCAN_POINTS))
    num = h.num.coeffs
    den = h.den.coeffs
    idx = kernels.scan_max_abs2(num, den, _TWO_PI * grid)
    if idx == 0 or idx == SCAN_POINTS - 1:
        raise BoundaryPeakError(
            f"|H| is largest at the {'lower' if idx == 0 else 'upper'} edge "
            f"of [{f_lo:g}, {f_hi:g}] Hz; widen the search window")
    f_peak = kernels.golden_max(num, den, float(grid[idx - 1]),
                                float(grid[idx + 1]), REFINE_REL_TOL)
    gain = math.sqrt(kernels.abs2_at(num, den, _TWO_PI * f_peak))
    return PeakPoint(f_peak=f_peak, gain_db=20.0 * math.log10(gain),
                     gain_linear=gain)
