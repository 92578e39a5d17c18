"""Two-trimmer factory calibration of the eight bandpass channels.

Each channel runs signal through the same chain: an inverting input stage
(39k/33k), a resistive attenuation ladder (3.3k + 150 + 330, tapped at
either the bottom 330 or the bottom 480 ohms), the bandpass twin-T stage,
and an inverting mixer (56k feedback over a 33k or 39k input resistor).
Trimming adjusts two pots per channel until the full-chain response peaks
at the channel's band frequency with 6.5 dB of gain:

  * the 100k frequency trimmer in series with a fixed resistor forms r2,
  * the 20k gain trimmer is r3.

The two targets interact, so the solve alternates: bisect r3 for gain at
fixed r2, bisect r2 for peak frequency at fixed r3, repeat until both
residuals are inside tolerance.  Every step is plain deterministic
arithmetic — repeated runs give bit-identical results.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import twint
from .errors import ToolkitError
from .ratfunc import NoBracketError, RationalFunction, to_bandpass_factors

R1_OHMS = 15e3                  # same series resistor in every channel
R3_MIN_OHMS = 100.0             # gain trimmer floor; r3=0 collapses Eq. coeffs
TARGET_GAIN_DB = 6.5
INPUT_STAGE_GAIN = 39e3 / 33e3
MIXER_FEEDBACK_OHMS = 56e3
_LADDER_TOTAL = 3.3e3 + 150.0 + 330.0

# The frequency search may run the trimmer this far past its nominal top,
# as a fraction of the pot span.  One production band lands a bit beyond
# the 100k top, so channel_response accepts the same head-room.
R2_SEARCH_SLACK = 1.5

_BISECT_ITERS = 60
_MAX_OUTER = 100

KNOWN_BANDS = (200.0, 350.0, 500.0, 700.0, 1000.0, 1400.0, 2000.0, 3200.0)


class PotRangeError(ToolkitError):
    """A trimmer value outside its physical (or head-room) range."""


class ConvergenceError(ToolkitError):
    """The alternating solve did not settle within the iteration cap."""


class Attenuation(enum.Enum):
    """Which tap of the input ladder feeds the filter."""

    LOW_330 = 330.0
    HIGH_480 = 480.0

    @property
    def factor(self) -> float:
        return self.value / _LADDER_TOTAL


@dataclass(frozen=True)
class ChannelSpec:
    """Fixed part values of one bandpass channel."""

    band_hz: float
    c1_c3: float
    c2: float
    r2_fixed: float
    attenuation_class: Attenuation
    mixer_r: float
    r2_pot_max: float = 100e3
    r3_pot_max: float = 20e3
    inverted: bool = False

    def __post_init__(self) -> None:
        for name in ("band_hz", "c1_c3", "c2", "r2_fixed", "mixer_r",
                     "r2_pot_max", "r3_pot_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.band_hz not in KNOWN_BANDS:
            raise ValueError(
                f"band_hz must be one of {KNOWN_BANDS}, got {self.band_hz!r}")
        for name in ("c1_c3", "c2", "r2_fixed", "mixer_r"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.r2_pot_max < 0.0 or not self.r3_pot_max > 0.0:
            raise ValueError("pot ranges must be non-negative (r3: positive)")
        if not isinstance(self.attenuation_class, Attenuation):
            raise ValueError("attenuation_class must be an Attenuation")


@dataclass(frozen=True)
class CalibrationResult:
    band_hz: float
    r2: float
    r3: float
    q: float
    f_peak: float
    gain_db: float
    iterations: int


@dataclass(frozen=True)
class CalibrationFailure:
    """Per-channel failure entry returned by calibrate_all."""

    band_hz: float
    reason: str


# Embedded channel table: capacitors, the fixed part of r2, the ladder tap,
# and the mixer input resistor for each band.
DEFAULT_CHANNEL_SPECS: tuple[ChannelSpec, ...] = (
    ChannelSpec(200.0, 47e-9, 10e-9, 68e3, Attenuation.HIGH_480, 39e3),
    ChannelSpec(350.0, 22e-9, 4.7e-9, 91e3, Attenuation.LOW_330, 33e3),
    ChannelSpec(500.0, 22e-9, 2.2e-9, 91e3, Attenuation.LOW_330, 33e3),
    ChannelSpec(700.0, 10e-9, 1.5e-9, 150e3, Attenuation.LOW_330, 33e3),
    ChannelSpec(1000.0, 10e-9, 910e-12, 150e3, Attenuation.LOW_330, 33e3),
    ChannelSpec(1400.0, 4.7e-9, 910e-12, 150e3, Attenuation.LOW_330, 33e3),
    ChannelSpec(2000.0, 4.7e-9, 470e-12, 150e3, Attenuation.LOW_330, 39e3),
    ChannelSpec(3200.0, 2.2e-9, 470e-12, 68e3, Attenuation.HIGH_480, 33e3),
)

# Factory starting values for r2, shipped alongside the channel table.
# The top band's value fits an evaluation at 3.5 kHz even though that
# channel is trimmed to 3.2 kHz; FACTORY_R2_INIT_EVAL_HZ records the
# frequency each value actually corresponds to.
FACTORY_R2_INIT = {
    200.0: 89.8e3, 350.0: 133e3, 500.0: 140e3, 700.0: 230e3,
    1000.0: 186e3, 1400.0: 201e3, 2000.0: 191e3, 3200.0: 133e3,
}
FACTORY_R2_INIT_EVAL_HZ = {band: band for band in KNOWN_BANDS}
FACTORY_R2_INIT_EVAL_HZ[3200.0] = 3500.0


def default_spec(band_hz: float) -> ChannelSpec:
    """The embedded ChannelSpec for one band."""
    for spec in DEFAULT_CHANNEL_SPECS:
        if spec.band_hz == float(band_hz):
            return spec
    raise ValueError(f"no channel at {band_hz!r} Hz; bands: {KNOWN_BANDS}")


def chain_gain_constant(spec: ChannelSpec) -> float:
    """Frequency-independent gain of everything around the filter stage:
    input stage x ladder tap x mixer, sliders at full volume (unity)."""
    return (INPUT_STAGE_GAIN * spec.attenuation_class.factor
            * MIXER_FEEDBACK_OHMS / spec.mixer_r)


def channel_response(spec: ChannelSpec, r2: float, r3: float) -> RationalFunction:
    """Full-chain transfer function at the given trimmer settings.

    r2 may run up to R2_SEARCH_SLACK pot spans past the fixed resistor —
    the same head-room the calibration search uses.
    """
    r2_hi = spec.r2_fixed + R2_SEARCH_SLACK * spec.r2_pot_max
    if not spec.r2_fixed <= r2 <= r2_hi:
        raise PotRangeError(
            f"r2={r2:g} outside [{spec.r2_fixed:g}, {r2_hi:g}] "
            f"for the {spec.band_hz:g} Hz channel")
    if not 0.0 < r3 <= spec.r3_pot_max:
        raise PotRangeError(
            f"r3={r3:g} outside (0, {spec.r3_pot_max:g}] "
            f"for the {spec.band_hz:g} Hz channel")
    h = twint.coefficients(twint.TwinTParams(
        r1=R1_OHMS, r2=r2, r3=r3, c1=spec.c1_c3, c2=spec.c2, c3=spec.c1_c3))
    scale = chain_gain_constant(spec)
    sign = -h.sign if spec.inverted else h.sign
    return RationalFunction(h.num.scaled(scale), h.den, sign)


def _peak(spec: ChannelSpec, r2: float, r3: float) -> twint.PeakPoint:
    band = spec.band_hz
    return twint.find_peak(channel_response(spec, r2, r3),
                           band / 5.0, band * 5.0)


def _bisect(res, lo: float, hi: float, what: str) -> float:
    flo = res(lo)
    if flo == 0.0:
        return lo
    fhi = res(hi) if hi > lo else flo
    if (flo < 0.0) == (fhi < 0.0):
        raise NoBracketError(what)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        fmid = res(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_r3(spec: ChannelSpec, r2: float) -> float:
    def res(r3: float) -> float:
        return _peak(spec, r2, r3).gain_db - TARGET_GAIN_DB

    return _bisect(
        res, R3_MIN_OHMS, spec.r3_pot_max,
        f"{TARGET_GAIN_DB:g} dB unreachable with the gain trimmer "
        f"(r2={r2:g}, {spec.band_hz:g} Hz channel)")


def _solve_r2(spec: ChannelSpec, r3: float) -> float:
    lo = spec.r2_fixed
    hi = spec.r2_fixed + spec.r2_pot_max

    def res(r2: float) -> float:
        return _peak(spec, r2, r3).f_peak - spec.band_hz

    msg = (f"peak frequency {spec.band_hz:g} Hz unreachable with the "
           f"frequency trimmer (r3={r3:g})")
    try:
        return _bisect(res, lo, hi, msg)
    except NoBracketError:
        hi_ext = spec.r2_fixed + R2_SEARCH_SLACK * spec.r2_pot_max
        if hi_ext <= hi:
            raise
        return _bisect(res, lo, hi_ext, msg + " (head-room included)")


def calibrate_channel(spec: ChannelSpec, *,
                      tol_freq: float = 0.05,
                      tol_gain_db: float = 0.001,
                      r2_init: float | None = None) -> CalibrationResult:
    """Alternating two-trimmer solve for one channel.

    Starts r2 at the factory formula value (clamped to the nominal pot
    range) unless seeded, then alternates gain and frequency bisections
    until the full-chain peak is within tol_freq of the band and within
    tol_gain_db of the 6.5 dB target.  The gain trimmer is re-derived
    from scratch on every pass, so only the r2 seed influences the
    trajectory; seeding with a converged r2 terminates in one pass.
    """
    band = spec.band_hz
    if r2_init is None:
        r2_init = twint.initial_r2(band, R1_OHMS, spec.c1_c3, spec.c2)
    r2 = min(max(r2_init, spec.r2_fixed), spec.r2_fixed + spec.r2_pot_max)

    for iteration in range(1, _MAX_OUTER + 1):
        r3 = _solve_r3(spec, r2)
        r2 = _solve_r2(spec, r3)
        pk = _peak(spec, r2, r3)
        if (abs(pk.f_peak - band) <= tol_freq
                and abs(pk.gain_db - TARGET_GAIN_DB) <= tol_gain_db):
            q = to_bandpass_factors(channel_response(spec, r2, r3)).q
            return CalibrationResult(
                band_hz=band, r2=r2, r3=r3, q=q,
                f_peak=pk.f_peak, gain_db=pk.gain_db, iterations=iteration)
    raise ConvergenceError(
        f"{band:g} Hz channel did not settle in {_MAX_OUTER} passes "
        f"(last peak {pk.f_peak:.3f} Hz / {pk.gain_db:.4f} dB)")


def calibrate_all(specs, *, tol_freq: float = 0.05,
                  tol_gain_db: float = 0.001):
    """calibrate_channel over every spec, ordered by band.

    A failing channel contributes a CalibrationFailure entry instead of
    aborting the rest.
    """
    out: list[CalibrationResult | CalibrationFailure] = []
    for spec in sorted(specs, key=lambda s: s.band_hz):
        try:
            out.append(calibrate_channel(
                spec, tol_freq=tol_freq, tol_gain_db=tol_gain_db))
        except ToolkitError as exc:
            out.append(CalibrationFailure(spec.band_hz, str(exc)))
    return out
