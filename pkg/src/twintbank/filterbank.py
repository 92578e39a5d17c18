"""Whole-bank composition: ten channels, inversions, sliders, summed mix.

Channels 1..8 are the calibrated bandpass sections.  Channels 0 and 9
are three-pole Sallen-Key lowpass/highpass end sections; their
as-built component values are not part of the embedded data, so by
default they are synthesized as third-order Butterworth alignments at
100 Hz and 7 kHz, and explicit component values route through the
netlist engine instead.  Alternating channels are inverted before the
final mix so that neighboring stop-band phases interfere less
destructively — that is what flattens the summed response.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import calibrate, kernels, mna
from .calibrate import (
    CalibrationFailure,
    CalibrationResult,
    ChannelSpec,
    INPUT_STAGE_GAIN,
    MIXER_FEEDBACK_OHMS,
    channel_response,
)
from .errors import ToolkitError
from .ratfunc import Polynomial, RationalFunction, to_bandpass_factors

_TWO_PI = 2.0 * math.pi

# Channels {200, 500, 1000, 2000, highpass}: the strict alternation over
# the ten frequency-ordered channels that includes the highpass.
DEFAULT_INVERSION_PATTERN = frozenset({1, 3, 5, 7, 9})

# The end channels bypass the attenuation ladder: input stage and a 33k
# mixer resistor only.
END_CHANNEL_GAIN = INPUT_STAGE_GAIN * MIXER_FEEDBACK_OHMS / 33e3

DEFAULT_LOWPASS_CUTOFF_HZ = 100.0
DEFAULT_HIGHPASS_CUTOFF_HZ = 7e3


class EmptyBandError(ToolkitError):
    """ripple_db was asked about a band containing fewer than two rows."""


class BankConfigError(ToolkitError):
    """Malformed bank-configuration data."""


class FilterKind(enum.Enum):
    LOWPASS = "lowpass"
    HIGHPASS = "highpass"


@dataclass(frozen=True)
class SallenKeyComponents:
    r: tuple[float, float, float]
    c: tuple[float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        if len(self.r) != 3 or len(self.c) != 3:
            raise ValueError("need exactly three resistors and capacitors")
        if any(x <= 0.0 for x in self.r + self.c):
            raise ValueError("component values must be positive")


@dataclass(frozen=True)
class SallenKeyConfig:
    kind: FilterKind
    cutoff_hz: float
    components: SallenKeyComponents | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, FilterKind):
            raise ValueError(f"kind must be a FilterKind, got {self.kind!r}")
        if not self.cutoff_hz > 0.0:
            raise ValueError("cutoff_hz must be > 0")


def sallen_key_tf(cfg: SallenKeyConfig) -> RationalFunction:
    """Transfer function of a three-pole end section.

    With explicit components the single-opamp topology (RC section into a
    unity-gain Sallen-Key pair) is solved through the netlist engine;
    otherwise a third-order Butterworth alignment at cutoff_hz is
    synthesized directly.
    """
    if cfg.components is not None:
        return mna.transfer_function(
            mna.parse_netlist(_sallen_key_netlist(cfg.kind, cfg.components)))
    w = _TWO_PI * cfg.cutoff_hz
    den = Polynomial((1.0, 2.0 / w, 2.0 / w ** 2, 1.0 / w ** 3))
    if cfg.kind is FilterKind.LOWPASS:
        return RationalFunction(Polynomial((1.0,)), den)
    return RationalFunction(Polynomial((0.0, 0.0, 0.0, 1.0 / w ** 3)), den)


def _sallen_key_netlist(kind: FilterKind, parts: SallenKeyComponents) -> str:
    r, c = parts.r, parts.c
    if kind is FilterKind.LOWPASS:
        series = [("R1", r[0]), ("R2", r[1]), ("R3", r[2])]
        shunts = [("C1", c[0]), ("C2", c[1]), ("C3", c[2])]
    else:
        series = [("C1", c[0]), ("C2", c[1]), ("C3", c[2])]
        shunts = [("R1", r[0]), ("R2", r[1]), ("R3", r[2])]
    (s1, v1), (s2, v2), (s3, v3) = series
    (p1, w1), (p2, w2), (p3, w3) = shunts
    return "\n".join([
        f"{s1} in a {v1!r}",
        f"{p1} a 0 {w1!r}",
        f"{s2} a b {v2!r}",
        f"{p2} b out {w2!r}",
        f"{s3} b c {v3!r}",
        f"{p3} c 0 {w3!r}",
        "O1 c out out",
        ".in in",
        ".out out",
    ])


@dataclass(frozen=True)
class BankChannel:
    """One mixer input: its full-chain response plus provenance."""

    label: str
    response: RationalFunction
    spec: ChannelSpec | None = None
    calibration: CalibrationResult | None = None


@dataclass(frozen=True)
class BankConfig:
    channels: tuple[BankChannel, ...]
    inversion_pattern: frozenset[int] = DEFAULT_INVERSION_PATTERN
    slider_gains: tuple[float, ...] = (1.0,) * 10

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "inversion_pattern",
                           frozenset(self.inversion_pattern))
        object.__setattr__(self, "slider_gains",
                           tuple(float(g) for g in self.slider_gains))
        if len(self.channels) != 10:
            raise ValueError(f"need 10 channels, got {len(self.channels)}")
        if len(self.slider_gains) != 10:
            raise ValueError("need 10 slider gains")
        if any(not 0.0 <= g <= 1.0 for g in self.slider_gains):
            raise ValueError("slider gains live in [0, 1]")
        if any(i not in range(10) for i in self.inversion_pattern):
            raise ValueError("inversion indices live in 0..9")

    def with_inversion_flipped(self, index: int) -> BankConfig:
        if index not in range(10):
            raise ValueError("inversion indices live in 0..9")
        return BankConfig(self.channels,
                          self.inversion_pattern ^ {index},
                          self.slider_gains)


@dataclass(frozen=True)
class SweepResult:
    """Complex response samples over strictly increasing frequencies."""

    f_hz: np.ndarray
    re: np.ndarray
    im: np.ndarray

    def __post_init__(self) -> None:
        for name in ("f_hz", "re", "im"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.f_hz.ndim != 1 or self.f_hz.size == 0:
            raise ValueError("need a one-dimensional, nonempty grid")
        if self.re.shape != self.f_hz.shape or self.im.shape != self.f_hz.shape:
            raise ValueError("component arrays must match the grid shape")
        if self.f_hz.size > 1 and not np.all(np.diff(self.f_hz) > 0.0):
            raise ValueError("frequencies must be strictly increasing")

    @property
    def magnitude_db(self) -> np.ndarray:
        mag = np.hypot(self.re, self.im)
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(mag)

    @property
    def phase_deg(self) -> np.ndarray:
        return np.degrees(np.arctan2(self.im, self.re))

    def rows(self):
        """(f_hz, magnitude_db, phase_deg, re, im) per grid point."""
        return zip(self.f_hz, self.magnitude_db, self.phase_deg,
                   self.re, self.im)


def default_bank(calibration=None, *,
                 lowpass: SallenKeyConfig | None = None,
                 highpass: SallenKeyConfig | None = None,
                 inversion_pattern=DEFAULT_INVERSION_PATTERN,
                 slider_gains=(1.0,) * 10) -> BankConfig:
    """The embedded ten-channel bank.

    calibration may carry the eight CalibrationResults (ordered by band)
    to avoid re-running the solve; by default calibrate_all runs here.
    """
    if lowpass is None:
        lowpass = SallenKeyConfig(FilterKind.LOWPASS, DEFAULT_LOWPASS_CUTOFF_HZ)
    if highpass is None:
        highpass = SallenKeyConfig(FilterKind.HIGHPASS,
                                   DEFAULT_HIGHPASS_CUTOFF_HZ)
    specs = calibrate.DEFAULT_CHANNEL_SPECS
    if calibration is None:
        calibration = calibrate.calibrate_all(specs)
    failures = [r for r in calibration if isinstance(r, CalibrationFailure)]
    if failures:
        raise ToolkitError("calibration failed: " + "; ".join(
            f"{f.band_hz:g} Hz: {f.reason}" for f in failures))
    by_band = {r.band_hz: r for r in calibration}
    channels = [_end_channel("lowpass", lowpass)]
    for spec in specs:
        result = by_band.get(spec.band_hz)
        if result is None:
            raise ValueError(f"no calibration entry for {spec.band_hz:g} Hz")
        channels.append(BankChannel(
            label=f"{spec.band_hz:g}",
            response=channel_response(spec, result.r2, result.r3),
            spec=spec,
            calibration=result,
        ))
    channels.append(_end_channel("highpass", highpass))
    return BankConfig(tuple(channels), inversion_pattern, slider_gains)


def _end_channel(label: str, cfg: SallenKeyConfig) -> BankChannel:
    h = sallen_key_tf(cfg)
    scaled = RationalFunction(h.num.scaled(END_CHANNEL_GAIN), h.den, h.sign)
    return BankChannel(label=label, response=scaled)


def _as_grid(freqs) -> np.ndarray:
    grid = np.asarray(freqs, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("need a one-dimensional, nonempty frequency grid")
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise ValueError("frequencies must be strictly increasing")
    if grid[0] < 0.0:
        raise ValueError("frequencies must be non-negative")
    return grid


def _channel_values(bank: BankConfig, index: int, grid: np.ndarray) -> np.ndarray:
    ch = bank.channels[index]
    scale = ch.response.sign * bank.slider_gains[index]
    if index in bank.inversion_pattern:
        scale = -scale
    vals = kernels.eval_rational(ch.response.num.coeffs,
                                 ch.response.den.coeffs, _TWO_PI * grid)
    return scale * vals


def channel_sweep(bank: BankConfig, index: int, freqs) -> SweepResult:
    """One channel's complex response: chain gain, inversion, slider."""
    if index not in range(len(bank.channels)):
        raise IndexError(f"channel index {index} outside 0..9")
    grid = _as_grid(freqs)
    vals = _channel_values(bank, index, grid)
    return SweepResult(grid, vals.real.copy(), vals.imag.copy())


def summed_sweep(bank: BankConfig, freqs) -> SweepResult:
    """Complex sum of all ten channels at the mixer output."""
    grid = _as_grid(freqs)
    total = np.zeros(grid.shape, dtype=np.complex128)
    for index in range(len(bank.channels)):
        total = total + _channel_values(bank, index, grid)
    return SweepResult(grid, total.real.copy(), total.imag.copy())


def ripple_db(sweep: SweepResult, f_lo: float, f_hi: float) -> float:
    """max - min of magnitude_db over rows with f_lo <= f <= f_hi."""
    if not f_lo < f_hi:
        raise ValueError("need f_lo < f_hi")
    mask = (sweep.f_hz >= f_lo) & (sweep.f_hz <= f_hi)
    if int(mask.sum()) < 2:
        raise EmptyBandError(
            f"fewer than two sweep rows inside [{f_lo:g}, {f_hi:g}] Hz")
    mags = sweep.magnitude_db[mask]
    return float(np.max(mags) - np.min(mags))


# ---------------------------------------------------------------------------
# Bank configuration files


def load_bank(source) -> BankConfig:
    """Build a BankConfig from a JSON file, path, or already-parsed dict.

    Recognized keys (all optional; omitted ones take embedded defaults):

    - "inversion_pattern": "default", "none", or a list of indices 0..9
    - "slider_gains": list of 10 values in [0, 1]
    - "lowpass" / "highpass": {"cutoff_hz": x} plus optionally
      {"components": {"r": [r1, r2, r3], "c": [c1, c2, c3]}}
    - "bands": list of {"band_hz": b, "r2": x, "r3": y} trimmer overrides;
      bands not listed are calibrated as usual
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BankConfigError(f"{source}: not valid JSON ({exc})") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise BankConfigError("bank configuration must be a JSON object")
    known = {"inversion_pattern", "slider_gains", "lowpass", "highpass",
             "bands"}
    unknown = set(data) - known
    if unknown:
        raise BankConfigError(
            f"unknown bank configuration keys: {sorted(unknown)}")

    inversion = _parse_inversions(data.get("inversion_pattern", "default"))
    sliders = data.get("slider_gains", [1.0] * 10)
    lowpass = _parse_end_section(data.get("lowpass"), FilterKind.LOWPASS,
                                 DEFAULT_LOWPASS_CUTOFF_HZ)
    highpass = _parse_end_section(data.get("highpass"), FilterKind.HIGHPASS,
                                  DEFAULT_HIGHPASS_CUTOFF_HZ)

    overrides = {}
    for entry in data.get("bands", []):
        if not isinstance(entry, dict) or "band_hz" not in entry:
            raise BankConfigError(f"band entries need 'band_hz': {entry!r}")
        extra = set(entry) - {"band_hz", "r2", "r3"}
        if extra:
            raise BankConfigError(
                f"unknown band keys for {entry['band_hz']!r}: {sorted(extra)}")
        if "r2" not in entry or "r3" not in entry:
            raise BankConfigError(
                f"band override for {entry['band_hz']!r} needs both r2 and r3")
        overrides[float(entry["band_hz"])] = (float(entry["r2"]),
                                              float(entry["r3"]))
    bad = set(overrides) - set(calibrate.KNOWN_BANDS)
    if bad:
        raise BankConfigError(f"no such bands: {sorted(bad)}")

    results: list[CalibrationResult] = []
    to_calibrate = [s for s in calibrate.DEFAULT_CHANNEL_SPECS
                    if s.band_hz not in overrides]
    calibrated = {r.band_hz: r for r in calibrate.calibrate_all(to_calibrate)
                  if isinstance(r, CalibrationResult)} if to_calibrate else {}
    if len(calibrated) != len(to_calibrate):
        raise ToolkitError("calibration failed while loading bank config")
    for spec in calibrate.DEFAULT_CHANNEL_SPECS:
        if spec.band_hz in overrides:
            r2, r3 = overrides[spec.band_hz]
            pk = calibrate._peak(spec, r2, r3)
            q = to_bandpass_factors(channel_response(spec, r2, r3)).q
            results.append(CalibrationResult(
                band_hz=spec.band_hz, r2=r2, r3=r3, q=q,
                f_peak=pk.f_peak, gain_db=pk.gain_db, iterations=0))
        else:
            results.append(calibrated[spec.band_hz])
    try:
        sliders = tuple(float(g) for g in sliders)
    except (TypeError, ValueError) as exc:
        raise BankConfigError(f"bad slider_gains: {sliders!r}") from exc
    try:
        return default_bank(results, lowpass=lowpass, highpass=highpass,
                            inversion_pattern=inversion, slider_gains=sliders)
    except ValueError as exc:
        raise BankConfigError(str(exc)) from exc


def _parse_inversions(value) -> frozenset[int]:
    if value == "default":
        return DEFAULT_INVERSION_PATTERN
    if value == "none":
        return frozenset()
    if isinstance(value, list) and all(isinstance(i, int) for i in value):
        if any(i not in range(10) for i in value):
            raise BankConfigError("inversion indices live in 0..9")
        return frozenset(value)
    raise BankConfigError(
        f"inversion_pattern must be 'default', 'none', or a list of "
        f"indices, got {value!r}")


def _parse_end_section(value, kind: FilterKind,
                       default_cutoff: float) -> SallenKeyConfig:
    if value is None:
        return SallenKeyConfig(kind, default_cutoff)
    if not isinstance(value, dict):
        raise BankConfigError(f"{kind.value} section must be an object")
    unknown = set(value) - {"cutoff_hz", "components"}
    if unknown:
        raise BankConfigError(
            f"unknown {kind.value} keys: {sorted(unknown)}")
    cutoff = float(value.get("cutoff_hz", default_cutoff))
    comps = None
    if "components" in value:
        cv = value["components"]
        if (not isinstance(cv, dict) or set(cv) != {"r", "c"}):
            raise BankConfigError(
                f"{kind.value} components need exactly 'r' and 'c' lists")
        comps = SallenKeyComponents(tuple(cv["r"]), tuple(cv["c"]))
    try:
        return SallenKeyConfig(kind, cutoff, comps)
    except ValueError as exc:
        raise BankConfigError(str(exc)) from exc
