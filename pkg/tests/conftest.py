"""Shared fixtures.

The embedded-bank calibration is the one genuinely expensive computation
in the suite, so it runs once per session and every test that needs
trimmer values or a built bank shares the result.
"""

import pytest

from twintbank import calibrate, filterbank


@pytest.fixture(scope="session")
def calibration():
    results = calibrate.calibrate_all(calibrate.DEFAULT_CHANNEL_SPECS)
    bad = [r for r in results if isinstance(r, calibrate.CalibrationFailure)]
    assert not bad, f"embedded defaults failed to calibrate: {bad}"
    return results


@pytest.fixture(scope="session")
def bank(calibration):
    return filterbank.default_bank(calibration)
