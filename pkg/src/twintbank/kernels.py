"""Kernel backend selection.

Imports the compiled extension when present, otherwise the NumPy
fallback.  Set TWINTBANK_PURE_PYTHON=1 to force the fallback (benchmarks
and backend cross-checks use this).
"""

from __future__ import annotations

import os

if os.environ.get("TWINTBANK_PURE_PYTHON"):
    from . import _pykernels as _impl

    COMPILED = False
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from . import _pykernels as _impl  # type: ignore[no-redef]

        COMPILED = False

eval_rational = _impl.eval_rational
abs2_at = _impl.abs2_at
scan_max_abs2 = _impl.scan_max_abs2
golden_max = _impl.golden_max


def backend_name() -> str:
    return "compiled" if COMPILED else "python"
