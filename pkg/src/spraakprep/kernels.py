"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is a
drop-in replacement. ``SPRAAKPREP_PURE_PYTHON=1`` forces the fallback,
which the test suite and the benchmark use to compare both paths.
"""

import os

if os.environ.get("SPRAAKPREP_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

rms_power = _impl.rms_power
cyclic_take = _impl.cyclic_take
scale_add_peak = _impl.scale_add_peak
levenshtein_counts = _impl.levenshtein_counts
