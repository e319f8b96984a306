"""Backend selection: compiled Cython kernels when available, numpy otherwise.

Set EXPKANT_BACKEND=python or EXPKANT_BACKEND=compiled to force a choice;
forcing "compiled" raises if the extension did not build.
"""

import os

from . import _kernels_py

KIND_BSPLINE = _kernels_py.KIND_BSPLINE
KIND_FEJER = _kernels_py.KIND_FEJER

try:
    from . import _fastkern  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    _fastkern = None
    HAVE_COMPILED = False

_forced = os.environ.get("EXPKANT_BACKEND", "").strip().lower()
if _forced == "compiled" and not HAVE_COMPILED:  # pragma: no cover
    raise ImportError("EXPKANT_BACKEND=compiled but expkant._fastkern is not built")

if _forced == "python" or not HAVE_COMPILED:
    _impl = _kernels_py
    BACKEND = "python"
else:
    _impl = _fastkern
    BACKEND = "compiled"

bspline_values = _impl.bspline_values
fejer_values = _impl.fejer_values
phase_weighted_sum = _impl.phase_weighted_sum
weighted_series_sum = _impl.weighted_series_sum
