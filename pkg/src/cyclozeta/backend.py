"""Backend selection for the hot kernels.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is missing or when CYCLOZETA_BACKEND=pure is set.
"""

from __future__ import annotations

import os

from . import _accel_py

_requested = os.environ.get("CYCLOZETA_BACKEND", "auto").lower()

if _requested not in ("auto", "native", "pure"):
    raise RuntimeError(f"CYCLOZETA_BACKEND must be auto|native|pure, got {_requested!r}")

if _requested == "pure":
    _impl = _accel_py
else:
    try:
        from . import _accel as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "native":
            raise
        _impl = _accel_py

BACKEND_NAME: str = _impl.BACKEND_NAME
em_power_sum = _impl.em_power_sum
gcd_pair_rows = _impl.gcd_pair_rows
e_series_pair_sum = _impl.e_series_pair_sum
