"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it is
absent. Set ``PANSHARP_BACKEND=python`` (or ``native``) to force a choice;
forcing ``native`` raises if the extension failed to build. Both backends
produce bit-identical recolor scans and float32-equal convolutions, which
the parity tests assert.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_forced = os.environ.get("PANSHARP_BACKEND")
if _forced not in (None, "", "native", "python"):
    raise RuntimeError(f"PANSHARP_BACKEND must be 'native' or 'python', got {_forced!r}")

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "native":
            raise
        _impl = _kernels_py

BACKEND: str = "python" if _impl is _kernels_py else "native"

recolor_rows = _impl.recolor_rows
conv2d_replicate = _impl.conv2d_replicate
maxpool_valid = _impl.maxpool_valid


def available_backends() -> dict[str, object]:
    """Importable backend modules by name (for parity tests and benchmarks)."""
    found: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _native

        found["native"] = _native
    except ImportError:
        pass
    return found


def window_offsets(window: int) -> tuple[np.ndarray, np.ndarray]:
    """Window offsets sorted by candidate priority.

    Priority on distance ties: smallest Chebyshev distance from the window
    center first, then row-major order of the candidate position. Requires
    an odd window so the center is a pixel.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    r = window // 2
    offs = [(dy, dx) for dy in range(-r, r + 1) for dx in range(-r, r + 1)]
    offs.sort(key=lambda o: (max(abs(o[0]), abs(o[1])), o[0], o[1]))
    off_y = np.array([o[0] for o in offs], dtype=np.int32)
    off_x = np.array([o[1] for o in offs], dtype=np.int32)
    return off_y, off_x
