"""Kernel backend selection.

The raster-accumulation and grid-search inner loops exist twice: a
compiled Cython extension (fast) and a pure-Python fallback with
identical semantics. The compiled backend is preferred when importable;
set FLOODROUTE_KERNEL=python or FLOODROUTE_KERNEL=compiled to force one.
"""

from __future__ import annotations

import os

from . import fallback as _python

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None


def available_backends() -> dict:
    """Importable backends by name; used by parity tests and benchmarks."""
    backends = {"python": _python}
    if _compiled is not None:
        backends["compiled"] = _compiled
    return backends


_forced = os.environ.get("FLOODROUTE_KERNEL")
if _forced:
    try:
        _active = available_backends()[_forced]
    except KeyError:
        raise ImportError(
            f"FLOODROUTE_KERNEL={_forced!r} is not available; "
            f"choices: {sorted(available_backends())}") from None
elif _compiled is not None:
    _active = _compiled
else:
    _active = _python

backend_name: str = _active.BACKEND_NAME
accumulate_decay = _active.accumulate_decay
grid_search = _active.grid_search
