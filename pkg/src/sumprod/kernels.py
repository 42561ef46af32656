"""Kernel backend selection.

The compiled extension is used when importable; set ``SUMPROD_PURE=1`` to
force the numpy fallback.  Both backends expose the same functions.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("SUMPROD_PURE") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND

comp_dot = _impl.comp_dot
harmonic_prefix = _impl.harmonic_prefix
frac_phase = _impl.frac_phase
add_multiples = _impl.add_multiples
liouville_table = _impl.liouville_table
scan_pairs_mask = _impl.scan_pairs_mask
color_search = _impl.color_search


def backends() -> dict:
    """All importable backends by name (the fallback is always present)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
