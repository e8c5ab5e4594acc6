"""Kernel backend selection.

The compiled extension is preferred when it built; the NumPy fallback is a
drop-in replacement. SMUDGE_BACKEND=python or =compiled forces a choice
(forcing 'compiled' raises if the extension is unavailable).
"""

from __future__ import annotations

import os

_requested = os.environ.get("SMUDGE_BACKEND", "auto").strip().lower() or "auto"

if _requested in ("auto", "compiled"):
    try:
        from . import _kernels as _impl

        COMPILED = True
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "SMUDGE_BACKEND=compiled but the smudge.models._kernels extension is not built"
            )
        from . import kernels_py as _impl

        COMPILED = False
elif _requested in ("python", "pure"):
    from . import kernels_py as _impl

    COMPILED = False
else:
    raise ValueError(f"unknown SMUDGE_BACKEND value {_requested!r}")

hinge_epoch = _impl.hinge_epoch
emb_epoch = _impl.emb_epoch


def backend_name() -> str:
    return "compiled" if COMPILED else "python"
