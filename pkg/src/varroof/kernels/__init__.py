"""Kernel backend selection for the oracle refinement loop.

Imports the compiled Cython kernel when available, else the pure-Python twin.
Set VARROOF_KERNEL=python or VARROOF_KERNEL=compiled to force a choice;
``BACKEND`` records which one is live.
"""

import os

_choice = os.environ.get("VARROOF_KERNEL", "auto")

if _choice == "python":
    from .refine_py import refine_isometry
    BACKEND = "python"
elif _choice in ("auto", "compiled"):
    try:
        from ._refine import refine_isometry
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        from .refine_py import refine_isometry
        BACKEND = "python"
else:
    raise ValueError(
        f"VARROOF_KERNEL={_choice!r} not understood; use 'auto', 'python' or 'compiled'"
    )

__all__ = ["refine_isometry", "BACKEND"]
