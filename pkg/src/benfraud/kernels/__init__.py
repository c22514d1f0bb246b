"""Split-scan kernels with a compiled fast path and a numpy fallback.

The compiled extension (_scan, built from _scan.pyx) is preferred when
importable; setting BENFRAUD_FORCE_PYTHON_KERNELS=1 forces the numpy
fallback. Both backends are bit-identical by construction, so the choice
never changes any model, report, or output byte.
"""

from __future__ import annotations

import os

from . import pyscan

BACKEND = "python"
scan_grad_splits = pyscan.scan_grad_splits
scan_gini_splits = pyscan.scan_gini_splits

if os.environ.get("BENFRAUD_FORCE_PYTHON_KERNELS") != "1":
    try:
        from . import _scan
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        scan_grad_splits = _scan.scan_grad_splits
        scan_gini_splits = _scan.scan_gini_splits


def available_backends() -> dict:
    """Importable backends by name, for equivalence tests and benchmarks."""
    backends = {"python": pyscan}
    try:
        from . import _scan as compiled
    except ImportError:
        pass
    else:
        backends["compiled"] = compiled
    return backends


__all__ = ["BACKEND", "scan_grad_splits", "scan_gini_splits", "available_backends"]
