"""Backend selection: compiled kernels when available, numpy otherwise.

Importing this module picks the implementation once; ``USING_COMPILED``
records the outcome so diagnostics and benchmarks can report it.
"""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels as _impl

    USING_COMPILED = True
except ImportError:
    _impl = _kernels_py
    USING_COMPILED = False

assemble_operator = _impl.assemble_operator
cauchy_targets = _impl.cauchy_targets

__all__ = ["USING_COMPILED", "assemble_operator", "cauchy_targets"]
