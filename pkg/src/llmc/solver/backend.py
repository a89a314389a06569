"""Kernel selection: compiled when importable, pure Python otherwise.

Set ``LLMC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernel

compiled = None
if os.environ.get("LLMC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernel as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

NAME = "cython" if compiled is not None else "python"


def search(prog, vlo, vhi, budget, deadline, force_python=False):
    if compiled is None or force_python or prog.exact_only:
        return _pykernel.search(prog, vlo, vhi, budget, deadline)
    return compiled.search(prog, vlo, vhi, budget, deadline)


def propagate(prog, vlo, vhi, force_python=False):
    if compiled is None or force_python or prog.exact_only:
        return _pykernel.propagate(prog, vlo, vhi)
    return compiled.propagate_py(prog, vlo, vhi)
