"""Ranking-kernel selection: compiled extension when built, numpy fallback otherwise.

Set ``CAMSTYLE_RANK_IMPL=python`` (or ``cython``) to pin the choice.
"""

from __future__ import annotations

import os
from typing import Callable

from camstyle.evaluation import _rank_py

try:
    from camstyle.evaluation import _rank_cy
    HAVE_CYTHON = True
except ImportError:
    _rank_cy = None
    HAVE_CYTHON = False

KernelFn = Callable


def available_kernels() -> tuple[str, ...]:
    return ("python", "cython") if HAVE_CYTHON else ("python",)


def active_kernel() -> str:
    forced = os.environ.get("CAMSTYLE_RANK_IMPL", "").lower()
    if forced == "python":
        return "python"
    if forced == "cython":
        if not HAVE_CYTHON:
            raise RuntimeError("CAMSTYLE_RANK_IMPL=cython but the extension is not built")
        return "cython"
    return "cython" if HAVE_CYTHON else "python"


def get_kernel(impl: str | None = None) -> KernelFn:
    name = impl if impl is not None else active_kernel()
    if name == "python":
        return _rank_py.rank_queries
    if name == "cython":
        if not HAVE_CYTHON:
            raise RuntimeError("compiled ranking kernel is not built")
        return _rank_cy.rank_queries
    raise ValueError(f"unknown ranking kernel {name!r}")
