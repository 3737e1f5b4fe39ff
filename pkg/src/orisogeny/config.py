"""Run-time settings shared by the algorithms.

Settings live in a context variable so a caller can override them for one
computation without threading arguments through every function.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    # largest prime allowed in an isogeny degree handled by kernel extraction
    prime_cap: int = 64
    # largest extension degree d (field F_{p^{2d}}) used for torsion
    max_ext_degree: int = 24
    # torsion needed for kernel extraction must live at or below this degree;
    # it bounds the work per prime power rather than correctness
    cheap_ext_degree: int = 6
    # verify division results pointwise on random points
    verify: bool = True
    seed: int = 0


_current: contextvars.ContextVar[Settings] = contextvars.ContextVar("settings", default=Settings())


def current() -> Settings:
    return _current.get()


@contextlib.contextmanager
def using(settings: Settings | None = None, **overrides):
    base = settings or current()
    token = _current.set(replace(base, **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
