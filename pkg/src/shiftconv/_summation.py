"""Order-independent compensated reductions.

``math.fsum`` returns the correctly rounded sum, so the result does not depend
on the order of the terms or on how work was partitioned between workers.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def csum(values) -> complex:
    arr = np.asarray(values)
    if arr.size == 0:
        return 0j
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.ravel()), math.fsum(arr.imag.ravel()))
    return complex(math.fsum(arr.ravel()), 0.0)


def rsum(values: Iterable[float]) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel())
