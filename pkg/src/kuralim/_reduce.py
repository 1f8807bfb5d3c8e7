"""Exactly-rounded reductions.

Interaction sums use ``math.fsum`` so the result is the correctly rounded
sum of the operands.  That buys two properties the dynamics modules rely
on: permuting particles permutes trajectories bitwise (the sum of a
multiset does not depend on operand order), and symmetric configurations
cancel to the last ulp.
"""
from __future__ import annotations

import math

import numpy as np


def exact_sum(values: np.ndarray) -> float:
    return math.fsum(values)


def exact_mean(values: np.ndarray) -> float:
    return math.fsum(values) / len(values)


def exact_mean_complex(values: np.ndarray) -> complex:
    n = len(values)
    return complex(math.fsum(values.real) / n, math.fsum(values.imag) / n)
