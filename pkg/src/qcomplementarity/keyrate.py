"""Csiszár–Körner key-rate lower bound from the purity/QMI complementarity."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .complementarity import bound_for
from .errors import InputError
from .qla import binary_entropy, shannon_entropy

THRESHOLD_BRACKET = (1e-6, 0.25)
THRESHOLD_TOL = 1e-10
THRESHOLD_MAX_ITER = 200


def _check_error_rate(e: float) -> float:
    if not 0.0 <= e <= 0.5:
        raise InputError(f"bit error rate {e} outside [0, 1/2]")
    return float(e)


def raw_key_mutual_information(e: float) -> float:
    """1 - h(e): mutual information of the raw key bits at error rate e."""
    return 1.0 - binary_entropy(_check_error_rate(e))


def ck_rate_lower_bound(
    e: float, s_ab: float, d_ab: int = 4, d_e: int = 4, b: float | None = None
) -> float:
    """1 - h(e) - 2 min(log2 d_ab, log2 d_e) (b - P_AB).

    ``b`` defaults to the complementarity bound for (d_ab, d_e). Negative
    values are returned unchanged: the bound is then uninformative.
    """
    e = _check_error_rate(e)
    if d_ab < 2 or d_e < 2:
        raise InputError("dimensions must be at least 2")
    log_ab = math.log2(d_ab)
    if not 0.0 <= s_ab <= log_ab + 1e-12:
        raise InputError(f"entropy {s_ab} outside [0, log2 d_ab = {log_ab}]")
    if b is None:
        b = bound_for(d_ab, d_e)
    purity = (log_ab - s_ab) / log_ab
    return 1.0 - binary_entropy(e) - 2 * min(log_ab, math.log2(d_e)) * (b - purity)


def werner_error_rate(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InputError(f"Werner parameter p={p} outside [0, 1]")
    return (1.0 - p) / 2


def werner_entropy_from_error(e: float) -> float:
    e = _check_error_rate(e)
    return shannon_entropy([e / 2, e / 2, e / 2, 1 - 1.5 * e])


def werner_rate(e: float) -> float:
    """Rate bound for a shared Werner state with bit error rate e (d_AB <= d_E, b = 1)."""
    return ck_rate_lower_bound(e, werner_entropy_from_error(e), 4, 4, 1.0)


def werner_threshold() -> float:
    """Largest bit error rate with a positive Werner-state rate bound (bisection)."""
    lo, hi = THRESHOLD_BRACKET
    f_lo = werner_rate(lo)
    if f_lo <= 0 or werner_rate(hi) >= 0:
        raise RuntimeError("threshold is not bracketed")
    mid = lo
    for _ in range(THRESHOLD_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f_mid = werner_rate(mid)
        if abs(f_mid) < THRESHOLD_TOL:
            break
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    return mid


@dataclass(frozen=True)
class KeyRateScenario:
    error_rate: float
    entropy_ab: float
    bound_b: float
    rate_lower_bound: float

    @classmethod
    def from_error(cls, e: float, s_ab: float, d_ab: int = 4, d_e: int = 4, b: float | None = None):
        if b is None:
            b = bound_for(d_ab, d_e)
        return cls(e, s_ab, b, ck_rate_lower_bound(e, s_ab, d_ab, d_e, b))

    @classmethod
    def werner(cls, p: float):
        e = werner_error_rate(p)
        return cls.from_error(e, werner_entropy_from_error(e), 4, 4, 1.0)
