"""Bessel functions of the first kind for integer order.

Small arguments use the ascending power series where its terms decrease
monotonically; everything else goes through Miller's backward recurrence
normalised with ``J_0 + 2 * sum(J_2k) = 1``. Both paths keep the absolute
error below ~1e-15 for ``x <= ARG_CAP``.
"""

from __future__ import annotations

import math

import numpy as np

ORDER_CAP = 64
ARG_CAP = 200.0

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250


def _check_order(order: int) -> None:
    if abs(order) > ORDER_CAP:
        raise ValueError(f"|order| = {abs(order)} exceeds the order cap {ORDER_CAP}")


def _check_args(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError("Bessel argument must be finite")
    if np.any(x < 0):
        raise ValueError("Bessel argument must be nonnegative")
    if np.any(x > ARG_CAP):
        raise ValueError(f"Bessel argument exceeds the cap {ARG_CAP}")


def _series(m: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    h2 = half * half
    term = half**m / math.factorial(m)
    total = term.copy()
    for k in range(1, 200):
        term = -term * h2 / (k * (k + m))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller(max_order: int, x: np.ndarray) -> np.ndarray:
    """Rows J_0..J_max_order at strictly positive ``x`` (1-d)."""
    top = max(float(max_order + 1), float(x.max()))
    start = int(top + 12.0 * top ** (1.0 / 3.0) + 20.0)
    start += start % 2
    rows = np.zeros((max_order + 1, x.size))
    p_next = np.zeros_like(x)
    p = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        if k % 2 == 0:
            norm += 2.0 * p
        if k <= max_order:
            rows[k] = p
        p_next, p = p, k * two_over_x * p - p_next
        big = np.abs(p) > _RESCALE_AT
        if big.any():
            p[big] *= _RESCALE_BY
            p_next[big] *= _RESCALE_BY
            norm[big] *= _RESCALE_BY
            rows[:, big] *= _RESCALE_BY
    norm += p
    rows[0] = p
    return rows / norm


def bessel_j_table(max_order: int, x) -> np.ndarray:
    """J_0(x) .. J_max_order(x) stacked along a new leading axis.

    ``x`` may be a scalar or an array of any shape; the result has shape
    ``(max_order + 1,) + np.shape(x)``.
    """
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    if max_order > ORDER_CAP + 1:
        raise ValueError(f"max_order exceeds {ORDER_CAP + 1}")
    xa = np.asarray(x, dtype=float)
    _check_args(xa)
    flat = xa.ravel()
    out = np.empty((max_order + 1, flat.size))
    if flat.size:
        # series terms shrink monotonically while (x/2)^2 <= m + 1; x <= 2 always qualifies
        quarter_sq = 0.25 * flat * flat
        recur = quarter_sq > 1.0
        if recur.any():
            out[:, recur] = _miller(max_order, flat[recur])
        for m in range(max_order + 1):
            sel = quarter_sq <= m + 1
            if sel.any():
                out[m, sel] = _series(m, flat[sel])
    return out.reshape((max_order + 1,) + xa.shape)


def _signed(order: int, table_row: np.ndarray) -> np.ndarray:
    if order < 0 and order % 2:
        return -table_row
    return table_row


def bessel_j(order: int, x):
    """J_order(x) for integer order and 0 <= x <= ARG_CAP."""
    _check_order(order)
    m = abs(int(order))
    row = bessel_j_table(m, x)[m]
    val = _signed(order, row)
    return float(val) if np.ndim(x) == 0 else val


def bessel_j_prime(order: int, x):
    """dJ_order/dx via (J_{order-1} - J_{order+1}) / 2."""
    order = int(order)
    _check_order(order)
    m = abs(order)
    table = bessel_j_table(m + 1, x)
    lower = -table[1] if m == 0 else table[m - 1]
    deriv = 0.5 * (lower - table[m + 1])
    val = _signed(order, deriv)
    return float(val) if np.ndim(x) == 0 else val


def bessel_j_and_prime(order: int, x):
    """(J_order(x), J'_order(x)) sharing one recurrence pass."""
    order = int(order)
    _check_order(order)
    m = abs(order)
    table = bessel_j_table(m + 1, x)
    lower = -table[1] if m == 0 else table[m - 1]
    value = _signed(order, table[m])
    deriv = _signed(order, 0.5 * (lower - table[m + 1]))
    if np.ndim(x) == 0:
        return float(value), float(deriv)
    return value, deriv
