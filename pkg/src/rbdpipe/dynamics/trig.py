"""Polynomial sine/cosine with quadrant range reduction."""
from __future__ import annotations

import math

import numpy as np

# pi/2 split into 26-bit pieces so k * _P1 and k * _P2 are exact for |k| < 2**26.
_P1 = 1.5707963109016418
_P2 = 1.5893254712295857e-08
_P3 = 6.123233995736766e-17
_TWO_OVER_PI = 0.6366197723675814
_SMALL = 2.0 ** 26

_SIN = [(-1.0) ** n / math.factorial(2 * n + 1) for n in range(9)]  # through x^17
_COS = [(-1.0) ** n / math.factorial(2 * n) for n in range(9)]  # through x^16


def _poly(coeffs, x2):
    acc = np.full_like(x2, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * x2 + c
    return acc


def _pi_half_scaled(bits: int) -> int:
    """floor(pi/2 * 2**bits) via Machin's formula in integer arithmetic."""
    guard = 32
    scale = 1 << (bits + guard)

    def arctan_inv(x):
        total, term, n, sign = 0, scale // x, 1, 1
        x2 = x * x
        while term:
            total += sign * (term // n)
            term //= x2
            n += 2
            sign = -sign
        return total

    pi = 16 * arctan_inv(5) - 4 * arctan_inv(239)
    return (pi >> 1) >> guard


_BIG_BITS = 1280
_PI_HALF_BIG = _pi_half_scaled(_BIG_BITS)


def _reduce_exact(x: float) -> tuple[int, float]:
    """Exact quadrant reduction for huge arguments using big-integer arithmetic."""
    num, den = float(x).as_integer_ratio()  # den is a power of two
    shift = den.bit_length() - 1
    scaled = num << (_BIG_BITS - shift) if _BIG_BITS >= shift else num >> (shift - _BIG_BITS)
    k = (2 * scaled + _PI_HALF_BIG) // (2 * _PI_HALF_BIG)
    rem = scaled - k * _PI_HALF_BIG
    return int(k % 4), math.ldexp(float(rem >> (_BIG_BITS - 80)), -80)


def trig_approx(q):
    """Return ``(sin q, cos q)`` from degree-17/16 Taylor polynomials.

    Arguments are reduced to [-pi/4, pi/4] with a three-part Cody-Waite split;
    arguments beyond 2**26 fall back to an exact big-integer reduction.
    """
    q = np.asarray(q, dtype=float)
    k = np.rint(q * _TWO_OVER_PI)
    small = np.abs(q) < _SMALL
    ks = np.where(small, k, 0.0)
    r = ((q - ks * _P1) - ks * _P2) - ks * _P3
    quad = np.mod(ks, 4).astype(int)
    if not small.all():
        r = np.array(r, copy=True)
        quad = np.array(quad, copy=True)
        for idx in zip(*np.nonzero(~small)) if q.ndim else [()]:
            quad[idx], r[idx] = _reduce_exact(q[idx])
    r2 = r * r
    s = r * _poly(_SIN, r2)
    c = _poly(_COS, r2)
    sin = np.select([quad == 0, quad == 1, quad == 2], [s, c, -s], -c)
    cos = np.select([quad == 0, quad == 1, quad == 2], [c, -s, -c], s)
    return sin, cos
