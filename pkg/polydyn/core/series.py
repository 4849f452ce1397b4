"""Truncated power series in u = 1/z.

A series is a list ``[c_0, c_1, ..., c_N]`` of ring elements standing for
c_0 + c_1 u + ... + c_N u^N + O(u^(N+1)).
"""

from typing import Any, Sequence

from sympy.polys.domains import QQ

from polydyn.core.rings import Ring
from polydyn.errors import NotInvertibleError


def series_mul(a: Sequence, b: Sequence, order: int, ring: Ring) -> list:
    """Product of two series through u^order."""
    result = [ring.zero] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if ring.is_zero(x):
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if not ring.is_zero(y):
                result[i + j] = result[i + j] + x * y
    return result


def series_pow(f: Sequence, exponent: Any, order: int, ring: Ring) -> list:
    """Power ``f**exponent`` through u^order.

    The exponent may be any rational number when f_0 = 1; otherwise it must
    be an integer and f_0 must be invertible. Uses the J.C.P. Miller
    recurrence c_k = (1/k) * sum_{i=1..k} ((p+1)i - k) f_i c_{k-i}.
    """
    p = QQ.convert(exponent)
    f = [ring.convert(c) for c in f] + [ring.zero] * max(0, order + 1 - len(f))
    lead = f[0]
    if ring.is_zero(lead):
        raise NotInvertibleError("Series with zero constant term has no power")
    scale = ring.one
    if lead != ring.one:
        if p.denominator != 1:
            raise NotInvertibleError("Rational powers need constant term 1")
        lead_inv = ring.inverse(lead)
        f = [c * lead_inv for c in f]
        n = int(p.numerator)
        scale = _ring_power(lead, n, ring)
    result = [ring.one] + [ring.zero] * order
    for k in range(1, order + 1):
        acc = ring.zero
        for i in range(1, k + 1):
            if ring.is_zero(f[i]) or ring.is_zero(result[k - i]):
                continue
            weight = (p + 1) * i - k
            if weight:
                acc = acc + f[i] * result[k - i] * weight
        result[k] = acc * QQ(1, k)
    if scale != ring.one:
        result = [c * scale for c in result]
    return result


def series_inverse(f: Sequence, order: int, ring: Ring) -> list:
    """Multiplicative inverse through u^order."""
    return series_pow(f, -1, order, ring)


def _ring_power(value: Any, n: int, ring: Ring) -> Any:
    if n < 0:
        return _ring_power(ring.inverse(value), -n, ring)
    result = ring.one
    for _ in range(n):
        result = result * value
    return result
