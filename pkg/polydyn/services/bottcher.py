"""Truncated Böttcher coordinates and their polynomial parts.

For P(z) = A z^d + a_1 z^(d-1) + ... + a_d the Böttcher coordinate is
phi(z) = alpha (z + a_1/(dA)) + sum_j alpha_j z^-j with alpha^(d-1) = A,
the unique solution of phi∘P = phi^d with that normalization.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional

from sympy.polys.domains import QQ

from polydyn.core.poly import Poly, adjoin_root
from polydyn.core.rings import AlgExtRing, RationalRing, Ring
from polydyn.core.series import series_inverse, series_mul, series_pow
from polydyn.errors import DegreeError, TruncationError

logger = logging.getLogger("polydyn")


@dataclass(frozen=True)
class BottcherSeries:
    """phi truncated after alpha_M.

    ``psi`` holds the coefficients of phi(z) / (alpha z) as a series in
    u = 1/z: psi_0 = 1, psi_1 = a_1/(dA), psi_(j+1) = alpha_j / alpha.
    """

    poly: Poly
    alpha: Any
    shift: Any
    tail: tuple
    psi: tuple

    @property
    def ring(self) -> Ring:
        return self.poly.ring

    @property
    def order(self) -> int:
        return len(self.tail)

    @property
    def degree(self) -> int:
        return int(self.poly.degree)

    def coefficient(self, j: int) -> Any:
        """alpha_j for 1 <= j <= order."""
        if j < 1:
            raise ValueError(f"Tail index must be positive, got {j}")
        if j > self.order:
            raise TruncationError(f"alpha_{j} is beyond truncation order {self.order}")
        return self.tail[j - 1]

    def linear_part(self) -> Poly:
        return Poly(self.ring, (self.alpha, self.alpha * self.shift))

    def functional_equation_residual(self) -> list:
        """Coefficients of z^j, j = d - M .. d, of phi∘P - phi^d (all zero when correct)."""
        return _residual_window(self)


@dataclass(frozen=True)
class HatPoly:
    """Polynomial part of phi^k and the first tail coefficients alpha_{k,j}."""

    k: int
    hat: Poly
    tail: tuple

    @property
    def order(self) -> int:
        return len(self.tail)

    def tail_coefficient(self, j: int) -> Any:
        if j < 1:
            raise ValueError(f"Tail index must be positive, got {j}")
        if j > self.order:
            raise TruncationError(f"alpha_{{{self.k},{j}}} is beyond truncation order {self.order}")
        return self.tail[j - 1]


def bottcher_series(P: Poly, M: int) -> BottcherSeries:
    """
    Solve phi∘P = phi^d for alpha_1..alpha_M.

    Args:
        P: Polynomial over the rationals, an extension, or QQ[t] with constant
            leading coefficient
        M: Truncation order

    Returns:
        BottcherSeries over the (possibly extended) coefficient ring
    """
    if M < 1:
        raise ValueError(f"Truncation order must be at least 1, got {M}")
    d = P.degree
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")
    d = int(d)
    alpha, ring = adjoin_root(P.leading, d - 1, P.ring)
    P = P.change_ring(ring)
    A = P.leading
    dA_inv = ring.inverse(A * d)
    A_inv = ring.inverse(A)
    alpha_inv = ring.inverse(alpha)
    alpha_A = alpha * A
    shift = P.coefficient(d - 1) * dA_inv

    # w = (P / (A z^d))^-1 as a series in u
    w_order = max(0, M + 1 - 2 * d)
    normalized = [ring.one] + [P.coefficient(d - i) * A_inv for i in range(1, w_order + 1)]
    w = series_inverse(normalized, w_order, ring)
    w_powers = [None, w]

    psi = [ring.one, shift]
    c = [ring.one, shift * d]
    tail = []
    for s in range(1, M + 1):
        k = s + 1
        partial = ring.zero
        for i in range(1, k):
            weight = (d + 1) * i - k
            if weight and not ring.is_zero(psi[i]) and not ring.is_zero(c[k - i]):
                partial = partial + psi[i] * c[k - i] * weight
        partial = partial * QQ(1, k)

        e = d - 1 - s
        lhs = alpha * P.coefficient(e) if e >= 0 else ring.zero
        if e == 0:
            lhs = lhs + alpha * shift
        j = 1
        while s + 1 - d - d * j >= 0:
            while len(w_powers) <= j:
                w_powers.append(series_mul(w_powers[-1], w, w_order, ring))
            term = tail[j - 1] * w_powers[j][s + 1 - d - d * j]
            for _ in range(j):
                term = term * A_inv
            lhs = lhs + term
            j += 1

        alpha_s = (lhs - alpha_A * partial) * dA_inv
        tail.append(alpha_s)
        psi.append(alpha_s * alpha_inv)
        c.append(partial + psi[k] * d)

    logger.debug(f"Böttcher series of {P} computed to order {M}")
    return BottcherSeries(poly=P, alpha=alpha, shift=shift, tail=tuple(tail), psi=tuple(psi))


def bottcher_power(P: Poly, k: int, M: int, series: Optional[BottcherSeries] = None) -> HatPoly:
    """
    Split phi^k into its polynomial part and tail.

    Args:
        P: Polynomial as accepted by ``bottcher_series``
        k: Power, at least 1
        M: Number of tail coefficients alpha_{k,1..M}
        series: Precomputed series of sufficient order (optional)

    Returns:
        HatPoly with hat of degree k and leading coefficient alpha^k
    """
    if k < 1:
        raise ValueError(f"Power must be at least 1, got {k}")
    if M < 1:
        raise ValueError(f"Truncation order must be at least 1, got {M}")
    needed = max(1, k + M - 1)
    if series is None or series.order < needed:
        series = bottcher_series(P, needed)
    ring = series.ring
    psi = list(series.psi[: k + M + 1])
    psi_k = series_pow(psi, k, k + M, ring)
    alpha_k = ring.one
    for _ in range(k):
        alpha_k = alpha_k * series.alpha
    hat = Poly(ring, tuple(alpha_k * psi_k[i] for i in range(k + 1)))
    tail = tuple(alpha_k * psi_k[k + j] for j in range(1, M + 1))
    return HatPoly(k=k, hat=hat, tail=tail)


def verify_hat_functoriality(P: Poly, k: int, M: int = 1, hat: Optional[HatPoly] = None) -> bool:
    """Check P̂_k∘P = P̂_{kd} exactly; ``hat`` overrides the computed P̂_k."""
    d = int(P.degree)
    series = bottcher_series(P, max(1, k * d + M - 1))
    if hat is None:
        hat = bottcher_power(P, k, M, series)
    big = bottcher_power(P, k * d, M, series)
    if hat.hat.ring != series.ring:
        return False
    return hat.hat.compose(series.poly) == big.hat


def evaluate_bottcher(series: BottcherSeries, z: complex, alpha: Optional[complex] = None) -> complex:
    """Numeric value of the truncated phi at a point of large modulus.

    ``alpha`` is the complex value of the root when the ring is an extension
    of the rationals; the positive real root is used by default.
    """
    ring = series.ring
    if isinstance(ring, RationalRing):
        to_complex = ring.to_complex
    elif isinstance(ring, AlgExtRing) and isinstance(ring.base, RationalRing):
        if alpha is None:
            alpha = _real_root(ring.base.to_complex(ring.modulus).real, ring.e)
        root = alpha

        def to_complex(value):
            return ring.to_complex(value, root)
    else:
        raise ValueError(f"Numeric evaluation needs a rational coefficient ring, got {ring}")
    value = to_complex(series.alpha) * (z + to_complex(series.shift))
    power = 1 / z
    for coefficient in series.tail:
        value += to_complex(coefficient) * power
        power /= z
    return value


def _real_root(value: float, e: int) -> complex:
    if value >= 0:
        return complex(value ** (1.0 / e))
    if e % 2:
        return complex(-((-value) ** (1.0 / e)))
    return complex(value) ** (1.0 / e)


def _residual_window(series: BottcherSeries) -> list:
    ring = series.ring
    P = series.poly
    d = series.degree
    M = series.order
    A = P.leading
    A_inv = ring.inverse(A)
    alpha = series.alpha

    alpha_d = ring.one
    for _ in range(d):
        alpha_d = alpha_d * alpha
    psi_d = series_pow(list(series.psi[: M + 1]), d, M, ring)

    w_order = max(0, M - d)
    normalized = [ring.one] + [P.coefficient(d - i) * A_inv for i in range(1, w_order + 1)]
    w = series_inverse(normalized, w_order, ring)

    residual = []
    for e in range(d - M, d + 1):
        lhs = alpha * P.coefficient(e) if e >= 0 else ring.zero
        if e == 0:
            lhs = lhs + alpha * series.shift
        # alpha_j P^-j contributes A^-j [u^(-e-dj)] w^j
        power = None
        j = 1
        while -e - d * j >= 0 and j <= M:
            power = w if power is None else series_mul(power, w, w_order, ring)
            term = series.tail[j - 1] * power[-e - d * j]
            for _ in range(j):
                term = term * A_inv
            lhs = lhs + term
            j += 1
        rhs = alpha_d * psi_d[d - e]
        residual.append(lhs - rhs)
    return residual
