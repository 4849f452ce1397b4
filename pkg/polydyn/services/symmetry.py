"""Symmetry groups, Chebyshev polynomials and composition structure.

For a centered polynomial with support S, the symmetry group is U_m with m
the gcd of the gaps of S, acting through rho(zeta) = zeta^mu with mu = min S.
Everything here is read off exponent patterns, so no roots of unity are
ever adjoined.
"""

import logging
import math
from typing import Optional

import numpy as np
from sympy import integer_nthroot, primefactors
from sympy.polys.domains import QQ

from polydyn.core.poly import Poly
from polydyn.core.rings import QQ_RING
from polydyn.core.series import series_pow
from polydyn.errors import DegreeError, NormalizationError
from polydyn.models import RittMove, StratumRow, SymmetryData

logger = logging.getLogger("polydyn")

MAX_DECOMPOSE_DEGREE = 64


def centered(P: Poly) -> Poly:
    """Conjugate P by a translation so that the z^(d-1) coefficient vanishes."""
    d = int(P.degree)
    ring = P.ring
    shift = -ring.div(P.coefficient(d - 1), P.leading * d)
    if ring.is_zero(shift):
        return P
    return P.compose(Poly(ring, (ring.one, shift))) - shift


def _require_monic_centered(P: Poly) -> None:
    if P.degree < 1:
        raise DegreeError(f"Degree must be at least 1, got {P.degree}")
    if not P.is_monic() or not P.is_centered():
        raise NormalizationError(f"{P} is not monic and centered")


def _sigma0_order(mu: int, m: int) -> int:
    if mu == 0:
        return m
    order = 1
    for p in primefactors(mu):
        while m % (order * p) == 0:
            order *= p
    return order


def symmetry_group(P: Poly) -> SymmetryData:
    """
    Symmetry data of P.

    Returns:
        SymmetryData with Sigma = U_m, Sigma_0 the part of U_m killed by some
        power of rho, and Aut the rotations with P(zeta z) = zeta P(z)
    """
    d = P.degree
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")
    d = int(d)
    support = centered(P).support()
    aut = 0
    for e in support:
        aut = math.gcd(aut, e - 1)
    if support == [d]:
        return SymmetryData(
            degree=d, sigma_order=None, sigma0_order=None, aut_order=abs(aut), mu=d, m=None
        )
    mu = support[0]
    m = 0
    for e in support:
        m = math.gcd(m, e - mu)
    return SymmetryData(
        degree=d,
        sigma_order=m,
        sigma0_order=_sigma0_order(mu, m),
        aut_order=math.gcd(m, aut),
        mu=mu,
        m=m,
    )


def chebyshev(d: int) -> Poly:
    """T_d with T_d(z + 1/z) = z^d + z^-d."""
    if d < 1:
        raise DegreeError(f"Chebyshev degree must be at least 1, got {d}")
    z = Poly.identity(QQ_RING)
    previous, current = Poly.constant(QQ_RING, 2), z
    for _ in range(d - 1):
        previous, current = current, z * current - previous
    return current


def verify_chebyshev_identity(d: int) -> bool:
    """Expand T_d(z + 1/z) * z^d and compare with z^(2d) + 1."""
    T = chebyshev(d)
    z = Poly.identity(QQ_RING)
    lifted = Poly(QQ_RING, ())
    for i in range(d + 1):
        coefficient = T.coefficient(i)
        if coefficient:
            lifted = lifted + (z * z + 1) ** i * z ** (d - i) * coefficient
    return lifted == Poly.monomial(QQ_RING, 2 * d) + 1


def _normalized_tail(P: Poly, order: int) -> list:
    """[1, p_1, ..., p_order] for P = lead * z^d (1 + p_1/z + ...)."""
    d = int(P.degree)
    lead_inv = P.ring.inverse(P.leading)
    return [P.ring.one] + [P.coefficient(d - i) * lead_inv for i in range(1, order + 1)]


def _right_factor(P: Poly, r: int) -> Optional[tuple[Poly, Poly]]:
    """Monic centered (U, V) with P = U∘V and deg V = r, if any."""
    ring = P.ring
    d = int(P.degree)
    s = d // r
    root = series_pow(_normalized_tail(P, r), QQ(1, s), r, ring)
    V0 = Poly(ring, tuple(root[:r]) + (ring.zero,))
    digits = []
    remaining = P
    while remaining.degree >= r:
        remaining, digit = remaining.divmod(V0)
        if digit.degree > 0:
            return None
        digits.append(digit.coefficient(0))
    if remaining.degree > 0:
        return None
    digits.append(remaining.coefficient(0))
    U0 = Poly.from_low(ring, digits)
    shift = U0.coefficient(s - 1) * QQ(1, s)
    V = V0 + shift
    U = U0.compose(Poly(ring, (ring.one, -shift)))
    return U, V


def decompose(P: Poly) -> list[Poly]:
    """
    A complete decomposition into monic centered indecomposables.

    Inner degrees are tried in increasing order, so the innermost factor is
    the one of least degree; the list is outermost first.
    """
    _require_monic_centered(P)
    d = int(P.degree)
    if d > MAX_DECOMPOSE_DEGREE:
        raise DegreeError(f"Decomposition is limited to degree {MAX_DECOMPOSE_DEGREE}, got {d}")
    for r in range(2, d):
        if d % r:
            continue
        factors = _right_factor(P, r)
        if factors is not None:
            U, V = factors
            logger.debug(f"{P} = ({U})∘({V})")
            return decompose(U) + [V]
    return [P]


def compose_all(factors: list[Poly]) -> Poly:
    """Compose a list given outermost first."""
    result = factors[-1]
    for factor in reversed(factors[:-1]):
        result = factor.compose(result)
    return result


def compositional_root(P: Poly, n: int) -> Optional[tuple[Poly, int]]:
    """
    Solve P = sigma * Q^{∘n} with Q centered of leading coefficient +-1.

    Candidates are tried with sigma = 1 before -1 (only when -1 is a
    symmetry of P) and leading sign +1 before -1.

    Returns:
        (Q, sigma) for the first exact solution, or None
    """
    _require_monic_centered(P)
    if n < 2:
        raise ValueError(f"Root index must be at least 2, got {n}")
    d = int(P.degree)
    l, exact = integer_nthroot(d, n)
    if not exact or l < 2:
        raise DegreeError(f"Degree {d} is not a perfect {n}-th power")
    ring = P.ring
    data = symmetry_group(P)
    sigmas = [1]
    if data.is_monomial or data.m % 2 == 0:
        sigmas.append(-1)
    e = sum(l**i for i in range(n))
    L = l ** (n - 1)
    root = series_pow(_normalized_tail(P, l), QQ(1, L), l, ring)
    target = P.coefficient(d - l)

    for sigma in sigmas:
        for beta in (1, -1):
            if sigma * beta**e != 1:
                continue
            upper = Poly(ring, tuple(c * beta for c in root[:l]) + (ring.zero,))

            def top(gamma):
                Q = upper + gamma
                return Q, (Q.iterate(n) * sigma).coefficient(d - l)

            _, c0 = top(ring.zero)
            _, c1 = top(ring.one)
            slope = c1 - c0
            if ring.is_zero(slope):
                continue
            Q, _ = top(ring.div(target - c0, slope))
            if Q.iterate(n) * sigma == P:
                logger.debug(f"Compositional root of {P}: sigma={sigma}, Q={Q}")
                return Q, sigma
    return None


def is_primitive(P: Poly) -> bool:
    """True when P has no compositional root of any order n >= 2."""
    _require_monic_centered(P)
    d = int(P.degree)
    n = 2
    while 2**n <= d:
        _, exact = integer_nthroot(d, n)
        if exact and compositional_root(P, n) is not None:
            return False
        n += 1
    return True


def _power_center(F: Poly):
    """c with F = a (z - c)^k + b, or None."""
    k = int(F.degree)
    if k < 1:
        return None
    ring = F.ring
    c = -ring.div(F.coefficient(k - 1), F.leading * k)
    G = F.compose(Poly(ring, (ring.one, c)))
    if all(ring.is_zero(G.coefficient(i)) for i in range(1, k)):
        return c
    return None


def _power_exchange_witness(outer: Poly, inner: Poly, right: Poly) -> Optional[tuple[int, int]]:
    """
    (s, n) when outer∘inner = P̄∘right is an exchange z^n∘z^s R(z^n) = z^s R(z)^n∘z^n.

    outer and right must be power-like of degree n. Recentred at their centers,
    the inner factor must be z^s R(z^n): every exponent with a nonzero
    coefficient lies in the class of s modulo n.
    """
    n = int(outer.degree)
    if right.degree != n:
        return None
    c_outer = _power_center(outer)
    c_right = _power_center(right)
    if c_outer is None or c_right is None:
        return None
    ring = inner.ring
    shifted = inner.compose(Poly(ring, (ring.one, c_right))) - c_outer
    exponents = [i for i in range(int(shifted.degree) + 1) if not ring.is_zero(shifted.coefficient(i))]
    if len({i % n for i in exponents}) != 1:
        return None
    return exponents[0], n


def _is_chebyshev_like(F: Poly) -> bool:
    """F = A∘(+-T_k)∘B for affine A, B."""
    k = int(F.degree)
    if k < 1:
        return False
    if k <= 2:
        return True
    ring = F.ring
    R = centered(F)
    r_k = R.leading
    r_k2 = R.coefficient(k - 2)
    if ring.is_zero(r_k2):
        return False
    # S stands for lambda^2 in R = a T_k(lambda z) + b
    S = -ring.div(r_k * k, r_k2)
    S_inv = ring.inverse(S)
    T = chebyshev(k)
    scale = ring.one
    for j in range((k + 1) // 2):
        if R.coefficient(k - 2 * j) != r_k * ring.convert(T.coefficient(k - 2 * j)) * scale:
            return False
        if k - 2 * j - 1 >= 1 and not ring.is_zero(R.coefficient(k - 2 * j - 1)):
            return False
        scale = scale * S_inv
    return True


def verify_ritt_move(lhs: tuple[Poly, Poly], rhs: tuple[Poly, Poly]) -> RittMove:
    """
    Identify the Ritt move taking P∘Q to P̄∘Q̄.

    Args:
        lhs: (P, Q)
        rhs: (P̄, Q̄)

    Returns:
        M1 (affine transfer), M3 (Chebyshev exchange), M2 (power exchange) or NotAMove
    """
    P, Q = lhs
    P_bar, Q_bar = rhs
    if P.compose(Q) != P_bar.compose(Q_bar):
        return RittMove.NOT_A_MOVE
    ring = Q.ring
    if Q.degree == Q_bar.degree:
        ratio = ring.div(Q_bar.leading, Q.leading)
        if (Q_bar - Q * ratio).degree <= 0:
            return RittMove.M1
        return RittMove.NOT_A_MOVE
    if P.degree != Q_bar.degree or Q.degree != P_bar.degree:
        return RittMove.NOT_A_MOVE
    if all(_is_chebyshev_like(F) for F in (P, Q, P_bar, Q_bar)):
        return RittMove.M3
    witness = _power_exchange_witness(P, Q, Q_bar) or _power_exchange_witness(P_bar, Q_bar, Q)
    if witness is not None:
        s, n = witness
        logger.debug(f"Power exchange with s={s}, n={n}")
        return RittMove.M2
    return RittMove.NOT_A_MOVE


def _random_coefficient(rng: np.random.Generator) -> int:
    value = int(rng.integers(1, 10))
    return value if rng.random() < 0.5 else -value


def stratum_representative(d: int, k: int, mu: int, rng: np.random.Generator) -> Poly:
    """z^mu Q(z^k) with Q monic and every coefficient of Q nonzero."""
    r = (d - mu) // k
    low = [0] * (d + 1)
    for j in range(r):
        low[mu + j * k] = _random_coefficient(rng)
    low[d] = 1
    return Poly.from_low(QQ_RING, low)


def _generic_representative(d: int, rng: np.random.Generator) -> Poly:
    low = [_random_coefficient(rng) for _ in range(d - 1)] + [0, 1]
    return Poly.from_low(QQ_RING, low)


def strata(d: int) -> list[tuple[int, int]]:
    """(k, mu) with k >= 2, 0 <= mu <= d - 2 and k | d - mu."""
    return [
        (k, mu)
        for k in range(2, d + 1)
        for mu in range(d - 1)
        if (d - mu) % k == 0
    ]


def stratify(d: int, seed: int = 0) -> list[StratumRow]:
    """
    Rows of the stratification table for monic centered polynomials of degree d.

    Args:
        d: Degree, 2 to 6
        seed: Seed for the random representatives

    Returns:
        The "No symmetry" row (d >= 3), one row per stratum Sigma(d, k, mu)
        ordered by k then mu, and the monomial row
    """
    if not 2 <= d <= 6:
        raise DegreeError(f"Stratification tables cover degrees 2 to 6, got {d}")
    rng = np.random.default_rng(seed)
    entries: list[tuple[str, Poly]] = []
    if d >= 3:
        entries.append(("No symmetry", _generic_representative(d, rng)))
    for k, mu in strata(d):
        entries.append((f"Sigma({d},{k},{mu})", stratum_representative(d, k, mu, rng)))
    entries.append((f"z^{d}", Poly.monomial(QQ_RING, d)))

    rows = []
    for label, representative in entries:
        rows.append(
            StratumRow(
                label=label,
                representative=representative,
                symmetry=symmetry_group(representative),
                complexity=len(decompose(representative)),
                primitive=is_primitive(representative) if d == 4 else None,
            )
        )
    T = symmetry_group(chebyshev(d))
    logger.debug(
        f"Chebyshev T_{d}: |Aut| = {T.aut_order}, |Sigma| = {T.sigma_label()}, "
        f"|Sigma_0| = {T.sigma0_label()}"
    )
    return rows


def symmetry_summary(data: SymmetryData) -> dict:
    """Plain mapping used for text and JSON output."""
    return {
        "degree": data.degree,
        "sigma": data.sigma_label(),
        "sigma0": data.sigma0_label(),
        "aut": data.aut_order,
        "mu": data.mu,
        "m": data.m if data.m is not None else "inf",
    }

