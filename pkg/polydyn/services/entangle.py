"""Deciding entanglement of two active dynamical pairs over the affine line.

A certificate consists of exact identities in (t, z):

    P̂_n∘P^(NL) = R∘P̂_n,
    (zeta Q̂_m)∘Q^(ML) = R∘(zeta Q̂_m),
    P̂_n(P^(lN)(a)) = zeta Q̂_m(Q^(lM)(b)),

with zeta in {+1, -1} since the ground field is the rationals.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional

from sympy import factorint
from sympy.polys.domains import QQ

from polydyn.core.orbit import DEFAULT_MAX_BITS
from polydyn.core.poly import Poly
from polydyn.errors import PolydynError
from polydyn.models import (
    Certificate,
    EntangleOutcome,
    EntangleStage,
    EntangleVerdict,
    PairKind,
)
from polydyn.services.bottcher import bottcher_power
from polydyn.services.pairs import (
    DEFAULT_Q_MAX,
    DynPair,
    classify_pair,
    crit_order_bound,
    family_crit_order_of,
)

logger = logging.getLogger("polydyn")

DEFAULT_MAX_ELL = 16
ZETAS = (1, -1)


@dataclass(frozen=True)
class EntangleCaps:
    """Work limits for ``entangle_decide``."""

    q_max: int = DEFAULT_Q_MAX
    max_bits: int = DEFAULT_MAX_BITS
    max_ell: int = DEFAULT_MAX_ELL


def _refuted(stage: EntangleStage, detail: str) -> EntangleOutcome:
    logger.debug(f"Refuted at {stage.value}: {detail}")
    return EntangleOutcome(verdict=EntangleVerdict.REFUTED, stage=stage, detail=detail)


def _undecided(stage: EntangleStage, detail: str) -> EntangleOutcome:
    logger.warning(f"Undecided at {stage.value}: {detail}")
    return EntangleOutcome(verdict=EntangleVerdict.UNDECIDED, stage=stage, detail=detail)


def degree_relation(d: int, delta: int) -> Optional[tuple[int, int]]:
    """Minimal coprime (N, M) with d^N = delta^M, or None when no such pair exists."""
    fd, fdelta = factorint(d), factorint(delta)
    if set(fd) != set(fdelta):
        return None
    ratios = {QQ(fdelta[p], fd[p]) for p in fd}
    if len(ratios) != 1:
        return None
    ratio = ratios.pop()
    return int(ratio.numerator), int(ratio.denominator)


def _crit_order(family: Poly, caps: EntangleCaps) -> Any:
    order = family_crit_order_of(family, caps.q_max, caps.max_bits)
    if order is None:
        order = crit_order_bound(family)
        logger.debug(f"Using the bound {order} for the critical order")
    return order


def _common_ring(*polys: Poly) -> list[Poly]:
    target = polys[0].ring
    for P in polys[1:]:
        if not target.embeds(P.ring):
            target = P.ring
    return [P.change_ring(target) for P in polys]


def solve_conjugator(hat: Poly, target: Poly) -> Optional[Poly]:
    """
    Find R with target = R∘hat.

    Digits of target in base ``hat`` come from repeated division by hat,
    whose leading coefficient is invertible; R exists exactly when every
    digit is constant in z.
    """
    digits = []
    quotient = target
    while not quotient.is_zero:
        quotient, digit = quotient.divmod(hat)
        if digit.degree > 0:
            return None
        digits.append(digit.leading if not digit.is_zero else hat.ring.zero)
    return Poly.from_low(hat.ring, digits)


def entangle_decide(
    pair_a: DynPair, pair_b: DynPair, caps: Optional[EntangleCaps] = None
) -> EntangleOutcome:
    """
    Run the decision procedure for two pairs with rational data.

    Args:
        pair_a: (P, a) over QQ[t]
        pair_b: (Q, b) over QQ[t]
        caps: Work limits

    Returns:
        EntangleOutcome: a Certificate, or the stage at which it was refuted or stalled
    """
    caps = caps or EntangleCaps()
    kinds = []
    for name, pair in (("A", pair_a), ("B", pair_b)):
        classification = classify_pair(pair, caps.q_max, caps.max_bits)
        if classification.kind in (PairKind.PASSIVE_PREPERIODIC, PairKind.PASSIVE_ISOTRIVIAL):
            return _refuted(EntangleStage.INACTIVE, f"pair {name} is {classification.kind.value}")
        if classification.kind == PairKind.UNKNOWN:
            return _undecided(EntangleStage.INACTIVE, f"activity of pair {name} unknown")
        kinds.append(classification)
    q_a, q_b = kinds[0].q, kinds[1].q

    if q_a <= 0 or q_b <= 0:
        return _refuted(EntangleStage.DIVISORS_NOT_PROPORTIONAL, f"q_A={q_a}, q_B={q_b}")
    ratio = q_b / q_a
    n, m = int(ratio.numerator), int(ratio.denominator)

    d, delta = pair_a.degree, pair_b.degree
    relation = degree_relation(d, delta)
    if relation is None:
        return _refuted(EntangleStage.DEGREES_INDEPENDENT, f"{d} and {delta} are multiplicatively independent")
    N, M = relation
    Delta = d**N

    crit_a = _crit_order(pair_a.family, caps)
    crit_b = _crit_order(pair_b.family, caps)
    ell = next(
        (
            e
            for e in range(1, caps.max_ell + 1)
            if Delta**e * q_a > crit_a and Delta**e * q_b > crit_b
        ),
        None,
    )
    if ell is None:
        return _undecided(EntangleStage.LINEAR_SYSTEM_INCONSISTENT, f"no ell <= {caps.max_ell}")
    L = 1
    logger.debug(f"(n, m) = ({n}, {m}), (N, M) = ({N}, {M}), ell = {ell}")

    try:
        certificate, stage = _search(pair_a, pair_b, n, m, N, M, ell, L)
    except PolydynError as e:
        return _undecided(EntangleStage.LINEAR_SYSTEM_INCONSISTENT, str(e))
    if certificate is None:
        return _refuted(stage, f"no zeta in {ZETAS} satisfies the identities")
    return EntangleOutcome(verdict=EntangleVerdict.CERTIFICATE, certificate=certificate)


def _hats(pair_a: DynPair, pair_b: DynPair, n: int, m: int) -> tuple[Poly, Poly]:
    hat_p = bottcher_power(pair_a.family, n, 1).hat
    hat_q = bottcher_power(pair_b.family, m, 1).hat
    return hat_p, hat_q


def _search(pair_a, pair_b, n, m, N, M, ell, L):
    hat_p, hat_q = _hats(pair_a, pair_b, n, m)
    P, Q = pair_a.family, pair_b.family
    hat_p, hat_q, P, Q = _common_ring(hat_p, hat_q, P, Q)
    ring = hat_p.ring

    R = solve_conjugator(hat_p, hat_p.compose(P.iterate(N * L)))
    if R is None:
        return None, EntangleStage.LINEAR_SYSTEM_INCONSISTENT

    Q_iterate = Q.iterate(M * L)
    a_value = P.iterate(ell * N)(ring.convert(pair_a.marked))
    b_value = Q.iterate(ell * M)(ring.convert(pair_b.marked))
    lhs_final = hat_p(a_value)
    stage = EntangleStage.LINEAR_SYSTEM_INCONSISTENT
    for zeta in ZETAS:
        signed = hat_q * zeta
        if signed.compose(Q_iterate) != R.compose(signed):
            continue
        stage = EntangleStage.FINAL_IDENTITY_FAILS
        if lhs_final == signed(b_value):
            logger.info(f"Certificate found with zeta = {zeta:+d}")
            return Certificate(n=n, m=m, N=N, M=M, ell=ell, L=L, zeta=zeta, R=R), stage
    return None, stage


def verify_certificate(certificate: Certificate, pair_a: DynPair, pair_b: DynPair) -> bool:
    """Recompute the hats and check all three identities for the given data."""
    c = certificate
    if c.zeta not in ZETAS:
        return False
    try:
        hat_p, hat_q = _hats(pair_a, pair_b, c.n, c.m)
        hat_p, hat_q, P, Q, R = _common_ring(hat_p, hat_q, pair_a.family, pair_b.family, c.R)
    except PolydynError as e:
        logger.debug(f"Certificate rejected: {e}")
        return False
    ring = hat_p.ring
    signed = hat_q * c.zeta
    if hat_p.compose(P.iterate(c.N * c.L)) != R.compose(hat_p):
        return False
    if signed.compose(Q.iterate(c.M * c.L)) != R.compose(signed):
        return False
    a_value = P.iterate(c.ell * c.N)(ring.convert(pair_a.marked))
    b_value = Q.iterate(c.ell * c.M)(ring.convert(pair_b.marked))
    return hat_p(a_value) == signed(b_value)


def certificate_summary(certificate: Certificate) -> dict:
    R = certificate.R
    return {
        "n": certificate.n,
        "m": certificate.m,
        "N": certificate.N,
        "M": certificate.M,
        "ell": certificate.ell,
        "L": certificate.L,
        "zeta": certificate.zeta,
        "R": R.format(),
        "R_coefficients": [R.ring.format(c) for c in R.low_coefficients()],
    }


def outcome_summary(outcome: EntangleOutcome) -> dict:
    result: dict = {"verdict": outcome.verdict.value}
    if outcome.stage is not None:
        result["stage"] = outcome.stage.value
    if outcome.certificate is not None:
        result["certificate"] = certificate_summary(outcome.certificate)
    if outcome.detail:
        result["detail"] = outcome.detail
    return result
