"""The unicritical family z^d + t.

PCF counts come from Moebius inversion over the family c z^d + 1; membership
in M(d, a) and the sampler for the set of lambda with M_lambda connected work
in z^d + t.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from sympy import factorint
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from polydyn.errors import DegreeError
from polydyn.models import (
    CountResult,
    Membership,
    MembershipKind,
    MSetReport,
    MSetVerdict,
    MSetWitness,
)
from polydyn.services.green import green_value

logger = logging.getLogger("polydyn")

DEFAULT_BUDGET = 2000
DEFAULT_GRID = 256

INVERSE = "inverse"
DIRECT = "direct"
CONVENTIONS = (INVERSE, DIRECT)

# |lambda| beyond this (or below its inverse for the direct convention)
# puts M_lambda inside D(0, 1/4)
SHORTCUT_RADIUS = 8.0

# Candidates of each witness kind confirmed one by one before moving on
_MAX_CONFIRMATIONS = 256
_ROW_BLOCK = 16


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError(f"Moebius function needs n >= 1, got {n}")
    factors = factorint(n)
    if any(e > 1 for e in factors.values()):
        return 0
    return -1 if len(factors) % 2 else 1


def _divisors(n: int) -> list[int]:
    return [m for m in range(1, n + 1) if n % m == 0]


def _check_degree(d: int) -> None:
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")


def pcf_count_periodic(d: int, n: int) -> CountResult:
    """Parameters c with 0 periodic of exact period n under c z^d + 1."""
    _check_degree(d)
    if n < 1:
        raise ValueError(f"Period must be at least 1, got {n}")
    count = sum(mobius(n // m) * (d ** (m - 1) - 1) // (d - 1) for m in _divisors(n))
    return CountResult(degree=d, n=n, count=count)


def pcf_count_preperiodic(d: int, k: int, n: int) -> CountResult:
    """Parameters with 0 of exact preperiod k - 1 landing on a cycle of exact period n."""
    _check_degree(d)
    if k < 2:
        raise ValueError(f"Preperiod index must be at least 2, got {k}")
    if n < 1:
        raise ValueError(f"Period must be at least 1, got {n}")
    count = sum(
        mobius(n // m) * (d ** (m + k - 2) - d ** (math.gcd(k - 1, m) - 1)) for m in _divisors(n)
    )
    return CountResult(degree=d, n=n, count=count, k=k)


def iterate_expansion_holds(d: int, n: int) -> bool:
    """Check P_t^n(z) = z^(d^n) + d^(n-1) t z^(d^n - d) + lower terms in z, exactly."""
    _check_degree(d)
    if n < 1:
        raise ValueError(f"Iteration count must be at least 1, got {n}")
    R, z, t = ring("z,t", QQ)
    value = z
    for _ in range(n):
        value = value**d + t
    top = d**n
    expected_second = d ** (n - 1) * t
    second = R.zero
    for (ez, et), coefficient in value.terms():
        if ez > top or (ez == top and (et or coefficient != 1)):
            return False
        if top - d < ez < top:
            return False
        if ez == top - d:
            second += coefficient * t**et
    return second == expected_second


def marked_value(a: Sequence, t: complex) -> complex:
    """a(t) for a polynomial given by low-first rational coefficients."""
    result = 0j
    for coefficient in reversed(list(a)):
        result = result * t + complex(float(QQ.convert(coefficient)))
    return result


def marked_grid(a: Sequence, ts: np.ndarray) -> np.ndarray:
    """``marked_value`` over an array of parameters."""
    ts = np.asarray(ts, dtype=complex)
    z = np.zeros_like(ts)
    for coefficient in reversed(list(a)):
        z = z * ts + complex(float(QQ.convert(coefficient)))
    return z


def _membership_from(d: int, z: complex, t: complex, budget: int) -> Membership:
    radius = max(2.0, abs(t))
    t_abs = abs(t)
    for n in range(budget + 1):
        r = abs(z)
        if not math.isfinite(r):
            return Membership(MembershipKind.UNDECIDED)
        if r >= radius and r**d - t_abs > r:
            return Membership(MembershipKind.OUT, escape_step=n)
        if n < budget:
            z = z**d + t
    return Membership(MembershipKind.IN)


def member_M(d: int, a: Sequence, t: complex, budget: int = DEFAULT_BUDGET) -> Membership:
    """
    Membership of t in M(d, a): does a(t) have a bounded orbit under z^d + t?

    Out(n) is certified at the first z_n with |z_n| >= max(2, |t|) and
    |z_n|^d - |t| > |z_n|; from there the moduli increase to infinity.
    """
    _check_degree(d)
    t = complex(t)
    return _membership_from(d, marked_value(a, t), t, budget)


def _escape_steps(d: int, z: np.ndarray, ts: np.ndarray, budget: int) -> np.ndarray:
    t_abs = np.abs(ts)
    radius = np.maximum(2.0, t_abs)
    steps = np.full(ts.shape, -1, dtype=np.int64)
    alive = np.ones(ts.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(budget + 1):
            r = np.abs(z)
            escaped = alive & (r >= radius) & (r**d - t_abs > r)
            steps[escaped] = n
            alive &= ~escaped
            if not alive.any() or n == budget:
                break
            z = np.where(alive, z**d + ts, z)
    return steps


def escape_time_grid(d: int, a: Sequence, ts: np.ndarray, budget: int) -> np.ndarray:
    """
    Vectorized ``member_M`` over an array of parameters.

    Returns:
        Integer array of escape steps, -1 where the orbit stayed bounded
    """
    _check_degree(d)
    ts = np.asarray(ts, dtype=complex)
    return _escape_steps(d, marked_grid(a, ts), ts, budget)


def grid_points(size: int, radius: float) -> np.ndarray:
    """Square grid of cell centers; entry [i, j] has real index i and imaginary index j."""
    offsets = -radius + (2 * np.arange(size) + 1) * radius / size
    return offsets[:, None] + 1j * offsets[None, :]


def expected_capacity(a: Sequence) -> float:
    """cap(M(d, a)) = |alpha|^(-1/kappa) for a(t) = alpha t^kappa + ...; 1 for constant a."""
    coefficients = [QQ.convert(c) for c in a]
    while coefficients and not coefficients[-1]:
        coefficients.pop()
    kappa = len(coefficients) - 1
    if kappa < 1:
        return 1.0
    return abs(float(coefficients[-1])) ** (-1.0 / kappa)


def _is_root_of_unity(lam: complex, d: int) -> bool:
    return abs(lam**d - 1) <= 1e-12


def mset_lambda_test(
    d: int,
    lam: complex,
    grid: int = DEFAULT_GRID,
    budget: int = DEFAULT_BUDGET,
    convention: str = INVERSE,
) -> MSetReport:
    """
    Sample whether M_lambda is contained in M(d, 0), i.e. whether M_lambda is connected.

    The marked point is lambda^-1 t (``inverse``) or lambda t (``direct``).
    The whole grid is scanned first for membership witnesses: sampled t with
    member_M(0) = Out and member_M(a) = In, a point of M_lambda outside
    M(d, 0). Only when none is confirmed does the sampler fall back to a
    Green witness, t outside M(d, 0) with g_t(a) < d g_t(0); containment
    forces g_t(a) >= d g_t(0) everywhere. Within each kind the candidate of
    smallest (real, imaginary) index wins.

    Args:
        d: Degree
        lam: Nonzero complex lambda
        grid: Samples per side of the square grid
        budget: Iteration budget for each membership test
        convention: ``inverse`` or ``direct``

    Returns:
        MSetReport; InM without a shortcut is flagged heuristic
    """
    _check_degree(d)
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    if convention not in CONVENTIONS:
        raise ValueError(f"Unknown convention {convention!r}, expected one of {CONVENTIONS}")
    if grid < 1 or budget < 1:
        raise ValueError("Grid size and budget must be positive")

    scale = 1 / lam if convention == INVERSE else lam
    report = MSetReport(
        lam=lam,
        degree=d,
        verdict=MSetVerdict.UNDECIDED,
        convention=convention,
        budget=budget,
        expected_capacity=1.0 / abs(scale),
    )

    if convention == INVERSE:
        inside_disk = abs(lam) >= SHORTCUT_RADIUS
    else:
        inside_disk = abs(lam) <= 1 / SHORTCUT_RADIUS
    if inside_disk:
        report.verdict = MSetVerdict.IN_M
        report.shortcut = "M_lambda inside D(0,1/4)"
        return report
    if _is_root_of_unity(lam, d):
        report.verdict = MSetVerdict.IN_M
        report.shortcut = "lambda^d = 1, M_lambda = M(d,0)"
        return report

    ts = grid_points(grid, 2.0 * max(1.0, abs(lam), 1.0 / abs(lam)))
    critical = np.empty(ts.shape, dtype=np.int64)
    marked = np.empty(ts.shape, dtype=np.int64)
    for start in range(0, grid, _ROW_BLOCK):
        block = ts[start : start + _ROW_BLOCK]
        rows = slice(start, start + block.shape[0])
        critical[rows] = _escape_steps(d, np.zeros_like(block), block, budget)
        marked[rows] = _escape_steps(d, scale * block, block, budget)
    report.samples = ts.size

    outside = critical >= 0
    membership_candidates = outside & (marked < 0)
    # a marked point escaping no faster than 0 is a likely Green witness
    green_candidates = outside & (marked >= critical)
    report.membership_candidates = int(membership_candidates.sum())

    confirmations = 0
    for kind, candidates in (("membership", membership_candidates), ("green", green_candidates)):
        tried = 0
        for i, j in zip(*np.nonzero(candidates)):
            if tried >= _MAX_CONFIRMATIONS:
                break
            tried += 1
            confirmations += 1
            index = (int(i), int(j))
            t = complex(ts[i, j])
            if kind == "membership":
                witness = _confirm_membership_witness(d, scale, t, index, budget)
            else:
                witness = _confirm_green_witness(d, scale, t, index, budget)
            if witness is not None:
                report.verdict = MSetVerdict.NOT_IN_M
                report.witness = witness
                logger.debug(f"Witness t={witness.t} ({witness.kind}) at grid index {index}")
                return report
        if kind == "membership" and report.membership_candidates:
            logger.debug(f"No membership witness confirmed for lambda={lam}; trying Green witnesses")

    if confirmations:
        logger.warning(f"No sampled witness confirmed for lambda={lam}; reporting InM heuristically")
    report.verdict = MSetVerdict.IN_M
    report.heuristic = True
    return report


def _confirm_membership_witness(
    d: int, scale: complex, t: complex, index: tuple[int, int], budget: int
) -> Optional[MSetWitness]:
    critical = _membership_from(d, 0j, t, budget)
    if critical.kind != MembershipKind.OUT:
        return None
    if _membership_from(d, scale * t, t, budget).kind != MembershipKind.IN:
        return None
    return MSetWitness(
        t=t,
        kind="membership",
        grid_index=index,
        details={"critical_escape_step": critical.escape_step},
    )


def _confirm_green_witness(
    d: int, scale: complex, t: complex, index: tuple[int, int], budget: int
) -> Optional[MSetWitness]:
    critical = _membership_from(d, 0j, t, budget)
    if critical.kind != MembershipKind.OUT:
        return None
    a = scale * t
    coefficients = [1.0] + [0.0] * (d - 1) + [t]
    g_marked = green_value(coefficients, a, budget)
    g_critical = green_value(coefficients, 0j, budget)
    if not g_critical.escaped:
        return None
    if g_marked.value + g_marked.error_bound < d * (g_critical.value - g_critical.error_bound):
        return MSetWitness(
            t=t,
            kind="green",
            grid_index=index,
            details={
                "critical_escape_step": critical.escape_step,
                "g_marked": g_marked.value,
                "g_critical": g_critical.value,
                "error_bound": max(g_marked.error_bound, g_critical.error_bound),
            },
        )
    return None
