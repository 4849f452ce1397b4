"""Multiplication by d on R/Z, critical portraits and Theta-equivalence."""

import logging
import math
from typing import Iterable, Sequence

from sympy import factorint, n_order
from sympy.polys.domains import QQ

from polydyn.errors import AngleConstructionError, DegreeError, PortraitError
from polydyn.models import Angle, EquivalenceKind, Portrait, ThetaEquivalence

logger = logging.getLogger("polydyn")


def md_orbit(a: Angle, d: int) -> tuple[int, int]:
    """
    (preperiod, period) of an angle under multiplication by d.

    The denominator splits into a part built from primes of d and a part
    coprime to d; the period is the order of d modulo the coprime part.
    """
    if d < 2:
        raise DegreeError(f"Degree must be at least 2, got {d}")
    q = int(a.value.denominator)
    coprime = q
    g = math.gcd(coprime, d)
    while g > 1:
        coprime //= g
        g = math.gcd(coprime, d)
    d_part = q // coprime
    d_factors = factorint(d)
    preperiod = 0
    for p, v in factorint(d_part).items():
        preperiod = max(preperiod, -(-v // d_factors[p]))
    period = 1 if coprime == 1 else int(n_order(d, coprime))
    return preperiod, period


def md_orbit_by_simulation(a: Angle, d: int) -> tuple[int, int]:
    """(preperiod, period) found by iterating until an angle repeats."""
    seen: dict[Angle, int] = {}
    n = 0
    while a not in seen:
        seen[a] = n
        a = a.times(d)
        n += 1
    return seen[a], n - seen[a]


def circle_distance(x: Angle, y: Angle):
    """Distance in R/Z, a rational in [0, 1/2]."""
    delta = Angle(x.value - y.value).value
    return min(delta, 1 - delta)


def unlinked(F: Iterable[Angle], F_prime: Iterable[Angle]) -> bool:
    """True when F lies in a single component of the circle minus F'."""
    F, F_prime = set(F), set(F_prime)
    if F & F_prime:
        raise ValueError("Angle sets must be disjoint")
    if not F or not F_prime:
        return True
    labels = [label for _, label in sorted([(a, 0) for a in F] + [(a, 1) for a in F_prime])]
    changes = sum(1 for i in range(len(labels)) if labels[i] != labels[i - 1])
    return changes <= 2


def _strictly_linked(x: Angle, y: Angle, theta: Iterable[Angle]) -> bool:
    """Theta meets both open arcs cut out by x and y."""
    low, high = sorted((x, y))
    inside = outside = False
    for a in theta:
        if a in (low, high):
            continue
        if low < a < high:
            inside = True
        else:
            outside = True
    return inside and outside


def periodic_angle(d: int, n: int) -> Angle:
    """
    Angle of exact period n whose repeating d-ary block is eps_1..eps_n.

    eps_1 = 0 and, for k >= 2, eps_k = 2 when k - 1 divides n, else 0; so
    p = sum(eps_k d^(n-k)) / (d^n - 1). Every proper iterate M^m(p) with
    m | n stays at distance at least 1/d from p.
    """
    if d < 3:
        raise DegreeError(f"The digit 2 needs degree at least 3, got {d}")
    if n < 2:
        raise ValueError(f"Period must be at least 2, got {n}")
    digits = [0] + [2 if n % (k - 1) == 0 else 0 for k in range(2, n + 1)]
    numerator = sum(eps * d ** (n - k) for k, eps in enumerate(digits, start=1))
    p = Angle(QQ(numerator, d**n - 1))
    if md_orbit(p, d) != (0, n):
        raise AngleConstructionError(f"{p} does not have exact period {n} under x{d}")
    bound = QQ(1, d)
    for m in range(1, n):
        if n % m == 0:
            image = Angle(p.value * d**m)
            if circle_distance(image, p) < bound:
                raise AngleConstructionError(f"M^{m}({p}) is closer than 1/{d} to {p}")
    return p


def validate_portrait(portrait: Portrait) -> list[str]:
    """Names of violated portrait conditions (CP1, CP2, CP3)."""
    violations = []
    d = portrait.degree
    if any(
        len(theta) < 2 or len({a.times(d) for a in theta}) != 1 for theta in portrait.sets
    ):
        violations.append("CP1")
    if sum(len(theta) - 1 for theta in portrait.sets) != d - 1:
        violations.append("CP2")
    sets = [set(theta) for theta in portrait.sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j] or not unlinked(sets[i], sets[j]):
                violations.append("CP3")
                break
        if "CP3" in violations:
            break
    return violations


def _landing_candidates(d: int, n: int, low, high) -> list[Angle]:
    """Angles in (low, high) of exact preperiod n landing on the cycle of periodic_angle(d, n)."""
    p = periodic_angle(d, n)
    cycle = []
    point = p
    for _ in range(n):
        cycle.append(point)
        point = point.times(d)
    scale = d**n
    found = []
    for o in cycle:
        start = math.floor((low * scale - o.value))
        stop = math.ceil((high * scale - o.value))
        for r in range(int(start), int(stop) + 1):
            value = (o.value + r) / scale
            if not low < value < high:
                continue
            angle = Angle(value)
            if md_orbit(angle, d)[0] == n:
                found.append((value.denominator, value, angle))
    return [angle for _, _, angle in sorted(found)]


def build_portrait(d: int, periods: Sequence[int], branch_degrees: Sequence[int]) -> Portrait:
    """
    Critical portrait whose j-th set lands on the cycle of periodic_angle(d, n_j).

    Args:
        d: Degree, at least 3
        periods: Distinct cycle periods n_1 < ... < n_N, each at least 2
        branch_degrees: Sizes d_1..d_N with sum(d_j - 1) = d - 1

    Returns:
        Portrait with Theta_j = {theta_j + i/d : 0 <= i < d_j}, theta_j the
        admissible angle of least denominator, then least value
    """
    if d < 3:
        raise DegreeError(f"Portrait construction needs degree at least 3, got {d}")
    periods = list(periods)
    branch_degrees = list(branch_degrees)
    if len(periods) != len(branch_degrees) or not periods:
        raise PortraitError("Shape", "one period is needed per branch degree")
    if any(b < 2 for b in branch_degrees):
        raise PortraitError("CP1", "every set needs at least two angles")
    if sum(b - 1 for b in branch_degrees) != d - 1:
        raise PortraitError("CP2", f"sum(d_j - 1) = {sum(b - 1 for b in branch_degrees)} != {d - 1}")
    if any(n < 2 for n in periods) or sorted(set(periods)) != periods:
        raise PortraitError("Periods", "periods must be distinct, increasing and at least 2")
    spacing = sum(QQ(2, d**n) for n in periods[1:]) + QQ(d - 1, d)
    if spacing > 1:
        raise PortraitError("Spacing", f"sum 2/d^n_j + sum (d_j - 1)/d = {spacing} > 1")

    sets = []
    low = QQ.zero
    for j, (n, b) in enumerate(zip(periods, branch_degrees)):
        if j:
            low = low + QQ(branch_degrees[j - 1] - 1, d)
        high = low + QQ(2, d**n)
        candidates = _landing_candidates(d, n, low, high)
        if not candidates:
            raise AngleConstructionError(f"No angle of preperiod {n} in ({low}, {high})")
        theta = candidates[0]
        logger.debug(f"theta_{j + 1} = {theta} in ({low}, {high})")
        sets.append(tuple(Angle(theta.value + QQ(i, d)) for i in range(b)))
        low = theta.value

    first = sets[0][0].value
    last = sets[-1][0].value + QQ(branch_degrees[-1] - 1, d)
    if not last < first + 1:
        raise PortraitError("Closing", f"{last} >= {first} + 1")
    portrait = Portrait(degree=d, sets=tuple(sets))
    violations = validate_portrait(portrait)
    if violations:
        raise AngleConstructionError(f"Constructed portrait violates {', '.join(violations)}")
    return portrait


def theta_equivalent(x: Angle, y: Angle, portrait: Portrait, depth: int) -> ThetaEquivalence:
    """
    Decide whether x and y stay Theta-unlinkable along their forward orbits.

    The joint orbit repeats after max(preperiods) + lcm(periods) steps, so
    looking that far settles the question.
    """
    if x == y:
        return ThetaEquivalence(EquivalenceKind.EQUIVALENT)
    d = portrait.degree
    pre_x, per_x = md_orbit(x, d)
    pre_y, per_y = md_orbit(y, d)
    horizon = max(pre_x, pre_y) + math.lcm(per_x, per_y)
    for n in range(min(depth, horizon) + 1):
        if x == y:
            return ThetaEquivalence(EquivalenceKind.EQUIVALENT)
        if any(_strictly_linked(x, y, theta) for theta in portrait.sets):
            return ThetaEquivalence(EquivalenceKind.SEPARATED, step=n)
        x, y = x.times(d), y.times(d)
    if depth >= horizon:
        return ThetaEquivalence(EquivalenceKind.EQUIVALENT)
    return ThetaEquivalence(EquivalenceKind.UNDECIDED)


def format_portrait(portrait: Portrait) -> str:
    return "; ".join("{" + ", ".join(str(a) for a in theta) + "}" for theta in portrait.sets)
