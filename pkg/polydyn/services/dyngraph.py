"""Critically marked dynamical graphs of rational polynomials.

Points are kept in centered coordinates as pairs (q, s) standing for
zeta^s * q with q rational and zeta a primitive k-th root of unity, where
U_k is the symmetry group. Escaping orbits end in a chain of ray vertices
truncated at the requested depth.
"""

import logging
import math
from typing import Any, Optional

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from polydyn.core.escape import EscapeCriterion
from polydyn.core.orbit import DEFAULT_MAX_BITS
from polydyn.core.poly import Poly
from polydyn.core.rings import RationalRing, coefficient_bits, format_rational
from polydyn.errors import (
    CriticalPointsError,
    DegreeError,
    GraphDepthMismatchError,
    GraphIncompleteError,
    RingMismatchError,
)
from polydyn.models import GraphVertex, MarkedGraph
from polydyn.services.symmetry import centered

logger = logging.getLogger("polydyn")

DEFAULT_DEPTH = 8

_W_RING, _W = ring("w", QQ)

# Violation names reported by validate_axioms
FLOW_UNDEFINED = "FlowUndefined"
COUNT_IDENTITY_VIOLATED = "CountIdentityViolated"
SYMMETRY_ORDER_TOO_LARGE = "SymmetryOrderTooLarge"
MARKED_MULTIPLICITY_MISMATCH = "MarkedMultiplicityMismatch"
PREIMAGE_DEGREE_EXCEEDED = "PreimageDegreeExceeded"
MINIMALITY_VIOLATED = "MinimalityViolated"
ACTION_INVALID = "ActionInvalid"
ACTION_DEGREE_MISMATCH = "ActionDegreeMismatch"
FLOW_ACTION_INCOMPATIBLE = "FlowActionIncompatible"
EXCEPTIONAL_VERTEX_VIOLATED = "ExceptionalVertexViolated"
HEIGHT_INCONSISTENT = "HeightInconsistent"


def rational_critical_points(Q: Poly) -> list:
    """Critical points of Q with multiplicity, increasing; all must be rational."""
    derivative = _W_RING.from_dict(
        {(i,): c for i, c in enumerate(Q.derivative().low_coefficients()) if c}
    )
    _, factors = derivative.factor_list()
    points = []
    for factor, multiplicity in factors:
        if factor.degree() != 1:
            raise CriticalPointsError(
                f"Critical points of {Q} are not all rational (factor {factor.as_expr()})"
            )
        root = -factor.get((0,), QQ.zero) / factor.get((1,), QQ.zero)
        points.extend([root] * multiplicity)
    return sorted(points)


class _GraphBuilder:
    """Grows vertex keys, flow and action for one polynomial."""

    def __init__(self, Q: Poly, k: int, mu: int, depth: int, max_bits: int):
        self.Q = Q
        self.k = k
        self.mu = mu
        self.depth = depth
        self.max_bits = max_bits
        self.criterion = EscapeCriterion(Q)
        self.flow: dict = {}
        self.kinds: dict = {}
        self.complete = True

    def canon(self, q, s: int) -> tuple:
        s %= self.k
        if not q:
            return ("p", QQ.zero, 0)
        if self.k % 2 == 0 and q < 0:
            return ("p", -q, (s + self.k // 2) % self.k)
        return ("p", q, s)

    def act(self, key: tuple) -> tuple:
        if key[0] == "p":
            return self.canon(key[1], key[2] + 1)
        _, anchor, j, r = key
        return ("r", anchor, j, (r + 1) % self.k)

    def image(self, key: tuple) -> tuple:
        return self.canon(self.Q(key[1]), self.mu * key[2])

    def add_rays(self, anchor, length: int) -> None:
        for s in range(self.k):
            point = self.canon(anchor, s)
            self.flow[point] = ("r", anchor, 1, (self.mu * point[2]) % self.k)
        for j in range(1, length + 1):
            for r in range(self.k):
                key = ("r", anchor, j, r)
                self.kinds[key] = "ray"
                self.flow[key] = ("r", anchor, j + 1, (self.mu * r) % self.k) if j < length else key

    def follow(self, c) -> None:
        current = self.canon(c, 0)
        level = 0
        while current not in self.kinds:
            for s in range(self.k):
                self.kinds[self.canon(current[1], s)] = "point"
            if self.criterion.escapes(current[1]):
                logger.debug(f"Orbit point {format_rational(current[1])} escapes at level {level}")
                self.add_rays(current[1], max(1, self.depth - level))
                return
            if level >= self.depth or coefficient_bits(current[1]) > self.max_bits:
                logger.warning(f"Orbit of {format_rational(c)} unresolved at level {level}")
                self.complete = False
                self.add_rays(current[1], 1)
                return
            for s in range(self.k):
                point = self.canon(current[1], s)
                self.flow[point] = self.image(point)
            current = self.flow[current]
            level += 1


def _value_text(q, s: int, k: int) -> str:
    if s == 0 or not q:
        return format_rational(q)
    if k == 2:
        return format_rational(-q)
    return f"{format_rational(q)}*zeta^{s}"


def build_graph(
    P: Poly, depth: int = DEFAULT_DEPTH, max_bits: int = DEFAULT_MAX_BITS
) -> MarkedGraph:
    """
    Build the critically marked dynamical graph of P.

    Args:
        P: Rational polynomial of degree >= 2 with rational critical points
        depth: Orbit level at which ray chains and unresolved orbits are cut
        max_bits: Size cap on orbit points

    Returns:
        MarkedGraph with vertex ids "i.n.s", the least triple with
        vertex = g^s pi^n mu(i)
    """
    if not isinstance(P.ring, RationalRing):
        raise RingMismatchError("Graphs are built for rational polynomials")
    if P.degree < 2:
        raise DegreeError(f"Degree must be at least 2, got {P.degree}")
    if depth < 1:
        raise ValueError(f"Depth must be at least 1, got {depth}")
    d = int(P.degree)
    Q = centered(P)
    support = Q.support()
    if support == [d]:
        raise CriticalPointsError("Monomials have a single critical point of multiplicity d-1")
    mu = support[0]
    k = 0
    for e in support:
        k = math.gcd(k, e - mu)
    rho = mu % k
    critical = rational_critical_points(Q)

    builder = _GraphBuilder(Q, k, mu, depth, max_bits)
    for c in critical:
        builder.follow(c)

    marks = [builder.canon(c, 0) for c in critical]
    labels: dict = {}
    for i, start in enumerate(marks):
        visited = set()
        key, n = start, 0
        while key not in visited:
            visited.add(key)
            rotated = key
            for s in range(k):
                labels.setdefault(rotated, f"{i}.{n}.{s}")
                rotated = builder.act(rotated)
            key = builder.flow[key]
            n += 1

    vertices = {}
    for key, kind in builder.kinds.items():
        vid = labels[key]
        if kind == "ray":
            vertices[vid] = GraphVertex(id=vid, kind="ray", dpi=1, depth=key[2])
        else:
            vertices[vid] = GraphVertex(
                id=vid,
                kind="point",
                dpi=Q.local_degree(key[1]),
                value=_value_text(key[1], key[2], k),
            )
    flow = {labels[key]: labels[target] for key, target in builder.flow.items()}
    action = {labels[key]: labels[builder.act(key)] for key in builder.kinds}
    graph = MarkedGraph(
        degree=d,
        k=k,
        rho=rho,
        vertices=vertices,
        flow=flow,
        marking={i: labels[key] for i, key in enumerate(marks)},
        action=action,
        depth=depth,
        complete=builder.complete,
    )
    graph.heights = compute_heights(graph)
    logger.debug(f"Graph of {P}: {len(vertices)} vertices, k={k}, rho={rho}")
    return graph


def compute_heights(G: MarkedGraph) -> dict[str, int]:
    """Heights on components holding a ray: rays sit at their depth, H(pi(v)) = H(v) + 1."""
    heights: dict[str, int] = {}
    for vid in G.vertices:
        path = []
        current = vid
        while current not in heights and not G.vertices[current].is_ray:
            if current in path:
                break
            path.append(current)
            current = G.flow.get(current)
            if current not in G.vertices:
                break
        else:
            base = heights.get(current)
            if base is None:
                base = G.vertices[current].depth
                heights[current] = base
            for steps, v in enumerate(reversed(path), start=1):
                heights[v] = base - steps
    return heights


def vertex_sort_key(vid: str) -> tuple:
    return tuple(int(part) for part in vid.split("."))


def _power(action: dict, vid: str, n: int) -> str:
    for _ in range(n):
        vid = action[vid]
    return vid


def _flow_action_holds(G: MarkedGraph, exponent: int) -> bool:
    for vid in G.vertices:
        image = G.action[vid]
        if G.terminal(vid) or G.terminal(image):
            continue
        if G.flow[image] != _power(G.action, G.flow[vid], exponent):
            return False
    return True


def _exceptional_ok(G: MarkedGraph) -> bool:
    fixed = [vid for vid in G.vertices if G.action[vid] == vid]
    if len(fixed) > 1:
        return False
    marked = set(G.marking.values())
    if not any(vid in marked for vid in fixed) and _flow_action_holds(G, 1):
        return True
    for star in fixed:
        if star not in marked:
            continue
        dpi = G.vertices[star].dpi
        if G.flow[star] == star and _flow_action_holds(G, dpi):
            return True
        if G.flow[star] != star and G.k == dpi and G.complete and _flow_action_holds(G, 0):
            return True
    return False


def validate_axioms(G: MarkedGraph) -> list[str]:
    """Names of violated graph axioms; empty for a valid critically marked graph."""
    violations: list[str] = []
    ids = set(G.vertices)
    if any(G.flow.get(vid) not in ids for vid in ids):
        return [FLOW_UNDEFINED]

    if sum(v.dpi - 1 for v in G.vertices.values()) != G.degree - 1:
        violations.append(COUNT_IDENTITY_VIOLATED)
    if G.k > G.degree or G.k < 1:
        violations.append(SYMMETRY_ORDER_TOO_LARGE)

    marks_at: dict[str, int] = {}
    for vid in G.marking.values():
        marks_at[vid] = marks_at.get(vid, 0) + 1
    if len(G.marking) != G.degree - 1 or any(
        v.dpi - 1 != marks_at.get(vid, 0) for vid, v in G.vertices.items()
    ) or any(vid not in ids for vid in marks_at):
        violations.append(MARKED_MULTIPLICITY_MISMATCH)

    incoming: dict[str, int] = {}
    for vid in ids:
        target = G.flow[vid]
        if vid == target and G.vertices[vid].is_ray:
            continue
        incoming[target] = incoming.get(target, 0) + G.vertices[vid].dpi
    if any(total > G.degree for total in incoming.values()):
        violations.append(PREIMAGE_DEGREE_EXCEEDED)

    action_ok = set(G.action) == ids and sorted(G.action.values()) == sorted(ids) and all(
        _power(G.action, vid, G.k) == vid for vid in ids
    )
    if not action_ok:
        violations.append(ACTION_INVALID)
        return violations

    reached = set(G.marking.values())
    frontier = list(reached)
    while frontier:
        vid = frontier.pop()
        for neighbor in (G.flow[vid], G.action[vid]):
            if neighbor not in reached:
                reached.add(neighbor)
                frontier.append(neighbor)
    if reached != ids:
        violations.append(MINIMALITY_VIOLATED)

    if any(G.vertices[G.action[vid]].dpi != v.dpi for vid, v in G.vertices.items()):
        violations.append(ACTION_DEGREE_MISMATCH)
    if not _flow_action_holds(G, G.rho):
        violations.append(FLOW_ACTION_INCOMPATIBLE)
    if G.k >= 2 and not _exceptional_ok(G):
        violations.append(EXCEPTIONAL_VERTEX_VIOLATED)

    heights = compute_heights(G)
    for vid, h in heights.items():
        if G.terminal(vid):
            continue
        if heights.get(G.flow[vid]) != h + 1:
            violations.append(HEIGHT_INCONSISTENT)
            break
    return violations


def _components(G: MarkedGraph) -> dict[str, str]:
    parent = {vid: vid for vid in G.vertices}

    def find(vid: str) -> str:
        while parent[vid] != vid:
            parent[vid] = parent[parent[vid]]
            vid = parent[vid]
        return vid

    def union(a: str, b: str) -> None:
        parent[find(a)] = find(b)

    for vid, target in G.flow.items():
        union(vid, target)
    roots = {vid: find(vid) for vid in G.vertices}
    return roots


def is_special(G: MarkedGraph) -> bool:
    """Exactly one infinite component up to the symmetry action."""
    if not G.complete:
        raise GraphIncompleteError("Graph has unresolved orbits; special-ness is undecided")
    roots = _components(G)
    ray_roots = {roots[vid] for vid, v in G.vertices.items() if v.is_ray}
    classes = {root: root for root in ray_roots}

    def find(root: str) -> str:
        while classes[root] != root:
            root = classes[root]
        return root

    for vid in G.vertices:
        a, b = roots[vid], roots[G.action[vid]]
        if a in classes and b in classes and find(a) != find(b):
            classes[find(a)] = find(b)
    return len({find(root) for root in ray_roots}) == 1


def _marked_orbit(G: MarkedGraph, i: int) -> list[str]:
    orbit = [G.marking[i]]
    for _ in range(G.depth):
        orbit.append(G.flow[orbit[-1]])
    return orbit


def graphs_equal(G1: MarkedGraph, G2: MarkedGraph) -> bool:
    """
    Compare the critical relations of two graphs truncated at the same depth.

    Returns:
        True when k and rho agree and pi^n mu(i) = g^s pi^m mu(j) holds for
        the same (i, j, s, n, m) in both graphs
    """
    if G1.depth != G2.depth:
        raise GraphDepthMismatchError(f"Depths {G1.depth} and {G2.depth} differ")
    if G1.degree != G2.degree or G1.k != G2.k or G1.rho != G2.rho:
        return False

    def relations(G: MarkedGraph) -> set:
        orbits = {i: _marked_orbit(G, i) for i in G.marking}
        found = set()
        for i, left in orbits.items():
            for j, right in orbits.items():
                for s in range(G.k):
                    for n, v in enumerate(left):
                        for m, w in enumerate(right):
                            if v == _power(G.action, w, s):
                                found.add((i, j, s, n, m))
        return found

    return relations(G1) == relations(G2)


def orbit_shape(G: MarkedGraph, i: int) -> Optional[tuple[int, int]]:
    """(tail, cycle) of the orbit of mark i, or None when it reaches a ray."""
    seen: dict[str, int] = {}
    vid = G.marking[i]
    n = 0
    while vid not in seen:
        if G.vertices[vid].is_ray:
            return None
        seen[vid] = n
        vid = G.flow[vid]
        n += 1
    return seen[vid], n - seen[vid]


def graph_to_json(G: MarkedGraph) -> dict[str, Any]:
    """Canonical interchange form; vertices sorted by label."""
    vertices = []
    for vid in sorted(G.vertices, key=vertex_sort_key):
        v = G.vertices[vid]
        entry: dict[str, Any] = {"id": vid, "dpi": v.dpi, "kind": v.kind}
        if v.is_ray:
            entry["depth"] = v.depth
        else:
            entry["value"] = v.value
        vertices.append(entry)
    order = sorted(G.vertices, key=vertex_sort_key)
    return {
        "degree": G.degree,
        "k": G.k,
        "rho": G.rho,
        "vertices": vertices,
        "flow": {vid: G.flow[vid] for vid in order},
        "marking": {str(i): G.marking[i] for i in sorted(G.marking)},
        "action": {vid: G.action[vid] for vid in order},
        "depth": G.depth,
        "complete": G.complete,
    }


def graph_from_json(data: dict[str, Any]) -> MarkedGraph:
    """Inverse of ``graph_to_json``; heights are recomputed."""
    vertices = {}
    for entry in data["vertices"]:
        vertices[entry["id"]] = GraphVertex(
            id=entry["id"],
            kind=entry["kind"],
            dpi=int(entry["dpi"]),
            value=entry.get("value"),
            depth=entry.get("depth"),
        )
    graph = MarkedGraph(
        degree=int(data["degree"]),
        k=int(data["k"]),
        rho=int(data["rho"]),
        vertices=vertices,
        flow=dict(data["flow"]),
        marking={int(i): vid for i, vid in data["marking"].items()},
        action=dict(data["action"]),
        depth=int(data["depth"]),
        complete=bool(data["complete"]),
    )
    graph.heights = compute_heights(graph)
    return graph

