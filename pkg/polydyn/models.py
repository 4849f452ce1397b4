"""Data models for polydyn results."""

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Optional

from sympy.polys.domains import QQ

if TYPE_CHECKING:
    from polydyn.core.poly import Poly


@dataclass(frozen=True)
class Monomial:
    """Tag returned by the reduced presentation of z^d."""

    degree: int


@dataclass(frozen=True)
class ReducedPresentation:
    """P(z) = z^mu * P0(z^m) with P0(0) != 0 and m maximal."""

    mu: int
    m: int
    p0: "Poly"


class OrbitKind(str, Enum):
    PREPERIODIC = "preperiodic"
    ESCAPING = "escaping"
    UNKNOWN = "unknown"


@dataclass
class OrbitRecord:
    """Outcome of following an exact rational orbit."""

    kind: OrbitKind
    orbit: list = field(default_factory=list)
    tail: Optional[int] = None
    cycle: Optional[int] = None
    cycle_values: list = field(default_factory=list)
    escape_step: Optional[int] = None
    reason: Optional[str] = None

    @property
    def is_preperiodic(self) -> bool:
        return self.kind == OrbitKind.PREPERIODIC


@dataclass(frozen=True)
class GreenValue:
    """Green function value with a rigorous-style error bound."""

    value: float
    error_bound: float
    escape_step: Optional[int]

    @property
    def escaped(self) -> bool:
        return self.escape_step is not None


@dataclass(frozen=True)
class EscapeBox:
    """Escape constants for P_{c,a}: escape beyond C*max(1,|c|,|a|), envelope slack theta."""

    C: float
    theta: float


class DivisorStatus(str, Enum):
    STABILIZED = "stabilized"
    PREPERIODIC = "preperiodic"
    UNKNOWN = "unknown"


@dataclass
class DivisorOrder:
    """Order q of the divisor at infinity of a dynamical pair."""

    status: DivisorStatus
    q: Optional[Any] = None
    stabilized_at: Optional[int] = None
    witness_degrees: list = field(default_factory=list)
    preperiodic: Optional[tuple[int, int]] = None

    @property
    def known(self) -> bool:
        return self.status != DivisorStatus.UNKNOWN


class PairKind(str, Enum):
    ACTIVE = "Active"
    PASSIVE_PREPERIODIC = "PassivePreperiodic"
    PASSIVE_ISOTRIVIAL = "PassiveIsotrivial"
    UNKNOWN = "Unknown"


@dataclass
class PairClassification:
    kind: PairKind
    q: Optional[Any] = None
    n: Optional[int] = None
    m: Optional[int] = None

    @property
    def is_active(self) -> bool:
        return self.kind == PairKind.ACTIVE


@dataclass(frozen=True)
class SymmetryData:
    """Symmetry groups of a polynomial; ``None`` orders mean infinite."""

    degree: int
    sigma_order: Optional[int]
    sigma0_order: Optional[int]
    aut_order: int
    mu: int
    m: Optional[int]

    @property
    def is_monomial(self) -> bool:
        return self.sigma_order is None

    @property
    def rho_exponent(self) -> int:
        return self.mu

    def sigma_label(self) -> str:
        return "inf" if self.sigma_order is None else str(self.sigma_order)

    def sigma0_label(self) -> str:
        return f"{self.degree}^inf" if self.sigma0_order is None else str(self.sigma0_order)


@dataclass(frozen=True)
class StratumRow:
    """One row of a stratification table."""

    label: str
    representative: "Poly"
    symmetry: SymmetryData
    complexity: Optional[int] = None
    primitive: Optional[bool] = None


class RittMove(str, Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    NOT_A_MOVE = "NotAMove"


@dataclass(frozen=True)
class GraphVertex:
    id: str
    kind: str
    dpi: int
    value: Optional[str] = None
    depth: Optional[int] = None

    @property
    def is_ray(self) -> bool:
        return self.kind == "ray"


@dataclass
class MarkedGraph:
    """Critically marked dynamical graph, truncated at ``depth``."""

    degree: int
    k: int
    rho: int
    vertices: dict[str, GraphVertex]
    flow: dict[str, str]
    marking: dict[int, str]
    action: dict[str, str]
    depth: int
    complete: bool = True
    heights: dict[str, int] = field(default_factory=dict)

    def terminal(self, vertex_id: str) -> bool:
        """Last vertex of a truncated ray chain."""
        return self.vertices[vertex_id].is_ray and self.flow.get(vertex_id) == vertex_id


@dataclass(frozen=True, order=True)
class Angle:
    """Point of R/Z with rational coordinate in [0, 1)."""

    value: Any

    def __post_init__(self):
        value = QQ.convert(self.value)
        value = value - (value.numerator // value.denominator)
        object.__setattr__(self, "value", value)

    @classmethod
    def of(cls, p: int, q: int = 1) -> "Angle":
        return cls(QQ(p, q))

    def times(self, d: int) -> "Angle":
        return Angle(self.value * d)

    def __str__(self) -> str:
        if self.value.denominator == 1:
            return str(self.value.numerator)
        return f"{self.value.numerator}/{self.value.denominator}"


@dataclass(frozen=True)
class Portrait:
    degree: int
    sets: tuple[tuple[Angle, ...], ...]

    def all_angles(self) -> list[Angle]:
        return sorted(a for theta in self.sets for a in theta)


class EquivalenceKind(str, Enum):
    EQUIVALENT = "Equivalent"
    SEPARATED = "Separated"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class ThetaEquivalence:
    kind: EquivalenceKind
    step: Optional[int] = None


@dataclass(frozen=True)
class CountResult:
    degree: int
    n: int
    count: int
    k: Optional[int] = None


class MembershipKind(str, Enum):
    IN = "In"
    OUT = "Out"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Membership:
    kind: MembershipKind
    escape_step: Optional[int] = None


class MSetVerdict(str, Enum):
    IN_M = "InM"
    NOT_IN_M = "NotInM"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class MSetWitness:
    """Parameter t showing M_lambda is not contained in M(d,0)."""

    t: complex
    kind: str
    grid_index: tuple[int, int]
    details: dict = field(default_factory=dict)


@dataclass
class MSetReport:
    lam: complex
    degree: int
    verdict: MSetVerdict
    convention: str
    samples: int = 0
    budget: int = 0
    witness: Optional[MSetWitness] = None
    heuristic: bool = False
    shortcut: Optional[str] = None
    expected_capacity: Optional[float] = None
    membership_candidates: int = 0


class EntangleVerdict(str, Enum):
    CERTIFICATE = "Certificate"
    REFUTED = "Refuted"
    UNDECIDED = "Undecided"


class EntangleStage(str, Enum):
    INACTIVE = "Inactive"
    DEGREES_INDEPENDENT = "DegreesIndependent"
    DIVISORS_NOT_PROPORTIONAL = "DivisorsNotProportional"
    LINEAR_SYSTEM_INCONSISTENT = "LinearSystemInconsistent"
    FINAL_IDENTITY_FAILS = "FinalIdentityFails"


@dataclass(frozen=True)
class Certificate:
    """Witness data for the three hat identities."""

    n: int
    m: int
    N: int
    M: int
    ell: int
    L: int
    zeta: int
    R: "Poly"


@dataclass
class EntangleOutcome:
    verdict: EntangleVerdict
    stage: Optional[EntangleStage] = None
    certificate: Optional[Certificate] = None
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == EntangleVerdict.CERTIFICATE


@dataclass(frozen=True)
class RenderSpec:
    """Raster request for M(d, a) with a(t) given by low-first rational coefficients."""

    degree: int
    marked: tuple
    center: complex
    width: float
    pixels_w: int
    pixels_h: int
    budget: int
    palette: str = "binary"

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError(f"Degree must be at least 2, got {self.degree}")
        if self.pixels_w < 1 or self.pixels_h < 1:
            raise ValueError("Resolution must be at least 1x1")
        if not self.width > 0:
            raise ValueError("Viewport width must be positive")
        if self.budget < 1:
            raise ValueError("Iteration budget must be positive")
        if self.palette not in ("binary", "grayscale-g"):
            raise ValueError(f"Unknown palette {self.palette!r}")
