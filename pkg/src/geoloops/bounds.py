"""Ball volumes, the pigeonhole loop bound, and volume-entropy estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import BadCurvatureOrder, GeometryMismatch, NonpositiveValue

SATISFIED_TOL = 1e-9
SANDWICH_TOL = 1e-9

LOOPS = "loops"
GEODESICS = "geodesics"


def euclidean_ball_volume(n: int, r: float) -> float:
    return math.pi ** (n / 2) * r**n / math.gamma(n / 2 + 1)


def hyperbolic_disk_area(r: float) -> float:
    # 2*pi*(cosh r - 1) == 4*pi*sinh(r/2)^2, which keeps precision at small r
    return 4 * math.pi * math.sinh(r / 2) ** 2


def blichfeldt_lower_bound(vol_ball: float, vol_M: float) -> float:
    if vol_M <= 0:
        raise ValueError("manifold volume must be positive")
    return vol_ball / vol_M - 2


@dataclass(frozen=True)
class Geometry:
    """Model space of the universal cover: ``euclidean`` (with dimension) or ``hyperbolic``."""

    kind: str
    dimension: int = 2

    def ball_volume(self, r: float) -> float:
        if self.kind == "euclidean":
            return euclidean_ball_volume(self.dimension, r)
        if self.kind == "hyperbolic":
            return hyperbolic_disk_area(r)
        raise ValueError(f"unknown geometry {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "euclidean":
            return f"euclidean-{self.dimension}"
        return "hyperbolic-2"


EUCLIDEAN_2 = Geometry("euclidean", 2)
HYPERBOLIC = Geometry("hyperbolic", 2)


@dataclass
class CountSeries:
    """Samples ``(t, count)`` of a counting function on one model.

    ``kind`` is ``"loops"`` for the based loop count or ``"geodesics"`` for
    primitive closed geodesics. ``geometry`` names the universal cover.
    """

    samples: list
    kind: str
    geometry: Geometry
    model: str = ""

    def __post_init__(self):
        self.samples = [(float(t), int(c)) for t, c in self.samples]
        for (t0, c0), (t1, c1) in zip(self.samples, self.samples[1:]):
            if not t1 > t0:
                raise ValueError("sample times must be strictly increasing")
            if c1 < c0:
                raise ValueError("counts must be nondecreasing")

    @property
    def ts(self):
        return [t for t, _ in self.samples]

    @property
    def counts(self):
        return [c for _, c in self.samples]


@dataclass(frozen=True)
class BoundRow:
    t: float
    count: int
    bound: float
    satisfied: bool


@dataclass
class BoundReport:
    rows: list
    geometry: Geometry
    vol_M: float

    @property
    def all_satisfied(self) -> bool:
        return all(row.satisfied for row in self.rows)

    def violations(self):
        return [row for row in self.rows if not row.satisfied]


def is_satisfied(count: float, bound: float) -> bool:
    return count >= bound - SATISFIED_TOL


def check_blichfeldt(series: CountSeries, vol_M: float, geometry: Geometry) -> BoundReport:
    """Compare each loop count with ``vol(B_{t/2}) / vol(M) - 2``.

    For models that are not homogeneous the caller should pass counts
    maximized over sampled base points; the inequality only asserts that some
    base point attains it.
    """
    if series.kind != LOOPS:
        raise GeometryMismatch(f"bound applies to loop counts, got {series.kind!r}")
    if series.geometry != geometry:
        raise GeometryMismatch(
            f"series is {series.geometry.describe()}, check requested {geometry.describe()}"
        )
    rows = []
    for t, count in series.samples:
        bound = blichfeldt_lower_bound(geometry.ball_volume(t / 2), vol_M)
        rows.append(BoundRow(t, count, bound, is_satisfied(count, bound)))
    return BoundReport(rows, geometry, vol_M)


@dataclass(frozen=True)
class EntropyRow:
    t: float
    estimate: float


@dataclass
class EntropyReport:
    rows: list
    limit_claim: Optional[float] = None
    K1: float = 0.0
    K2: float = 0.0
    dimension: int = 2
    notices: list = field(default_factory=list)


def entropy_estimate(values: Sequence) -> list:
    """Rows ``(t, log(value)/t)`` for positive samples of a growth function."""
    rows = []
    for t, value in values:
        if t <= 0:
            raise ValueError(f"t must be positive, got {t}")
        if not value > 0:
            raise NonpositiveValue(f"value at t={t} is {value}")
        rows.append(EntropyRow(float(t), math.log(value) / t))
    return rows


def hyperbolic_entropy_envelope(t: float) -> float:
    """Analytic bound on |log(area(t))/t - 1| for the hyperbolic disk, valid for t >= 5."""
    return math.log(2 * math.pi) / t + 2 * math.exp(-t)


def sandwich_check(n: int, K1: float, K2: float, h: float) -> bool:
    if K1 < 0 or K2 < 0:
        raise ValueError("curvature bounds must be nonnegative")
    if K1 > K2:
        raise BadCurvatureOrder(f"K1={K1} exceeds K2={K2}")
    return (n - 1) * K1 - SANDWICH_TOL <= h <= (n - 1) * K2 + SANDWICH_TOL


@dataclass(frozen=True)
class KnieperRow:
    t: float
    loops_estimate: Optional[float]
    geodesics_estimate: Optional[float]
    h_vol: float
    half_h_vol: float


def knieper_report(loops: CountSeries, geodesics: Optional[CountSeries], h_vol: float):
    """Growth-rate rows for loop and geodesic counts next to ``h_vol`` and ``h_vol/2``.

    Report only. Zero counts have no logarithm; their rows carry ``None`` and
    a notice is recorded.
    """
    notices = []
    geo = dict(geodesics.samples) if geodesics is not None else {}
    rows = []
    for t, count in loops.samples:
        lp = _log_rate(t, count, "loops", notices)
        gp = None
        if geodesics is not None and t in geo:
            gp = _log_rate(t, geo[t], "geodesics", notices)
        rows.append(KnieperRow(t, lp, gp, h_vol, h_vol / 2))
    report = EntropyReport(rows, limit_claim=h_vol, notices=notices)
    return report


def _log_rate(t, count, label, notices):
    if count <= 0:
        notices.append(f"skipped log of zero {label} count at t={t!r}")
        return None
    return math.log(count) / t
