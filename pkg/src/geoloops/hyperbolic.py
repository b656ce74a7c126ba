"""Upper half-plane geometry, PSL(2,R) elements, and preset Fuchsian groups."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import MalformedInput, NotHyperbolic

DET_TOL = 1e-9
SIGN_TOL = 1e-12
TRACE_TOL = 1e-9

IDENTITY = "identity"
ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class UhpPoint:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)) or self.im <= 0:
            raise ValueError(f"point {self.re}+{self.im}i is not in the upper half-plane")

    @classmethod
    def from_complex(cls, z) -> "UhpPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


I = UhpPoint(0.0, 1.0)


def _canonical(a, b, c, d):
    for x in (a, b, c, d):
        if abs(x) > SIGN_TOL:
            if x < 0:
                return -a, -b, -c, -d
            break
    return a, b, c, d


@dataclass(frozen=True)
class GroupMatrix:
    """Unit-determinant 2x2 matrix, stored with the PSL(2,R) sign convention.

    The first entry of ``(a, b, c, d)`` that is not negligibly small is made
    positive, so ``g`` and ``-g`` compare equal.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        # rounding in ad - bc grows with the entries of long products
        scale = max(1.0, abs(self.a * self.d), abs(self.b * self.c))
        if abs(det - 1) > DET_TOL * scale:
            raise ValueError(f"determinant {det!r} is not 1")
        a, b, c, d = _canonical(self.a, self.b, self.c, self.d)
        object.__setattr__(self, "a", float(a))
        object.__setattr__(self, "b", float(b))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "d", float(d))

    @classmethod
    def identity(cls) -> "GroupMatrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: "GroupMatrix") -> "GroupMatrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return GroupMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "GroupMatrix":
        return GroupMatrix(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "GroupMatrix":
        if k < 0:
            return self.inverse() ** -k
        out = GroupMatrix.identity()
        for _ in range(k):
            out = out @ self
        return out

    def close_to(self, other: "GroupMatrix", tol: float = 1e-9) -> bool:
        return all(abs(x - y) <= tol for x, y in zip(self.entries, other.entries))


def hyp_distance(z: UhpPoint, w: UhpPoint) -> float:
    # arccosh(1 + |z-w|^2 / (2 y y')) written via sinh of the half distance
    dz = math.hypot(z.re - w.re, z.im - w.im)
    return 2 * math.asinh(dz / (2 * math.sqrt(z.im * w.im)))


def mobius_apply(g: GroupMatrix, z: UhpPoint) -> UhpPoint:
    den = g.c * z.z + g.d
    w = (g.a * z.z + g.b) / den
    # im(gz) = det * im(z) / |cz+d|^2; keeping det absorbs rounding in long products
    im = (g.a * g.d - g.b * g.c) * z.im / abs(den) ** 2
    return UhpPoint(w.real, im)


def displacement(g: GroupMatrix, x: UhpPoint = I) -> float:
    return hyp_distance(x, mobius_apply(g, x))


def classify_element(g: GroupMatrix) -> str:
    tr = abs(g.trace)
    if tr < 2 - TRACE_TOL:
        return ELLIPTIC
    if tr > 2 + TRACE_TOL:
        return HYPERBOLIC
    if abs(g.b) <= TRACE_TOL and abs(g.c) <= TRACE_TOL and abs(g.a - g.d) <= TRACE_TOL:
        return IDENTITY
    return PARABOLIC


def translation_length(g: GroupMatrix) -> float:
    kind = classify_element(g)
    if kind != HYPERBOLIC:
        raise NotHyperbolic(kind)
    return 2 * math.acosh(abs(g.trace) / 2)


def rotation_about_i(angle: float) -> GroupMatrix:
    """Elliptic element fixing i that turns tangent directions there by ``angle``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return GroupMatrix(c, s, -s, c)


@dataclass(frozen=True)
class FuchsianModel:
    generators: tuple
    labels: tuple
    area: float
    base_point: UhpPoint = I
    slack: float = 6.0
    is_free: bool = False
    name: str = ""
    # (re_min, re_max, im_min, im_max): region sampled for base points
    domain_box: tuple = field(default=(-0.5, 0.5, 0.5, 2.0))

    def __post_init__(self):
        if len(self.generators) != len(self.labels):
            raise ValueError("one label per generator required")
        if not self.area > 0:
            raise ValueError("area must be positive")
        if self.slack < 0:
            raise ValueError("slack must be nonnegative")

    def with_slack(self, slack: float) -> "FuchsianModel":
        return replace(self, slack=float(slack))

    def with_base_point(self, x: UhpPoint) -> "FuchsianModel":
        return replace(self, base_point=x)

    def letters(self) -> list:
        """Generators and inverses in letter order ``(g0, g0^-1, g1, g1^-1, ...)``."""
        out = []
        for g in self.generators:
            out += [g, g.inverse()]
        return out

    def base_point_grid(self, size: int) -> list:
        r0, r1, i0, i1 = self.domain_box
        pts = []
        for j in range(size):
            for k in range(size):
                fr = 0.5 if size == 1 else j / (size - 1)
                fi = 0.5 if size == 1 else k / (size - 1)
                pts.append(UhpPoint(r0 + fr * (r1 - r0), i0 + fi * (i1 - i0)))
        return pts

    def describe(self) -> dict:
        return {
            "name": self.name,
            "area": self.area,
            "generators": list(self.labels),
            "base_point": [self.base_point.re, self.base_point.im],
            "slack": self.slack,
            "is_free": self.is_free,
        }


def preset_punctured_torus() -> FuchsianModel:
    # commutator subgroup of PSL(2,Z): free of rank 2, one cusp, area 2*pi
    A = GroupMatrix(1, 1, 1, 2)
    B = GroupMatrix(1, -1, -1, 2)
    return FuchsianModel(
        generators=(A, B),
        labels=("A", "B"),
        area=2 * math.pi,
        base_point=I,
        slack=3.0,
        is_free=True,
        name="punctured-torus",
        domain_box=(-1.0, 1.0, 0.6, 1.8),
    )


def preset_genus2_octagon() -> FuchsianModel:
    # side pairings of the regular octagon with angles pi/4 centered at i
    p = 1 + math.sqrt(2)
    q = math.sqrt(2 + 2 * math.sqrt(2))
    g0 = GroupMatrix(p, q, q, p)
    gens = []
    for k in range(4):
        R = rotation_about_i(k * math.pi / 4)
        gens.append(R @ g0 @ R.inverse())
    return FuchsianModel(
        generators=tuple(gens),
        labels=("g0", "g1", "g2", "g3"),
        area=4 * math.pi,
        base_point=I,
        slack=6.0,
        is_free=False,
        name="genus2-octagon",
        domain_box=(-0.8, 0.8, 0.5, 2.0),
    )


PRESETS = {
    "punctured-torus": preset_punctured_torus,
    "genus2-octagon": preset_genus2_octagon,
}


def read_group(path) -> FuchsianModel:
    """Parse a Fuchsian group file.

    Grammar (``#`` starts a comment, blank lines ignored)::

        area <float>
        base <re> <im>
        free <yes|no>                      optional, default no
        slack <float>                      optional, default 6.0
        box <re_min> <re_max> <im_min> <im_max>   optional
        gen <label> <a> <b> <c> <d>        one per generator, at least one
    """
    opts = {}
    gens, labels = [], []
    try:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            key, args = line[0], line[1:]
            if key == "gen":
                if len(args) != 5:
                    raise ValueError(f"line {lineno}: gen needs a label and 4 numbers")
                labels.append(args[0])
                gens.append(GroupMatrix(*map(float, args[1:])))
            elif key == "area" and len(args) == 1:
                opts["area"] = float(args[0])
            elif key == "base" and len(args) == 2:
                opts["base_point"] = UhpPoint(float(args[0]), float(args[1]))
            elif key == "free" and len(args) == 1 and args[0] in ("yes", "no"):
                opts["is_free"] = args[0] == "yes"
            elif key == "slack" and len(args) == 1:
                opts["slack"] = float(args[0])
            elif key == "box" and len(args) == 4:
                opts["domain_box"] = tuple(map(float, args))
            else:
                raise ValueError(f"line {lineno}: cannot parse {raw.strip()!r}")
        if "area" not in opts or "base_point" not in opts or not gens:
            raise ValueError("need area, base and at least one gen line")
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be distinct")
        return FuchsianModel(generators=tuple(gens), labels=tuple(labels), name=Path(path).stem, **opts)
    except (OSError, ValueError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
