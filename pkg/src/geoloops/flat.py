"""Flat tori R^n / L: lattice vector enumeration, loop counts, pigeonhole witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import euclidean_ball_volume
from .errors import HypothesisNotMet, MalformedInput, SearchExhausted, SingularBasis

BOUNDARY_TOL = 1e-9
DET_TOL = 1e-12

WITNESS_RESOLUTION = 64
WITNESS_REFINE = 4
WITNESS_LEVELS = 3


@dataclass(frozen=True, eq=False)
class LatticeModel:
    basis: np.ndarray
    gram: np.ndarray
    name: str = ""

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.basis)))

    def scaled(self, s: float) -> "LatticeModel":
        return make_lattice(self.basis * s, name=self.name)


def make_lattice(basis, name: str = "") -> LatticeModel:
    """Build a lattice from basis rows; rejects rank-deficient input."""
    B = np.array(basis, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] == 0:
        raise ValueError(f"basis must be a nonempty square matrix, got shape {B.shape}")
    if not np.all(np.isfinite(B)):
        raise ValueError("basis entries must be finite")
    if abs(np.linalg.det(B)) <= DET_TOL:
        raise SingularBasis(f"basis is singular (|det| <= {DET_TOL:g})")
    G = B @ B.T
    G = (G + G.T) / 2
    B.setflags(write=False)
    G.setflags(write=False)
    return LatticeModel(B, G, name)


def read_lattice(path) -> LatticeModel:
    """Parse a lattice file: first line ``n``, then ``n`` rows of ``n`` floats."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        n = int(lines[0][0])
        if len(lines[0]) != 1 or n <= 0:
            raise ValueError
        rows = [[float(x) for x in ln] for ln in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise MalformedInput(f"{path}: cannot parse lattice file") from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise MalformedInput(f"{path}: expected {n} rows of {n} numbers")
    return make_lattice(rows, name=Path(path).stem)


@dataclass(frozen=True)
class LatticeVector:
    coeffs: tuple
    length: float
    primitive: bool

    def vector(self, lattice: LatticeModel) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float) @ lattice.basis


def _short_coeffs(gram: np.ndarray, bound_sq: float) -> np.ndarray:
    """All integer c with c^T G c <= bound_sq (origin included), as an (N, n) array.

    Fincke-Pohst: with G = R^T R the form splits into nested squares, so each
    coordinate ranges over an interval fixed by the outer coordinates. The
    tree is expanded one level at a time over whole numpy frontiers.
    """
    n = gram.shape[0]
    R = np.linalg.cholesky(gram).T
    diag = np.diag(R)
    mu = R / diag[:, None]
    coeffs = np.zeros((1, n), dtype=np.int64)
    used = np.zeros(1)
    # interval padding absorbs rounding; exact filtering happens afterwards
    pad = 1e-7
    for i in range(n - 1, -1, -1):
        center = -(coeffs[:, i + 1:] @ mu[i, i + 1:]) if i < n - 1 else np.zeros(len(coeffs))
        budget = np.maximum(bound_sq - used, 0.0)
        rad = np.sqrt(budget) / diag[i] + pad
        lo = np.ceil(center - rad).astype(np.int64)
        hi = np.floor(center + rad).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        parent = np.repeat(np.arange(len(coeffs)), counts)
        starts = np.cumsum(counts) - counts
        offset = np.arange(total) - np.repeat(starts, counts)
        new = coeffs[parent].copy()
        new[:, i] = lo[parent] + offset
        used = used[parent] + diag[i] ** 2 * (new[:, i] - center[parent]) ** 2
        coeffs = new
    return coeffs


def _quadratic_lengths(gram: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    c = coeffs.astype(float)
    return np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", c, gram, c), 0.0))


def _sorted_order(lengths, coeffs):
    # ties in length are broken lexicographically on the coefficients
    keys = [coeffs[:, j] for j in range(coeffs.shape[1] - 1, -1, -1)]
    return np.lexsort(keys + [np.round(lengths, 12)])


def enumerate_coeffs(L: LatticeModel, t: float):
    """Coefficient array and lengths of nonzero lattice vectors with |v| <= t, sorted."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    limit = t + BOUNDARY_TOL
    coeffs = _short_coeffs(L.gram, limit * limit * (1 + 1e-9))
    coeffs = coeffs[np.any(coeffs != 0, axis=1)]
    lengths = _quadratic_lengths(L.gram, coeffs)
    keep = lengths <= limit
    coeffs, lengths = coeffs[keep], lengths[keep]
    order = _sorted_order(lengths, coeffs)
    return coeffs[order], lengths[order]


def _primitive_mask(coeffs: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(coeffs), axis=1) == 1


def enumerate_vectors(L: LatticeModel, t: float) -> list:
    coeffs, lengths = enumerate_coeffs(L, t)
    prim = _primitive_mask(coeffs) if len(coeffs) else np.zeros(0, bool)
    return [
        LatticeVector(tuple(int(x) for x in c), float(length), bool(p))
        for c, length, p in zip(coeffs, lengths, prim)
    ]


def loop_count_flat(L: LatticeModel, t: float) -> int:
    """Based loop classes of length <= t (the trivial class excluded)."""
    return len(enumerate_coeffs(L, t)[0])


def primitive_count_flat(L: LatticeModel, t: float) -> int:
    coeffs, _ = enumerate_coeffs(L, t)
    return int(_primitive_mask(coeffs).sum()) if len(coeffs) else 0


def closed_geodesic_count_flat(L: LatticeModel, t: float) -> int:
    # v and -v trace the same unoriented closed geodesic
    return primitive_count_flat(L, t) // 2


def flat_counts(L: LatticeModel, ts) -> list:
    """``(t, loop count, closed geodesic count)`` for every t, from one enumeration."""
    ts = [float(t) for t in ts]
    if not ts:
        return []
    coeffs, lengths = enumerate_coeffs(L, max(ts))
    prim = _primitive_mask(coeffs) if len(coeffs) else np.zeros(0, bool)
    out = []
    for t in ts:
        inside = lengths <= t + BOUNDARY_TOL
        out.append((t, int(inside.sum()), int((inside & prim).sum()) // 2))
    return out


@dataclass(frozen=True)
class WitnessReport:
    center: tuple
    multiplicity: int
    translates: list
    radius: float
    requested: int

    def distances(self, lattice: LatticeModel) -> list:
        x = np.asarray(self.center)
        return [float(np.linalg.norm(np.asarray(v, float) @ lattice.basis - x)) for v in self.translates]

    def loop_vectors(self) -> list:
        """Differences ``v_i - v_1``: nontrivial loops of length at most twice the radius."""
        first = np.asarray(self.translates[0])
        return [tuple(int(x) for x in np.asarray(v) - first) for v in self.translates[1:]]

    def as_dict(self) -> dict:
        return {
            "center": list(self.center),
            "radius": self.radius,
            "requested": self.requested,
            "multiplicity": self.multiplicity,
            "translates": [list(v) for v in self.translates],
        }


def _mth_distance(points, candidates, m, chunk=1 << 16):
    out = np.empty(len(points))
    for s in range(0, len(points), chunk):
        p = points[s:s + chunk]
        d = np.linalg.norm(p[:, None, :] - candidates[None, :, :], axis=2)
        out[s:s + chunk] = np.partition(d, m - 1, axis=1)[:, m - 1]
    return out


def blichfeldt_witness(L: LatticeModel, r: float, m: int, resolution: int | None = None,
                       levels: int = WITNESS_LEVELS, require_hypothesis: bool = True) -> WitnessReport:
    """Find a point whose r-ball holds at least m lattice points.

    The fundamental cell is scanned on a regular grid and the best grid cell
    is refined ``levels`` times by a factor of 4. The score is the distance
    to the m-th nearest lattice point (smaller is better); ties keep the
    earlier grid point.

    With ``require_hypothesis=False`` the volume precondition is not
    enforced and the search result alone decides success.
    """
    if r <= 0 or m < 1:
        raise ValueError("need r > 0 and m >= 1")
    n = L.dimension
    vol = euclidean_ball_volume(n, r)
    if require_hypothesis and not vol > m * L.covolume:
        raise HypothesisNotMet(
            f"vol(B_r) = {vol:.6g} does not exceed m * covolume = {m * L.covolume:.6g}"
        )
    if resolution is None:
        resolution = WITNESS_RESOLUTION if n <= 3 else 16

    basis = L.basis
    row_norms = np.linalg.norm(basis, axis=1)
    corners = np.array(np.meshgrid(*[[0, 1]] * n, indexing="ij")).reshape(n, -1).T
    cell_reach = float(np.max(np.linalg.norm(corners @ basis, axis=1))) + 2 * row_norms.sum() / resolution
    cand = _short_coeffs(L.gram, (r + cell_reach) ** 2 * (1 + 1e-9))
    cand_pts = cand @ basis
    if len(cand) < m:
        raise SearchExhausted("fewer candidate lattice points than requested multiplicity")

    h = 1.0 / resolution
    axes = [np.arange(resolution) * h] * n
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1).T
    scores = _mth_distance(grid @ basis, cand_pts, m)
    best = int(np.argmin(scores))
    best_u, best_score = grid[best], scores[best]

    for _ in range(levels):
        sub = h / WITNESS_REFINE
        steps = np.arange(-WITNESS_REFINE, WITNESS_REFINE + 1) * sub
        local = np.array(np.meshgrid(*[steps] * n, indexing="ij")).reshape(n, -1).T + best_u
        s = _mth_distance(local @ basis, cand_pts, m)
        k = int(np.argmin(s))
        if s[k] < best_score - 1e-12:
            best_u, best_score = local[k], s[k]
        h = sub

    if best_score > r + BOUNDARY_TOL:
        raise SearchExhausted(
            f"best grid point has its {m}-th nearest lattice point at {best_score:.6g} > r = {r}"
        )
    center = best_u @ basis
    d = np.linalg.norm(cand_pts - center, axis=1)
    inside = np.nonzero(d <= r + BOUNDARY_TOL)[0]
    inside = inside[np.lexsort([cand[inside, j] for j in range(n - 1, -1, -1)] + [np.round(d[inside], 12)])]
    translates = [tuple(int(x) for x in cand[i]) for i in inside]
    return WitnessReport(tuple(float(x) for x in center), len(translates), translates, float(r), int(m))
