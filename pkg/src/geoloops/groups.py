"""Words, necklaces, and orbit enumeration for Fuchsian groups.

Words are tuples of letters ``(generator index, inverse flag)``. Letters are
ordered as tuples, so ``a < a^-1 < b < b^-1 < ...``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CompletenessWarning, EmptyWord, NotFreeGroup
from .hyperbolic import (
    HYPERBOLIC,
    FuchsianModel,
    GroupMatrix,
    UhpPoint,
    classify_element,
    displacement,
    translation_length,
)

DEDUP_GRAIN = 1e-7
DEDUP_RECHECK = 1e-9
CERTIFY_MAX_LENGTH = 10
NECKLACE_MAX_LENGTH = 13
NECKLACE_LOOKAHEAD = 2
SLACK_RETRIES = 4
LENGTH_TOL = 1e-9


# -- words -------------------------------------------------------------------

def inverse_letter(x):
    return (x[0], not x[1])


def reduce_word(w) -> tuple:
    out = []
    for x in w:
        x = (int(x[0]), bool(x[1]))
        if out and out[-1] == inverse_letter(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w) -> tuple:
    return tuple(inverse_letter(x) for x in reversed(w))


def cyclic_reduce(w) -> tuple:
    w = reduce_word(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == inverse_letter(w[j - 1]):
        i += 1
        j -= 1
    return w[i:j]


def cyclic_canonical(w) -> tuple:
    """Least rotation of the cyclically reduced word or of its inverse."""
    w = cyclic_reduce(w)
    if not w:
        raise EmptyWord("word is trivial after cyclic reduction")
    inv = invert_word(w)
    return min(min(u[k:] + u[:k] for k in range(len(u))) for u in (w, inv))


def is_primitive_word(w) -> bool:
    n = len(w)
    for p in range(1, n):
        if n % p == 0 and w == w[:p] * (n // p):
            return False
    return True


def letter_index(x) -> int:
    return 2 * x[0] + int(x[1])


def index_letter(j) -> tuple:
    return (j // 2, bool(j % 2))


def word_to_matrix(model: FuchsianModel, w) -> GroupMatrix:
    letters = model.letters()
    out = GroupMatrix.identity()
    for x in w:
        out = out @ letters[letter_index(x)]
    return out


def word_str(w, labels) -> str:
    if not w:
        return "1"
    return " ".join(labels[i] + ("^-1" if inv else "") for i, inv in w)


def parse_word(text: str, labels) -> tuple:
    """Inverse of :func:`word_str`."""
    out = []
    for tok in text.split():
        inv = tok.endswith("^-1")
        name = tok[:-3] if inv else tok
        out.append((list(labels).index(name), inv))
    return tuple(out)


# -- vectorized matrix helpers -------------------------------------------------

def _letter_array(model: FuchsianModel) -> np.ndarray:
    return np.array([[[g.a, g.b], [g.c, g.d]] for g in model.letters()])


def _displacements(mats: np.ndarray, x: UhpPoint) -> np.ndarray:
    z = x.z
    num = mats[:, 0, 0] * z + mats[:, 0, 1]
    den = mats[:, 1, 0] * z + mats[:, 1, 1]
    w = num / den
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    im_w = det * x.im / np.abs(den) ** 2
    return 2 * np.arcsinh(np.abs(z - w) / (2 * np.sqrt(x.im * im_w)))


def _canonical_rows(flat: np.ndarray) -> np.ndarray:
    lead = np.argmax(np.abs(flat) > 1e-12, axis=1)
    sign = np.sign(flat[np.arange(len(flat)), lead])
    sign[sign == 0] = 1
    return flat * sign[:, None]


class _MatrixIndex:
    """Set of PSL(2,R) elements keyed by entries rounded at DEDUP_GRAIN."""

    def __init__(self):
        self._buckets = {}

    @staticmethod
    def _keys(row):
        scaled = row / DEDUP_GRAIN
        base = np.round(scaled)
        main = tuple(int(k) for k in base)
        yield main
        # entries sitting near a rounding boundary may land in a neighbour cell
        frac = scaled - base
        for i, f in enumerate(frac):
            if abs(f) > 0.49:
                alt = list(main)
                alt[i] += 1 if f > 0 else -1
                yield tuple(alt)

    def add(self, row) -> bool:
        """Insert a canonical row; False if an equal element is already present."""
        tol = DEDUP_RECHECK * max(1.0, float(np.max(np.abs(row))))
        keys = list(self._keys(row))
        for k in keys:
            for other in self._buckets.get(k, ()):
                if np.all(np.abs(other - row) <= tol):
                    return False
        self._buckets.setdefault(keys[0], []).append(row)
        return True


# -- orbit balls ---------------------------------------------------------------

@dataclass(frozen=True)
class OrbitElement:
    matrix: GroupMatrix
    word: tuple
    displacement: float


@dataclass
class OrbitBall:
    """Group elements moving the base point by at most ``radius``."""

    elements: list
    radius: float
    base_point: UhpPoint
    slack: float
    max_word_length: int
    caveats: list = field(default_factory=list)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def displacements(self) -> np.ndarray:
        return np.array([e.displacement for e in self.elements])

    def count_within(self, t: float) -> int:
        return int(np.sum(self.displacements() <= t + LENGTH_TOL)) if self.elements else 0


def _frontier_words(levels, level_idx, idx):
    word = []
    while level_idx >= 0:
        parents, lasts = levels[level_idx]
        word.append(index_letter(int(lasts[idx])))
        idx = int(parents[idx])
        level_idx -= 1
    return tuple(reversed(word))


def _bfs(model: FuchsianModel, x: UhpPoint, radius: float, slack: float):
    """Level-by-level word expansion keeping products that stay within radius + slack.

    Returns (found, levels, max surviving length). ``found`` lists
    (level, index, matrix row, displacement) for elements within ``radius``.
    """
    letters = _letter_array(model)
    nl = len(letters)
    index = None if model.is_free else _MatrixIndex()
    if index is not None:
        index.add(np.array([1.0, 0.0, 0.0, 1.0]))
    mats = np.eye(2)[None]
    last = np.array([-1])
    levels = []
    found = []
    depth = 0
    while len(mats):
        cand = np.einsum("nij,ljk->nlik", mats, letters).reshape(-1, 2, 2)
        parent = np.repeat(np.arange(len(mats)), nl)
        let = np.tile(np.arange(nl), len(mats))
        ok = (last[parent] < 0) | (let != (last[parent] ^ 1))
        cand, parent, let = cand[ok], parent[ok], let[ok]
        d = _displacements(cand, x)
        keep = d <= radius + slack + LENGTH_TOL
        cand, parent, let, d = cand[keep], parent[keep], let[keep], d[keep]
        flat = _canonical_rows(cand.reshape(-1, 4))
        if index is not None:
            fresh = np.array([index.add(row) for row in flat], dtype=bool)
            cand, parent, let, d, flat = cand[fresh], parent[fresh], let[fresh], d[fresh], flat[fresh]
        if not len(cand):
            break
        levels.append((parent, let))
        inside = np.nonzero(d <= radius + LENGTH_TOL)[0]
        found += [(depth, int(i), flat[i], float(d[i])) for i in inside]
        mats, last = cand, let
        depth += 1
    return found, levels, depth


def _exhaustive_free(model: FuchsianModel, x: UhpPoint, radius: float, max_len: int):
    """Canonical rows of all reduced words of length <= max_len within radius."""
    letters = _letter_array(model)
    nl = len(letters)
    mats = np.eye(2)[None]
    last = np.array([-1])
    rows = []
    for _ in range(max_len):
        cand = np.einsum("nij,ljk->nlik", mats, letters).reshape(-1, 2, 2)
        parent = np.repeat(np.arange(len(mats)), nl)
        let = np.tile(np.arange(nl), len(mats))
        ok = (last[parent] < 0) | (let != (last[parent] ^ 1))
        mats, last = cand[ok], let[ok]
        d = _displacements(mats, x)
        rows.append(_canonical_rows(mats[d <= radius + LENGTH_TOL].reshape(-1, 4)))
    return np.concatenate(rows) if rows else np.zeros((0, 4))


def _sort_key(e: OrbitElement):
    return (round(e.displacement, 10), len(e.word), e.word)


def enumerate_orbit_ball(model: FuchsianModel, R: float, base_point: UhpPoint | None = None,
                         slack: float | None = None, certify: bool = True) -> OrbitBall:
    """All g != 1 with d(x, g x) <= R, each once, sorted by displacement then word.

    Partial products farther than ``R + slack`` from the base point are
    pruned. For non-free models completeness rests on that slack and a
    caveat is attached. For free models the result is cross-checked against
    unpruned enumeration of every reduced word up to the longest surviving
    word length (capped at CERTIFY_MAX_LENGTH); if that check finds misses the
    slack is widened by 1 and the search rerun, at most SLACK_RETRIES times.
    """
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    x = model.base_point if base_point is None else base_point
    slack = model.slack if slack is None else float(slack)
    elements, depth = _pruned_ball(model, x, R, slack)
    caveats = []
    if not model.is_free:
        caveats.append(
            f"{model.name or 'group'}: orbit enumeration is not certified complete for a "
            f"non-free group (pruning slack {slack:g})"
        )
        if slack == 0:
            caveats.append(
                f"{model.name or 'group'}: pruning slack is 0, so elements reached only through "
                "detours are dropped; counts are likely incomplete"
            )
    elif certify and depth:
        upto = min(depth, CERTIFY_MAX_LENGTH)
        rows = _exhaustive_free(model, x, R, upto)
        missed = _certify_free(elements, rows)
        # base points deep in a cusp need longer detours; widen the slack and retry
        for _ in range(SLACK_RETRIES):
            if not missed:
                break
            slack += 1.0
            elements, depth = _pruned_ball(model, x, R, slack)
            if min(depth, CERTIFY_MAX_LENGTH) > upto:
                upto = min(depth, CERTIFY_MAX_LENGTH)
                rows = _exhaustive_free(model, x, R, upto)
            missed = _certify_free(elements, rows)
        if missed:
            caveats.append(
                f"{model.name or 'group'}: exhaustive check found {missed} elements the pruned "
                f"search missed (slack {slack:g}); increase slack"
            )
        if depth > CERTIFY_MAX_LENGTH:
            caveats.append(
                f"{model.name or 'group'}: completeness certified for words up to length "
                f"{CERTIFY_MAX_LENGTH} only; the pruned search went deeper"
            )
    elements.sort(key=_sort_key)
    return OrbitBall(elements, float(R), x, slack, depth, caveats)


def _pruned_ball(model, x, R, slack):
    found, levels, depth = _bfs(model, x, R, slack)
    elements = []
    for lvl, idx, row, d in found:
        word = _frontier_words(levels, lvl, idx)
        elements.append(OrbitElement(GroupMatrix(*row), word, d))
    return elements, depth


def _certify_free(elements, rows) -> int:
    index = _MatrixIndex()
    for e in elements:
        index.add(np.array(e.matrix.entries))
    return sum(1 for row in rows if index.add(row))


def _warn(caveats):
    for c in caveats:
        warnings.warn(c, CompletenessWarning, stacklevel=3)


def loop_count_hyp(model: FuchsianModel, t: float) -> int:
    ball = enumerate_orbit_ball(model, t)
    _warn(ball.caveats)
    return len(ball)


def count_with_base_point(model: FuchsianModel, x: UhpPoint, t: float) -> int:
    ball = enumerate_orbit_ball(model, t, base_point=x)
    _warn(ball.caveats)
    return len(ball)


def loop_counts_over_grid(model: FuchsianModel, ts, grid_size: int):
    """Loop counts at the model base point and maximized over a base-point grid.

    One ball of radius ``max(ts)`` is enumerated per base point and counted
    at every t. Returns ``(rows, caveats)`` with rows ``(t, count_base, count_max)``.
    """
    ts = sorted(float(t) for t in ts)
    t_max = ts[-1]
    caveats = []
    base = enumerate_orbit_ball(model, t_max)
    caveats += base.caveats
    grid_counts = []
    for x in model.base_point_grid(grid_size):
        ball = enumerate_orbit_ball(model, t_max, base_point=x)
        caveats += ball.caveats
        grid_counts.append(np.sort(ball.displacements()))
    base_d = np.sort(base.displacements())
    rows = []
    for t in ts:
        cb = int(np.searchsorted(base_d, t + LENGTH_TOL, side="right"))
        cm = max([cb] + [int(np.searchsorted(g, t + LENGTH_TOL, side="right")) for g in grid_counts])
        rows.append((t, cb, cm))
    return rows, caveats


# -- conjugacy classes in free groups -----------------------------------------

@dataclass(frozen=True)
class ConjClass:
    necklace: tuple
    length_geom: float
    primitive: bool


@dataclass
class ClassCensus:
    classes: list
    t: float
    searched_length: int
    min_lengths: dict
    caveats: list = field(default_factory=list)

    def primitive(self) -> list:
        return [c for c in self.classes if c.primitive]


def _cyclic_words(model: FuchsianModel, n_max: int):
    """Yield (n, letters (N, n), matrices (N, 2, 2)) for cyclically reduced words."""
    letters = _letter_array(model)
    nl = len(letters)
    mats = letters.copy()
    words = np.arange(nl)[:, None]
    for n in range(1, n_max + 1):
        if n > 1:
            parent = np.repeat(np.arange(len(mats)), nl)
            let = np.tile(np.arange(nl), len(mats))
            ok = let != (words[parent, -1] ^ 1)
            parent, let = parent[ok], let[ok]
            mats = np.einsum("nij,njk->nik", mats[parent], letters[let])
            words = np.concatenate([words[parent], let[:, None]], axis=1)
        cyc = words[:, 0] != (words[:, -1] ^ 1) if n > 1 else np.ones(len(words), bool)
        yield n, words[cyc], mats[cyc]


def enumerate_conjugacy_classes(model: FuchsianModel, t: float) -> ClassCensus:
    """Hyperbolic conjugacy classes (unoriented) with translation length <= t.

    Necklaces are enumerated by word length. The search stops at the first
    length whose shortest hyperbolic necklace exceeds ``t``, after checking
    that the next NECKLACE_LOOKAHEAD lengths agree.
    """
    if not model.is_free:
        raise NotFreeGroup(f"{model.name or 'group'} is not declared free")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    seen = {}
    min_lengths = {}
    caveats = []
    stop_at = None
    n_done = 0
    for n, words, mats in _cyclic_words(model, NECKLACE_MAX_LENGTH):
        n_done = n
        tr = np.abs(mats[:, 0, 0] + mats[:, 1, 1])
        hyp = tr > 2 + 1e-9
        lengths = np.full(len(tr), np.inf)
        lengths[hyp] = 2 * np.arccosh(tr[hyp] / 2)
        min_lengths[n] = float(lengths.min()) if len(lengths) else math.inf
        for i in np.nonzero(lengths <= t + LENGTH_TOL)[0]:
            w = tuple(index_letter(int(j)) for j in words[i])
            canon = cyclic_canonical(w)
            if canon not in seen:
                seen[canon] = ConjClass(canon, float(lengths[i]), is_primitive_word(canon))
        if min_lengths[n] > t + LENGTH_TOL:
            if stop_at is None:
                stop_at = n
            if n >= stop_at + NECKLACE_LOOKAHEAD:
                break
        elif stop_at is not None:
            caveats.append(
                f"necklace stopping rule violated: length {n} has a class of translation length "
                f"{min_lengths[n]:.6g} <= t after length {stop_at} had none"
            )
            stop_at = None
    else:
        caveats.append(f"necklace search truncated at word length {NECKLACE_MAX_LENGTH}")
    classes = sorted(seen.values(), key=lambda c: (round(c.length_geom, 10), len(c.necklace), c.necklace))
    return ClassCensus(classes, float(t), n_done, min_lengths, caveats)


def closed_geodesic_count_free(model: FuchsianModel, t: float) -> int:
    census = enumerate_conjugacy_classes(model, t)
    _warn(census.caveats)
    return len(census.primitive())


def conj_class(model: FuchsianModel, w) -> ConjClass:
    canon = cyclic_canonical(w)
    g = word_to_matrix(model, canon)
    length = translation_length(g) if classify_element(g) == HYPERBOLIC else 0.0
    return ConjClass(canon, length, is_primitive_word(canon))


def orbit_displacement(model: FuchsianModel, e: OrbitElement, x: UhpPoint | None = None) -> float:
    return displacement(e.matrix, model.base_point if x is None else x)
