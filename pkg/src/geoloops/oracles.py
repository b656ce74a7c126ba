"""Slow reference computations used to cross-check the fast paths.

Nothing here calls the enumeration code it is meant to check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .hyperbolic import FuchsianModel, GroupMatrix, UhpPoint, hyp_distance, mobius_apply


def naive_box_vectors(basis, t: float, tol: float = 1e-9) -> set:
    """Nonzero integer coefficient vectors c with |c B| <= t, by scanning a box.

    |c_i| <= t * sqrt((G^-1)_ii) holds for every such c (Cauchy-Schwarz in
    the dual basis), so the box is exhaustive.
    """
    B = np.asarray(basis, dtype=float)
    G = B @ B.T
    half = [int(math.floor((t + tol) * math.sqrt(g))) + 1 for g in np.diag(np.linalg.inv(G))]
    grids = np.array(list(itertools.product(*[range(-h, h + 1) for h in half])), dtype=np.int64)
    norms = np.linalg.norm(grids.astype(float) @ B, axis=1)
    keep = (norms <= t + tol) & np.any(grids != 0, axis=1)
    return {tuple(int(x) for x in c) for c in grids[keep]}


def disk_count(radius: int) -> int:
    """Integer points (a, b) != 0 with a^2 + b^2 <= radius^2, by direct loops."""
    r2 = radius * radius
    count = 0
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            if (a, b) != (0, 0) and a * a + b * b <= r2:
                count += 1
    return count


def reduced_words(rank: int, length: int):
    """All freely reduced words of exactly ``length`` letters over ``rank`` generators."""
    letters = [(i, inv) for i in range(rank) for inv in (False, True)]
    if length == 0:
        yield ()
        return
    stack = [((x,)) for x in letters]
    while stack:
        w = stack.pop()
        if len(w) == length:
            yield w
            continue
        for x in letters:
            if x != (w[-1][0], not w[-1][1]):
                stack.append(w + (x,))


def _product(model, w):
    out = GroupMatrix.identity()
    for i, inv in w:
        g = model.generators[i]
        out = out @ (g.inverse() if inv else g)
    return out


def exhaustive_orbit(model: FuchsianModel, x: UhpPoint, R: float, max_len: int) -> dict:
    """Distinct elements g != 1 with d(x, g x) <= R among words of length <= max_len.

    Keys are entries rounded to 6 decimals; values are displacements.
    """
    out = {}
    for n in range(1, max_len + 1):
        for w in reduced_words(len(model.generators), n):
            g = _product(model, w)
            d = hyp_distance(x, mobius_apply(g, x))
            if d <= R + 1e-9:
                key = tuple(round(v, 6) + 0.0 for v in g.entries)
                out.setdefault(key, d)
    out.pop((1.0, 0.0, 0.0, 1.0), None)
    return out


def all_divisors_primitive(w) -> bool:
    """True unless ``w`` is a proper power, checking every k >= 2 dividing len(w)."""
    n = len(w)
    for k in range(2, n + 1):
        if n % k == 0:
            p = n // k
            if all(w[i] == w[i % p] for i in range(n)):
                return False
    return True


def brute_necklaces(model: FuchsianModel, t: float, max_len: int) -> list:
    """Unoriented primitive hyperbolic conjugacy classes of translation length <= t.

    Classes are found among cyclically reduced words of length <= max_len,
    identified by the frozen set of all rotations of the word and its inverse.
    """
    seen = set()
    found = []
    rank = len(model.generators)
    for n in range(1, max_len + 1):
        for w in reduced_words(rank, n):
            if n > 1 and w[0] == (w[-1][0], not w[-1][1]):
                continue
            inv = tuple((i, not b) for i, b in reversed(w))
            orbit = frozenset([w[k:] + w[:k] for k in range(n)] + [inv[k:] + inv[:k] for k in range(n)])
            if orbit in seen:
                continue
            seen.add(orbit)
            if not all_divisors_primitive(w):
                continue
            tr = abs(_product(model, w).trace)
            if tr > 2 + 1e-9 and 2 * math.acosh(tr / 2) <= t + 1e-9:
                found.append(min(orbit))
    return found


def geodesic_length_quadrature(z: complex, w: complex) -> float:
    """Hyperbolic length of the geodesic arc from z to w, integrating |dz|/y numerically."""
    from scipy.integrate import quad

    if abs(z.real - w.real) < 1e-14:
        return abs(math.log(w.imag / z.imag))
    # geodesic is the circle centred on the real axis through z and w
    c = (abs(w) ** 2 - abs(z) ** 2) / (2 * (w.real - z.real))
    a0 = math.atan2(z.imag, z.real - c)
    a1 = math.atan2(w.imag, w.real - c)
    # on a circle of radius rho, |dz| = rho d(theta) and y = rho sin(theta)
    val, _ = quad(lambda th: 1.0 / math.sin(th), min(a0, a1), max(a0, a1), epsabs=1e-13, epsrel=1e-13)
    return val
