"""Exhaustive enumeration of small spaces and continuous maps.

Topologies are generated through minimal-neighborhood assignments (each
point gets the smallest open set around it, subject to the nesting
constraints of a preorder), deduplicated up to relabeling by the canonical
form of the open-set family.  Continuous maps are generated by
backtracking on the specialization-preservation constraint, which on
finite spaces is equivalent to continuity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .spaces import FiberedMap, FiniteSpace

_LABELED_CACHE: dict[int, tuple[tuple[int, ...], ...]] = {}
_CANONICAL_CACHE: dict[int, tuple[FiniteSpace, ...]] = {}


def minimal_nbhd_assignments(n: int) -> tuple[tuple[int, ...], ...]:
    """All labeled Alexandrov topologies on n points, as per-point minimal
    neighborhoods (U[i] contains i; j in U[i] forces U[j] inside U[i])."""
    cached = _LABELED_CACHE.get(n)
    if cached is not None:
        return cached
    full = (1 << n) - 1
    out = []
    assign = [0] * n

    def backtrack(i: int):
        if i == n:
            out.append(tuple(assign))
            return
        bit = 1 << i
        for cand in range(full + 1):
            if not cand & bit:
                continue
            ok = True
            for j in range(i):
                uj = assign[j]
                if cand >> j & 1 and uj & ~cand:
                    ok = False
                    break
                if uj & bit and cand & ~uj:
                    ok = False
                    break
            if ok:
                assign[i] = cand
                backtrack(i + 1)
        assign[i] = 0

    backtrack(0)
    result = tuple(out)
    _LABELED_CACHE[n] = result
    return result


def space_from_min_nbhds(nbhds) -> FiniteSpace:
    """The topology generated by a minimal-neighborhood assignment."""
    n = len(nbhds)
    opens = {0}
    frontier = [0]
    while frontier:
        cur = frontier.pop()
        for u in nbhds:
            nxt = cur | u
            if nxt not in opens:
                opens.add(nxt)
                frontier.append(nxt)
    return FiniteSpace(n, sorted(opens), _trusted=True)


def all_spaces(n: int):
    for nbhds in minimal_nbhd_assignments(n):
        yield space_from_min_nbhds(nbhds)


def canonical_spaces(n: int) -> tuple[FiniteSpace, ...]:
    """Homeomorphism representatives, canonically labeled and sorted."""
    cached = _CANONICAL_CACHE.get(n)
    if cached is not None:
        return cached
    seen = {}
    for space in all_spaces(n):
        form = space.canonical_form()
        if form not in seen:
            seen[form] = FiniteSpace(n, form, _trusted=True)
    result = tuple(seen[form] for form in sorted(seen))
    _CANONICAL_CACHE[n] = result
    return result


def continuous_tables(x_space: FiniteSpace, y_space: FiniteSpace
                      ) -> tuple[tuple[int, ...], ...]:
    """All continuous maps, as tables, via specialization preservation."""
    nx, ny = x_space.n, y_space.n
    ux = x_space._min_nbhd
    uy = y_space._min_nbhd
    out = []
    tab = [0] * nx

    def backtrack(i: int):
        if i == nx:
            out.append(tuple(tab))
            return
        ui = ux[i]
        for v in range(ny):
            uv = uy[v]
            ok = True
            for j in range(i):
                if ui >> j & 1 and not uv >> tab[j] & 1:
                    ok = False
                    break
                if ux[j] >> i & 1 and not uy[tab[j]] >> v & 1:
                    ok = False
                    break
            if ok:
                tab[i] = v
                backtrack(i + 1)
        tab[i] = 0

    backtrack(0)
    return tuple(out)


@dataclass(frozen=True)
class Instance:
    uid: str
    f: FiberedMap


def census_instances(max_total: int):
    """Every continuous map between canonical spaces with |X|+|Y| bounded."""
    for nx in range(1, max_total):
        for ny in range(1, max_total - nx + 1):
            xs = canonical_spaces(nx)
            ys = canonical_spaces(ny)
            for xi, x_space in enumerate(xs):
                for yi, y_space in enumerate(ys):
                    for mi, tab in enumerate(continuous_tables(x_space, y_space)):
                        uid = f"x{nx}.{xi:03d}-y{ny}.{yi:03d}-m{mi:03d}"
                        yield Instance(uid, FiberedMap(x_space, y_space, tab,
                                                       _trusted=True))


def sampled_instances(n_max: int, count: int, seed: int):
    """Seeded random labeled instances with up to n_max points per side."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        nx = rng.randint(1, n_max)
        ny = rng.randint(1, n_max)
        xs = minimal_nbhd_assignments(nx)
        ys = minimal_nbhd_assignments(ny)
        x_space = space_from_min_nbhds(xs[rng.randrange(len(xs))])
        y_space = space_from_min_nbhds(ys[rng.randrange(len(ys))])
        tables = continuous_tables(x_space, y_space)
        tab = tables[rng.randrange(len(tables))]
        out.append(Instance(f"s{k:04d}", FiberedMap(x_space, y_space, tab,
                                                    _trusted=True)))
    return out


def random_rational_function(space: FiniteSpace, rng: random.Random,
                             num_range: int = 8, den_range: int = 6):
    from fractions import Fraction

    from .oscillation import RationalFunction

    vals = [Fraction(rng.randint(-num_range, num_range),
                     rng.randint(1, den_range)) for _ in range(space.n)]
    return RationalFunction.total(space, vals)
