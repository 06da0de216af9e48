"""PL Morse theory: sublevel complexes, lower links, critical groups.

A vertex is critical exactly when its lower link (the part of its link on
strictly lower neighbors) has nontrivial reduced homology; the critical
group in degree q is the reduced homology of the lower link in degree q-1,
with the empty lower link contributing a one-dimensional group in degree 0
(a local minimum). This is the standard PL translation of the local
homology of a sublevel set at an isolated critical point.

Vertices on the faces of the ambient box are an artifact of truncating the
model space: they are never reported as critical but their lower-star
contributions are still counted where the Morse inequalities demand it
(see lower_star_numbers).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .complexes import FullSubcomplex, SimplicialComplex, subcomplex_from_mask
from .errors import ValidationError
from .homology import PairOfSpaces, pair_homology, space_pair
from .scalarfield import ScalarField


def sublevel_complex(X: SimplicialComplex, f: ScalarField, c: float) -> FullSubcomplex:
    """Full subcomplex on the vertices with tie-broken value <= c."""
    if f.complex is not X:
        raise ValidationError("field was sampled on a different complex")
    return subcomplex_from_mask(X, f.values <= c)


def lower_link(X: SimplicialComplex, f: ScalarField, v: int) -> SimplicialComplex:
    """Subcomplex of the link of v spanned by strictly lower neighbors.

    Returned as a standalone complex whose vertex order follows the parent's.
    """
    if f.complex is not X:
        raise ValidationError("field was sampled on a different complex")
    if not 0 <= v < X.vertex_count:
        raise ValidationError(f"unknown vertex {v}")
    fv = f.values[v]
    members: set[tuple[int, ...]] = set()
    vertices: set[int] = set()
    for q, rows in X.star_of_vertex(v):
        for row in rows:
            simplex = X.simplices[q][row]
            rest = [int(u) for u in simplex if u != v]
            if all(f.values[u] < fv for u in rest):
                members.add(tuple(rest))
                vertices.update(rest)
    ordered = sorted(vertices)
    local = {u: i for i, u in enumerate(ordered)}
    coords = X.coords[ordered] if ordered else np.zeros((0, X.coords.shape[1]))
    simplices = [tuple(local[u] for u in s) for s in members]
    return SimplicialComplex.from_simplices(coords, simplices)


@dataclass(frozen=True)
class CriticalVertex:
    """A vertex with its critical-group profile and nondegeneracy flag."""

    vertex: int
    coords: tuple[float, ...]
    value: float
    raw_value: float
    critical_group_dims: tuple[int, ...]
    boundary: bool
    lower_link: SimplicialComplex

    @property
    def is_critical(self) -> bool:
        return any(self.critical_group_dims)

    @property
    def is_pl_nondegenerate(self) -> bool:
        """Lower link homologically a point (regular) or a single sphere
        (nondegenerate critical vertex of one index)."""
        total = sum(self.critical_group_dims)
        return total == 0 or (total == 1 and max(self.critical_group_dims) == 1)

    @property
    def index(self) -> int | None:
        """The unique degree with a nonzero group, for nondegenerate vertices."""
        if not self.is_critical or not self.is_pl_nondegenerate:
            return None
        return self.critical_group_dims.index(1)


def critical_groups(X: SimplicialComplex, f: ScalarField, v: int, p: int = 2) -> CriticalVertex:
    """Critical-group dimensions of f at v over GF(p), degrees 0..dim X.

    Box-boundary vertices get their groups computed all the same but come
    back flagged; callers treat them as indeterminate rather than critical.
    """
    ll = lower_link(X, f, v)
    ph = pair_homology(space_pair_of(ll), p)
    dims = tuple(ph.dim(q - 1) for q in range(X.dimension + 1))
    boundary = X.is_boundary_vertex(v) if X.domain is not None else False
    return CriticalVertex(
        vertex=v,
        coords=tuple(float(c) for c in X.coords[v]),
        value=float(f.values[v]),
        raw_value=float(f.raw_values[v]),
        critical_group_dims=dims,
        boundary=boundary,
        lower_link=ll,
    )


def space_pair_of(C: SimplicialComplex) -> PairOfSpaces:
    """The pair (C, empty) of a standalone complex."""
    return space_pair(subcomplex_from_mask(C, np.ones(C.vertex_count, dtype=bool)))


_scan_cache: dict[tuple[int, int], tuple[CriticalVertex, ...]] = {}
_scan_lock = threading.Lock()


def pl_critical_vertices(
    X: SimplicialComplex, f: ScalarField, p: int = 2, include_boundary: bool = False
) -> tuple[CriticalVertex, ...]:
    """All vertices with nontrivial critical groups, in vertex order.

    With include_boundary, box-boundary vertices with nontrivial lower-link
    homology are included (flagged); otherwise only interior ones.
    """
    key = (f.uid, p)
    with _scan_lock:
        cached = _scan_cache.get(key)
    if cached is None:
        found = []
        for v in range(X.vertex_count):
            cv = critical_groups(X, f, v, p)
            if cv.is_critical:
                found.append(cv)
        cached = tuple(found)
        with _scan_lock:
            if len(_scan_cache) > 16:
                _scan_cache.clear()
            _scan_cache[key] = cached
    if include_boundary:
        return cached
    return tuple(cv for cv in cached if not cv.boundary)


def is_regular_value(X: SimplicialComplex, f: ScalarField, c: float, p: int = 2) -> bool:
    """Whether c is a regular level of the PL field.

    c must avoid every (tie-broken) vertex value; additionally, no interior
    critical vertex value may sit within half the local level gap of c, so
    that bands bounded by c stay clear of discretization noise.
    """
    vals = f.sorted_values()
    pos = int(np.searchsorted(vals, c))
    if pos < vals.shape[0] and vals[pos] == c:
        return False
    lo = vals[pos - 1] if pos > 0 else None
    hi = vals[pos] if pos < vals.shape[0] else None
    if lo is None or hi is None:
        return True  # outside the value range entirely
    local_gap = float(hi - lo)
    for cv in pl_critical_vertices(X, f, p):
        if abs(cv.value - c) < local_gap / 2:
            return False
    return True


def _check_band(X, f, a: float, b: float, p: int):
    if not a < b:
        raise ValidationError(f"band endpoints must satisfy a < b, got a={a}, b={b}")
    for name, c in (("a", a), ("b", b)):
        if not is_regular_value(X, f, c, p):
            culprit = None
            for cv in pl_critical_vertices(X, f, p):
                if cv.value == c or abs(cv.value - c) < f.gap_below(c) / 2:
                    culprit = cv
                    break
            if culprit is None:
                vals = f.values
                v = int(np.argmin(np.abs(vals - c)))
                raise ValidationError(
                    f"band endpoint {name}={c} is not a regular value: it hits the "
                    f"value of vertex {v} at {tuple(X.coords[v])}"
                )
            raise ValidationError(
                f"band endpoint {name}={c} is not a regular value: critical vertex "
                f"{culprit.vertex} at {culprit.coords} has value {culprit.value}"
            )


def morse_numbers(X: SimplicialComplex, f: ScalarField, a: float, b: float, p: int = 2) -> tuple[int, ...]:
    """Per-degree sums of critical-group dimensions over the interior
    critical vertices with value strictly inside the regular band (a, b)."""
    _check_band(X, f, a, b, p)
    out = [0] * (X.dimension + 1)
    for cv in pl_critical_vertices(X, f, p):
        if a < cv.value < b:
            for q, dq in enumerate(cv.critical_group_dims):
                out[q] += dq
    return tuple(out)


def lower_star_numbers(
    X: SimplicialComplex, f: ScalarField, a: float, b: float, p: int = 2
) -> tuple[int, ...]:
    """Like morse_numbers but over every vertex in the band, box boundary
    included. The sublevel set grows by coning one lower link per vertex, so
    these sums bound the band's relative homology from above regardless of
    where the vertices sit; boundary vertices must be counted here even
    though they are never certified as critical."""
    _check_band(X, f, a, b, p)
    out = [0] * (X.dimension + 1)
    in_band = np.nonzero((f.values > a) & (f.values < b))[0]
    for v in in_band:
        cv = critical_groups(X, f, int(v), p)
        if cv.is_critical:
            for q, dq in enumerate(cv.critical_group_dims):
                out[q] += dq
    return tuple(out)


def band_homology_dims(
    X: SimplicialComplex, f: ScalarField, a: float, b: float, p: int = 2
) -> tuple[int, ...]:
    """Ordinary relative homology dimensions of the sublevel pair (f_b, f_a)."""
    pair = PairOfSpaces(sublevel_complex(X, f, b), sublevel_complex(X, f, a))
    ph = pair_homology(pair, p, reduced=False)
    return tuple(ph.dim(q) for q in range(X.dimension + 1))


def weak_morse_check(X: SimplicialComplex, f: ScalarField, a: float, b: float, p: int = 2) -> bool:
    """Weak Morse inequalities for the band: lower-star counts dominate the
    relative homology of (f_b, f_a) in every degree."""
    mu = lower_star_numbers(X, f, a, b, p)
    hq = band_homology_dims(X, f, a, b, p)
    return all(m >= h for m, h in zip(mu, hq))
