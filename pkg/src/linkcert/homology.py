"""Reduced relative homology, induced-map ranks, and linking decisions.

The central question answered here: given four full subcomplexes B, A, Q, P
of an ambient complex X with (B, A) contained in (X minus P, X minus Q), what
is the rank of the inclusion-induced map on reduced homology in each degree?
A positive rank beta in degree q is exactly the statement that (B, A)
(q, beta)-links (Q, P) in X.

Conventions: homology of a pair with nonempty small space is ordinary
relative homology; a pair with empty small space is, under the reduced
convention, the augmented complex of the big space, with the homology of the
empty space being one-dimensional in degree -1.

The induced rank is computed at chain level: a homology basis of the source
is extracted by column reduction of its relative boundary matrices (with
combination tracking and clearing), the representatives are pushed through
the identity-on-chains inclusion, and the pushed cycles are reduced against
the target's boundary pivot columns; the number of survivors is the rank.
Degree 0 short-circuits through connected-component bookkeeping.
"""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .complexes import FullSubcomplex, SimplicialComplex, full_subcomplex
from .errors import InternalConsistencyError, PreconditionError, ValidationError
from .gf import check_prime, kernel_cycles, pivot_space


@dataclass(frozen=True)
class PairOfSpaces:
    """An ordered topological pair (big, small) of full subcomplexes."""

    big: FullSubcomplex
    small: FullSubcomplex

    def __post_init__(self):
        if self.small.parent is not self.big.parent:
            raise ValidationError("pair members live in different parent complexes")
        if not self.small.is_subset_of(self.big):
            raise ValidationError("the small space of a pair must be contained in the big one")

    @property
    def parent(self) -> SimplicialComplex:
        return self.big.parent


def space_pair(big: FullSubcomplex, small: FullSubcomplex | None = None) -> PairOfSpaces:
    """A pair (big, empty) when no small space is given."""
    if small is None:
        small = FullSubcomplex(big.parent, np.zeros(big.parent.vertex_count, dtype=bool))
    return PairOfSpaces(big, small)


class _Components:
    """Connected components of the relative 0-skeleton.

    A component is grounded when one of its vertices is joined by an edge to
    the small space; grounded components die in relative homology.
    """

    def __init__(self, labels: np.ndarray, reps: list[int], grounded: list[bool]):
        self.labels = labels          # per relative vertex: component number
        self.reps = reps              # per component: least parent vertex id
        self.grounded = grounded

    @property
    def count(self) -> int:
        return len(self.reps)

    @property
    def ungrounded(self) -> list[int]:
        return [c for c, g in enumerate(self.grounded) if not g]


class PairHomology:
    """Lazy chain-level reductions for one pair over one prime field.

    All boundary matrices are relative: both rows and columns are indexed by
    the simplices of the big space that are not in the small one, in the
    parent's deterministic order.
    """

    def __init__(self, pair: PairOfSpaces, p: int, reduced: bool = True):
        check_prime(p)
        self.pair = pair
        self.parent = pair.parent
        self.p = p
        self.reduced = reduced
        self.rel: list[np.ndarray] = []
        for q in range(self.parent.dimension + 1):
            self.rel.append(
                np.setdiff1d(pair.big.rows[q], pair.small.rows[q], assume_unique=True)
            )
        self.augmented = reduced and pair.small.is_empty
        self._in_rel: dict[int, np.ndarray] = {}
        self._piv: dict[int, object] = {}
        self._rank_b: dict[int, int] = {}
        self._components: _Components | None = None
        self._basis: dict[int, list[dict[int, int]]] = {}

    # -- chain bookkeeping ---------------------------------------------------

    def n(self, q: int) -> int:
        if q == -1:
            return 1 if self.augmented else 0
        if 0 <= q < len(self.rel):
            return int(self.rel[q].shape[0])
        return 0

    def _in_rel_mask(self, q: int) -> np.ndarray:
        mask = self._in_rel.get(q)
        if mask is None:
            mask = np.zeros(self.parent.simplex_count(q), dtype=bool)
            if self.n(q):
                mask[self.rel[q]] = True
            self._in_rel[q] = mask
        return mask

    def _column_data(self, q: int):
        """Flattened relative boundary columns of degree q >= 1:
        (indptr, local rows, signs) over the relative bases."""
        rel_q = self.rel[q]
        if rel_q.size == 0:
            return np.zeros(1, dtype=np.int64), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        faces = self.parent.faces(q)[rel_q]
        valid = self._in_rel_mask(q - 1)[faces]
        local = np.searchsorted(self.rel[q - 1], faces)
        signs = np.resize(np.array([1, -1], dtype=np.int64), q + 1)
        signs = np.broadcast_to(signs, faces.shape)
        flat_valid = valid.ravel()
        indptr = np.concatenate([[0], np.cumsum(valid.sum(axis=1))]).astype(np.int64)
        return indptr, local.ravel()[flat_valid], signs.ravel()[flat_valid]

    def _iter_columns(self, q: int, skip=frozenset(), indexed: bool = False):
        """Yield relative boundary columns of degree q (q >= 1) as reducer
        columns, optionally with their column index, skipping cleared ones."""
        indptr, rows, signs = self._column_data(q)
        ncols = indptr.shape[0] - 1
        if self.p == 2:
            for j in range(ncols):
                if j in skip:
                    continue
                col = set(rows[indptr[j]:indptr[j + 1]].tolist())
                yield (j, col) if indexed else col
        else:
            p = self.p
            for j in range(ncols):
                if j in skip:
                    continue
                col = {
                    int(r): int(s) % p
                    for r, s in zip(rows[indptr[j]:indptr[j + 1]], signs[indptr[j]:indptr[j + 1]])
                }
                yield (j, col) if indexed else col

    # -- components (degree 0 fast path) --------------------------------------

    def components(self) -> _Components:
        if self._components is not None:
            return self._components
        rel0 = self.rel[0]
        n0 = rel0.shape[0]
        local_of = {int(v): i for i, v in enumerate(rel0)}
        parent_up = list(range(n0))
        grounded_flag = [False] * n0

        def find(x: int) -> int:
            while parent_up[x] != x:
                parent_up[x] = parent_up[parent_up[x]]
                x = parent_up[x]
            return x

        def union(a: int, b: int):
            ra, rb = find(a), find(b)
            if ra != rb:
                if rb < ra:
                    ra, rb = rb, ra
                parent_up[rb] = ra
                grounded_flag[ra] = grounded_flag[ra] or grounded_flag[rb]

        if self.parent.dimension >= 1 and self.rel[1].size:
            edges = self.parent.simplices[1][self.rel[1]]
            in0 = self._in_rel_mask(0)
            both = in0[edges].all(axis=1)
            for u, v in edges[both]:
                union(local_of[int(u)], local_of[int(v)])
            for u, v in edges[~both]:
                w = int(u) if in0[int(u)] else int(v)
                grounded_flag[find(local_of[w])] = True

        labels = np.empty(n0, dtype=np.int64)
        comp_of_root: dict[int, int] = {}
        reps: list[int] = []
        grounded: list[bool] = []
        for i in range(n0):
            r = find(i)
            c = comp_of_root.get(r)
            if c is None:
                c = len(reps)
                comp_of_root[r] = c
                reps.append(int(rel0[i]))
                grounded.append(grounded_flag[r])
            labels[i] = c
        self._components = _Components(labels, reps, grounded)
        return self._components

    # -- ranks and dimensions --------------------------------------------------

    def pivot_space(self, q: int):
        """Pivot basis spanning the image of the relative boundary in degree q
        (columns live in degree q-1 chains, rows are local indices)."""
        space = self._piv.get(q)
        if space is not None:
            return space
        space = pivot_space(self.p)
        if 1 <= q <= self.parent.dimension and self.n(q):
            # clearing: columns that are pivot rows of the next boundary
            # reduce to zero and contribute nothing to the image
            nxt = self._piv.get(q + 1)
            skip = frozenset(nxt.pivots.keys()) if nxt is not None else frozenset()
            for col in self._iter_columns(q, skip=skip):
                space.add_column(col)
        elif q == 0 and self.augmented and self.n(0):
            space.add_column({0} if self.p == 2 else {0: 1})
        self._piv[q] = space
        self._rank_b[q] = space.rank
        return space

    def rank_boundary(self, q: int) -> int:
        """Exact rank of the relative boundary operator in degree q."""
        r = self._rank_b.get(q)
        if r is not None:
            return r
        if q <= 0:
            r = 1 if (q == 0 and self.augmented and self.n(0)) else 0
        elif q == 1:
            comps = self.components()
            r = self.n(0) - len(comps.ungrounded)
        elif q > self.parent.dimension:
            r = 0
        else:
            r = self.pivot_space(q).rank
        self._rank_b[q] = r
        return r

    def dim(self, q: int) -> int:
        """Dimension of the pair's homology in degree q (reduced convention
        when the small space is empty and this instance is reduced)."""
        if q < -1:
            raise ValidationError(f"homology degree must be >= -1, got {q}")
        if q == -1:
            return 1 if (self.augmented and self.n(0) == 0) else 0
        if q > self.parent.dimension:
            return 0
        if q == 0:
            comps = self.components()
            if self.augmented:
                return max(comps.count - 1, 0)
            if self.pair.small.is_empty:
                return comps.count
            return len(comps.ungrounded)
        z = self.n(q) - self.rank_boundary(q)
        return z - self.rank_boundary(q + 1)

    # -- homology bases ----------------------------------------------------------

    def basis_cycles(self, q: int) -> list[dict[int, int]]:
        """Cycle representatives of a homology basis in degree q, as chains
        keyed by parent simplex row indices."""
        cached = self._basis.get(q)
        if cached is not None:
            return cached
        if q < 0 or q > self.parent.dimension:
            return []
        if q == 0:
            comps = self.components()
            cycles: list[dict[int, int]] = []
            if self.augmented:
                if comps.count >= 2:
                    base = comps.reps[0]
                    for rep in comps.reps[1:]:
                        cycles.append({rep: 1, base: self.p - 1})
            elif self.pair.small.is_empty:
                cycles = [{rep: 1} for rep in comps.reps]
            else:
                cycles = [{comps.reps[c]: 1} for c in comps.ungrounded]
            self._basis[q] = cycles
            return cycles

        boundary = self.pivot_space(q + 1)
        skip = frozenset(boundary.pivots.keys())
        rank_q, combos = kernel_cycles(self._iter_columns(q, skip=skip, indexed=True), self.p)
        self._rank_b.setdefault(q, self.n(q) - len(combos) - len(skip))
        survivors = pivot_space(self.p)
        cycles = []
        rel_q = self.rel[q]
        for combo in combos:
            col = set(combo) if self.p == 2 else dict(combo)
            col = boundary.reduce(col)
            if not col:
                continue
            piv = survivors.add_column(col)
            if piv is None:
                continue
            kept = survivors.pivots[piv]
            if self.p == 2:
                cycles.append({int(rel_q[c]): 1 for c in sorted(kept)})
            else:
                cycles.append({int(rel_q[c]): v for c, v in sorted(kept.items())})
        expected = self.dim(q)
        if len(cycles) != expected:
            raise InternalConsistencyError(
                f"homology basis extraction found {len(cycles)} classes in degree {q}, expected {expected}"
            )
        self._basis[q] = cycles
        return cycles


_PAIR_CACHE: "OrderedDict[tuple, PairHomology]" = OrderedDict()
_PAIR_CACHE_LOCK = threading.Lock()
_PAIR_CACHE_SIZE = 8


def pair_homology(pair: PairOfSpaces, p: int, reduced: bool = True) -> PairHomology:
    """Shared, bounded cache of PairHomology instances."""
    key = (
        pair.parent.uid,
        pair.big.vertex_mask.tobytes(),
        pair.small.vertex_mask.tobytes(),
        p,
        reduced,
    )
    with _PAIR_CACHE_LOCK:
        hit = _PAIR_CACHE.get(key)
        if hit is not None:
            _PAIR_CACHE.move_to_end(key)
            return hit
    ph = PairHomology(pair, p, reduced)
    with _PAIR_CACHE_LOCK:
        _PAIR_CACHE[key] = ph
        while len(_PAIR_CACHE) > _PAIR_CACHE_SIZE:
            _PAIR_CACHE.popitem(last=False)
    return ph


def clear_pair_cache():
    with _PAIR_CACHE_LOCK:
        _PAIR_CACHE.clear()


@dataclass(frozen=True)
class HomologyBasis:
    """A homology basis: independent cycle representatives of one degree."""

    degree: int
    dimension: int
    cycles: tuple[Mapping[int, int], ...]


def homology_basis(pair: PairOfSpaces, q: int, p: int = 2) -> HomologyBasis:
    ph = pair_homology(pair, p)
    cycles = ph.basis_cycles(q) if q >= 0 else []
    return HomologyBasis(degree=q, dimension=ph.dim(q), cycles=tuple(cycles))


def reduced_homology_dim(pair: PairOfSpaces, q: int, p: int = 2) -> int:
    """Homology dimension of the pair: reduced homology of the big space when
    the small one is empty, ordinary relative homology otherwise."""
    if q < -1:
        raise ValidationError(f"homology degree must be >= -1, got {q}")
    return pair_homology(pair, p).dim(q)


def _validate_pair_inclusion(source: PairOfSpaces, target: PairOfSpaces):
    if source.parent is not target.parent:
        raise PreconditionError("source and target pairs live in different complexes")
    for name, s, t in (
        ("big", source.big, target.big),
        ("small", source.small, target.small),
    ):
        stray = s.vertex_mask & ~t.vertex_mask
        if stray.any():
            v = int(np.nonzero(stray)[0][0])
            coords = tuple(float(c) for c in source.parent.coords[v])
            raise PreconditionError(
                f"inclusion violated: vertex {v} at {coords} of the source {name} "
                f"space is missing from the target {name} space"
            )


def induced_map_rank(source: PairOfSpaces, target: PairOfSpaces, q: int, p: int = 2) -> int:
    """Rank of the inclusion-induced map on homology in degree q."""
    check_prime(p)
    if q < -1:
        raise ValidationError(f"homology degree must be >= -1, got {q}")
    _validate_pair_inclusion(source, target)
    S = pair_homology(source, p)
    T = pair_homology(target, p)
    if q == -1:
        return 1 if (S.dim(-1) == 1 and T.dim(-1) == 1) else 0
    if q > source.parent.dimension:
        return 0
    cycles = S.basis_cycles(q)
    if not cycles:
        return 0

    if q == 0:
        comps = T.components()
        in_rel = T._in_rel_mask(0)
        local = {int(v): i for i, v in enumerate(T.rel[0])}
        keep = (
            list(range(comps.count))
            if T.pair.small.is_empty
            else comps.ungrounded
        )
        col_of_comp = {c: i for i, c in enumerate(keep)}
        space = pivot_space(p)
        rank = 0
        for cy in cycles:
            vec: dict[int, int] = {}
            for v, coeff in cy.items():
                if not in_rel[v]:
                    continue
                comp = int(comps.labels[local[v]])
                j = col_of_comp.get(comp)
                if j is None:
                    continue
                nv = (vec.get(j, 0) + coeff) % p
                if nv:
                    vec[j] = nv
                else:
                    vec.pop(j, None)
            col = set(vec) if p == 2 else vec
            if col and space.add_column(col) is not None:
                rank += 1
        return rank

    boundary = T.pivot_space(q + 1)
    in_rel = T._in_rel_mask(q)
    rel_t = T.rel[q]
    survivors = pivot_space(p)
    rank = 0
    for cy in cycles:
        if p == 2:
            col = {int(np.searchsorted(rel_t, v)) for v in cy if in_rel[v]}
        else:
            col = {int(np.searchsorted(rel_t, v)): coeff for v, coeff in cy.items() if in_rel[v]}
        col = boundary.reduce(col)
        if col and survivors.add_column(col) is not None:
            rank += 1
    return rank


@dataclass(frozen=True)
class LinkingReport:
    """Per-degree ranks of the linking map, plus the inclusion verdict."""

    prime: int
    q_max: int
    inclusion_ok: bool
    betas: tuple[int, ...] | None
    reasons: tuple[str, ...] = ()
    provenance: Mapping[str, Mapping[str, object]] = field(default_factory=dict)

    def beta(self, q: int) -> int:
        if self.betas is None:
            raise ValidationError("report carries no ranks: inclusion does not hold")
        if not 0 <= q <= self.q_max:
            raise ValidationError(f"degree {q} outside reported range 0..{self.q_max}")
        return self.betas[q]


def _region_provenance(regions: Mapping[str, FullSubcomplex]):
    return {
        name: {"vertices": sub.vertex_count, "digest": sub.digest()}
        for name, sub in regions.items()
    }


def link_rank(
    X: SimplicialComplex,
    B: FullSubcomplex,
    A: FullSubcomplex,
    Q: FullSubcomplex,
    P: FullSubcomplex,
    p: int = 2,
) -> LinkingReport:
    """Decide whether (B, A) links (Q, P) in X and with which ranks.

    Verifies the inclusion hypotheses (B and P disjoint, A and Q disjoint,
    plus pair-ness of (B, A) and (Q, P)) at the simplex level; when they hold
    the report carries, for every degree up to dim X, the rank of the map
    from the homology of (B, A) into that of (X minus P, X minus Q).
    A failed hypothesis is a verdict (inclusion_ok False), not an error.
    """
    check_prime(p)
    for name, sub in (("B", B), ("A", A), ("Q", Q), ("P", P)):
        if sub.parent is not X:
            raise ValidationError(f"region {name} does not live in the ambient complex")
    reasons = []
    if not A.is_subset_of(B):
        reasons.append("A is not contained in B")
    if not P.is_subset_of(Q):
        reasons.append("P is not contained in Q")
    if B.intersects(P):
        reasons.append("B intersects P")
    if A.intersects(Q):
        reasons.append("A intersects Q")
    prov = _region_provenance({"B": B, "A": A, "Q": Q, "P": P})
    if reasons:
        return LinkingReport(
            prime=p,
            q_max=X.dimension,
            inclusion_ok=False,
            betas=None,
            reasons=tuple(reasons),
            provenance=prov,
        )
    source = PairOfSpaces(B, A)
    target = PairOfSpaces(P.complement(), Q.complement())
    # descending degrees so each pivot space can clear the one below it
    betas_desc = [induced_map_rank(source, target, q, p) for q in range(X.dimension, -1, -1)]
    return LinkingReport(
        prime=p,
        q_max=X.dimension,
        inclusion_ok=True,
        betas=tuple(reversed(betas_desc)),
        reasons=(),
        provenance=prov,
    )


@dataclass(frozen=True)
class RankRuleCheck:
    """Outcome of one of the two rank-arithmetic rules."""

    degree: int
    beta: int
    delta: int
    mu: int

    @property
    def holds(self) -> bool:
        return self.delta >= self.beta or self.mu >= self.beta - self.delta


def check_sum_rule(
    X: SimplicialComplex,
    A: FullSubcomplex,
    B: FullSubcomplex,
    Q: FullSubcomplex,
    q: int,
    p: int = 2,
) -> RankRuleCheck:
    """Connecting-map rule: if A links (X, Q) with rank beta and A links
    (X, X minus B) with rank delta, then (B, A) links Q in degree q+1 with
    rank mu at least beta - delta."""
    if not A.is_subset_of(B):
        raise PreconditionError("sum rule requires A to be contained in B")
    whole = full_subcomplex(X, lambda _c: True)
    src_a = space_pair(A)
    beta = induced_map_rank(src_a, space_pair(Q.complement()), q, p)
    delta = induced_map_rank(src_a, space_pair(B), q, p)
    mu = induced_map_rank(
        PairOfSpaces(B, A), PairOfSpaces(whole, Q.complement()), q + 1, p
    )
    return RankRuleCheck(degree=q, beta=beta, delta=delta, mu=mu)


def check_composition_rule(
    X: SimplicialComplex,
    B: FullSubcomplex,
    Q: FullSubcomplex,
    P: FullSubcomplex,
    q: int,
    p: int = 2,
) -> RankRuleCheck:
    """Factoring rule: if B links (X, P) with rank beta and X minus Q links
    (X, P) with rank delta, then B links (Q, P) in degree q with rank mu at
    least beta - delta."""
    if not P.is_subset_of(Q):
        raise PreconditionError("composition rule requires P to be contained in Q")
    comp_p = P.complement()
    comp_q = Q.complement()
    beta = induced_map_rank(space_pair(B), space_pair(comp_p), q, p)
    delta = induced_map_rank(space_pair(comp_q), space_pair(comp_p), q, p)
    mu = induced_map_rank(space_pair(B), PairOfSpaces(comp_p, comp_q), q, p)
    return RankRuleCheck(degree=q, beta=beta, delta=delta, mu=mu)


def locality_check(
    X: SimplicialComplex,
    window,
    B: FullSubcomplex,
    A: FullSubcomplex,
    Q: FullSubcomplex,
    P: FullSubcomplex,
    p: int = 2,
) -> bool:
    """Whether linking computed inside the window equals linking in X.

    The window is a vertex-coordinate predicate; every region must lie inside
    it (this is the locality hypothesis), else a precondition error names the
    escaping region.
    """
    W = full_subcomplex(X, window)
    for name, sub in (("B", B), ("A", A), ("Q", Q), ("P", P)):
        if not sub.is_subset_of(W):
            raise PreconditionError(f"region {name} escapes the window")
    WC, vids = W.as_complex()
    remap = np.full(X.vertex_count, -1, dtype=np.int64)
    remap[vids] = np.arange(vids.shape[0])

    def restrict(sub: FullSubcomplex) -> FullSubcomplex:
        mask = np.zeros(WC.vertex_count, dtype=bool)
        mask[remap[sub.vertex_ids]] = True
        return FullSubcomplex(WC, mask)

    inner = link_rank(WC, restrict(B), restrict(A), restrict(Q), restrict(P), p)
    outer = link_rank(X, B, A, Q, P, p)
    if inner.inclusion_ok != outer.inclusion_ok:
        return False
    if not inner.inclusion_ok:
        return True
    top = max(inner.q_max, outer.q_max)

    def padded(r: LinkingReport):
        return tuple(r.betas[q] if q <= r.q_max else 0 for q in range(top + 1))

    return padded(inner) == padded(outer)
