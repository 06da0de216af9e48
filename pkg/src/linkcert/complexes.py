"""Grid-triangulated simplicial complexes and full subcomplexes.

The ambient space is a box [-N, N]^d carrying the Freudenthal (Kuhn)
triangulation: every grid cube of side h is subdivided into d! simplices
along monotone staircases. Every simplex of that triangulation is a base
lattice point z together with a strictly increasing chain of nonempty
0/1 increment vectors, which makes fully vectorized generation and exact
face lookup possible.

Vertex ids are the lexicographic ranks of their coordinate tuples and
simplices are stored per dimension as lexicographically sorted id rows,
so all indices are deterministic functions of the input domain.
"""
from __future__ import annotations

import hashlib
import itertools
import threading
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetError, ValidationError
from .gf import FieldMatrix, check_prime

#: Default cap on the total number of simplices a single complex may hold.
DEFAULT_SIMPLEX_BUDGET = 6_000_000

#: Comparison slack for predicates evaluated on floating-point lattice coords.
COORD_TOL = 1e-9

_uid_counter = itertools.count(1)


@lru_cache(maxsize=None)
def _subset_chains(d: int, q: int) -> tuple[tuple[frozenset, ...], ...]:
    """Strictly increasing chains of q nonempty subsets of range(d)."""
    if q == 0:
        return ((),)
    subsets = []
    for r in range(1, d + 1):
        for c in itertools.combinations(range(d), r):
            subsets.append(frozenset(c))
    out: list[tuple[frozenset, ...]] = []

    def rec(chain: list, last):
        if len(chain) == q:
            out.append(tuple(chain))
            return
        for s in subsets:
            if last is None or last < s:
                rec(chain + [s], s)

    rec([], None)
    return tuple(out)


@dataclass(frozen=True)
class GridDomain:
    """A box [-extent, extent]^dimension sampled at lattice pitch resolution."""

    dimension: int
    extent: float
    resolution: float

    def __post_init__(self):
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ValidationError(f"dimension must be a positive integer, got {self.dimension!r}")
        if not self.extent > 0:
            raise ValidationError(f"extent must be positive, got {self.extent!r}")
        if not self.resolution > 0:
            raise ValidationError(f"resolution must be positive, got {self.resolution!r}")
        ratio = self.extent / self.resolution
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValidationError(
                f"extent/resolution must be a positive integer, got {self.extent}/{self.resolution}"
            )

    @property
    def steps_per_halfaxis(self) -> int:
        return int(round(self.extent / self.resolution))

    @property
    def cells_per_axis(self) -> int:
        return 2 * self.steps_per_halfaxis

    @property
    def points_per_axis(self) -> int:
        return self.cells_per_axis + 1

    @property
    def vertex_count(self) -> int:
        return self.points_per_axis ** self.dimension

    def simplex_count(self, q: int) -> int:
        """Closed-form count of q-simplices in the triangulation."""
        d, n = self.dimension, self.cells_per_axis
        if q < 0 or q > d:
            return 0
        total = 0
        for chain in _subset_chains(d, q):
            top = len(chain[-1]) if chain else 0
            total += n ** top * (n + 1) ** (d - top)
        return total

    @property
    def total_simplex_count(self) -> int:
        return sum(self.simplex_count(q) for q in range(self.dimension + 1))


def _locate_rows(sorted_rows: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Positions of each query row inside a lex-sorted row array, -1 if absent."""
    nq = queries.shape[0]
    if nq == 0:
        return np.empty(0, dtype=np.int64)
    if sorted_rows.shape[0] == 0:
        return np.full(nq, -1, dtype=np.int64)
    k = sorted_rows.shape[1]
    top = int(max(sorted_rows.max(initial=0), queries.max(initial=0)))
    bits = max(top + 1, 2).bit_length()
    if bits * k <= 62:
        weights = np.array([1 << (bits * (k - 1 - i)) for i in range(k)], dtype=np.int64)
        keys = sorted_rows @ weights
        qkeys = queries @ weights
        pos = np.searchsorted(keys, qkeys)
        pos_c = np.minimum(pos, len(keys) - 1)
        ok = keys[pos_c] == qkeys
        return np.where(ok, pos_c, -1)
    # wide rows: fall back to a bytes-keyed dict
    width = k * sorted_rows.itemsize
    blob = np.ascontiguousarray(sorted_rows).tobytes()
    index = {blob[i * width:(i + 1) * width]: i for i in range(sorted_rows.shape[0])}
    qblob = np.ascontiguousarray(queries.astype(sorted_rows.dtype)).tobytes()
    return np.array(
        [index.get(qblob[i * width:(i + 1) * width], -1) for i in range(nq)], dtype=np.int64
    )


class SimplicialComplex:
    """Immutable finite simplicial complex with a graded, lex-sorted index."""

    def __init__(self, coords: np.ndarray, simplices: list[np.ndarray], domain: GridDomain | None = None):
        self.uid = next(_uid_counter)
        self.coords = np.ascontiguousarray(coords, dtype=np.float64)
        self.simplices = [np.ascontiguousarray(s, dtype=np.int64) for s in simplices]
        self.domain = domain
        while len(self.simplices) > 1 and self.simplices[-1].shape[0] == 0:
            self.simplices.pop()
        self._faces: dict[int, np.ndarray] = {}
        self._star: dict[int, list[tuple[int, np.ndarray]]] | None = None
        self._lock = threading.Lock()

    # -- shape -------------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    @property
    def vertex_count(self) -> int:
        return self.coords.shape[0]

    def simplex_count(self, q: int) -> int:
        if q < 0 or q > self.dimension:
            return 0
        return self.simplices[q].shape[0]

    @property
    def total_simplex_count(self) -> int:
        return sum(s.shape[0] for s in self.simplices)

    # -- structure ---------------------------------------------------------

    def faces(self, q: int) -> np.ndarray:
        """(n_q, q+1) array: entry [i, j] is the row in dimension q-1 of the
        face of simplex i obtained by dropping its j-th vertex."""
        if q < 1 or q > self.dimension:
            raise ValidationError(f"faces defined for 1 <= q <= {self.dimension}, got {q}")
        with self._lock:
            cached = self._faces.get(q)
        if cached is not None:
            return cached
        sq = self.simplices[q]
        out = np.empty((sq.shape[0], q + 1), dtype=np.int64)
        for j in range(q + 1):
            sub = np.delete(sq, j, axis=1)
            loc = _locate_rows(self.simplices[q - 1], sub)
            if loc.size and loc.min() < 0:
                raise ValidationError("complex is not closed: a face is missing")
            out[:, j] = loc
        with self._lock:
            self._faces[q] = out
        return out

    def locate(self, simplex) -> int:
        """Row index of a simplex given as a sorted vertex tuple, -1 if absent."""
        s = np.asarray(simplex, dtype=np.int64).reshape(1, -1)
        q = s.shape[1] - 1
        if q < 0 or q > self.dimension:
            return -1
        return int(_locate_rows(self.simplices[q], s)[0])

    def star_of_vertex(self, v: int) -> list[tuple[int, np.ndarray]]:
        """All simplices containing vertex v, as (dimension, row-ids) pairs."""
        if not 0 <= v < self.vertex_count:
            raise ValidationError(f"unknown vertex {v}")
        with self._lock:
            star = self._star
        if star is None:
            star = {}
            for q in range(1, self.dimension + 1):
                sq = self.simplices[q]
                if sq.size == 0:
                    continue
                rows = np.repeat(np.arange(sq.shape[0]), q + 1)
                verts = sq.ravel()
                order = np.argsort(verts, kind="stable")
                verts = verts[order]
                rows = rows[order]
                bounds = np.searchsorted(verts, np.arange(self.vertex_count + 1))
                for u in np.unique(verts):
                    star.setdefault(int(u), []).append((q, rows[bounds[u]:bounds[u + 1]]))
            with self._lock:
                self._star = star
        return star.get(v, [])

    def is_boundary_vertex(self, v: int) -> bool:
        """Whether the vertex lies on the face of the ambient box."""
        if self.domain is None:
            raise ValidationError("complex has no grid domain; boundary is undefined")
        c = self.coords[v]
        return bool(np.any(np.abs(np.abs(c) - self.domain.extent) <= COORD_TOL))

    # -- construction of derived complexes ----------------------------------

    @classmethod
    def from_simplices(cls, coords, simplices) -> "SimplicialComplex":
        """Build from arbitrary simplices (vertex-id tuples); closure is added."""
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords.reshape(-1, 1)
        closed: set[tuple[int, ...]] = set()
        stack = [tuple(sorted(int(v) for v in s)) for s in simplices]
        for s in stack:
            if len(set(s)) != len(s):
                raise ValidationError(f"simplex with repeated vertices: {s}")
        closed.update(stack)
        while stack:
            s = stack.pop()
            if len(s) == 1:
                continue
            for j in range(len(s)):
                f = s[:j] + s[j + 1:]
                if f not in closed:
                    closed.add(f)
                    stack.append(f)
        closed.update((v,) for v in range(coords.shape[0]))
        dim = max((len(s) - 1 for s in closed), default=0)
        arrays = []
        for q in range(dim + 1):
            rows = sorted(s for s in closed if len(s) == q + 1)
            arrays.append(np.asarray(rows, dtype=np.int64).reshape(len(rows), q + 1))
        return cls(coords, arrays)


class FullSubcomplex:
    """The full subcomplex of a parent complex on a set of its vertices.

    Contains exactly the parent simplices all of whose vertices belong to
    the vertex set; stores parent row indices per dimension.
    """

    def __init__(self, parent: SimplicialComplex, vertex_mask: np.ndarray):
        mask = np.asarray(vertex_mask, dtype=bool)
        if mask.shape != (parent.vertex_count,):
            raise ValidationError("vertex mask length does not match the parent complex")
        self.parent = parent
        self.vertex_mask = mask
        self.rows: list[np.ndarray] = []
        for q in range(parent.dimension + 1):
            sq = parent.simplices[q]
            if sq.size == 0:
                self.rows.append(np.empty(0, dtype=np.int64))
                continue
            keep = mask[sq].all(axis=1)
            self.rows.append(np.nonzero(keep)[0].astype(np.int64))

    @property
    def vertex_ids(self) -> np.ndarray:
        return np.nonzero(self.vertex_mask)[0]

    @property
    def vertex_count(self) -> int:
        return int(self.vertex_mask.sum())

    def simplex_count(self, q: int) -> int:
        if q < 0 or q >= len(self.rows):
            return 0
        return self.rows[q].shape[0]

    @property
    def total_simplex_count(self) -> int:
        return sum(r.shape[0] for r in self.rows)

    @property
    def is_empty(self) -> bool:
        return not self.vertex_mask.any()

    def complement(self) -> "FullSubcomplex":
        return FullSubcomplex(self.parent, ~self.vertex_mask)

    def intersects(self, other: "FullSubcomplex") -> bool:
        self._check_sibling(other)
        return bool((self.vertex_mask & other.vertex_mask).any())

    def is_subset_of(self, other: "FullSubcomplex") -> bool:
        self._check_sibling(other)
        return bool((self.vertex_mask & ~other.vertex_mask).sum() == 0)

    def _check_sibling(self, other: "FullSubcomplex"):
        if other.parent is not self.parent:
            raise ValidationError("subcomplexes live in different parent complexes")

    def as_complex(self) -> tuple[SimplicialComplex, np.ndarray]:
        """Promote to a standalone complex; returns it plus the parent vertex
        id of each new vertex (new ids preserve the parent's lex order)."""
        vids = self.vertex_ids
        remap = np.full(self.parent.vertex_count, -1, dtype=np.int64)
        remap[vids] = np.arange(vids.shape[0])
        arrays = []
        for q, rows in enumerate(self.rows):
            arrays.append(remap[self.parent.simplices[q][rows]])
        return SimplicialComplex(self.parent.coords[vids], arrays), vids

    def digest(self) -> str:
        return hashlib.sha256(self.vertex_ids.tobytes()).hexdigest()[:12]


# -- grid construction -------------------------------------------------------

_grid_cache: "OrderedDict[tuple, SimplicialComplex]" = OrderedDict()
_grid_cache_lock = threading.Lock()
_GRID_CACHE_SIZE = 4


def build_grid_complex(domain: GridDomain, budget: int | None = None) -> SimplicialComplex:
    """Freudenthal triangulation of the domain box.

    Vertex count is points_per_axis**d and top-simplex count is
    d! * cells_per_axis**d. Raises BudgetError before allocating anything
    if the total simplex count would exceed the budget.
    """
    budget = DEFAULT_SIMPLEX_BUDGET if budget is None else budget
    total = domain.total_simplex_count
    if total > budget:
        raise BudgetError(
            f"domain would hold {total} simplices, exceeding the budget of {budget}",
            count=total,
        )
    key = (domain.dimension, domain.steps_per_halfaxis, round(domain.resolution, 12))
    with _grid_cache_lock:
        cached = _grid_cache.get(key)
        if cached is not None:
            _grid_cache.move_to_end(key)
            return cached

    d = domain.dimension
    n = domain.cells_per_axis
    strides = np.array([(n + 1) ** (d - 1 - i) for i in range(d)], dtype=np.int64)

    idx = np.stack(
        np.meshgrid(*[np.arange(n + 1)] * d, indexing="ij"), axis=-1
    ).reshape(-1, d)
    coords = -domain.extent + idx.astype(np.float64) * domain.resolution

    simplices = []
    for q in range(d + 1):
        blocks = []
        for chain in _subset_chains(d, q):
            top = chain[-1] if chain else frozenset()
            axes = [np.arange(n if i in top else n + 1) for i in range(d)]
            grids = np.meshgrid(*axes, indexing="ij")
            base = sum(grids[i].ravel().astype(np.int64) * strides[i] for i in range(d))
            cols = [base]
            for s in chain:
                cols.append(base + int(sum(strides[i] for i in s)))
            blocks.append(np.stack(cols, axis=1))
        arr = np.concatenate(blocks, axis=0)
        order = np.lexsort(arr.T[::-1])
        simplices.append(np.ascontiguousarray(arr[order]))

    cx = SimplicialComplex(coords, simplices, domain=domain)
    with _grid_cache_lock:
        _grid_cache[key] = cx
        while len(_grid_cache) > _GRID_CACHE_SIZE:
            _grid_cache.popitem(last=False)
    return cx


def clear_grid_cache():
    with _grid_cache_lock:
        _grid_cache.clear()


def full_subcomplex(X: SimplicialComplex, predicate) -> FullSubcomplex:
    """Full subcomplex on the vertices whose coordinates satisfy the predicate.

    The predicate receives one coordinate row (a length-d float array) and
    must return a truth value; it is evaluated on every vertex.
    """
    mask = np.fromiter(
        (bool(predicate(X.coords[i])) for i in range(X.vertex_count)),
        dtype=bool,
        count=X.vertex_count,
    )
    return FullSubcomplex(X, mask)


def subcomplex_from_mask(X: SimplicialComplex, mask: np.ndarray) -> FullSubcomplex:
    return FullSubcomplex(X, mask)


def whole_complex(X: SimplicialComplex) -> FullSubcomplex:
    return FullSubcomplex(X, np.ones(X.vertex_count, dtype=bool))


def empty_subcomplex(X: SimplicialComplex) -> FullSubcomplex:
    return FullSubcomplex(X, np.zeros(X.vertex_count, dtype=bool))


def complement_subcomplex(X: SimplicialComplex, S: FullSubcomplex) -> FullSubcomplex:
    """Full subcomplex on the vertices of X not in S; shares no simplex with S."""
    if S.parent is not X:
        raise ValidationError("subcomplex does not belong to the given complex")
    return S.complement()


def boundary_matrix(C, q: int, p: int = 2) -> FieldMatrix:
    """Simplicial boundary operator of C in degree q over GF(p).

    C is a SimplicialComplex or FullSubcomplex. Rows are its (q-1)-simplices
    and columns its q-simplices, both in index order; the alternating signs
    are reduced mod p. Degree 0 yields a 0 x n_0 matrix and degree dim+1 an
    n_dim x 0 matrix, so that boundary(q) @ boundary(q+1) = 0 throughout.
    """
    check_prime(p)
    if isinstance(C, SimplicialComplex):
        parent = C
        rows_of = lambda k: np.arange(parent.simplex_count(k), dtype=np.int64)  # noqa: E731
        count_of = parent.simplex_count
    elif isinstance(C, FullSubcomplex):
        parent = C.parent
        rows_of = lambda k: C.rows[k] if 0 <= k < len(C.rows) else np.empty(0, dtype=np.int64)  # noqa: E731
        count_of = C.simplex_count
    else:
        raise ValidationError(f"cannot take boundaries of {type(C).__name__}")
    dim = parent.dimension
    if q < 0 or q > dim + 1:
        raise ValidationError(f"degree must satisfy 0 <= q <= dim+1 = {dim + 1}, got {q}")
    n_rows = count_of(q - 1) if q >= 1 else 0
    if q == 0 or q > dim or count_of(q) == 0:
        return FieldMatrix.from_columns(n_rows, [[] for _ in range(count_of(q))], p)
    member_rows = rows_of(q)
    faces = parent.faces(q)[member_rows]
    local = _locate_rows(rows_of(q - 1).reshape(-1, 1), faces.reshape(-1, 1)).reshape(faces.shape)
    if local.size and local.min() < 0:
        raise ValidationError("subcomplex is not closed under faces")
    signs = np.resize(np.array([1, -1], dtype=np.int64), q + 1)
    cols = []
    for i in range(faces.shape[0]):
        cols.append(list(zip(local[i].tolist(), signs.tolist())))
    return FieldMatrix.from_columns(n_rows, cols, p)
