"""Region specifications: sup-norm geometric primitives rasterized onto grids.

A RegionSpec is an expression tree over sup-norm primitives (balls, sphere
shells, subspace slabs, segments, box-boundary shells, half-spaces) and the
combinators union, intersection, difference, and translate. Each spec
evaluates to a total vertex predicate and rasterizes to the full subcomplex
on the satisfying vertices.

Lower-dimensional sets (spheres, subspaces) are thickened to at least one
grid step so their rasterizations are nonempty full subcomplexes that
deformation-retract to the intended sets. Sphere shells occupy the half-open
radius window [r, r + thickness), which on aligned grids is exactly the
single lattice layer at sup-distance r.

Unbounded sets (whole space, half-spaces, subspace slabs) cannot fit inside
a finite box; they are clipped at the box boundary and carry a `clipped`
flag. Bounded specs must keep a one-cell margin from the box boundary,
enforced at rasterization time.

The canonical textual form is a nested JSON object tree; see to_json /
from_json. Coordinate axes are 0-based everywhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .complexes import COORD_TOL, FullSubcomplex, SimplicialComplex
from .errors import ValidationError

PRIMITIVES = (
    "sup_ball",
    "sup_sphere_shell",
    "subspace_slab",
    "segment",
    "box",
    "box_boundary_shell",
    "half_space",
    "whole_space",
    "empty",
)
COMBINATORS = ("union", "intersection", "difference", "translate")


@dataclass(frozen=True)
class RegionSpec:
    kind: str
    params: tuple = ()
    children: tuple["RegionSpec", ...] = ()
    clipped: bool = False

    # -- evaluation -----------------------------------------------------------

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership mask for an (n, d) array of coordinates."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        k = self.kind
        if k == "sup_ball":
            center, r = self.params
            return np.abs(pts - np.asarray(center)).max(axis=1) <= r + COORD_TOL
        if k == "sup_sphere_shell":
            center, r, t = self.params
            dist = np.abs(pts - np.asarray(center)).max(axis=1)
            return (dist >= r - COORD_TOL) & (dist < r + t - COORD_TOL)
        if k == "subspace_slab":
            coords, w = self.params
            fixed = [i for i in range(pts.shape[1]) if i not in coords]
            if not fixed:
                return np.ones(pts.shape[0], dtype=bool)
            return np.abs(pts[:, fixed]).max(axis=1) <= w + COORD_TOL
        if k == "segment":
            p0, p1, w = self.params
            p0 = np.asarray(p0, dtype=np.float64)
            p1 = np.asarray(p1, dtype=np.float64)
            delta = p1 - p0
            axes = np.nonzero(np.abs(delta) > COORD_TOL)[0]
            off = np.abs(pts - p0)
            if axes.size == 1:
                a = int(axes[0])
                lo, hi = sorted((p0[a], p1[a]))
                along = np.maximum(np.maximum(lo - pts[:, a], pts[:, a] - hi), 0.0)
                off[:, a] = along
            return off.max(axis=1) <= w + COORD_TOL
        if k == "box":
            lo, hi = self.params
            lo = np.asarray(lo, dtype=np.float64)
            hi = np.asarray(hi, dtype=np.float64)
            return ((pts >= lo - COORD_TOL) & (pts <= hi + COORD_TOL)).all(axis=1)
        if k == "box_boundary_shell":
            lo, hi, t = self.params
            lo = np.asarray(lo, dtype=np.float64)
            hi = np.asarray(hi, dtype=np.float64)
            inside = ((pts >= lo - COORD_TOL) & (pts <= hi + COORD_TOL)).all(axis=1)
            # degenerate axes pin a coordinate; they carry no boundary notion
            wide = hi - lo > COORD_TOL
            gap = np.minimum(pts[:, wide] - lo[wide], hi[wide] - pts[:, wide]).min(axis=1)
            return inside & (gap < t - COORD_TOL)
        if k == "half_space":
            axis, bound, direction = self.params
            if direction == "ge":
                return pts[:, axis] >= bound - COORD_TOL
            return pts[:, axis] <= bound + COORD_TOL
        if k == "whole_space":
            return np.ones(pts.shape[0], dtype=bool)
        if k == "empty":
            return np.zeros(pts.shape[0], dtype=bool)
        if k == "union":
            out = np.zeros(pts.shape[0], dtype=bool)
            for c in self.children:
                out |= c.contains(pts)
            return out
        if k == "intersection":
            out = np.ones(pts.shape[0], dtype=bool)
            for c in self.children:
                out &= c.contains(pts)
            return out
        if k == "difference":
            a, b = self.children
            return a.contains(pts) & ~b.contains(pts)
        if k == "translate":
            (offset,) = self.params
            return self.children[0].contains(pts - np.asarray(offset))
        raise ValidationError(f"unknown region kind {k!r}")

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        k = self.kind
        if k == "box":
            lo, hi = self.params
            return {"kind": k, "low": list(lo), "high": list(hi)}
        if k == "sup_ball":
            center, r = self.params
            return {"kind": k, "center": list(center), "radius": r}
        if k == "sup_sphere_shell":
            center, r, t = self.params
            return {"kind": k, "center": list(center), "radius": r, "thickness": t}
        if k == "subspace_slab":
            coords, w = self.params
            return {"kind": k, "coords": sorted(coords), "half_width": w}
        if k == "segment":
            p0, p1, w = self.params
            return {"kind": k, "start": list(p0), "end": list(p1), "half_width": w}
        if k == "box_boundary_shell":
            lo, hi, t = self.params
            return {"kind": k, "low": list(lo), "high": list(hi), "thickness": t}
        if k == "half_space":
            axis, bound, direction = self.params
            return {"kind": k, "axis": axis, "bound": bound, "direction": direction}
        if k in ("whole_space", "empty"):
            return {"kind": k}
        if k == "translate":
            (offset,) = self.params
            return {"kind": k, "offset": list(offset), "child": self.children[0].to_json()}
        if k == "difference":
            a, b = self.children
            return {"kind": k, "minuend": a.to_json(), "subtrahend": b.to_json()}
        return {"kind": k, "children": [c.to_json() for c in self.children]}

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _number(obj, what):
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        raise ValidationError(f"{what} must be a number, got {obj!r}")
    return float(obj)


def _point(obj, what):
    if not isinstance(obj, (list, tuple)) or not obj:
        raise ValidationError(f"{what} must be a nonempty coordinate list")
    return tuple(_number(v, f"{what} entry") for v in obj)


def from_json(obj) -> RegionSpec:
    """Parse the canonical nested-object form of a region spec."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("region spec must be an object with a 'kind'")
    k = obj["kind"]
    if k == "box":
        return box(_point(obj.get("low"), "low"), _point(obj.get("high"), "high"))
    if k == "sup_ball":
        return sup_ball(_point(obj.get("center"), "center"), _number(obj.get("radius"), "radius"))
    if k == "sup_sphere_shell":
        return sup_sphere_shell(
            _point(obj.get("center"), "center"),
            _number(obj.get("radius"), "radius"),
            _number(obj.get("thickness"), "thickness"),
        )
    if k == "subspace_slab":
        coords = obj.get("coords")
        if not isinstance(coords, list):
            raise ValidationError("subspace_slab needs a list of free coordinate axes")
        return subspace_slab(frozenset(int(c) for c in coords), _number(obj.get("half_width"), "half_width"))
    if k == "segment":
        return segment(
            _point(obj.get("start"), "start"),
            _point(obj.get("end"), "end"),
            _number(obj.get("half_width"), "half_width"),
        )
    if k == "box_boundary_shell":
        return box_boundary_shell(
            _point(obj.get("low"), "low"),
            _point(obj.get("high"), "high"),
            _number(obj.get("thickness"), "thickness"),
        )
    if k == "half_space":
        direction = obj.get("direction")
        if direction not in ("ge", "le"):
            raise ValidationError("half_space direction must be 'ge' or 'le'")
        return half_space(int(obj.get("axis", -1)), _number(obj.get("bound"), "bound"), direction)
    if k == "whole_space":
        return whole_space()
    if k == "empty":
        return empty_region()
    if k == "union" or k == "intersection":
        children = obj.get("children")
        if not isinstance(children, list) or not children:
            raise ValidationError(f"{k} needs a nonempty list of children")
        parsed = [from_json(c) for c in children]
        return union(*parsed) if k == "union" else intersection(*parsed)
    if k == "difference":
        return difference(from_json(obj.get("minuend")), from_json(obj.get("subtrahend")))
    if k == "translate":
        return translate(from_json(obj.get("child")), _point(obj.get("offset"), "offset"))
    raise ValidationError(f"unknown region kind {k!r}")


# -- primitive constructors -----------------------------------------------------


def box(low, high) -> RegionSpec:
    """Axis-aligned product of closed intervals; equal bounds pin an axis."""
    lo = _point(low, "low")
    hi = _point(high, "high")
    if len(lo) != len(hi) or any(l > h for l, h in zip(lo, hi)):
        raise ValidationError("box bounds must satisfy low <= high componentwise")
    return RegionSpec("box", (lo, hi))


def sup_ball(center, radius) -> RegionSpec:
    r = _number(radius, "radius")
    if r < 0:
        raise ValidationError("ball radius must be nonnegative")
    return RegionSpec("sup_ball", (_point(center, "center"), r))


def sup_sphere_shell(center, radius, thickness) -> RegionSpec:
    r = _number(radius, "radius")
    t = _number(thickness, "thickness")
    if r <= 0 or t <= 0:
        raise ValidationError("sphere radius and shell thickness must be positive")
    return RegionSpec("sup_sphere_shell", (_point(center, "center"), r, t))


def subspace_slab(coords: Iterable[int], half_width) -> RegionSpec:
    w = _number(half_width, "half_width")
    if w < 0:
        raise ValidationError("slab half-width must be nonnegative")
    return RegionSpec("subspace_slab", (frozenset(int(c) for c in coords), w), clipped=True)


def segment(p0, p1, half_width) -> RegionSpec:
    a = _point(p0, "start")
    b = _point(p1, "end")
    if len(a) != len(b):
        raise ValidationError("segment endpoints have different dimensions")
    w = _number(half_width, "half_width")
    moving = [i for i in range(len(a)) if abs(a[i] - b[i]) > COORD_TOL]
    if len(moving) > 1:
        raise ValidationError("only axis-parallel (or degenerate) segments are supported")
    return RegionSpec("segment", (a, b, w))


def box_boundary_shell(low, high, thickness) -> RegionSpec:
    lo = _point(low, "low")
    hi = _point(high, "high")
    if len(lo) != len(hi) or any(l > h for l, h in zip(lo, hi)):
        raise ValidationError("box bounds must satisfy low <= high componentwise")
    if all(h - l <= COORD_TOL for l, h in zip(lo, hi)):
        raise ValidationError("box boundary needs at least one non-degenerate axis")
    t = _number(thickness, "thickness")
    if t <= 0:
        raise ValidationError("shell thickness must be positive")
    return RegionSpec("box_boundary_shell", (lo, hi, t))


def half_space(axis: int, bound, direction: str = "ge") -> RegionSpec:
    if direction not in ("ge", "le"):
        raise ValidationError("half_space direction must be 'ge' or 'le'")
    if axis < 0:
        raise ValidationError("half_space axis must be a nonnegative coordinate index")
    return RegionSpec("half_space", (int(axis), _number(bound, "bound"), direction), clipped=True)


def whole_space() -> RegionSpec:
    return RegionSpec("whole_space", clipped=True)


def empty_region() -> RegionSpec:
    return RegionSpec("empty")


# -- combinators -------------------------------------------------------------------


def union(*specs: RegionSpec) -> RegionSpec:
    if not specs:
        raise ValidationError("union needs at least one operand")
    return RegionSpec("union", children=tuple(specs), clipped=any(s.clipped for s in specs))


def intersection(*specs: RegionSpec) -> RegionSpec:
    if not specs:
        raise ValidationError("intersection needs at least one operand")
    return RegionSpec("intersection", children=tuple(specs), clipped=all(s.clipped for s in specs))


def difference(a: RegionSpec, b: RegionSpec) -> RegionSpec:
    return RegionSpec("difference", children=(a, b), clipped=a.clipped)


def translate(spec: RegionSpec, offset) -> RegionSpec:
    return RegionSpec("translate", (_point(offset, "offset"),), (spec,), clipped=spec.clipped)


def rasterize(spec: RegionSpec, X: SimplicialComplex) -> FullSubcomplex:
    """Full subcomplex of X on the vertices satisfying the spec.

    Non-clipped specs must keep a one-cell margin from the box boundary so
    that complements capture the intended homotopy type; violating vertices
    raise a validation error. Clipped specs model unbounded sets and are cut
    off at the box boundary by construction.
    """
    if X.domain is None:
        raise ValidationError("rasterization needs a complex built from a grid domain")
    d = X.domain.dimension
    probe = spec.contains(np.zeros((1, d)))
    if probe.shape != (1,):
        raise ValidationError("region spec does not evaluate to a vertex predicate")
    mask = spec.contains(X.coords)
    if not spec.clipped and mask.any():
        limit = X.domain.extent - X.domain.resolution + COORD_TOL
        worst = np.abs(X.coords[mask]).max()
        if worst > limit:
            raise ValidationError(
                "region touches the domain boundary (sup-norm reach "
                f"{worst:.6g} > {limit:.6g}); enlarge the box or mark the spec clipped"
            )
    return FullSubcomplex(X, mask)
