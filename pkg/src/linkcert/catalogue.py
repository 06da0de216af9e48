"""The catalogue of model linking scenarios.

Each entry realizes one classical linking configuration built from a direct
sum split of the ambient coordinates: the first k axes span the "horizontal"
factor and the next m axes the "vertical" one. Balls and spheres of a factor
are rasterized as the sup-norm ball or single-layer shell intersected with a
half-step slab pinning the complementary coordinates; unbounded sets
(subspaces, half-space sums, the whole space) are clipped at the box.

Every scenario expects linking rank exactly 1 in one specific degree and 0
elsewhere, independent of the coefficient field. The eleven names:

  points_vs_sphere                       {0, e} vs (whole, sphere), degree 0
  sphere_vs_subspace                     factor sphere vs (whole, subspace), degree k-1
  box_shell_vs_factor_sphere             product-box shell vs (whole, factor sphere), degree k
  segment_vs_sphere                      (segment, endpoints) vs sphere, degree 1
  ball_pair_vs_subspace                  (ball, sphere) vs subspace, degree k
  box_pair_vs_factor_sphere              (box, shell) vs factor sphere, degree k+1
  points_vs_ball_pair                    {0, e} vs (ball, sphere), degree 0
  sphere_vs_halfspace_pair               factor sphere vs (subspace + half-ray, subspace), degree k-1
  box_shell_vs_ball_pair                 product-box shell vs (factor ball, factor sphere), degree k
  shifted_ball_pair_vs_halfspace_pair    lifted (ball, sphere) vs (subspace + half-ray, subspace), degree k
  ball_pair_vs_ball_pair                 (ball, sphere) vs (factor ball, factor sphere), degree k
"""
from __future__ import annotations

from dataclasses import dataclass

from .complexes import DEFAULT_SIMPLEX_BUDGET, GridDomain, build_grid_complex
from .errors import ValidationError
from .homology import LinkingReport, link_rank
from .regions import (
    RegionSpec,
    box,
    box_boundary_shell,
    empty_region,
    half_space,
    intersection,
    rasterize,
    segment,
    subspace_slab,
    sup_ball,
    sup_sphere_shell,
    translate,
    union,
    whole_space,
)

CATALOGUE_NAMES = (
    "points_vs_sphere",
    "sphere_vs_subspace",
    "box_shell_vs_factor_sphere",
    "segment_vs_sphere",
    "ball_pair_vs_subspace",
    "box_pair_vs_factor_sphere",
    "points_vs_ball_pair",
    "sphere_vs_halfspace_pair",
    "box_shell_vs_ball_pair",
    "shifted_ball_pair_vs_halfspace_pair",
    "ball_pair_vs_ball_pair",
)

_SIMPLE = {"points_vs_sphere", "segment_vs_sphere", "points_vs_ball_pair"}
_LIFTED = {"shifted_ball_pair_vs_halfspace_pair"}

#: Distinguished outer point: sup-norm 2, twice the unit radius.
_E_REACH = 2.0


def factor_ball(d: int, axes, radius: float, h: float, center=None) -> RegionSpec:
    """Ball of the coordinate factor spanned by `axes`, pinned to the origin
    of the complementary coordinates. Needs radius > h/2 for the sup-norm
    restriction to agree with the factor norm, which holds throughout."""
    c = list(center) if center is not None else [0.0] * d
    return intersection(sup_ball(c, radius), subspace_slab(axes, h / 2))


def factor_sphere(d: int, axes, radius: float, h: float, center=None) -> RegionSpec:
    """Single-layer sphere shell of the factor spanned by `axes`."""
    c = list(center) if center is not None else [0.0] * d
    return intersection(sup_sphere_shell(c, radius, h), subspace_slab(axes, h / 2))


def _product_box(d: int, k: int, e_axis: int) -> tuple[tuple, tuple]:
    """Bounds of the box: unit ball of the first k axes times [0, 2] along
    e_axis, degenerate elsewhere."""
    lo = [0.0] * d
    hi = [0.0] * d
    for i in range(k):
        lo[i], hi[i] = -1.0, 1.0
    lo[e_axis], hi[e_axis] = 0.0, 2.0
    return tuple(lo), tuple(hi)


def _two_points(d: int) -> RegionSpec:
    origin = [0.0] * d
    outer = [0.0] * d
    outer[0] = _E_REACH
    return union(sup_ball(origin, 0.0), sup_ball(outer, 0.0))


@dataclass(frozen=True)
class CatalogueScenario:
    """A fully specified linking scenario with its expected verdict."""

    name: str
    dimension: int
    k: int | None
    m: int | None
    extent: float
    resolution: float
    b_spec: RegionSpec
    a_spec: RegionSpec
    q_spec: RegionSpec
    p_spec: RegionSpec
    expected_degree: int
    expected_rank: int = 1

    def domain(self, extent: float | None = None) -> GridDomain:
        return GridDomain(self.dimension, extent if extent is not None else self.extent, self.resolution)

    def build(self, extent: float | None = None, budget: int | None = None):
        """Rasterize the four regions; returns (X, B, A, Q, P)."""
        X = build_grid_complex(self.domain(extent), budget=budget)
        return (
            X,
            rasterize(self.b_spec, X),
            rasterize(self.a_spec, X),
            rasterize(self.q_spec, X),
            rasterize(self.p_spec, X),
        )

    def run(self, p: int = 2, extent: float | None = None, budget: int | None = None) -> LinkingReport:
        X, B, A, Q, P = self.build(extent=extent, budget=budget)
        return link_rank(X, B, A, Q, P, p)

    def matches_expectation(self, report: LinkingReport, degree_cap: int = 3) -> bool:
        """Rank 1 exactly in the expected degree, 0 in all other degrees."""
        if not report.inclusion_ok:
            return False
        for q in range(min(report.q_max, max(degree_cap, self.expected_degree)) + 1):
            want = self.expected_rank if q == self.expected_degree else 0
            if report.betas[q] != want:
                return False
        return True


def _build_specs(name: str, d: int, k: int | None, m: int | None, h: float):
    e1 = tuple(range(k)) if k else ()
    e2 = tuple(range(k, k + m)) if k and m else ()
    empty = empty_region()
    whole = whole_space()

    if name == "points_vs_sphere":
        return _two_points(d), empty, whole, sup_sphere_shell([0.0] * d, 1.0, h), 0
    if name == "segment_vs_sphere":
        p1 = [0.0] * d
        p1[0] = _E_REACH
        seg = segment([0.0] * d, p1, 0.0)
        return seg, _two_points(d), sup_sphere_shell([0.0] * d, 1.0, h), empty, 1
    if name == "points_vs_ball_pair":
        return (
            _two_points(d),
            empty,
            sup_ball([0.0] * d, 1.0),
            sup_sphere_shell([0.0] * d, 1.0, h),
            0,
        )
    if name == "sphere_vs_subspace":
        return factor_sphere(d, e1, 1.0, h), empty, whole, subspace_slab(e2, h / 2), k - 1
    if name == "ball_pair_vs_subspace":
        return (
            factor_ball(d, e1, 1.0, h),
            factor_sphere(d, e1, 1.0, h),
            subspace_slab(e2, h / 2),
            empty,
            k,
        )
    if name == "sphere_vs_halfspace_pair":
        ray_axis = e1[0]
        q_spec = intersection(
            subspace_slab(e2 + (ray_axis,), h / 2), half_space(ray_axis, 0.0, "ge")
        )
        return factor_sphere(d, e1, 1.0, h), empty, q_spec, subspace_slab(e2, h / 2), k - 1
    if name == "ball_pair_vs_ball_pair":
        return (
            factor_ball(d, e1, 1.0, h),
            factor_sphere(d, e1, 1.0, h),
            factor_ball(d, e2, 1.0, h),
            factor_sphere(d, e2, 1.0, h),
            k,
        )
    if name in ("box_shell_vs_factor_sphere", "box_pair_vs_factor_sphere", "box_shell_vs_ball_pair"):
        e_axis = e2[0]
        lo, hi = _product_box(d, k, e_axis)
        shell = box_boundary_shell(lo, hi, h)
        if name == "box_shell_vs_factor_sphere":
            return shell, empty, whole, factor_sphere(d, e2, 1.0, h), k
        if name == "box_pair_vs_factor_sphere":
            return box(lo, hi), shell, factor_sphere(d, e2, 1.0, h), empty, k + 1
        return shell, empty, factor_ball(d, e2, 1.0, h), factor_sphere(d, e2, 1.0, h), k
    if name == "shifted_ball_pair_vs_halfspace_pair":
        e_axis = d - 1
        shift = [0.0] * d
        shift[e_axis] = 1.0
        b_spec = translate(factor_ball(d, e1, 1.0, h), shift)
        a_spec = translate(factor_sphere(d, e1, 1.0, h), shift)
        q_spec = intersection(
            subspace_slab(e2 + (e_axis,), h / 2), half_space(e_axis, 0.0, "ge")
        )
        return b_spec, a_spec, q_spec, subspace_slab(e2, h / 2), k
    raise ValidationError(f"unknown catalogue scenario {name!r}")


def catalogue(
    name: str,
    k: int | None = None,
    m: int | None = None,
    dimension: int | None = None,
    extent: float = 4.0,
    resolution: float = 0.5,
    budget: int | None = None,
) -> CatalogueScenario:
    """Fully specified, parameter-checked catalogue scenario.

    Scenarios built from a factor split take k >= 1 and m >= 1 and live in
    dimension k+m (the lifted one in k+m+1); the three split-free scenarios
    take an explicit ambient dimension instead (default 2). Parameter
    combinations whose grid would blow the simplex budget are rejected; at
    the default box and resolution that limits the ambient dimension to 3,
    i.e. k + m <= 3 with k, m in {1, 2} (lifted: k = m = 1).
    """
    if name not in CATALOGUE_NAMES:
        raise ValidationError(
            f"unknown scenario {name!r}; available: {', '.join(CATALOGUE_NAMES)}"
        )
    budget = DEFAULT_SIMPLEX_BUDGET if budget is None else budget
    if name in _SIMPLE:
        if k is not None or m is not None:
            raise ValidationError(f"scenario {name!r} takes an ambient dimension, not k/m")
        d = 2 if dimension is None else dimension
        if d < 1:
            raise ValidationError("ambient dimension must be at least 1")
        k_eff = m_eff = None
    else:
        if k is None or m is None:
            raise ValidationError(f"scenario {name!r} needs both k and m (each >= 1)")
        if k < 1 or m < 1:
            raise ValidationError(
                "factor dimensions must satisfy k >= 1 and m >= 1; k = 0 is not a valid split"
            )
        d = k + m + (1 if name in _LIFTED else 0)
        if dimension is not None and dimension != d:
            raise ValidationError(
                f"scenario {name!r} with k={k}, m={m} lives in dimension {d}, not {dimension}"
            )
        k_eff, m_eff = k, m
    if extent < _E_REACH + 2 * resolution:
        raise ValidationError(
            f"extent {extent} leaves no margin around regions reaching sup-norm {_E_REACH}"
        )
    domain = GridDomain(d, extent, resolution)
    total = domain.total_simplex_count
    if total > budget:
        raise ValidationError(
            f"scenario {name!r} at k={k}, m={m} needs a dimension-{d} grid with "
            f"{total} simplices, over the budget of {budget}; supported ranges at "
            f"extent {extent}, resolution {resolution} keep the ambient dimension <= 3 "
            "(k, m in {1, 2} with k + m <= 3; lifted scenario: k = m = 1)"
        )
    b_spec, a_spec, q_spec, p_spec, q_star = _build_specs(name, d, k_eff, m_eff, resolution)
    return CatalogueScenario(
        name=name,
        dimension=d,
        k=k_eff,
        m=m_eff,
        extent=extent,
        resolution=resolution,
        b_spec=b_spec,
        a_spec=a_spec,
        q_spec=q_spec,
        p_spec=p_spec,
        expected_degree=q_star,
    )


def supported_parameterizations(
    extent: float = 4.0, resolution: float = 0.5, budget: int | None = None
) -> list[CatalogueScenario]:
    """Every catalogue scenario at every (k, m) within the simplex budget."""
    out = []
    for name in CATALOGUE_NAMES:
        if name in _SIMPLE:
            out.append(catalogue(name, extent=extent, resolution=resolution, budget=budget))
            continue
        for k in (1, 2):
            for m in (1, 2):
                try:
                    out.append(
                        catalogue(
                            name, k=k, m=m, extent=extent, resolution=resolution, budget=budget
                        )
                    )
                except ValidationError:
                    continue
    return out
