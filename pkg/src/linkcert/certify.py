"""Critical-point certification through homological linking.

Two certifiers are provided. The band certifier pins the critical band
explicitly: given regular values a < b with (B, A) inside the sublevel pair
(f_b, f_a) and the sublevel pair avoiding (P, Q), a linking of rank beta in
degree q forces a critical vertex with value in (a, b) and nonzero degree-q
critical group. The auto-band certifier derives the band from the field
itself: when sup f(B) < inf f(P) and sup f(A) < inf f(Q), the certified
band is [inf f(Q), sup f(B)], widened by one vertex-value gap on each side
to absorb the discretization of inf and sup.

Both report every interior critical vertex in the band whose degree-q group
is nonzero. An empty witness list under a positive linking rank would
contradict the certified inequality chain and raises an internal
consistency error rather than passing silently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .catalogue import factor_ball, factor_sphere, _product_box
from .complexes import FullSubcomplex, GridDomain, SimplicialComplex, build_grid_complex
from .errors import InternalConsistencyError, PreconditionError, ValidationError
from .homology import PairOfSpaces, induced_map_rank
from .morse import CriticalVertex, is_regular_value, pl_critical_vertices, sublevel_complex
from .regions import (
    box,
    box_boundary_shell,
    empty_region,
    half_space,
    intersection,
    rasterize,
    subspace_slab,
)
from .scalarfield import ScalarField

_BAND_RULE_NOTE = (
    "band rule: [inf f(Q), sup f(B)] widened by one vertex-value gap per side"
)

MULTIPLICITY_SCENARIOS = ("saddle_pair", "perera_pair")


@dataclass(frozen=True)
class CriticalBandCertificate:
    """A certified band of critical values with its witnesses."""

    degree: int
    rank: int
    band_lo: float
    band_hi: float
    witnesses: tuple[CriticalVertex, ...]
    multiplicity_claim: int | None
    notes: tuple[str, ...] = ()

    def witness_values(self) -> tuple[float, ...]:
        return tuple(w.value for w in self.witnesses)


@dataclass(frozen=True)
class CertificationOutcome:
    """Verdict plus certificate for one certification run."""

    verdict: str  # certified | no-linking | hypotheses-not-met | inconsistency
    certificate: CriticalBandCertificate | None = None
    message: str = ""
    details: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


@dataclass(frozen=True)
class MultiplicityOutcome:
    scenario: str
    verdict: str
    certificates: tuple[CriticalBandCertificate, ...] = ()
    message: str = ""
    details: dict = field(default_factory=dict)


def _check_field(X: SimplicialComplex, f: ScalarField):
    if f.complex is not X:
        raise ValidationError("field was sampled on a different complex")


def _check_pairness(B, A, Q, P):
    if not A.is_subset_of(B):
        raise PreconditionError("inclusion violated: A is not contained in B")
    if not P.is_subset_of(Q):
        raise PreconditionError("inclusion violated: P is not contained in Q")


def _linking_rank(B, A, Q, P, q: int, p: int) -> int:
    source = PairOfSpaces(B, A)
    target = PairOfSpaces(P.complement(), Q.complement())
    return induced_map_rank(source, target, q, p)


def _collect_witnesses(X, f, lo, hi, q, p, closed_band: bool):
    witnesses = []
    band_criticals = []
    for cv in pl_critical_vertices(X, f, p):
        inside = (lo <= cv.value <= hi) if closed_band else (lo < cv.value < hi)
        if not inside:
            continue
        band_criticals.append(cv)
        if cv.critical_group_dims[q] > 0:
            witnesses.append(cv)
    return tuple(witnesses), band_criticals


def _certificate(X, f, lo, hi, q, p, beta, closed_band, notes=()):
    witnesses, band_criticals = _collect_witnesses(X, f, lo, hi, q, p, closed_band)
    if not witnesses:
        raise InternalConsistencyError(
            f"linking rank {beta} in degree {q} certifies a critical vertex with "
            f"value in [{lo}, {hi}], but none was found; the rasterization or the "
            "band bookkeeping is faulty"
        )
    claim = None
    if all(w.is_pl_nondegenerate for w in witnesses):
        claim = len(witnesses)
        if claim < beta:
            raise InternalConsistencyError(
                f"all witnesses are PL-nondegenerate yet only {claim} were found "
                f"for a rank-{beta} linking in degree {q}"
            )
    return CriticalBandCertificate(
        degree=q,
        rank=beta,
        band_lo=float(lo),
        band_hi=float(hi),
        witnesses=witnesses,
        multiplicity_claim=claim,
        notes=tuple(notes),
    )


def certify_linking_principle(
    X: SimplicialComplex,
    B: FullSubcomplex,
    A: FullSubcomplex,
    Q: FullSubcomplex,
    P: FullSubcomplex,
    f: ScalarField,
    a: float,
    b: float,
    q: int,
    p: int = 2,
) -> CertificationOutcome:
    """Certify a critical point inside the explicit regular band (a, b).

    Requires the inclusion chain (B, A) in (f_b, f_a) in (X minus P,
    X minus Q) at the simplex level; a broken link names the failing
    inclusion. Rank zero in degree q is the verdict "no-linking".
    """
    _check_field(X, f)
    if not a < b:
        raise ValidationError(f"band endpoints must satisfy a < b, got {a}, {b}")
    for name, c in (("a", a), ("b", b)):
        if not is_regular_value(X, f, c, p):
            raise ValidationError(f"band endpoint {name}={c} is not a regular value")
    _check_pairness(B, A, Q, P)
    f_b = sublevel_complex(X, f, b)
    f_a = sublevel_complex(X, f, a)
    if not B.is_subset_of(f_b):
        raise PreconditionError("inclusion chain broken: B is not contained in the sublevel set at b")
    if not A.is_subset_of(f_a):
        raise PreconditionError("inclusion chain broken: A is not contained in the sublevel set at a")
    if f_b.intersects(P):
        raise PreconditionError("inclusion chain broken: the sublevel set at b meets P")
    if f_a.intersects(Q):
        raise PreconditionError("inclusion chain broken: the sublevel set at a meets Q")
    beta = _linking_rank(B, A, Q, P, q, p)
    if beta == 0:
        return CertificationOutcome(
            verdict="no-linking",
            message=f"(B, A) does not link (Q, P) in degree {q} over GF({p})",
        )
    cert = _certificate(X, f, a, b, q, p, beta, closed_band=False)
    return CertificationOutcome(verdict="certified", certificate=cert)


def certify_band(
    X: SimplicialComplex,
    B: FullSubcomplex,
    A: FullSubcomplex,
    Q: FullSubcomplex,
    P: FullSubcomplex,
    f: ScalarField,
    q: int,
    p: int = 2,
) -> CertificationOutcome:
    """Certify a critical point in the derived band [inf f(Q), sup f(B)].

    Hypotheses sup f(B) < inf f(P) and sup f(A) < inf f(Q) are checked on
    the rasterized vertex values with sup of the empty set -inf and inf
    +inf; failure is the verdict "hypotheses-not-met". A positive linking
    rank with inf f(Q) > sup f(B) contradicts the certified inequality and
    is reported as an inconsistency (it signals a rasterization fault).
    """
    _check_field(X, f)
    _check_pairness(B, A, Q, P)
    sup_b, inf_p = f.sup_on(B), f.inf_on(P)
    sup_a, inf_q = f.sup_on(A), f.inf_on(Q)
    failures = []
    if not sup_b < inf_p:
        failures.append(f"sup f(B) = {sup_b} is not < inf f(P) = {inf_p}")
    if not sup_a < inf_q:
        failures.append(f"sup f(A) = {sup_a} is not < inf f(Q) = {inf_q}")
    if failures:
        return CertificationOutcome(
            verdict="hypotheses-not-met",
            message="; ".join(failures),
            details={"sup_B": sup_b, "inf_P": inf_p, "sup_A": sup_a, "inf_Q": inf_q},
        )
    beta = _linking_rank(B, A, Q, P, q, p)
    if beta == 0:
        return CertificationOutcome(
            verdict="no-linking",
            message=f"(B, A) does not link (Q, P) in degree {q} over GF({p})",
        )
    if inf_q > sup_b:
        return CertificationOutcome(
            verdict="inconsistency",
            message=(
                f"linking rank {beta} forces inf f(Q) <= sup f(B), but "
                f"{inf_q} > {sup_b}; the rasterization is inconsistent"
            ),
            details={"inf_Q": inf_q, "sup_B": sup_b, "rank": beta},
        )
    if not (math.isfinite(inf_q) and math.isfinite(sup_b)):
        return CertificationOutcome(
            verdict="inconsistency",
            message="derived band endpoints are not finite",
            details={"inf_Q": inf_q, "sup_B": sup_b},
        )
    lo = inf_q - f.gap_below(inf_q)
    hi = sup_b + f.gap_above(sup_b)
    cert = _certificate(X, f, lo, hi, q, p, beta, closed_band=True, notes=(_BAND_RULE_NOTE,))
    return CertificationOutcome(verdict="certified", certificate=cert)


# -- canned multiplicity scenarios ---------------------------------------------


def _default_saddle_terms(k: int, d: int):
    """Low ring, high core: -4*|x|^2 + y^2 (2-y)^2 with y the last axis."""
    terms = []
    for i in range(k):
        e = [0] * d
        e[i] = 2
        terms.append((-4.0, tuple(e)))
    y2, y3, y4 = [0] * d, [0] * d, [0] * d
    y2[d - 1], y3[d - 1], y4[d - 1] = 2, 3, 4
    terms += [(4.0, tuple(y2)), (-4.0, tuple(y3)), (1.0, tuple(y4))]
    return tuple(terms)


def _default_perera_terms(k: int, d: int):
    """Well-per-axis mountain range: sum_i (x_i^2 - 1)^2 + y^2."""
    terms = []
    zero = tuple([0] * d)
    for i in range(k):
        e4, e2 = [0] * d, [0] * d
        e4[i], e2[i] = 4, 2
        terms += [(1.0, tuple(e4)), (-2.0, tuple(e2)), (1.0, zero)]
    y2 = [0] * d
    y2[d - 1] = 2
    terms.append((1.0, tuple(y2)))
    return tuple(terms)


def multiplicity_regions(scenario: str, k: int, X: SimplicialComplex):
    """The two (B, A, Q, P, degree) region tuples of a canned scenario."""
    d = X.domain.dimension
    h = X.domain.resolution
    e_axis = d - 1
    horiz = tuple(range(k))
    vert = (e_axis,)
    none = rasterize(empty_region(), X)
    if scenario == "saddle_pair":
        lo, hi = _product_box(d, k, e_axis)
        shell = rasterize(box_boundary_shell(lo, hi, h), X)
        solid = rasterize(box(lo, hi), X)
        b2 = rasterize(factor_ball(d, vert, 1.0, h), X)
        s2 = rasterize(factor_sphere(d, vert, 1.0, h), X)
        return (
            (shell, none, b2, s2, k),
            (solid, shell, s2, none, k + 1),
        )
    if scenario == "perera_pair":
        b1 = rasterize(factor_ball(d, horiz, 1.0, h), X)
        s1 = rasterize(factor_sphere(d, horiz, 1.0, h), X)
        e2slab = rasterize(subspace_slab(vert, h / 2), X)
        ray = rasterize(
            intersection(subspace_slab(vert + (0,), h / 2), half_space(0, 0.0, "ge")), X
        )
        return (
            (s1, none, ray, e2slab, k - 1),
            (b1, s1, e2slab, none, k),
        )
    raise ValidationError(
        f"unknown multiplicity scenario {scenario!r}; available: {', '.join(MULTIPLICITY_SCENARIOS)}"
    )


def certify_multiplicity(
    scenario: str,
    f: ScalarField | None = None,
    k: int = 1,
    p: int = 2,
    extent: float = 4.0,
    resolution: float = 0.5,
    budget: int | None = None,
) -> MultiplicityOutcome:
    """Two distinct critical points from one geometry, two nested linkings.

    The low band certifies a point with nonzero group in the lower degree;
    the high band one in the next degree; the hypothesis chain
    f(p0) <= sup f(A-side) < inf f(high Q) <= f(p1) keeps them apart. With
    the pinned default fields both bands are exact up to one value gap.
    """
    if scenario not in MULTIPLICITY_SCENARIOS:
        raise ValidationError(
            f"unknown multiplicity scenario {scenario!r}; available: {', '.join(MULTIPLICITY_SCENARIOS)}"
        )
    if k < 1:
        raise ValidationError("the horizontal factor dimension k must be >= 1")
    d = k + 1
    domain = GridDomain(d, extent, resolution)
    X = build_grid_complex(domain, budget=budget)
    if f is None:
        terms = (
            _default_saddle_terms(k, d) if scenario == "saddle_pair" else _default_perera_terms(k, d)
        )
        f = ScalarField.from_polynomial(X, terms)
    _check_field(X, f)
    regions_lo, regions_hi = multiplicity_regions(scenario, k, X)
    out_lo = certify_band(X, *regions_lo[:4], f, regions_lo[4], p)
    out_hi = certify_band(X, *regions_hi[:4], f, regions_hi[4], p)
    for part, out in (("low band", out_lo), ("high band", out_hi)):
        if out.verdict != "certified":
            return MultiplicityOutcome(
                scenario=scenario,
                verdict=out.verdict,
                message=f"{part}: {out.message}",
                details=out.details,
            )
    c0, c1 = out_lo.certificate, out_hi.certificate
    pair = None
    for w0 in c0.witnesses:
        for w1 in c1.witnesses:
            if w0.vertex != w1.vertex and w0.value < w1.value:
                pair = (w0, w1)
                break
        if pair:
            break
    if pair is None:
        raise InternalConsistencyError(
            "multiplicity requires two distinct witnesses with ordered values, "
            "but the certified bands provide none"
        )
    if not c0.band_hi < c1.band_lo:
        raise InternalConsistencyError(
            f"certified bands overlap: [{c0.band_lo}, {c0.band_hi}] and "
            f"[{c1.band_lo}, {c1.band_hi}]"
        )
    return MultiplicityOutcome(
        scenario=scenario,
        verdict="certified",
        certificates=(c0, c1),
        details={
            "witness_low": pair[0].vertex,
            "witness_high": pair[1].vertex,
            "value_low": pair[0].value,
            "value_high": pair[1].value,
        },
    )
