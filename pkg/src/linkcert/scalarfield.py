"""Vertex-indexed scalar fields from polynomials, with symbolic tie-breaking.

A field is a polynomial evaluated on every vertex, then made injective by
adding eps times the vertex index, where eps is small enough that the
perturbation never reorders distinct raw values (every perturbation stays
below half the minimal nonzero gap). All sublevel and Morse machinery works
on the tie-broken values, so every level configuration is generic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .complexes import FullSubcomplex, SimplicialComplex
from .errors import ValidationError

_field_uid = itertools.count(1)


def _validate_terms(terms, d: int):
    out = []
    for t in terms:
        if len(t) != 2:
            raise ValidationError(f"polynomial term must be (coefficient, exponents), got {t!r}")
        coeff, exps = t
        coeff = float(coeff)
        exps = tuple(int(e) for e in exps)
        if len(exps) != d:
            raise ValidationError(
                f"exponent multi-index {exps} has length {len(exps)}, expected {d}"
            )
        if any(e < 0 for e in exps):
            raise ValidationError(f"exponents must be nonnegative, got {exps}")
        out.append((coeff, exps))
    return tuple(out)


@dataclass(frozen=True)
class ScalarField:
    """A polynomial sampled at the vertices of a complex, tie-broken."""

    complex: SimplicialComplex
    terms: tuple[tuple[float, tuple[int, ...]], ...]
    raw_values: np.ndarray
    values: np.ndarray
    epsilon: float
    uid: int = field(default_factory=lambda: next(_field_uid))

    @classmethod
    def from_polynomial(cls, X: SimplicialComplex, terms) -> "ScalarField":
        d = X.coords.shape[1]
        terms = _validate_terms(terms, d)
        raw = np.zeros(X.vertex_count, dtype=np.float64)
        for coeff, exps in terms:
            mono = np.ones(X.vertex_count, dtype=np.float64)
            for axis, e in enumerate(exps):
                if e:
                    mono *= X.coords[:, axis] ** e
            raw += coeff * mono
        values, eps = cls._tie_break(raw)
        return cls(complex=X, terms=terms, raw_values=raw, values=values, epsilon=eps)

    @staticmethod
    def _tie_break(raw: np.ndarray) -> tuple[np.ndarray, float]:
        n = raw.shape[0]
        uniq = np.unique(raw)
        gaps = np.diff(uniq)
        min_gap = float(gaps.min()) if gaps.size else 1.0
        # keep every perturbation i*eps below half the minimal raw gap
        eps = min_gap / (2.0 * (n + 1))
        values = raw + eps * np.arange(n)
        if np.unique(values).shape[0] != n:
            raise ValidationError("tie-breaking failed to separate vertex values")
        return values, eps

    # -- queries ---------------------------------------------------------------

    def value(self, v: int) -> float:
        return float(self.values[v])

    def raw_value(self, v: int) -> float:
        return float(self.raw_values[v])

    def sup_on(self, region: FullSubcomplex) -> float:
        """Supremum of the tie-broken values on a region; -inf when empty."""
        ids = region.vertex_ids
        return float(self.values[ids].max()) if ids.size else float("-inf")

    def inf_on(self, region: FullSubcomplex) -> float:
        """Infimum of the tie-broken values on a region; +inf when empty."""
        ids = region.vertex_ids
        return float(self.values[ids].min()) if ids.size else float("inf")

    def sorted_values(self) -> np.ndarray:
        return np.sort(self.values)

    def gap_below(self, v: float) -> float:
        """Distance from v down to the next strictly smaller vertex value,
        or one resolution-free default step when none exists."""
        below = self.values[self.values < v]
        return float(v - below.max()) if below.size else 1.0

    def gap_above(self, v: float) -> float:
        above = self.values[self.values > v]
        return float(above.min() - v) if above.size else 1.0
