"""Scenario configuration: parsing and validation of the JSON config format.

One config describes one run: a mode, the ambient grid, the coefficient
field, and the mode's inputs (regions, polynomial, degrees, band endpoints,
catalogue or multiplicity parameters). Validation failures carry the
machine-readable code "schema-invalid" via ConfigError.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .catalogue import CATALOGUE_NAMES
from .certify import MULTIPLICITY_SCENARIOS
from .errors import ValidationError
from .gf import is_prime
from .regions import RegionSpec, from_json as region_from_json

MODES = ("link", "catalogue", "certify", "band", "multiplicity", "morse-check")

SCHEMA_VERSION = 1


class ConfigError(ValidationError):
    """Schema violation in a scenario config."""


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _get_number(obj: dict, key: str, required: bool = True, default=None):
    if key not in obj:
        _require(not required, f"missing required field {key!r}")
        return default
    v = obj[key]
    _require(isinstance(v, (int, float)) and not isinstance(v, bool), f"{key!r} must be a number")
    return float(v)


@dataclass(frozen=True)
class DomainConfig:
    dimension: int
    extent: float
    resolution: float

    @classmethod
    def parse(cls, obj) -> "DomainConfig":
        _require(isinstance(obj, dict), "'domain' must be an object")
        d = obj.get("dimension")
        _require(isinstance(d, int) and d >= 1, "'domain.dimension' must be a positive integer")
        return cls(
            dimension=d,
            extent=_get_number(obj, "extent"),
            resolution=_get_number(obj, "resolution"),
        )

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "extent": self.extent, "resolution": self.resolution}


def _parse_terms(obj) -> tuple:
    _require(isinstance(obj, list) and obj, "'function' must be a nonempty list of terms")
    terms = []
    for t in obj:
        _require(
            isinstance(t, list) and len(t) == 2,
            "each polynomial term must be [coefficient, [exponents]]",
        )
        coeff, exps = t
        _require(
            isinstance(coeff, (int, float)) and not isinstance(coeff, bool),
            "term coefficient must be a number",
        )
        _require(
            isinstance(exps, list) and all(isinstance(e, int) and e >= 0 for e in exps),
            "term exponents must be a list of nonnegative integers",
        )
        terms.append((float(coeff), tuple(exps)))
    return tuple(terms)


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario configuration."""

    mode: str
    prime: int = 2
    budget: int | None = None
    name: str | None = None
    domain: DomainConfig | None = None
    regions: dict[str, RegionSpec] = field(default_factory=dict)
    function: tuple | None = None
    degree: int | None = None
    band: tuple[float, float] | None = None
    catalogue_name: str | None = None
    catalogue_k: int | None = None
    catalogue_m: int | None = None
    catalogue_dimension: int | None = None
    multiplicity_scenario: str | None = None
    multiplicity_k: int = 1
    expected: dict | None = None

    @classmethod
    def parse(cls, obj) -> "ScenarioConfig":
        _require(isinstance(obj, dict), "config must be a JSON object")
        version = obj.get("schema_version", SCHEMA_VERSION)
        _require(version == SCHEMA_VERSION, f"unsupported schema_version {version!r}")
        unknown = set(obj) - {
            "schema_version", "mode", "prime", "budget", "name", "domain", "regions",
            "function", "degree", "band", "catalogue", "multiplicity", "expected",
        }
        _require(not unknown, f"unknown config fields: {sorted(unknown)}")
        mode = obj.get("mode")
        _require(mode in MODES, f"'mode' must be one of {MODES}, got {mode!r}")

        prime = obj.get("prime", 2)
        _require(isinstance(prime, int) and is_prime(prime), f"'prime' must be a prime integer, got {prime!r}")
        budget = obj.get("budget")
        if budget is not None:
            _require(isinstance(budget, int) and budget > 0, "'budget' must be a positive integer")
        name = obj.get("name")
        if name is not None:
            _require(isinstance(name, str), "'name' must be a string")

        domain = None
        if "domain" in obj:
            domain = DomainConfig.parse(obj["domain"])

        regions: dict[str, RegionSpec] = {}
        if "regions" in obj:
            robj = obj["regions"]
            _require(isinstance(robj, dict), "'regions' must be an object")
            unknown_regions = set(robj) - {"B", "A", "Q", "P"}
            _require(not unknown_regions, f"unknown region names: {sorted(unknown_regions)}")
            for key, val in robj.items():
                try:
                    regions[key] = region_from_json(val)
                except ValidationError as exc:
                    raise ConfigError(f"region {key!r}: {exc}") from exc

        function = _parse_terms(obj["function"]) if "function" in obj else None

        degree = obj.get("degree")
        if degree is not None:
            _require(isinstance(degree, int) and degree >= 0, "'degree' must be a nonnegative integer")

        band = None
        if "band" in obj:
            b = obj["band"]
            _require(
                isinstance(b, list) and len(b) == 2
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in b),
                "'band' must be [a, b] with numeric endpoints",
            )
            band = (float(b[0]), float(b[1]))
            _require(band[0] < band[1], "'band' endpoints must satisfy a < b")

        cat_name = cat_k = cat_m = cat_d = None
        if mode == "catalogue":
            cobj = obj.get("catalogue")
            _require(isinstance(cobj, dict), "catalogue mode needs a 'catalogue' object")
            cat_name = cobj.get("name")
            _require(cat_name in CATALOGUE_NAMES, f"'catalogue.name' must be one of {CATALOGUE_NAMES}")
            for key in ("k", "m", "dimension"):
                if key in cobj and cobj[key] is not None:
                    _require(isinstance(cobj[key], int), f"'catalogue.{key}' must be an integer")
            cat_k, cat_m, cat_d = cobj.get("k"), cobj.get("m"), cobj.get("dimension")

        mult_scenario, mult_k = None, 1
        if mode == "multiplicity":
            mobj = obj.get("multiplicity")
            _require(isinstance(mobj, dict), "multiplicity mode needs a 'multiplicity' object")
            mult_scenario = mobj.get("scenario")
            _require(
                mult_scenario in MULTIPLICITY_SCENARIOS,
                f"'multiplicity.scenario' must be one of {MULTIPLICITY_SCENARIOS}",
            )
            mult_k = mobj.get("k", 1)
            _require(isinstance(mult_k, int) and mult_k >= 1, "'multiplicity.k' must be a positive integer")

        expected = obj.get("expected")
        if expected is not None:
            _require(isinstance(expected, dict), "'expected' must be an object")
            unknown_exp = set(expected) - {"degree", "rank", "verdict"}
            _require(not unknown_exp, f"unknown 'expected' fields: {sorted(unknown_exp)}")

        # per-mode requirements
        if mode in ("link", "certify", "band"):
            _require(domain is not None, f"{mode} mode needs a 'domain'")
            _require("B" in regions and "Q" in regions, f"{mode} mode needs regions B and Q")
        if mode in ("certify", "band"):
            _require(function is not None, f"{mode} mode needs a 'function'")
            _require(degree is not None, f"{mode} mode needs a 'degree'")
        if mode == "certify":
            _require(band is not None, "certify mode needs a 'band'")
        if mode == "morse-check":
            _require(domain is not None, "morse-check mode needs a 'domain'")
            _require(function is not None, "morse-check mode needs a 'function'")
            _require(band is not None, "morse-check mode needs a 'band'")

        return cls(
            mode=mode,
            prime=prime,
            budget=budget,
            name=name,
            domain=domain,
            regions=regions,
            function=function,
            degree=degree,
            band=band,
            catalogue_name=cat_name,
            catalogue_k=cat_k,
            catalogue_m=cat_m,
            catalogue_dimension=cat_d,
            multiplicity_scenario=mult_scenario,
            multiplicity_k=mult_k,
            expected=expected,
        )

    def to_json(self) -> dict:
        """Normalized echo of the config; reparsing it reproduces this object."""
        out: dict = {"schema_version": SCHEMA_VERSION, "mode": self.mode, "prime": self.prime}
        if self.budget is not None:
            out["budget"] = self.budget
        if self.name is not None:
            out["name"] = self.name
        if self.domain is not None:
            out["domain"] = self.domain.to_json()
        if self.regions:
            out["regions"] = {k: v.to_json() for k, v in sorted(self.regions.items())}
        if self.function is not None:
            out["function"] = [[c, list(e)] for c, e in self.function]
        if self.degree is not None:
            out["degree"] = self.degree
        if self.band is not None:
            out["band"] = list(self.band)
        if self.catalogue_name is not None:
            cat: dict = {"name": self.catalogue_name}
            if self.catalogue_k is not None:
                cat["k"] = self.catalogue_k
            if self.catalogue_m is not None:
                cat["m"] = self.catalogue_m
            if self.catalogue_dimension is not None:
                cat["dimension"] = self.catalogue_dimension
            out["catalogue"] = cat
        if self.multiplicity_scenario is not None:
            out["multiplicity"] = {"scenario": self.multiplicity_scenario, "k": self.multiplicity_k}
        if self.expected is not None:
            out["expected"] = self.expected
        return out

    def override(self, prime: int | None = None, budget: int | None = None) -> "ScenarioConfig":
        if prime is None and budget is None:
            return self
        from dataclasses import replace

        kwargs = {}
        if prime is not None:
            if not is_prime(prime):
                raise ConfigError(f"prime override must be a prime, got {prime}")
            kwargs["prime"] = prime
        if budget is not None:
            kwargs["budget"] = budget
        return replace(self, **kwargs)
