"""Mode dispatch: execute one scenario config and assemble its report.

Reports are canonical JSON: keys sorted, no whitespace variation, and no
volatile fields, so identical configs produce byte-identical report files.
Timing is measured but excluded from the canonical serialization unless
explicitly requested.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from . import __version__
from .catalogue import catalogue
from .certify import (
    CriticalBandCertificate,
    certify_band,
    certify_linking_principle,
    certify_multiplicity,
)
from .complexes import GridDomain, build_grid_complex
from .config import ScenarioConfig
from .errors import (
    BudgetError,
    InternalConsistencyError,
    PreconditionError,
    ValidationError,
)
from .homology import LinkingReport, link_rank
from .morse import band_homology_dims, lower_star_numbers, morse_numbers
from .regions import rasterize
from .scalarfield import ScalarField

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENCY = 4

_VERDICT_EXIT = {
    "certified": EXIT_OK,
    "no-linking": EXIT_OK,
    "hypotheses-not-met": EXIT_OK,
    "inconsistency": EXIT_INCONSISTENCY,
}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(config: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(config.to_json()).encode()).hexdigest()


@dataclass
class Report:
    """Result of one run: verdict, payload, and the exit-code contract."""

    config: ScenarioConfig
    verdict: str
    exit_code: int
    payload: dict = field(default_factory=dict)
    error_code: str | None = None
    error_message: str | None = None
    timing_seconds: float | None = None

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "schema_version": 1,
            "tool": {"name": "linkcert", "version": __version__},
            "config": self.config.to_json(),
            "config_sha256": config_hash(self.config),
            "verdict": self.verdict,
            "error": (
                {"code": self.error_code, "message": self.error_message}
                if self.error_code
                else None
            ),
        }
        out.update(self.payload)
        if include_timing:
            out["timing_seconds"] = self.timing_seconds
        return out

    def canonical(self, include_timing: bool = False) -> str:
        return canonical_json(self.to_json(include_timing=include_timing))


def _linking_json(rep: LinkingReport) -> dict:
    return {
        "prime": rep.prime,
        "q_max": rep.q_max,
        "inclusion_ok": rep.inclusion_ok,
        "betas": list(rep.betas) if rep.betas is not None else None,
        "reasons": list(rep.reasons),
        "provenance": {k: dict(v) for k, v in rep.provenance.items()},
    }


def _certificate_json(cert: CriticalBandCertificate) -> dict:
    return {
        "degree": cert.degree,
        "rank": cert.rank,
        "band": [cert.band_lo, cert.band_hi],
        "witnesses": [
            {
                "vertex": w.vertex,
                "coords": list(w.coords),
                "value": w.value,
                "raw_value": w.raw_value,
                "critical_groups": list(w.critical_group_dims),
                "pl_nondegenerate": w.is_pl_nondegenerate,
                "boundary": w.boundary,
            }
            for w in cert.witnesses
        ],
        "multiplicity_claim": cert.multiplicity_claim,
        "notes": list(cert.notes),
    }


def _build_ambient(config: ScenarioConfig):
    dom = GridDomain(config.domain.dimension, config.domain.extent, config.domain.resolution)
    return build_grid_complex(dom, budget=config.budget)


def _raster_regions(config: ScenarioConfig, X):
    from .regions import empty_region

    out = {}
    for key in ("B", "A", "Q", "P"):
        spec = config.regions.get(key)
        out[key] = rasterize(spec, X) if spec is not None else rasterize(empty_region(), X)
    return out


def _run_link(config: ScenarioConfig) -> Report:
    X = _build_ambient(config)
    regs = _raster_regions(config, X)
    rep = link_rank(X, regs["B"], regs["A"], regs["Q"], regs["P"], config.prime)
    payload = {"linking": _linking_json(rep)}
    if not rep.inclusion_ok:
        return Report(
            config=config,
            verdict="error",
            exit_code=EXIT_VALIDATION,
            payload=payload,
            error_code="inclusion-violated",
            error_message="; ".join(rep.reasons),
        )
    verdict = "certified" if any(rep.betas) else "no-linking"
    return Report(config=config, verdict=verdict, exit_code=EXIT_OK, payload=payload)


def _run_catalogue(config: ScenarioConfig) -> Report:
    scenario = catalogue(
        config.catalogue_name,
        k=config.catalogue_k,
        m=config.catalogue_m,
        dimension=config.catalogue_dimension,
        budget=config.budget,
    )
    rep = scenario.run(p=config.prime, budget=config.budget)
    payload = {
        "linking": _linking_json(rep),
        "expected": {"degree": scenario.expected_degree, "rank": scenario.expected_rank},
    }
    if scenario.matches_expectation(rep):
        return Report(config=config, verdict="certified", exit_code=EXIT_OK, payload=payload)
    return Report(
        config=config,
        verdict="inconsistency",
        exit_code=EXIT_INCONSISTENCY,
        payload=payload,
        error_code="internal-inconsistency",
        error_message=(
            f"catalogue scenario {scenario.name} expected rank {scenario.expected_rank} "
            f"in degree {scenario.expected_degree}, observed {rep.betas}"
        ),
    )


def _run_certify(config: ScenarioConfig) -> Report:
    X = _build_ambient(config)
    regs = _raster_regions(config, X)
    f = ScalarField.from_polynomial(X, config.function)
    a, b = config.band
    out = certify_linking_principle(
        X, regs["B"], regs["A"], regs["Q"], regs["P"], f, a, b, config.degree, config.prime
    )
    payload = {
        "certificates": [_certificate_json(out.certificate)] if out.certificate else [],
        "message": out.message,
    }
    return Report(
        config=config, verdict=out.verdict, exit_code=_VERDICT_EXIT[out.verdict], payload=payload
    )


def _run_band(config: ScenarioConfig) -> Report:
    X = _build_ambient(config)
    regs = _raster_regions(config, X)
    f = ScalarField.from_polynomial(X, config.function)
    out = certify_band(
        X, regs["B"], regs["A"], regs["Q"], regs["P"], f, config.degree, config.prime
    )
    payload = {
        "certificates": [_certificate_json(out.certificate)] if out.certificate else [],
        "message": out.message,
        "details": out.details,
    }
    return Report(
        config=config, verdict=out.verdict, exit_code=_VERDICT_EXIT[out.verdict], payload=payload
    )


def _run_multiplicity(config: ScenarioConfig) -> Report:
    kwargs = {}
    if config.domain is not None:
        kwargs["extent"] = config.domain.extent
        kwargs["resolution"] = config.domain.resolution
    X_field = None
    if config.function is not None:
        dom_k = config.multiplicity_k
        dom = GridDomain(
            dom_k + 1, kwargs.get("extent", 4.0), kwargs.get("resolution", 0.5)
        )
        X = build_grid_complex(dom, budget=config.budget)
        X_field = ScalarField.from_polynomial(X, config.function)
    out = certify_multiplicity(
        config.multiplicity_scenario,
        f=X_field,
        k=config.multiplicity_k,
        p=config.prime,
        budget=config.budget,
        **kwargs,
    )
    payload = {
        "certificates": [_certificate_json(c) for c in out.certificates],
        "message": out.message,
        "details": out.details,
    }
    return Report(
        config=config, verdict=out.verdict, exit_code=_VERDICT_EXIT[out.verdict], payload=payload
    )


def _run_morse_check(config: ScenarioConfig) -> Report:
    X = _build_ambient(config)
    f = ScalarField.from_polynomial(X, config.function)
    a, b = config.band
    mu = lower_star_numbers(X, f, a, b, config.prime)
    hq = band_homology_dims(X, f, a, b, config.prime)
    interior = morse_numbers(X, f, a, b, config.prime)
    holds = all(m >= h for m, h in zip(mu, hq))
    payload = {
        "morse": {
            "band": [a, b],
            "lower_star_numbers": list(mu),
            "interior_morse_numbers": list(interior),
            "relative_homology": list(hq),
            "holds": holds,
        }
    }
    if holds:
        return Report(config=config, verdict="certified", exit_code=EXIT_OK, payload=payload)
    return Report(
        config=config,
        verdict="inconsistency",
        exit_code=EXIT_INCONSISTENCY,
        payload=payload,
        error_code="internal-inconsistency",
        error_message="weak Morse inequalities violated",
    )


_RUNNERS = {
    "link": _run_link,
    "catalogue": _run_catalogue,
    "certify": _run_certify,
    "band": _run_band,
    "multiplicity": _run_multiplicity,
    "morse-check": _run_morse_check,
}


def run(config: ScenarioConfig) -> Report:
    """Execute one scenario; error classes map onto the exit-code contract."""
    t0 = time.perf_counter()
    try:
        report = _RUNNERS[config.mode](config)
    except BudgetError as exc:
        report = Report(
            config=config,
            verdict="error",
            exit_code=EXIT_BUDGET,
            error_code="budget-exceeded",
            error_message=str(exc),
        )
    except PreconditionError as exc:
        report = Report(
            config=config,
            verdict="error",
            exit_code=EXIT_VALIDATION,
            error_code="precondition-failed",
            error_message=str(exc),
        )
    except InternalConsistencyError as exc:
        report = Report(
            config=config,
            verdict="inconsistency",
            exit_code=EXIT_INCONSISTENCY,
            error_code="internal-inconsistency",
            error_message=str(exc),
        )
    except ValidationError as exc:
        report = Report(
            config=config,
            verdict="error",
            exit_code=EXIT_VALIDATION,
            error_code="schema-invalid",
            error_message=str(exc),
        )
    report.timing_seconds = time.perf_counter() - t0
    return report


@dataclass(frozen=True)
class SuiteRow:
    filename: str
    name: str
    expected: str
    observed: str
    passed: bool
    reason: str = ""


def _expectation_strings(config: ScenarioConfig | None, report: Report | None):
    if config is None:
        return "-", False
    if config.expected:
        parts = []
        if "verdict" in config.expected:
            parts.append(f"verdict={config.expected['verdict']}")
        if "degree" in config.expected:
            parts.append(f"beta_{config.expected['degree']}={config.expected.get('rank', 1)}")
        return " ".join(parts) or "-", True
    if config.mode == "catalogue" and report is not None:
        exp = report.payload.get("expected")
        if exp:
            return f"beta_{exp['degree']}={exp['rank']}", False
    return "-", False


def _check_expected(config: ScenarioConfig, report: Report) -> tuple[bool, str]:
    if report.verdict in ("error", "inconsistency"):
        return False, report.error_message or report.verdict
    if not config.expected:
        return True, ""
    exp = config.expected
    if "verdict" in exp and report.verdict != exp["verdict"]:
        return False, f"verdict {report.verdict} != expected {exp['verdict']}"
    if "degree" in exp:
        betas = (report.payload.get("linking") or {}).get("betas")
        want = exp.get("rank", 1)
        got = betas[exp["degree"]] if betas and exp["degree"] < len(betas) else None
        if got != want:
            return False, f"beta_{exp['degree']} = {got} != expected {want}"
    return True, ""


def _observed_string(report: Report) -> str:
    linking = report.payload.get("linking")
    if linking and linking.get("betas") is not None:
        nonzero = {q: b for q, b in enumerate(linking["betas"]) if b}
        return f"{report.verdict} betas={nonzero or {}}"
    return report.verdict


def run_suite(paths: list, prime: int | None = None, budget: int | None = None, threads: int = 1):
    """Run a list of config files; returns (rows, reports) ordered by filename.

    Unreadable or invalid files become failing rows rather than crashes.
    """
    import concurrent.futures
    import pathlib

    jobs = []
    for path in sorted(paths, key=lambda p: str(p)):
        path = pathlib.Path(path)
        config = None
        error = ""
        try:
            raw = json.loads(path.read_text())
            config = ScenarioConfig.parse(raw).override(prime=prime, budget=budget)
        except (OSError, json.JSONDecodeError, ValidationError) as exc:
            error = str(exc)
        jobs.append((path, config, error))

    def execute(job):
        path, config, error = job
        if config is None:
            return path, None, error
        return path, run(config), ""

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(execute, jobs))
    else:
        results = [execute(j) for j in jobs]

    rows = []
    reports = []
    for path, report, error in results:
        config = next(c for pth, c, _e in jobs if pth == path)
        if report is None:
            rows.append(
                SuiteRow(
                    filename=path.name,
                    name="-",
                    expected="-",
                    observed="unreadable",
                    passed=False,
                    reason=error,
                )
            )
            continue
        passed, reason = _check_expected(config, report)
        expected_str, _ = _expectation_strings(config, report)
        rows.append(
            SuiteRow(
                filename=path.name,
                name=config.name or config.mode,
                expected=expected_str,
                observed=_observed_string(report),
                passed=passed,
                reason=reason,
            )
        )
        reports.append((path, report))
    return rows, reports


def format_suite_table(rows: list[SuiteRow]) -> str:
    headers = ("scenario", "name", "expected", "observed", "result")
    table = [
        (r.filename, r.name, r.expected, r.observed, "pass" if r.passed else f"FAIL {r.reason}".strip())
        for r in rows
    ]
    widths = [max(len(h), *(len(t[i]) for t in table)) if table else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for t in table:
        lines.append("  ".join(c.ljust(w) for c, w in zip(t, widths)))
    passed = sum(r.passed for r in rows)
    lines.append(f"{passed}/{len(rows)} passed")
    return "\n".join(lines)
