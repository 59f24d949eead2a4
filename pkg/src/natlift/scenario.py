"""Scenario configs, the verification suites and report rendering.

A scenario fixes a base space form, the profiles, a sampling recipe and a
list of suites.  Every suite maps a sampled phase point to one nonnegative
residual; the report keeps the max, the mean and the point where the max
was attained.  Suites that need numerical differentiation of the whole
structure (the oracle suites) only run on the first ``oracle_samples``
valid points because each one costs a few hundred structure evaluations.
"""

from __future__ import annotations

import json
import platform
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import yaml

from . import __version__
from .base_space import SpaceForm, sample_base_point
from .connection import (
    connection_block_derivatives,
    connection_blocks,
    curvature_blocks,
    model_curvature_assembled,
    model_curvature_blocks,
)
from .errors import ConfigError, DomainError
from .fd import jacobian
from .oracle import adapted_connection, oracle_curvature_blocks
from .phase_space import (
    LiftedStructure,
    PointStructure,
    closedness_residual,
    fundamental_form,
    inverse_system_residual,
    nijenhuis_at,
)
from .profiles import parse_profile

SCHEMA_VERSION = "1"
INVALID_FRACTION_LIMIT = 0.10

DEFAULT_TOLERANCES = {
    "almost_complex": 1e-11,
    "hermitian": 1e-11,
    "inverse_system": 1e-11,
    "nijenhuis": 1e-5,
    "closedness": 1e-6,
    "connection_vs_oracle": 1e-5,
    "derivative_closed_form_vs_fd": 1e-5,
    "curvature_vs_oracle": 1e-4,
    "k0_consistency": 1e-11,
    "main_theorem": 1e-7,
    "lambda_sensitivity": 1e-3,
}
SUITES = tuple(DEFAULT_TOLERANCES)
ORACLE_SUITES = frozenset(
    {"nijenhuis", "closedness", "connection_vs_oracle", "derivative_closed_form_vs_fd", "curvature_vs_oracle"}
)
NEEDS_K = frozenset({"main_theorem", "lambda_sensitivity"})
SENSITIVITY_SCALE = 1.01

_FIELDS = {
    "n", "c", "k", "a1", "a3", "lambda", "mu", "perturbation", "samples", "seed",
    "t_max", "radius", "tolerances", "suites", "oracle_samples", "name",
}  # fmt: skip


@dataclass(frozen=True)
class Scenario:
    n: int
    c: float
    a1: str = "1"
    a3: str = "0"
    lam: Optional[str] = None
    k: Optional[float] = None
    mu: Optional[str] = None
    perturbation: Optional[tuple] = None
    samples: int = 100
    seed: int = 0
    t_max: float = 0.4
    radius: float = 0.5
    tolerances: dict = field(default_factory=dict)
    suites: tuple = ()
    oracle_samples: int = 5
    name: str = ""

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.oracle_samples < 0:
            raise ConfigError("oracle_samples must be nonnegative")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.t_max < 0:
            raise ConfigError("t_max must be nonnegative")
        if self.lam is None and self.k is None:
            raise ConfigError("give lambda, k, or both")
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise ConfigError(f"unknown suites: {sorted(unknown)}")
        if self.k is None and NEEDS_K & set(self.suites):
            raise ConfigError(f"suites {sorted(NEEDS_K & set(self.suites))} need k")
        bad_tol = set(self.tolerances) - set(SUITES)
        if bad_tol:
            raise ConfigError(f"tolerances for unknown suites: {sorted(bad_tol)}")
        for text in (self.a1, self.a3, self.lam, self.mu):
            if text is not None:
                parse_profile(text)

    @classmethod
    def from_mapping(cls, data: dict) -> Scenario:
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a mapping")
        unknown = set(data) - _FIELDS
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        if "n" not in data or "c" not in data:
            raise ConfigError("scenario needs n and c")
        kw = dict(data)
        if "lambda" in kw:
            kw["lam"] = kw.pop("lambda")
        for key in ("a1", "a3", "lam", "mu"):
            if kw.get(key) is not None:
                kw[key] = str(kw[key])
        if kw.get("perturbation") is not None:
            pert = kw["perturbation"]
            if isinstance(pert, dict) and len(pert) == 1:
                pert = next(iter(pert.items()))
            if not (isinstance(pert, (list, tuple)) and len(pert) == 2):
                raise ConfigError("perturbation must be {name: amount}")
            kw["perturbation"] = (str(pert[0]), float(pert[1]))
        kw["tolerances"] = {str(k): float(v) for k, v in (kw.get("tolerances") or {}).items()}
        try:
            kw["n"], kw["c"] = int(kw["n"]), float(kw["c"])
            if kw.get("k") is not None:
                kw["k"] = float(kw["k"])
            for key in ("samples", "seed", "oracle_samples"):
                if key in kw:
                    kw[key] = int(kw[key])
            for key in ("t_max", "radius"):
                if key in kw:
                    kw[key] = float(kw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad scenario value: {exc}") from exc
        suites = kw.get("suites")
        if suites is None:
            suites = SUITES if kw.get("k") is not None else tuple(s for s in SUITES if s not in NEEDS_K)
        kw["suites"] = tuple(suites)
        return cls(**kw)

    def tolerance(self, suite: str) -> float:
        return self.tolerances.get(suite, DEFAULT_TOLERANCES[suite])

    def structure(self, lam_scale: float = 1.0) -> LiftedStructure:
        return LiftedStructure.from_profiles(
            self.n,
            self.c,
            parse_profile(self.a1),
            parse_profile(self.a3),
            lam=None if self.lam is None else parse_profile(self.lam),
            k=self.k,
            mu=None if self.mu is None else parse_profile(self.mu),
            perturbation=self.perturbation,
            lam_scale=lam_scale,
        )

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["suites"] = list(self.suites)
        if self.perturbation is not None:
            d["perturbation"] = {self.perturbation[0]: self.perturbation[1]}
        return d


def load_scenario(path) -> Scenario:
    """Read a YAML or JSON scenario file (JSON is valid YAML)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return Scenario.from_mapping(data)


# -- sampling ------------------------------------------------------------------


def sample_points(scenario: Scenario, rng: np.random.Generator):
    """Yield ``(x, p)`` with ``x`` uniform in the ball and ``t`` uniform in ``[0, t_max]``."""
    space = SpaceForm(scenario.n, scenario.c)
    for _ in range(scenario.samples):
        x = sample_base_point(space, rng, scenario.radius)
        u = rng.normal(size=scenario.n)
        u /= np.linalg.norm(u)
        t = rng.uniform(0.0, scenario.t_max)
        phi = 1.0 + 0.25 * scenario.c * float(x @ x)
        yield x, u * np.sqrt(2.0 * t) / phi


# -- suites ----------------------------------------------------------------------


@dataclass
class _Context:
    scenario: Scenario
    structure: LiftedStructure
    x: np.ndarray
    p: np.ndarray
    ps: PointStructure
    _cache: dict = field(default_factory=dict)

    def cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def conn(self):
        return self.cached("conn", lambda: connection_blocks(self.ps))

    @property
    def dconn(self):
        return self.cached("dconn", lambda: connection_block_derivatives(self.ps))

    @property
    def curvature(self):
        return self.cached("curv", lambda: curvature_blocks(self.ps, self.conn, self.dconn))


def _almost_complex(ctx):
    J = ctx.ps.J.matrix()
    return float(np.abs(J @ J + np.eye(J.shape[0])).max())


def _hermitian(ctx):
    J, G = ctx.ps.J.matrix(), ctx.ps.G.matrix()
    omega = fundamental_form(ctx.ps.point, ctx.ps.coeffs, ctx.ps.J, ctx.ps.G)
    return max(float(np.abs(J.T @ G @ J - G).max()), omega.residual)


def _inverse_system(ctx):
    return inverse_system_residual(ctx.ps.G, ctx.ps.H)


def _nijenhuis(ctx):
    return nijenhuis_at(ctx.structure, ctx.x, ctx.p)


def _closedness(ctx):
    return closedness_residual(ctx.structure, ctx.x, ctx.p)


def _connection_vs_oracle(ctx):
    oracle = adapted_connection(ctx.structure, ctx.x, ctx.p).as_dict()
    return max(float(np.abs(v - oracle[k]).max()) for k, v in ctx.conn.as_dict().items())


def _derivative_vs_fd(ctx):
    names = list(ctx.conn.as_dict())

    def blocks(p):
        d = connection_blocks(ctx.structure.at(ctx.x, p)).as_dict()
        return np.stack([d[k] for k in names])

    fd = np.moveaxis(jacobian(blocks, ctx.p), -1, 1)  # [block, m, ...]
    closed = ctx.dconn.as_dict()
    return max(float(np.abs(fd[i] - closed[k]).max()) for i, k in enumerate(names))


def _curvature_vs_oracle(ctx):
    return ctx.curvature.max_abs_difference(oracle_curvature_blocks(ctx.structure, ctx.x, ctx.p))


def _k0_consistency(ctx):
    k = ctx.scenario.k if ctx.scenario.k is not None else 1.0
    return model_curvature_blocks(ctx.ps, k).max_abs_difference(model_curvature_assembled(ctx.ps, k))


def _main_theorem(ctx):
    return ctx.cached(
        "main", lambda: ctx.curvature.max_abs_difference(model_curvature_blocks(ctx.ps, ctx.scenario.k))
    )


def _perturbed_gap(ctx):
    def compute():
        scaled = ctx.scenario.structure(lam_scale=SENSITIVITY_SCALE).at(ctx.x, ctx.p)
        return curvature_blocks(scaled).max_abs_difference(model_curvature_blocks(scaled, ctx.scenario.k))

    return ctx.cached("perturbed", compute)


def _lambda_sensitivity(ctx):
    """Nominal residual over the residual after scaling lambda by 1%.

    Small when the nominal structure reproduces ``K0`` and the 1% change is
    clearly detected; near 1 when neither is the case.
    """
    gap = _perturbed_gap(ctx)
    return _main_theorem(ctx) / gap if gap > 0 else float("inf")


SUITE_FUNCTIONS: dict[str, Callable[[_Context], float]] = {
    "almost_complex": _almost_complex,
    "hermitian": _hermitian,
    "inverse_system": _inverse_system,
    "nijenhuis": _nijenhuis,
    "closedness": _closedness,
    "connection_vs_oracle": _connection_vs_oracle,
    "derivative_closed_form_vs_fd": _derivative_vs_fd,
    "curvature_vs_oracle": _curvature_vs_oracle,
    "k0_consistency": _k0_consistency,
    "main_theorem": _main_theorem,
    "lambda_sensitivity": _lambda_sensitivity,
}


# -- report ----------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    tolerance: float
    evaluated: int = 0
    max_residual: Optional[float] = None
    mean_residual: Optional[float] = None
    worst_point: Optional[dict] = None
    passed: bool = False
    errors: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class VerificationReport:
    scenario: dict
    suites: list
    points: dict
    environment: dict
    passed: bool
    domain_failure: bool

    def suite(self, name: str) -> SuiteResult:
        for s in self.suites:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "passed": self.passed,
            "domain_failure": self.domain_failure,
            "points": self.points,
            "suites": [asdict(s) for s in self.suites],
            "environment": self.environment,
        }


def _point_record(ctx) -> dict:
    return {"q": ctx.x.tolist(), "p": ctx.p.tolist(), "t": float(ctx.ps.point.t)}


def run_scenario(scenario: Scenario) -> VerificationReport:
    started = time.perf_counter()
    rng = np.random.default_rng(scenario.seed)
    structure = scenario.structure()
    invalid: Counter = Counter()
    contexts = []
    for x, p in sample_points(scenario, rng):
        try:
            ps = structure.at(x, p)
        except DomainError as exc:
            invalid[type(exc).__name__] += 1
            continue
        contexts.append(_Context(scenario, structure, x, p, ps))

    results = []
    for name in scenario.suites:
        res = SuiteResult(name, scenario.tolerance(name))
        fn = SUITE_FUNCTIONS[name]
        pool = contexts[: scenario.oracle_samples] if name in ORACLE_SUITES else contexts
        values, worst = [], None
        errors: Counter = Counter()
        t0 = time.perf_counter()
        for ctx in pool:
            try:
                v = float(fn(ctx))
            except DomainError as exc:
                errors[type(exc).__name__] += 1
                continue
            values.append(v)
            if worst is None or v > worst[0]:
                worst = (v, ctx)
        res.seconds = time.perf_counter() - t0
        res.evaluated = len(values)
        res.errors = dict(errors)
        if values:
            res.max_residual = float(max(values))
            res.mean_residual = float(np.mean(values))
            res.worst_point = _point_record(worst[1])
            res.passed = bool(res.max_residual < res.tolerance)
        if name == "lambda_sensitivity" and values:
            gaps = [_perturbed_gap(ctx) for ctx in pool]
            nominal = [_main_theorem(ctx) for ctx in pool]
            res.details = {
                "scale": SENSITIVITY_SCALE,
                "min_perturbed_residual": float(min(gaps)),
                "max_nominal_residual": float(max(nominal)),
            }
        results.append(res)

    n_invalid = sum(invalid.values())
    domain_failure = n_invalid > INVALID_FRACTION_LIMIT * scenario.samples
    points = {
        "requested": scenario.samples,
        "valid": len(contexts),
        "invalid": dict(sorted(invalid.items())),
        "invalid_fraction": n_invalid / scenario.samples,
    }
    environment = {
        "seed": scenario.seed,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "natlift": __version__,
        "seconds": time.perf_counter() - started,
    }
    passed = all(r.passed and not r.errors for r in results) and not domain_failure
    return VerificationReport(scenario.as_dict(), results, points, environment, passed, domain_failure)


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.3e}"


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    sc = report.scenario
    lines = [
        f"scenario {sc.get('name') or '-'}: n={sc['n']} c={sc['c']} k={sc['k']} "
        f"a1={sc['a1']} a3={sc['a3']} lambda={sc['lambda']}",
        f"points: {report.points['valid']}/{report.points['requested']} valid"
        + (f", invalid {report.points['invalid']}" if report.points["invalid"] else ""),
        f"seed {report.environment['seed']}, {report.environment['seconds']:.2f} s",
    ]
    if report.suites:
        header = f"{'suite':<30} {'n':>4} {'max':>10} {'mean':>10} {'tol':>10}  result"
        lines += ["", header, "-" * len(header)]
        for s in report.suites:
            status = "PASS" if s.passed else "FAIL"
            lines.append(
                f"{s.name:<30} {s.evaluated:>4} {_fmt(s.max_residual):>10} "
                f"{_fmt(s.mean_residual):>10} {_fmt(s.tolerance):>10}  {status}"
            )
    lines += ["", "overall: " + ("PASS" if report.passed else "FAIL")]
    return ("\n".join(lines) + "\n").encode()
