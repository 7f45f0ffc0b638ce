"""Randomized campaigns over the implication checks, and their reports.

A campaign is a :class:`SuiteConfig`; running it yields a :class:`SuiteReport`
holding one :class:`ImplicationReport` per trial. Each trial draws its
instance from a seed derived from ``(config.seed, suite name, trial index)``,
so any trial can be rebuilt from its instance id and the suite seed alone
(:func:`build_instance`), and serial and parallel runs agree exactly.
"""

import csv
import dataclasses
import json
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import __version__
from .constructions import (
    derive_seed, jordan_witness, prop25_pair, random_commutant_element,
    random_normal_with_spectrum, rng,
)
from .funcalc import SpectrumFunction, apply_function
from .intertwine import (
    DEFAULT_RANK_TOL, NORM_IDENTITY_TOL, adjoint_transport_check,
    expected_dimension, flip_check, fuglede_check, intertwiner_space,
    norm_identity_check, putnam_check, selfadjoint_product_check,
    theorem_check,
)
from .matrix import as_cmatrix, matrix_from_dict, matrix_to_dict
from .report import (
    DEFAULT_CONCLUSION_TOL, DEFAULT_HYPOTHESIS_TOL, ImplicationReport,
    Tolerances, Verdict, judge,
)
from .spectral import decompose, normality_residual

__all__ = [
    "SUITES", "SCHEMA_VERSION", "TOLERANCE_ENV", "ConfigError",
    "SuiteConfig", "SuiteReport", "Instance",
    "build_instance", "check_instance", "run_suite", "emit_report",
    "load_report", "load_tolerance_overrides", "instance_seed",
]

SCHEMA_VERSION = 1
TOLERANCE_ENV = "FUGLEDE_LAB_TOLERANCES"
SUITES = (
    "theorem21", "flip", "fuglede", "putnam", "transport", "norm_identity",
    "selfadjoint_product", "prop25", "jordan", "oracle_dims",
)
EXPECTED_FAIL_SUITES = frozenset({"jordan"})

# minimum gap between distinct eigenvalues drawn by the generators
SPECTRUM_SEPARATION = 1e-2
SPECTRUM_RADIUS = 1.0


class ConfigError(ValueError):
    pass


def _pairs_to_json(functions):
    return [[f.to_dict(), g.to_dict()] for f, g in functions]


@dataclass(frozen=True)
class SuiteConfig:
    """Campaign parameters.

    `cluster_tol` of ``None`` uses the per-matrix default of the spectral
    module. `functions` restricts the ``(f, g)`` pairs of the theorem21 suite;
    empty means random draws. `fixture`, when given, replaces the randomly
    drawn ``B`` (``U`` for prop25, ``L = R`` for oracle_dims) in every trial.
    """

    suite: str
    trials: int = 100
    max_dim: int = 12
    max_distinct_eigs: int = 6
    seed: int = 0
    hypothesis_tol: float = DEFAULT_HYPOTHESIS_TOL
    conclusion_tol: float = DEFAULT_CONCLUSION_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    cluster_tol: Optional[float] = None
    functions: tuple = ()
    fixture: Optional[np.ndarray] = field(default=None, compare=False)

    def validate(self):
        if self.suite not in SUITES and self.suite != "all":
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {SUITES + ('all',)}")
        for name in ("trials", "max_dim", "max_distinct_eigs"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.max_distinct_eigs > self.max_dim:
            raise ConfigError(
                f"max_distinct_eigs={self.max_distinct_eigs} exceeds max_dim={self.max_dim}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        for name in ("hypothesis_tol", "conclusion_tol", "rank_tol", "cluster_tol"):
            v = getattr(self, name)
            if v is None and name == "cluster_tol":
                continue
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive real, got {v!r}")
        for pair in self.functions:
            if len(pair) != 2 or not all(isinstance(h, SpectrumFunction) for h in pair):
                raise ConfigError("functions must be (SpectrumFunction, SpectrumFunction) pairs")
        if self.fixture is not None:
            F = as_cmatrix(self.fixture, "fixture")
            if F.shape[0] != F.shape[1]:
                raise ConfigError(f"fixture must be square, got {F.shape}")
            if self.suite not in ("jordan", "all") and normality_residual(F) > 1e-8 \
                    and self.suite != "fuglede":
                raise ConfigError(f"suite {self.suite} needs a normal fixture matrix")
        return self

    @property
    def tolerances(self):
        return Tolerances(self.hypothesis_tol, self.conclusion_tol)

    def to_dict(self):
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
               if f.name not in ("functions", "fixture")}
        out["seed"] = int(self.seed)
        out["functions"] = _pairs_to_json(self.functions)
        out["fixture"] = None if self.fixture is None else matrix_to_dict(self.fixture)
        return out

    @classmethod
    def from_dict(cls, obj):
        kw = dict(obj)
        kw["functions"] = tuple(
            (SpectrumFunction.from_dict(f), SpectrumFunction.from_dict(g))
            for f, g in kw.get("functions", ()))
        fx = kw.get("fixture")
        kw["fixture"] = None if fx is None else matrix_from_dict(fx)
        return cls(**kw)


@dataclass
class SuiteReport:
    config: dict
    instances: list
    summary: dict
    wall_time: float
    version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @property
    def unexpected(self):
        return self.summary.get("unexpected", 0)

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "wall_time": self.wall_time,
            "instances": [r.to_dict() for r in self.instances],
        }

    @classmethod
    def from_dict(cls, obj):
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {obj.get('schema_version')!r}")
        return cls(
            config=obj["config"],
            instances=[ImplicationReport.from_dict(r) for r in obj["instances"]],
            summary=obj["summary"],
            wall_time=obj["wall_time"],
            version=obj["version"],
            schema_version=obj["schema_version"],
        )

    def same_content(self, other):
        """Equality ignoring wall time."""
        return (self.config == other.config and self.summary == other.summary
                and self.instances == other.instances and self.version == other.version)


# -- instance generation ------------------------------------------------------

@dataclass
class Instance:
    suite: str
    trial: int
    seed: int
    matrices: dict
    functions: tuple = ()

    @property
    def instance_id(self):
        return f"{self.suite}:{self.trial}:{self.seed:016x}"


def instance_seed(suite_seed, suite, trial):
    salt = zlib.crc32(suite.encode("ascii"))
    return derive_seed(derive_seed(suite_seed, salt), trial)


def _random_point(g, radius=SPECTRUM_RADIUS):
    r = radius * np.sqrt(g.uniform())
    return complex(r * np.exp(2j * np.pi * g.uniform()))


def _separated(z, points, sep=SPECTRUM_SEPARATION):
    return all(abs(z - w) >= sep for w in points)


def _grow_spectrum(g, k, closure=None, pool=None, max_tries=1000):
    """Draw `k` well-separated points.

    `closure`, when given, maps a point to candidate companions (its orbit
    under some function) that are added while room remains, so that the
    spectrum meets its own image and the intertwiner spaces are non-trivial.
    `pool` restricts draws to a fixed list of points.
    """
    points = []
    tries = 0
    while len(points) < k and tries < max_tries:
        tries += 1
        z = pool[g.integers(len(pool))] if pool is not None else _random_point(g)
        if not _separated(z, points):
            continue
        points.append(z)
        if closure is not None:
            for w in closure(z):
                if len(points) >= k:
                    break
                if abs(w) > 2.0 or not _separated(w, points):
                    break
                points.append(complex(w))
    return points


def _composition(g, n, k):
    """Random split of `n` into `k` positive parts."""
    if k == 1:
        return [n]
    cuts = np.sort(g.choice(np.arange(1, n), size=k - 1, replace=False))
    return list(np.diff(np.concatenate(([0], cuts, [n]))).astype(int))


def _size_and_count(g, cfg):
    n = int(g.integers(1, cfg.max_dim + 1))
    k = int(g.integers(1, min(cfg.max_distinct_eigs, n) + 1))
    return n, k


def _random_normal(g, cfg, closure=None, pool=None, n=None):
    if n is None:
        n, k = _size_and_count(g, cfg)
    else:
        k = int(g.integers(1, min(cfg.max_distinct_eigs, n) + 1))
    spectrum = _grow_spectrum(g, k, closure, pool)
    mult = _composition(g, n, len(spectrum))
    return random_normal_with_spectrum(spectrum, mult, int(g.integers(2 ** 63)))


def _fixture_or(cfg, make):
    return as_cmatrix(cfg.fixture, "fixture").copy() if cfg.fixture is not None else make()


def _unit_combination(g, space):
    if space.dimension == 0:
        return np.zeros(space.shape, dtype=np.complex128)
    c = g.standard_normal(space.dimension) + 1j * g.standard_normal(space.dimension)
    A = space.combine(c)
    return A / np.linalg.norm(A, "fro")


def _orbit(f, steps=3):
    def closure(z):
        out, w = [], z
        for _ in range(steps):
            w = complex(f(w))
            out.append(w)
        return out
    return closure


def _random_polynomial(g, max_degree=3):
    deg = int(g.integers(1, max_degree + 1))
    coef = [_random_point(g) for _ in range(deg + 1)]
    return SpectrumFunction.polynomial(coef)


def _draw_pair(g, cfg):
    if cfg.functions:
        return cfg.functions[int(g.integers(len(cfg.functions)))]
    def one():
        k = int(g.integers(4))
        if k == 3:
            return _random_polynomial(g)
        return SpectrumFunction.builtin(("conjugate", "square", "identity")[k])
    return one(), one()


_CONJ = SpectrumFunction.builtin("conjugate")


def build_instance(cfg, suite, trial):
    """Regenerate the matrices of trial `trial` of `suite` under `cfg`."""
    seed = instance_seed(cfg.seed, suite, trial)
    g = rng(seed)
    mats = {}
    funcs = ()
    if suite == "theorem21":
        f, gf = _draw_pair(g, cfg)
        funcs = (f, gf)
        B = _fixture_or(cfg, lambda: _random_normal(g, cfg, closure=_orbit(f)))
        d = decompose(B, cfg.cluster_tol)
        space = intertwiner_space(B, apply_function(d, f), cfg.rank_tol)
        mats = {"B": B, "A": _unit_combination(g, space)}
    elif suite in ("flip", "selfadjoint_product"):
        B = _fixture_or(cfg, lambda: _random_normal(g, cfg, closure=_orbit(_CONJ, 1)))
        space = intertwiner_space(B, B.conj().T, cfg.rank_tol)
        A = _unit_combination(g, space)
        if suite == "flip":
            mats = {"B": B, "A": A}
        else:
            # T and T* both satisfy BT = TB*, so the Hermitian part does too
            T = 0.5 * (A + A.conj().T)
            if np.linalg.norm(T) < 1e-6:
                T = 0.5j * (A - A.conj().T)
            nrm = np.linalg.norm(T)
            mats = {"B": B, "T": T / nrm if nrm > 1e-6 else np.zeros_like(T)}
    elif suite == "fuglede":
        B = _fixture_or(cfg, lambda: _random_normal(g, cfg))
        mats = {"B": B, "A": random_commutant_element(B, int(g.integers(2 ** 63)))}
    elif suite in ("putnam", "transport"):
        if cfg.fixture is not None:
            B = C = as_cmatrix(cfg.fixture).copy()
        else:
            pool = _grow_spectrum(g, cfg.max_distinct_eigs)
            n = int(g.integers(1, cfg.max_dim + 1))
            B = _random_normal(g, cfg, pool=pool, n=n)
            C = _random_normal(g, cfg, pool=pool, n=n)
        if g.uniform() < 0.75:
            A = _unit_combination(g, intertwiner_space(B, C, cfg.rank_tol))
        else:
            A = g.standard_normal(B.shape) + 1j * g.standard_normal(B.shape)
        mats = {"B": B, "C": C, "A": A}
    elif suite == "norm_identity":
        B = _fixture_or(cfg, lambda: _random_normal(g, cfg))
        n = B.shape[0]
        mats = {"B": B, "T": g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))}
    elif suite == "prop25":
        def unitary():
            n, k = _size_and_count(g, cfg)
            pool = [complex(np.exp(2j * np.pi * g.uniform())) for _ in range(4 * k)]
            spectrum = _grow_spectrum(g, k, pool=pool)
            return random_normal_with_spectrum(
                spectrum, _composition(g, n, len(spectrum)), int(g.integers(2 ** 63)))
        U = _fixture_or(cfg, unitary)
        A = random_commutant_element(U, int(g.integers(2 ** 63)))
        pair = prop25_pair(U, A)
        mats = {"U": U, "A": A, "big_B": pair.big_B, "big_A": pair.big_A}
    elif suite == "jordan":
        n = 2 + trial % max(1, cfg.max_dim - 1)
        pair = jordan_witness(n)
        mats = {"B": pair.big_B, "A": pair.big_A}
    elif suite == "oracle_dims":
        if cfg.fixture is not None:
            L = R = as_cmatrix(cfg.fixture).copy()
        else:
            pool = _grow_spectrum(g, cfg.max_distinct_eigs)
            L = _random_normal(g, cfg, pool=pool)
            R = _random_normal(g, cfg, pool=pool)
        mats = {"L": L, "R": R}
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    return Instance(suite, trial, seed, mats, funcs)


def check_instance(cfg, inst):
    """Run the check belonging to `inst.suite` and return its report."""
    m = inst.matrices
    tols = cfg.tolerances
    iid = inst.instance_id
    if inst.suite == "theorem21":
        f, g = inst.functions
        d = decompose(m["B"], cfg.cluster_tol)
        return theorem_check(m["B"], f, g, m["A"], tols, iid, d=d)
    if inst.suite == "flip":
        return flip_check(m["B"], m["A"], tols, iid, d=decompose(m["B"], cfg.cluster_tol))
    if inst.suite == "fuglede":
        return fuglede_check(m["B"], m["A"], tols, iid)
    if inst.suite == "putnam":
        return putnam_check(m["B"], m["C"], m["A"], tols, iid)
    if inst.suite == "transport":
        return adjoint_transport_check(m["B"], m["C"], m["A"], tols, iid)
    if inst.suite == "norm_identity":
        rep = norm_identity_check(m["B"], m["T"])
        rel = rep.max_discrepancy / rep.scale if rep.scale > 0 else rep.max_discrepancy
        return judge("norm_identity", normality_residual(m["B"]), rel,
                     Tolerances(cfg.hypothesis_tol, NORM_IDENTITY_TOL),
                     witness=m["T"], instance_id=iid)
    if inst.suite == "selfadjoint_product":
        return selfadjoint_product_check(m["B"], m["T"], tols, iid)
    if inst.suite == "prop25":
        return dataclasses.replace(
            flip_check(m["big_B"], m["big_A"], tols, iid), check="prop25_flip")
    if inst.suite == "jordan":
        return fuglede_check(m["B"], m["A"], tols, iid)
    if inst.suite == "oracle_dims":
        L, R = m["L"], m["R"]
        solver = intertwiner_space(L, R, cfg.rank_tol).dimension
        oracle = expected_dimension(decompose(L, cfg.cluster_tol), decompose(R, cfg.cluster_tol))
        return judge("oracle_dims", 0.0, float(abs(solver - oracle)), tols,
                     witness=scipy.linalg.block_diag(L, R), instance_id=iid)
    raise ConfigError(f"unknown suite {inst.suite!r}")


def _run_trial(cfg, suite, trial):
    return check_instance(cfg, build_instance(cfg, suite, trial))


def _summarize(instances):
    counts = {"pass": 0, "fail": 0, "vacuous": 0, "unexpected": 0}
    for r in instances:
        counts[r.verdict.value.lower()] += 1
        suite = r.instance_id.split(":", 1)[0]
        if (r.verdict is Verdict.FAIL) != (suite in EXPECTED_FAIL_SUITES):
            counts["unexpected"] += 1
    return counts


def run_suite(config, workers=1):
    """Execute a campaign.

    Parameters
    ----------
    config : SuiteConfig
    workers : int
        Process count; results do not depend on it.

    Returns
    -------
    SuiteReport
    """
    config.validate()
    suites = SUITES if config.suite == "all" else (config.suite,)
    jobs = [(s, t) for s in suites for t in range(config.trials)]
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_trial, config, s, t) for s, t in jobs]
            instances = [fut.result() for fut in futures]
    else:
        instances = [_run_trial(config, s, t) for s, t in jobs]
    wall = time.perf_counter() - start
    return SuiteReport(config.to_dict(), instances, _summarize(instances), wall)


def emit_report(report, fmt, path):
    """Write `report` to `path` as ``"json"`` (full) or ``"csv"`` (one row per instance)."""
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1)
    elif fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["instance_id", "check", "hypothesis_residual",
                        "conclusion_residual", "verdict"])
            for r in report.instances:
                w.writerow([r.instance_id, r.check, repr(r.hypothesis_residual),
                            repr(r.conclusion_residual), r.verdict.value])
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return SuiteReport.from_dict(json.load(fh))


def load_tolerance_overrides(environ=None):
    """Tolerance defaults from the JSON file named by ``FUGLEDE_LAB_TOLERANCES``."""
    environ = os.environ if environ is None else environ
    path = environ.get(TOLERANCE_ENV)
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    allowed = {"hypothesis_tol", "conclusion_tol", "rank_tol", "cluster_tol"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown tolerance keys {sorted(unknown)}")
    return {k: float(v) for k, v in data.items()}
