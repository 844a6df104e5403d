"""Config-driven experiment runner.

Each check name maps to one module invariant.  Checks run over the corpus
(and operator list where relevant) and emit flat records that serialize to
JSON and CSV.  Per-task random generators are derived from the seed and the
task identity, so reports do not depend on execution order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import decomp, norms, operators, predual
from .expr import dilated, parse, translated
from .grid import GridFunction, GridFunctionSeq, GridSpec, pointwise_lq, sample
from .norms import MorreyParams, ParamError, PredualParams

DEFAULT_CORPUS_1D = (
    "(chi -1 1)",
    "(chi 0 1)",
    "(bump 0 1)",
    "(bump 1 0.5)",
    "(bump -2 1.5)",
    "(gauss 1)",
    "(gauss 0.5)",
    "(dilate 2 (chi -1 1))",
    "(translate 1.5 (chi -0.5 0.5))",
    "(sum (chi 0 1) (bump -1 0.5))",
    "(sum (gauss 0.5) (translate 2 (bump 0 0.75)))",
    "(dilate 0.5 (bump 0 1))",
    "(translate -1 (dilate 4 (bump 0 1)))",
    "(chi -3 3)",
    "(sum (chi -2 -1) (chi 1 2))",
    "(bump 0 3)",
    "(translate 0.25 (gauss 0.25))",
    "(sum (bump 0 1) (bump 0 0.25))",
    "(dilate 2 (sum (chi 0 1) (chi 1.5 2)))",
    "(sum (chi -0.5 0.5) (translate 2 (dilate 8 (bump 0 1))))",
)

DEFAULT_CORPUS_2D = (
    "(chi -1 1)",
    "(chi 0 1)",
    "(bump 0,0 1)",
    "(bump 1,0.5 0.75)",
    "(gauss 1)",
    "(dilate 2 (chi -1 1))",
    "(translate 1,-1 (chi -0.5 0.5))",
    "(sum (chi 0 1) (bump -1,-1 0.5))",
    "(dilate 0.5 (bump 0,0 1))",
    "(sum (bump 0,0 1) (bump 0,0 0.25))",
)

DEFAULT_OPERATORS_1D = (
    {"kind": "maximal"},
    {"kind": "hilbert"},
    {"kind": "cz_maximal"},
    {"kind": "interval", "a": 0.0},
    {"kind": "littlewood_paley", "j": 0},
    {"kind": "strongly_singular", "b": 0.5},
    {"kind": "bochner_riesz", "lam": 0.0},
    {"kind": "bochner_riesz_kernel", "lam": 0.5},
)

# harness tolerances; the quadrature tolerance depends on dimension
TOL = {
    "quadrature": {1: 0.02, 2: 0.05},
    "stability": 1.25,
    "equivalence_shift": 0.10,
    "identity": 1e-10,
    "riesz_projection": 0.03,
    "bochner_riesz_forms": 0.05,
    "partition": 1e-12,
    "bruteforce": 1e-12,
    "linearity": 1e-9,
}

MAX_POINTS = 1 << 22
MAX_CORPUS = 500


class HarnessError(ValueError):
    pass


def default_corpus(dim: int) -> tuple[str, ...]:
    return DEFAULT_CORPUS_1D if dim == 1 else DEFAULT_CORPUS_2D


def _parse_space(d: dict, n: int) -> tuple[MorreyParams, PredualParams]:
    p = float(d["p"])
    if "r" in d:
        m = MorreyParams(p, float(d["r"])).check(n)
        return m, PredualParams(m.p_conj, -n - m.r).check(n)
    if "rho" in d:
        pr = PredualParams(p, float(d["rho"])).check(n)
        return pr.dual(n).check(n), pr
    raise ParamError("space needs p and either r or rho")


@dataclass
class ExperimentConfig:
    grid: GridSpec
    space: dict
    corpus: list[str]
    operators: list[operators.OperatorSpec]
    checks: list[str]
    seed: int = 0
    output_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        n = self.grid.dim
        self.morrey, self.predual = _parse_space(self.space, n)
        self.q = float(self.space.get("q", 2.0))
        if self.grid.points_per_axis ** n * 2 ** n > MAX_POINTS:
            raise HarnessError("grid too large for refinement checks")
        if len(self.corpus) > MAX_CORPUS:
            raise HarnessError(f"corpus larger than {MAX_CORPUS}")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise HarnessError(f"unknown check(s): {', '.join(unknown)}")
        for e in self.corpus:
            parse(e)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        g = d.get("grid", {})
        grid = GridSpec(int(g.get("dim", 1)), float(g.get("half_width", 8.0)),
                        int(g.get("points_per_axis", 1024)))
        corpus = d.get("corpus")
        ops = d.get("operators")
        return cls(
            grid=grid,
            space=dict(d.get("space", {"p": 2.0, "r": -0.25})),
            corpus=list(default_corpus(grid.dim) if corpus is None else corpus),
            operators=[operators.OperatorSpec.from_dict(o)
                       for o in (DEFAULT_OPERATORS_1D if ops is None else ops)],
            checks=list(d.get("checks", [])),
            seed=int(d.get("seed", 0)),
            output_path=d.get("output_path"),
            workers=int(d.get("workers", 1)),
        )

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "space": self.space,
            "corpus": list(self.corpus),
            "operators": [o.to_dict() for o in self.operators],
            "checks": list(self.checks),
            "seed": self.seed,
            "output_path": self.output_path,
        }


@dataclass
class Record:
    check: str
    function: str
    operator: str
    value: Optional[float]
    resolution: list[int]
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"check": self.check, "function": self.function, "operator": self.operator,
                "value": self.value, "resolution": self.resolution, "pass": self.passed,
                "details": self.details}


CSV_COLUMNS = ("check", "function", "operator", "value", "resolution", "pass")


@dataclass
class ExperimentReport:
    config: dict
    records: list[Record]
    timestamp: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {"config": self.config, "seed": self.config.get("seed"),
                "timestamp": self.timestamp, "records": [r.to_dict() for r in self.records]}

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        return records_to_csv([r.to_dict() for r in self.records])


def records_to_csv(records: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        res = r["resolution"]
        w.writerow([r["check"], r["function"], r["operator"],
                    "" if r["value"] is None else repr(float(r["value"])),
                    "/".join(str(x) for x in res), "pass" if r["pass"] else "FAIL"])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# -- shared helpers ------------------------------------------------------------

@lru_cache(maxsize=512)
def _sampled(expr: str, grid: GridSpec) -> GridFunction:
    return sample(expr, grid)


def _rng(seed: int, *parts) -> np.random.Generator:
    key = [seed] + [zlib.crc32(str(p).encode()) for p in parts]
    return np.random.default_rng(np.random.SeedSequence(key))


def _rel(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a - b) / abs(b)


NOISE_FLOOR = 1e-12


def stability_quotient(values: Sequence[float], floor: float = NOISE_FLOOR) -> float:
    """max/min of nonnegative dimensionless measurements.

    Values at or below ``floor`` are roundoff and count as zero: 1 when all
    vanish, inf when only some do.
    """
    v = [float(x) if x > floor else 0.0 for x in values]
    hi, lo = max(v), min(v)
    if hi == 0:
        return 1.0
    if lo <= 0 or not math.isfinite(hi):
        return math.inf
    return hi / lo


def support_radius(f: GridFunction) -> float:
    nz = f.values != 0
    if not np.any(nz):
        return 0.0
    return float(f.spec.radius()[nz].max())


Space = Union[float, MorreyParams]


def space_norm(f: GridFunction, space: Space) -> float:
    if isinstance(space, MorreyParams):
        return morrey_value(f, space)
    return norms.lp_norm(f, float(space))


def morrey_value(f: GridFunction, params: MorreyParams) -> float:
    return norms.morrey_norm_dyadic(f, params).value


@dataclass
class BoundRatioTable:
    operator: str
    space: str
    rows: list[tuple[str, int, float]]
    per_resolution_max: list[float]
    max_ratio: float
    stability_quotient: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _space_label(space: Space) -> str:
    if isinstance(space, MorreyParams):
        return f"L^{space.r}_{space.p}"
    return f"L_{float(space)}"


def bound_ratio(op: operators.OperatorSpec, space: Space, corpus: Sequence[str],
                refinements: Sequence[GridSpec]) -> BoundRatioTable:
    """``||T f||_X / ||f||_X`` per (function, resolution), with the max ratio and
    the max/min of the per-resolution maxima."""
    if not corpus:
        raise HarnessError("bound_ratio needs a nonempty corpus")
    rows = []
    maxima = []
    for grid in refinements:
        best = 0.0
        for e in corpus:
            f = _sampled(e, grid)
            den = space_norm(f, space)
            if den == 0:
                raise HarnessError(f"zero-norm input {e}")
            ratio = space_norm(operators.apply_operator(op, f), space) / den
            rows.append((e, grid.points_per_axis, ratio))
            best = max(best, ratio)
        maxima.append(best)
    return BoundRatioTable(op.label(), _space_label(space), rows, maxima, max(maxima),
                           stability_quotient(maxima))


# -- checks --------------------------------------------------------------------

@dataclass
class Task:
    check: str
    function: str = "-"
    operator: Optional[operators.OperatorSpec] = None


@dataclass
class CheckDef:
    fn: Callable
    scope: str  # "function", "function_operator", "operator", "corpus", "global"
    invariant: str


CHECKS: dict[str, CheckDef] = {}


def register(name: str, scope: str, invariant: str):
    def deco(fn):
        CHECKS[name] = CheckDef(fn, scope, invariant)
        return fn
    return deco


def _res(cfg, refined=False) -> list[int]:
    N = cfg.grid.points_per_axis
    return [N, 2 * N] if refined else [N]


@register("norm_collapse", "function", "morrey_norm_dyadic at r = -n/p equals lp_norm")
def _check_collapse(cfg: ExperimentConfig, e: str, op=None):
    n, p = cfg.grid.dim, cfg.morrey.p
    f = _sampled(e, cfg.grid)
    a = morrey_value(f, MorreyParams(p, -n / p))
    b = norms.lp_norm(f, p)
    err = _rel(a, b)
    return Record("norm_collapse", e, "-", err, _res(cfg), err <= TOL["quadrature"][n],
                  {"morrey": a, "lp": b})


@register("dilation_covariance", "function", "||f(2^k .)|| = 2^{kr} ||f|| for k in {-1,0,1,2}")
def _check_dilation(cfg: ExperimentConfig, e: str, op=None):
    n = cfg.grid.dim
    base = morrey_value(_sampled(e, cfg.grid), cfg.morrey)
    errs = {}
    for k in (-1, 0, 1, 2):
        fk = sample(dilated(parse(e), 2.0**k), cfg.grid)
        errs[k] = _rel(morrey_value(fk, cfg.morrey), 2.0 ** (k * cfg.morrey.r) * base)
    worst = max(errs.values())
    return Record("dilation_covariance", e, "-", worst, _res(cfg), worst <= TOL["quadrature"][n],
                  {"errors": errs, "base": base})


@register("translation_invariance", "function", "morrey_norm_ball invariant under grid translations")
def _check_translation(cfg: ExperimentConfig, e: str, op=None):
    g = cfg.grid
    shift = 16 * g.h
    v = np.full(g.dim, shift)
    centers = norms.default_centers(g)
    f = _sampled(e, g)
    ft = sample(translated(parse(e), tuple(v) if g.dim > 1 else shift), g)
    a = norms.morrey_norm_ball(f, cfg.morrey, centers=centers).value
    b = norms.morrey_norm_ball(ft, cfg.morrey, centers=centers + v).value
    err = _rel(b, a)
    return Record("translation_invariance", e, "-", err, _res(cfg), err <= TOL["quadrature"][g.dim],
                  {"shift": shift})


@register("monotonicity", "function", "|g| <= |f| implies every norm of g <= that of f")
def _check_monotone(cfg: ExperimentConfig, e: str, op=None):
    f = _sampled(e, cfg.grid)
    u = _rng(cfg.seed, "monotonicity", e).uniform(0, 1, cfg.grid.shape)
    g = f * GridFunction(cfg.grid, u)
    worst = 0.0
    for fn in (lambda x: norms.lp_norm(x, cfg.morrey.p),
               lambda x: morrey_value(x, cfg.morrey),
               lambda x: norms.morrey_norm_ball(x, cfg.morrey).value):
        a, b = fn(g), fn(f)
        worst = max(worst, a / b if b else 0.0)
    return Record("monotonicity", e, "-", worst, _res(cfg), worst <= 1 + 1e-12)


@register("triangle_inequality", "function", "each norm functional is subadditive")
def _check_triangle(cfg: ExperimentConfig, e: str, op=None):
    rng = _rng(cfg.seed, "triangle", e)
    other = cfg.corpus[int(rng.integers(len(cfg.corpus)))]
    f, g = _sampled(e, cfg.grid), _sampled(other, cfg.grid) * complex(*rng.standard_normal(2))
    worst = 0.0
    for fn in (lambda x: norms.lp_norm(x, cfg.morrey.p),
               lambda x: morrey_value(x, cfg.morrey),
               lambda x: norms.morrey_norm_ball(x, cfg.morrey).value):
        lhs, rhs = fn(f + g), fn(f) + fn(g)
        worst = max(worst, lhs / rhs if rhs else 0.0)
    return Record("triangle_inequality", e, "-", worst, _res(cfg), worst <= 1 + 1e-12,
                  {"partner": other})


@register("dyadic_ball_equivalence", "corpus",
          "dyadic/ball ratios lie in a fixed interval stable under refinement")
def _check_equivalence(cfg: ExperimentConfig, corpus: Sequence[str], op=None):
    grids = (cfg.grid, cfg.grid.refined())
    recs, ends = [], []
    for grid in grids:
        ratios = []
        for e in corpus:
            f = _sampled(e, grid)
            b = norms.morrey_norm_ball(f, cfg.morrey).value
            ratios.append(morrey_value(f, cfg.morrey) / b if b else math.nan)
        ends.append((np.nanmin(ratios), np.nanmax(ratios)))
        recs.append(ratios)
    out = [Record("dyadic_ball_equivalence", e, "-", recs[0][i], _res(cfg, True), bool(np.isfinite(recs[0][i])),
                  {"ratio_refined": recs[1][i]}) for i, e in enumerate(corpus)]
    if corpus:
        shift = max(_rel(ends[1][0], ends[0][0]), _rel(ends[1][1], ends[0][1]))
        C = max(ends[0][1], 1 / ends[0][0])
        out.append(Record("dyadic_ball_equivalence", "*", "-", C, _res(cfg, True),
                          shift < TOL["equivalence_shift"],
                          {"interval": [list(x) for x in ends], "endpoint_shift": shift}))
    return out


@register("embedding_chain", "function", "L_u -> Morrey -> weighted L_p ratios within slack")
def _check_embedding(cfg: ExperimentConfig, e: str, op=None):
    n, m = cfg.grid.dim, cfg.morrey
    alpha = (-n + (-n - m.r * m.p)) / 2 / m.p
    rep = norms.check_embedding_chain(_sampled(e, cfg.grid), m, alpha)
    return Record("embedding_chain", e, "-", rep.ratio_weighted_over_morrey, _res(cfg),
                  not rep.violations, rep.to_dict())


@register("weak_duality", "function", "predual lower certificate <= DP upper cost")
def _check_weak_duality(cfg: ExperimentConfig, e: str, op=None):
    f = _sampled(e, cfg.grid)
    up = predual.predual_upper_bound(f, cfg.predual)
    lo = predual.predual_lower_bound(f, cfg.predual, upper=up)
    ok = lo.weak_duality_ok
    ratio = lo.lower_bound / up.total_cost if up.total_cost else 0.0
    return Record("weak_duality", e, "-", ratio, _res(cfg), ok,
                  {"lower": lo.lower_bound, "upper": up.total_cost, "witness": lo.witness_label})


@register("reconstruction", "function", "atomic decomposition sums exactly to its target")
def _check_reconstruction(cfg: ExperimentConfig, e: str, op=None):
    f = _sampled(e, cfg.grid)
    dec = predual.predual_upper_bound(f, cfg.predual)
    err = float(np.max(np.abs(dec.reconstruct().values - f.values)))
    return Record("reconstruction", e, "-", err, _res(cfg), err == 0.0, {"atoms": len(dec.atoms)})


@register("dp_bruteforce", "global", "DP cost equals the exhaustive depth-3 partition minimum")
def _check_bruteforce(cfg: ExperimentConfig, _=None, op=None, trials: int = 20):
    n = cfg.grid.dim
    small = GridSpec(n, 1.0, 8)
    rng = _rng(cfg.seed, "dp_bruteforce")
    worst = 0.0
    for _ in range(trials):
        vals = rng.standard_normal(small.shape) * (rng.uniform(size=small.shape) < 0.7)
        vals[(0,) * n] = 1.0
        vals[(-1,) * n] = 1.0
        f = GridFunction(small, vals)
        j0 = small.default_levels()[0]
        root = predual.find_root(f, j0, 0)
        # three levels below the root reach single cells of the 8-cell grid
        dec = predual.predual_upper_bound(f, cfg.predual, (j0, root.level + 3))
        brute = predual.brute_force_partition_cost(f, cfg.predual, root, 3)
        worst = max(worst, _rel(dec.total_cost, brute))
    return Record("dp_bruteforce", "-", "-", worst, [8], worst <= TOL["bruteforce"], {"trials": trials})


def random_pair(cfg: ExperimentConfig, rng: np.random.Generator, length: int = 3):
    """Random vector pair (g, f) of sums of translated, dilated corpus-style pieces."""
    g = cfg.grid
    L = g.half_width

    def member():
        parts = []
        for _ in range(int(rng.integers(1, 4))):
            c = rng.uniform(-L / 3, L / 3, g.dim)
            w = rng.uniform(0.2, 1.5)
            kind = rng.integers(3)
            base = ("(bump 0 1)", "(chi -1 1)", "(gauss 0.5)")[kind]
            e = translated(dilated(parse(base), 1 / w), tuple(c) if g.dim > 1 else float(c[0]))
            amp = complex(*rng.standard_normal(2))
            parts.append(sample(e, g) * amp)
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out

    gs = GridFunctionSeq(g, tuple(member() for _ in range(length)))
    fs = GridFunctionSeq(g, tuple(member() for _ in range(length)))
    return gs, fs


@register("holder_duality", "global", "|<g,f>| <= Morrey(l_q) norm of g times predual(l_q') cost of f")
def _check_holder(cfg: ExperimentConfig, _=None, op=None, pairs: int = 50):
    rng = _rng(cfg.seed, "holder_duality")
    worst = 0.0
    for _ in range(pairs):
        q = float(rng.choice([1.25, 1.5, 2.0, 3.0, 5.0]))
        qc = q / (q - 1)
        gs, fs = random_pair(cfg, rng)
        lhs = abs(predual.pairing(gs, fs))
        mg = norms.morrey_norm_vector(gs, cfg.morrey, q).value
        up = predual.predual_upper_bound(pointwise_lq(fs, qc), cfg.predual)
        worst = max(worst, lhs / (mg * up.total_cost))
    return Record("holder_duality", "-", "-", worst, _res(cfg), worst <= 1 + predual.DUALITY_RTOL,
                  {"pairs": pairs})


@register("kernel_domination", "function_operator",
          "|Tf(y)| <= c int |f(z)| |y-z|^-n dz off the support, c stable under refinement")
def _check_kernel_domination(cfg: ExperimentConfig, e: str, op: operators.OperatorSpec):
    vals = []
    for grid in (cfg.grid, cfg.grid.refined()):
        f = _sampled(e, grid)
        if not np.any(operators.distance_to_support(f) >= 2 * grid.h):
            return Record("kernel_domination", e, op.label(), None, _res(cfg, True), True,
                          {"skipped": "no evaluation point off the support"})
        vals.append(operators.kernel_domination_constant(op, f))
    sq = stability_quotient(vals)
    return Record("kernel_domination", e, op.label(), vals[0], _res(cfg, True),
                  bool(np.isfinite(vals[0])) and sq < TOL["stability"],
                  {"refined": vals[1], "stability_quotient": sq})


def _partner(cfg: ExperimentConfig, e: str, tag: str) -> GridFunction:
    rng = _rng(cfg.seed, tag, e)
    other = cfg.corpus[int(rng.integers(len(cfg.corpus)))]
    return _sampled(other, cfg.grid) * complex(*rng.standard_normal(2))


@register("linearity", "function_operator", "linear operators are additive and homogeneous")
def _check_linearity(cfg: ExperimentConfig, e: str, op: operators.OperatorSpec):
    if not op.linear:
        return []
    f, g = _sampled(e, cfg.grid), _partner(cfg, e, "linearity")
    c = complex(*_rng(cfg.seed, "linearity-c", e).standard_normal(2))
    T = lambda x: operators.apply_operator(op, x).values
    lhs = T(f * c + g)
    rhs = c * T(f) + T(g)
    scale = max(np.max(np.abs(rhs)), 1e-300)
    err = float(np.max(np.abs(lhs - rhs)) / scale)
    return Record("linearity", e, op.label(), err, _res(cfg), err <= TOL["linearity"])


@register("sublinearity", "function_operator", "maximal operators: T(f+g) <= Tf + Tg, T(-f) = Tf")
def _check_sublinearity(cfg: ExperimentConfig, e: str, op: operators.OperatorSpec):
    if op.linear:
        return []
    f, g = _sampled(e, cfg.grid), _partner(cfg, e, "sublinearity")
    T = lambda x: operators.apply_operator(op, x).abs()
    tf, tg, tfg = T(f), T(g), T(f + g)
    excess = float(np.max(tfg - tf - tg))
    sym = float(np.max(np.abs(T(-f) - tf)))
    scale = max(float(np.max(tf + tg)), 1e-300)
    ok = excess <= 1e-12 * scale and sym == 0.0
    return Record("sublinearity", e, op.label(), excess / scale, _res(cfg), ok, {"symmetry_error": sym})


@register("cotlar", "corpus", "T* f <= c (M(|Tf|) + Mf) with one fitted constant c")
def _check_cotlar(cfg: ExperimentConfig, corpus: Sequence[str], op=None):
    if cfg.grid.dim != 1:
        return []
    consts = []
    out = []
    for e in corpus:
        cs = [operators.cotlar_constant(_sampled(e, g), operators.HomogeneousKernelSpec.hilbert(g.h))
              for g in (cfg.grid, cfg.grid.refined())]
        consts.append(cs)
        out.append(Record("cotlar", e, "hilbert", cs[0], _res(cfg, True), bool(np.isfinite(cs[0])),
                          {"refined": cs[1]}))
    if consts:
        c0 = max(c[0] for c in consts)
        c1 = max(c[1] for c in consts)
        sq = stability_quotient([c0, c1])
        out.append(Record("cotlar", "*", "hilbert", c0, _res(cfg, True), sq < TOL["stability"],
                          {"refined": c1, "stability_quotient": sq}))
    return out


@register("bound_ratio", "operator", "sup ||Tf||/||f|| finite and refinement-stable on L_p and Morrey")
def _check_bound_ratio(cfg: ExperimentConfig, corpus: Sequence[str], op: operators.OperatorSpec):
    grids = (cfg.grid, cfg.grid.refined())
    out = []
    for space in (cfg.morrey.p, cfg.morrey):
        tab = bound_ratio(op, space, corpus, grids)
        ok = math.isfinite(tab.max_ratio) and tab.stability_quotient < TOL["stability"]
        out.append(Record("bound_ratio", "*", op.label(), tab.max_ratio, _res(cfg, True), ok,
                          {"space": tab.space, "per_resolution_max": tab.per_resolution_max,
                           "stability_quotient": tab.stability_quotient}))
    return out


@register("partition_of_unity", "global", "annulus family sums to 1 with the prescribed supports")
def _check_partition(cfg: ExperimentConfig, _=None, op=None):
    g = cfg.grid
    worst, support_ok, range_ok = 0.0, True, True
    rng = _rng(cfg.seed, "partition")
    for R in (0.5, 1.0, 2.0):
        x = rng.uniform(-g.half_width / 2, g.half_width / 2, g.dim)
        part = decomp.build_annulus_partition(x, R, g)
        total = sum(m.values.real for m in part.members)
        worst = max(worst, float(np.max(np.abs(total - 1))))
        dist = g.radius(part.center)
        for i, m in enumerate(part.members):
            v = m.values.real
            range_ok &= bool(np.all((v >= 0) & (v <= 1)))
            nz = v != 0
            if i == 0:
                support_ok &= bool(np.all(v[dist <= 2 * R] == 1)) and bool(np.all(dist[nz] < 4 * R))
            else:
                support_ok &= bool(np.all((dist[nz] > 2.0**i * R) & (dist[nz] < 2.0 ** (i + 2) * R)))
    return Record("partition_of_unity", "-", "-", worst, _res(cfg),
                  worst <= TOL["partition"] and support_ok and range_ok,
                  {"support_ok": support_ok, "range_ok": range_ok})


def near_far_constants(op: operators.OperatorSpec, corpus: Sequence[str], grid: GridSpec,
                       params: MorreyParams, radii=(0.5, 1.0, 2.0), shifts=(0.0, 1.5),
                       dilation: float = 1.0) -> dict:
    """Sup over (function, x, R) of the near and far ratios, for the pair
    (f(dilation .), R / dilation)."""
    per_r = []
    for R in radii:
        near = far = term = 0.0
        for e in corpus:
            ex = parse(e) if dilation == 1 else dilated(parse(e), dilation)
            f = sample(ex, grid)
            if f.is_zero():
                continue
            for s in shifts:
                x = np.full(grid.dim, s / dilation)
                rep = decomp.near_far_split(f, x, R / dilation, op, params)
                near, far = max(near, rep.near_ratio), max(far, rep.far_ratio)
                term = max(term, rep.far_termwise_ratio)
        per_r.append({"R": R, "near": near, "far": far, "far_termwise": term})
    return {"near": max(r["near"] for r in per_r), "far": max(r["far"] for r in per_r),
            "far_termwise": max(r["far_termwise"] for r in per_r), "per_R": per_r}


@register("near_far_split", "operator",
          "near/far ratios bounded by a constant stable under refinement and dilation of (f, R)")
def _check_near_far(cfg: ExperimentConfig, corpus: Sequence[str], op: operators.OperatorSpec):
    runs = {
        "base": near_far_constants(op, corpus, cfg.grid, cfg.morrey),
        "refined": near_far_constants(op, corpus, cfg.grid.refined(), cfg.morrey),
        "dilated": near_far_constants(op, corpus, cfg.grid, cfg.morrey, dilation=2.0),
    }
    out = []
    for part in ("near", "far"):
        vals = [runs[k][part] for k in runs]
        sq = stability_quotient(vals)
        out.append(Record("near_far_split", part, op.label(), vals[0], _res(cfg, True),
                          sq < TOL["stability"],
                          {"refined": vals[1], "dilated": vals[2], "stability_quotient": sq,
                           "per_R": runs["base"]["per_R"]}))
    return out


@register("far_field", "function_operator", "|x|^n |Tf(x)| bounded for |x| >= 2 Rbar, stable")
def _check_far_field(cfg: ExperimentConfig, e: str, op: operators.OperatorSpec):
    vals = []
    for grid in (cfg.grid, cfg.grid.refined()):
        f = _sampled(e, grid)
        rbar = support_radius(f)
        if rbar == 0 or grid.half_width < 4 * rbar:
            return Record("far_field", e, op.label(), None, _res(cfg, True), True,
                          {"skipped": "support too wide for the domain"})
        vals.append(decomp.far_field_decay(operators.apply_operator(op, f), rbar, cfg.q))
    sq = stability_quotient([v.decay_statistic for v in vals])
    return Record("far_field", e, op.label(), vals[0].decay_statistic, _res(cfg, True),
                  bool(np.isfinite(vals[0].decay_statistic)) and sq < TOL["stability"],
                  {"sup_statistic": vals[0].sup_statistic, "fit_residual": vals[0].fit_residual,
                   "refined": vals[1].decay_statistic, "stability_quotient": sq})


@register("mollify_trend", "function", "||f * psi_l - f|| decreases along l = 2, 4, 8, 16")
def _check_mollify(cfg: ExperimentConfig, e: str, op=None):
    f = _sampled(e, cfg.grid)
    errs = [morrey_value(decomp.mollify(f, decomp.MollifierSpec(l)) - f, cfg.morrey)
            for l in (2, 4, 8, 16)]
    ok = all(b < a or a == b == 0 for a, b in zip(errs, errs[1:]))
    return Record("mollify_trend", e, "-", errs[-1], _res(cfg), ok, {"errors": errs})


def multiplier_identities(f: GridFunction) -> dict:
    """Relative errors of the multiplier identities on one input."""
    g = f.spec
    out = {}
    nf = np.linalg.norm(f.values)
    if nf == 0:
        return {k: 0.0 for k in ("identity", "riesz_projection", "tb_annihilation", "bochner_riesz_forms")}
    full = operators.apply_multiplier(f, operators.IntervalMultiplier(-math.inf, math.inf))
    out["identity"] = float(np.linalg.norm(full.values - f.values) / nf)
    if g.dim == 1:
        proj = operators.apply_multiplier(f, operators.IntervalMultiplier(0.0, math.inf))
        hf = operators.cz_truncated(f, operators.HomogeneousKernelSpec.hilbert(g.h))
        ref = (f.values + 1j * hf.values) / 2
        out["riesz_projection"] = float(np.linalg.norm(proj.values - ref) / np.linalg.norm(ref))
    # band-limit on the periodic lattice itself, then T_b must vanish there
    xi = operators.frequencies(g, 1)
    low = np.sqrt(np.sum(xi**2, axis=-1)) <= 0.5
    band = f.with_values(np.fft.ifftn(np.where(low, np.fft.fftn(f.values), 0)))
    tb = operators.apply_multiplier(band, operators.StronglySingularMultiplier(0.5), pad=1)
    out["tb_annihilation"] = float(np.linalg.norm(tb.values) / nf)
    lam = (g.dim - 1) / 2 if g.dim == 1 else 0.5
    mult = operators.apply_multiplier(f, operators.BochnerRieszMultiplier(lam, g.dim))
    ker = operators.bochner_riesz_kernel(f, lam)
    out["bochner_riesz_forms"] = float(np.linalg.norm(ker.values - mult.values)
                                       / max(np.linalg.norm(mult.values), 1e-300))
    return out


_IDENTITY_TOL = {"identity": "identity", "riesz_projection": "riesz_projection",
                 "tb_annihilation": "identity", "bochner_riesz_forms": "bochner_riesz_forms"}


@register("multiplier_identities", "function",
          "interval(R) = I, interval(0,inf) = (I + iH)/2, T_b kills low frequencies, B^lam forms agree")
def _check_multipliers(cfg: ExperimentConfig, e: str, op=None):
    errs = multiplier_identities(_sampled(e, cfg.grid))
    return [Record("multiplier_identities", e, k, v, _res(cfg), v <= TOL[_IDENTITY_TOL[k]])
            for k, v in errs.items()]


@register("square_function", "global",
          "sum_j psi(2^-j xi)^2 <= 1 and |x|^n ||{Psi_j(x)}||_l2 bounded, stable")
def _check_square_function(cfg: ExperimentConfig, _=None, op=None):
    g = cfg.grid
    js = range(-12, 13)
    s = operators.lp_symbol_sum(g, js)
    c0 = operators.square_function_kernel_constant(g)
    c1 = operators.square_function_kernel_constant(g.refined())
    sq = stability_quotient([c0, c1])
    return Record("square_function", "-", "littlewood_paley", c0, _res(cfg, True),
                  s <= 1 + 1e-12 and sq < TOL["stability"],
                  {"symbol_sum_max": s, "refined": c1, "stability_quotient": sq})


# -- runner --------------------------------------------------------------------

def _tasks(cfg: ExperimentConfig) -> list[tuple[str, object, Optional[operators.OperatorSpec]]]:
    out = []
    for name in cfg.checks:
        scope = CHECKS[name].scope
        if scope == "function":
            out += [(name, e, None) for e in cfg.corpus]
        elif scope == "function_operator":
            out += [(name, e, op) for op in cfg.operators for e in cfg.corpus]
        elif scope == "operator":
            if cfg.corpus:
                out += [(name, tuple(cfg.corpus), op) for op in cfg.operators]
        elif scope == "corpus":
            if cfg.corpus:
                out.append((name, tuple(cfg.corpus), None))
        else:
            if cfg.corpus:
                out.append((name, None, None))
    return out


def _execute(cfg: ExperimentConfig, task) -> list[Record]:
    name, arg, op = task
    res = CHECKS[name].fn(cfg, arg, op)
    if isinstance(res, Record):
        return [res]
    return list(res)


def run(config: ExperimentConfig, timestamp: bool = True) -> ExperimentReport:
    """Execute the configured checks; write JSON (and CSV beside it) if an output path is set."""
    tasks = _tasks(config)
    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        chunks = list(pool.map(lambda t: _execute(config, t), tasks))
    records = [r for chunk in chunks for r in chunk]
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S") if timestamp else ""
    report = ExperimentReport(config.to_dict(), records, stamp)
    if config.output_path:
        path = Path(config.output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_json())
        path.with_suffix(".csv").write_text(report.to_csv())
    return report
