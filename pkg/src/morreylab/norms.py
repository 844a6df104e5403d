"""Lebesgue, Morrey (dyadic and ball), weighted and vector-valued norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.signal import fftconvolve

from .grid import (Ball, DyadicCube, GridError, GridFunction, GridFunctionSeq,
                   GridSpec, offset_range, pointwise_lq)


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class MorreyParams:
    p: float
    r: float

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    def check(self, n: int) -> "MorreyParams":
        if not 1 < self.p < math.inf:
            raise ParamError(f"Morrey exponent p={self.p} outside (1, inf)")
        if not -n / self.p - 1e-12 <= self.r < 0:
            raise ParamError(f"Morrey shape r={self.r} outside [-n/p, 0) for n={n}, p={self.p}")
        return self

    def scale_exponent(self, n: int) -> float:
        """``n/p + r``, the power of 2^J weighting a cube's L_p norm."""
        return n / self.p + self.r

    def to_dict(self) -> dict:
        return {"p": self.p, "r": self.r}


@dataclass(frozen=True)
class PredualParams:
    p: float
    rho: float

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    def check(self, n: int) -> "PredualParams":
        if not 1 < self.p < math.inf:
            raise ParamError(f"predual exponent p={self.p} outside (1, inf)")
        if not -n < self.rho < -n / self.p:
            raise ParamError(f"predual shape rho={self.rho} outside (-n, -n/p) for n={n}, p={self.p}")
        return self

    def r_pair(self, n: int) -> float:
        return -n - self.rho

    def dual(self, n: int) -> MorreyParams:
        """The Morrey space paired with this predual: exponent p', shape -n - rho."""
        return MorreyParams(self.p_conj, self.r_pair(n))

    def scale_exponent(self, n: int) -> float:
        """``n/p + rho`` (negative); atom cost on Q_{J,M} is 2^{J(n/p+rho)} ||h||_p."""
        return n / self.p + self.rho

    def to_dict(self) -> dict:
        return {"p": self.p, "rho": self.rho}


@dataclass(frozen=True)
class WeightParams:
    alpha: float

    def weight(self, spec: GridSpec) -> np.ndarray:
        return (1.0 + spec.radius() ** 2) ** (self.alpha / 2.0)


@dataclass
class NormResult:
    norm_kind: str
    value: float
    params: dict = field(default_factory=dict)
    argmax_cube: Optional[DyadicCube] = None
    argmax_ball: Optional[Ball] = None
    resolution: int = 0

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        out = {"norm_kind": self.norm_kind, "params": self.params,
               "value": self.value, "resolution": self.resolution}
        if self.argmax_cube is not None:
            out["argmax_cube"] = self.argmax_cube.to_dict()
        if self.argmax_ball is not None:
            out["argmax_ball"] = {"center": list(self.argmax_ball.center),
                                  "radius": self.argmax_ball.radius}
        return out


Region = Union[DyadicCube, Ball, None]


def _pth_power_mass(absvals: np.ndarray, p: float, spec: GridSpec) -> np.ndarray:
    return absvals**p * spec.cell_volume


def lp_norm(f: GridFunction, p: float, region: Region = None) -> float:
    if p < 1:
        raise ParamError("lp_norm needs p >= 1")
    a = f.abs()
    if region is not None:
        a = a[region.mask(f.spec)]
    if a.size == 0:
        return 0.0
    peak = a.max()
    if peak == 0:
        return 0.0
    return float(peak * (np.sum((a / peak) ** p) * f.spec.cell_volume) ** (1.0 / p))


def _block_sums_axis(arr: np.ndarray, bounds: np.ndarray, axis: int) -> np.ndarray:
    """Sums of ``arr`` over index segments ``[bounds[t], bounds[t+1])`` along ``axis``."""
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (0, 1)
    padded = np.pad(arr, pad)
    sums = np.add.reduceat(padded, bounds, axis=axis)
    idx = [slice(None)] * arr.ndim
    idx[axis] = slice(0, len(bounds) - 1)
    sums = sums[tuple(idx)]
    empty = bounds[1:] <= bounds[:-1]
    if np.any(empty):
        idx = [slice(None)] * arr.ndim
        idx[axis] = empty
        sums[tuple(idx)] = 0.0
    return sums


def cube_masses(mass: np.ndarray, spec: GridSpec, level: int) -> tuple[int, np.ndarray]:
    """Sum of a node field over every level-J cube meeting the domain.

    Returns ``(m_lo, S)`` where ``S[i, (j)]`` belongs to the cube with offset
    ``m_lo + i`` per axis.  Each cube is the union of 2^n aligned half-side
    blocks, so sums are assembled from disjoint block sums without prefix-sum
    cancellation.
    """
    m_lo, m_hi = offset_range(spec, level)
    s = 2.0 ** (-level)
    ts = np.arange(m_lo - 1, m_hi + 2)
    bounds = np.array([spec.index_range(t * s, t * s)[0] for t in ts], dtype=np.intp)
    blocks = mass
    for ax in range(spec.dim):
        blocks = _block_sums_axis(blocks, bounds, ax)
    if spec.dim == 1:
        cubes = blocks[:-1] + blocks[1:]
    else:
        cubes = (blocks[:-1, :-1] + blocks[1:, :-1]) + (blocks[:-1, 1:] + blocks[1:, 1:])
    return m_lo, cubes


def level_range(spec: GridSpec, j_range: Optional[Sequence[int]]) -> tuple[int, int]:
    j_min, j_max = spec.default_levels() if j_range is None else j_range
    if j_min > j_max:
        raise GridError(f"empty level range [{j_min}, {j_max}]")
    return int(j_min), int(j_max)


def morrey_norm_dyadic(f: GridFunction, params: MorreyParams,
                       j_range: Optional[Sequence[int]] = None) -> NormResult:
    spec = f.spec
    params.check(spec.dim)
    j_min, j_max = level_range(spec, j_range)
    expo = params.scale_exponent(spec.dim)
    a = f.abs()
    peak = float(a.max()) if a.size else 0.0
    best, arg = 0.0, None
    if peak > 0:
        mass = _pth_power_mass(a / peak, params.p, spec)
        for J in range(j_min, j_max + 1):
            m_lo, S = cube_masses(mass, spec, J)
            k = int(np.argmax(S))
            val = 2.0 ** (J * expo) * max(S.flat[k], 0.0) ** (1.0 / params.p)
            if val > best:
                idx = np.unravel_index(k, S.shape)
                best, arg = val, DyadicCube(J, tuple(m_lo + i for i in idx))
        best *= peak
    if arg is None:
        arg = DyadicCube(j_min, (0,) * spec.dim)
    return NormResult("morrey_dyadic", float(best), params.to_dict(), argmax_cube=arg,
                      resolution=spec.points_per_axis)


def radius_ladder(spec: GridSpec, per_octave: int = 2) -> np.ndarray:
    """Geometric radii ``2^{k/per_octave} h`` up to ``2L``."""
    top = math.log2(2 * spec.half_width / spec.h)
    ks = np.arange(0, math.floor(top * per_octave + 1e-9) + 1)
    return spec.h * 2.0 ** (ks / per_octave)


def default_centers(spec: GridSpec, stride: int = 4) -> np.ndarray:
    """Every ``stride``-th node per axis, as node indices of shape (K, n)."""
    ax = np.arange(0, spec.points_per_axis, stride)
    grids = np.meshgrid(*([ax] * spec.dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _disk_kernel(spec: GridSpec, radius: float) -> np.ndarray:
    m = int(math.floor(radius / spec.h + 1e-9))
    off = spec.h * np.arange(-m, m + 1)
    if spec.dim == 1:
        return np.ones(2 * m + 1)
    X, Y = np.meshgrid(off, off, indexing="ij")
    return (X**2 + Y**2 <= radius**2 * (1 + 1e-12)).astype(float)


def ball_sums(field_: np.ndarray, spec: GridSpec, radius: float) -> np.ndarray:
    """Sum of a node field over the closed ball of given radius around every node.

    The field is taken to vanish outside the domain (no periodization).
    """
    m = int(math.floor(radius / spec.h + 1e-9))
    if spec.dim == 1:
        N = spec.points_per_axis
        c = np.concatenate([[0.0], np.cumsum(field_)])
        i = np.arange(N)
        lo = np.clip(i - m, 0, N)
        hi = np.clip(i + m + 1, 0, N)
        return c[hi] - c[lo]
    out = fftconvolve(field_, _disk_kernel(spec, radius), mode="same")
    return np.maximum(out, 0.0)


def ball_volume(spec: GridSpec, radius: float) -> float:
    """Discrete ball volume: node count of the ball times the cell volume."""
    return float(_disk_kernel(spec, radius).sum()) * spec.cell_volume


def morrey_norm_ball(f: GridFunction, params: MorreyParams,
                     centers: Optional[np.ndarray] = None,
                     radii: Optional[Iterable[float]] = None) -> NormResult:
    spec = f.spec
    params.check(spec.dim)
    centers = default_centers(spec) if centers is None else np.asarray(centers, dtype=np.intp).reshape(-1, spec.dim)
    radii = radius_ladder(spec) if radii is None else np.asarray(list(radii), dtype=float)
    if len(centers) == 0 or len(radii) == 0:
        raise GridError("ball norm needs nonempty center and radius sets")
    expo = params.scale_exponent(spec.dim)
    a = f.abs()
    peak = float(a.max())
    best, arg = 0.0, None
    if peak > 0:
        mass = _pth_power_mass(a / peak, params.p, spec)
        sel = tuple(centers[:, d] for d in range(spec.dim))
        for R in radii:
            S = ball_sums(mass, spec, R)[sel]
            k = int(np.argmax(S))
            val = R ** (-expo) * max(S[k], 0.0) ** (1.0 / params.p)
            if val > best:
                best = val
                arg = Ball(tuple(spec.axis[centers[k]]), float(R))
        best *= peak
    return NormResult("morrey_ball", float(best), params.to_dict(), argmax_ball=arg,
                      resolution=spec.points_per_axis)


def morrey_norm_vector(seq: GridFunctionSeq, params: MorreyParams, q: float,
                       j_range: Optional[Sequence[int]] = None) -> NormResult:
    res = morrey_norm_dyadic(pointwise_lq(seq, q), params, j_range)
    res.norm_kind = "morrey_vector"
    res.params = {**params.to_dict(), "q": q}
    return res


def weighted_norm(f: GridFunction, p: float, weight: WeightParams) -> float:
    return lp_norm(f * weight.weight(f.spec), p)


@dataclass
class EmbeddingReport:
    u: float
    lu_norm: float
    morrey_norm: float
    weighted_norm: float
    ratio_morrey_over_lu: float
    ratio_weighted_over_morrey: float
    violations: list[str]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return a / b


def check_embedding_chain(f: GridFunction, params: MorreyParams, alpha: float,
                          slack: float = 10.0,
                          j_range: Optional[Sequence[int]] = None) -> EmbeddingReport:
    """Norms along ``L_u -> L^r_p -> L_p(w_alpha)`` with ``u = -n/r``.

    The embedding constants are unknown, so a link is flagged only when the
    downstream norm exceeds ``slack`` times the upstream one.
    """
    n = f.spec.dim
    params.check(n)
    ap = alpha * params.p
    if not -n < ap < -n - params.r * params.p:
        raise ParamError(f"alpha*p={ap} outside (-n, -n - r p) = ({-n}, {-n - params.r * params.p})")
    u = -n / params.r
    lu = lp_norm(f, u)
    mo = morrey_norm_dyadic(f, params, j_range).value
    we = weighted_norm(f, params.p, WeightParams(alpha))
    r1, r2 = _ratio(mo, lu), _ratio(we, mo)
    viol = []
    if r1 > slack:
        viol.append("L_u -> Morrey")
    if r2 > slack:
        viol.append("Morrey -> weighted L_p")
    return EmbeddingReport(u, lu, mo, we, r1, r2, viol)
