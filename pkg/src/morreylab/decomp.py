"""Annulus partitions of unity, near/far splitting, far-field decay and mollification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate
from scipy.signal import fftconvolve

from .grid import Ball, GridError, GridFunction, GridFunctionSeq, GridSpec, pointwise_lq
from .norms import MorreyParams, lp_norm, morrey_norm_dyadic
from .operators import OperatorSpec, apply_operator


def cubic_ramp(t: np.ndarray) -> np.ndarray:
    """1 for t <= 0, 0 for t >= 1, cubic smoothstep in between."""
    t = np.clip(t, 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


@dataclass(frozen=True, eq=False)
class AnnulusPartition:
    center: tuple[float, ...]
    base_radius: float
    members: tuple[GridFunction, ...]

    @property
    def i_max(self) -> int:
        return len(self.members) - 1

    def split(self, f: GridFunction) -> list[GridFunction]:
        return [f * phi for phi in self.members]


def default_i_max(spec: GridSpec, R: float) -> int:
    """Smallest i with 2^{i+2} R >= 2 L sqrt(n)."""
    need = 2 * spec.half_width * math.sqrt(spec.dim)
    return max(1, math.ceil(math.log2(need / R) - 2 - 1e-12))


def build_annulus_partition(x, R: float, spec: GridSpec,
                            i_max: Optional[int] = None) -> AnnulusPartition:
    """phi_0 = 1 on B_2R, supp phi_0 in B_4R; phi_i supported in
    B_{2^{i+2}R} minus B_{2^i R}; the last member absorbs everything beyond."""
    center = tuple(np.broadcast_to(np.asarray(x, dtype=float), (spec.dim,)))
    if not R > 0:
        raise GridError("base radius must be positive")
    i_max = default_i_max(spec, R) if i_max is None else i_max
    dist = spec.radius(center)
    if 2.0 ** (i_max + 2) * R < dist.max():
        raise GridError(f"i_max={i_max} leaves part of the domain uncovered")

    def eta(i: int) -> np.ndarray:
        # 1 on B_{2^{i+1}R}, 0 outside B_{2^{i+2}R}
        inner = 2.0 ** (i + 1) * R
        return cubic_ramp((dist - inner) / inner)

    members = []
    prev = None
    for i in range(i_max + 1):
        cur = np.ones(spec.shape) if i == i_max else eta(i)
        phi = cur if prev is None else cur - prev
        members.append(GridFunction(spec, phi))
        prev = cur
    return AnnulusPartition(center, float(R), tuple(members))


@dataclass
class NearFarReport:
    center: tuple[float, ...]
    radius: float
    near_ratio: float
    far_ratio: float
    far_termwise_ratio: float
    scale: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def near_far_split(f: GridFunction, x, R: float, op: OperatorSpec, params: MorreyParams,
                   i_max: Optional[int] = None,
                   j_range: Optional[Sequence[int]] = None) -> NearFarReport:
    """Norms of T(phi_0 f) and T(sum_{i>=1} phi_i f) on B_R(x), each divided
    by R^{n/p+r} ||f | L^r_p||."""
    spec = f.spec
    if R < 4 * spec.h:
        raise GridError(f"radius {R} below 4h = {4 * spec.h}")
    part = build_annulus_partition(x, R, spec, i_max)
    pieces = part.split(f)
    near = pieces[0]
    far = f - near
    ball = Ball(part.center, R)
    scale = R ** params.scale_exponent(spec.dim) * morrey_norm_dyadic(f, params, j_range).value
    if scale == 0:
        return NearFarReport(part.center, R, 0.0, 0.0, 0.0, 0.0)
    p = params.p
    near_n = lp_norm(apply_operator(op, near), p, ball) if not near.is_zero() else 0.0
    far_n = lp_norm(apply_operator(op, far), p, ball) if not far.is_zero() else 0.0
    termwise = sum(lp_norm(apply_operator(op, piece), p, ball)
                   for piece in pieces[1:] if not piece.is_zero())
    return NearFarReport(part.center, R, near_n / scale, far_n / scale, termwise / scale, scale)


@dataclass
class DecayReport:
    decay_statistic: float
    sup_statistic: float
    fit_residual: float
    t_range: tuple[float, float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def far_field_decay(seq_out: Union[GridFunctionSeq, GridFunction], support_radius: float,
                    q: float = 2.0) -> DecayReport:
    """Far-field constant c in ``||{T_j f_j(x)}||_{l_q} <= c |x|^-n``.

    ``sup_statistic`` is the sup of ``|x|^n`` times the l_q value over
    ``2 Rbar <= |x| <= L``; ``decay_statistic`` is the geometric mean of the
    same quantity over the outer half of that range (the fitted constant of a
    |x|^-n law), with ``fit_residual`` the spread of its logarithm.
    """
    if isinstance(seq_out, GridFunction):
        seq_out = GridFunctionSeq.of(seq_out)
    spec = seq_out.spec
    L = spec.half_width
    if L < 4 * support_radius:
        raise GridError(f"domain half-width {L} below 4 Rbar = {4 * support_radius}")
    v = pointwise_lq(seq_out, q).abs()
    t = spec.radius()
    lo = 2 * support_radius
    zone = (t >= lo) & (t <= L)
    w = v[zone] * t[zone] ** spec.dim
    sup = float(w.max(initial=0.0))
    outer = (t >= max(lo, L / 2)) & (t <= L)
    wo = v[outer] * t[outer] ** spec.dim
    wo = wo[wo > 0]
    if wo.size == 0:
        return DecayReport(0.0, sup, 0.0, (lo, L))
    logs = np.log(wo)
    return DecayReport(float(np.exp(logs.mean())), sup, float(logs.std()), (lo, L))


def _standard_bump(r2: np.ndarray) -> np.ndarray:
    out = np.zeros(r2.shape)
    inside = r2 < 1
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _bump_mass(n: int) -> float:
    if n == 1:
        return 2 * integrate.quad(lambda r: _standard_bump(np.array(r * r)), 0, 1)[0]
    return 2 * math.pi * integrate.quad(lambda r: r * _standard_bump(np.array(r * r)), 0, 1)[0]


@dataclass(frozen=True)
class MollifierSpec:
    """``psi_l = l^n psi(l .)`` for the normalized standard bump psi on B_1."""

    scale: int

    def __post_init__(self):
        if int(self.scale) != self.scale or self.scale < 1:
            raise GridError("mollifier scale must be a positive integer")

    def profile(self, r2: np.ndarray, n: int) -> np.ndarray:
        return _standard_bump(r2) / _bump_mass(n)

    def kernel(self, spec: GridSpec) -> np.ndarray:
        """Sampled psi_l, renormalized so its node sum times h^n is exactly 1."""
        l, h, n = self.scale, spec.h, spec.dim
        m = int(math.ceil(1.0 / (l * h)))
        off = h * np.arange(-m, m + 1)
        grids = np.meshgrid(*([off] * n), indexing="ij")
        r2 = sum(g**2 for g in grids) * l * l
        k = l**n * self.profile(r2, n)
        if k.sum() == 0:
            k = np.zeros(k.shape)
            k[(m,) * n] = 1.0 / spec.cell_volume
            return k
        return k / (k.sum() * spec.cell_volume)


def mollify(f: GridFunction, m: MollifierSpec) -> GridFunction:
    spec = f.spec
    k = m.kernel(spec) * spec.cell_volume
    vals = f.values
    if np.iscomplexobj(vals) and np.any(vals.imag):
        out = fftconvolve(vals.real, k, mode="same") + 1j * fftconvolve(vals.imag, k, mode="same")
    else:
        out = fftconvolve(vals.real, k, mode="same")
    return f.with_values(out)
