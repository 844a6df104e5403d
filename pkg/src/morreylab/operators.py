"""Discretized operators: maximal functions, truncated singular integrals and
Fourier multipliers.

Direct-quadrature operators (maximal functions, truncated kernels) treat the
input as zero outside the domain.  Multipliers use the FFT on the periodized
grid with the forward kernel ``exp(-2 pi i x xi)``; frequencies live on the
lattice of spacing ``1/(2L * pad)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.signal import fftconvolve

from .bessel import bessel_ratio
from .grid import GridError, GridFunction, GridFunctionSeq, GridSpec, sample
from .norms import ball_sums, ball_volume


class OperatorError(ValueError):
    pass


# -- kernels -----------------------------------------------------------------

def _omega_from_name(name: str) -> Callable[[np.ndarray], np.ndarray]:
    kind, _, k = name.partition(" ")
    k = int(k or 1)
    if k < 1:
        raise OperatorError("angular frequency must be >= 1 for a zero-mean Omega")
    if kind == "cos":
        return lambda th: np.cos(k * th)
    if kind == "sin":
        return lambda th: np.sin(k * th)
    raise OperatorError(f"unknown Omega family {name!r}")


@dataclass(frozen=True)
class HomogeneousKernelSpec:
    """``Omega(z/|z|) / |z|^n`` truncated to ``|z| >= epsilon``.

    For n = 1 ``omega`` is the pair (Omega(1), Omega(-1)); for n = 2 it is a
    name ``"cos k"`` / ``"sin k"`` for a mode on the unit circle.
    """

    omega: Union[tuple, str]
    epsilon: float
    dim: int = 1
    smooth: bool = True

    def __post_init__(self):
        if self.dim == 1:
            if isinstance(self.omega, str) or len(self.omega) != 2:
                raise OperatorError("n=1 Omega is the pair (Omega(1), Omega(-1))")
            object.__setattr__(self, "omega", tuple(float(w) for w in self.omega))
            if abs(sum(self.omega)) > 1e-12 * max(1.0, max(map(abs, self.omega))):
                raise OperatorError("Omega must have zero mean: Omega(1) + Omega(-1) = 0")
        else:
            fn = _omega_from_name(self.omega)
            th = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
            if abs(np.mean(fn(th))) > 1e-9:
                raise OperatorError("Omega must have zero mean on the circle")
        if not self.epsilon > 0:
            raise OperatorError("truncation radius must be positive")

    @classmethod
    def hilbert(cls, epsilon: float) -> "HomogeneousKernelSpec":
        return cls((1 / math.pi, -1 / math.pi), epsilon, 1)

    def with_epsilon(self, eps: float) -> "HomogeneousKernelSpec":
        return HomogeneousKernelSpec(self.omega, eps, self.dim, self.smooth)

    def omega_sup(self) -> float:
        if self.dim == 1:
            return max(abs(w) for w in self.omega)
        th = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        return float(np.max(np.abs(_omega_from_name(self.omega)(th))))

    def kernel(self, z: np.ndarray) -> np.ndarray:
        """Kernel at offsets z of shape (..., n); zero inside the truncation."""
        r = np.sqrt(np.sum(z**2, axis=-1))
        out = np.zeros(r.shape)
        keep = r >= self.epsilon * (1 - 1e-12)
        if self.dim == 1:
            x = z[..., 0]
            ang = np.where(x > 0, self.omega[0], self.omega[1])
        else:
            ang = _omega_from_name(self.omega)(np.arctan2(z[..., 1], z[..., 0]))
        out[keep] = ang[keep] / r[keep] ** self.dim
        return out


@dataclass(frozen=True)
class StandardKernelSpec:
    """A general two-point kernel K(x, y) off the diagonal."""

    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray]
    size_const: float
    hoelder_exp: float = 1.0

    def __post_init__(self):
        if not 0 < self.hoelder_exp <= 1:
            warnings.warn(f"Hoelder exponent {self.hoelder_exp} outside (0, 1]")

    def check(self, x: np.ndarray, y: np.ndarray, x2: np.ndarray) -> dict:
        """Size and regularity ratios on sampled points (rows are points).

        Regularity is tested only where 2|x - x'| <= max(|x - y|, |x' - y|).
        """
        n = x.shape[-1]
        d = np.linalg.norm(x - y, axis=-1)
        size = np.abs(self.kernel(x, y)) * d**n
        dx = np.linalg.norm(x - x2, axis=-1)
        d2 = np.linalg.norm(x2 - y, axis=-1)
        ok = 2 * dx <= np.maximum(d, d2)
        scale = np.maximum(d, d2)[ok]
        denom = dx[ok] ** self.hoelder_exp * scale ** (-(n + self.hoelder_exp))
        reg1 = np.abs(self.kernel(x[ok], y[ok]) - self.kernel(x2[ok], y[ok])) / denom
        reg2 = np.abs(self.kernel(y[ok], x[ok]) - self.kernel(y[ok], x2[ok])) / denom
        return {"size": float(size.max(initial=0.0)),
                "size_ok": bool(np.all(size <= self.size_const * (1 + 1e-12))),
                "regularity_x": float(reg1.max(initial=0.0)),
                "regularity_y": float(reg2.max(initial=0.0)),
                "pairs_checked": int(ok.sum())}


def _offsets(spec: GridSpec) -> np.ndarray:
    """All node differences, shape ((2N-1),)*n + (n,)."""
    N, h = spec.points_per_axis, spec.h
    d = h * np.arange(-(N - 1), N)
    grids = np.meshgrid(*([d] * spec.dim), indexing="ij")
    return np.stack(grids, axis=-1)


def _convolve_kernel(values: np.ndarray, kernel: np.ndarray, spec: GridSpec) -> np.ndarray:
    """``sum_z K(y - z) f(z) h^n`` at every node y (aperiodic)."""
    N = spec.points_per_axis
    full = fftconvolve(values, kernel, mode="full")
    sl = tuple(slice(N - 1, 2 * N - 1) for _ in range(spec.dim))
    return full[sl] * spec.cell_volume


def _complex_convolve(values: np.ndarray, kernel: np.ndarray, spec: GridSpec) -> np.ndarray:
    if np.iscomplexobj(values) and np.any(values.imag):
        return (_convolve_kernel(values.real, kernel, spec)
                + 1j * _convolve_kernel(values.imag, kernel, spec))
    return _convolve_kernel(values.real, kernel, spec)


# -- maximal functions ---------------------------------------------------------

def maximal_radii(spec: GridSpec) -> np.ndarray:
    """Radii (in units of h) for the maximal function.

    Every integer radius in 1D; in 2D all radii up to 8 cells then a
    2^{1/4}-geometric ladder up to the domain diameter.
    """
    top = int(math.ceil(math.sqrt(spec.dim) * spec.points_per_axis)) + 1
    if spec.dim == 1:
        return np.arange(0, top + 1)
    small = list(range(0, 9))
    geo = np.unique(np.round(8 * 2.0 ** (np.arange(1, 64) / 4)).astype(int))
    return np.array(small + [int(g) for g in geo if 8 < g <= top] + [top])


def maximal_hl(f: GridFunction) -> GridFunction:
    """Largest average of |f| over closed node balls centered at each node."""
    spec = f.spec
    a = f.abs()
    out = np.zeros(spec.shape)
    if not np.any(a):
        return f.with_values(out)
    for m in maximal_radii(spec):
        R = m * spec.h
        avg = ball_sums(a, spec, R) * spec.cell_volume / ball_volume(spec, R)
        np.maximum(out, avg, out=out)
    return f.with_values(out)


def cz_truncated(f: GridFunction, spec: HomogeneousKernelSpec) -> GridFunction:
    g = f.spec
    if spec.dim != g.dim:
        raise OperatorError("kernel and grid dimensions differ")
    if spec.epsilon < g.h * (1 - 1e-9):
        raise OperatorError(f"truncation {spec.epsilon} below grid spacing {g.h}")
    if f.is_zero():
        return GridFunction.zeros(g)
    K = spec.kernel(_offsets(g))
    return f.with_values(_complex_convolve(f.values, K, g))


def eps_ladder(grid: GridSpec, per_octave: int = 2) -> np.ndarray:
    """Geometric truncation radii from h to the domain diameter."""
    diam = 2 * grid.half_width * math.sqrt(grid.dim)
    top = math.log2(diam / grid.h)
    ks = np.arange(0, math.floor(top * per_octave + 1e-9) + 1)
    return grid.h * 2.0 ** (ks / per_octave)


def cz_maximal(f: GridFunction, spec: HomogeneousKernelSpec,
               ladder: Optional[Sequence[float]] = None) -> GridFunction:
    ladder = eps_ladder(f.spec) if ladder is None else list(ladder)
    if len(ladder) == 0:
        raise OperatorError("empty truncation ladder")
    out = np.zeros(f.spec.shape)
    for eps in ladder:
        np.maximum(out, cz_truncated(f, spec.with_epsilon(eps)).abs(), out=out)
    return f.with_values(out)


def principal_value_trend(f: GridFunction, spec: HomogeneousKernelSpec, index,
                          ladder: Sequence[float]) -> dict:
    """Values of T_eps f at one node along a decreasing ladder, plus a
    Richardson estimate of the eps -> 0 limit from the last two rungs."""
    ladder = sorted(ladder, reverse=True)
    vals = [complex(cz_truncated(f, spec.with_epsilon(e)).values[index]) for e in ladder]
    if len(vals) >= 2:
        e1, e0 = ladder[-2], ladder[-1]
        # first-order model v(eps) = v0 + c eps
        limit = vals[-1] + (vals[-1] - vals[-2]) * e0 / (e1 - e0)
    else:
        limit = vals[-1]
    return {"eps": list(ladder), "values": vals, "extrapolated": limit}


# -- multipliers -------------------------------------------------------------

def frequencies(spec: GridSpec, pad: int = 1) -> np.ndarray:
    """Frequency lattice, shape ``(N*pad,)*n + (n,)``."""
    xi = np.fft.fftfreq(spec.points_per_axis * pad, d=spec.h)
    grids = np.meshgrid(*([xi] * spec.dim), indexing="ij")
    return np.stack(grids, axis=-1)


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


LP_PROFILES = {
    # difference of Gaussians: telescopes so that sum_j psi(2^-j xi) = 1
    "dog": lambda s: np.exp(-s) - np.exp(-4.0 * s),
    "mexican_hat": lambda s: s * np.exp(-s),
}


def lp_kernel(profile: str, x: np.ndarray, n: int) -> np.ndarray:
    """Inverse transform Psi of the profile psi at points of squared radius ``x``."""
    if profile != "dog":
        raise OperatorError(f"closed-form kernel only for 'dog', not {profile!r}")
    pi = math.pi
    return pi ** (n / 2) * np.exp(-pi**2 * x) - (pi / 4) ** (n / 2) * np.exp(-pi**2 * x / 4)


@dataclass(frozen=True)
class IntervalMultiplier:
    """Indicator of (a, b) in frequency (n = 1), value 1/2 at finite endpoints."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise OperatorError("interval multiplier needs a < b")

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        if xi.shape[-1] != 1:
            raise OperatorError("interval multipliers act on the line only")
        x = xi[..., 0]
        inside = ((x > self.a) & (x < self.b)).astype(float)
        edge = (x == self.a) | (x == self.b)
        return np.where(edge, 0.5, inside)


@dataclass(frozen=True)
class DyadicSmoothMultiplier:
    """``psi(2^-j xi)`` for a radial profile with psi(0) = 0."""

    j: int
    profile: str = "dog"

    def __post_init__(self):
        if self.profile not in LP_PROFILES:
            raise OperatorError(f"unknown profile {self.profile!r}")
        if abs(LP_PROFILES[self.profile](np.array(0.0))) > 1e-14:
            raise OperatorError("profile must vanish at the origin")

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        s = np.sum((2.0 ** (-self.j) * xi) ** 2, axis=-1)
        return LP_PROFILES[self.profile](s)


@dataclass(frozen=True)
class StronglySingularMultiplier:
    """``exp(i|xi|^b) |xi|^{-nb/2} phi(|xi|)`` with phi a smooth cut-off
    (0 on |xi| <= 1/2, 1 on |xi| >= 1)."""

    b: float

    def __post_init__(self):
        if not 0 < self.b < 1:
            raise OperatorError("strongly singular integrals need 0 < b < 1")

    def cutoff(self, r: np.ndarray) -> np.ndarray:
        return smooth_step(2.0 * r - 1.0)

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        n = xi.shape[-1]
        r = np.sqrt(np.sum(xi**2, axis=-1))
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0.5, np.exp(1j * safe**self.b) * safe ** (-n * self.b / 2) * self.cutoff(r), 0)


@dataclass(frozen=True)
class BochnerRieszMultiplier:
    """``(1 - |xi|^2)^lam`` on the closed unit ball.

    ``lam = 0`` is admitted only on the line, where it is the critical index.
    """

    lam: float
    dim: int = 1

    def __post_init__(self):
        if self.lam < 0 or (self.lam == 0 and self.dim != 1):
            raise OperatorError(f"Bochner-Riesz index {self.lam} not admitted for n={self.dim}")

    @property
    def below_critical(self) -> bool:
        return self.lam < (self.dim - 1) / 2

    def symbol(self, xi: np.ndarray) -> np.ndarray:
        s = np.sum(xi**2, axis=-1)
        return np.where(s <= 1.0, np.clip(1.0 - s, 0.0, None) ** self.lam, 0.0)


MultiplierSpec = Union[IntervalMultiplier, DyadicSmoothMultiplier,
                       StronglySingularMultiplier, BochnerRieszMultiplier]


def apply_multiplier(f: GridFunction, spec: MultiplierSpec, pad: int = 4) -> GridFunction:
    """Inverse FFT of symbol times FFT of f; ``pad`` > 1 zero-pads the period."""
    g = f.spec
    if isinstance(spec, BochnerRieszMultiplier) and spec.dim != g.dim:
        raise OperatorError("Bochner-Riesz multiplier built for a different dimension")
    if isinstance(spec, BochnerRieszMultiplier) and spec.below_critical:
        warnings.warn(f"Bochner-Riesz index {spec.lam} below the critical index")
    m = spec.symbol(frequencies(g, pad))
    N = g.points_per_axis
    vals = f.values
    if pad > 1:
        vals = np.pad(vals, [(0, N * (pad - 1))] * g.dim)
    out = np.fft.ifftn(m * np.fft.fftn(vals))
    out = out[tuple(slice(0, N) for _ in range(g.dim))]
    return f.with_values(out)


# -- Bochner-Riesz through its kernel ------------------------------------------

def bochner_riesz_constant(lam: float, n: int) -> float:
    """``Gamma(lam + 1) / pi^lam``: the exact constant for the e^{-2 pi i x xi} transform."""
    return math.gamma(lam + 1.0) / math.pi**lam


def _br_kernel(grid: GridSpec, lam: float, eps: float) -> np.ndarray:
    nu = grid.dim / 2 + lam
    z = _offsets(grid)
    r = np.sqrt(np.sum(z**2, axis=-1))
    # J_nu(2 pi r) / r^nu = (2 pi)^nu * J_nu(t)/t^nu with t = 2 pi r
    K = (2 * math.pi) ** nu * bessel_ratio(nu, 2 * math.pi * r)
    if eps > 0:
        K[r < eps * (1 - 1e-12)] = 0.0
    return K


@lru_cache(maxsize=32)
def calibrate_bochner_riesz(grid: GridSpec, lam: float, eps: float = 0.0,
                            reference: str = "(gauss 1)") -> float:
    """Constant c matching the kernel form to the multiplier form at the
    origin for a reference Gaussian."""
    g = sample(reference, grid)
    mult = apply_multiplier(g, BochnerRieszMultiplier(lam, grid.dim))
    raw = _complex_convolve(g.values, _br_kernel(grid, lam, eps), grid)
    centre = tuple(grid.points_per_axis // 2 for _ in range(grid.dim))
    return float(mult.values[centre].real / raw[centre].real)


def bochner_riesz_kernel(f: GridFunction, lam: float, eps: float = 0.0,
                         c: Optional[float] = None) -> GridFunction:
    """``c * int_{|x-y| >= eps} J_{n/2+lam}(2 pi |x-y|) / |x-y|^{n/2+lam} f(y) dy``.

    The kernel is bounded, so ``eps = 0`` keeps the diagonal (its limit value).
    ``c`` defaults to the one-point calibration against the multiplier.
    """
    grid = f.spec
    BochnerRieszMultiplier(lam, grid.dim)
    if lam < 0 or (lam == 0 and grid.dim != 1):
        raise OperatorError("Bochner-Riesz kernel needs lam > 0 (lam = 0 only for n = 1)")
    if eps and eps < grid.h * (1 - 1e-9):
        raise OperatorError("truncation below grid spacing")
    if c is None:
        c = calibrate_bochner_riesz(grid, float(lam), float(eps))
    if f.is_zero():
        return GridFunction.zeros(grid)
    return f.with_values(c * _complex_convolve(f.values, _br_kernel(grid, lam, eps), grid))


# -- operator specs ------------------------------------------------------------

LINEAR_KINDS = {"identity", "hilbert", "cz", "interval", "littlewood_paley",
                "strongly_singular", "bochner_riesz", "bochner_riesz_kernel"}
SUBLINEAR_KINDS = {"maximal", "cz_maximal"}


@dataclass(frozen=True)
class OperatorSpec:
    """JSON-friendly operator description ``{kind, params..., eps, eps_ladder}``."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in LINEAR_KINDS | SUBLINEAR_KINDS:
            raise OperatorError(f"unknown operator kind {self.kind!r}")

    @property
    def linear(self) -> bool:
        return self.kind in LINEAR_KINDS

    @classmethod
    def from_dict(cls, d: dict) -> "OperatorSpec":
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, d)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    def label(self) -> str:
        extra = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({extra})" if extra else self.kind

    def __hash__(self):
        return hash(self.label())

    def kernel_spec(self, grid: GridSpec) -> HomogeneousKernelSpec:
        eps = float(self.params.get("eps", grid.h))
        if self.kind == "hilbert" or (self.kind == "cz_maximal" and "omega" not in self.params):
            if grid.dim != 1:
                raise OperatorError("Hilbert transform is one-dimensional")
            return HomogeneousKernelSpec.hilbert(eps)
        omega = self.params["omega"]
        return HomogeneousKernelSpec(tuple(omega) if isinstance(omega, list) else omega,
                                     eps, grid.dim)

    def multiplier(self, grid: GridSpec) -> MultiplierSpec:
        p = self.params
        if self.kind == "interval":
            return IntervalMultiplier(float(p.get("a", -math.inf)), float(p.get("b", math.inf)))
        if self.kind == "littlewood_paley":
            return DyadicSmoothMultiplier(int(p["j"]), p.get("profile", "dog"))
        if self.kind == "strongly_singular":
            return StronglySingularMultiplier(float(p["b"]))
        if self.kind == "bochner_riesz":
            return BochnerRieszMultiplier(float(p["lam"]), grid.dim)
        raise OperatorError(f"{self.kind} is not a multiplier")


def apply_operator(op: OperatorSpec, f: GridFunction) -> GridFunction:
    k = op.kind
    if k == "identity":
        return f
    if k == "maximal":
        return maximal_hl(f)
    if k in ("hilbert", "cz"):
        return cz_truncated(f, op.kernel_spec(f.spec))
    if k == "cz_maximal":
        ladder = op.params.get("eps_ladder")
        return cz_maximal(f, op.kernel_spec(f.spec), ladder)
    if k == "bochner_riesz_kernel":
        return bochner_riesz_kernel(f, float(op.params["lam"]), float(op.params.get("eps", 0.0)))
    return apply_multiplier(f, op.multiplier(f.spec), int(op.params.get("pad", 4)))


def apply_vector(ops: Sequence[OperatorSpec], seq: GridFunctionSeq) -> GridFunctionSeq:
    if len(ops) != len(seq):
        raise OperatorError(f"{len(ops)} operators for {len(seq)} functions")
    return GridFunctionSeq(seq.spec, tuple(apply_operator(o, f) for o, f in zip(ops, seq)))


# -- hypothesis checks -------------------------------------------------------

def distance_to_support(f: GridFunction) -> np.ndarray:
    """Euclidean distance from each node to the nearest node where f != 0."""
    from scipy.ndimage import distance_transform_edt
    mask = f.values != 0
    if not np.any(mask):
        return np.full(f.spec.shape, np.inf)
    return distance_transform_edt(~mask) * f.spec.h


def singular_potential(f: GridFunction) -> np.ndarray:
    """``int |f(z)| |y - z|^{-n} dz`` at every node, diagonal excluded."""
    g = f.spec
    z = _offsets(g)
    r = np.sqrt(np.sum(z**2, axis=-1))
    K = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0) ** g.dim, 0.0)
    return _convolve_kernel(f.abs(), K, g)


def kernel_domination_profile(op: Union[OperatorSpec, Callable], f: GridFunction,
                              min_dist: Optional[float] = None):
    """Ratios |Tf(y)| / int |f||y-z|^{-n} at admissible nodes; NaN elsewhere."""
    g = f.spec
    min_dist = 2 * g.h if min_dist is None else min_dist
    if f.is_zero():
        return np.full(g.shape, np.nan)
    adm = distance_to_support(f) >= min_dist * (1 - 1e-9)
    if not np.any(adm):
        raise OperatorError("no admissible evaluation point outside the support")
    Tf = op(f) if callable(op) and not isinstance(op, OperatorSpec) else apply_operator(op, f)
    den = singular_potential(f)
    ratio = np.full(g.shape, np.nan)
    ok = adm & (den > 0)
    ratio[ok] = Tf.abs()[ok] / den[ok]
    return ratio


def kernel_domination_constant(op, f: GridFunction, min_dist: Optional[float] = None) -> float:
    if f.is_zero():
        return 0.0
    ratio = kernel_domination_profile(op, f, min_dist)
    return float(np.nanmax(ratio)) if np.any(np.isfinite(ratio)) else 0.0


def cotlar_constant(f: GridFunction, spec: HomogeneousKernelSpec,
                    ladder: Optional[Sequence[float]] = None) -> float:
    """Smallest c with T* f <= c (M(|T f|) + M f) at every node."""
    tstar = cz_maximal(f, spec, ladder).abs()
    tf = cz_truncated(f, spec.with_epsilon(f.spec.h))
    rhs = maximal_hl(tf.with_values(tf.abs())).abs() + maximal_hl(f).abs()
    ok = rhs > 1e-14 * max(rhs.max(), 1e-300)
    if not np.any(ok):
        return 0.0
    return float(np.max(tstar[ok] / rhs[ok]))


def square_function_kernel_constant(grid: GridSpec, profile: str = "dog",
                                    j_span: int = 40) -> float:
    """``sup_x |x|^n (sum_j |Psi_j(x)|^2)^{1/2}`` over nonzero grid nodes,
    with ``Psi_j = 2^{jn} Psi(2^j .)`` and |j| <= j_span."""
    n = grid.dim
    pts = grid.points()
    s = np.sum(pts**2, axis=-1)
    nz = s > 0
    s = s[nz]
    acc = np.zeros(s.shape)
    for j in range(-j_span, j_span + 1):
        acc += (2.0 ** (j * n) * lp_kernel(profile, 4.0**j * s, n)) ** 2
    return float(np.max(np.sqrt(acc) * s ** (n / 2)))


def lp_symbol_sum(grid: GridSpec, js: Sequence[int], profile: str = "dog") -> float:
    """``max_xi sum_j |psi(2^-j xi)|^2`` on the frequency lattice."""
    xi = frequencies(grid)
    tot = sum(np.abs(DyadicSmoothMultiplier(j, profile).symbol(xi)) ** 2 for j in js)
    return float(np.max(tot))
