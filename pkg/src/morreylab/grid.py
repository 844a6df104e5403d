"""Sampled functions on uniform grids, dyadic cubes and pointwise l_q reduction.

Nodes sit at ``x_k = -L + k h`` with ``h = 2L/N`` and ``k = 0..N-1`` on each
axis, so the origin is always a node.  A node stands for the cell of volume
``h**n`` around it; every integral in the package is a node-value times
cell-volume sum.  Cubes are taken half-open, ``[c - s, c + s)`` per axis, so
that non-overlapping dyadic cubes split the node set exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .expr import FunctionExpr, as_expr, evaluate, singular_at_node

DEFAULT_CUBE_CAP = 2_000_000


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    dim: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if not self.half_width > 0:
            raise GridError("half_width must be positive")
        N = self.points_per_axis
        if N < 2 or N & (N - 1):
            raise GridError(f"points_per_axis must be a power of two >= 2, got {N}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def axis(self) -> np.ndarray:
        return -self.half_width + self.h * np.arange(self.points_per_axis)

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``shape + (dim,)``."""
        grids = np.meshgrid(*([self.axis] * self.dim), indexing="ij")
        return np.stack(grids, axis=-1)

    def radius(self, center=None) -> np.ndarray:
        pts = self.points()
        if center is not None:
            pts = pts - np.broadcast_to(np.asarray(center, dtype=float), (self.dim,))
        return np.sqrt(np.sum(pts**2, axis=-1))

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.dim, self.half_width, self.points_per_axis * factor)

    def index_range(self, a: float, b: float) -> tuple[int, int]:
        """Node indices ``[lo, hi)`` whose coordinate lies in ``[a, b)``, clipped."""
        L, h, N = self.half_width, self.h, self.points_per_axis
        lo = math.ceil((a + L) / h - 1e-9)
        hi = math.ceil((b + L) / h - 1e-9)
        return min(max(lo, 0), N), min(max(hi, 0), N)

    def default_levels(self) -> tuple[int, int]:
        """Cube levels from one cube covering the domain down to side 2h."""
        j_min = -math.ceil(math.log2(self.half_width)) - 1
        j_max = math.floor(math.log2(1.0 / self.h) + 1e-9)
        return j_min, j_max

    def to_dict(self) -> dict:
        return {"dim": self.dim, "half_width": self.half_width,
                "points_per_axis": self.points_per_axis}


@dataclass(frozen=True, eq=False)
class GridFunction:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.size != self.spec.points_per_axis**self.spec.dim:
            raise GridError(f"expected {self.spec.points_per_axis ** self.spec.dim} samples, got {vals.size}")
        vals = vals.reshape(self.spec.shape)
        if not np.all(np.isfinite(vals)):
            raise GridError("samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridFunction":
        return cls(spec, np.zeros(spec.shape))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.spec, values)

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _check_same(self.spec, other.spec)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _check_same(self.spec, other.spec)
        return self.with_values(self.values - other.values)

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)

    def __mul__(self, c) -> "GridFunction":
        if isinstance(c, GridFunction):
            _check_same(self.spec, c.spec)
            return self.with_values(self.values * c.values)
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not np.any(self.values)


def _check_same(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise GridError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class GridFunctionSeq:
    spec: GridSpec
    members: tuple[GridFunction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple(self.members)
        for m in members:
            _check_same(self.spec, m.spec)
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, *members: GridFunction) -> "GridFunctionSeq":
        if not members:
            raise GridError("use GridFunctionSeq(spec) for an empty sequence")
        return cls(members[0].spec, members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[GridFunction]:
        return iter(self.members)

    def __getitem__(self, i) -> GridFunction:
        return self.members[i]

    def padded(self, length: int) -> "GridFunctionSeq":
        """Zero-pad to ``length`` members (sequences are zero past their end)."""
        extra = [GridFunction.zeros(self.spec)] * max(0, length - len(self))
        return GridFunctionSeq(self.spec, self.members + tuple(extra))


@dataclass(frozen=True, order=True)
class DyadicCube:
    """``Q_{J,M} = 2^-J (M + [-1, 1]^n)``."""

    level: int
    offset: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "offset", tuple(int(m) for m in np.atleast_1d(self.offset)))

    @property
    def dim(self) -> int:
        return len(self.offset)

    @property
    def half_side(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def side(self) -> float:
        return 2.0 ** (1 - self.level)

    @property
    def center(self) -> np.ndarray:
        return self.half_side * np.asarray(self.offset, dtype=float)

    def volume(self) -> float:
        return 2.0 ** (self.dim * (1 - self.level))

    def mu_weight(self, p: float, r: float) -> float:
        return 2.0 ** (self.level * (self.dim + p * r))

    def bounds(self) -> list[tuple[float, float]]:
        s = self.half_side
        return [((m - 1) * s, (m + 1) * s) for m in self.offset]

    def children(self) -> list["DyadicCube"]:
        """The 2^n non-overlapping half-size cubes tiling this one (offsets 2M +- 1)."""
        per_axis = [(2 * m - 1, 2 * m + 1) for m in self.offset]
        return [DyadicCube(self.level + 1, combo) for combo in _product(per_axis)]

    def contains(self, x) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return all(a <= xi < b for (a, b), xi in zip(self.bounds(), x))

    def slices(self, spec: GridSpec) -> tuple[slice, ...]:
        return tuple(slice(*spec.index_range(a, b)) for a, b in self.bounds())

    def mask(self, spec: GridSpec) -> np.ndarray:
        m = np.zeros(spec.shape, dtype=bool)
        m[self.slices(spec)] = True
        return m

    def to_dict(self) -> dict:
        return {"J": self.level, "M": list(self.offset)}


def _product(per_axis: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for choices in per_axis:
        out = [prev + (c,) for prev in out for c in choices]
    return out


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise GridError("ball radius must be positive")

    def mask(self, spec: GridSpec) -> np.ndarray:
        c = np.broadcast_to(np.asarray(self.center), (spec.dim,))
        return spec.radius(c) <= self.radius


def sample(expr: FunctionExpr | str, spec: GridSpec) -> GridFunction:
    expr = as_expr(expr)
    pts = spec.points()
    if singular_at_node(expr, pts):
        raise GridError(f"{expr.text()} is singular at a grid node; give pow a truncation radius")
    return GridFunction(spec, evaluate(expr, pts))


def pointwise_lq(seq: GridFunctionSeq, q: float) -> GridFunction:
    if len(seq) == 0:
        raise GridError("pointwise_lq needs a nonempty sequence")
    if not q >= 1:
        raise GridError("q must be >= 1")
    stack = np.stack([m.abs() for m in seq])
    if np.isinf(q):
        return GridFunction(seq.spec, stack.max(axis=0))
    # scale by the max to keep |f|^q in range
    peak = stack.max(axis=0)
    safe = np.where(peak > 0, peak, 1.0)
    out = peak * np.sum((stack / safe) ** q, axis=0) ** (1.0 / q)
    return GridFunction(seq.spec, out)


def offset_range(spec: GridSpec, level: int) -> tuple[int, int]:
    """Inclusive offsets M (per axis) of level-J cubes whose closure meets [-L, L]."""
    t = spec.half_width * 2.0**level
    return math.ceil(-t - 1 - 1e-9), math.floor(t + 1 + 1e-9)


def cubes_touching(spec: GridSpec, j_min: int, j_max: int,
                   cap: int = DEFAULT_CUBE_CAP) -> list[DyadicCube]:
    if j_min > j_max:
        raise GridError(f"empty level range [{j_min}, {j_max}]")
    total = 0
    for J in range(j_min, j_max + 1):
        lo, hi = offset_range(spec, J)
        total += (hi - lo + 1) ** spec.dim
        if total > cap:
            raise GridError(f"level range [{j_min}, {j_max}] exceeds the cube cap {cap}")
    out = []
    for J in range(j_min, j_max + 1):
        lo, hi = offset_range(spec, J)
        rng = range(lo, hi + 1)
        out.extend(DyadicCube(J, m) for m in _product([rng] * spec.dim))
    return out
