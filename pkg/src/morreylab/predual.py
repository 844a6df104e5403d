"""Two-sided estimates of the atomic predual norm.

Upper bounds come from restricting ``f`` to the leaves of a non-overlapping
dyadic partition; the cheapest partition in the tree below a fixed root is
found by bottom-up dynamic programming.  Lower bounds come from pairing ``f``
with Morrey-normalized witnesses; by the discrete Hölder inequality on each
leaf, every lower bound is at most every upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .expr import FunctionExpr, as_expr
from .grid import (DyadicCube, GridError, GridFunction, GridFunctionSeq, GridSpec,
                   pointwise_lq, sample)
from .norms import (MorreyParams, PredualParams, cube_masses, level_range, lp_norm,
                    morrey_norm_dyadic)

# relative slack absorbing float rounding when the two bounds meet
DUALITY_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Atom:
    """Restriction of ``source`` to ``cube``; the piece h_{J,M} of a decomposition."""

    cube: DyadicCube
    source: GridFunction
    params: PredualParams
    piece_norm: float

    @property
    def piece(self) -> GridFunction:
        mask = self.cube.mask(self.source.spec)
        return self.source.with_values(np.where(mask, self.source.values, 0))

    def cost(self) -> float:
        expo = self.params.scale_exponent(self.cube.dim)
        return 2.0 ** (self.cube.level * expo) * self.piece_norm

    def normalized(self) -> GridFunction:
        """``a_{J,M} = piece / cost``, whose L_p norm is 2^{-J(n/p+rho)}."""
        return self.piece * (1.0 / self.cost())

    def to_dict(self) -> dict:
        return {"J": self.cube.level, "M": list(self.cube.offset),
                "cost": self.cost(), "piece_l_p_norm": self.piece_norm}


@dataclass(eq=False)
class AtomicDecomposition:
    atoms: list[Atom]
    target: GridFunction
    total_cost: float
    root: Optional[DyadicCube] = None

    def reconstruct(self) -> GridFunction:
        out = np.zeros(self.target.spec.shape, dtype=complex)
        for a in self.atoms:
            sl = a.cube.slices(self.target.spec)
            out[sl] += self.target.values[sl]
        return self.target.with_values(out)

    def to_list(self) -> list[dict]:
        return [a.to_dict() for a in self.atoms]


@dataclass(eq=False)
class DualityCertificate:
    witness: Union[GridFunction, GridFunctionSeq, None]
    witness_label: str
    witness_morrey_norm: float
    pairing_value: complex
    lower_bound: float
    upper_bound: Optional[float] = None
    candidates: list[tuple[str, float]] = field(default_factory=list)

    @property
    def gap(self) -> Optional[float]:
        return None if self.upper_bound is None else self.upper_bound - self.lower_bound

    @property
    def weak_duality_ok(self) -> bool:
        if self.upper_bound is None:
            return True
        return self.lower_bound <= self.upper_bound * (1 + DUALITY_RTOL) + 1e-300

    def to_dict(self) -> dict:
        pv = complex(self.pairing_value)
        return {"witness_expr": self.witness_label, "pairing": [pv.real, pv.imag],
                "lower": self.lower_bound, "upper": self.upper_bound, "gap": self.gap}


def pairing(g: Union[GridFunction, GridFunctionSeq],
            f: Union[GridFunction, GridFunctionSeq]) -> complex:
    """Midpoint value of ``int sum_j g_j f_j`` (bilinear, no conjugation)."""
    if isinstance(g, GridFunction):
        g = GridFunctionSeq.of(g)
    if isinstance(f, GridFunction):
        f = GridFunctionSeq.of(f)
    if g.spec != f.spec:
        raise GridError("pairing needs a common grid")
    k = max(len(g), len(f))
    g, f = g.padded(k), f.padded(k)
    total = sum(np.sum(gj.values * fj.values) for gj, fj in zip(g, f))
    return complex(total * g.spec.cell_volume)


# -- upper bound -------------------------------------------------------------

def _support_box(f: GridFunction) -> Optional[list[tuple[float, float]]]:
    nz = np.nonzero(f.values)
    if len(nz[0]) == 0:
        return None
    ax = f.spec.axis
    return [(ax[idx.min()], ax[idx.max()]) for idx in nz]


def find_root(f: GridFunction, j_min: int, j_max: int) -> DyadicCube:
    """Smallest cube ``Q_{J,M}`` (largest J <= j_max) holding every nonzero node."""
    box = _support_box(f)
    if box is None:
        raise GridError("zero function has no support")
    for J in range(j_max, j_min - 1, -1):
        s = 2.0 ** (-J)
        offs = []
        for lo, hi in box:
            m = math.floor(lo / s + 1 + 1e-9)
            if (m - 1) * s <= lo + 1e-12 and hi < (m + 1) * s - 1e-12:
                offs.append(m)
            else:
                break
        if len(offs) == len(box):
            return DyadicCube(J, tuple(offs))
    raise GridError(f"level range [{j_min}, {j_max}] too shallow to cover the support")


def _tree_offsets(root: DyadicCube, depth: int) -> list[np.ndarray]:
    """Per-axis offsets of the depth-d descendants of ``root`` (step 2)."""
    k = 2**depth
    return [k * m - k + 1 + 2 * np.arange(k) for m in root.offset]


def _level_cube_norms(mass: np.ndarray, spec: GridSpec, level: int,
                      offsets: list[np.ndarray], p: float) -> np.ndarray:
    m_lo, S = cube_masses(mass, spec, level)
    out_shape = tuple(len(o) for o in offsets)
    res = np.zeros(out_shape)
    idx = [o - m_lo for o in offsets]
    valid = [(i >= 0) & (i < S.shape[d]) for d, i in enumerate(idx)]
    if spec.dim == 1:
        res[valid[0]] = S[idx[0][valid[0]]]
    else:
        sub = S[np.ix_(idx[0][valid[0]], idx[1][valid[1]])]
        res[np.ix_(valid[0], valid[1])] = sub
    return np.maximum(res, 0.0) ** (1.0 / p)


def _children_sum(arr: np.ndarray) -> np.ndarray:
    out = arr
    for ax in range(arr.ndim):
        sl0 = [slice(None)] * arr.ndim
        sl1 = [slice(None)] * arr.ndim
        sl0[ax] = slice(0, None, 2)
        sl1[ax] = slice(1, None, 2)
        out = out[tuple(sl0)] + out[tuple(sl1)]
    return out


def predual_upper_bound(f: GridFunction, params: PredualParams,
                        j_range: Optional[Sequence[int]] = None) -> AtomicDecomposition:
    spec = f.spec
    n = spec.dim
    params.check(n)
    j_min, j_max = level_range(spec, j_range)
    if f.is_zero():
        return AtomicDecomposition([], f, 0.0)
    root = find_root(f, j_min, j_max)
    depth_max = j_max - root.level
    a = f.abs()
    peak = float(a.max())
    mass = (a / peak) ** params.p * spec.cell_volume
    expo = params.scale_exponent(n)

    support = (a > 0).astype(float)
    leaf_norms, occupied, opt, split = [], [], [], []
    for d in range(depth_max + 1):
        offs = _tree_offsets(root, d)
        leaf_norms.append(peak * _level_cube_norms(mass, spec, root.level + d, offs, params.p))
        # |f|^p can underflow; occupancy keeps such cubes as (zero-cost) atoms
        occupied.append(_level_cube_norms(support, spec, root.level + d, offs, 1.0) > 0)
    for d in range(depth_max, -1, -1):
        leaf = 2.0 ** ((root.level + d) * expo) * leaf_norms[d]
        if d == depth_max:
            opt.append(leaf)
            split.append(np.zeros(leaf.shape, dtype=bool))
        else:
            kids = _children_sum(opt[-1])
            split.append(kids < leaf)
            opt.append(np.where(kids < leaf, kids, leaf))
    opt.reverse()
    split.reverse()

    atoms: list[Atom] = []
    frontier = [tuple(0 for _ in range(n))]
    for d in range(depth_max + 1):
        offs = _tree_offsets(root, d)
        nxt = []
        for idx in frontier:
            if split[d][idx]:
                nxt.extend(_child_indices(idx))
            elif occupied[d][idx]:
                cube = DyadicCube(root.level + d, tuple(int(offs[ax][i]) for ax, i in enumerate(idx)))
                atoms.append(Atom(cube, f, params, _piece_norm(a, spec, cube, params.p)))
        frontier = nxt
    total = float(sum(a.cost() for a in atoms))
    return AtomicDecomposition(atoms, f, total, root)


def _piece_norm(a: np.ndarray, spec: GridSpec, cube: DyadicCube, p: float) -> float:
    """L_p norm of |f| on one cube, rescaled locally so tiny pieces keep full precision."""
    vals = a[cube.slices(spec)]
    peak = vals.max(initial=0.0)
    if peak == 0:
        return 0.0
    return float(peak * (np.sum((vals / peak) ** p) * spec.cell_volume) ** (1.0 / p))


def _child_indices(idx: tuple[int, ...]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for i in idx:
        out = [prev + (c,) for prev in out for c in (2 * i, 2 * i + 1)]
    return out


def brute_force_partition_cost(f: GridFunction, params: PredualParams, root: DyadicCube,
                               max_depth: int) -> float:
    """Minimum cost over every dyadic partition of ``root`` at most ``max_depth`` deep.

    Enumerates the partitions explicitly; independent of the dynamic program.
    """
    spec = f.spec
    expo = params.scale_exponent(spec.dim)

    def leaf_cost(q: DyadicCube) -> float:
        vals = f.abs()[q.mask(spec)]
        if vals.size == 0:
            return 0.0
        return 2.0 ** (q.level * expo) * float(np.sum(vals**params.p) * spec.cell_volume) ** (1 / params.p)

    def partitions(q: DyadicCube, depth: int) -> list[list[DyadicCube]]:
        out = [[q]]
        if depth == 0:
            return out
        combos: list[list[DyadicCube]] = [[]]
        for child in q.children():
            combos = [c + part for c in combos for part in partitions(child, depth - 1)]
        return out + combos

    return min(sum(leaf_cost(q) for q in part) for part in partitions(root, max_depth))


# -- lower bound -------------------------------------------------------------

def dual_sign_pattern(f: GridFunction, p: float) -> np.ndarray:
    """``|f|^{p-1} conj(f)/|f|``: pairs with f to give |f|^p."""
    a = f.abs()
    return np.where(a > 0, a ** (p - 1) * np.exp(-1j * np.angle(f.values)), 0)


def decomposition_witness(dec: AtomicDecomposition) -> Optional[GridFunction]:
    """Witness matching every DP leaf: on leaf Q it is the L_{p'}-unit dual of f|Q
    scaled by Q's weight, so that its pairing with f is exactly the DP cost."""
    if not dec.atoms:
        return None
    f = dec.target
    p = dec.atoms[0].params.p
    expo = dec.atoms[0].params.scale_exponent(f.spec.dim)
    sign = dual_sign_pattern(f, p)
    out = np.zeros(f.spec.shape, dtype=complex)
    for a in dec.atoms:
        if a.piece_norm == 0:
            continue
        sl = a.cube.slices(f.spec)
        out[sl] = sign[sl] * 2.0 ** (a.cube.level * expo) / a.piece_norm ** (p - 1)
    return f.with_values(out)


def default_dictionary(spec: GridSpec, scales: Sequence[float] = (0.25, 0.5, 1.0, 2.0),
                       shifts: Sequence[float] = (-1.0, 0.0, 1.0)) -> list[FunctionExpr]:
    """Dilated and translated bumps, indicators and truncated powers."""
    from .expr import Bump, Chi, Pow, Translate
    out: list[FunctionExpr] = []
    for s in scales:
        for c in shifts:
            out.append(Bump(c, s))
            out.append(Translate(c, Chi(-s, s)))
    for a in (-0.25, -0.5):
        out.append(Pow(a, spec.h))
    return out


def predual_lower_bound(f: GridFunction, params: PredualParams,
                        dictionary: Optional[Sequence[Union[FunctionExpr, str, GridFunction]]] = None,
                        j_range: Optional[Sequence[int]] = None,
                        upper: Optional[AtomicDecomposition] = None,
                        witnesses: bool = True) -> DualityCertificate:
    """Best ratio ``|<g, f>| / ||g | L^{r'}_{p'}||`` over a dictionary of witnesses.

    With ``witnesses`` the dictionary is extended by the sign pattern of f
    (globally, on the DP's cheapest leaf set, and on the argmax cube).
    """
    spec = f.spec
    n = spec.dim
    params.check(n)
    dual = params.dual(n)
    if upper is None:
        upper = predual_upper_bound(f, params, j_range)
    cands: list[tuple[str, GridFunction]] = []
    for item in (default_dictionary(spec) if dictionary is None else dictionary):
        if isinstance(item, GridFunction):
            cands.append(("<grid function>", item))
        else:
            e = as_expr(item)
            cands.append((e.text(), sample(e, spec)))
    if witnesses and not f.is_zero():
        sign = dual_sign_pattern(f, params.p)
        cands.append(("dual-sign", f.with_values(sign)))
        dw = decomposition_witness(upper)
        if dw is not None:
            cands.append(("dual-sign-on-dp-leaves", dw))
            best_atom = max(upper.atoms, key=lambda a: a.cost())
            mask = best_atom.cube.mask(spec)
            cands.append((f"dual-sign-on-Q{best_atom.cube.level},{list(best_atom.cube.offset)}",
                          f.with_values(np.where(mask, sign, 0))))
    if not cands:
        raise GridError("empty witness dictionary")

    best = DualityCertificate(None, "none", math.inf, 0j, 0.0, upper.total_cost)
    scored = []
    for label, g in cands:
        gn = morrey_norm_dyadic(g, dual, j_range).value
        if gn == 0:
            raise GridError(f"dictionary member {label} has zero Morrey norm")
        pv = pairing(g, f)
        lb = abs(pv) / gn
        scored.append((label, lb))
        if lb > best.lower_bound or best.witness is None:
            best = DualityCertificate(g, label, gn, pv, lb, upper.total_cost)
    best.candidates = scored
    return best


def predual_norm_vector(seq: GridFunctionSeq, params: PredualParams, q: float,
                        dictionary=None, j_range=None) -> tuple[AtomicDecomposition, DualityCertificate]:
    g = pointwise_lq(seq, q)
    up = predual_upper_bound(g, params, j_range)
    lo = predual_lower_bound(g, params, dictionary, j_range, upper=up)
    return up, lo
