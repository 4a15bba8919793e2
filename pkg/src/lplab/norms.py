"""Function-space (quasi-)norms built on Littlewood-Paley blocks.

Implements Lp norms, Besov norms ||2^{ks} phi_k(D) f | Lp | lq||,
Triebel-Lizorkin norms ||2^{ks} phi_k(D) f | lq | Lp|| (p < infinity), the
p = infinity Triebel-Lizorkin norm via averages over dyadic cubes, and the
auxiliary Bessel-potential, Sobolev and local-Hardy norms used to bound
kernel norms.

All norms are norms of the band-limited projection of the input (blocks
beyond the Nyquist frequency do not exist on the grid); for band-limited
fields this truncation is exact.  The cube-based p = infinity norm uses only
lattice-aligned cubes fully inside the box, so it is a certified lower bound
of the continuum norm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, SampledField, forward_transform, inverse_transform, spectral_derivative
from .littlewood_paley import DyadicResolution, block_spectra

__all__ = [
    "SpaceParams",
    "NormResult",
    "lp_norm",
    "besov_norm",
    "triebel_norm",
    "triebel_infty_norm",
    "space_norm",
    "resolution_l1_bound",
    "bessel_norm",
    "sobolev_w1m_norm",
    "hardy_norm",
]

INF = math.inf


@dataclass(frozen=True)
class SpaceParams:
    """Selects a function-space norm: scale A in {B, F}, smoothness s,
    integrability p in [1, inf], summability q in (0, inf]."""

    scale: str
    s: float
    p: float
    q: float

    def __post_init__(self):
        if self.scale not in ("B", "F"):
            raise ValueError(f"scale must be 'B' or 'F', got {self.scale!r}")
        if not self.p >= 1:
            raise ValueError(f"integrability p must be >= 1, got {self.p}")
        if not self.q > 0:
            raise ValueError(f"summability q must be > 0, got {self.q}")

    @property
    def theorem_eligible(self) -> bool:
        """Whether the convolution theorems cover these parameters
        (F-scale requires q >= 1)."""
        return self.scale == "B" or self.q >= 1

    def shifted(self, du: float) -> "SpaceParams":
        return SpaceParams(self.scale, self.s + du, self.p, self.q)


@dataclass(frozen=True)
class NormResult:
    """A computed norm value with per-block diagnostics.

    ``block_terms[k]`` holds the 2^{ks}-weighted per-block contribution.  For
    the B-scale the value is exactly the declared lq reduction of the block
    terms; for the F-scale the lq is taken pointwise before Lp, so the block
    terms are per-block Lp diagnostics only (``reduction`` records which).
    ``tail_ratio`` = block_terms[-1]/value flags truncation at k_max.
    """

    value: float
    block_terms: tuple
    truncation_k: int
    tail_ratio: float
    space: SpaceParams
    reduction: str

    def to_json_dict(self) -> dict:
        enc = lambda x: x if math.isfinite(x) else "inf"
        return {
            "value": self.value,
            "block_terms": list(self.block_terms),
            "truncation_k": self.truncation_k,
            "tail_ratio": self.tail_ratio,
            "space": {
                "A": self.space.scale,
                "s": self.space.s,
                "p": enc(self.space.p),
                "q": enc(self.space.q),
            },
            "reduction": self.reduction,
        }


def _lp_values(values: np.ndarray, p: float, grid: Grid) -> float:
    a = np.abs(values)
    if p == INF:
        return float(a.max())
    if p == 1:
        return float(grid.cell_volume * a.sum())
    if p == 2:
        return float(np.sqrt(grid.cell_volume * np.sum(a * a)))
    return float((grid.cell_volume * np.sum(a**p)) ** (1.0 / p))


def lp_norm(f: SampledField, p: float) -> float:
    """(h^n sum |f|^p)^(1/p); the lattice max for p = infinity."""
    if not f.is_space:
        raise ValueError("lp_norm expects a space-domain field")
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return _lp_values(f.values, p, f.grid)


def _lq_reduce(terms: np.ndarray, q: float) -> float:
    if q == INF:
        return float(terms.max()) if terms.size else 0.0
    return float(np.sum(terms**q) ** (1.0 / q))


def _result(value, terms, res, sp, reduction) -> NormResult:
    terms = tuple(float(t) for t in terms)
    tail = terms[-1] / value if value > 0 else 0.0
    return NormResult(float(value), terms, res.k_max, tail, sp, reduction)


def besov_norm(f: SampledField, res: DyadicResolution, sp: SpaceParams) -> NormResult:
    """Besov (quasi-)norm: lq over k of 2^{ks} ||phi_k(D) f||_Lp.

    q < 1 is accepted (quasi-norm); the convolution-theorem checks never
    feed q < 1 to the F-scale, which is where the hypotheses require q >= 1.
    """
    if sp.scale != "B":
        raise ValueError("besov_norm requires scale 'B'")
    F = forward_transform(f)
    terms = np.array(
        [2.0 ** (k * sp.s) * _lp_values(b, sp.p, res.grid)
         for k, b in enumerate(block_spectra(res, F))]
    )
    return _result(_lq_reduce(terms, sp.q), terms, res, sp, "lq_of_block_lp")


def triebel_norm(f: SampledField, res: DyadicResolution, sp: SpaceParams) -> NormResult:
    """Triebel-Lizorkin norm: Lp over x of the pointwise lq over k of
    2^{ks} |phi_k(D) f(x)|.  p = infinity is routed to the cube-based norm."""
    if sp.scale != "F":
        raise ValueError("triebel_norm requires scale 'F'")
    if sp.p == INF:
        return triebel_infty_norm(f, res, sp.s, sp.q)
    F = forward_transform(f)
    acc = None
    terms = []
    for k, b in enumerate(block_spectra(res, F)):
        w = 2.0 ** (k * sp.s) * np.abs(b)
        terms.append(_lp_values(w, sp.p, res.grid))
        if sp.q == INF:
            acc = w if acc is None else np.maximum(acc, w)
        else:
            wq = w**sp.q
            acc = wq if acc is None else acc + wq
    if sp.q != INF:
        acc = acc ** (1.0 / sp.q)
    return _result(_lp_values(acc, sp.p, res.grid), np.array(terms), res, sp,
                   "lp_of_pointwise_lq")


def _cube_means(values: np.ndarray, grid: Grid, J: int):
    """Means of ``values`` over lattice-aligned dyadic cubes of side 2^-J
    fully inside the box; returns the per-cube means as a flat array."""
    side = 2.0**-J
    n = grid.dim
    ax = grid.axis_coords()
    idx = np.floor(ax / side).astype(np.int64)
    # cube m spans [m*side, (m+1)*side); keep only cubes inside [-L, L]
    ok = (idx * side >= -grid.half_width - 1e-12) & (
        (idx + 1) * side <= grid.half_width + 1e-12
    )
    lo = idx.min()
    span = idx.max() - lo + 1
    flat_idx = np.zeros(grid.shape, dtype=np.int64)
    inside = np.ones(grid.shape, dtype=bool)
    for axis in range(n):
        shape = [1] * n
        shape[axis] = grid.samples_per_axis
        flat_idx = flat_idx * span + (idx - lo).reshape(shape)
        inside &= ok.reshape(shape)
    counts = np.bincount(flat_idx[inside], minlength=span**n)
    sums = np.bincount(flat_idx[inside], weights=values[inside], minlength=span**n)
    nonempty = counts > 0
    return sums[nonempty] / counts[nonempty]


def triebel_infty_norm(f: SampledField, res: DyadicResolution, s: float, q: float) -> NormResult:
    """F-scale norm at p = infinity via dyadic-cube averages.

    sup over J in [0, J_max] and lattice-aligned cubes Q of side 2^-J inside
    the box of (mean over cube samples of sum_{k>=J} |2^{ks} phi_k(D)f|^q)^(1/q).
    J is capped at log2(1/h) so every cube holds at least one sample.  For
    q = infinity the norm is by definition the Besov (inf, inf) norm.
    """
    if not q > 0:
        raise ValueError(f"q must be > 0, got {q}")
    sp = SpaceParams("F", s, INF, q)
    if q == INF:
        inner = besov_norm(f, res, SpaceParams("B", s, INF, INF))
        return NormResult(inner.value, inner.block_terms, inner.truncation_k,
                          inner.tail_ratio, sp, "besov_inf_inf")
    grid = res.grid
    if grid.spacing > 1.0:
        raise ValueError("grid spacing exceeds the unit cube: no admissible J >= 0")
    j_cap = min(int(np.floor(np.log2(1.0 / grid.spacing))), res.k_max)
    F = forward_transform(f)
    weighted = [
        (2.0 ** (k * s) * np.abs(b)) ** q for k, b in enumerate(block_spectra(res, F))
    ]
    terms = [float(w.max()) ** (1.0 / q) for w in weighted]
    # suffix sums over k = J..k_max
    tails = [None] * (res.k_max + 1)
    run = np.zeros(grid.shape)
    for k in range(res.k_max, -1, -1):
        run = run + weighted[k]
        tails[k] = run.copy()
    best = 0.0
    for J in range(0, j_cap + 1):
        means = _cube_means(tails[J], grid, J)
        if means.size:
            best = max(best, float(means.max()))
    return _result(best ** (1.0 / q), np.array(terms), res, sp, "cube_sup")


def space_norm(f: SampledField, res: DyadicResolution, sp: SpaceParams) -> NormResult:
    """Dispatch to the Besov or Triebel-Lizorkin norm selected by ``sp``."""
    if sp.scale == "B":
        return besov_norm(f, res, sp)
    return triebel_norm(f, res, sp)


def resolution_l1_bound(res: DyadicResolution) -> float:
    """max_k || F^-1 phi_k ||_L1, an explicit computable constant dominating
    ||f | B^0_{1,inf}|| / ||f||_L1 (block convolutions obey Young's bound)."""
    worst = 0.0
    for b in res.blocks:
        field = inverse_transform(SampledField(res.grid, b, "frequency"))
        worst = max(worst, lp_norm(field, 1))
    return worst


def bessel_norm(f: SampledField, s: float) -> float:
    """Bessel-potential norm || F^-1((1+|xi|^2)^(s/2) Ff) ||_L1, s >= 0."""
    if s < 0:
        raise ValueError(f"smoothness s must be >= 0, got {s}")
    F = forward_transform(f)
    rho2 = f.grid.radial_freq() ** 2
    out = inverse_transform(
        SampledField(f.grid, (1.0 + rho2) ** (s / 2.0) * F.values, "frequency")
    )
    return lp_norm(out, 1)


def sobolev_w1m_norm(f: SampledField, m: int) -> float:
    """Sobolev norm || sum_{|alpha| <= m} |d^alpha f| ||_L1 with spectral
    derivatives."""
    if m < 0:
        raise ValueError(f"order m must be >= 0, got {m}")
    total = np.zeros(f.grid.shape)
    for alpha in itertools.product(range(m + 1), repeat=f.grid.dim):
        if sum(alpha) > m:
            continue
        total = total + np.abs(spectral_derivative(f, alpha).values)
    return float(f.grid.cell_volume * total.sum())


def default_hardy_nodes(count: int = 32) -> np.ndarray:
    """Log-spaced maximal-function nodes in (0, 1)."""
    return np.geomspace(1e-3, 1.0 - 1e-3, count)


def hardy_norm(f: SampledField, t_nodes=None) -> float:
    """Local Hardy norm || sup_t |phi(tD) f| ||_L1 with the Gaussian window
    phi(xi) = exp(-|xi|^2).

    The sup over t in (0,1) is discretized on log-spaced nodes, so the result
    is a lower approximation of the continuum sup; refine the nodes to check
    stability.
    """
    nodes = default_hardy_nodes() if t_nodes is None else np.asarray(t_nodes, float)
    if nodes.size == 0:
        raise ValueError("t_nodes must be nonempty")
    if np.any(nodes <= 0) or np.any(nodes >= 1) or np.any(np.diff(nodes) < 0):
        raise ValueError("t_nodes must be sorted within (0, 1)")
    F = forward_transform(f)
    rho2 = f.grid.radial_freq() ** 2
    peak = np.zeros(f.grid.shape)
    for t in nodes:
        out = inverse_transform(
            SampledField(f.grid, np.exp(-(t * t) * rho2) * F.values, "frequency")
        )
        peak = np.maximum(peak, np.abs(out.values))
    return float(f.grid.cell_volume * peak.sum())
