"""Dyadic resolutions of unity and Littlewood-Paley block operators.

A resolution is a family (phi_k) of radial frequency cutoffs built from a
base bump phi_0 with 1_{B(0,1)} <= phi_0 <= 1_{B(0,3/2)} via

    phi_k(xi) = phi_0(2^-k xi) - phi_0(2^-(k-1) xi),   k >= 1,

so that sum_k phi_k = 1.  Block operators phi_k(D) f = F^-1(phi_k * Ff) are
the building blocks of every function-space norm in :mod:`lplab.norms`.

Multipliers are stored sampled on the frequency lattice, never symbolically;
blocks whose support exceeds the Nyquist frequency are dropped, so norms are
norms of the band-limited projection (exact for band-limited fields).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .grid import Grid, SampledField, Spectrum, forward_transform, inverse_transform

__all__ = [
    "TransitionProfile",
    "DyadicResolution",
    "ResolutionReport",
    "bump_profile",
    "build_resolution",
    "squared_resolution",
    "validate_resolution",
    "apply_block",
    "block_spectra",
    "export_resolution",
]


@dataclass(frozen=True)
class TransitionProfile:
    """Smooth monotone ramp [0,1] -> [0,1] shaping the cutoff transition.

    Must satisfy ramp(0) = 0 and ramp(1) = 1 exactly, with all one-sided
    derivatives vanishing at the endpoints (so the assembled cutoffs are
    C-infinity).
    """

    name: str
    ramp: object  # vectorized callable [0,1] -> [0,1]

    def check(self, sweep: int = 1001) -> None:
        """Validate endpoints exactly and monotonicity on a 1e-3 sweep."""
        t = np.linspace(0.0, 1.0, sweep)
        v = np.asarray(self.ramp(t), dtype=float)
        if v[0] != 0.0 or v[-1] != 1.0:
            raise ValueError(f"profile {self.name!r}: endpoint values not exact")
        if np.any(np.diff(v) < -1e-12):
            raise ValueError(f"profile {self.name!r}: ramp is not monotone")


def bump_profile(sharpness: float = 1.0, name: str | None = None) -> TransitionProfile:
    """Normalized exponential-bump ramp w(t)/(w(t)+w(1-t)), w(t)=exp(-a/t).

    Any sharpness a > 0 gives a valid C-infinity profile; a = 1 is the
    default, larger a steepens the transition.
    """
    if not sharpness > 0:
        raise ValueError("sharpness must be positive")
    a = float(sharpness)

    def ramp(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = (t > 0.0) & (t < 1.0)
        ti = t[inside]
        with np.errstate(over="ignore", under="ignore"):
            w0 = np.exp(-a / ti)
            w1 = np.exp(-a / (1.0 - ti))
        out[inside] = w0 / (w0 + w1)
        out[t >= 1.0] = 1.0
        return out

    return TransitionProfile(name or f"bump{a:g}", ramp)


@dataclass(frozen=True)
class DyadicResolution:
    """Sampled multiplier family (phi_k), k = 0..k_max, on a grid's lattice.

    ``k_max`` is the largest k whose block support {2^(k-1) <= |xi| < 2^(k+1)}
    fits inside the lattice: k_max = floor(log2(nyquist)) - 1.  For derived
    families that only satisfy c <= sum phi_k <= C (instead of = 1) the
    ``admissible_general`` flag is set and (c, C) recorded.
    """

    grid: Grid
    blocks: tuple
    k_max: int
    profile: TransitionProfile
    admissible_general: bool = False
    partition_lo: float = 1.0
    partition_hi: float = 1.0

    def band_radius(self) -> float:
        """Radius 2^k_max below which the partition of unity is complete."""
        return 2.0**self.k_max


def _phi0(rho: np.ndarray, profile: TransitionProfile) -> np.ndarray:
    out = np.zeros(rho.shape)
    out[rho <= 1.0] = 1.0
    mid = (rho > 1.0) & (rho < 1.5)
    out[mid] = profile.ramp((1.5 - rho[mid]) / 0.5)
    return out


def build_resolution(grid: Grid, profile: TransitionProfile | None = None) -> DyadicResolution:
    """Build the dyadic resolution of unity on a grid's frequency lattice.

    phi_0 equals 1 on |xi| <= 1, 0 on |xi| >= 3/2, and ramps in between;
    higher blocks follow by the dyadic difference.  Requires nyquist >= 4
    (below that there are no blocks beyond k = 1).
    """
    profile = profile or bump_profile()
    profile.check()
    if grid.nyquist < 4.0:
        raise ValueError(
            f"nyquist {grid.nyquist:.3g} < 4: grid too coarse for a dyadic resolution"
        )
    k_max = int(np.floor(np.log2(grid.nyquist))) - 1
    rho = grid.radial_freq()
    blocks = [_phi0(rho, profile)]
    prev = blocks[0]
    for k in range(1, k_max + 1):
        cur = _phi0(rho * 2.0**-k, profile)
        blocks.append(cur - prev)
        prev = cur
    for b in blocks:
        b.setflags(write=False)
    return DyadicResolution(grid, tuple(blocks), k_max, profile)


def squared_resolution(res: DyadicResolution) -> DyadicResolution:
    """The family (phi_k^2): admissible in the relaxed sense c <= sum <= C."""
    blocks = tuple(b * b for b in res.blocks)
    for b in blocks:
        b.setflags(write=False)
    total = sum(blocks)
    band = res.grid.radial_freq() <= res.band_radius()
    return DyadicResolution(
        res.grid,
        blocks,
        res.k_max,
        res.profile,
        admissible_general=True,
        partition_lo=float(total[band].min()),
        partition_hi=float(total[band].max()),
    )


@dataclass(frozen=True)
class ResolutionReport:
    """Admissibility diagnostics for a block family (report-only).

    The scaled-derivative proxies bound 2^(k|a|) |D^a phi_k| for |a| <= 2 by
    centered finite differences on the frequency lattice; they depend on the
    transition profile and are recorded, not asserted against a fixed value.
    """

    partition_min: float
    partition_max: float
    support_violations: int
    derivative_proxy_1: float
    derivative_proxy_2: float


def validate_resolution(res: DyadicResolution) -> ResolutionReport:
    """Check partition bounds, block supports, and derivative proxies."""
    grid = res.grid
    rho = grid.radial_freq()
    band = rho <= res.band_radius()
    total = sum(res.blocks)
    part_min = float(total[band].min())
    part_max = float(total[band].max())

    violations = 0
    for k, b in enumerate(res.blocks):
        if k == 0:
            outside = rho >= 2.0
        else:
            outside = (rho < 2.0 ** (k - 1)) | (rho >= 2.0 ** (k + 1))
        violations += int(np.count_nonzero(np.abs(b[outside]) > 1e-15))

    dxi = np.pi / grid.half_width
    d1 = 0.0
    d2 = 0.0
    for k, b in enumerate(res.blocks):
        # fftshift so finite differences never straddle the FFT wrap seam
        bs = np.fft.fftshift(b)
        grads = np.gradient(bs, dxi) if grid.dim > 1 else [np.gradient(bs, dxi)]
        mag = np.sqrt(sum(g**2 for g in grads))
        d1 = max(d1, 2.0**k * float(mag.max()))
        for g in grads:
            seconds = np.gradient(g, dxi) if grid.dim > 1 else [np.gradient(g, dxi)]
            for s in seconds:
                d2 = max(d2, 4.0**k * float(np.abs(s).max()))
    return ResolutionReport(part_min, part_max, violations, d1, d2)


def apply_block(res: DyadicResolution, k: int, f: SampledField) -> SampledField:
    """phi_k(D) f = F^-1(phi_k * Ff); real output for real input (to ~1e-10)."""
    if not (0 <= k <= res.k_max):
        raise ValueError(f"block index {k} outside 0..{res.k_max}")
    if f.grid != res.grid:
        raise ValueError("field grid does not match resolution grid")
    F = forward_transform(f)
    return inverse_transform(SampledField(res.grid, res.blocks[k] * F.values, "frequency"))


def block_spectra(res: DyadicResolution, F: Spectrum):
    """Yield the space-domain block values phi_k(D)f for a precomputed Ff.

    Shares one forward transform across all blocks; used by the norm code.
    """
    if F.grid != res.grid:
        raise ValueError("spectrum grid does not match resolution grid")
    scale = (2.0 * np.pi) ** (-res.grid.dim / 2.0) * res.grid.cell_volume
    for b in res.blocks:
        yield np.fft.fftshift(np.fft.ifftn(b * F.values)) / scale


def export_resolution(res: DyadicResolution, directory: str) -> None:
    """Write per-block CSVs (xi index, value) plus JSON metadata."""
    os.makedirs(directory, exist_ok=True)
    for k, b in enumerate(res.blocks):
        flat = b.ravel()
        with open(os.path.join(directory, f"block_{k}.csv"), "w") as fh:
            fh.write("index,value\n")
            for i in range(flat.size):
                fh.write(f"{i},{flat[i]:.17g}\n")
    meta = {
        "profile": res.profile.name,
        "K_max": res.k_max,
        "c": res.partition_lo,
        "C": res.partition_hi,
        "admissible_general": res.admissible_general,
        "grid": {"dim": res.grid.dim, "N": res.grid.samples_per_axis, "L": res.grid.half_width},
    }
    with open(os.path.join(directory, "resolution.json"), "w") as fh:
        json.dump(meta, fh, sort_keys=True)
        fh.write("\n")
