"""Conical and annular Fourier multipliers on the integer frequency lattice.

A truncated cone around a unit direction b collects the frequencies with
|khat|^2 - (b.khat)^2 <= mu^2 and |k| <= mu1.  The associated multiplier is a
smooth [0,1]-valued bump,

    phi(sqrt(|k|^2 - (b.k)^2) / (mu |k|)) * phi(|k|/mu1) * (1 - phi(4|k|)),

equal to one on the cone outside the ball of radius 1/2 and supported in the
doubled cone outside the ball of radius 1/4; it is even in k.  The profile
phi is an order-7 polynomial smoothstep, one on [-1,1] and zero outside
(-2,2).  An annular variant masks |k| to [mu_low, mu1] with half-octave
transitions.

For the standard set of six twin directions the doubled cones stay pairwise
disjoint away from the origin as long as the aperture stays below
mu0 = sin(theta_min/2)/2, with theta_min the smallest angle between the
direction lines (60 degrees, so mu0 = 1/4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


def smoothstep7(t: np.ndarray) -> np.ndarray:
    """Order-7 polynomial smoothstep: 0 at t<=0, 1 at t>=1, C^3 junctions."""
    t = np.clip(t, 0.0, 1.0)
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


def phi(s: np.ndarray) -> np.ndarray:
    """Even bump profile: 1 on [-1, 1], 0 outside (-2, 2)."""
    return 1.0 - smoothstep7(np.abs(np.asarray(s, dtype=float)) - 1.0)


def mu0_aperture(directions: np.ndarray) -> float:
    """Largest aperture keeping the doubled cones pairwise disjoint.

    Computed from the smallest angle between distinct direction lines:
    cones of half-angle arcsin(2*mu) around two lines at angle theta are
    disjoint (away from 0) when 2*arcsin(2*mu) < theta.
    """
    dirs = np.asarray(directions, dtype=float)
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    theta_min = np.inf
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            c = abs(float(dirs[i] @ dirs[j]))
            if c > 1.0 - 1e-12:  # same line
                continue
            theta_min = min(theta_min, np.arccos(min(c, 1.0)))
    return float(np.sin(theta_min / 2.0) / 2.0)


MU0_TWIN_SET = 0.25  # mu0_aperture of the six twin directions (60 degree lines)


@dataclass(frozen=True)
class ConeSpec:
    """Parameters of a (possibly annular) truncated-cone multiplier."""

    b: np.ndarray
    mu: float
    mu1: float
    mu_low: Optional[float] = None
    mu0: float = MU0_TWIN_SET

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        n = np.linalg.norm(b)
        if n == 0:
            raise ValueError("cone direction must be nonzero")
        object.__setattr__(self, "b", b / n)
        if not 0.0 < self.mu < self.mu0:
            raise ValueError(f"aperture mu must lie in (0, {self.mu0})")
        if self.mu1 < 0.5:
            raise ValueError("outer radius mu1 must be at least 1/2")
        if self.mu_low is not None and not 0.0 < self.mu_low < self.mu1:
            raise ValueError("inner radius must lie in (0, mu1)")


def cone_multiplier(spec: ConeSpec, k: np.ndarray) -> np.ndarray:
    """Evaluate the multiplier on frequencies k of shape (3, ...).

    The zero frequency always maps to zero.
    """
    k = np.asarray(k, dtype=float)
    norm = np.sqrt(np.einsum("m...,m...->...", k, k))
    zero = norm == 0.0
    norm_safe = np.where(zero, 1.0, norm)
    along = np.einsum("m...,m->...", k, spec.b)
    trans_sq = np.maximum(norm**2 - along**2, 0.0)
    vals = (
        phi(np.sqrt(trans_sq) / (spec.mu * norm_safe))
        * phi(norm / spec.mu1)
        * (1.0 - phi(4.0 * norm))
    )
    if spec.mu_low is not None:
        # smoothed annulus indicator: one on [mu_low, mu1], supported in
        # [mu_low/2, 2*mu1] with half-octave transitions
        vals = vals * (1.0 - phi(2.0 * norm / spec.mu_low))
    return np.where(zero, 0.0, vals)


def apply_multiplier(field: np.ndarray, spec: ConeSpec, grid) -> np.ndarray:
    """Real-space action of the multiplier on a scalar field."""
    k = grid.freq_int_half()
    m = cone_multiplier(spec, k)
    return np.fft.irfftn(np.fft.rfftn(field) * m, s=field.shape)


def multiplier_energy(field: np.ndarray, spec: ConeSpec, grid) -> float:
    """Squared L2 norm of the multiplier applied to the field."""
    coeff = np.fft.rfftn(field) / grid.cells
    m = cone_multiplier(spec, grid.freq_int_half())
    w = grid.rfft_mode_weights()
    return float(np.sum(w * (m * np.abs(coeff)) ** 2)) * grid.length**3
