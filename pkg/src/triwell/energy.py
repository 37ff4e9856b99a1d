"""Elastic, surface and total energies of phase arrangements on the torus.

The elastic part is the exact minimum of int |e(u) - chi|^2 over periodic
displacements, computed mode by mode: for every nonzero frequency the
minimizer of |sym(i k (x) u) - C(k)|^2 solves a 3x3 positive-definite system,
and the zero mode contributes the squared mean (a mean-free strain cannot
cancel a constant).  The surface part is the discrete BV seminorm of the
phase indicators, counted as face jumps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import Grid3, diag_to_voigt, fourier_coefficients, mean_value
from .symmat import SymMat3
from .wells import WellSystem

_CHUNK = 1 << 17


@dataclass(frozen=True)
class PhaseField:
    """Three phase fractions per grid point; sharp fields are {0,1}-valued."""

    chi: np.ndarray  # (N, N, N, 3)
    sharp: bool

    def __post_init__(self):
        c = self.chi
        if c.ndim != 4 or c.shape[-1] != 3:
            raise ValueError("phase field must have shape (N, N, N, 3)")
        if np.min(c) < -1e-12 or np.max(np.abs(c.sum(axis=-1) - 1.0)) > 1e-12:
            raise ValueError("phase fractions must be nonnegative and sum to one")
        if self.sharp and np.max(np.abs(c - np.round(c))) > 1e-12:
            raise ValueError("sharp phase field must be {0,1}-valued")

    @classmethod
    def from_labels(cls, labels: np.ndarray) -> "PhaseField":
        """Sharp field from integer well labels in {0, 1, 2}."""
        chi = np.zeros(labels.shape + (3,))
        for a in range(3):
            chi[..., a] = labels == a
        return cls(chi=chi, sharp=True)

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.chi, axis=-1)

    def fractions(self) -> np.ndarray:
        return mean_value(self.chi)

    def sharpened(self) -> "PhaseField":
        return PhaseField.from_labels(self.labels)


@dataclass(frozen=True)
class EnergyReport:
    """Energy breakdown of one experiment row; e_total = e_el + eps * e_surf."""

    e_el: float
    e_surf: float
    eps: float
    e_total: float
    meta: dict = field(default_factory=dict)

    @classmethod
    def build(cls, e_el, e_surf, eps, **meta) -> "EnergyReport":
        return cls(
            e_el=float(e_el),
            e_surf=float(e_surf),
            eps=float(eps),
            e_total=float(e_el) + float(eps) * float(e_surf),
            meta=meta,
        )


def strain_from_phase(phase: PhaseField, ws: WellSystem) -> np.ndarray:
    """Pointwise diagonal strain sum(chi_a * well_a), shape (N, N, N, 3)."""
    wells_diag = np.stack([w.diagonal for w in ws.wells])  # (3 wells, 3 comps)
    return np.einsum("...a,ac->...c", phase.chi, wells_diag)


def _as_voigt_field(chi_field: np.ndarray) -> np.ndarray:
    if chi_field.ndim != 4 or chi_field.shape[-1] not in (3, 6):
        raise ValueError("expected a (N,N,N,3) diagonal or (N,N,N,6) symmetric field")
    if chi_field.shape[-1] == 3:
        return diag_to_voigt(chi_field)
    return chi_field


def elastic_energy(chi_field: np.ndarray, grid: Grid3) -> float:
    """Exact relaxed elastic energy of a symmetric target field.

    The caller is responsible for subtracting the imposed mean beforehand;
    whatever mean remains enters through the zero mode as |mean|^2.
    """
    v = _as_voigt_field(chi_field)
    coeff = fourier_coefficients(v)  # (N, N, N, 6) complex
    k = grid.freq_int().reshape(3, -1).T  # (M, 3)
    c6 = coeff.reshape(-1, 6)

    # full symmetric complex matrices per mode
    def full(c):
        m = np.empty(c.shape[:-1] + (3, 3), dtype=complex)
        m[..., 0, 0] = c[..., 0]
        m[..., 1, 1] = c[..., 1]
        m[..., 2, 2] = c[..., 2]
        m[..., 1, 2] = m[..., 2, 1] = c[..., 3]
        m[..., 0, 2] = m[..., 2, 0] = c[..., 4]
        m[..., 0, 1] = m[..., 1, 0] = c[..., 5]
        return m

    nonzero = np.any(k != 0.0, axis=1)
    zero_mode = full(c6[~nonzero][0])
    energy = float(np.sum(np.abs(zero_mode) ** 2))

    idx = np.nonzero(nonzero)[0]
    for start in range(0, len(idx), _CHUNK):
        sel = idx[start : start + _CHUNK]
        kk = k[sel]  # (m, 3)
        ch = full(c6[sel])  # (m, 3, 3)
        ksq = np.einsum("mi,mi->m", kk, kk)
        acoustic = 0.5 * (
            ksq[:, None, None] * np.eye(3)[None] + np.einsum("mi,mj->mij", kk, kk)
        )
        rhs = -1j * np.einsum("mij,mj->mi", ch, kk)
        u = np.linalg.solve(acoustic, rhs)
        e_hat = 0.5j * (
            np.einsum("mi,mj->mij", kk, u) + np.einsum("mi,mj->mij", u, kk)
        )
        energy += float(np.sum(np.abs(e_hat - ch) ** 2))
    return energy * grid.length**3


def surface_energy(phase: PhaseField, grid: Grid3) -> float:
    """Discrete BV seminorm of the phase indicators (face-jump counting)."""
    if not phase.sharp:
        raise ValueError(
            "surface energy is defined for sharp phase fields; "
            "use total_variation_relaxed for fractional fields"
        )
    return total_variation_relaxed(phase.chi, grid)


def total_variation_relaxed(chi: np.ndarray, grid: Grid3) -> float:
    """Anisotropic total variation of (possibly fractional) indicator fields."""
    h = grid.h
    face = h * h
    total = 0.0
    for axis in range(3):
        total += float(np.sum(np.abs(np.roll(chi, -1, axis=axis) - chi))) * face
    return total


def total_energy(
    phase: PhaseField, ws: WellSystem, e_bar: SymMat3, eps: float
) -> EnergyReport:
    """Elastic plus eps-weighted surface energy at imposed mean strain."""
    if eps <= 0:
        raise ValueError("surface weight eps must be positive")
    grid = Grid3(phase.chi.shape[0])
    chi_t = diag_to_voigt(strain_from_phase(phase, ws))
    chi_t -= e_bar.voigt
    e_el = elastic_energy(chi_t, grid)
    e_surf = surface_energy(phase, grid)
    return EnergyReport.build(
        e_el,
        e_surf,
        eps,
        n=grid.n,
        etas=tuple(ws.etas),
        e_bar=tuple(e_bar.voigt),
    )


def _line_distance_sq(khat: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Squared distance from unit vectors to the nearest of +-direction lines."""
    # |khat - s*b|^2 = 2 - 2 s (khat . b); minimize over sign s and direction
    dots = np.abs(np.einsum("m...,dm->d...", khat, directions))
    return 2.0 - 2.0 * np.max(dots, axis=0)


def multiplier_lower_bound(chi_diag: np.ndarray, grid: Grid3, ws: WellSystem) -> float:
    """Conical multiplier functional bounding the elastic energy from below.

    Sums dist^2(khat, twin-direction set of component j) |F chi_jj(k)|^2 over
    modes and components; the zero mode enters with unit weight.  Distances
    are taken to the lines spanned by the twin directions (the spectrum of a
    real field is even in k).
    """
    if chi_diag.ndim != 4 or chi_diag.shape[-1] != 3:
        raise ValueError("expected a diagonal tensor field of shape (N,N,N,3)")
    coeff = fourier_coefficients(chi_diag)
    k = grid.freq_int()
    norm = np.sqrt(np.einsum("m...,m...->...", k, k))
    zero = norm == 0.0
    norm_safe = np.where(zero, 1.0, norm)
    khat = k / norm_safe

    total = 0.0
    for j in (1, 2, 3):
        d2 = _line_distance_sq(khat, ws.b_set(j))
        d2 = np.where(zero, 1.0, d2)
        total += float(np.sum(d2 * np.abs(coeff[..., j - 1]) ** 2))
    return total * grid.length**3
