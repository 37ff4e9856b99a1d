"""Periodic sample grids, Fourier lattices and discrete strain compatibility.

Field layout conventions (all numpy arrays, axes 0/1/2 = x1/x2/x3):

* scalar field      (N, N, N)
* diagonal tensor   (N, N, N, 3)   components (11, 22, 33)
* symmetric tensor  (N, N, N, 6)   components (11, 22, 33, 23, 13, 12)
* phase fractions   (N, N, N, 3)

Fourier coefficients follow the integral convention F(k) = int e^{-2pi i k.x} f,
i.e. numpy's fftn divided by N^3, with integer frequencies; Parseval then
reads  int |f|^2 dx = sum_k |F(k)|^2  on the unit torus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symmat import VOIGT_WEIGHTS


@dataclass(frozen=True)
class Grid3:
    """Periodic N x N x N sample grid on a cube of side length ``length``."""

    n: int
    length: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least two samples per axis")
        if self.length <= 0:
            raise ValueError("torus side length must be positive")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def shape(self) -> tuple:
        return (self.n, self.n, self.n)

    @property
    def cells(self) -> int:
        return self.n**3

    def coords(self) -> np.ndarray:
        """Sample coordinates, shape (3, N, N, N)."""
        ax = np.arange(self.n) * self.h
        x1, x2, x3 = np.meshgrid(ax, ax, ax, indexing="ij")
        return np.stack([x1, x2, x3])

    def freq_int(self) -> np.ndarray:
        """Integer frequency lattice for fftn output, shape (3, N, N, N)."""
        f = np.fft.fftfreq(self.n) * self.n
        k1, k2, k3 = np.meshgrid(f, f, f, indexing="ij")
        return np.stack([k1, k2, k3])

    def freq_int_half(self) -> np.ndarray:
        """Integer frequencies for rfftn output, shape (3, N, N, N//2+1)."""
        f = np.fft.fftfreq(self.n) * self.n
        fr = np.fft.rfftfreq(self.n) * self.n
        k1, k2, k3 = np.meshgrid(f, f, fr, indexing="ij")
        return np.stack([k1, k2, k3])

    def rfft_mode_weights(self) -> np.ndarray:
        """Multiplicities for Parseval sums over the rfftn half-spectrum."""
        w = np.full(self.n // 2 + 1, 2.0)
        w[0] = 1.0
        if self.n % 2 == 0:
            w[-1] = 1.0
        return np.broadcast_to(w, (self.n, self.n, self.n // 2 + 1))


def fourier_coefficients(field: np.ndarray, axes=(0, 1, 2)) -> np.ndarray:
    """fftn normalized to the integral convention."""
    n3 = np.prod([field.shape[a] for a in axes])
    return np.fft.fftn(field, axes=axes) / n3


def mean_value(field: np.ndarray) -> np.ndarray:
    """Torus average over the three grid axes."""
    return field.mean(axis=(0, 1, 2))


def l2_norm(field: np.ndarray, grid: Grid3, weights=None) -> float:
    """L2 norm over the torus; trailing component axes are contracted,
    optionally with componentwise weights (e.g. VOIGT_WEIGHTS)."""
    sq = field**2
    if weights is not None:
        sq = sq * weights
    if sq.ndim > 3:
        sq = sq.sum(axis=tuple(range(3, sq.ndim)))
    return float(np.sqrt(sq.mean() * grid.length**3))


def tensor_norm_sq(v6: np.ndarray) -> np.ndarray:
    """Pointwise squared Frobenius norm of a (..., 6) symmetric tensor field."""
    return np.einsum("...c,c->...", v6**2, VOIGT_WEIGHTS)


def diag_to_voigt(diag_field: np.ndarray) -> np.ndarray:
    """Embed a (..., 3) diagonal field into the (..., 6) symmetric layout."""
    out = np.zeros(diag_field.shape[:-1] + (6,), dtype=diag_field.dtype)
    out[..., :3] = diag_field
    return out


def _d2(field: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order centered second difference with periodic wrap."""
    return (np.roll(field, -1, axis) - 2.0 * field + np.roll(field, 1, axis)) / h**2


def _d1(field: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order centered first difference with periodic wrap."""
    return (np.roll(field, -1, axis) - np.roll(field, 1, axis)) / (2.0 * h)


def compatibility_residual(e_diag: np.ndarray, grid: Grid3):
    """Discrete strain-compatibility residuals of a diagonal strain field.

    Evaluates the six compatibility conditions of diagonal strains with
    second-order centered stencils: the mixed family

        d23 e11 = 0,   d13 e22 = 0,   d12 e33 = 0,

    and the paired-second-derivative family

        d22 e11 + d11 e22 = 0,  d33 e22 + d22 e33 = 0,  d11 e33 + d33 e11 = 0.

    Returns two scalar fields (mixed, paired), each the pointwise root of
    the summed squares of its three conditions.  Exact symmetrized gradients
    sampled on the grid give residuals of stencil order O(h^2).
    """
    if e_diag.ndim != 4 or e_diag.shape[-1] != 3:
        raise ValueError("expected a diagonal tensor field of shape (N, N, N, 3)")
    h = grid.h
    e11, e22, e33 = e_diag[..., 0], e_diag[..., 1], e_diag[..., 2]

    mixed = (
        _d1(_d1(e11, 1, h), 2, h) ** 2
        + _d1(_d1(e22, 0, h), 2, h) ** 2
        + _d1(_d1(e33, 0, h), 1, h) ** 2
    )
    paired = (
        (_d2(e11, 1, h) + _d2(e22, 0, h)) ** 2
        + (_d2(e22, 2, h) + _d2(e33, 1, h)) ** 2
        + (_d2(e33, 0, h) + _d2(e11, 2, h)) ** 2
    )
    return np.sqrt(mixed), np.sqrt(paired)


def residual_norms(e_diag: np.ndarray, grid: Grid3) -> tuple:
    """L2 aggregates of the two compatibility residual families."""
    mixed, paired = compatibility_residual(e_diag, grid)
    return l2_norm(mixed, grid), l2_norm(paired, grid)
