"""FFT fixed-point equilibrium solver for the three-well material.

Each grid point carries variant fractions given by a softmax of the variant
strain energies (an entropic regularization with temperature kT); the
resulting eigenstrain polarization feeds a periodic Green operator built
from the isotropic acoustic tensor, and the two sweeps alternate until the
strain increment stalls.  The zero frequency imposes the macroscopic mean
strain exactly at every iteration.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .energy import EnergyReport, PhaseField, total_variation_relaxed
from .fields import Grid3
from .symmat import VOIGT_WEIGHTS, SymMat3
from .wells import WellSystem

CHECKPOINT_MAGIC = b"TWCP"
CHECKPOINT_VERSION = 1
_ENDIAN_MARK = 0x01020304


@dataclass(frozen=True)
class IsotropicHooke:
    """Isotropic stiffness C_ijkl = lam_e d_ij d_kl + mu_e (d_ik d_jl + d_il d_jk)."""

    lam_e: float
    mu_e: float

    def __post_init__(self):
        if self.mu_e <= 0 or 3.0 * self.lam_e + 2.0 * self.mu_e <= 0:
            raise ValueError("isotropic moduli must satisfy mu_e>0, 3*lam_e+2*mu_e>0")

    @classmethod
    def identity(cls) -> "IsotropicHooke":
        """Moduli for which C : e = e on symmetric tensors."""
        return cls(lam_e=0.0, mu_e=0.5)

    def apply(self, e6: np.ndarray) -> np.ndarray:
        """C : e componentwise on a (..., 6) field."""
        out = 2.0 * self.mu_e * np.asarray(e6, dtype=float).copy()
        tr = e6[..., 0] + e6[..., 1] + e6[..., 2]
        out[..., :3] += self.lam_e * tr[..., None]
        return out

    def acoustic(self, k: np.ndarray) -> np.ndarray:
        """Acoustic tensor mu|k|^2 I + (lam+mu) k (x) k for stacked k (..., 3)."""
        ksq = np.einsum("...i,...i->...", k, k)
        return self.mu_e * ksq[..., None, None] * np.eye(3) + (
            self.lam_e + self.mu_e
        ) * np.einsum("...i,...j->...ij", k, k)


@dataclass(frozen=True)
class SolverConfig:
    n: int
    e_bar: SymMat3
    kT: float = 1e-4
    tol: float = 1e-6
    max_iter: int = 10_000
    length: float = 1.0
    seed: int = 0
    ordering: str = "canonical"
    init_amplitude: Optional[float] = None  # default: well spread eta3 - eta2
    damping: float = 1.0
    anneal_factor: Optional[float] = None  # optional geometric kT schedule
    anneal_every: int = 50
    anneal_floor: float = 1e-6

    def __post_init__(self):
        if self.kT <= 0:
            raise ValueError("kT must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


@dataclass
class SolverState:
    e: np.ndarray  # (N, N, N, 6)
    chi: np.ndarray  # (N, N, N, 3)
    tau_diag: np.ndarray  # (N, N, N, 3)
    iterations: int
    converged: bool
    residual_history: list = field(default_factory=list)
    energy_history: list = field(default_factory=list)
    equilibrium_residual: float = np.nan
    config: Optional[SolverConfig] = None

    @property
    def phase(self) -> PhaseField:
        return PhaseField(chi=self.chi, sharp=False)

    def mean_strain(self) -> np.ndarray:
        return self.e.mean(axis=(0, 1, 2))


def constitutive_update(e: SymMat3, ws: WellSystem, C: IsotropicHooke, kT: float):
    """Pointwise constitutive response at a single strain.

    Returns (variant energies (3,), fractions (3,), condensed energy, stress).
    """
    if kT <= 0:
        raise ValueError("kT must be positive")
    e6 = e.voigt[None, :]
    wells_diag = np.stack([w.diagonal for w in ws.wells])
    chi, tau_diag, e_star = kernels.constitutive_sweep(
        np.ascontiguousarray(e6), wells_diag, C.lam_e, C.mu_e, kT
    )
    energies = np.array(
        [variant_energy(e, ws.well(a + 1), C) for a in range(3)]
    )
    sigma6 = C.apply(e6[0])
    sigma6[:3] -= tau_diag[0]
    return energies, chi[0], float(e_star[0]), SymMat3.from_voigt(sigma6)


def variant_energy(e: SymMat3, well: SymMat3, C: IsotropicHooke) -> float:
    """Strain energy density 0.5 (e - w) : C : (e - w)."""
    d = (e - well).voigt
    tr = d[0] + d[1] + d[2]
    return float(0.5 * C.lam_e * tr * tr + C.mu_e * np.sum(VOIGT_WEIGHTS * d * d))


def _half_lattice(grid: Grid3) -> np.ndarray:
    return np.ascontiguousarray(grid.freq_int_half().reshape(3, -1).T)


def green_apply(
    tau_hat: np.ndarray, e_bar: SymMat3, C: IsotropicHooke, grid: Grid3
) -> np.ndarray:
    """Apply the periodic Green operator to a polarization spectrum.

    ``tau_hat`` is the rfftn spectrum, shape (N, N, N//2+1, 3) for diagonal
    polarizations or (..., 6) in general, in numpy's unnormalized convention;
    the zero mode of the output encodes the imposed mean strain.
    """
    n = grid.n
    ncomp = tau_hat.shape[-1]
    if tau_hat.shape[:3] != (n, n, n // 2 + 1) or ncomp not in (3, 6):
        raise ValueError("tau_hat must be an rfftn spectrum with 3 or 6 components")
    k = _half_lattice(grid)
    flat = np.ascontiguousarray(tau_hat.reshape(-1, ncomp))
    ebar_scaled = e_bar.voigt * grid.cells  # unnormalized-spectrum mean slot
    e_hat = kernels.green_sweep(flat, k, C.lam_e, C.mu_e, ebar_scaled)
    return e_hat.reshape(n, n, n // 2 + 1, 6)


def equilibrium_strain(
    tau: np.ndarray, e_bar: SymMat3, C: IsotropicHooke, grid: Grid3
) -> np.ndarray:
    """Real-space equilibrium strain for a fixed polarization field."""
    tau_hat = np.fft.rfftn(tau, axes=(0, 1, 2))
    e_hat = green_apply(tau_hat, e_bar, C, grid)
    return np.fft.irfftn(e_hat, s=grid.shape, axes=(0, 1, 2))


def _tau_from_chi(chi: np.ndarray, wells_diag: np.ndarray, C: IsotropicHooke) -> np.ndarray:
    avg = chi @ wells_diag
    return C.lam_e * avg.sum(axis=-1, keepdims=True) + 2.0 * C.mu_e * avg


def equilibrium_residual(
    e: np.ndarray, tau_diag: np.ndarray, C: IsotropicHooke, grid: Grid3
) -> float:
    """Scale-free aggregate of the momentum-balance residual k . sigma_hat(k)."""
    sigma = C.apply(e)
    sigma[..., :3] -= tau_diag
    sig_hat = np.fft.rfftn(sigma, axes=(0, 1, 2))
    k = grid.freq_int_half()
    div = np.empty(sig_hat.shape[:3] + (3,), dtype=complex)
    div[..., 0] = sig_hat[..., 0] * k[0] + sig_hat[..., 5] * k[1] + sig_hat[..., 4] * k[2]
    div[..., 1] = sig_hat[..., 5] * k[0] + sig_hat[..., 1] * k[1] + sig_hat[..., 3] * k[2]
    div[..., 2] = sig_hat[..., 4] * k[0] + sig_hat[..., 3] * k[1] + sig_hat[..., 2] * k[2]
    w = grid.rfft_mode_weights()
    num = np.sum(w[..., None] * np.abs(div) ** 2)
    ksq = np.einsum("m...,m...->...", k, k)
    den = np.sum(w * ksq * np.einsum("...c,c->...", np.abs(sig_hat) ** 2, VOIGT_WEIGHTS))
    return float(np.sqrt(num / den)) if den > 0 else 0.0


def solve_equilibrium(
    cfg: SolverConfig,
    ws: WellSystem,
    C: IsotropicHooke,
    frozen_chi: Optional[np.ndarray] = None,
    callback=None,
):
    """Run the fixed-point iteration to (attempted) convergence.

    With ``frozen_chi`` the variant fractions are held fixed, which makes the
    problem linear; the loop then converges in two sweeps and serves as an
    oracle surface.  Returns (state, report); non-convergence is flagged on
    the state rather than raised, a NaN increment aborts with a diagnostic.
    """
    grid = Grid3(cfg.n, cfg.length)
    n = grid.n
    wells_diag = np.stack([w.diagonal for w in ws.wells])
    ebar6 = cfg.e_bar.voigt
    ebar_norm = max(np.sqrt(np.sum(VOIGT_WEIGHTS * ebar6**2)), 1e-300)

    rng = np.random.default_rng(cfg.seed)
    amp = cfg.init_amplitude
    if amp is None:
        amp = ws.eta3 - ws.eta2
    e = np.broadcast_to(ebar6, (n, n, n, 6)).copy()
    if amp > 0 and frozen_chi is None:
        pert = amp * rng.standard_normal((n, n, n, 6))
        pert -= pert.mean(axis=(0, 1, 2))
        e += pert

    if frozen_chi is not None:
        if frozen_chi.shape != (n, n, n, 3):
            raise ValueError("frozen_chi must have shape (N, N, N, 3)")
        chi_flat = np.ascontiguousarray(frozen_chi.reshape(-1, 3))

    k = _half_lattice(grid)
    ebar_scaled = ebar6 * grid.cells
    kT = cfg.kT
    state = SolverState(
        e=e,
        chi=np.empty((n, n, n, 3)),
        tau_diag=np.empty((n, n, n, 3)),
        iterations=0,
        converged=False,
        config=cfg,
    )

    for it in range(1, cfg.max_iter + 1):
        e_flat = np.ascontiguousarray(e.reshape(-1, 6))
        if frozen_chi is None:
            chi_flat, tau_flat, e_star = kernels.constitutive_sweep(
                e_flat, wells_diag, C.lam_e, C.mu_e, kT
            )
            state.energy_history.append(float(e_star.mean()) * grid.length**3)
        else:
            tau_flat = _tau_from_chi(chi_flat, wells_diag, C)
        tau_hat = np.fft.rfftn(tau_flat.reshape(n, n, n, 3), axes=(0, 1, 2))
        e_hat = kernels.green_sweep(
            np.ascontiguousarray(tau_hat.reshape(-1, 3)), k, C.lam_e, C.mu_e, ebar_scaled
        )
        e_new = np.fft.irfftn(
            e_hat.reshape(n, n, n // 2 + 1, 6), s=grid.shape, axes=(0, 1, 2)
        )
        if cfg.damping < 1.0:
            e_new = cfg.damping * e_new + (1.0 - cfg.damping) * e

        diff = e_new - e
        inc = np.sqrt(np.mean(np.einsum("...c,c->...", diff**2, VOIGT_WEIGHTS)))
        rel = inc / ebar_norm
        if not np.isfinite(rel):
            raise RuntimeError(
                f"NaN/Inf strain increment at iteration {it} (kT={kT}, n={n}); "
                "aborting fixed-point iteration"
            )
        state.residual_history.append(rel)
        e = e_new
        state.iterations = it
        if callback is not None:
            callback(it, rel)
        if rel <= cfg.tol:
            state.converged = True
            break
        if (
            cfg.anneal_factor is not None
            and it % cfg.anneal_every == 0
            and kT * cfg.anneal_factor >= cfg.anneal_floor
        ):
            kT *= cfg.anneal_factor

    e_flat = np.ascontiguousarray(e.reshape(-1, 6))
    chi_fin, tau_fin, e_star = kernels.constitutive_sweep(
        e_flat, wells_diag, C.lam_e, C.mu_e, kT
    )
    if frozen_chi is not None:
        chi_fin = chi_flat
        tau_fin = _tau_from_chi(chi_flat, wells_diag, C)
    state.e = e
    state.chi = np.asarray(chi_fin).reshape(n, n, n, 3)
    state.tau_diag = np.asarray(tau_fin).reshape(n, n, n, 3)
    state.equilibrium_residual = equilibrium_residual(e, state.tau_diag, C, grid)
    free_energy = float(np.asarray(e_star).mean()) * grid.length**3
    sharp = PhaseField(state.chi, sharp=False).sharpened()
    report = EnergyReport.build(
        free_energy,
        total_variation_relaxed(sharp.chi, grid),
        0.0,
        iterations=state.iterations,
        converged=state.converged,
        equilibrium_residual=state.equilibrium_residual,
        final_kT=kT,
        mean_strain=tuple(state.mean_strain()),
    )
    return state, report


def save_checkpoint(path, state: SolverState, ws: WellSystem) -> None:
    """Raw-binary state dump with a small self-describing header."""
    cfg = state.config
    n = state.e.shape[0]
    fields = [("strain", state.e, 6), ("chi", state.chi, 3), ("tau", state.tau_diag, 3)]
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<IIId", CHECKPOINT_VERSION, _ENDIAN_MARK, n,
                            cfg.length if cfg else 1.0))
        f.write(struct.pack("<dIB3x", cfg.kT if cfg else np.nan,
                            state.iterations, int(state.converged)))
        ebar = cfg.e_bar.voigt if cfg else np.full(6, np.nan)
        f.write(struct.pack("<6d", *ebar))
        f.write(struct.pack("<3d", ws.eta1, ws.eta2, ws.eta3))
        f.write(struct.pack("<I", len(fields)))
        for name, arr, ncomp in fields:
            f.write(struct.pack("<8sI", name.encode().ljust(8, b"\0"), ncomp))
        for name, arr, ncomp in fields:
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> dict:
    """Read a checkpoint written by save_checkpoint."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"not a checkpoint file (magic {magic!r})")
        version, endian, n, length = struct.unpack("<IIId", f.read(20))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        if endian != _ENDIAN_MARK:
            raise ValueError("endianness marker mismatch")
        kT, iterations, converged = struct.unpack("<dIB3x", f.read(16))
        e_bar = np.array(struct.unpack("<6d", f.read(48)))
        etas = np.array(struct.unpack("<3d", f.read(24)))
        (nfields,) = struct.unpack("<I", f.read(4))
        descriptors = []
        for _ in range(nfields):
            raw, ncomp = struct.unpack("<8sI", f.read(12))
            descriptors.append((raw.rstrip(b"\0").decode(), ncomp))
        out = {
            "n": n,
            "length": length,
            "kT": kT,
            "iterations": iterations,
            "converged": bool(converged),
            "e_bar": e_bar,
            "etas": etas,
        }
        for name, ncomp in descriptors:
            count = n * n * n * ncomp
            data = np.frombuffer(f.read(count * 8), dtype="<f8")
            out[name] = data.reshape(n, n, n, ncomp).copy()
    return out
