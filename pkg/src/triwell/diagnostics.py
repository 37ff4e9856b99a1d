"""Fourier diagnostics: wave decomposition and empirical lemma harnesses.

The six-wave decomposition splits the (trace-free, diagonal) deviation field
into cone-localized waves

    c11 =  f12 + g12 + f13 + g13 + s11
    c22 = -f12 - g12 + f23 + g23 + s22
    c33 = -f13 - g13 - f23 - g23 + s33

where f_ij/g_ij are the cone projections of the i-component onto the b_ij /
b_ji cones and the remainders s_jj are defined residually, so the three
reconstruction identities hold to machine precision by construction.

The harnesses check the quantitative energy lemmas empirically: each fits
its unspecified constant on a calibration set and asserts only the
stability of the fitted ratio (max/median) on a disjoint test set, never a
literal constant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .cones import ConeSpec, cone_multiplier
from .determined import determinedness_polynomial
from .energy import PhaseField, elastic_energy, multiplier_lower_bound, strain_from_phase, total_variation_relaxed
from .fields import Grid3, diag_to_voigt, fourier_coefficients, mean_value
from .wells import WellSystem

_PAIRS = ((1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class WaveDecomposition:
    f: dict  # (i, j) -> scalar field, cone b_ij
    g: dict  # (i, j) -> scalar field, cone b_ji
    sigma: np.ndarray  # (N, N, N, 3) remainder components
    mu: float
    mu1: float
    eps: float
    sigma_sq: float
    e_eps: float
    bound_shape: float

    @property
    def ratio(self) -> float:
        return self.sigma_sq / self.bound_shape

    def reconstruction_error(self, chi_diag: np.ndarray) -> float:
        recon = self.reconstruct()
        return float(np.max(np.abs(recon - chi_diag)))

    def reconstruct(self) -> np.ndarray:
        f, g = self.f, self.g
        out = np.empty_like(self.sigma)
        out[..., 0] = f[(1, 2)] + g[(1, 2)] + f[(1, 3)] + g[(1, 3)] + self.sigma[..., 0]
        out[..., 1] = -f[(1, 2)] - g[(1, 2)] + f[(2, 3)] + g[(2, 3)] + self.sigma[..., 1]
        out[..., 2] = -f[(1, 3)] - g[(1, 3)] - f[(2, 3)] - g[(2, 3)] + self.sigma[..., 2]
        return out


def surface_energy_diag(chi_diag: np.ndarray, grid: Grid3) -> float:
    """Discrete BV seminorm summed over the diagonal tensor components."""
    return total_variation_relaxed(chi_diag, grid)


def six_wave_decomposition(
    chi_diag: np.ndarray, mu: float, mu1: float, eps: float, grid: Grid3, ws: WellSystem
) -> WaveDecomposition:
    """Cone-localized wave split of a trace-free diagonal deviation field.

    The remainder energy is reported against the reference bound shape
    (mu^-2 + mu1^-1 eps^-1) * E_eps with E_eps = E_el + eps * E_surf of the
    input field.
    """
    if chi_diag.ndim != 4 or chi_diag.shape[-1] != 3:
        raise ValueError("expected a diagonal field of shape (N, N, N, 3)")
    tr = chi_diag.sum(axis=-1)
    scale = float(np.max(np.abs(chi_diag))) + 1e-300
    if float(np.max(np.abs(tr))) > 1e-12 * (1.0 + scale):
        raise ValueError("input must be pointwise trace-free (mean subtracted)")

    k = grid.freq_int_half()
    spectra = [np.fft.rfftn(chi_diag[..., c]) for c in range(3)]

    f, g = {}, {}
    for i, j in _PAIRS:
        m_f = cone_multiplier(ConeSpec(ws.twin(i, j), mu, mu1), k)
        m_g = cone_multiplier(ConeSpec(ws.twin(j, i), mu, mu1), k)
        f[(i, j)] = np.fft.irfftn(m_f * spectra[i - 1], s=grid.shape)
        g[(i, j)] = np.fft.irfftn(m_g * spectra[i - 1], s=grid.shape)

    sigma = np.empty_like(chi_diag)
    sigma[..., 0] = chi_diag[..., 0] - (f[(1, 2)] + g[(1, 2)] + f[(1, 3)] + g[(1, 3)])
    sigma[..., 1] = chi_diag[..., 1] - (-f[(1, 2)] - g[(1, 2)] + f[(2, 3)] + g[(2, 3)])
    sigma[..., 2] = chi_diag[..., 2] - (-f[(1, 3)] - g[(1, 3)] - f[(2, 3)] - g[(2, 3)])

    sigma_sq = float(np.mean(np.einsum("...c->...", sigma**2))) * grid.length**3
    e_el = elastic_energy(chi_diag, grid)
    e_surf = surface_energy_diag(chi_diag, grid)
    e_eps = e_el + eps * e_surf
    bound_shape = (mu**-2 + eps**-1 / mu1) * e_eps
    return WaveDecomposition(
        f=f, g=g, sigma=sigma, mu=mu, mu1=mu1, eps=eps,
        sigma_sq=sigma_sq, e_eps=e_eps, bound_shape=bound_shape,
    )


def high_frequency_mass(chi_diag: np.ndarray, mu1: float, grid: Grid3) -> float:
    """Spectral mass above radius mu1, summed over components."""
    if mu1 <= 0:
        raise ValueError("mu1 must be positive")
    coeff = fourier_coefficients(chi_diag)
    k = grid.freq_int()
    ksq = np.einsum("m...,m...->...", k, k)
    mask = ksq >= mu1**2
    return float(np.sum(np.abs(coeff[mask, :]) ** 2)) * grid.length**3


def shell_energy(
    w: np.ndarray, b: np.ndarray, mu: float, mu_lo: float, mu_hi: float, grid: Grid3
) -> float:
    """Energy of a scalar field under the annular cone multiplier."""
    if not mu_lo < mu_hi:
        raise ValueError("annulus needs mu_lo < mu_hi")
    spec = ConeSpec(b, mu, mu_hi, mu_low=mu_lo)
    coeff = np.fft.rfftn(w) / grid.cells
    m = cone_multiplier(spec, grid.freq_int_half())
    weights = grid.rfft_mode_weights()
    return float(np.sum(weights * (m * np.abs(coeff)) ** 2)) * grid.length**3


def shell_schedule(
    w: np.ndarray, b: np.ndarray, mu: float, mu1: float, M: int, grid: Grid3
):
    """Shell energies along the geometric schedule mu_m = (M*mu)^m * mu1.

    Yields (m, mu_lo, mu_hi, energy) while the inner radius stays above the
    first lattice shell.
    """
    rows = []
    m = 1
    while True:
        mu_hi = (M * mu) ** (m - 1) * mu1
        mu_lo = (M * mu) ** m * mu1
        if mu_lo < 0.5:
            break
        rows.append((m, mu_lo, mu_hi, shell_energy(w, b, mu, mu_lo, mu_hi, grid)))
        m += 1
    return rows


def determinedness_violation(
    phase: PhaseField, ws: WellSystem, grid: Grid3, steps=(1, 2, 3, 4)
) -> float:
    """Max violation of the jump relation P_ij(d_l chi_ii) = d_l chi_jj.

    On sharp fields the finite-difference values coincide bitwise with the
    interpolation nodes, so the violation is exactly zero; on relaxed fields
    the returned norm quantifies the breakdown.
    """
    chi_t = strain_from_phase(phase, ws)
    worst = 0.0
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            poly = determinedness_polynomial(ws, i, j)
            ci = chi_t[..., i - 1]
            cj = chi_t[..., j - 1]
            for axis in range(3):
                for h in steps:
                    di = np.roll(ci, -h, axis=axis) - ci
                    dj = np.roll(cj, -h, axis=axis) - cj
                    worst = max(worst, float(np.max(np.abs(poly(di) - dj))))
    return worst


# ---------------------------------------------------------------------------
# empirical lemma harnesses


@dataclass(frozen=True)
class HarnessReport:
    lemma: str
    fitted_constant: float
    max_over_median: float
    n_calibration: int
    n_test: int
    rows: list  # dict rows: parameters, lhs, rhs_shape, ratio

    @property
    def stable(self) -> bool:
        return self.max_over_median <= 10.0


def write_harness_csv(path, report: HarnessReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lemma", "params", "lhs", "rhs_shape", "fitted_constant"])
        for row in report.rows:
            w.writerow(
                [
                    report.lemma,
                    row["params"],
                    repr(row["lhs"]),
                    repr(row["rhs_shape"]),
                    repr(report.fitted_constant),
                ]
            )


def _split_stability(ratios: np.ndarray, n_cal: int) -> tuple:
    cal, test = ratios[:n_cal], ratios[n_cal:]
    fitted = float(np.median(cal))
    spread = float(np.max(test) / np.median(test))
    return fitted, spread


def random_sharp_deviation(ws: WellSystem, grid: Grid3, rng) -> np.ndarray:
    """Mean-adjusted diagonal tensor of a random sharp three-phase field."""
    labels = rng.integers(0, 3, size=grid.shape)
    phase = PhaseField.from_labels(labels)
    chi_t = strain_from_phase(phase, ws)
    return chi_t - mean_value(chi_t)


def elastic_bound_harness(
    ws: WellSystem, grid: Grid3, n_samples: int = 100, seed: int = 0
) -> HarnessReport:
    """Elastic energy against the conical multiplier functional.

    Ratio per sample: E_el / multiplier functional; fitted on the first half,
    stability asserted on the second.
    """
    rng = np.random.default_rng(seed)
    rows = []
    ratios = []
    for _ in range(n_samples):
        chi_t = random_sharp_deviation(ws, grid, rng)
        lhs = elastic_energy(chi_t, grid)
        rhs = multiplier_lower_bound(chi_t, grid, ws)
        ratios.append(lhs / rhs)
        rows.append({"params": f"n={grid.n}", "lhs": lhs, "rhs_shape": rhs, "ratio": lhs / rhs})
    ratios = np.array(ratios)
    n_cal = n_samples // 2
    fitted, spread = _split_stability(ratios, n_cal)
    return HarnessReport(
        lemma="elastic-multiplier-bound",
        fitted_constant=fitted,
        max_over_median=spread,
        n_calibration=n_cal,
        n_test=n_samples - n_cal,
        rows=rows,
    )


def laminate_phase(grid: Grid3, normal, periods: int, phase_a=0, phase_b=1, fraction=0.5) -> PhaseField:
    """Sharp two-phase laminate with the given integer normal and period count."""
    coords = grid.coords()
    s = np.einsum("i,i...->...", np.asarray(normal, dtype=float), coords)
    t = np.mod(s * periods, 1.0)
    labels = np.where(t < fraction, phase_a, phase_b).astype(np.int8)
    return PhaseField.from_labels(labels)


def high_frequency_harness(
    ws: WellSystem, grid: Grid3, period_counts=(1, 2, 4, 8), mu1_list=None
) -> HarnessReport:
    """High-frequency spectral mass against mu1^-1 |chi|_inf E_surf.

    Sweeps laminate families over period counts and cut radii; the first
    half of the rows calibrates, the rest tests stability.
    """
    if mu1_list is None:
        mu1_list = [2 ** p for p in range(0, int(np.log2(grid.n // 4)) + 1)]
    rows = []
    normals = [(1, 0, 0), (0, 1, 0)]
    for normal in normals:
        for n_per in period_counts:
            phase = laminate_phase(grid, normal, n_per)
            chi_t = strain_from_phase(phase, ws)
            chi_t -= mean_value(chi_t)
            e_surf = surface_energy_diag(chi_t, grid)
            linf = float(np.max(np.abs(chi_t)))
            for mu1 in mu1_list:
                mass = high_frequency_mass(chi_t, mu1, grid)
                rhs = linf * e_surf / mu1
                rows.append(
                    {
                        "params": f"normal={normal},periods={n_per},mu1={mu1}",
                        "lhs": mass,
                        "rhs_shape": rhs,
                        "ratio": mass / rhs,
                    }
                )
    ratios = np.array([r["ratio"] for r in rows])
    n_cal = len(rows) // 2
    fitted, spread = _split_stability(ratios, n_cal)
    return HarnessReport(
        lemma="high-frequency-mass",
        fitted_constant=fitted,
        max_over_median=spread,
        n_calibration=n_cal,
        n_test=len(rows) - n_cal,
        rows=rows,
    )


def decomposition_harness(
    chi_diag: np.ndarray,
    grid: Grid3,
    ws: WellSystem,
    eps: float,
    mu_list=None,
    mu1_list=None,
) -> HarnessReport:
    """Remainder energy of the six-wave split against its bound shape."""
    if mu_list is None:
        mu_list = [0.24, 0.12, 0.06]
    if mu1_list is None:
        mu1_list = [grid.n / 8, grid.n / 4]
    rows = []
    for mu in mu_list:
        for mu1 in mu1_list:
            dec = six_wave_decomposition(chi_diag, mu, mu1, eps, grid, ws)
            rows.append(
                {
                    "params": f"mu={mu},mu1={mu1},eps={eps}",
                    "lhs": dec.sigma_sq,
                    "rhs_shape": dec.bound_shape,
                    "ratio": dec.ratio,
                }
            )
    ratios = np.array([r["ratio"] for r in rows])
    fitted = float(np.median(ratios))
    spread = float(np.max(ratios) / np.median(ratios))
    return HarnessReport(
        lemma="six-wave-remainder",
        fitted_constant=fitted,
        max_over_median=spread,
        n_calibration=len(rows),
        n_test=len(rows),
        rows=rows,
    )
