"""Vectorized numpy implementation of the solver kernels."""

import numpy as np

NAME = "numpy"


def constitutive_sweep(e6, wells_diag, lam_e, mu_e, kT):
    """Variant energies, softmax fractions, condensed energy and polarization.

    Parameters
    ----------
    e6 : (M, 6) strain components (11, 22, 33, 23, 13, 12)
    wells_diag : (3, 3) diagonal entries of the three wells
    lam_e, mu_e : isotropic moduli
    kT : positive softmax temperature

    Returns
    -------
    chi : (M, 3) variant fractions (rows sum to one)
    tau_diag : (M, 3) diagonal polarization C : sum(chi_a well_a)
    e_star : (M,) condensed energy -kT log sum exp(-E_a/kT)
    """
    d_off = np.einsum("mc,mc->m", e6[:, 3:], e6[:, 3:])  # shear part, all wells alike
    energies = np.empty((e6.shape[0], 3))
    for a in range(3):
        d = e6[:, :3] - wells_diag[a]
        tr = d.sum(axis=1)
        energies[:, a] = 0.5 * lam_e * tr * tr + mu_e * (
            np.einsum("mc,mc->m", d, d) + 2.0 * d_off
        )
    m = energies.min(axis=1)
    w = np.exp(-(energies - m[:, None]) / kT)
    z = w.sum(axis=1)
    chi = w / z[:, None]
    e_star = m - kT * np.log(z)
    avg = chi @ wells_diag  # (M, 3) diagonal of sum(chi_a well_a)
    tau_diag = lam_e * avg.sum(axis=1)[:, None] + 2.0 * mu_e * avg
    return chi, tau_diag, e_star


def green_sweep(tau_hat, k, lam_e, mu_e, ebar6):
    """Per-mode strain of the periodic equilibrium problem.

    Solves the acoustic system for each frequency with the closed-form
    isotropic inverse and returns sym(u (x) k); the zero mode is set to the
    imposed mean strain.

    Parameters
    ----------
    tau_hat : (M, 3) complex diagonal polarization spectrum, or (M, 6) full
    k : (M, 3) frequency vectors (any uniform scaling; the map is 0-homogeneous)
    ebar6 : (6,) imposed mean strain

    Returns
    -------
    e_hat : (M, 6) complex strain spectrum
    """
    ksq = np.einsum("mi,mi->m", k, k)
    zero = ksq == 0.0
    ksq_safe = np.where(zero, 1.0, ksq)

    if tau_hat.shape[1] == 3:
        t = tau_hat * k  # diagonal tau: (tau_11 k1, tau_22 k2, tau_33 k3)
    else:
        t = np.empty((tau_hat.shape[0], 3), dtype=complex)
        t[:, 0] = tau_hat[:, 0] * k[:, 0] + tau_hat[:, 5] * k[:, 1] + tau_hat[:, 4] * k[:, 2]
        t[:, 1] = tau_hat[:, 5] * k[:, 0] + tau_hat[:, 1] * k[:, 1] + tau_hat[:, 3] * k[:, 2]
        t[:, 2] = tau_hat[:, 4] * k[:, 0] + tau_hat[:, 3] * k[:, 1] + tau_hat[:, 2] * k[:, 2]

    coef = (lam_e + mu_e) / (lam_e + 2.0 * mu_e)
    kt = np.einsum("mi,mi->m", k, t)
    u = (t - coef * (kt / ksq_safe)[:, None] * k) / (mu_e * ksq_safe)[:, None]

    e_hat = np.empty((k.shape[0], 6), dtype=complex)
    e_hat[:, 0] = u[:, 0] * k[:, 0]
    e_hat[:, 1] = u[:, 1] * k[:, 1]
    e_hat[:, 2] = u[:, 2] * k[:, 2]
    e_hat[:, 3] = 0.5 * (u[:, 1] * k[:, 2] + u[:, 2] * k[:, 1])
    e_hat[:, 4] = 0.5 * (u[:, 0] * k[:, 2] + u[:, 2] * k[:, 0])
    e_hat[:, 5] = 0.5 * (u[:, 0] * k[:, 1] + u[:, 1] * k[:, 0])
    e_hat[zero] = np.asarray(ebar6, dtype=complex)
    return e_hat
