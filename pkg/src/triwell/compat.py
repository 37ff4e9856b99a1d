"""Strain compatibility of symmetric matrices and the three-matrix structure.

Two symmetric matrices A, B are compatible when A - B = (a (x) b + b (x) a)/2
for nonzero vectors a, b; a planar laminate between them then exists with
interface normals parallel to a or b (the twin directions).

Criteria used here:

* 2x2: compatible iff det(A - B) <= 0.
* 3x3: compatible iff the middle eigenvalue of A - B vanishes (the spectrum
  of a symmetrized outer product is {mu-, 0, mu+}); the outer eigenvalues
  then have opposite or zero sign automatically.

When a pair is compatible the twin vectors are reconstructed from the
spectral decomposition of the difference,

    a = sqrt(l_max) v_max + sqrt(-l_min) v_min,
    b = sqrt(l_max) v_max - sqrt(-l_min) v_min,

and every certificate records the reconstruction residual.

A triple of pairwise *incompatible* matrices forms a T3 structure when each
open connecting segment contains a point compatible with the opposite
matrix.  No such triple exists among 2x2 symmetric matrices; in 3x3 the
three-well system of :mod:`triwell.wells` is the canonical example.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .symmat import SymMat2, SymMat3, sym_outer

# relative middle-eigenvalue tolerance of the 3D criterion
MIDDLE_EIG_RTOL = 1e-10
# lambda root refinement width in the T3 segment search
T3_BISECT_TOL = 1e-12
T3_SCAN_POINTS = 64


@dataclass(frozen=True)
class CompatCertificate:
    """Twin vectors a, b with the reconstruction residual |A-B-sym(a@b)|_max."""

    a: np.ndarray
    b: np.ndarray
    residual: float

    def spans(self, directions, tol=1e-8) -> bool:
        """True if a and b lie in the span of the given direction pair (up to
        sign and scale)."""
        basis = np.stack([np.asarray(d, float) for d in directions])
        for v in (self.a, self.b):
            n = np.linalg.norm(v)
            if n == 0.0:
                continue
            coeff, res, _, _ = np.linalg.lstsq(basis.T, v, rcond=None)
            resid = np.linalg.norm(basis.T @ coeff - v)
            if resid > tol * n:
                return False
        return True


@dataclass(frozen=True)
class T3Certificate:
    """Witness of a T3 structure.

    lambdas[j] places the auxiliary point on the segment opposite to matrix
    j+1 following the cyclic convention: the first auxiliary point is
    lam*A2 + (1-lam)*A3, and so on.
    """

    lambdas: tuple
    aux_points: tuple
    pair_certs: tuple


def _dim_of(m):
    if isinstance(m, SymMat3):
        return 3
    if isinstance(m, SymMat2):
        return 2
    raise TypeError(f"expected SymMat2 or SymMat3, got {type(m).__name__}")


def _certificate_from_difference(c_mat: np.ndarray) -> CompatCertificate:
    """Factor a symmetric matrix with spectrum {l-, 0(, ...), l+} as sym(a@b)."""
    vals, vecs = np.linalg.eigh(c_mat)
    lmin, lmax = vals[0], vals[-1]
    p = np.sqrt(max(lmax, 0.0)) * vecs[:, -1]
    q = np.sqrt(max(-lmin, 0.0)) * vecs[:, 0]
    a = p + q
    b = p - q
    recon = 0.5 * (np.outer(a, b) + np.outer(b, a))
    residual = float(np.max(np.abs(c_mat - recon)))
    a.setflags(write=False)
    b.setflags(write=False)
    return CompatCertificate(a=a, b=b, residual=residual)


def compatible(A, B) -> Optional[CompatCertificate]:
    """Return a compatibility certificate for the pair, or None.

    Identical matrices are not considered compatible (the definition requires
    a nonzero difference).  Symmetric in its arguments up to the orientation
    of the reconstructed twin vectors.
    """
    dim = _dim_of(A)
    if _dim_of(B) != dim:
        raise ValueError("dimension mismatch between A and B")
    if dim == 2:
        c = A - B
        if c.norm() == 0.0:
            return None
        if c.det() > 0.0:
            return None
        return _certificate_from_difference(c.matrix)
    c = A - B
    if c.norm() == 0.0:
        return None
    vals = np.linalg.eigvalsh(c.matrix)
    tol = MIDDLE_EIG_RTOL * (1.0 + c.norm())
    if abs(vals[1]) > tol or vals[0] > tol or vals[2] < -tol:
        return None
    # project out the (numerically zero) middle eigenvalue before factoring
    return _certificate_from_difference(c.matrix)


def _middle_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(m)[1])


def _segment_lambda_3d(P: SymMat3, Q: SymMat3, A: SymMat3):
    """Find lam in (0,1) with lam*P + (1-lam)*Q compatible with A.

    Coarse scan of the middle eigenvalue of the difference followed by
    bisection on sign changes; the scan minimum is also polished in case of
    a tangential zero.
    """
    base = (Q - A).matrix
    step = (P - Q).matrix

    def mid(lam):
        return _middle_eigenvalue(base + lam * step)

    lams = np.linspace(0.0, 1.0, T3_SCAN_POINTS + 2)
    stack = base[None, :, :] + lams[:, None, None] * step[None, :, :]
    mids = np.linalg.eigvalsh(stack)[:, 1]

    candidates = []
    for i in range(len(lams) - 1):
        if mids[i] == 0.0 and 0.0 < lams[i] < 1.0:
            candidates.append(lams[i])
        if mids[i] * mids[i + 1] < 0.0:
            lo, hi = lams[i], lams[i + 1]
            flo = mids[i]
            while hi - lo > T3_BISECT_TOL:
                mid_lam = 0.5 * (lo + hi)
                fm = mid(mid_lam)
                if fm == 0.0:
                    lo = hi = mid_lam
                    break
                if flo * fm < 0.0:
                    hi = mid_lam
                else:
                    lo, flo = mid_lam, fm
            candidates.append(0.5 * (lo + hi))
    # tangential near-zero without a sign change
    i_min = int(np.argmin(np.abs(mids)))
    candidates.append(lams[i_min])

    for lam in candidates:
        if not 0.0 < lam < 1.0:
            continue
        point = lam * P + (1.0 - lam) * Q
        cert = compatible(point, A)
        if cert is not None:
            return lam, point, cert
    return None


def _segment_lambda_2d(P: SymMat2, Q: SymMat2, A: SymMat2):
    """2D variant: det(lam*P + (1-lam)*Q - A) is an explicit quadratic."""
    R = Q - A
    S = P - Q
    a2 = S.xx * S.yy - S.xy * S.xy
    a1 = R.xx * S.yy + S.xx * R.yy - 2.0 * R.xy * S.xy
    a0 = R.det()

    def det_at(lam):
        return a2 * lam * lam + a1 * lam + a0

    scale = max(abs(a2), abs(a1), abs(a0), 1e-300)
    tol = 1e-14 * scale
    # minimize the quadratic over [0, 1]
    candidates = [0.0, 1.0]
    if a2 > 0.0:
        vertex = -a1 / (2.0 * a2)
        if 0.0 < vertex < 1.0:
            candidates.append(vertex)
    best = min(candidates, key=det_at)
    if det_at(best) > tol:
        return None
    # an interior point with nonpositive determinant exists; locate one
    if 0.0 < best < 1.0:
        lam = best
    else:
        # negative value at an endpoint extends strictly inside by continuity
        if det_at(best) > -tol:
            return None
        lam = best
        shift = 1e-9 if best == 0.0 else -1e-9
        while 0.0 < lam + shift < 1.0 and det_at(lam + shift) <= 0.0:
            lam += shift
            shift *= 4.0
        lam = min(max(lam, 1e-12), 1.0 - 1e-12)
        if det_at(lam) > 0.0:
            return None
    point = lam * P + (1.0 - lam) * Q
    cert = compatible(point, A)
    if cert is None:
        return None
    return lam, point, cert


def is_T3(A1, A2, A3) -> Optional[T3Certificate]:
    """Certify the triple as a T3 structure, or return None.

    Returns None when some pair is compatible or when some connecting
    segment carries no compatible auxiliary point.  Raises ValueError for
    coincident or collinear triples.
    """
    dim = _dim_of(A1)
    if _dim_of(A2) != dim or _dim_of(A3) != dim:
        raise ValueError("dimension mismatch in triple")
    mats = (A1, A2, A3)
    d21 = A2 - A1
    d31 = A3 - A1
    scale = max(d21.norm(), d31.norm(), (A3 - A2).norm())
    if scale == 0.0 or (A3 - A2).norm() == 0.0 or d21.norm() == 0.0 or d31.norm() == 0.0:
        raise ValueError("degenerate triple: coincident matrices")
    if dim == 3:
        v1, v2 = d21.voigt, d31.voigt
    else:
        v1 = np.array([d21.xx, d21.yy, d21.xy])
        v2 = np.array([d31.xx, d31.yy, d31.xy])
    g11 = float(v1 @ v1)
    g22 = float(v2 @ v2)
    g12 = float(v1 @ v2)
    if g11 * g22 - g12 * g12 <= (1e-12 * scale**2) ** 2:
        raise ValueError("degenerate triple: collinear matrices")

    # condition (i): pairwise incompatibility
    for i in range(3):
        for j in range(i + 1, 3):
            if compatible(mats[i], mats[j]) is not None:
                return None

    # condition (ii): a compatible point on each opposite open segment,
    # cyclically (segment (A2,A3) against A1, etc.)
    find = _segment_lambda_3d if dim == 3 else _segment_lambda_2d
    lambdas = []
    points = []
    certs = []
    for j in range(3):
        P = mats[(j + 1) % 3]
        Q = mats[(j + 2) % 3]
        hit = find(P, Q, mats[j])
        if hit is None:
            return None
        lam, point, cert = hit
        lambdas.append(lam)
        points.append(point)
        certs.append(cert)
    return T3Certificate(lambdas=tuple(lambdas), aux_points=tuple(points), pair_certs=tuple(certs))
