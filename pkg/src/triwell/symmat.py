"""Symmetric strain matrices in two and three dimensions.

These are small immutable value types used by the algebra layer; grid-sized
data lives in plain numpy arrays (see :mod:`triwell.fields`).  Three-dimensional
symmetric matrices are stored componentwise in the order
(xx, yy, zz, yz, xz, xy); off-diagonal components enter Frobenius norms with
weight two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# component order of the 6-vector form of a symmetric 3x3 matrix
COMPONENTS3 = ("xx", "yy", "zz", "yz", "xz", "xy")
# squared-norm weights: off-diagonals appear twice in the full matrix
VOIGT_WEIGHTS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


@dataclass(frozen=True)
class SymMat3:
    """Symmetric 3x3 matrix with six independent components."""

    xx: float = 0.0
    yy: float = 0.0
    zz: float = 0.0
    yz: float = 0.0
    xz: float = 0.0
    xy: float = 0.0

    @classmethod
    def diag(cls, a, b, c) -> "SymMat3":
        return cls(xx=float(a), yy=float(b), zz=float(c))

    @classmethod
    def from_matrix(cls, m, tol=1e-12) -> "SymMat3":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.T)) > tol * (1.0 + np.max(np.abs(m))):
            raise ValueError("matrix is not symmetric")
        s = 0.5 * (m + m.T)
        return cls(s[0, 0], s[1, 1], s[2, 2], s[1, 2], s[0, 2], s[0, 1])

    @classmethod
    def from_voigt(cls, v) -> "SymMat3":
        v = np.asarray(v, dtype=float)
        return cls(*v)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.xx, self.xy, self.xz],
                [self.xy, self.yy, self.yz],
                [self.xz, self.yz, self.zz],
            ]
        )

    @property
    def voigt(self) -> np.ndarray:
        return np.array([self.xx, self.yy, self.zz, self.yz, self.xz, self.xy])

    @property
    def diagonal(self) -> np.ndarray:
        return np.array([self.xx, self.yy, self.zz])

    def trace(self) -> float:
        return self.xx + self.yy + self.zz

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.sqrt(np.sum(VOIGT_WEIGHTS * self.voigt**2)))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.voigt)))

    def is_diagonal(self, tol=1e-12) -> bool:
        return max(abs(self.yz), abs(self.xz), abs(self.xy)) <= tol

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return np.linalg.eigvalsh(self.matrix)

    def __add__(self, other: "SymMat3") -> "SymMat3":
        return SymMat3(*(self.voigt + other.voigt))

    def __sub__(self, other: "SymMat3") -> "SymMat3":
        return SymMat3(*(self.voigt - other.voigt))

    def __mul__(self, s: float) -> "SymMat3":
        return SymMat3(*(self.voigt * s))

    __rmul__ = __mul__

    def __neg__(self) -> "SymMat3":
        return SymMat3(*(-self.voigt))

    def allclose(self, other: "SymMat3", tol=1e-12) -> bool:
        return float(np.max(np.abs(self.voigt - other.voigt))) <= tol


@dataclass(frozen=True)
class SymMat2:
    """Symmetric 2x2 matrix with three independent components."""

    xx: float = 0.0
    yy: float = 0.0
    xy: float = 0.0

    @classmethod
    def diag(cls, a, b) -> "SymMat2":
        return cls(xx=float(a), yy=float(b))

    @classmethod
    def from_matrix(cls, m, tol=1e-12) -> "SymMat2":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[0, 1] - m[1, 0]) > tol * (1.0 + np.max(np.abs(m))):
            raise ValueError("matrix is not symmetric")
        return cls(m[0, 0], m[1, 1], 0.5 * (m[0, 1] + m[1, 0]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.xx, self.xy], [self.xy, self.yy]])

    def det(self) -> float:
        return self.xx * self.yy - self.xy * self.xy

    def trace(self) -> float:
        return self.xx + self.yy

    def norm(self) -> float:
        return float(np.sqrt(self.xx**2 + self.yy**2 + 2.0 * self.xy**2))

    def __add__(self, other: "SymMat2") -> "SymMat2":
        return SymMat2(self.xx + other.xx, self.yy + other.yy, self.xy + other.xy)

    def __sub__(self, other: "SymMat2") -> "SymMat2":
        return SymMat2(self.xx - other.xx, self.yy - other.yy, self.xy - other.xy)

    def __mul__(self, s: float) -> "SymMat2":
        return SymMat2(self.xx * s, self.yy * s, self.xy * s)

    __rmul__ = __mul__


def sym_outer(a, b):
    """Symmetrized outer product (a (x) b + b (x) a) / 2.

    Accepts vectors of length 2 or 3 and returns the matching SymMat type.
    Bilinear in (a, b); always symmetric.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape not in ((2,), (3,)):
        raise ValueError("sym_outer expects two vectors of equal length 2 or 3")
    m = 0.5 * (np.outer(a, b) + np.outer(b, a))
    if a.shape == (3,):
        return SymMat3.from_matrix(m)
    return SymMat2.from_matrix(m)
