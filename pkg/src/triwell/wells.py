"""The three-well system: wells, auxiliary matrices and twin directions.

The three wells are diagonal strains built from a parameter triple
(eta1, eta2, eta3) subject to the ellipticity conditions

    eta2 < eta1 < eta3   and   eta2 + eta3 > 2*eta1,

which exclude symmetrized rank-one connections between the wells.  The
auxiliary matrices J_1, J_2, J_3 (with kappa = eta2 + eta3 - eta1 on the
distinguished diagonal slot) are pairwise symmetrized rank-one connected and
each J_i is connected to the well e_i; the connecting directions are the six
twin vectors b_ij.  All of these identities are verified exactly at
construction time.

Canonical well ordering used throughout the package:

    e1 = diag(eta3, eta1, eta2)
    e2 = diag(eta2, eta3, eta1)
    e3 = diag(eta1, eta2, eta3)

An alternative ordering that swaps wells 1 and 3 appears in some eigenstrain
conventions; ``convert_well_index`` maps it onto the canonical one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symmat import SymMat3, sym_outer

IDENTITY_TOL = 1e-12

_SQ2 = np.sqrt(2.0)

# integer lattice representatives of the twin directions; unit vectors are
# these divided by sqrt(2)
_TWIN_INT = {
    (1, 2): (1, 1, 0),
    (2, 1): (-1, 1, 0),
    (3, 1): (1, 0, 1),
    (1, 3): (1, 0, -1),
    (2, 3): (0, 1, 1),
    (3, 2): (0, -1, 1),
}

# Levi-Civita symbol values for the index triples used in the J-pair identity
_EPS = {(1, 2): 1.0, (1, 3): -1.0, (2, 3): 1.0}


class EllipticityViolation(ValueError):
    """Raised when an eta-triple fails the ellipticity conditions."""


def _ro(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


def prev_index(i: int) -> int:
    """The cyclic predecessor in {1,2,3}: 1 -> 3, 2 -> 1, 3 -> 2."""
    return 3 if i == 1 else i - 1


def convert_well_index(alpha: int, ordering: str = "canonical") -> int:
    """Map a well index in the given ordering convention to the canonical one.

    The 'swapped' convention exchanges wells 1 and 3 and keeps well 2.
    """
    if ordering == "canonical":
        return alpha
    if ordering == "swapped":
        return {1: 3, 2: 2, 3: 1}[alpha]
    raise ValueError(f"unknown well ordering {ordering!r}")


@dataclass(frozen=True)
class WellSystem:
    """Validated three-well system with auxiliary matrices and twin directions."""

    eta1: float
    eta2: float
    eta3: float
    kappa: float
    wells: tuple  # (e1, e2, e3) as SymMat3
    aux: tuple  # (J1, J2, J3) as SymMat3
    twin_unit: dict = field(repr=False)  # (i, j) -> unit vector
    twin_int: dict = field(repr=False)  # (i, j) -> integer lattice vector

    @property
    def etas(self) -> np.ndarray:
        return np.array([self.eta1, self.eta2, self.eta3])

    @property
    def trace(self) -> float:
        return self.eta1 + self.eta2 + self.eta3

    def well(self, i: int) -> SymMat3:
        return self.wells[i - 1]

    def J(self, i: int) -> SymMat3:
        return self.aux[i - 1]

    @property
    def barycenter(self) -> SymMat3:
        """The equal-weight combination of the three auxiliary matrices."""
        v = (self.aux[0].voigt + self.aux[1].voigt + self.aux[2].voigt) / 3.0
        return SymMat3.from_voigt(v)

    def twin(self, i: int, j: int) -> np.ndarray:
        return self.twin_unit[(i, j)]

    def twin_lattice(self, i: int, j: int) -> np.ndarray:
        return self.twin_int[(i, j)]

    def twin_pair(self, i: int, j: int) -> np.ndarray:
        """The two twin directions of the (i, j) connection, stacked (2, 3)."""
        return np.stack([self.twin_unit[(i, j)], self.twin_unit[(j, i)]])

    def b_set(self, j: int) -> np.ndarray:
        """The four twin directions involving index j, stacked (4, 3)."""
        others = [k for k in (1, 2, 3) if k != j]
        return np.stack(
            [self.twin_unit[(j, k)] for k in others]
            + [self.twin_unit[(k, j)] for k in others]
        )

    @property
    def b_all(self) -> np.ndarray:
        """All six twin directions, stacked (6, 3)."""
        return np.stack([self.twin_unit[k] for k in sorted(self.twin_unit)])

    def wells_voigt(self) -> np.ndarray:
        """The three wells as a (3, 6) component array."""
        return np.stack([w.voigt for w in self.wells])

    def rank_one_identity_residuals(self) -> dict:
        """Max-norm residuals of the symmetrized rank-one identities.

        Three J-pair identities plus, per well i (with j the cyclic
        predecessor), the two collinear segment identities through e_i.
        """
        res = {}
        dk = self.kappa - self.eta1
        for (i, l), eps in _EPS.items():
            expect = 2.0 * dk * eps * sym_outer(self.twin(i, l), self.twin(l, i))
            res[f"J{l}-J{i}"] = (self.J(l) - self.J(i) - expect).max_abs()
        d12 = self.eta1 - self.eta2
        d13 = self.eta1 - self.eta3
        for i in (1, 2, 3):
            j = prev_index(i)
            conn = 2.0 * sym_outer(self.twin(i, j), self.twin(j, i))
            res[f"e{i}-J{i}"] = (self.well(i) - self.J(i) - d12 * conn).max_abs()
            res[f"J{j}-e{i}"] = (self.J(j) - self.well(i) - d13 * conn).max_abs()
        return res


def wells_from_etas(eta1: float, eta2: float, eta3: float) -> WellSystem:
    """Build and validate the full well system from an eta-triple.

    Raises EllipticityViolation naming the failing inequality; verifies all
    rank-one identities and trace invariants to 1e-12 after construction.
    """
    eta1, eta2, eta3 = float(eta1), float(eta2), float(eta3)
    if not eta2 < eta1:
        raise EllipticityViolation(f"eta2 < eta1 violated: eta2={eta2}, eta1={eta1}")
    if not eta1 < eta3:
        raise EllipticityViolation(f"eta1 < eta3 violated: eta1={eta1}, eta3={eta3}")
    if not eta2 + eta3 > 2.0 * eta1:
        raise EllipticityViolation(
            f"eta2 + eta3 > 2*eta1 violated: eta2+eta3={eta2 + eta3}, 2*eta1={2.0 * eta1}"
        )
    kappa = eta2 + eta3 - eta1

    wells = (
        SymMat3.diag(eta3, eta1, eta2),
        SymMat3.diag(eta2, eta3, eta1),
        SymMat3.diag(eta1, eta2, eta3),
    )
    aux = (
        SymMat3.diag(kappa, eta1, eta1),
        SymMat3.diag(eta1, kappa, eta1),
        SymMat3.diag(eta1, eta1, kappa),
    )
    twin_int = {k: _ro(np.array(v, dtype=float)) for k, v in _TWIN_INT.items()}
    twin_unit = {k: _ro(v / _SQ2) for k, v in twin_int.items()}

    ws = WellSystem(eta1, eta2, eta3, kappa, wells, aux, twin_unit, twin_int)

    for k, b in ws.twin_unit.items():
        if abs(np.linalg.norm(b) - 1.0) > IDENTITY_TOL:
            raise AssertionError(f"twin direction b{k} is not unit")
    tr = ws.trace
    for i in (1, 2, 3):
        if abs(ws.well(i).trace() - tr) > IDENTITY_TOL or abs(ws.J(i).trace() - tr) > IDENTITY_TOL:
            raise AssertionError(f"trace invariant violated for index {i}")
    bad = {k: r for k, r in ws.rank_one_identity_residuals().items() if r > IDENTITY_TOL}
    if bad:
        raise AssertionError(f"rank-one identities violated: {bad}")
    return ws


def table_defaults() -> WellSystem:
    """The reference parameter set (eta1, eta2, eta3) = (0.03, 0.01, 0.06)."""
    return wells_from_etas(0.03, 0.01, 0.06)
