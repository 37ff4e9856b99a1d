"""Determinedness of the wells: difference values and interpolation polynomials.

On a strain field taking values in the three wells, the jump of one diagonal
component between two points determines the jumps of the other components.
Under ellipticity the seven possible jump values of a component

    D1 = {0, +-(eta1-eta2), +-(eta1-eta3), +-(eta2-eta3)}

are distinct, so for each component pair (i, j) there is a unique polynomial
of degree at most six with P(jump_ii) = jump_jj across all ordered well
pairs.  When a macroscopic strain enters as a fourth attainable value (the
affine-boundary-data setting), six additional candidate values appear,

    D = D1 u {+-(eta_m - ebar_ii)},

and coincidences among the thirteen break determinedness; the macroscopic
strains for which this happens form the exceptional set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .symmat import SymMat3
from .wells import WellSystem

# absolute slack used when counting distinct difference values
COINCIDENCE_RTOL = 1e-12


def _distinct_count(values: np.ndarray, tol: float) -> int:
    s = np.sort(values)
    return 1 + int(np.sum(np.diff(s) > tol))


@dataclass(frozen=True)
class DifferenceSet:
    """Candidate finite-difference values of the diagonal strain components.

    ``base`` holds the seven well-generated values; ``per_component`` (present
    only when a macroscopic strain was supplied) holds the thirteen-element
    multiset for each diagonal component.  ``exceptional`` flags a coincidence
    in any component.
    """

    base: tuple
    per_component: Optional[tuple]
    exceptional: bool
    tol: float

    @property
    def values(self) -> tuple:
        if self.per_component is None:
            return self.base
        return self.per_component

    def distinct_counts(self) -> tuple:
        if self.per_component is None:
            return (_distinct_count(np.array(self.base), self.tol),)
        return tuple(
            _distinct_count(np.array(comp), self.tol) for comp in self.per_component
        )


def difference_values(ws: WellSystem, e_bar: Optional[SymMat3] = None) -> DifferenceSet:
    """Enumerate the candidate difference values, flagging coincidences.

    Without ``e_bar`` returns the seven well-generated values (distinct for
    every elliptic parameter triple).  With ``e_bar`` (diagonal, trace
    eta1+eta2+eta3) returns the thirteen-element multiset per component and
    flags the triple as exceptional if any component shows a coincidence.
    """
    e1, e2, e3 = ws.eta1, ws.eta2, ws.eta3
    base = (0.0, e1 - e2, e2 - e1, e1 - e3, e3 - e1, e2 - e3, e3 - e2)
    scale = max(abs(v) for v in base)
    tol = COINCIDENCE_RTOL * (1.0 + scale)

    if e_bar is None:
        return DifferenceSet(base=base, per_component=None, exceptional=False, tol=tol)

    if not e_bar.is_diagonal():
        raise ValueError("macroscopic strain must be diagonal")
    if abs(e_bar.trace() - ws.trace) > 1e-12 * (1.0 + abs(ws.trace)):
        raise ValueError(
            f"trace violation: tr(e_bar)={e_bar.trace()} != eta1+eta2+eta3={ws.trace}"
        )

    per_component = []
    exceptional = False
    for comp in e_bar.diagonal:
        extra = []
        for eta in (e1, e2, e3):
            extra.extend((eta - comp, comp - eta))
        full = base + tuple(extra)
        scale_c = max(abs(v) for v in full)
        tol_c = COINCIDENCE_RTOL * (1.0 + scale_c)
        if _distinct_count(np.array(full), tol_c) < 13:
            exceptional = True
        per_component.append(full)
    return DifferenceSet(
        base=base, per_component=tuple(per_component), exceptional=exceptional, tol=tol
    )


class DeterminednessPolynomial:
    """Interpolating polynomial through the (jump_ii, jump_jj) node pairs.

    Evaluation first short-circuits on exact node abscissae (so that sharp
    fields satisfy the relation bitwise) and falls back to the barycentric
    form elsewhere.
    """

    def __init__(self, nodes_x: np.ndarray, nodes_y: np.ndarray):
        order = np.argsort(nodes_x)
        self.nodes_x = np.asarray(nodes_x, float)[order]
        self.nodes_y = np.asarray(nodes_y, float)[order]
        n = len(self.nodes_x)
        diff = self.nodes_x[:, None] - self.nodes_x[None, :]
        np.fill_diagonal(diff, 1.0)
        self._bary_w = 1.0 / np.prod(diff, axis=1)
        # Newton divided differences for the effective degree
        coeffs = self.nodes_y.astype(float).copy()
        for level in range(1, n):
            coeffs[level:] = (coeffs[level:] - coeffs[level - 1 : -1]) / (
                self.nodes_x[level:] - self.nodes_x[: n - level]
            )
        self._newton = coeffs
        yscale = max(1.0, float(np.max(np.abs(self.nodes_y))))
        nz = np.nonzero(np.abs(coeffs) > 1e-9 * yscale)[0]
        self.degree = int(nz[-1]) if len(nz) else 0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        scalar = z.ndim == 0
        zf = np.atleast_1d(z).ravel()
        out = np.empty_like(zf)
        diff = zf[:, None] - self.nodes_x[None, :]
        exact = diff == 0.0
        hit = exact.any(axis=1)
        if hit.any():
            idx = np.argmax(exact[hit], axis=1)
            out[hit] = self.nodes_y[idx]
        rest = ~hit
        if rest.any():
            terms = self._bary_w[None, :] / diff[rest]
            out[rest] = (terms @ self.nodes_y) / terms.sum(axis=1)
        out = out.reshape(np.atleast_1d(z).shape)
        return float(out[()]) if scalar else out


def determinedness_polynomial(ws: WellSystem, i: int, j: int) -> DeterminednessPolynomial:
    """Polynomial mapping component-i jumps to component-j jumps.

    Nodes are the seven values generated by ordered well pairs; abscissae
    are distinct under ellipticity (a tolerance guard catches accidental
    collisions).  i and j are 1-based component indices, i != j.
    """
    if i == j or i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError("component indices must be distinct and in {1,2,3}")
    wv = ws.wells_voigt()
    xs, ys = [], []
    for a in range(3):
        for b in range(3):
            x = wv[a, i - 1] - wv[b, i - 1]
            y = wv[a, j - 1] - wv[b, j - 1]
            matched = False
            for k, xk in enumerate(xs):
                if x == xk:
                    if y != ys[k]:
                        raise ValueError(
                            "coincident abscissae with conflicting ordinates: "
                            f"jump {x} maps to both {ys[k]} and {y}"
                        )
                    matched = True
                    break
            if not matched:
                xs.append(x)
                ys.append(y)
    xs = np.array(xs)
    ys = np.array(ys)
    scale = 1.0 + float(np.max(np.abs(xs)))
    order = np.argsort(xs)
    if np.min(np.diff(xs[order])) <= COINCIDENCE_RTOL * scale:
        raise ValueError("coincident abscissae at tolerance level")
    if len(xs) != 7:
        raise ValueError(f"expected 7 distinct abscissae, got {len(xs)}")
    return DeterminednessPolynomial(xs, ys)
