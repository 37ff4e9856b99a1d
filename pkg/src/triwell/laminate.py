"""Nested branching laminates and the singular-perturbation scaling sweep.

A macroscopic strain inside the admissible set (the triangle of the
auxiliary matrices together with the well segments) is first decomposed into
at most a few simple-laminate steps ending at auxiliary matrices; each
auxiliary matrix is then refined recursively through the stage identity

    J_i = lam * e_i + (1 - lam) * J_{i-1}      (indices cyclic in {1,2,3})

with the stage fraction lam solved numerically from the componentwise
system.  Stage ell uses stripes of period ratio^ell; truncating at depth j
and projecting the remaining auxiliary regions to their nearest well yields
a sharp phase field whose energies realize the upper-bound scaling

    E_total <= C * (lam^j + r + eps * r^-j),

minimized near r ~ eps^(1/(j+1)), j ~ sqrt(|log eps| / |log lam|).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .compat import compatible
from .energy import EnergyReport, PhaseField, elastic_energy, surface_energy, strain_from_phase
from .fields import Grid3, diag_to_voigt
from .symmat import SymMat3
from .wells import WellSystem, prev_index

_SOLVE_TOL = 1e-10


@dataclass(frozen=True)
class LaminateTree:
    """Recursive laminate description.

    Internal nodes carry a lattice normal, a first-child volume fraction and
    a stripe period; leaves carry only their matrix (a well or an auxiliary
    matrix).  The node matrix is always the fraction-weighted combination of
    its children's matrices.
    """

    matrix: SymMat3
    normal: Optional[np.ndarray] = None
    fraction: Optional[float] = None
    period: Optional[float] = None
    children: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.depth for c in self.children)

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()

    def steps(self):
        """Flatten to (normal, fraction) pairs in construction order."""
        if self.is_leaf:
            return []
        out = [(self.normal, self.fraction)]
        for c in self.children:
            out.extend(c.steps())
        return out

    def verify(self, tol=1e-12):
        """Check the convex-combination identity and child-pair compatibility."""
        if self.is_leaf:
            return
        lam = self.fraction
        combo = lam * self.children[0].matrix + (1.0 - lam) * self.children[1].matrix
        if (self.matrix - combo).max_abs() > tol:
            raise AssertionError("convex-combination identity violated at a node")
        if compatible(self.children[0].matrix, self.children[1].matrix) is None:
            raise AssertionError("laminate children are not compatible")
        for c in self.children:
            c.verify(tol)


@dataclass(frozen=True)
class ScalingRow:
    eps: float
    j: int
    r: float
    e_el: float
    e_surf: float
    e_total: float
    r1: float
    r2: float
    mode: str = "analytic"


CSV_COLUMNS = ("eps", "j", "r", "E_el", "E_surf", "E_total", "r1", "r2")


def write_scaling_csv(path, rows) -> None:
    """RFC-4180 CSV with the mandatory header row."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow(
                [
                    repr(row.eps),
                    row.j,
                    repr(row.r),
                    repr(row.e_el),
                    repr(row.e_surf),
                    repr(row.e_total),
                    repr(row.r1),
                    repr(row.r2),
                ]
            )


def stage_fraction(ws: WellSystem, i: int) -> float:
    """Numerical solve of J_i = lam*e_i + (1-lam)*J_prev on the diagonal.

    Least squares over the three componentwise equations with a consistency
    check; hard-coding a closed form is deliberately avoided (printed forms
    in the literature disagree, see stage_fraction_closed_forms).
    """
    j = prev_index(i)
    d = ws.well(i).diagonal - ws.J(j).diagonal
    t = ws.J(i).diagonal - ws.J(j).diagonal
    lam = float(d @ t / (d @ d))
    resid = np.max(np.abs(t - lam * d))
    if resid > _SOLVE_TOL * (1.0 + np.max(np.abs(t))):
        raise AssertionError(f"stage system inconsistent (residual {resid})")
    if not 0.0 < lam < 1.0:
        raise AssertionError(f"stage fraction {lam} outside (0, 1)")
    return lam


def stage_fraction_closed_forms(ws: WellSystem) -> dict:
    """Candidate closed forms; the numeric solve picks out the valid one."""
    e1, e2, e3 = ws.eta1, ws.eta2, ws.eta3
    return {
        "(eta2+eta3-2*eta1)/(eta3-eta1)": (e2 + e3 - 2.0 * e1) / (e3 - e1),
        "(eta1+eta3-2*eta2)/(eta3-eta1)": (e1 + e3 - 2.0 * e2) / (e3 - e1),
    }


def _leaf(m: SymMat3) -> LaminateTree:
    return LaminateTree(matrix=m)


def decompose_macro_strain(ws: WellSystem, e_bar: SymMat3, tol=1e-9) -> LaminateTree:
    """Express the macroscopic strain as a short laminate prefix.

    Points of the auxiliary triangle split along a direction parallel to the
    (J1, J2) connection into two edge points, each a laminate of auxiliary
    matrices; points on a well segment [J_i, e_i] split once.  Leaves are
    wells or auxiliary matrices; raises ValueError outside the admissible set.
    """
    if not e_bar.is_diagonal(tol):
        raise ValueError("macroscopic strain must be diagonal")
    if abs(e_bar.trace() - ws.trace) > tol * (1.0 + abs(ws.trace)):
        raise ValueError("macroscopic strain trace must equal eta1+eta2+eta3")
    d = e_bar.diagonal

    # affine barycentric solve in the auxiliary triangle
    edges = np.stack([ws.J(1).diagonal - ws.J(3).diagonal,
                      ws.J(2).diagonal - ws.J(3).diagonal]).T
    coeff, *_ = np.linalg.lstsq(edges, d - ws.J(3).diagonal, rcond=None)
    alpha = np.array([coeff[0], coeff[1], 1.0 - coeff.sum()])
    in_plane = np.max(np.abs(edges @ coeff - (d - ws.J(3).diagonal))) <= tol * (
        1.0 + np.max(np.abs(d))
    )
    if in_plane and np.all(alpha >= -tol):
        alpha = np.clip(alpha, 0.0, None)
        alpha = alpha / alpha.sum()
        order = np.argsort(alpha)
        if alpha[order[1]] <= tol:  # vertex
            return _leaf(ws.J(int(order[2]) + 1))
        if alpha[order[0]] <= tol:  # edge between two auxiliary matrices
            a, b = sorted((int(order[1]) + 1, int(order[2]) + 1))
            frac = alpha[a - 1] / (alpha[a - 1] + alpha[b - 1])
            return LaminateTree(
                matrix=e_bar,
                normal=ws.twin_lattice(a, b),
                fraction=float(frac),
                children=(_leaf(ws.J(a)), _leaf(ws.J(b))),
            )
        # interior: split parallel to the (J1, J2) connection onto the two
        # edges through J3
        p = alpha[0] + alpha[1]
        beta = alpha[0] / p
        p1 = LaminateTree(
            matrix=SymMat3.from_voigt(p * ws.J(1).voigt + (1 - p) * ws.J(3).voigt),
            normal=ws.twin_lattice(1, 3),
            fraction=float(p),
            children=(_leaf(ws.J(1)), _leaf(ws.J(3))),
        )
        p2 = LaminateTree(
            matrix=SymMat3.from_voigt(p * ws.J(2).voigt + (1 - p) * ws.J(3).voigt),
            normal=ws.twin_lattice(2, 3),
            fraction=float(p),
            children=(_leaf(ws.J(2)), _leaf(ws.J(3))),
        )
        return LaminateTree(
            matrix=e_bar,
            normal=ws.twin_lattice(1, 2),
            fraction=float(beta),
            children=(p1, p2),
        )

    # well segments [J_i, e_i]
    for i in (1, 2, 3):
        seg = ws.well(i).diagonal - ws.J(i).diagonal
        t = float(seg @ (d - ws.J(i).diagonal) / (seg @ seg))
        resid = np.max(np.abs(ws.J(i).diagonal + t * seg - d))
        if resid <= tol * (1.0 + np.max(np.abs(d))) and -tol <= t <= 1.0 + tol:
            t = min(max(t, 0.0), 1.0)
            if t >= 1.0 - tol:
                return _leaf(ws.well(i))
            return LaminateTree(
                matrix=e_bar,
                normal=ws.twin_lattice(i, prev_index(i)),
                fraction=float(t),
                children=(_leaf(ws.well(i)), _leaf(ws.J(i))),
            )
    raise ValueError("macroscopic strain is outside the admissible set")


def _extend_aux_leaves(ws: WellSystem, node: LaminateTree, stages: int) -> LaminateTree:
    """Replace auxiliary-matrix leaves by `stages` refinement levels."""
    if not node.is_leaf:
        return LaminateTree(
            matrix=node.matrix,
            normal=node.normal,
            fraction=node.fraction,
            children=tuple(_extend_aux_leaves(ws, c, stages) for c in node.children),
        )
    idx = next((i for i in (1, 2, 3) if node.matrix.allclose(ws.J(i))), None)
    if idx is None or stages == 0:
        return node
    lam = stage_fraction(ws, idx)
    rest = _extend_aux_leaves(ws, _leaf(ws.J(prev_index(idx))), stages - 1)
    return LaminateTree(
        matrix=node.matrix,
        normal=ws.twin_lattice(idx, prev_index(idx)),
        fraction=lam,
        children=(_leaf(ws.well(idx)), rest),
    )


def _assign_periods(node: LaminateTree, ratio: float, level: int, prev_n: int) -> LaminateTree:
    if node.is_leaf:
        return node
    n = max(int(round(ratio ** (-(level + 1)))), 2 * prev_n + 1, 1)
    children = tuple(_assign_periods(c, ratio, level + 1, n) for c in node.children)
    return LaminateTree(
        matrix=node.matrix,
        normal=node.normal,
        fraction=node.fraction,
        period=1.0 / n,
        children=children,
    )


def _nearest_well_label(ws: WellSystem, m: SymMat3) -> int:
    dists = [(m - w).norm() for w in ws.wells]
    best = min(dists)
    for a, dv in enumerate(dists):  # ties resolved toward the lowest index
        if dv <= best + 1e-15:
            return a
    return 0


def sample_phase(tree: LaminateTree, ws: WellSystem, grid: Grid3) -> PhaseField:
    """Sharp phase field sampling the laminate on the grid.

    Stripe patterns use the integer lattice normals, so every level is
    exactly periodic on the torus; remaining auxiliary-matrix leaves project
    pointwise to the nearest well.
    """
    coords = grid.coords()
    labels = np.zeros(grid.shape, dtype=np.int8)

    def fill(node: LaminateTree, mask: np.ndarray):
        if node.is_leaf:
            labels[mask] = _nearest_well_label(ws, node.matrix)
            return
        phase = np.einsum("i,i...->...", node.normal, coords)[mask]
        t = np.mod(phase / node.period, 1.0)
        first = t < node.fraction
        sub = np.zeros_like(labels, dtype=bool)
        sub[mask] = first
        fill(node.children[0], sub)
        sub = np.zeros_like(labels, dtype=bool)
        sub[mask] = ~first
        fill(node.children[1], sub)

    fill(tree, np.ones(grid.shape, dtype=bool))
    return PhaseField.from_labels(labels)


def build_nested_laminate(
    ws: WellSystem,
    e_bar: SymMat3,
    depth: int,
    ratio: float,
    grid: Grid3,
    eps: float = 0.0,
):
    """Construct the depth-`depth` nested laminate and measure its energies.

    ``ratio`` is the stripe-period contraction per level (r_ell = ratio^ell,
    quantized to unit fractions); the deepest period must stay resolvable on
    the grid.  Returns (phase field, energy report); the report's e_total
    uses the supplied eps weight (eps=0 records the elastic part alone).
    """
    if not 0.0 < ratio < 0.5:
        raise ValueError("period ratio must lie in (0, 1/2)")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    prefix = decompose_macro_strain(ws, e_bar)
    tree = _extend_aux_leaves(ws, prefix, depth)
    tree = _assign_periods(tree, ratio, 0, 0)
    tree.verify()

    total_levels = tree.depth
    if total_levels > 0:
        n_deepest = round(1.0 / min(n.period for n in _internal_nodes(tree)))
        if grid.n < 2 * n_deepest:
            raise ValueError(
                f"unresolvable period schedule: finest stripe count {n_deepest} "
                f"needs at least {2 * n_deepest} samples, grid has {grid.n}"
            )

    phase = sample_phase(tree, ws, grid)
    chi_t = diag_to_voigt(strain_from_phase(phase, ws))
    chi_t -= e_bar.voigt
    e_el = elastic_energy(chi_t, grid)
    e_surf = surface_energy(phase, grid)
    report = EnergyReport.build(
        e_el,
        e_surf,
        eps,
        depth=depth,
        ratio=ratio,
        n=grid.n,
        levels=total_levels,
        e_bar=tuple(e_bar.voigt),
        tree_steps=len(tree.steps()),
    )
    return phase, report


def _internal_nodes(tree: LaminateTree):
    if not tree.is_leaf:
        yield tree
        for c in tree.children:
            yield from _internal_nodes(c)


def theoretical_bounds(eps, nu, c_nu, C1, C2, C):
    """Envelope functions of the scaling law.

    r1(t) = C1 exp(-c_nu |log t|^(1/2+nu)),  r2(t) = C2 exp(-C |log t|^(1/2)).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 0.0 < nu < 1.0:
        raise ValueError("nu must lie in (0, 1)")
    log = abs(math.log(eps))
    r1 = C1 * math.exp(-c_nu * log ** (0.5 + nu))
    r2 = C2 * math.exp(-C * math.sqrt(log))
    return r1, r2


@dataclass
class ScalingSweep:
    rows: list  # best analytic row per eps
    grid_rows: list  # measured rows where the grid resolves the schedule
    lam: float
    bound_constant: float


def analytic_bound(lam: float, j: int, r: float, eps: float, C: float = 1.0):
    """The construction's energy bound split as (elastic, surface, total)."""
    e_el = C * (lam**j + r)
    e_surf = C * r ** (-j) if j > 0 else 0.0
    return e_el, e_surf, e_el + eps * e_surf


def optimize_scaling(
    ws: WellSystem,
    e_bar: SymMat3,
    eps_list,
    grid: Optional[Grid3] = None,
    j_halfwidth: int = 2,
    bound_constant: float = 1.0,
    nu: float = 0.5,
    c_nu: float = 1.0,
    C1: float = 1.0,
    C2: float = 1.0,
    C_upper: Optional[float] = None,
) -> ScalingSweep:
    """Sweep the surface weight, optimizing depth and period of the laminate.

    For each eps the depth window centers on j* = sqrt(|log eps|/|log lam|)
    with r = eps^(1/(j+1)); the analytic bound is always evaluated and the
    grid energy is measured additionally whenever the period schedule is
    resolvable on the supplied grid.
    """
    lam = stage_fraction(ws, 1)
    if C_upper is None:
        C_upper = math.sqrt(abs(math.log(lam)))
    rows = []
    grid_rows = []
    for eps in eps_list:
        if not 0.0 < eps < 1.0:
            raise ValueError("eps values must lie in (0, 1)")
        r1, r2 = theoretical_bounds(eps, nu, c_nu, C1, C2, C_upper)
        jstar = math.sqrt(abs(math.log(eps)) / abs(math.log(lam)))
        j_lo = max(0, int(math.floor(jstar)) - j_halfwidth)
        j_hi = int(math.ceil(jstar)) + j_halfwidth
        best = None
        for j in range(j_lo, j_hi + 1):
            r = eps ** (1.0 / (j + 1))
            if j > 0 and r >= 0.5:
                continue
            e_el, e_surf, e_tot = analytic_bound(lam, j, r, eps, bound_constant)
            row = ScalingRow(eps, j, r, e_el, e_surf, e_tot, r1, r2, "analytic")
            if best is None or row.e_total < best.e_total:
                best = row
            if grid is not None and j > 0 and _resolvable(ws, e_bar, j, r, grid):
                _, rep = build_nested_laminate(ws, e_bar, j, r, grid, eps=eps)
                grid_rows.append(
                    ScalingRow(eps, j, r, rep.e_el, rep.e_surf, rep.e_total, r1, r2, "grid")
                )
        rows.append(best)
    return ScalingSweep(rows=rows, grid_rows=grid_rows, lam=lam, bound_constant=bound_constant)


def _resolvable(ws, e_bar, j, r, grid) -> bool:
    prefix_depth = decompose_macro_strain(ws, e_bar).depth
    levels = prefix_depth + j
    n = 0
    for level in range(levels):
        n = max(int(round(r ** (-(level + 1)))), 2 * n + 1, 1)
    return grid.n >= 2 * n


def fit_log_energy(rows) -> tuple:
    """Least-squares fit of log E_total against sqrt|log eps|.

    Returns (slope, intercept, r_squared).
    """
    x = np.array([math.sqrt(abs(math.log(row.eps))) for row in rows])
    y = np.array([math.log(row.e_total) for row in rows])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
