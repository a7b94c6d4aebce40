"""Utilities for the finite-difference solver: node indexing and sparse operator assembly."""

from typing import NamedTuple

import numpy as np
from scipy import sparse

# Cell Péclet number above which a drift term switches to one-sided differences.
PECLET_UPWIND = 2.0


class SpatialOperator(NamedTuple):
    """L = a^{ij}D_ij + b^iD_i + c on the spatial nodes of one time level.

    Rows of non-interior nodes are empty; the solver replaces them with identity rows.
    """
    matrix: sparse.csr_matrix
    upwinded: int


def interior_multi_indices(spatial_interior: np.ndarray, nx: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat spatial indices of interior nodes and their (n, M) multi-indices."""
    flat = np.flatnonzero(spatial_interior)
    return flat, np.asarray(np.unravel_index(flat, (nx,) * n))


def _shifted(multi: np.ndarray, nx: int, shifts: dict[int, int]) -> np.ndarray:
    moved = multi.copy()
    for axis, offset in shifts.items():
        moved[axis] += offset
    return np.ravel_multi_index(tuple(moved), (nx,) * multi.shape[0])


def assemble_operator(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    spacing: tuple[float, ...],
    spatial_interior: np.ndarray,
    nx: int,
) -> SpatialOperator:
    """
    Assemble the discrete operator L at one time level.

    Central second-order stencils for a^{aa}D_aa. Mixed terms use the seven-point
    stencil whose off-center weights share the sign of a^{ab}, so the matrix keeps
    nonnegative off-diagonals when |a^{ab}| is dominated by the diagonal.
    Drift terms are central unless the cell Péclet number |b_a| h_a / a^{aa}
    exceeds PECLET_UPWIND, in which case the node switches to the upwind difference.

    Args:
        a: Coefficients, shape (n, n, S) over flat spatial nodes
        b: Drift, shape (n, S)
        c: Zeroth-order coefficient, shape (S,)
        spacing: Grid spacing per axis
        spatial_interior: Flat boolean mask of interior spatial nodes
        nx: Nodes per axis

    Returns:
        SpatialOperator with the CSR matrix and the number of upwinded (node, axis) pairs
    """
    n = len(spacing)
    size = nx ** n
    flat, multi = interior_multi_indices(spatial_interior, nx, n)
    rows, cols, vals = [], [], []

    def add(targets: np.ndarray, weights: np.ndarray) -> None:
        rows.append(flat)
        cols.append(targets)
        vals.append(weights)

    add(flat, c[flat])
    upwinded = 0
    for p in range(n):
        hp = spacing[p]
        app = a[p, p, flat]
        plus = _shifted(multi, nx, {p: 1})
        minus = _shifted(multi, nx, {p: -1})
        add(plus, app / hp ** 2)
        add(minus, app / hp ** 2)
        add(flat, -2.0 * app / hp ** 2)

        bp = b[p, flat]
        with np.errstate(divide="ignore", invalid="ignore"):
            peclet = np.abs(bp) * hp / app
        upwind = peclet > PECLET_UPWIND
        upwinded += int(upwind.sum())
        central = np.where(upwind, 0.0, bp / (2.0 * hp))
        add(plus, central)
        add(minus, -central)
        forward = np.where(upwind & (bp > 0), bp / hp, 0.0)
        backward = np.where(upwind & (bp < 0), -bp / hp, 0.0)
        add(plus, forward)
        add(flat, -forward)
        add(minus, backward)
        add(flat, -backward)

        for q in range(p + 1, n):
            hq = spacing[q]
            # a^{pq} D_pq + a^{qp} D_qp = 2 a^{pq} D_pq
            apq = 0.5 * (a[p, q, flat] + a[q, p, flat])
            pos = np.clip(apq, 0.0, None) / (hp * hq)
            neg = np.clip(apq, None, 0.0) / (hp * hq)
            # a >= 0: D_pq ~ (2u0 + u++ + u-- - u+0 - u-0 - u0+ - u0-) / (2 hp hq)
            add(_shifted(multi, nx, {p: 1, q: 1}), pos)
            add(_shifted(multi, nx, {p: -1, q: -1}), pos)
            # a < 0: D_pq ~ (-2u0 - u+- - u-+ + u+0 + u-0 + u0+ + u0-) / (2 hp hq)
            add(_shifted(multi, nx, {p: 1, q: -1}), -neg)
            add(_shifted(multi, nx, {p: -1, q: 1}), -neg)
            axis_weight = -pos + neg
            for shifts in ({p: 1}, {p: -1}, {q: 1}, {q: -1}):
                add(_shifted(multi, nx, shifts), axis_weight)
            add(flat, 2.0 * pos - 2.0 * neg)

    matrix = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    ).tocsr()
    matrix.sum_duplicates()
    return SpatialOperator(matrix=matrix, upwinded=upwinded)


def boundary_identity(mask: np.ndarray) -> sparse.csr_matrix:
    """Diagonal matrix with ones on the nodes in mask."""
    return sparse.diags(mask.astype(float), format="csr")
