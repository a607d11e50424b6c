"""Discrete fractional operators on uniform grids.

Dense matrix representations of the left/right Riemann-Liouville fractional
integral of order ``alpha`` in (0, 1], plus Caputo and Riemann-Liouville
derivatives applied to sampled trajectories.

Quadrature conventions
----------------------
* Integrals: on each subinterval the integrand is replaced by the arithmetic
  average of its endpoint values and the weakly singular kernel
  ``(t - s)**(alpha - 1) / Gamma(alpha)`` is integrated exactly.  Row ``k``
  of the matrix applied to a constant ``C`` therefore gives
  ``C * (t_k - a)**alpha / Gamma(1 + alpha)`` up to rounding.
* Caputo derivatives (L1 rule): ``x'`` is taken piecewise constant,
  ``(x[i+1] - x[i]) / h``, and the kernel ``(t - s)**(-alpha)`` is
  integrated exactly.  ``alpha = 1`` falls back to second-order finite
  differences (central in the interior, one-sided at the ends).  The
  trajectory-level operators evaluate in slope form (a convolution against
  the node differences), so constants map to exactly zero; the dense matrix
  realizations agree with them to rounding.
* Right-sided operators are mirror images of the left-sided ones: their
  matrices equal the left matrices flipped in both indices.  For derivatives
  this carries the standard sign ``D_right = -I_right o d/dt``, so at
  ``alpha = 1`` the right derivative of ``t`` is ``-1``.
* Riemann-Liouville derivatives are obtained from the Caputo ones by adding
  the boundary correction
  ``x(boundary) * (distance to boundary)**(-alpha) / Gamma(1 - alpha)``.
  The node where the correction is singular (``t = a`` on the left,
  ``t = b`` on the right) is masked as undefined for ``alpha < 1``.

All containers are immutable after construction (arrays are marked
read-only) and safe to share across threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from . import _kernels


class OperatorKind(enum.Enum):
    LEFT_INTEGRAL = "left_integral"
    RIGHT_INTEGRAL = "right_integral"
    LEFT_CAPUTO = "left_caputo"
    RIGHT_CAPUTO = "right_caputo"
    LEFT_RL = "left_rl"
    RIGHT_RL = "right_rl"


@dataclass(frozen=True, eq=False)
class Grid:
    """Equidistant partition of [a, b] into n_sub subintervals."""

    a: float
    b: float
    n_sub: int
    h: float
    nodes: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.n_sub + 1


@dataclass(frozen=True)
class FractionalOrder:
    """Order alpha of a fractional operator, restricted to (0, 1]."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a <= 1.0) or not math.isfinite(a):
            raise ValueError(f"fractional order must lie in (0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


def _order(alpha) -> FractionalOrder:
    if isinstance(alpha, FractionalOrder):
        return alpha
    return FractionalOrder(float(alpha))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Node samples of an R^n-valued path, with a per-node defined/undefined mask.

    ``values`` has shape (N+1, dim); masked rows hold NaN and are excluded
    from downstream norms and quadratures.
    """

    grid: Grid
    dim: int
    values: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)

    def component(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def defined_values(self) -> np.ndarray:
        return self.values[self.mask]


def make_grid(a: float, b: float, n_sub: int) -> Grid:
    """Uniform grid with nodes t_k = a + k*h, h = (b - a)/n_sub.

    Rejects a >= b and n_sub < 2 (two subintervals are the minimum for the
    one-sided difference stencils used at alpha = 1).
    """
    a = float(a)
    b = float(b)
    if not (a < b):
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if int(n_sub) != n_sub or n_sub < 2:
        raise ValueError(f"n_sub must be an integer >= 2, got {n_sub!r}")
    n_sub = int(n_sub)
    h = (b - a) / n_sub
    nodes = np.linspace(a, b, n_sub + 1)
    nodes.setflags(write=False)
    return Grid(a=a, b=b, n_sub=n_sub, h=h, nodes=nodes)


def make_trajectory(grid: Grid, values, mask=None) -> Trajectory:
    """Wrap node samples as a Trajectory.

    1-D input is promoted to a single-component path.  Every unmasked entry
    must be finite; masked rows are stored as NaN.
    """
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != grid.n_nodes:
        raise ValueError(
            f"values must have {grid.n_nodes} rows, got shape {arr.shape}"
        )
    if mask is None:
        m = np.ones(grid.n_nodes, dtype=bool)
    else:
        m = np.asarray(mask, dtype=bool).copy()
        if m.shape != (grid.n_nodes,):
            raise ValueError(f"mask must have shape ({grid.n_nodes},)")
    if not np.all(np.isfinite(arr[m])):
        bad = np.argwhere(~np.isfinite(arr) & m[:, None])
        raise ValueError(f"non-finite trajectory value at node {bad[0][0]}")
    arr[~m] = np.nan
    arr.setflags(write=False)
    m.setflags(write=False)
    return Trajectory(grid=grid, dim=arr.shape[1], values=arr, mask=m)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense (N+1) x (N+1) matrix realization of a fractional operator.

    ``undefined_rows`` lists output nodes where the operator is singular
    (Riemann-Liouville boundary node); those rows of ``entries`` are zero
    and the corresponding output values are meaningless.
    """

    kind: OperatorKind
    alpha: FractionalOrder
    grid: Grid
    entries: np.ndarray = field(repr=False)
    undefined_rows: tuple = ()

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Matrix-vector product on raw node samples, shape (N+1,) or (N+1, n)."""
        return self.entries @ np.asarray(values, dtype=float)


def _finalize(kind, order, grid, entries, undefined_rows=()):
    entries = np.ascontiguousarray(entries)
    entries.setflags(write=False)
    return OperatorMatrix(
        kind=kind,
        alpha=order,
        grid=grid,
        entries=entries,
        undefined_rows=tuple(undefined_rows),
    )


def left_integral_matrix(grid: Grid, alpha) -> OperatorMatrix:
    """Left Riemann-Liouville integral I^alpha_{a+} as a matrix.

    Row 0 is identically zero (the integral from a to a); row k integrates
    the piecewise-average interpolant against the exact kernel, splitting
    each subinterval weight equally onto its two endpoint columns.
    """
    o = _order(alpha)
    entries = _kernels.integral_weights(
        grid.n_nodes, grid.h, o.alpha, math.gamma(o.alpha + 1.0)
    )
    return _finalize(OperatorKind.LEFT_INTEGRAL, o, grid, entries)


def right_integral_matrix(grid: Grid, alpha) -> OperatorMatrix:
    """Right Riemann-Liouville integral I^alpha_{b-}; the left matrix flipped
    in both indices (change of variables s -> a + b - s)."""
    o = _order(alpha)
    entries = np.flip(
        _kernels.integral_weights(grid.n_nodes, grid.h, o.alpha, math.gamma(o.alpha + 1.0))
    )
    return _finalize(OperatorKind.RIGHT_INTEGRAL, o, grid, entries)


def _central_difference_entries(grid: Grid) -> np.ndarray:
    # central interior; one-sided ends, third-order four-point where the grid
    # allows (keeps the boundary error of D_right o D_left compositions small),
    # second-order three-point otherwise
    n = grid.n_nodes
    c = 1.0 / (2.0 * grid.h)
    d = np.zeros((n, n))
    rows = np.arange(1, n - 1)
    d[rows, rows - 1] = -c
    d[rows, rows + 1] = c
    if n >= 4:
        e = 1.0 / (6.0 * grid.h)
        d[0, 0:4] = (-11.0 * e, 18.0 * e, -9.0 * e, 2.0 * e)
        d[n - 1, n - 4 : n] = (-2.0 * e, 9.0 * e, -18.0 * e, 11.0 * e)
    else:
        d[0, 0:3] = (-3.0 * c, 4.0 * c, -1.0 * c)
        d[n - 1, n - 3 : n] = (1.0 * c, -4.0 * c, 3.0 * c)
    return d


def _left_caputo_entries(grid: Grid, o: FractionalOrder) -> np.ndarray:
    if o.alpha == 1.0:
        return _central_difference_entries(grid)
    return _kernels.l1_weights(grid.n_nodes, grid.h, o.alpha, math.gamma(2.0 - o.alpha))


def left_caputo_matrix(grid: Grid, alpha) -> OperatorMatrix:
    """Left Caputo derivative as a matrix (L1 rule; finite differences at
    alpha = 1).  Row 0 is zero for alpha < 1: the defining integral from a
    to a vanishes."""
    o = _order(alpha)
    return _finalize(OperatorKind.LEFT_CAPUTO, o, grid, _left_caputo_entries(grid, o))


def right_caputo_matrix(grid: Grid, alpha) -> OperatorMatrix:
    """Right Caputo derivative; the left matrix flipped in both indices,
    which realizes the standard sign (-I^{1-alpha}_{b-} o d/dt)."""
    o = _order(alpha)
    entries = np.flip(_left_caputo_entries(grid, o))
    return _finalize(OperatorKind.RIGHT_CAPUTO, o, grid, entries)


def left_rl_matrix(grid: Grid, alpha) -> OperatorMatrix:
    """Left Riemann-Liouville derivative: Caputo plus the x(a) boundary
    correction.  Node 0 is undefined for alpha < 1 (the correction is
    singular at t = a)."""
    o = _order(alpha)
    entries = _left_caputo_entries(grid, o).copy()
    if o.alpha == 1.0:
        return _finalize(OperatorKind.LEFT_RL, o, grid, entries)
    k = np.arange(1, grid.n_nodes)
    entries[1:, 0] += (k * grid.h) ** (-o.alpha) / math.gamma(1.0 - o.alpha)
    entries[0, :] = 0.0
    return _finalize(OperatorKind.LEFT_RL, o, grid, entries, undefined_rows=(0,))


def right_rl_matrix(grid: Grid, alpha) -> OperatorMatrix:
    """Right Riemann-Liouville derivative: right Caputo plus the x(b)
    correction, singular (undefined) at t = b for alpha < 1."""
    o = _order(alpha)
    entries = np.ascontiguousarray(np.flip(_left_caputo_entries(grid, o)))
    if o.alpha == 1.0:
        return _finalize(OperatorKind.RIGHT_RL, o, grid, entries)
    n = grid.n_nodes
    k = np.arange(1, n)
    entries[: n - 1, n - 1] += ((n - 1 - np.arange(n - 1)) * grid.h) ** (
        -o.alpha
    ) / math.gamma(1.0 - o.alpha)
    entries[n - 1, :] = 0.0
    return _finalize(OperatorKind.RIGHT_RL, o, grid, entries, undefined_rows=(n - 1,))


def _check_grid(grid: Grid, x: Trajectory) -> None:
    if x.grid is not grid and not np.array_equal(x.grid.nodes, grid.nodes):
        raise ValueError("trajectory and operator live on different grids")


def _clean_values(x: Trajectory) -> np.ndarray:
    """Node values with masked rows replaced by zero (their quadrature
    contribution is dropped rather than extrapolated)."""
    return np.where(x.mask[:, None], x.values, 0.0)


def _caputo_core(grid: Grid, o: FractionalOrder, vals: np.ndarray) -> np.ndarray:
    """Left Caputo derivative of clean node values, in slope form."""
    h = grid.h
    s = (vals[1:] - vals[:-1]) / h
    if o.alpha == 1.0:
        out = np.empty_like(vals)
        out[1:-1] = (s[:-1] + s[1:]) * 0.5
        if vals.shape[0] >= 4:
            out[0] = (11.0 * s[0] - 7.0 * s[1] + 2.0 * s[2]) / 6.0
            out[-1] = (11.0 * s[-1] - 7.0 * s[-2] + 2.0 * s[-3]) / 6.0
        else:
            out[0] = (3.0 * s[0] - s[1]) * 0.5
            out[-1] = (3.0 * s[-1] - s[-2]) * 0.5
        return out
    n_sub = grid.n_sub
    g2 = math.gamma(2.0 - o.alpha)
    e = 1.0 - o.alpha
    q = np.array([math.pow(g * h, e) for g in range(n_sub + 1)])
    b = np.zeros(n_sub + 1)
    b[1:] = (q[1:] - q[:-1]) / g2
    # out[k] = sum_{i<k} b[k-i] * s[i]; b[0] = 0 keeps row 0 and the
    # diagonal of the convolution matrix identically zero
    return toeplitz(b, np.zeros(n_sub)) @ s


def _rl_left_core(grid: Grid, o: FractionalOrder, vals: np.ndarray):
    out = _caputo_core(grid, o, vals)
    if o.alpha == 1.0:
        return out, False
    n = grid.n_nodes
    corr = (np.arange(1, n) * grid.h) ** (-o.alpha) / math.gamma(1.0 - o.alpha)
    out[1:] += corr[:, None] * vals[0]
    out[0] = np.nan
    return out, True


def caputo_left(grid: Grid, alpha, x: Trajectory) -> Trajectory:
    """Left Caputo derivative of a trajectory."""
    o = _order(alpha)
    _check_grid(grid, x)
    out = _caputo_core(grid, o, _clean_values(x))
    return make_trajectory(grid, out, mask=x.mask.copy())


def caputo_right(grid: Grid, alpha, x: Trajectory) -> Trajectory:
    """Right Caputo derivative of a trajectory, evaluated as the left
    derivative of the reversed path, reversed (standard sign: at alpha = 1
    this is minus the classical derivative)."""
    o = _order(alpha)
    _check_grid(grid, x)
    out = _caputo_core(grid, o, _clean_values(x)[::-1])[::-1]
    return make_trajectory(grid, out, mask=x.mask.copy())


def rl_left(grid: Grid, alpha, x: Trajectory) -> Trajectory:
    """Left Riemann-Liouville derivative; node 0 masked for alpha < 1."""
    o = _order(alpha)
    _check_grid(grid, x)
    out, undefined = _rl_left_core(grid, o, _clean_values(x))
    mask = x.mask.copy()
    if undefined:
        mask[0] = False
    return make_trajectory(grid, out, mask=mask)


def rl_right(grid: Grid, alpha, x: Trajectory) -> Trajectory:
    """Right Riemann-Liouville derivative; node N masked for alpha < 1."""
    o = _order(alpha)
    _check_grid(grid, x)
    out, undefined = _rl_left_core(grid, o, _clean_values(x)[::-1])
    out = out[::-1]
    mask = x.mask.copy()
    if undefined:
        mask[-1] = False
    return make_trajectory(grid, out, mask=mask)


@dataclass(frozen=True)
class CompositionReport:
    """Interior-node sup residuals of the composition identities
    I^alpha(caputo(x)) = x - x(a)  and  I^alpha(rl(x)) = x."""

    alpha: FractionalOrder
    n_sub: int
    caputo_residual: float
    rl_residual: float


def check_composition(grid: Grid, alpha, x: Trajectory) -> CompositionReport:
    """Measure how well the discrete operators satisfy the left composition
    rules, as sup norms over the interior nodes 1..N-1 (all components).

    The Riemann-Liouville branch zeroes the masked node-0 value before the
    quadrature: the first-panel endpoint contribution is dropped rather than
    extrapolated, which keeps the residual decreasing under refinement.
    """
    o = _order(alpha)
    integ = left_integral_matrix(grid, o)
    cap = caputo_left(grid, o, x)
    rl = rl_left(grid, o, x)

    recon_cap = integ.apply(cap.values)
    target_cap = x.values - x.values[0]
    interior = slice(1, grid.n_sub)
    caputo_residual = float(np.max(np.abs(recon_cap - target_cap)[interior]))

    rl_vals = np.where(rl.mask[:, None], rl.values, 0.0)
    recon_rl = integ.apply(rl_vals)
    rl_residual = float(np.max(np.abs(recon_rl - x.values)[interior]))

    return CompositionReport(
        alpha=o,
        n_sub=grid.n_sub,
        caputo_residual=caputo_residual,
        rl_residual=rl_residual,
    )
