"""One-parameter transformation groups and numerical invariance checks.

A projectable group acts on extended state space as
(t, x) -> (phi0_s(t), phi1_s(x)): the time map and the space map are
decoupled, so the transform of a trajectory never needs the implicit
function theorem.  The checks in this module classify the time map
(group law, affinity of t -> phi0_s(t), localization at the base point),
validate the fractional chain rule that affine time maps enable, and
test invariance of an action functional.

Checks report rather than raise: each returns a CheckReport carrying the
worst observed violation, the sample count, and a short description of
what was compared; ``passed`` reflects the tolerance handed to the
check.  Exceptions are reserved for unusable inputs, e.g. a time map
that is not increasing on the interval (so no transformed grid exists)
or a partially defined trajectory.

Group closures must be pure functions; every check is re-entrant and
evaluates its parameter samples independently, so callers may fan
batches of checks out across threads.

Conventions
-----------
* ``phi0(s, t)`` and ``zeta(t)`` work on scalars; ``phi1(s, x)`` and
  ``xi(x)`` map an n-vector to an n-vector.  The checks evaluate them
  pointwise and never assume numpy broadcasting.
* ``lam`` (with ``beta``) marks an affine time map
  phi0_s(t) = e^{lam*s} t + beta(s).  When present it is trusted for the
  dilation factor d(phi0_s)/dt = e^{lam*s}; otherwise the factor is
  measured numerically, which keeps the checks meaningful (and failing)
  for time maps that are not actually affine.
* Default parameter samples are s in {-0.5, -0.1, 0.1, 0.5} and 33
  uniformly spaced time nodes: both signs, two magnitudes, no blown-up
  transformed intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .fracops import Trajectory, _order, caputo_left, make_grid, make_trajectory
from .lagrangian import LagrangianSpec

DEFAULT_S_SAMPLES = (-0.5, -0.1, 0.1, 0.5)
DEFAULT_T_COUNT = 33

# step for the centered difference measuring d(phi0_s)/dt when no
# analytic lam is stored
_SLOPE_STEP = 1e-6


@dataclass(frozen=True)
class GroupSpec:
    """One-parameter projectable group of transformations.

    ``lam`` and ``beta`` are optional: they are only meaningful for
    affine time maps phi0_s(t) = e^{lam*s} t + beta(s), and checks that
    need the dilation factor fall back to measuring it when ``lam`` is
    absent.  (The field is named ``lam`` because ``lambda`` is a
    keyword.)
    """

    phi0: Callable[[float, float], float] = field(repr=False)
    phi1: Callable[[float, np.ndarray], np.ndarray] = field(repr=False)
    zeta: Callable[[float], float] = field(repr=False)
    xi: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    lam: Optional[float] = None
    beta: Optional[Callable[[float], float]] = field(default=None, repr=False)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a numerical check: worst violation vs. a tolerance."""

    passed: bool
    max_violation: float
    samples: int
    context: str = ""


def _report(violation: float, tol: float, samples: int, context: str) -> CheckReport:
    violation = float(violation)
    return CheckReport(
        passed=bool(violation <= tol),
        max_violation=violation,
        samples=samples,
        context=context,
    )


# ---------------------------------------------------------------------------
# stock groups


def time_translation() -> GroupSpec:
    """phi_s(t, x) = (t + s, x); affine with lam = 0, beta(s) = s."""
    return GroupSpec(
        phi0=lambda s, t: t + s,
        phi1=lambda s, x: np.asarray(x, dtype=float),
        zeta=lambda t: 1.0,
        xi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lam=0.0,
        beta=lambda s: 0.0 + s,
    )


def dilation(c: float) -> GroupSpec:
    """phi_s(t, x) = (e^{cs} t, x), the scaling group about t = 0."""
    c = float(c)
    return GroupSpec(
        phi0=lambda s, t: math.exp(c * s) * t,
        phi1=lambda s, x: np.asarray(x, dtype=float),
        zeta=lambda t: c * t,
        xi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lam=c,
        beta=lambda s: 0.0,
    )


def localized_dilation(lam: float, a: float) -> GroupSpec:
    """phi0_s(t) = e^{lam*s}(t - a) + a, the dilation fixing t = a.

    This is the general member of the family that is simultaneously
    affine in t and localized at the base point; for a = 0 it reduces to
    ``dilation(lam)``.
    """
    lam = float(lam)
    a = float(a)
    return GroupSpec(
        phi0=lambda s, t: math.exp(lam * s) * (t - a) + a,
        phi1=lambda s, x: np.asarray(x, dtype=float),
        zeta=lambda t: lam * (t - a),
        xi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lam=lam,
        beta=lambda s: a * (1.0 - math.exp(lam * s)),
    )


def space_rotation() -> GroupSpec:
    """Rotation of a planar configuration; time untouched."""

    def rotate(s, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (2,):
            raise ValueError("space_rotation acts on 2-vectors")
        c, sn = math.cos(s), math.sin(s)
        return np.array([c * x[0] - sn * x[1], sn * x[0] + c * x[1]])

    return GroupSpec(
        phi0=lambda s, t: t,
        phi1=rotate,
        zeta=lambda t: 0.0,
        xi=lambda x: np.array([-x[1], x[0]], dtype=float),
        lam=0.0,
        beta=lambda s: 0.0,
    )


def quadratic_time() -> GroupSpec:
    """phi0_s(t) = t + s t**2 with identity space map.

    Deliberately not affine in t (and not a group); useful for
    verifying that the admissibility and chain-rule checks have power.
    """
    return GroupSpec(
        phi0=lambda s, t: t + s * t * t,
        phi1=lambda s, x: np.asarray(x, dtype=float),
        zeta=lambda t: t * t,
        xi=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


# ---------------------------------------------------------------------------
# helpers


def _s_array(s_samples) -> np.ndarray:
    arr = np.atleast_1d(
        np.asarray(DEFAULT_S_SAMPLES if s_samples is None else s_samples, dtype=float)
    )
    if arr.size == 0:
        raise ValueError("s_samples must be non-empty")
    return arr


def _t_array(t_samples, lo=0.0, hi=1.0) -> np.ndarray:
    if t_samples is None:
        return np.linspace(lo, hi, DEFAULT_T_COUNT)
    arr = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if arr.size == 0:
        raise ValueError("t_samples must be non-empty")
    return arr


def _time_map(g: GroupSpec, s: float, t_arr: np.ndarray) -> np.ndarray:
    return np.array([float(g.phi0(s, t)) for t in t_arr])


def _fitted_slope(g: GroupSpec, s: float, t_arr: np.ndarray) -> float:
    return float(np.polyfit(t_arr, _time_map(g, s, t_arr), 1)[0])


def dilation_factor(g: GroupSpec, s: float, t_ref: float) -> float:
    """d(phi0_s)/dt: analytic e^{lam*s} when lam is stored, else a
    centered difference at t_ref (only correct for affine maps, which is
    the class the chain rule addresses)."""
    if g.lam is not None:
        return math.exp(g.lam * s)
    lo = g.phi0(s, t_ref - _SLOPE_STEP)
    hi = g.phi0(s, t_ref + _SLOPE_STEP)
    return (hi - lo) / (2.0 * _SLOPE_STEP)


def _space_map(g: GroupSpec, s: float, values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    for k in range(values.shape[0]):
        row = np.asarray(g.phi1(s, values[k]), dtype=float)
        if row.shape != (values.shape[1],):
            raise ValueError("phi1 must preserve the component count")
        out[k] = row
    return out


def _require_defined(x: Trajectory, what: str) -> None:
    if not np.all(x.mask):
        raise ValueError(f"{what} requires a fully defined trajectory")


# ---------------------------------------------------------------------------
# checks


def check_group_law(
    g: GroupSpec, s_samples=None, t_samples=None, tol: float = 1e-9
) -> CheckReport:
    """Composition law of the time map over all ordered pairs of
    parameter samples: phi0_{s+s'} = phi0_s o phi0_{s'} pointwise.

    When the affine data (lam, beta) is stored, two derived laws are
    checked as well: beta(s+s') = e^{lam*s} beta(s') + beta(s), and the
    multiplicative law K(s+s') = K(s) K(s') on the measured dilation
    factors.  (The additive variant sometimes quoted for the factor is
    inconsistent with K(s) = e^{lam*s}; the multiplicative law is what
    an exponential satisfies.)
    """
    s_arr = _s_array(s_samples)
    t_arr = _t_array(t_samples)
    affine = g.lam is not None and g.beta is not None

    worst = 0.0
    slopes = {}
    if affine:
        for s in np.concatenate([s_arr, np.add.outer(s_arr, s_arr).ravel()]):
            slopes.setdefault(float(s), _fitted_slope(g, float(s), t_arr))
    for s in s_arr:
        for sp in s_arr:
            direct = _time_map(g, s + sp, t_arr)
            composed = np.array([float(g.phi0(s, g.phi0(sp, t))) for t in t_arr])
            worst = max(worst, float(np.max(np.abs(direct - composed))))
            if affine:
                b_direct = float(g.beta(s + sp))
                b_law = math.exp(g.lam * s) * float(g.beta(sp)) + float(g.beta(s))
                worst = max(worst, abs(b_direct - b_law))
                worst = max(
                    worst,
                    abs(slopes[float(s + sp)] - slopes[float(s)] * slopes[float(sp)]),
                )
    laws = "composition, beta and factor laws" if affine else "composition law"
    context = f"{laws} on {s_arr.size}^2 parameter pairs x {t_arr.size} nodes"
    return _report(worst, tol, s_arr.size**2 * t_arr.size, context)


def check_admissible(
    g: GroupSpec, s_samples=None, t_samples=None, tol: float = 1e-9
) -> CheckReport:
    """Affinity of t -> phi0_s(t): deviation from the per-s least-squares
    affine fit, plus (when lam is stored) the fitted slope vs e^{lam*s}."""
    s_arr = _s_array(s_samples)
    t_arr = _t_array(t_samples)
    if t_arr.size < 3:
        raise ValueError("need at least 3 time samples to judge affinity")

    worst = 0.0
    for s in s_arr:
        vals = _time_map(g, s, t_arr)
        coeffs = np.polyfit(t_arr, vals, 1)
        worst = max(worst, float(np.max(np.abs(vals - np.polyval(coeffs, t_arr)))))
        if g.lam is not None:
            worst = max(worst, abs(float(coeffs[0]) - math.exp(g.lam * s)))
    slope_note = ", slope vs e^(lam s)" if g.lam is not None else ""
    context = f"affine fit deviation{slope_note} at {s_arr.size} parameters"
    return _report(worst, tol, s_arr.size * t_arr.size, context)


def check_localization(
    g: GroupSpec, a: float, s_samples=None, t_samples=None, tol: float = 1e-9
) -> CheckReport:
    """Fixed base point phi0_s(a) = a; when that holds, also the
    classification phi0_s(t) = K(s)(t - a) + a of groups that are both
    affine and localized."""
    a = float(a)
    s_arr = _s_array(s_samples)
    t_arr = _t_array(t_samples, lo=a, hi=a + 1.0)

    endpoint = max(abs(float(g.phi0(s, a)) - a) for s in s_arr)
    if endpoint > tol:
        return _report(
            endpoint,
            tol,
            s_arr.size,
            "base point moves; dilation-form classification not evaluated",
        )

    worst = endpoint
    for s in s_arr:
        k = (
            math.exp(g.lam * s)
            if g.lam is not None
            else _fitted_slope(g, float(s), t_arr)
        )
        vals = _time_map(g, s, t_arr)
        worst = max(worst, float(np.max(np.abs(vals - (k * (t_arr - a) + a)))))
    context = f"base point fixed; dilation form about a = {a:g} verified"
    return _report(worst, tol, s_arr.size * t_arr.size, context)


def check_chain_rule(
    g: GroupSpec, x: Trajectory, alpha, s: float, tol: float = 1e-3
) -> CheckReport:
    """Compare the two sides of the chain rule for the left Caputo
    derivative under the time map phi0_s.

    Writing y = phi1_s o x and tau = phi0_s(t), the left side is the
    Caputo derivative of y o (phi0_s)^{-1} on the transformed interval
    [phi0_s(a), phi0_s(b)] (transformed base point), the right side is
    the Caputo derivative of y on the original grid scaled by K^{-alpha}
    with K = d(phi0_s)/dt.  For affine time maps the transformed nodes
    are again uniform, so resampling is a formality; the comparison is
    still meaningful (and fails) for non-affine maps, where K is
    measured at the interval midpoint.
    """
    o = _order(alpha)
    _require_defined(x, "check_chain_rule")
    grid = x.grid
    s = float(s)

    tau_nodes = _time_map(g, s, grid.nodes)
    if not np.all(np.diff(tau_nodes) > 0.0):
        raise ValueError(
            "phi0_s is not strictly increasing on the interval; "
            "no transformed grid exists"
        )
    k_factor = dilation_factor(g, s, 0.5 * (grid.a + grid.b))

    y_vals = _space_map(g, s, x.values)
    tgrid = make_grid(tau_nodes[0], tau_nodes[-1], grid.n_sub)
    z_vals = np.empty_like(y_vals)
    for j in range(y_vals.shape[1]):
        z_vals[:, j] = np.interp(tgrid.nodes, tau_nodes, y_vals[:, j])

    lhs = caputo_left(tgrid, o, make_trajectory(tgrid, z_vals)).values
    rhs = (
        caputo_left(grid, o, make_trajectory(grid, y_vals)).values
        * k_factor ** (-o.alpha)
    )
    worst = float(np.max(np.abs(lhs - rhs)))
    context = (
        f"transformed base point {tgrid.a:.6g}, factor K = {k_factor:.6g}, "
        f"alpha = {o.alpha:g}"
    )
    return _report(worst, tol, grid.n_nodes, context)


def _integrand_series(L: LagrangianSpec, times, xvals, vvals) -> np.ndarray:
    out = np.empty(xvals.shape[0])
    for k in range(xvals.shape[0]):
        out[k] = float(L.eval(float(times[k]), xvals[k], vvals[k]))
    return out


def check_invariance(
    L: LagrangianSpec,
    g: GroupSpec,
    x: Trajectory,
    alpha,
    s_samples=None,
    tol: float = 1e-3,
    fixed_base: bool = False,
) -> CheckReport:
    """Invariance of the action under the group, sampled over s.

    The reference value is the action of x itself.  For each s the
    transformed action is evaluated in the change-of-variables form on
    the *original* grid,

        integral of L(phi0_s(t), phi1_s(x), K^{-alpha} D^alpha[phi1_s o x]) * K,

    valid when the time map is affine with slope K.  The reported
    violation is the worst |gap| / (|reference| + 1) over the samples.

    With ``fixed_base=True`` the transformed action is instead evaluated
    on the transformed grid while keeping the operator base point at a
    (the fixed-base definition of invariance); that definition only
    makes sense for groups fixing the base point, so phi0_s(a) != a
    raises ValueError.
    """
    o = _order(alpha)
    _require_defined(x, "check_invariance")
    if L.dim != x.dim:
        raise ValueError(f"Lagrangian dim {L.dim} != trajectory dim {x.dim}")
    s_arr = _s_array(s_samples)
    grid = x.grid

    dx = caputo_left(grid, o, x).values
    reference = float(
        np.trapezoid(_integrand_series(L, grid.nodes, x.values, dx), dx=grid.h)
    )

    worst = 0.0
    for s in s_arr:
        s = float(s)
        y_vals = _space_map(g, s, x.values)
        if fixed_base:
            tau_nodes = _time_map(g, s, grid.nodes)
            if abs(tau_nodes[0] - grid.a) > 1e-9 * max(1.0, abs(grid.a)):
                raise ValueError(
                    "fixed-base invariance requires phi0_s(a) = a; "
                    f"got phi0_s(a) = {tau_nodes[0]:g} for s = {s:g}"
                )
            if not np.all(np.diff(tau_nodes) > 0.0):
                raise ValueError(
                    "phi0_s is not strictly increasing on the interval"
                )
            tgrid = make_grid(grid.a, tau_nodes[-1], grid.n_sub)
            z_vals = np.empty_like(y_vals)
            for j in range(y_vals.shape[1]):
                z_vals[:, j] = np.interp(tgrid.nodes, tau_nodes, y_vals[:, j])
            dz = caputo_left(tgrid, o, make_trajectory(tgrid, z_vals)).values
            transformed = float(
                np.trapezoid(
                    _integrand_series(L, tgrid.nodes, z_vals, dz), dx=tgrid.h
                )
            )
        else:
            k_factor = dilation_factor(g, s, 0.5 * (grid.a + grid.b))
            times = _time_map(g, s, grid.nodes)
            dy = caputo_left(grid, o, make_trajectory(grid, y_vals)).values
            scaled = dy * k_factor ** (-o.alpha)
            series = _integrand_series(L, times, y_vals, scaled) * k_factor
            transformed = float(np.trapezoid(series, dx=grid.h))
        worst = max(worst, abs(transformed - reference) / (abs(reference) + 1.0))

    mode = "fixed base point" if fixed_base else "transformed base point"
    context = f"{mode}; reference action {reference:.6g}; alpha = {o.alpha:g}"
    return _report(worst, tol, s_arr.size, context)
